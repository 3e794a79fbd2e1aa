use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rigcoh::scalars::{rational_valuation, Field, PAdic, Scalar, Valuation};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ratio() -> impl Strategy<Value = BigRational> {
    (-10_000i64..10_000, 1i64..500).prop_map(|(n, d)| q(n, d))
}

proptest! {
    #[test]
    fn valuation_is_multiplicative(a in ratio(), b in ratio(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let lhs = rational_valuation(&(&a * &b), p);
        prop_assert_eq!(lhs, rational_valuation(&a, p).add(rational_valuation(&b, p)));
    }

    #[test]
    fn valuation_is_ultrametric(a in ratio(), b in ratio(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let (va, vb) = (rational_valuation(&a, p), rational_valuation(&b, p));
        let vs = rational_valuation(&(&a + &b), p);
        prop_assert!(vs >= va.min(vb));
        if va != vb {
            prop_assert_eq!(vs, va.min(vb));
        }
    }

    // p-adic arithmetic agrees with rational arithmetic up to the absolute precision it reports
    #[test]
    fn padic_ops_agree_with_rationals(a in ratio(), b in ratio(), p in prop::sample::select(vec![3u64, 5, 7])) {
        let cap = 12;
        let (x, y) = (PAdic::from_rational(&a, p, cap), PAdic::from_rational(&b, p, cap));
        for (z, exact) in [(x.add(&y), &a + &b), (x.sub(&y), &a - &b), (x.mul(&y), &a * &b)] {
            let err = rational_valuation(&(z.to_rational() - exact), p);
            prop_assert!(err >= Valuation::Finite(z.absolute_precision()), "{:?}", z);
        }
        if b != q(0, 1) {
            let z = x.div(&y).unwrap();
            let err = rational_valuation(&(z.to_rational() - &a / &b), p);
            prop_assert!(err >= Valuation::Finite(z.absolute_precision()));
        }
    }

    #[test]
    fn conversion_preserves_valuation(a in ratio(), p in prop::sample::select(vec![3u64, 5])) {
        let f = Field::padic(p, 10).unwrap();
        let x = f.convert(&Scalar::Rational(a.clone()));
        prop_assert_eq!(x.valuation(p), rational_valuation(&a, p));
        let back = Field::rational(p).convert(&x);
        let err = rational_valuation(&(back.as_rational().unwrap() - &a), p);
        let v = rational_valuation(&a, p).finite().unwrap_or(0);
        prop_assert!(err >= Valuation::Finite(v + 10));
    }
}

#[test]
fn inverse_of_non_unit_keeps_valuation() {
    let x = PAdic::from_rational(&q(50, 3), 5, 8);
    let y = x.inv().unwrap();
    assert_eq!(y.valuation(), Valuation::Finite(-2));
    assert_eq!(x.mul(&y).to_rational(), q(1, 1));
}
