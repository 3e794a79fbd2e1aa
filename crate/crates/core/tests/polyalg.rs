use proptest::prelude::*;
use rigcoh::polyalg::{groebner, lift_in_ideal, Budget, Monomial, MonomialOrder, SparsePoly};
use rigcoh::scalars::Scalar;

fn poly(max_exp: u32, max_terms: usize) -> impl Strategy<Value = SparsePoly> {
    prop::collection::vec((0..=max_exp, 0..=max_exp, -4i64..=4), 1..=max_terms)
        .prop_map(|ts| SparsePoly::from_terms(2, ts.into_iter().map(|(a, b, c)| (Monomial(vec![a, b]), Scalar::from_i64(c)))))
}

fn ideal() -> impl Strategy<Value = Vec<SparsePoly>> {
    prop::collection::vec(poly(2, 3), 1..=2).prop_filter("nonzero generators", |g| g.iter().all(|f| !f.is_zero()))
}

fn order() -> impl Strategy<Value = MonomialOrder> {
    prop::sample::select(vec![MonomialOrder::GrevLex, MonomialOrder::Lex, MonomialOrder::DegLex])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arithmetic_keeps_no_zero_terms(f in poly(3, 4), g in poly(3, 4)) {
        prop_assert!(f.sub(&f).is_zero());
        for h in [f.add(&g), f.sub(&g), f.mul(&g), f.derivative(0)] {
            prop_assert!(h.terms().all(|(_, c)| !c.is_zero()));
        }
    }

    #[test]
    fn degree_of_product(f in poly(3, 4), g in poly(3, 4)) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        prop_assert_eq!(f.mul(&g).degree(), Some(f.degree().unwrap() + g.degree().unwrap()));
    }

    #[test]
    fn normal_form_laws(gens in ideal(), f in poly(3, 3), g in poly(3, 3), ord in order()) {
        let Ok(gb) = groebner(&gens, ord, Budget::default()) else { return Ok(()) };
        for r in &gens {
            prop_assert!(gb.normal_form(r).is_zero());
        }
        let nf = gb.normal_form(&f);
        prop_assert_eq!(gb.normal_form(&nf), nf.clone());
        prop_assert!(nf.terms().all(|(m, _)| gb.is_standard(m)));
        let lhs = gb.normal_form(&f.mul(&g));
        prop_assert_eq!(lhs, gb.normal_form(&nf.mul(&gb.normal_form(&g))));
        // f - NF(f) lies in the ideal
        prop_assert!(gb.normal_form(&f.sub(&nf)).is_zero());
    }

    #[test]
    fn cofactors_reconstruct(gens in ideal(), a in poly(2, 2), b in poly(2, 2), ord in order()) {
        let f = gens.iter().zip([&a, &b]).fold(SparsePoly::zero(2), |acc, (g, c)| acc.add(&c.mul(g)));
        let Ok(lift) = lift_in_ideal(&f, &gens, ord, Budget::default()) else { return Ok(()) };
        let cof = lift.expect("combination of generators lies in the ideal");
        let back = gens.iter().zip(&cof).fold(SparsePoly::zero(2), |acc, (g, c)| acc.add(&c.mul(g)));
        prop_assert_eq!(back, f);
        if let Ok(gb) = groebner(&gens, ord, Budget::default()) {
            for (k, row) in gb.cofactors.iter().enumerate() {
                let s = gens.iter().zip(row).fold(SparsePoly::zero(2), |acc, (g, c)| acc.add(&c.mul(g)));
                prop_assert_eq!(&s, &gb.basis[k]);
            }
        }
    }

    #[test]
    fn reduced_basis_ignores_generator_order(gens in ideal(), extra in poly(2, 2), ord in order()) {
        let mut gens = gens;
        gens.push(gens[0].mul(&extra));
        let Ok(a) = groebner(&gens, ord, Budget::default()) else { return Ok(()) };
        let rev: Vec<SparsePoly> = gens.iter().rev().cloned().collect();
        let b = groebner(&rev, ord, Budget::default()).unwrap();
        let (mut x, mut y) = (a.basis.clone(), b.basis.clone());
        x.sort_by_key(|f| f.to_text(&["x".into(), "y".into()]));
        y.sort_by_key(|f| f.to_text(&["x".into(), "y".into()]));
        prop_assert_eq!(x, y);
    }
}

#[test]
fn unit_ideal_is_detected() {
    let x = SparsePoly::var(2, 0);
    let gens = vec![x.clone(), x.sub(&SparsePoly::one(2))];
    let gb = groebner(&gens, MonomialOrder::GrevLex, Budget::default()).unwrap();
    assert!(gb.is_unit());
    assert_eq!(gb.basis, vec![SparsePoly::one(2)]);
}
