use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rigcoh::cyclic::random_algebra;
use rigcoh::derham::{d_poly, de_rham_complex, Form};
use rigcoh::polyalg::{Monomial, PresentedAlgebra, SparsePoly};
use rigcoh::scalars::Scalar;

const N: usize = 3;

fn poly() -> impl Strategy<Value = SparsePoly> {
    prop::collection::vec((prop::collection::vec(0u32..3, N), -3i64..=3), 0..4)
        .prop_map(|ts| SparsePoly::from_terms(N, ts.into_iter().map(|(e, c)| (Monomial(e), Scalar::from_i64(c)))))
}

/// `Σ f_S dx_S` over `|S| = l`.
fn form(l: u32) -> impl Strategy<Value = Form> {
    let masks: Vec<u32> = (0u32..1 << N).filter(|m| m.count_ones() == l).collect();
    prop::collection::vec(poly(), masks.len()).prop_map(move |fs| {
        fs.iter().zip(&masks).fold(Form::zero(N), |acc, (f, &mask)| {
            let dx = (0..N).filter(|i| mask & (1 << i) != 0).fold(Form::from_poly(&SparsePoly::one(N)), |w, i| w.wedge(&Form::dx(N, i)));
            acc.add(&dx.mul_poly(f))
        })
    })
}

fn sign(l: u32) -> Scalar {
    Scalar::from_i64(if l % 2 == 0 { 1 } else { -1 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_squares_to_zero(w in (0u32..=2).prop_flat_map(form)) {
        prop_assert!(w.d().d().is_zero());
    }

    #[test]
    fn leibniz_for_functions(f in poly(), g in poly()) {
        let lhs = d_poly(&f.mul(&g));
        prop_assert_eq!(lhs, d_poly(&g).mul_poly(&f).add(&d_poly(&f).mul_poly(&g)));
    }

    #[test]
    fn leibniz_for_forms(a in form(1), b in form(1), c in form(0)) {
        for (w, l) in [(&a, 1), (&c, 0)] {
            let lhs = w.wedge(&b).d();
            let rhs = w.d().wedge(&b).add(&w.wedge(&b.d()).scale(&sign(l)));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn pullback_commutes_with_d(w in form(1), images in prop::collection::vec(poly(), N)) {
        let images: Vec<SparsePoly> = images.iter().map(|f| f.substitute(&[SparsePoly::var(2, 0), SparsePoly::var(2, 1), SparsePoly::var(2, 0)], 2)).collect();
        prop_assert_eq!(w.pullback(&images, 2).d(), w.d().pullback(&images, 2));
    }

    #[test]
    fn quotient_complexes_are_complexes(seed in any::<u64>(), cap in 3u32..6) {
        let alg = random_algebra(&mut ChaCha8Rng::seed_from_u64(seed));
        let dr = de_rham_complex(&alg, cap);
        prop_assert!(dr.complex.check_d_squared().is_ok());
        let top = dr.complex.dims.len();
        prop_assert_eq!(top, alg.nvars() + 1);
    }
}

// Truncating coefficients at degree D leaves the closed 1-forms whose
// primitives have degree D + 1, one per monomial of that degree.
#[test]
fn truncation_defect_of_affine_space() {
    let names = ["x", "y", "z"];
    for n in 1..=3 {
        let alg = PresentedAlgebra::polynomial_ring(&names[..n]);
        for cap in 2..=6u32 {
            let h = de_rham_complex(&alg, cap).complex.homology_dims(5, 0).unwrap();
            assert_eq!(h[0], 1);
            assert_eq!(h[1], Monomial::all_of_degree(n, cap + 1).len(), "n = {n}, cap = {cap}");
        }
    }
}
