use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigcoh::cyclic::{check_hkr, check_identities, hh_graded_dims, random_algebra, random_chain, CyclicOps};
use rigcoh::polyalg::PresentedAlgebra;

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mixed_complex_identities_on_random_algebras(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = random_algebra(&mut rng);
        let ops = CyclicOps::new(&alg);
        let chains: Vec<_> = (0..4).map(|_| {
            let n = rng.gen_range(0..=3);
            random_chain(&alg, n, 2, 3, &mut rng)
        }).collect();
        let rep = check_identities(&ops, &chains);
        prop_assert!(rep.all_hold(), "{:?}", rep);
        let hkr = check_hkr(&ops, &chains);
        prop_assert!(hkr.all_hold(), "{:?}", hkr);
    }

    // HH_k of K[x_1..x_n] in internal degree d is Ω^k in degree d
    #[test]
    fn hochschild_slices_of_polynomial_rings(n in 1usize..=2, d in 0usize..4) {
        let names = ["x", "y"];
        let alg = PresentedAlgebra::polynomial_ring(&names[..n]);
        let got = hh_graded_dims(&alg, d, 2).unwrap();
        let want: Vec<usize> = (0..=2).map(|k| if k > d { 0 } else { binom(n, k) * binom(d - k + n - 1, n - 1) }).collect();
        prop_assert_eq!(got, want);
    }
}
