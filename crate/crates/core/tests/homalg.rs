use proptest::prelude::*;
use rigcoh::homalg::{holim_bookkeeping, rank, BettiCell, BettiReport, Certificate, FiniteComplex, Matrix, ProComplex};
use rigcoh::scalars::{Field, Scalar};

const P: u64 = 5;

/// `(P, P^{-1})` for a product of elementary matrices `I + c e_ij`.
fn elementary(n: usize, ops: &[(usize, usize, i64)]) -> (Matrix, Matrix) {
    let (mut a, mut b) = (Matrix::identity(n), Matrix::identity(n));
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        let mut e = Matrix::identity(n);
        e.set(i, j, Scalar::from_i64(c));
        let mut f = Matrix::identity(n);
        f.set(i, j, Scalar::from_i64(-c));
        a = a.mul(&e).unwrap();
        b = f.mul(&b).unwrap();
    }
    (a, b)
}

/// A complex with prescribed cohomology `h[k]`, where `e[k]` is the rank of `d^k`,
/// disguised by random changes of basis.
fn disguised(h: &[usize], e: &[usize], ops: &[(usize, usize, i64)]) -> FiniteComplex {
    let len = h.len();
    let b = |k: usize| if k == 0 { 0 } else { e[k - 1] };
    let dims: Vec<usize> = (0..len).map(|k| b(k) + h[k] + e[k]).collect();
    let bases: Vec<(Matrix, Matrix)> = dims.iter().map(|&n| elementary(n.max(1), ops)).collect();
    let mut d = Vec::new();
    for k in 0..len - 1 {
        let mut std = Matrix::zeros(dims[k + 1], dims[k]);
        for r in 0..e[k] {
            std.set(r, b(k) + h[k] + r, Scalar::one());
        }
        if dims[k] == 0 || dims[k + 1] == 0 {
            d.push(std);
            continue;
        }
        d.push(bases[k + 1].0.mul(&std).unwrap().mul(&bases[k].1).unwrap());
    }
    FiniteComplex::new(0, dims, d).unwrap()
}

fn shape() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (2usize..5).prop_flat_map(|len| {
        (prop::collection::vec(0usize..3, len), prop::collection::vec(0usize..3, len)).prop_map(move |(h, mut e)| {
            e[len - 1] = 0;
            (h, e)
        })
    })
}

fn ops() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    prop::collection::vec((0usize..8, 0usize..8, -3i64..=3), 0..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn disguised_complexes_have_the_planted_cohomology((h, e) in shape(), ops in ops()) {
        let c = disguised(&h, &e, &ops);
        prop_assert!(c.check_d_squared().is_ok());
        prop_assert_eq!(c.homology_dims(P, 0).unwrap(), h);
    }

    #[test]
    fn holim_of_scaled_towers((h, e) in shape(), ops in ops(), scales in prop::collection::vec(-2i64..=2, 1..4)) {
        let c = disguised(&h, &e, &ops);
        let levels = vec![c.clone(); scales.len() + 1];
        let transitions: Vec<Vec<Matrix>> = scales
            .iter()
            .map(|&s| c.dims.iter().map(|&n| Matrix::identity(n).map(|x| x.mul(&Scalar::from_i64(s)))).collect())
            .collect();
        let pc = ProComplex::new(levels, transitions).unwrap();
        prop_assert!(pc.check_chain_maps().is_ok());
        let rows = holim_bookkeeping(&pc, P).unwrap();
        for (n, &(hn, lim, lim1)) in rows.iter().enumerate() {
            prop_assert_eq!(hn, lim + lim1);
            // a finite tower has vanishing lim^1 and its limit is the deepest level
            prop_assert_eq!(lim1, 0);
            prop_assert_eq!(lim, h.get(n).copied().unwrap_or(0));
        }
    }

    #[test]
    fn padic_rank_matches_rational_when_certified(rows in prop::collection::vec(prop::collection::vec(-30i64..30, 5), 1..6)) {
        let m = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::from_i64(x)).collect()).collect());
        let exact = rank(&m, P, 0).unwrap();
        let f = Field::padic(P, 12).unwrap();
        if let Ok(r) = rank(&m.map(|x| f.convert(x)), P, 0) {
            prop_assert_eq!(r, exact);
        }
        let sq = m.transpose().mul(&m).unwrap();
        prop_assert_eq!(rank(&sq, P, 0).unwrap(), exact);
    }

    #[test]
    fn stabilized_only_when_the_window_agrees(values in prop::collection::vec(prop::collection::vec(0usize..3, 2), 9), window in 1usize..4) {
        let caps = [4u32, 6, 8];
        let levels = [1u32, 2, 3];
        let cells: Vec<BettiCell> = values
            .iter()
            .enumerate()
            .map(|(i, v)| BettiCell { degree_cap: caps[i / 3], level_cap: levels[i % 3], dims: Some(v.clone()), error: None })
            .collect();
        let rep = BettiReport::assemble(caps.to_vec(), levels.to_vec(), window, cells, Certificate::exact());
        for (k, s) in rep.stable.iter().enumerate() {
            let top = values[8][k];
            let lo = 3 - window;
            let agree = (lo..3).all(|i| (lo..3).all(|j| values[i * 3 + j][k] == top));
            prop_assert_eq!(s.value, Some(top));
            prop_assert_eq!(s.stabilized, agree);
        }
    }
}
