//! Hochschild and cyclic operators on tensor powers of a presented algebra,
//! the graded Hochschild slices, the antisymmetrisation map to forms and
//! periodic cyclic homology by periodification of de Rham data.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::derham::{d_poly, Form};
use crate::homalg::{rank, BettiReport, Certificate, Matrix};
use crate::polyalg::{Monomial, PresentedAlgebra, SparsePoly};
use crate::scalars::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CyclicError {
    #[error("graded slices need positive weights making every relation homogeneous")]
    NotGraded,
    #[error("coefficient is not rational")]
    NotRational,
    #[error(transparent)]
    Homalg(#[from] crate::homalg::HomalgError),
}

/// The sign table for `b`, `b′`, `t` and `N`. Everything else is built from
/// these four entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum SignConvention {
    /// `N = Σ_i t^i`, so the rotated summand starting at `a_i` has sign `(−1)^{n·i}`.
    #[default]
    Standard,
    /// Every summand of `N` carries `(−1)^n`. Breaks `(1−t)N = 0` for odd `n`.
    Literal,
}

fn sign(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

impl SignConvention {
    /// Face `a_i a_{i+1}` in `b` and `b′`.
    pub fn face(self, i: usize) -> i64 {
        sign(i)
    }

    /// Last face `a_n a_0 ⊗ a_1 ⊗ … ⊗ a_{n−1}` of `b` on `C_n`.
    pub fn wrap(self, n: usize) -> i64 {
        sign(n)
    }

    /// `t(a_0 ⊗ … ⊗ a_n) = ± a_n ⊗ a_0 ⊗ … ⊗ a_{n−1}` on `C_n`.
    pub fn rotation(self, n: usize) -> i64 {
        sign(n)
    }

    /// Summand `a_i ⊗ … ⊗ a_n ⊗ a_0 ⊗ … ⊗ a_{i−1}` of `N` on `C_n`.
    pub fn norm(self, n: usize, i: usize) -> i64 {
        match self {
            SignConvention::Standard => sign(n * i),
            SignConvention::Literal => sign(n),
        }
    }
}

pub type Tensor = Vec<Monomial>;

/// A rational combination of elementary tensors `a_0 ⊗ … ⊗ a_n` of standard monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainElement {
    pub nvars: usize,
    /// Homological degree `n`; tensors have `n + 1` entries.
    pub degree: usize,
    pub terms: BTreeMap<Tensor, BigRational>,
}

impl ChainElement {
    pub fn zero(nvars: usize, degree: usize) -> ChainElement {
        ChainElement { nvars, degree, terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_tensor(&mut self, t: Tensor, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(t) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `a_0 ⊗ … ⊗ a_n` with each entry reduced to normal form and expanded.
    pub fn elementary(alg: &PresentedAlgebra, entries: &[SparsePoly]) -> Result<ChainElement, CyclicError> {
        assert!(!entries.is_empty());
        let mut out = ChainElement::zero(alg.nvars(), entries.len() - 1);
        let mut partial: Vec<(Tensor, BigRational)> = vec![(Vec::new(), BigRational::one())];
        for e in entries {
            let nf = alg.normal_form(e).rational_terms().ok_or(CyclicError::NotRational)?;
            let mut next = Vec::new();
            for (t, c) in &partial {
                for (m, x) in &nf {
                    let mut t2 = t.clone();
                    t2.push(m.clone());
                    next.push((t2, c * x));
                }
            }
            partial = next;
        }
        for (t, c) in partial {
            out.add_tensor(t, &c);
        }
        Ok(out)
    }

    pub fn add(&self, o: &ChainElement) -> ChainElement {
        let mut r = self.clone();
        for (t, c) in &o.terms {
            r.add_tensor(t.clone(), c);
        }
        r
    }

    pub fn sub(&self, o: &ChainElement) -> ChainElement {
        self.add(&o.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> ChainElement {
        let mut r = ChainElement::zero(self.nvars, self.degree);
        for (t, x) in &self.terms {
            r.add_tensor(t.clone(), &(x * c));
        }
        r
    }

    /// Internal degree of each tensor under the given weights.
    pub fn internal_degrees(&self, w: &[i64]) -> Vec<i64> {
        self.terms.keys().map(|t| t.iter().map(|m| m.weighted_degree(w)).sum()).collect()
    }
}

/// Operators of the mixed complex `(C(A), b, B)` and the bar complex.
#[derive(Clone, Copy, Debug)]
pub struct CyclicOps<'a> {
    pub alg: &'a PresentedAlgebra,
    pub signs: SignConvention,
}

impl<'a> CyclicOps<'a> {
    pub fn new(alg: &'a PresentedAlgebra) -> CyclicOps<'a> {
        CyclicOps { alg, signs: SignConvention::Standard }
    }

    pub fn with_signs(alg: &'a PresentedAlgebra, signs: SignConvention) -> CyclicOps<'a> {
        CyclicOps { alg, signs }
    }

    fn product(&self, a: &Monomial, b: &Monomial) -> Vec<(Monomial, BigRational)> {
        let f = self.alg.mul(&SparsePoly::monomial(a.clone()), &SparsePoly::monomial(b.clone()));
        f.rational_terms().expect("rational algebra")
    }

    // tensor with entries i and j replaced by their product, placed at i
    fn merged(&self, out: &mut ChainElement, t: &Tensor, c: &BigRational, i: usize, sgn: i64) {
        let n = t.len();
        let j = (i + 1) % n;
        for (m, x) in self.product(&t[i], &t[j]) {
            let mut u: Tensor = Vec::with_capacity(n - 1);
            if j == 0 {
                u.push(m.clone());
                u.extend_from_slice(&t[1..n - 1]);
            } else {
                u.extend_from_slice(&t[..i]);
                u.push(m.clone());
                u.extend_from_slice(&t[j + 1..]);
            }
            out.add_tensor(u, &(c * &x * BigRational::from_integer(sgn.into())));
        }
    }

    /// Hochschild boundary `C_n → C_{n−1}`; zero on `C_0`.
    pub fn b(&self, x: &ChainElement) -> ChainElement {
        let n = x.degree;
        let mut out = ChainElement::zero(x.nvars, n.saturating_sub(1));
        if n == 0 {
            return out;
        }
        for (t, c) in &x.terms {
            for i in 0..n {
                self.merged(&mut out, t, c, i, self.signs.face(i));
            }
            // a_n a_0 ⊗ a_1 ⊗ … ⊗ a_{n−1}
            self.merged(&mut out, t, c, n, self.signs.wrap(n));
        }
        out
    }

    /// Bar boundary: all faces of `b` except the last one.
    pub fn b_prime(&self, x: &ChainElement) -> ChainElement {
        let n = x.degree;
        let mut out = ChainElement::zero(x.nvars, n.saturating_sub(1));
        for (t, c) in &x.terms {
            for i in 0..n {
                self.merged(&mut out, t, c, i, self.signs.face(i));
            }
        }
        out
    }

    pub fn t(&self, x: &ChainElement) -> ChainElement {
        let n = x.degree;
        let sg = BigRational::from_integer(self.signs.rotation(n).into());
        let mut out = ChainElement::zero(x.nvars, n);
        for (t, c) in &x.terms {
            let mut u = Vec::with_capacity(n + 1);
            u.push(t[n].clone());
            u.extend_from_slice(&t[..n]);
            out.add_tensor(u, &(c * &sg));
        }
        out
    }

    pub fn norm(&self, x: &ChainElement) -> ChainElement {
        let n = x.degree;
        let mut out = ChainElement::zero(x.nvars, n);
        for (t, c) in &x.terms {
            for i in 0..=n {
                let mut u = t[i..].to_vec();
                u.extend_from_slice(&t[..i]);
                out.add_tensor(u, &(c * BigRational::from_integer(self.signs.norm(n, i).into())));
            }
        }
        out
    }

    /// `s(a_0 ⊗ … ⊗ a_n) = 1 ⊗ a_0 ⊗ … ⊗ a_n`.
    pub fn s(&self, x: &ChainElement) -> ChainElement {
        let mut out = ChainElement::zero(x.nvars, x.degree + 1);
        for (t, c) in &x.terms {
            let mut u = vec![Monomial::one(x.nvars)];
            u.extend_from_slice(t);
            out.add_tensor(u, c);
        }
        out
    }

    /// Connes' operator `B = (1 − t) s N`.
    pub fn connes_b(&self, x: &ChainElement) -> ChainElement {
        let y = self.s(&self.norm(x));
        y.sub(&self.t(&y))
    }
}

/// `a_0 ⊗ … ⊗ a_n ↦ (1/n!) a_0 da_1 ∧ … ∧ da_n` in forms on the ambient polynomial ring.
pub fn hkr(x: &ChainElement) -> Form {
    let n = x.degree;
    let fact: BigInt = (1..=n as u64).map(BigInt::from).product();
    let inv = BigRational::new(BigInt::one(), fact);
    let mut out = Form::zero(x.nvars);
    for (t, c) in &x.terms {
        let mut f = Form::from_poly(&SparsePoly::term(t[0].clone(), Scalar::Rational(c * &inv)));
        for m in &t[1..] {
            f = f.wedge(&d_poly(&SparsePoly::monomial(m.clone())));
        }
        out = out.add(&f);
    }
    out
}

fn positive_weights(alg: &PresentedAlgebra) -> Result<Vec<i64>, CyclicError> {
    let w = alg.weights.clone().unwrap_or_else(|| vec![1; alg.nvars()]);
    if w.iter().any(|&x| x <= 0) || !alg.relations.iter().all(|r| r.is_homogeneous(&w)) {
        return Err(CyclicError::NotGraded);
    }
    Ok(w)
}

// tensors of n+1 standard monomials with weights summing to d
fn slice_basis(by_deg: &[Vec<Monomial>], n: usize, d: usize) -> Vec<Tensor> {
    if n == 0 {
        return by_deg[d].iter().map(|m| vec![m.clone()]).collect();
    }
    let mut out = Vec::new();
    for (e, ms) in by_deg.iter().enumerate().take(d + 1) {
        for rest in slice_basis(by_deg, n - 1, d - e) {
            for m in ms {
                let mut t = vec![m.clone()];
                t.extend(rest.iter().cloned());
                out.push(t);
            }
        }
    }
    out
}

/// Dimensions of `HH_0, …, HH_{n_max}` in internal degree `d`, exact over `Q`.
/// Unweighted algebras count as graded by total degree when the relations are homogeneous.
pub fn hh_graded_dims(alg: &PresentedAlgebra, d: usize, n_max: usize) -> Result<Vec<usize>, CyclicError> {
    let w = positive_weights(alg)?;
    if alg.is_zero_ring() {
        return Ok(vec![0; n_max + 1]);
    }
    let by_deg: Vec<Vec<Monomial>> = {
        let all = alg.standard_monomials(d as u32);
        (0..=d).map(|e| all.iter().filter(|m| m.weighted_degree(&w) == e as i64).cloned().collect()).collect()
    };
    let bases: Vec<Vec<Tensor>> = (0..=n_max + 1).map(|n| slice_basis(&by_deg, n, d)).collect();
    let ops = CyclicOps::new(alg);
    // ranks[n] = rank of b: C_n → C_{n−1}
    let mut ranks = vec![0usize; n_max + 2];
    for n in 1..=n_max + 1 {
        let index: BTreeMap<&Tensor, usize> = bases[n - 1].iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut cols = Vec::with_capacity(bases[n].len());
        for t in &bases[n] {
            let mut x = ChainElement::zero(alg.nvars(), n);
            x.add_tensor(t.clone(), &BigRational::one());
            let mut v = vec![Scalar::zero(); bases[n - 1].len()];
            for (u, c) in ops.b(&x).terms {
                v[index[&u]] = Scalar::Rational(c);
            }
            cols.push(v);
        }
        ranks[n] = rank(&Matrix::from_columns(&cols, bases[n - 1].len()), 2, 0)?;
    }
    Ok((0..=n_max).map(|n| bases[n].len() - ranks[n] - ranks[n + 1]).collect())
}

/// A random chain of degree `n` with `terms` elementary tensors whose entries
/// are normal forms of random polynomials of degree at most `max_deg`.
pub fn random_chain<R: Rng>(alg: &PresentedAlgebra, n: usize, terms: usize, max_deg: u32, rng: &mut R) -> ChainElement {
    let monos = Monomial::all_up_to_degree(alg.nvars(), max_deg);
    let mut x = ChainElement::zero(alg.nvars(), n);
    for _ in 0..terms {
        let entries: Vec<SparsePoly> = (0..=n)
            .map(|_| {
                let k = rng.gen_range(1..=2);
                SparsePoly::from_rational_terms(
                    alg.nvars(),
                    (0..k).map(|_| (monos[rng.gen_range(0..monos.len())].clone(), BigRational::from_integer(rng.gen_range(-3i64..=3).into()))),
                )
            })
            .collect();
        let e = ChainElement::elementary(alg, &entries).expect("rational algebra");
        x = x.add(&e.scale(&BigRational::new(rng.gen_range(1i64..=4).into(), rng.gen_range(1i64..=3).into())));
    }
    x
}

/// Outcome of the mixed-complex identity suite on a batch of chains.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub chains: usize,
    pub b_squared: usize,
    pub connes_squared: usize,
    pub anticommute: usize,
    pub bar_contraction: usize,
}

impl IdentityReport {
    /// Number of chains that passed all four identities is `chains` iff this holds.
    pub fn all_hold(&self) -> bool {
        [self.b_squared, self.connes_squared, self.anticommute, self.bar_contraction].iter().all(|&k| k == self.chains)
    }
}

/// Check `b² = 0`, `B² = 0`, `bB + Bb = 0` and `b′s + sb′ = id` on each chain.
pub fn check_identities(ops: &CyclicOps, chains: &[ChainElement]) -> IdentityReport {
    let mut r = IdentityReport { chains: chains.len(), ..Default::default() };
    for x in chains {
        if ops.b(&ops.b(x)).is_zero() {
            r.b_squared += 1;
        }
        if ops.connes_b(&ops.connes_b(x)).is_zero() {
            r.connes_squared += 1;
        }
        // bB and Bb land in the same degree only when n ≥ 1
        let bb = ops.b(&ops.connes_b(x));
        let anti = if x.degree == 0 { bb.is_zero() } else { bb.add(&ops.connes_b(&ops.b(x))).is_zero() };
        if anti {
            r.anticommute += 1;
        }
        let h = ops.b_prime(&ops.s(x));
        let h = if x.degree == 0 { h } else { h.add(&ops.s(&ops.b_prime(x))) };
        if h == *x {
            r.bar_contraction += 1;
        }
    }
    r
}

/// A random commutative algebra in one or two variables with at most one
/// relation of degree at most 3 and small integer coefficients.
pub fn random_algebra<R: Rng>(rng: &mut R) -> PresentedAlgebra {
    let names = ["x", "y"];
    loop {
        let n = rng.gen_range(1..=2);
        let vars: Vec<String> = names[..n].iter().map(|s| s.to_string()).collect();
        let mut rels = Vec::new();
        if rng.gen_bool(0.75) {
            let monos = Monomial::all_up_to_degree(n, 3);
            let k = rng.gen_range(2..=3);
            let f = SparsePoly::from_rational_terms(
                n,
                (0..k).map(|_| (monos[rng.gen_range(0..monos.len())].clone(), BigRational::from_integer(rng.gen_range(-3i64..=3).into()))),
            );
            if f.degree().unwrap_or(0) == 0 {
                continue;
            }
            rels.push(f);
        }
        if let Ok(a) = PresentedAlgebra::new(vars, rels, None) {
            if !a.is_zero_ring() {
                return a;
            }
        }
    }
}

/// Counts of chains on which `hkr ∘ b = 0` and `hkr ∘ B = d ∘ hkr` hold in `Ω_A`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HkrReport {
    pub chains: usize,
    pub kills_b: usize,
    pub intertwines_connes_with_d: usize,
}

impl HkrReport {
    pub fn all_hold(&self) -> bool {
        self.kills_b == self.chains && self.intertwines_connes_with_d == self.chains
    }
}

fn coefficient_degree(f: &Form) -> u32 {
    f.terms.keys().map(|(m, _)| m.degree()).max().unwrap_or(0)
}

// zero in Ω_A; relation multiples are generated up to a margin above the form's degree
fn vanishes_in(alg: &PresentedAlgebra, f: &Form) -> bool {
    if f.is_zero() {
        return true;
    }
    if alg.relations.is_empty() {
        return false;
    }
    let Some(l) = f.form_degree() else { return false };
    let dr = crate::derham::de_rham_complex(alg, coefficient_degree(f) + 4);
    dr.coordinates(l as usize, f).is_some_and(|v| v.iter().all(|c| c.is_zero()))
}

pub fn check_hkr(ops: &CyclicOps, chains: &[ChainElement]) -> HkrReport {
    let mut r = HkrReport { chains: chains.len(), ..Default::default() };
    for x in chains {
        if x.degree == 0 || vanishes_in(ops.alg, &hkr(&ops.b(x))) {
            r.kills_b += 1;
        }
        if vanishes_in(ops.alg, &hkr(&ops.connes_b(x)).sub(&hkr(x).d())) {
            r.intertwines_connes_with_d += 1;
        }
    }
    r
}

/// `(HP_0, HP_1)`; a parity is `None` if one of its Betti degrees is unresolved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HpReport {
    pub hp0: Option<usize>,
    pub hp1: Option<usize>,
    pub unresolved_degrees: Vec<usize>,
    pub certificate: Certificate,
}

/// `HP_j = Σ_n H^{2n+j}` of a complex given by its cohomology dimensions.
pub fn periodify(dims: &[usize]) -> [usize; 2] {
    let mut hp = [0, 0];
    for (n, d) in dims.iter().enumerate() {
        hp[n % 2] += d;
    }
    hp
}

/// Periodic cyclic homology from stabilized rigid Betti numbers.
pub fn hp_report(betti: &BettiReport) -> HpReport {
    let mut hp = [Some(0), Some(0)];
    for s in &betti.stable {
        let slot = &mut hp[s.degree % 2];
        *slot = match (*slot, s.stabilized, s.value) {
            (Some(a), true, Some(v)) => Some(a + v),
            _ => None,
        };
    }
    HpReport { hp0: hp[0], hp1: hp[1], unresolved_degrees: betti.unresolved(), certificate: betti.certificate.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn el(alg: &PresentedAlgebra, s: &[&str]) -> ChainElement {
        let e: Vec<_> = s.iter().map(|x| alg.parse_element(x).unwrap()).collect();
        ChainElement::elementary(alg, &e).unwrap()
    }

    #[test]
    fn b_on_small_tensors() {
        let a = PresentedAlgebra::polynomial_ring(&["x", "y"]);
        let ops = CyclicOps::new(&a);
        assert!(ops.b(&el(&a, &["x+y", "x*y"])).is_zero());
        let got = ops.b(&el(&a, &["1", "x", "y"]));
        let want = el(&a, &["x", "y"]).sub(&el(&a, &["1", "x*y"])).add(&el(&a, &["y", "x"]));
        assert_eq!(got, want);
    }

    #[test]
    fn s_norm_and_connes_in_degree_zero() {
        let a = PresentedAlgebra::polynomial_ring(&["x"]);
        let ops = CyclicOps::new(&a);
        let x = el(&a, &["x"]);
        assert_eq!(ops.s(&x), el(&a, &["1", "x"]));
        assert_eq!(ops.norm(&x), x);
        assert_eq!(ops.connes_b(&x), el(&a, &["1", "x"]).add(&el(&a, &["x", "1"])));
    }

    #[test]
    fn literal_norm_breaks_one_minus_t() {
        let a = PresentedAlgebra::polynomial_ring(&["x", "y"]);
        let x = el(&a, &["1", "x", "y", "x*y"]);
        for (conv, n) in [(SignConvention::Standard, 1), (SignConvention::Standard, 3), (SignConvention::Literal, 2)] {
            let ops = CyclicOps::with_signs(&a, conv);
            let x = el(&a, &["1", "x", "y", "x*y"][..=n]);
            let nx = ops.norm(&x);
            assert!(nx.sub(&ops.t(&nx)).is_zero(), "{conv:?} n={n}");
        }
        let lit = CyclicOps::with_signs(&a, SignConvention::Literal);
        let nx = lit.norm(&x);
        assert!(!nx.sub(&lit.t(&nx)).is_zero());
        let r = check_identities(&lit, &[x]);
        assert!(!r.all_hold());
    }

    #[test]
    fn identities_on_a_quotient() {
        let a = PresentedAlgebra::parse(&["x", "y"], &["x*y - 1"]).unwrap();
        let ops = CyclicOps::new(&a);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let chains: Vec<_> = (0..12).map(|i| random_chain(&a, i % 4, 2, 2, &mut rng)).collect();
        assert!(check_identities(&ops, &chains).all_hold());
    }

    #[test]
    fn hkr_normalisation() {
        let a = PresentedAlgebra::polynomial_ring(&["x", "y", "z"]);
        let f = hkr(&el(&a, &["x", "y", "z"]));
        let want = Form::dx(3, 1).wedge(&Form::dx(3, 2)).mul_poly(&SparsePoly::var(3, 0)).scale(&Scalar::from_ratio(1, 2));
        assert_eq!(f, want);
        assert_eq!(hkr(&el(&a, &["x", "y"])), Form::dx(3, 1).mul_poly(&SparsePoly::var(3, 0)));
    }

    #[test]
    fn hkr_is_a_map_of_mixed_complexes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for alg in [PresentedAlgebra::polynomial_ring(&["x"]), PresentedAlgebra::polynomial_ring(&["x", "y"]), PresentedAlgebra::parse(&["x", "y"], &["x^2 - y^3"]).unwrap()] {
            let ops = CyclicOps::new(&alg);
            let chains: Vec<_> = (0..8).map(|i| random_chain(&alg, i % 4, 2, 2, &mut rng)).collect();
            assert!(check_hkr(&ops, &chains).all_hold());
        }
        // with the literal sign B(x ⊗ y) no longer maps to d(x dy)
        let alg = PresentedAlgebra::polynomial_ring(&["x", "y"]);
        let lit = CyclicOps::with_signs(&alg, SignConvention::Literal);
        let x = el(&alg, &["x", "y"]);
        assert!(!check_hkr(&lit, &[x]).all_hold());
    }

    #[test]
    fn random_algebras_are_nonzero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let a = random_algebra(&mut rng);
            let ops = CyclicOps::new(&a);
            let chains: Vec<_> = (0..5).map(|n| random_chain(&a, n, 2, 2, &mut rng)).collect();
            assert!(check_identities(&ops, &chains).all_hold());
        }
    }

    #[test]
    fn hh_slices() {
        let line = PresentedAlgebra::polynomial_ring(&["x"]);
        assert_eq!(hh_graded_dims(&line, 0, 2).unwrap(), vec![1, 0, 0]);
        for d in 1..=5 {
            assert_eq!(hh_graded_dims(&line, d, 2).unwrap(), vec![1, 1, 0]);
        }
        let plane = PresentedAlgebra::polynomial_ring(&["x", "y"]);
        assert_eq!(hh_graded_dims(&plane, 2, 2).unwrap(), vec![3, 4, 1]);
        let point = PresentedAlgebra::polynomial_ring(&[]);
        assert_eq!(hh_graded_dims(&point, 0, 2).unwrap(), vec![1, 0, 0]);
        let gm = PresentedAlgebra::parse(&["t", "u"], &["t*u - 1"]).unwrap();
        assert_eq!(hh_graded_dims(&gm, 1, 1), Err(CyclicError::NotGraded));
    }

    #[test]
    fn periodification() {
        assert_eq!(periodify(&[1, 1, 0]), [1, 1]);
        assert_eq!(periodify(&[1, 0, 2, 3]), [3, 3]);
    }
}
