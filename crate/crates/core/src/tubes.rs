//! Tube algebras `T(R, J, α)` for `R = V[x_1..x_n]` and an ideal `J ∋ p`,
//! their presentations `S_m = R[y]/(g_j - p y_j)` over `K` and the tower of
//! levels `S_{m+1} → S_m`.
//!
//! Lifts are computed in `Q[x, P]` with the uniformizer as the formal last
//! variable `P`; over `K` the ideal `(x, p)` is the unit ideal and lifting
//! there would lose all integrality information.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::polyalg::{
    groebner_in, ideal_power_generators, AlgebraError, Budget, GroebnerBasis, GroebnerError, Monomial, MonomialOrder, PresentedAlgebra, SparsePoly,
};
use crate::scalars::{split_bigint, Scalar, Valuation};

#[derive(Debug, Clone, Error)]
pub enum TubeError {
    #[error("unsupported exponent {0}/{1}: need 0 <= i/m <= 1 in lowest terms")]
    Exponent(u32, u32),
    #[error("J must contain p")]
    MissingUniformizer,
    #[error("generator {0} of J has a coefficient outside V")]
    NotIntegral(usize),
    #[error("level {level} needs {count} generators, cap is {cap}")]
    TooManyGenerators { level: u32, count: usize, cap: usize },
    #[error("no integral lift of generator {generator} of level {level}")]
    Lift { level: u32, generator: usize },
    #[error("transition {0} -> {1} does not respect relations")]
    NotHomomorphism(u32, u32),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Rewrite `f ∈ V[x]` (rational coefficients) in `Q[x, P]`, moving the
/// `p`-part of every coefficient into a power of `P`.
pub fn to_formal(f: &SparsePoly, p: u64) -> Option<SparsePoly> {
    let n = f.nvars();
    let mut out = SparsePoly::zero(n + 1);
    for (m, c) in f.terms() {
        let q = c.to_rational();
        let (vn, un) = split_bigint(q.numer(), p);
        let (vd, ud) = split_bigint(q.denom(), p);
        let k = vn - vd;
        if k < 0 {
            return None;
        }
        let mut e = m.0.clone();
        e.push(k as u32);
        out.add_term(Monomial(e), &Scalar::Rational(BigRational::new(un, ud)));
    }
    Some(out)
}

/// Substitute `P = p` and drop the extra variable.
pub fn specialize(f: &SparsePoly, p: u64) -> SparsePoly {
    let n = f.nvars() - 1;
    let mut out = SparsePoly::zero(n);
    for (m, c) in f.terms() {
        let k = m.0[n];
        let pk = Scalar::Rational(BigRational::from_integer(BigInt::from(p).pow(k)));
        out.add_term(Monomial(m.0[..n].to_vec()), &c.mul(&pk));
    }
    out
}

fn p_integral(f: &SparsePoly, p: u64) -> bool {
    f.terms().all(|(_, c)| c.valuation(p) >= Valuation::Finite(0))
}

/// A generator `p^e · g` of a tube algebra with `g ∈ R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TubeGenerator {
    pub poly: SparsePoly,
    pub p_exponent: i64,
}

/// Algebra generators of `T(R, J, i/m)`: the variables of `R` and
/// `p^{-l} J^{⌈lm/i⌉}` for `1 ≤ l ≤ i`.
pub fn tube_generators(nvars: usize, jgens: &[SparsePoly], i: u32, m: u32) -> Result<Vec<TubeGenerator>, TubeError> {
    if m == 0 || i > m || i.gcd(&m) != 1 {
        return Err(TubeError::Exponent(i, m));
    }
    let mut out: Vec<TubeGenerator> = (0..nvars).map(|k| TubeGenerator { poly: SparsePoly::var(nvars, k), p_exponent: 0 }).collect();
    for l in 1..=i {
        let e = (l * m).div_ceil(i);
        for g in ideal_power_generators(jgens, e) {
            out.push(TubeGenerator { poly: g, p_exponent: -(l as i64) });
        }
    }
    Ok(out)
}

/// Options for building a [`TubeSystem`].
#[derive(Clone, Copy, Debug)]
pub struct TubeOptions {
    pub lift_order: MonomialOrder,
    pub budget: Budget,
    pub max_generators: usize,
}

impl Default for TubeOptions {
    fn default() -> Self {
        TubeOptions { lift_order: MonomialOrder::GrevLex, budget: Budget::default(), max_generators: 256 }
    }
}

/// One level `S_m = K[x, y_1..y_s] / (g_j - p y_j)`.
#[derive(Clone, Debug)]
pub struct TubeLevel {
    pub m: u32,
    /// Generators `g_j` of `J^m` in `Q[x, P]`.
    pub formal_gens: Vec<SparsePoly>,
    pub algebra: PresentedAlgebra,
}

impl TubeLevel {
    pub fn ngens(&self) -> usize {
        self.formal_gens.len()
    }

    /// The element of `K[x]` represented by `f ∈ S_m`, via `y_j = g_j / p`.
    pub fn realize(&self, f: &SparsePoly, p: u64) -> SparsePoly {
        let n = self.algebra.nvars() - self.ngens();
        let inv_p = Scalar::Rational(BigRational::new(BigInt::from(1), BigInt::from(p)));
        let mut images: Vec<SparsePoly> = (0..n).map(|k| SparsePoly::var(n, k)).collect();
        images.extend(self.formal_gens.iter().map(|g| specialize(g, p).scale(&inv_p)));
        f.substitute(&images, n)
    }
}

/// `S_{m+1} → S_m`: images of the variables of `S_{m+1}` in `S_m`.
#[derive(Clone, Debug)]
pub struct TubeTransition {
    pub from: u32,
    pub to: u32,
    pub images: Vec<SparsePoly>,
}

/// The tower `S_1 ← S_2 ← ... ← S_{m_max}`.
#[derive(Clone, Debug)]
pub struct TubeSystem {
    pub p: u64,
    pub vars: Vec<String>,
    pub formal_j: Vec<SparsePoly>,
    pub levels: Vec<TubeLevel>,
    pub transitions: Vec<TubeTransition>,
    pub options: TubeOptions,
}

fn formal_j(jgens: &[SparsePoly], p: u64) -> Result<Vec<SparsePoly>, TubeError> {
    let fj = jgens.iter().enumerate().map(|(k, g)| to_formal(g, p).ok_or(TubeError::NotIntegral(k))).collect::<Result<Vec<_>, _>>()?;
    let n = jgens.first().map_or(0, |g| g.nvars());
    let pvar = Monomial::var(n + 1, n);
    // some generator must be a unit multiple of p
    if !fj.iter().any(|g| g.len() == 1 && g.terms().next().is_some_and(|(m, _)| *m == pvar)) {
        return Err(TubeError::MissingUniformizer);
    }
    Ok(fj)
}

impl TubeSystem {
    /// `jgens` are elements of `V[x]` with rational coefficients; one of
    /// them must be `p` times a unit.
    pub fn new(p: u64, vars: Vec<String>, jgens: &[SparsePoly], m_max: u32, options: TubeOptions) -> Result<TubeSystem, TubeError> {
        let formal = formal_j(jgens, p)?;
        let mut sys = TubeSystem { p, vars, formal_j: formal, levels: Vec::new(), transitions: Vec::new(), options };
        for m in 1..=m_max {
            let level = sys.level_presentation(m)?;
            sys.levels.push(level);
        }
        for m in 1..m_max {
            let t = sys.transition(m + 1)?;
            sys.transitions.push(t);
        }
        Ok(sys)
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn level(&self, m: u32) -> &TubeLevel {
        &self.levels[m as usize - 1]
    }

    /// Presentation of level `m`, with one `y` per generator of `J^m`.
    pub fn level_presentation(&self, m: u32) -> Result<TubeLevel, TubeError> {
        let n = self.nvars();
        let gens = ideal_power_generators(&self.formal_j, m);
        if gens.len() > self.options.max_generators {
            return Err(TubeError::TooManyGenerators { level: m, count: gens.len(), cap: self.options.max_generators });
        }
        let s = gens.len();
        let mut names = self.vars.clone();
        names.extend((1..=s).map(|j| format!("y{m}_{j}")));
        let p = Scalar::from_i64(self.p as i64);
        let rels: Vec<SparsePoly> = gens
            .iter()
            .enumerate()
            .map(|(j, g)| specialize(g, self.p).extend_vars(n + s).sub(&SparsePoly::var(n + s, n + j).scale(&p)))
            .collect();
        let algebra = PresentedAlgebra::with_order(names, rels, None, self.options.lift_order, self.options.budget)?;
        Ok(TubeLevel { m, formal_gens: gens, algebra })
    }

    fn level_basis(&self, gens: &[SparsePoly]) -> Result<GroebnerBasis, TubeError> {
        Ok(groebner_in(self.nvars() + 1, gens, self.options.lift_order, self.options.budget)?)
    }

    /// Transition `S_{from} → S_{from-1}` from integral lifts
    /// `g^{(m+1)}_j = Σ c_{jk} g^{(m)}_k`.
    fn transition(&self, from: u32) -> Result<TubeTransition, TubeError> {
        let t = TubeTransition { from, to: from - 1, images: self.direct_transition(from, from - 1)? };
        let (src, tgt) = (self.level(from), self.level(from - 1));
        let nt = tgt.algebra.nvars();
        for r in &src.algebra.relations {
            if !tgt.algebra.normal_form(&r.substitute(&t.images, nt)).is_zero() {
                return Err(TubeError::NotHomomorphism(from, from - 1));
            }
        }
        Ok(t)
    }

    /// Composite of transitions from level `from` down to level `to`.
    pub fn composite(&self, from: u32, to: u32) -> Vec<SparsePoly> {
        let nsrc = self.level(from).algebra.nvars();
        let mut images: Vec<SparsePoly> = (0..nsrc).map(|k| SparsePoly::var(nsrc, k)).collect();
        for lvl in (to..from).rev() {
            let t = &self.transitions[lvl as usize - 1];
            let nt = self.level(lvl).algebra.nvars();
            images = images.iter().map(|f| f.substitute(&t.images, nt)).collect();
        }
        images
    }

    /// Transition `from → to` computed by a single lift, not by composition.
    pub fn direct_transition(&self, from: u32, to: u32) -> Result<Vec<SparsePoly>, TubeError> {
        let (src, tgt) = (self.level(from), self.level(to));
        let n = self.nvars();
        let nt = tgt.algebra.nvars();
        let gb = self.level_basis(&tgt.formal_gens)?;
        let mut images: Vec<SparsePoly> = (0..n).map(|k| SparsePoly::var(nt, k)).collect();
        for (j, g) in src.formal_gens.iter().enumerate() {
            let cof = gb.lift(g).filter(|c| c.iter().all(|c| p_integral(c, self.p))).ok_or(TubeError::Lift { level: from, generator: j })?;
            let mut img = SparsePoly::zero(nt);
            for (k, c) in cof.iter().enumerate() {
                img = img.add(&specialize(c, self.p).extend_vars(nt).mul(&SparsePoly::var(nt, n + k)));
            }
            images.push(img);
        }
        Ok(images)
    }

    /// Composite and direct transitions agree modulo the relations of the target.
    pub fn check_compatibility(&self, from: u32, to: u32) -> Result<bool, TubeError> {
        let comp = self.composite(from, to);
        let direct = self.direct_transition(from, to)?;
        let tgt = &self.level(to).algebra;
        Ok(comp.iter().zip(&direct).all(|(a, b)| tgt.normal_form(&a.sub(b)).is_zero()))
    }

    /// Every transition is the inclusion of subalgebras of `K[x]`.
    pub fn check_realization(&self) -> bool {
        self.transitions.iter().all(|t| {
            let (src, tgt) = (self.level(t.from), self.level(t.to));
            let ns = src.algebra.nvars();
            (0..ns).all(|k| tgt.realize(&t.images[k], self.p) == src.realize(&SparsePoly::var(ns, k), self.p))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InclusionEntry {
    /// Number of `J`-factors of the tested generators.
    pub factors: u32,
    pub generators: usize,
    pub members: usize,
}

/// Two-sided comparison of `T(R, J, 1/m)` and `T(R, J^m, 1)` up to degree `D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TubeIdentityReport {
    pub m: u32,
    pub degree_cap: u32,
    /// Generators `p^{-⌊n/m⌋} J^n` tested against the algebra generated by `p^{-1} J^m`.
    pub forward: Vec<InclusionEntry>,
    /// Generators `p^{-k} (J^m)^k` tested against `Σ_n p^{-⌊n/m⌋} J^n`.
    pub backward: Vec<InclusionEntry>,
    pub holds: bool,
}

/// Check `T(R, J, 1/m) = T(R, J^m, 1)` on generators with at most `D` factors of `J`.
///
/// `p^{-q} h` lies in the algebra generated by `R` and `p^{-1} J^m` when
/// `h ∈ (J^m)^q` with integral cofactors; this is decided by lifting in `Q[x, P]`.
pub fn tube_identity_check(p: u64, jgens: &[SparsePoly], m: u32, degree_cap: u32, options: TubeOptions) -> Result<TubeIdentityReport, TubeError> {
    if m == 0 {
        return Err(TubeError::Exponent(1, 0));
    }
    let formal = formal_j(jgens, p)?;
    let nf = formal[0].nvars();
    let jm = ideal_power_generators(&formal, m);
    let member = |h: &SparsePoly, gb: &Option<GroebnerBasis>| -> bool {
        match gb {
            None => true,
            Some(gb) => gb.lift(h).is_some_and(|c| c.iter().all(|c| p_integral(c, p))),
        }
    };
    let basis_for = |gens: Vec<SparsePoly>| -> Result<Option<GroebnerBasis>, TubeError> { Ok(Some(groebner_in(nf, &gens, options.lift_order, options.budget)?)) };
    let mut forward = Vec::new();
    let mut backward = Vec::new();
    for n in 1..=degree_cap {
        let q = n / m;
        let gb = if q == 0 { None } else { basis_for(ideal_power_generators(&jm, q))? };
        let hs = ideal_power_generators(&formal, n);
        let members = hs.iter().filter(|h| member(h, &gb)).count();
        forward.push(InclusionEntry { factors: n, generators: hs.len(), members });
        if n % m == 0 {
            // p^{-k}(J^m)^k inside p^{-⌊mk/m⌋} J^{mk}
            let gb = basis_for(hs)?;
            let gs = ideal_power_generators(&jm, n / m);
            let members = gs.iter().filter(|g| member(g, &gb)).count();
            backward.push(InclusionEntry { factors: n, generators: gs.len(), members });
        }
    }
    let holds = forward.iter().chain(&backward).all(|e| e.generators == e.members);
    Ok(TubeIdentityReport { m, degree_cap, forward, backward, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_poly;

    fn vars(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn polys(v: &[String], s: &[&str]) -> Vec<SparsePoly> {
        s.iter().map(|t| parse_poly(t, v).unwrap()).collect()
    }

    #[test]
    fn generators_for_small_exponents() {
        let v = vars(&["x"]);
        let j = polys(&v, &["x", "5"]);
        assert_eq!(tube_generators(1, &j, 0, 1).unwrap().len(), 1);
        let g = tube_generators(1, &j, 1, 1).unwrap();
        assert_eq!(g.len(), 3);
        assert!(g[1..].iter().all(|t| t.p_exponent == -1));
        let g = tube_generators(1, &j, 1, 2).unwrap();
        assert_eq!(g.len(), 1 + 3);
        assert!(tube_generators(1, &j, 2, 4).is_err());
        assert!(tube_generators(1, &j, 3, 2).is_err());
    }

    #[test]
    fn level_one_presentation() {
        let v = vars(&["x"]);
        let sys = TubeSystem::new(5, v.clone(), &polys(&v, &["x", "5"]), 1, TubeOptions::default()).unwrap();
        let a = &sys.level(1).algebra;
        assert_eq!(a.vars, vars(&["x", "y1_1", "y1_2"]));
        let rels: Vec<String> = a.relations.iter().map(|r| r.to_text(&a.vars)).collect();
        assert_eq!(rels, vec!["x - 5*y1_1", "-5*y1_2 + 5"]);
        let y2 = a.parse_element("y1_2").unwrap();
        assert_eq!(a.normal_form(&y2).to_text(&a.vars), "1");
    }

    #[test]
    fn transition_of_square() {
        let v = vars(&["x"]);
        let sys = TubeSystem::new(5, v.clone(), &polys(&v, &["x", "5"]), 2, TubeOptions::default()).unwrap();
        let s2 = &sys.level(2);
        let t = &sys.transitions[0];
        let tv = &sys.level(1).algebra.vars;
        let jx2 = s2.formal_gens.iter().position(|g| specialize(g, 5) == parse_poly("x^2", &v).unwrap()).unwrap();
        assert_eq!(t.images[1 + jx2].to_text(tv), "x*y1_1");
        assert!(sys.check_realization());
    }

    #[test]
    fn uniformizer_only() {
        let v = vars(&["x"]);
        let sys = TubeSystem::new(5, v.clone(), &polys(&v, &["5"]), 3, TubeOptions::default()).unwrap();
        let a = &sys.level(3).algebra;
        let y = a.parse_element("y3_1").unwrap();
        assert_eq!(a.normal_form(&y).to_text(&a.vars), "25");
        assert_eq!(sys.transitions[1].images[1].to_text(&sys.level(2).algebra.vars), "5*y2_1");
        assert!(sys.check_compatibility(3, 1).unwrap());
    }

    #[test]
    fn identity_for_line() {
        let v = vars(&["x"]);
        for m in [1, 2, 3] {
            let r = tube_identity_check(5, &polys(&v, &["x", "5"]), m, 10, TubeOptions::default()).unwrap();
            assert!(r.holds, "m = {m}");
        }
    }
}
