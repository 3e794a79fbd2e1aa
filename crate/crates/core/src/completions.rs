//! Truncated models of `p`-adic and dagger completions of polynomial algebras.
//!
//! Norms are reported as exponents of a fixed `ε < 1`: `‖f‖ = ε^ν(f)`.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::polyalg::{Monomial, PresentedAlgebra, SparsePoly};
use crate::scalars::{is_prime, Scalar, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompletionError {
    #[error("invalid truncation parameters: {0}")]
    Params(String),
    #[error("span generator {0} is not a single term")]
    NotMonomial(usize),
    #[error("zero generator in span")]
    ZeroGenerator,
    #[error("coefficient of {0} is not integral")]
    NotIntegral(String),
    #[error("estimate fails for growth parameter {0}")]
    Growth(String),
}

/// Caps shared by all truncated computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TruncationParams {
    pub p: u64,
    pub precision: u32,
    pub degree_cap: u32,
    pub depth: u32,
    pub level_cap: u32,
    pub window: u32,
}

impl Default for TruncationParams {
    fn default() -> Self {
        TruncationParams { p: 5, precision: 12, degree_cap: 16, depth: 24, level_cap: 3, window: 3 }
    }
}

impl TruncationParams {
    pub fn validate(&self) -> Result<(), CompletionError> {
        if !is_prime(self.p) {
            return Err(CompletionError::Params(format!("{} is not prime", self.p)));
        }
        if self.precision == 0 || self.degree_cap == 0 || self.depth == 0 || self.level_cap == 0 {
            return Err(CompletionError::Params("caps must be positive".into()));
        }
        if self.window < 2 {
            return Err(CompletionError::Params("stabilization window must be at least 2".into()));
        }
        Ok(())
    }
}

/// Exponent of the canonical norm: the minimal coefficient valuation
/// (`Valuation::Infinite` for the zero polynomial).
pub fn canonical_norm(f: &SparsePoly, p: u64) -> Valuation {
    f.min_valuation(p)
}

/// A polynomial truncated to degree `D` that lies in
/// `P_c = { Σ b_α x^α : ν(b_α) + 1 ≥ |α| / c }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DaggerModelElement {
    pub poly: SparsePoly,
    pub growth: BigRational,
    pub degree_cap: u32,
    pub p: u64,
}

/// `ν(b) + 1 ≥ |α| / c` for every term.
pub fn satisfies_growth(f: &SparsePoly, c: &BigRational, p: u64) -> bool {
    f.terms().all(|(m, b)| match b.valuation(p) {
        Valuation::Infinite => true,
        Valuation::Finite(v) => {
            v >= 0 && BigRational::from_integer(BigInt::from(v + 1)) * c >= BigRational::from_integer(BigInt::from(m.degree()))
        }
    })
}

impl DaggerModelElement {
    pub fn new(poly: SparsePoly, growth: BigRational, degree_cap: u32, p: u64) -> Result<Self, CompletionError> {
        if growth <= BigRational::zero() {
            return Err(CompletionError::Params("growth parameter must be positive".into()));
        }
        let poly = poly.truncate(degree_cap);
        if let Some((m, _)) = poly.terms().find(|(_, b)| !b.is_integral(p)) {
            return Err(CompletionError::NotIntegral(format!("{:?}", m.0)));
        }
        if !satisfies_growth(&poly, &growth, p) {
            return Err(CompletionError::Growth(growth.to_string()));
        }
        Ok(DaggerModelElement { poly, growth, degree_cap, p })
    }

    /// Truncated product. `P_c` is not closed under multiplication
    /// (`x ∈ P_1` but `x² ∉ P_1`); the product of elements of `P_a` and
    /// `P_b` lies in `P_{2 max(a,b)}`, which is the parameter recorded here.
    pub fn mul(&self, o: &DaggerModelElement) -> DaggerModelElement {
        let c = if self.growth >= o.growth { self.growth.clone() } else { o.growth.clone() };
        let growth = c * BigRational::from_integer(BigInt::from(2));
        let degree_cap = self.degree_cap.min(o.degree_cap);
        let poly = self.poly.mul(&o.poly).truncate(degree_cap);
        debug_assert!(satisfies_growth(&poly, &growth, self.p));
        DaggerModelElement { poly, growth, degree_cap, p: self.p }
    }
}

/// A finitely generated `V`-submodule given by generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmoduleSpan {
    pub gens: Vec<SparsePoly>,
    pub monomial: bool,
}

impl SubmoduleSpan {
    pub fn new(gens: Vec<SparsePoly>) -> Result<Self, CompletionError> {
        if gens.iter().any(|g| g.is_zero()) {
            return Err(CompletionError::ZeroGenerator);
        }
        let monomial = gens.iter().all(|g| g.len() == 1);
        Ok(SubmoduleSpan { gens, monomial })
    }

    /// Span of monomials `x^α` with unit coefficient.
    pub fn monomials(exps: &[&[u32]]) -> SubmoduleSpan {
        SubmoduleSpan::new(exps.iter().map(|e| SparsePoly::monomial(Monomial(e.to_vec()))).collect()).unwrap()
    }

    /// Generators of `M^c`: all products of `c` generators.
    pub fn power(&self, c: u32) -> SubmoduleSpan {
        let nvars = self.gens.first().map_or(0, |g| g.nvars());
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for idx in crate::polyalg::multisets(self.gens.len(), c) {
            let mut g = SparsePoly::one(nvars);
            for i in idx {
                g = g.mul(&self.gens[i]);
            }
            if !g.is_zero() && seen.insert(g.clone()) {
                out.push(g);
            }
        }
        SubmoduleSpan::new(out).unwrap()
    }

    /// `p^j M`.
    pub fn scaled(&self, p: u64, j: u32) -> SubmoduleSpan {
        let s = Scalar::Rational(BigRational::from_integer(BigInt::from(p).pow(j)));
        SubmoduleSpan::new(self.gens.iter().map(|g| g.scale(&s)).collect()).unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    Member,
    NotMember,
    Inconclusive,
}

/// Decide `f ∈ Σ_i p^i S^(i+1)` for a monomial span `S`, trying `i ≤ depth`.
pub fn linear_growth_membership(f: &SparsePoly, s: &SubmoduleSpan, params: &TruncationParams) -> Result<Membership, CompletionError> {
    let p = params.p;
    let mut gens: Vec<(Monomial, i64)> = Vec::new();
    for (k, g) in s.gens.iter().enumerate() {
        let (m, c) = match g.terms().next() {
            Some(t) if g.len() == 1 => t,
            _ => return Err(CompletionError::NotMonomial(k)),
        };
        gens.push((m.clone(), c.valuation(p).finite().expect("nonzero generator")));
    }
    let integral = gens.iter().all(|g| g.1 >= 0);
    let targets: Vec<(&Monomial, i64)> = f.terms().map(|(m, c)| (m, c.valuation(p).finite().unwrap())).collect();
    let useful = |m: &Monomial| targets.iter().any(|(t, _)| m.divides(t));
    // reach[i]: monomial -> least valuation of a product of i+1 generators
    let mut reach: BTreeMap<Monomial, i64> = BTreeMap::new();
    for (m, v) in &gens {
        if useful(m) {
            let e = reach.entry(m.clone()).or_insert(*v);
            *e = (*e).min(*v);
        }
    }
    let mut found = vec![false; targets.len()];
    for i in 0..=params.depth as i64 {
        for (k, (t, v)) in targets.iter().enumerate() {
            if !found[k] && reach.get(*t).is_some_and(|w| w + i <= *v) {
                found[k] = true;
            }
        }
        if found.iter().all(|&b| b) || i == params.depth as i64 {
            break;
        }
        let mut next: BTreeMap<Monomial, i64> = BTreeMap::new();
        for (a, va) in &reach {
            for (b, vb) in &gens {
                let m = a.mul(b);
                if useful(&m) {
                    let e = next.entry(m).or_insert(va + vb);
                    *e = (*e).min(va + vb);
                }
            }
        }
        reach = next;
    }
    if found.iter().all(|&b| b) {
        return Ok(Membership::Member);
    }
    // with integral generators p^i S^(i+1) has valuation ≥ i, so i ≤ v suffices
    let settled = integral && targets.iter().zip(&found).all(|((_, v), &ok)| ok || *v <= params.depth as i64);
    Ok(if settled { Membership::NotMember } else { Membership::Inconclusive })
}

/// Estimate of the spectral radius, as an exponent of `ε`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralEstimate {
    /// `None` when every product reduces to zero (radius 0, exponent +∞).
    #[serde(serialize_with = "ser_opt_rational")]
    pub exponent: Option<BigRational>,
    pub depth: u32,
    /// Minimal valuation of products of length `n`, for `n = 1..=depth`.
    pub profile: Vec<Valuation>,
}

fn ser_opt_rational<S: serde::Serializer>(q: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&q.to_string()),
        None => s.serialize_str("+inf"),
    }
}

/// `max_{n ≤ depth} e_n / n`, where `e_n` is the least canonical-norm
/// exponent over normal forms of products of `n` generators. `e_n` is
/// superadditive, so `e_n / n` converges to its supremum and the estimate
/// approaches the true exponent from below.
pub fn spectral_radius_estimate(m: &SubmoduleSpan, ambient: &PresentedAlgebra, params: &TruncationParams) -> SpectralEstimate {
    let p = params.p;
    let gens: Vec<SparsePoly> = m.gens.iter().map(|g| ambient.normal_form(g)).filter(|g| !g.is_zero()).collect();
    let mut profile = Vec::new();
    let mut level: Vec<SparsePoly> = dedup(gens.clone());
    let mut best: Option<BigRational> = None;
    for n in 1..=params.depth {
        if n > 1 {
            let mut next = Vec::new();
            for a in &level {
                for g in &gens {
                    next.push(ambient.mul(a, g));
                }
            }
            level = dedup(next.into_iter().filter(|f| !f.is_zero()).collect());
        }
        let e = level.iter().map(|f| canonical_norm(f, p)).min().unwrap_or(Valuation::Infinite);
        profile.push(e);
        match e {
            Valuation::Infinite => {
                best = None;
                // all longer products vanish too
                break;
            }
            Valuation::Finite(v) => {
                let r = BigRational::new(BigInt::from(v), BigInt::from(n));
                if best.as_ref().map_or(true, |b| r > *b) {
                    best = Some(r);
                }
            }
        }
    }
    SpectralEstimate { exponent: best, depth: params.depth, profile }
}

/// One row of the scaling law `exp ρ̂(p^j M^c) = j + c · exp ρ̂(M)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralLawEntry {
    pub j: u32,
    pub c: u32,
    #[serde(serialize_with = "ser_opt_rational")]
    pub lhs: Option<BigRational>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub rhs: Option<BigRational>,
    pub holds: bool,
}

/// Evaluate the scaling law for every pair `(j, c)`.
pub fn spectral_law(m: &SubmoduleSpan, ambient: &PresentedAlgebra, params: &TruncationParams, js: &[u32], cs: &[u32]) -> Vec<SpectralLawEntry> {
    let base = spectral_radius_estimate(m, ambient, params).exponent;
    let mut out = Vec::new();
    for &j in js {
        for &c in cs {
            let lhs = spectral_radius_estimate(&m.power(c).scaled(params.p, j), ambient, params).exponent;
            let rhs = base.as_ref().map(|e| BigRational::from_integer(j.into()) + e * BigRational::from_integer(c.into()));
            out.push(SpectralLawEntry { j, c, holds: lhs == rhs, lhs, rhs });
        }
    }
    out
}

fn dedup(v: Vec<SparsePoly>) -> Vec<SparsePoly> {
    let mut seen = HashSet::new();
    v.into_iter().filter(|f| seen.insert(f.clone())).collect()
}

/// One verified identity `Σ_{i≤n} (pt)^i = p^m f_m + Σ_{i=m}^{n} (pt)^i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessEntry {
    pub m: u32,
    pub n: u32,
    pub identity_holds: bool,
    /// The remainder `Σ_{i=m}^{n} (pt)^i` has coefficients in `p^m V`.
    pub remainder_in_pm_x0: bool,
}

/// Record for the completion `X_0 = V[t] ⊂ X_1 = X_0 + Σ_m V f_m` with
/// `f_m = p^{-m} Σ_{i<m} (pt)^i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NoninjectivityWitness {
    pub p: u64,
    pub m_max: u32,
    pub n_max: u32,
    /// `f_m ∉ X_0` for `1 ≤ m ≤ m_max`.
    pub new_generators_outside_x0: bool,
    pub entries: Vec<WitnessEntry>,
}

impl NoninjectivityWitness {
    pub fn verified(&self) -> bool {
        self.new_generators_outside_x0 && self.entries.iter().all(|e| e.identity_holds && e.remainder_in_pm_x0)
    }
}

fn pt_power_sum(p: u64, lo: u32, hi: u32) -> SparsePoly {
    let mut f = SparsePoly::zero(1);
    for i in lo..=hi {
        let c = BigRational::from_integer(BigInt::from(p).pow(i));
        f.add_term(Monomial(vec![i]), &Scalar::Rational(c));
    }
    f
}

/// `f_m = p^{-m}(1 + pt + ... + (pt)^{m-1})` in `Q[t]`.
pub fn witness_generator(p: u64, m: u32) -> SparsePoly {
    if m == 0 {
        return SparsePoly::zero(1);
    }
    let s = Scalar::Rational(BigRational::new(BigInt::one(), BigInt::from(p).pow(m)));
    pt_power_sum(p, 0, m - 1).scale(&s)
}

/// Check the decomposition for all `m ≤ m_max` and `m ≤ n ≤ n_max`, exactly.
pub fn completion_noninjectivity_witness(p: u64, m_max: u32, n_max: u32) -> NoninjectivityWitness {
    let mut entries = Vec::new();
    let mut outside = true;
    for m in 0..=m_max {
        let fm = witness_generator(p, m);
        let pm = Scalar::Rational(BigRational::from_integer(BigInt::from(p).pow(m)));
        if m >= 1 && fm.terms().all(|(_, c)| c.is_integral(p)) {
            outside = false;
        }
        for n in m..=n_max {
            let lhs = pt_power_sum(p, 0, n);
            let rem = if n >= m { pt_power_sum(p, m, n) } else { SparsePoly::zero(1) };
            let rhs = fm.scale(&pm).add(&rem);
            let in_pm = rem.terms().all(|(_, c)| c.valuation(p) >= Valuation::Finite(m as i64));
            entries.push(WitnessEntry { m, n, identity_holds: lhs == rhs, remainder_in_pm_x0: in_pm });
        }
    }
    NoninjectivityWitness { p, m_max, n_max, new_generators_outside_x0: outside, entries }
}
