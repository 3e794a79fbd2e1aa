use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::{Monomial, MonomialOrder};
use crate::scalars::{Scalar, Valuation};

/// A multivariate polynomial with [`Scalar`] coefficients.
///
/// Terms are kept in a map keyed by exponent vector; zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> SparsePoly {
        SparsePoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Scalar) -> SparsePoly {
        SparsePoly::term(Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> SparsePoly {
        SparsePoly::constant(nvars, Scalar::one())
    }

    pub fn from_i64(nvars: usize, c: i64) -> SparsePoly {
        SparsePoly::constant(nvars, Scalar::from_i64(c))
    }

    pub fn var(nvars: usize, i: usize) -> SparsePoly {
        SparsePoly::term(Monomial::var(nvars, i), Scalar::one())
    }

    pub fn term(m: Monomial, c: Scalar) -> SparsePoly {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        SparsePoly { nvars, terms }
    }

    pub fn monomial(m: Monomial) -> SparsePoly {
        SparsePoly::term(m, Scalar::one())
    }

    pub fn from_terms(nvars: usize, it: impl IntoIterator<Item = (Monomial, Scalar)>) -> SparsePoly {
        let mut p = SparsePoly::zero(nvars);
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Scalar> {
        self.terms
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn weighted_degrees(&self, w: &[i64]) -> Vec<i64> {
        let mut v: Vec<i64> = self.terms.keys().map(|m| m.weighted_degree(w)).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn is_homogeneous(&self, w: &[i64]) -> bool {
        self.weighted_degrees(w).len() <= 1
    }

    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.nvars(), self.nvars);
        match self.terms.get_mut(&m) {
            Some(x) => {
                let s = x.add(c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add(&self, o: &SparsePoly) -> SparsePoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c);
        }
        r
    }

    pub fn sub(&self, o: &SparsePoly) -> SparsePoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), &c.neg());
        }
        r
    }

    pub fn neg(&self) -> SparsePoly {
        self.scale(&Scalar::from_i64(-1))
    }

    pub fn scale(&self, c: &Scalar) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero(self.nvars);
        }
        SparsePoly::from_terms(self.nvars, self.terms.iter().map(|(m, x)| (m.clone(), x.mul(c))))
    }

    pub fn mul_term(&self, m: &Monomial, c: &Scalar) -> SparsePoly {
        SparsePoly::from_terms(self.nvars, self.terms.iter().map(|(a, x)| (a.mul(m), x.mul(c))))
    }

    pub fn mul(&self, o: &SparsePoly) -> SparsePoly {
        let mut r = SparsePoly::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                r.add_term(a.mul(b), &x.mul(y));
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> SparsePoly {
        let mut r = SparsePoly::one(self.nvars);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn derivative(&self, i: usize) -> SparsePoly {
        let mut r = SparsePoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e > 0 {
                let mut m2 = m.clone();
                m2.0[i] -= 1;
                r.add_term(m2, &c.mul(&Scalar::from_i64(e as i64)));
            }
        }
        r
    }

    /// Drop all terms of total degree above `d`.
    pub fn truncate(&self, d: u32) -> SparsePoly {
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(m, _)| m.degree() <= d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Substitute `images[i]` for variable `i`; images live in `target_nvars` variables.
    pub fn substitute(&self, images: &[SparsePoly], target_nvars: usize) -> SparsePoly {
        assert_eq!(images.len(), self.nvars);
        let mut r = SparsePoly::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut t = SparsePoly::constant(target_nvars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&images[i]);
                }
            }
            r = r.add(&t);
        }
        r
    }

    /// Re-embed into a ring with more variables (new ones appended).
    pub fn extend_vars(&self, nvars: usize) -> SparsePoly {
        assert!(nvars >= self.nvars);
        SparsePoly::from_terms(
            nvars,
            self.terms.iter().map(|(m, c)| {
                let mut e = m.0.clone();
                e.resize(nvars, 0);
                (Monomial(e), c.clone())
            }),
        )
    }

    /// Minimum coefficient valuation.
    pub fn min_valuation(&self, p: u64) -> Valuation {
        self.terms.values().map(|c| c.valuation(p)).min().unwrap_or(Valuation::Infinite)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> SparsePoly {
        SparsePoly::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// All coefficients rational.
    pub fn rational_terms(&self) -> Option<Vec<(Monomial, BigRational)>> {
        self.terms.iter().map(|(m, c)| c.as_rational().map(|q| (m.clone(), q.clone()))).collect()
    }

    pub fn from_rational_terms(nvars: usize, it: impl IntoIterator<Item = (Monomial, BigRational)>) -> SparsePoly {
        SparsePoly::from_terms(nvars, it.into_iter().map(|(m, q)| (m, Scalar::Rational(q))))
    }

    /// Render with the given variable names, highest terms first in `order`.
    pub fn to_text(&self, vars: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut ts: Vec<(&Monomial, &Scalar)> = self.terms.iter().collect();
        ts.sort_by(|a, b| MonomialOrder::GrevLex.cmp(b.0, a.0));
        let mut out = String::new();
        for (k, (m, c)) in ts.into_iter().enumerate() {
            let q = c.to_rational();
            let neg = q.is_negative();
            let a = q.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { vars[i].clone() } else { format!("{}^{}", vars[i], e) })
                .collect();
            if mono.is_empty() {
                let _ = write!(out, "{a}");
            } else {
                if !a.is_one() {
                    let _ = write!(out, "{a}*");
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

pub fn integer(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Clear denominators: the polynomial scaled to have integer coefficients.
pub fn primitive_integer_multiple(f: &SparsePoly) -> SparsePoly {
    let mut l = BigInt::one();
    for (_, c) in f.terms() {
        let d = c.to_rational().denom().clone();
        l = num_integer::Integer::lcm(&l, &d);
    }
    if l.is_zero() {
        return f.clone();
    }
    f.scale(&Scalar::Rational(BigRational::from_integer(l)))
}
