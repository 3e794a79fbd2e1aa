//! Buchberger's algorithm over exact rationals, tracking for every basis
//! element its expression in the input generators.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::monomial::{Monomial, MonomialOrder};
use super::poly::SparsePoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_degree: u32,
    pub max_pairs: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_degree: 24, max_pairs: 10_000 }
    }
}

#[derive(Debug, Clone, Error)]
pub enum GroebnerError {
    #[error("budget exceeded in {stage}: {detail} (partial basis of {partial} elements)")]
    Budget { stage: &'static str, detail: String, partial: usize },
    #[error("Groebner bases need exact rational coefficients")]
    NotRational,
}

/// Polynomial as terms sorted by decreasing monomial in a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct OPoly(pub Vec<(Monomial, BigRational)>);

impl OPoly {
    pub fn from_sparse(f: &SparsePoly, order: MonomialOrder) -> Result<OPoly, GroebnerError> {
        let mut t = f.rational_terms().ok_or(GroebnerError::NotRational)?;
        t.sort_by(|a, b| order.cmp(&b.0, &a.0));
        Ok(OPoly(t))
    }

    pub fn to_sparse(&self, nvars: usize) -> SparsePoly {
        SparsePoly::from_rational_terms(nvars, self.0.iter().cloned())
    }

    pub fn lm(&self) -> &Monomial {
        &self.0[0].0
    }

    pub fn lc(&self) -> &BigRational {
        &self.0[0].1
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `self - c * m * g`.
    pub fn sub_scaled(&self, c: &BigRational, m: &Monomial, g: &OPoly, order: MonomialOrder) -> OPoly {
        let mut out = Vec::with_capacity(self.0.len() + g.0.len());
        let mut i = 0;
        let mut gi = g.0.iter().map(|(gm, gc)| (gm.mul(m), gc * c)).peekable();
        while i < self.0.len() || gi.peek().is_some() {
            let ord = match (self.0.get(i), gi.peek()) {
                (Some(a), Some(b)) => order.cmp(&a.0, &b.0),
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (None, None) => unreachable!(),
            };
            match ord {
                Ordering::Greater => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let (bm, bc) = gi.next().unwrap();
                    out.push((bm, -bc));
                }
                Ordering::Equal => {
                    let (bm, bc) = gi.next().unwrap();
                    let s = &self.0[i].1 - bc;
                    if !s.is_zero() {
                        out.push((bm, s));
                    }
                    i += 1;
                }
            }
        }
        OPoly(out)
    }

    pub fn scale(&self, c: &BigRational) -> OPoly {
        OPoly(self.0.iter().map(|(m, x)| (m.clone(), x * c)).collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }
}

/// A reduced Gröbner basis together with cofactors: `basis[k] = sum_i cofactors[k][i] * gens[i]`.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub nvars: usize,
    pub order: MonomialOrder,
    pub gens: Vec<SparsePoly>,
    pub basis: Vec<SparsePoly>,
    pub cofactors: Vec<Vec<SparsePoly>>,
    pub(crate) obasis: Vec<OPoly>,
}

struct Elem {
    f: OPoly,
    cof: Vec<SparsePoly>,
}

/// Quotients `q_k` and remainder `r` with `f = sum q_k * basis[k] + r`.
pub(crate) fn divide(f: &OPoly, basis: &[OPoly], order: MonomialOrder, nvars: usize) -> (Vec<SparsePoly>, OPoly) {
    let mut q = vec![SparsePoly::zero(nvars); basis.len()];
    let mut rem = Vec::new();
    let mut cur = f.clone();
    while !cur.is_zero() {
        let (lm, lc) = (cur.lm().clone(), cur.lc().clone());
        let hit = basis.iter().enumerate().find_map(|(k, g)| g.lm().quotient_of(&lm).map(|m| (k, m)));
        match hit {
            Some((k, m)) => {
                let c = &lc / basis[k].lc();
                q[k].add_term(m.clone(), &crate::scalars::Scalar::Rational(c.clone()));
                cur = cur.sub_scaled(&c, &m, &basis[k], order);
            }
            None => {
                rem.push((lm, lc));
                cur.0.remove(0);
            }
        }
    }
    (q, OPoly(rem))
}

fn combine_cofactors(base: &[SparsePoly], q: &[SparsePoly], cofs: &[&[SparsePoly]]) -> Vec<SparsePoly> {
    let mut out = base.to_vec();
    for (k, qk) in q.iter().enumerate() {
        if qk.is_zero() {
            continue;
        }
        for (i, c) in cofs[k].iter().enumerate() {
            if !c.is_zero() {
                out[i] = out[i].sub(&qk.mul(c));
            }
        }
    }
    out
}

fn make_monic(e: Elem) -> Elem {
    let inv = e.f.lc().recip();
    let s = crate::scalars::Scalar::Rational(inv.clone());
    Elem { f: e.f.scale(&inv), cof: e.cof.iter().map(|c| c.scale(&s)).collect() }
}

/// Reduce `e` by the elements of `basis`, updating cofactors.
fn reduce_elem(e: &Elem, basis: &[Elem], order: MonomialOrder, nvars: usize) -> Elem {
    let ob: Vec<OPoly> = basis.iter().map(|b| b.f.clone()).collect();
    let (q, r) = divide(&e.f, &ob, order, nvars);
    let cofs: Vec<&[SparsePoly]> = basis.iter().map(|b| b.cof.as_slice()).collect();
    Elem { f: r, cof: combine_cofactors(&e.cof, &q, &cofs) }
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
pub fn groebner(gens: &[SparsePoly], order: MonomialOrder, budget: Budget) -> Result<GroebnerBasis, GroebnerError> {
    let nvars = gens.first().map(|g| g.nvars()).unwrap_or(0);
    groebner_in(nvars, gens, order, budget)
}

pub fn groebner_in(nvars: usize, gens: &[SparsePoly], order: MonomialOrder, budget: Budget) -> Result<GroebnerBasis, GroebnerError> {
    let r = gens.len();
    let mut elems: Vec<Elem> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let f = OPoly::from_sparse(g, order)?;
        if f.is_zero() {
            continue;
        }
        let mut cof = vec![SparsePoly::zero(nvars); r];
        cof[i] = SparsePoly::one(nvars);
        let e = reduce_elem(&Elem { f, cof }, &elems, order, nvars);
        if !e.f.is_zero() {
            elems.push(make_monic(e));
        }
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..elems.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    let mut processed = 0usize;
    let unit = |es: &[Elem]| es.iter().any(|e| e.f.lm().is_one());
    while !pairs.is_empty() && !unit(&elems) {
        // normal strategy: smallest lcm first, ties by index
        let (best, _) = pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let la = elems[a.0].f.lm().lcm(elems[a.1].f.lm());
                let lb = elems[b.0].f.lm().lcm(elems[b.1].f.lm());
                order.cmp(&la, &lb).then(a.cmp(b))
            })
            .unwrap();
        let (i, j) = pairs.remove(best);
        let (mi, mj) = (elems[i].f.lm().clone(), elems[j].f.lm().clone());
        if mi.coprime(&mj) {
            continue;
        }
        let l = mi.lcm(&mj);
        if elems.iter().enumerate().any(|(k, e)| {
            k != i && k != j && e.f.lm().divides(&l) && !pairs.contains(&(i.min(k), i.max(k))) && !pairs.contains(&(j.min(k), j.max(k)))
        }) {
            continue;
        }
        processed += 1;
        if processed > budget.max_pairs {
            return Err(GroebnerError::Budget { stage: "groebner", detail: format!("more than {} S-pairs", budget.max_pairs), partial: elems.len() });
        }
        let ui = mi.quotient_of(&l).unwrap();
        let uj = mj.quotient_of(&l).unwrap();
        let one = BigRational::one();
        let s = OPoly(Vec::new()).sub_scaled(&-one.clone(), &ui, &elems[i].f, order).sub_scaled(&one, &uj, &elems[j].f, order);
        let mut cof = vec![SparsePoly::zero(nvars); r];
        for t in 0..r {
            cof[t] = elems[i].cof[t].mul_term(&ui, &crate::scalars::Scalar::one()).sub(&elems[j].cof[t].mul_term(&uj, &crate::scalars::Scalar::one()));
        }
        let e = reduce_elem(&Elem { f: s, cof }, &elems, order, nvars);
        if e.f.is_zero() {
            continue;
        }
        if e.f.degree() > budget.max_degree {
            return Err(GroebnerError::Budget { stage: "groebner", detail: format!("basis element of degree {} > {}", e.f.degree(), budget.max_degree), partial: elems.len() });
        }
        let k = elems.len();
        elems.push(make_monic(e));
        for i2 in 0..k {
            pairs.push((i2, k));
        }
    }
    Ok(finish(nvars, gens, order, elems))
}

fn finish(nvars: usize, gens: &[SparsePoly], order: MonomialOrder, mut elems: Vec<Elem>) -> GroebnerBasis {
    if let Some(pos) = elems.iter().position(|e| e.f.lm().is_one()) {
        let e = elems.swap_remove(pos);
        elems = vec![make_monic(e)];
    }
    // minimalise
    elems.sort_by(|a, b| order.cmp(a.f.lm(), b.f.lm()));
    let mut keep: Vec<Elem> = Vec::new();
    for e in elems {
        if !keep.iter().any(|k| k.f.lm().divides(e.f.lm())) {
            keep.push(e);
        }
    }
    // inter-reduce tails
    let n = keep.len();
    for k in 0..n {
        let others: Vec<Elem> = keep.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, e)| Elem { f: e.f.clone(), cof: e.cof.clone() }).collect();
        let lead = OPoly(vec![keep[k].f.0[0].clone()]);
        let tail = Elem { f: OPoly(keep[k].f.0[1..].to_vec()), cof: keep[k].cof.clone() };
        let red = reduce_elem(&tail, &others, order, nvars);
        let mut f = lead.0;
        f.extend(red.f.0);
        keep[k] = make_monic(Elem { f: OPoly(f), cof: red.cof });
    }
    GroebnerBasis {
        nvars,
        order,
        gens: gens.to_vec(),
        basis: keep.iter().map(|e| e.f.to_sparse(nvars)).collect(),
        cofactors: keep.iter().map(|e| e.cof.clone()).collect(),
        obasis: keep.into_iter().map(|e| e.f).collect(),
    }
}

impl GroebnerBasis {
    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.obasis.iter().map(|g| g.lm().clone()).collect()
    }

    /// Fully reduced remainder of `f`.
    pub fn normal_form(&self, f: &SparsePoly) -> SparsePoly {
        let of = OPoly::from_sparse(f, self.order).expect("rational coefficients");
        let (_, r) = divide(&of, &self.obasis, self.order, self.nvars);
        r.to_sparse(self.nvars)
    }

    /// Quotients with respect to the basis and the remainder.
    pub fn reduce(&self, f: &SparsePoly) -> (Vec<SparsePoly>, SparsePoly) {
        let of = OPoly::from_sparse(f, self.order).expect("rational coefficients");
        let (q, r) = divide(&of, &self.obasis, self.order, self.nvars);
        (q, r.to_sparse(self.nvars))
    }

    /// Cofactors `c` with `f = sum c_i gens[i]`, or `None` if `f` is not in the ideal.
    pub fn lift(&self, f: &SparsePoly) -> Option<Vec<SparsePoly>> {
        let (q, r) = self.reduce(f);
        if !r.is_zero() {
            return None;
        }
        let mut out = vec![SparsePoly::zero(self.nvars); self.gens.len()];
        for (k, qk) in q.iter().enumerate() {
            for (i, c) in self.cofactors[k].iter().enumerate() {
                out[i] = out[i].add(&qk.mul(c));
            }
        }
        Some(out)
    }

    pub fn is_standard(&self, m: &Monomial) -> bool {
        !self.obasis.iter().any(|g| g.lm().divides(m))
    }
}

/// Cofactors expressing `f` in `gens`, or `None` when `f` is not a member.
pub fn lift_in_ideal(f: &SparsePoly, gens: &[SparsePoly], order: MonomialOrder, budget: Budget) -> Result<Option<Vec<SparsePoly>>, GroebnerError> {
    let gb = groebner_in(f.nvars(), gens, order, budget)?;
    Ok(gb.lift(f))
}

/// All `m`-fold products of generators, in a fixed order, with duplicates removed.
pub fn ideal_power_generators(gens: &[SparsePoly], m: u32) -> Vec<SparsePoly> {
    assert!(m >= 1);
    let mut out: Vec<SparsePoly> = Vec::new();
    let n = gens.len();
    if n == 0 {
        return out;
    }
    let mut idx = vec![0usize; m as usize];
    loop {
        let mut prod = gens[idx[0]].clone();
        for &k in &idx[1..] {
            prod = prod.mul(&gens[k]);
        }
        if !prod.is_zero() && !out.contains(&prod) {
            out.push(prod);
        }
        // next non-decreasing index tuple
        let mut pos = m as usize;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] + 1 < n {
                let v = idx[pos] + 1;
                for q in pos..m as usize {
                    idx[q] = v;
                }
                break;
            }
        }
    }
}

/// Multisets of generator indices matching [`ideal_power_generators`] before deduplication.
pub fn multisets(n: usize, m: u32) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut idx = vec![0usize; m as usize];
    loop {
        out.push(idx.clone());
        let mut pos = m as usize;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] + 1 < n {
                let v = idx[pos] + 1;
                for q in pos..m as usize {
                    idx[q] = v;
                }
                break;
            }
        }
    }
}
