use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::homalg::{FiniteComplex, HomalgError, Matrix, ProComplex};
use crate::polyalg::{Monomial, PresentedAlgebra, SparsePoly};
use crate::scalars::Scalar;

/// Key of a basis form `x^α dx_I`; bit `i` of the mask selects `dx_i`.
pub type FormKey = (Monomial, u32);

/// Sign of `dx_I ∧ dx_J` relative to `dx_{I ∪ J}`, or `None` if they overlap.
pub fn wedge_sign(a: u32, b: u32) -> Option<i64> {
    if a & b != 0 {
        return None;
    }
    // count pairs i in a, j in b with i > j
    let mut inv = 0;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        inv += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    Some(if inv % 2 == 0 { 1 } else { -1 })
}

/// Differential forms with polynomial coefficients over `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    pub nvars: usize,
    pub terms: BTreeMap<FormKey, Scalar>,
}

impl Form {
    pub fn zero(nvars: usize) -> Form {
        Form { nvars, terms: BTreeMap::new() }
    }

    pub fn from_poly(f: &SparsePoly) -> Form {
        let mut out = Form::zero(f.nvars());
        for (m, c) in f.terms() {
            out.add_term((m.clone(), 0), c);
        }
        out
    }

    pub fn dx(nvars: usize, i: usize) -> Form {
        let mut out = Form::zero(nvars);
        out.add_term((Monomial::one(nvars), 1 << i), &Scalar::one());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, k: FormKey, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                let s = v.add(c);
                if s.is_zero() {
                    self.terms.remove(&k);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(k, c.clone());
            }
        }
    }

    pub fn add(&self, o: &Form) -> Form {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(k.clone(), c);
        }
        r
    }

    pub fn sub(&self, o: &Form) -> Form {
        self.add(&o.scale(&Scalar::from_i64(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Form {
        let mut r = Form::zero(self.nvars);
        for (k, v) in &self.terms {
            r.add_term(k.clone(), &v.mul(c));
        }
        r
    }

    pub fn mul_poly(&self, f: &SparsePoly) -> Form {
        let mut r = Form::zero(self.nvars);
        for ((m, i), c) in &self.terms {
            for (mf, cf) in f.terms() {
                r.add_term((m.mul(mf), *i), &c.mul(cf));
            }
        }
        r
    }

    pub fn wedge(&self, o: &Form) -> Form {
        let mut r = Form::zero(self.nvars);
        for ((ma, ia), ca) in &self.terms {
            for ((mb, ib), cb) in &o.terms {
                if let Some(s) = wedge_sign(*ia, *ib) {
                    r.add_term((ma.mul(mb), ia | ib), &ca.mul(cb).mul(&Scalar::from_i64(s)));
                }
            }
        }
        r
    }

    /// Exterior derivative.
    pub fn d(&self) -> Form {
        let mut r = Form::zero(self.nvars);
        for ((m, mask), c) in &self.terms {
            for (k, x) in d_basis(m, *mask) {
                r.add_term(k, &c.mul(&Scalar::from_i64(x)));
            }
        }
        r
    }

    /// Pullback along the algebra map sending `x_i` to `images[i]`.
    pub fn pullback(&self, images: &[SparsePoly], target_nvars: usize) -> Form {
        let mut r = Form::zero(target_nvars);
        for ((m, mask), c) in &self.terms {
            let coeff = SparsePoly::monomial(m.clone()).substitute(images, target_nvars).scale(c);
            let mut f = Form::from_poly(&coeff);
            for i in 0..self.nvars {
                if mask & (1 << i) != 0 {
                    f = f.wedge(&d_poly(&images[i]));
                }
            }
            for (k, x) in f.terms {
                r.add_term(k, &x);
            }
        }
        r
    }

    /// Form degree of a homogeneous form (`None` for zero or mixed degree).
    pub fn form_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|(_, i)| i.count_ones());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }
}

/// `d(x^α dx_I)` as integer combination of basis forms.
pub fn d_basis(m: &Monomial, mask: u32) -> Vec<(FormKey, i64)> {
    let mut out = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        if e == 0 || mask & (1 << i) != 0 {
            continue;
        }
        let mut q = m.0.clone();
        q[i] -= 1;
        let sign = if (mask & ((1u32 << i) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
        out.push(((Monomial(q), mask | (1 << i)), sign * e as i64));
    }
    out
}

/// `df` as a 1-form.
pub fn d_poly(f: &SparsePoly) -> Form {
    Form::from_poly(f).d()
}

/// All masks of `l` elements out of `n`.
pub fn masks(n: usize, l: u32) -> Vec<u32> {
    (0u32..(1 << n)).filter(|m| m.count_ones() == l).collect()
}

/// Sparse row reduction over `Q` with pivots at the largest column index.
#[derive(Clone, Debug, Default)]
struct Reducer {
    rows: BTreeMap<usize, BTreeMap<usize, BigRational>>,
}

impl Reducer {
    fn reduce(&self, v: &mut BTreeMap<usize, BigRational>) {
        loop {
            let Some((&c, _)) = v.iter().rev().find(|(c, _)| self.rows.contains_key(c)) else { return };
            let row = &self.rows[&c];
            let f = v[&c].clone() / &row[&c];
            for (k, x) in row {
                let y = v.get(k).cloned().unwrap_or_else(BigRational::zero) - &f * x;
                if y.is_zero() {
                    v.remove(k);
                } else {
                    v.insert(*k, y);
                }
            }
        }
    }

    fn insert(&mut self, mut v: BTreeMap<usize, BigRational>) {
        self.reduce(&mut v);
        if let Some((&c, _)) = v.iter().next_back() {
            self.rows.insert(c, v);
        }
    }
}

/// The truncated de Rham complex of a presented algebra over `K`.
#[derive(Clone, Debug)]
pub struct DeRhamComplex {
    pub complex: FiniteComplex,
    /// Basis forms of each degree, spanning the quotient by the relation submodule.
    pub bases: Vec<Vec<FormKey>>,
    pub degree_cap: u32,
    reducers: Vec<Reducer>,
    index: Vec<BTreeMap<FormKey, usize>>,
    keys: Vec<Vec<FormKey>>,
}

impl DeRhamComplex {
    /// Coordinates of a form of degree `l` in the quotient basis, or `None`
    /// if it has terms above the degree cap.
    pub fn coordinates(&self, l: usize, f: &Form) -> Option<Vec<Scalar>> {
        let mut v = BTreeMap::new();
        for (k, c) in &f.terms {
            v.insert(*self.index[l].get(k)?, c.to_rational());
        }
        self.reducers[l].reduce(&mut v);
        let pos: BTreeMap<&FormKey, usize> = self.bases[l].iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut out = vec![Scalar::zero(); self.bases[l].len()];
        for (c, x) in v {
            out[pos[&self.keys[l][c]]] = Scalar::Rational(x);
        }
        Some(out)
    }

    /// The form with coordinates `v` in the degree-`l` quotient basis.
    pub fn form(&self, l: usize, v: &[Scalar]) -> Form {
        let n = self.bases[l].first().map_or(0, |k| k.0.nvars());
        let mut f = Form::zero(n);
        for (k, c) in self.bases[l].iter().zip(v) {
            f.add_term(k.clone(), c);
        }
        f
    }

    /// Whether a closed form of degree `l` is exact in the truncated complex.
    pub fn is_exact(&self, l: usize, f: &Form) -> Option<bool> {
        let z = self.coordinates(l, f)?;
        if l == 0 {
            return Some(z.iter().all(|c| c.is_zero()));
        }
        Some(crate::homalg::solve(&self.complex.d[l - 1], &z, 2).is_some())
    }
}

/// Matrix of the map `H^l(src) → H^l(tgt)` induced by `x_i ↦ images[i]`,
/// in the cohomology bases chosen by [`FiniteComplex::cohomology_basis`].
pub fn induced_map(src: &DeRhamComplex, tgt: &DeRhamComplex, images: &[SparsePoly], target_nvars: usize, l: usize) -> Result<Matrix, HomalgError> {
    let reps = src.complex.cohomology_basis(l as i64, 2)?;
    let treps = tgt.complex.cohomology_basis(l as i64, 2)?;
    let mut cols = Vec::new();
    for r in &reps {
        let f = src.form(l, r).pullback(images, target_nvars);
        let z = tgt.coordinates(l, &f).ok_or_else(|| HomalgError::Shape("pullback leaves the degree cap".into()))?;
        cols.push(tgt.complex.cohomology_coordinates(l as i64, &treps, &z, 2)?);
    }
    Ok(Matrix::from_columns(&cols, treps.len()))
}

/// Degree-`l` piece spanned by `x^α dx_I` with `|α| ≤ D`, modulo the
/// submodule generated by `r dx_J` and `dr ∧ dx_J` for relations `r`.
pub fn de_rham_complex(a: &PresentedAlgebra, degree_cap: u32) -> DeRhamComplex {
    let n = a.nvars();
    assert!(n < 32, "too many variables for form masks");
    let top = if a.is_zero_ring() { 0 } else { n + 1 };
    let mut bases = Vec::new();
    let mut reducers = Vec::new();
    let mut index = Vec::new();
    let mut all_keys = Vec::new();
    let monos = Monomial::all_up_to_degree(n, degree_cap);
    let rels: Vec<(SparsePoly, Form)> = a.relations.iter().map(|r| (r.clone(), d_poly(r))).collect();
    for l in 0..top {
        let mut keys: Vec<FormKey> = masks(n, l as u32).into_iter().flat_map(|i| monos.iter().map(move |m| (m.clone(), i))).collect();
        // order by degree then monomial order; pivots are taken from the top
        keys.sort_by(|x, y| x.0.degree().cmp(&y.0.degree()).then(a.order().cmp(&x.0, &y.0)).then(x.1.cmp(&y.1)));
        let idx: BTreeMap<FormKey, usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let mut red = Reducer::default();
        let to_row = |f: &Form| -> Option<BTreeMap<usize, BigRational>> { f.terms.iter().map(|(k, c)| idx.get(k).map(|&i| (i, c.to_rational()))).collect() };
        for (r, dr) in &rels {
            let rdeg = r.degree().unwrap_or(0);
            for beta in &monos {
                let xb = SparsePoly::monomial(beta.clone()).extend_vars(n);
                if beta.degree() + rdeg <= degree_cap {
                    for j in masks(n, l as u32) {
                        let f = Form::from_poly(&xb.mul(r)).wedge(&Form { nvars: n, terms: [((Monomial::one(n), j), Scalar::one())].into() });
                        if let Some(row) = to_row(&f) {
                            red.insert(row);
                        }
                    }
                }
                if l >= 1 && beta.degree() + rdeg <= degree_cap + 1 {
                    for j in masks(n, l as u32 - 1) {
                        let f = dr.mul_poly(&xb).wedge(&Form { nvars: n, terms: [((Monomial::one(n), j), Scalar::one())].into() });
                        if let Some(row) = to_row(&f) {
                            red.insert(row);
                        }
                    }
                }
            }
        }
        let basis: Vec<FormKey> = keys.iter().enumerate().filter(|(i, _)| !red.rows.contains_key(i)).map(|(_, k)| k.clone()).collect();
        bases.push(basis);
        reducers.push(red);
        index.push(idx);
        all_keys.push(keys);
    }
    let dims: Vec<usize> = bases.iter().map(|b| b.len()).collect();
    let mut out = DeRhamComplex { complex: FiniteComplex::zero(0, dims.len().max(1)), bases, degree_cap, reducers, index, keys: all_keys };
    let mut ds = Vec::new();
    for l in 0..dims.len().saturating_sub(1) {
        let cols: Vec<Vec<Scalar>> = out.bases[l]
            .iter()
            .map(|k| {
                let mut f = Form::zero(n);
                f.add_term(k.clone(), &Scalar::one());
                out.coordinates(l + 1, &f.d()).expect("d lowers the coefficient degree")
            })
            .collect();
        ds.push(Matrix::from_columns(&cols, dims[l + 1]));
    }
    out.complex = if dims.is_empty() { FiniteComplex::with_zero_differentials(0, vec![0]) } else { FiniteComplex::new(0, dims, ds).expect("shapes") };
    out
}

/// De Rham complex of `P / J^k` truncated at coefficient degree `D`.
pub fn infinitesimal_complex(vars: &[String], relations: &[SparsePoly], jgens: &[SparsePoly], k: u32, degree_cap: u32) -> Result<DeRhamComplex, crate::polyalg::AlgebraError> {
    let mut rels = relations.to_vec();
    rels.extend(crate::polyalg::ideal_power_generators(jgens, k));
    let a = PresentedAlgebra::new(vars.to_vec(), rels, None)?;
    Ok(de_rham_complex(&a, degree_cap))
}

/// The tower `P/J ← P/J^2 ← … ← P/J^k` of truncated de Rham complexes.
pub fn infinitesimal_tower(vars: &[String], relations: &[SparsePoly], jgens: &[SparsePoly], k: u32, degree_cap: u32) -> Result<ProComplex, crate::polyalg::AlgebraError> {
    let levels = (1..=k).map(|i| infinitesimal_complex(vars, relations, jgens, i, degree_cap)).collect::<Result<Vec<_>, _>>()?;
    let len = levels.iter().map(|c| c.complex.dims.len()).max().unwrap_or(1);
    let pad = |c: &FiniteComplex| {
        let mut dims = c.dims.clone();
        dims.resize(len, 0);
        if dims == c.dims {
            c.clone()
        } else {
            FiniteComplex::with_zero_differentials(0, dims)
        }
    };
    let mut transitions = Vec::new();
    for w in levels.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let maps = (0..len)
            .map(|l| {
                let rows = lo.complex.dims.get(l).copied().unwrap_or(0);
                let cols: Vec<Vec<Scalar>> = (0..hi.complex.dims.get(l).copied().unwrap_or(0))
                    .map(|j| {
                        let mut e = vec![Scalar::zero(); hi.bases[l].len()];
                        e[j] = Scalar::one();
                        if rows == 0 {
                            Vec::new()
                        } else {
                            lo.coordinates(l, &hi.form(l, &e)).expect("same degree cap")
                        }
                    })
                    .collect();
                Matrix::from_columns(&cols, rows)
            })
            .collect();
        transitions.push(maps);
    }
    let levels = levels.iter().map(|c| pad(&c.complex)).collect();
    Ok(ProComplex::new(levels, transitions).expect("tower shapes"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_poly;

    #[test]
    fn signs() {
        assert_eq!(wedge_sign(0b01, 0b10), Some(1));
        assert_eq!(wedge_sign(0b10, 0b01), Some(-1));
        assert_eq!(wedge_sign(0b11, 0b01), None);
        let (dx, dy) = (Form::dx(2, 0), Form::dx(2, 1));
        assert_eq!(dx.wedge(&dy), dy.wedge(&dx).scale(&Scalar::from_i64(-1)));
    }

    #[test]
    fn d_squared_and_leibniz() {
        let v: Vec<String> = vec!["x".into(), "y".into(), "z".into()];
        let f = parse_poly("x^2*y + 3*y*z^3 - x", &v).unwrap();
        let g = parse_poly("x*y*z + 2", &v).unwrap();
        assert!(d_poly(&f).d().is_zero());
        assert_eq!(d_poly(&f.mul(&g)), d_poly(&f).mul_poly(&g).add(&d_poly(&g).mul_poly(&f)));
        let w = d_poly(&f).mul_poly(&g).wedge(&Form::dx(3, 2));
        assert!(w.d().d().is_zero());
    }

    #[test]
    fn affine_line_dims() {
        let a = PresentedAlgebra::polynomial_ring(&["x"]);
        let c = de_rham_complex(&a, 5);
        assert_eq!(c.complex.dims, vec![6, 6]);
        assert_eq!(c.complex.homology_dims(2, 0).unwrap(), vec![1, 1]);
    }

    #[test]
    fn point_is_one_dimensional() {
        let a = PresentedAlgebra::polynomial_ring(&[]);
        let c = de_rham_complex(&a, 3);
        assert_eq!(c.complex.dims, vec![1]);
    }

    #[test]
    fn laurent_class() {
        let a = PresentedAlgebra::parse(&["t", "u"], &["t*u - 1"]).unwrap();
        let v = a.vars.clone();
        let c = de_rham_complex(&a, 8);
        let rel = d_poly(&parse_poly("t*u - 1", &v).unwrap());
        assert_eq!(c.coordinates(1, &rel).unwrap().iter().filter(|x| !x.is_zero()).count(), 0);
        let udt = Form::from_poly(&parse_poly("u", &v).unwrap()).wedge(&Form::dx(2, 0));
        assert_eq!(c.is_exact(1, &udt), Some(false));
        let u2dt = Form::from_poly(&parse_poly("u^2", &v).unwrap()).wedge(&Form::dx(2, 0));
        assert_eq!(c.is_exact(1, &u2dt), Some(true));
    }

    #[test]
    fn evaluation_maps_agree_on_h0() {
        let line = de_rham_complex(&PresentedAlgebra::polynomial_ring(&["t"]), 6);
        let point = de_rham_complex(&PresentedAlgebra::polynomial_ring(&[]), 6);
        let at = |c| induced_map(&line, &point, &[SparsePoly::from_i64(0, c)], 0, 0).unwrap();
        assert_eq!(at(0), at(1));
        assert_eq!(at(0), Matrix::identity(1));
        // swapping t and u sends the class of u dt to its negative
        let gm = de_rham_complex(&PresentedAlgebra::parse(&["t", "u"], &["t*u - 1"]).unwrap(), 6);
        let udt = Form::dx(2, 0).mul_poly(&SparsePoly::var(2, 1));
        let back = udt.pullback(&[SparsePoly::var(2, 1), SparsePoly::var(2, 0)], 2);
        assert_eq!(gm.is_exact(1, &back.add(&udt)), Some(true));
        assert_eq!(gm.is_exact(1, &back), Some(false));
    }

    #[test]
    fn infinitesimal_tower_bookkeeping() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let j = [parse_poly("x", &vars).unwrap(), parse_poly("y", &vars).unwrap()];
        let pc = infinitesimal_tower(&vars, &[], &j, 4, 6).unwrap();
        pc.check_chain_maps().unwrap();
        let rows = crate::homalg::holim_bookkeeping(&pc, 2).unwrap();
        assert_eq!(rows[0], (1, 1, 0));
        assert!(rows.iter().all(|&(h, l, l1)| h == l + l1));
    }

    #[test]
    fn formal_poincare() {
        let v: Vec<String> = vec!["x".into()];
        let x = parse_poly("x", &v).unwrap();
        let c = infinitesimal_complex(&v, &[], &[x], 6, 6).unwrap();
        assert_eq!(c.complex.homology_dims(2, 0).unwrap(), vec![1, 0]);
        let v2: Vec<String> = vec!["x".into(), "y".into()];
        let j: Vec<_> = ["x", "y"].iter().map(|g| parse_poly(g, &v2).unwrap()).collect();
        let c = infinitesimal_complex(&v2, &[], &j, 6, 6).unwrap();
        assert_eq!(c.complex.homology_dims(2, 0).unwrap(), vec![1, 0, 0]);
        let one = parse_poly("1", &v).unwrap();
        let c = infinitesimal_complex(&v, &[], &[one], 6, 6).unwrap();
        assert!(c.complex.dims.iter().all(|&d| d == 0));
    }
}
