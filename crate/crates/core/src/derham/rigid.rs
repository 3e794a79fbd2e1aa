//! Lattice model of the de Rham complex of the weak completions of tube
//! algebras.
//!
//! For a presentation `A = F_p[x]/(f̄)` with integral lifts `f`, the level-`m`
//! tube algebra is `T_m = V[x, f^b/p : |b| = m]`. Its forms of filtration
//! degree `≤ D` span a lattice `L_D` inside the `K`-forms on `K[x]`. With
//! `Z = {ω ∈ L_D : dω ∈ p^τ L_{D'}}` and `B = dL_{D'} + p^τ L_{D'}`, the
//! cohomology at level `m` is read off as the `F_p`-space
//! `W = (p^{τ-s-1} Z + B) / (p^{τ-s} Z + B)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::forms::{d_basis, d_poly, Form, FormKey};
use crate::homalg::lattice::{Elem, echelon, echelon_with, kernel_mod, vec_mat, Echelon, Zpk};
use crate::homalg::{BettiCell, BettiReport, Certificate, holim, holim_bookkeeping, rank, FiniteComplex, HomalgError, Matrix, ProComplex};
use crate::polyalg::{multisets, Monomial, SparsePoly};
use crate::scalars::{residue_mod_pn, Field, Scalar, Valuation};

#[derive(Debug, Error)]
pub enum RigidError {
    #[error("relation {0} is not p-integral")]
    NotIntegral(usize),
    #[error("degree weights must be positive, one per variable")]
    DegreeWeights,
    #[error("working precision p^{0} does not fit in a machine word")]
    Precision(u32),
    #[error("budget exceeded in {stage}: dimension {dim} > {cap}")]
    Budget { stage: &'static str, dim: usize, cap: usize },
    #[error("inconsistent lattice data: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Homalg(#[from] HomalgError),
}

/// Parameters of the lattice model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RigidParams {
    pub tau: u32,
    pub s: u32,
    /// `D' = degree_factor · D`
    pub degree_factor: u32,
    pub euler_skip: bool,
    /// Largest ambient dimension of a single weight piece.
    pub max_dim: usize,
}

impl Default for RigidParams {
    fn default() -> Self {
        RigidParams { tau: 4, s: 1, degree_factor: 2, euler_skip: true, max_dim: 4000 }
    }
}

/// An integral presentation: `F_p[x] / (f̄_1, …, f̄_r)` with lifts `f_i ∈ V[x]`.
#[derive(Clone, Debug)]
pub struct RigidPresentation {
    pub p: u64,
    pub vars: Vec<String>,
    pub relations: Vec<SparsePoly>,
    /// Filtration weight of each variable (all 1 for total degree).
    pub degree_weights: Vec<u32>,
    /// Integer weight vectors making every relation homogeneous.
    pub torus: Vec<Vec<i64>>,
}

impl RigidPresentation {
    pub fn new(p: u64, vars: Vec<String>, relations: Vec<SparsePoly>, degree_weights: Option<Vec<u32>>) -> Result<Self, RigidError> {
        let n = vars.len();
        for (i, f) in relations.iter().enumerate() {
            if f.terms().any(|(_, c)| c.valuation(p) < Valuation::Finite(0)) {
                return Err(RigidError::NotIntegral(i));
            }
        }
        let degree_weights = degree_weights.unwrap_or_else(|| vec![1; n]);
        if degree_weights.len() != n || degree_weights.contains(&0) {
            return Err(RigidError::DegreeWeights);
        }
        let relations: Vec<SparsePoly> = relations.into_iter().filter(|f| !f.is_zero()).collect();
        let torus = torus_weights(n, &relations);
        Ok(RigidPresentation { p, vars, relations, degree_weights, torus })
    }

    /// Relation lifts taken from a tube system: the generators of `J` other than `p`.
    pub fn from_tube_system(ts: &crate::tubes::TubeSystem, degree_weights: Option<Vec<u32>>) -> Result<Self, RigidError> {
        let n = ts.nvars();
        let rels = ts.formal_j.iter().filter(|g| g.terms().all(|(m, _)| m.0[n] == 0)).map(|g| crate::tubes::specialize(g, ts.p)).collect();
        RigidPresentation::new(ts.p, ts.vars.clone(), rels, degree_weights)
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn key_degree(&self, k: &FormKey) -> u32 {
        let dw = &self.degree_weights;
        k.0 .0.iter().zip(dw).map(|(e, w)| e * w).sum::<u32>() + (0..self.nvars()).filter(|i| k.1 & (1 << i) != 0).map(|i| dw[i]).sum::<u32>()
    }

    fn key_weight(&self, k: &FormKey) -> Vec<i64> {
        self.torus
            .iter()
            .map(|w| k.0 .0.iter().zip(w).map(|(&e, &x)| e as i64 * x).sum::<i64>() + (0..self.nvars()).filter(|i| k.1 & (1 << i) != 0).map(|i| w[i]).sum::<i64>())
            .collect()
    }

    fn poly_degree(&self, f: &SparsePoly) -> u32 {
        f.terms().map(|(m, _)| m.0.iter().zip(&self.degree_weights).map(|(e, w)| e * w).sum()).max().unwrap_or(0)
    }

    fn mono_weight(&self, m: &Monomial) -> Vec<i64> {
        self.torus.iter().map(|w| m.0.iter().zip(w).map(|(&e, &x)| e as i64 * x).sum()).collect()
    }

    /// Leading monomial for the rewriting that prunes spanning sets:
    /// filtration degree first, ties broken lexicographically with the last
    /// variable most significant. `None` unless the leading coefficient is a unit.
    fn leading(&self, f: &SparsePoly) -> Option<Monomial> {
        let dw = &self.degree_weights;
        let deg = |m: &Monomial| m.0.iter().zip(dw).map(|(e, w)| e * w).sum::<u32>();
        let (m, c) = f.terms().max_by(|(a, _), (b, _)| deg(a).cmp(&deg(b)).then_with(|| a.0.iter().rev().cmp(b.0.iter().rev())))?;
        (c.valuation(self.p) == Valuation::Finite(0)).then(|| m.clone())
    }
}

/// A basis of integer weight vectors `w` with every relation `w`-homogeneous.
pub fn torus_weights(nvars: usize, relations: &[SparsePoly]) -> Vec<Vec<i64>> {
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for f in relations {
        let ms: Vec<&Monomial> = f.terms().map(|(m, _)| m).collect();
        for m in &ms[1..] {
            rows.push((0..nvars).map(|i| Scalar::from_i64(m.0[i] as i64 - ms[0].0[i] as i64)).collect());
        }
    }
    if rows.is_empty() {
        return (0..nvars).map(|i| (0..nvars).map(|j| (i == j) as i64).collect()).collect();
    }
    let m = Matrix::from_rows_with_cols(rows, nvars).expect("rows have nvars entries");
    let rep = crate::homalg::rank_kernel_image(&m, 2, 0).expect("exact arithmetic");
    rep.kernel.iter().map(|v| primitive(v)).collect()
}

fn primitive(v: &[Scalar]) -> Vec<i64> {
    use num_integer::Integer;
    let qs: Vec<BigRational> = v.iter().map(|x| x.to_rational()).collect();
    let l = qs.iter().fold(BigInt::one(), |a, q| a.lcm(q.denom()));
    let ints: Vec<BigInt> = qs.iter().map(|q| (q * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |a, x| a.gcd(x));
    let sign = if ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) { -1 } else { 1 };
    ints.iter().map(|x| i64::try_from(x / &g).expect("small weights") * sign).collect()
}

/// Monomials of filtration degree `≤ d`.
fn monomials_up_to(dw: &[u32], d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; dw.len()];
    fn rec(i: usize, left: u32, dw: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == dw.len() {
            out.push(Monomial(cur.clone()));
            return;
        }
        let mut e = 0;
        while e * dw[i] <= left {
            cur[i] = e;
            rec(i + 1, left - e * dw[i], dw, cur, out);
            e += 1;
        }
        cur[i] = 0;
    }
    rec(0, d, dw, &mut cur, &mut out);
    out
}

/// A lattice generator `g/p^e` with `g ∈ V[x]`.
#[derive(Clone, Debug)]
struct Gen {
    dg: Form,
    pexp: u32,
    sdeg: u32,
    weight: Vec<i64>,
}

/// Spanning data of the level-`m` lattice.
struct LevelSpan {
    gens: Vec<Gen>,
    /// `f^B / p^k`
    fmonos: Vec<(SparsePoly, u32, u32, Vec<i64>)>,
    /// x-monomials not divisible by a leading monomial of any `f^b`, `|b| = m`
    standard: Vec<Monomial>,
}

impl LevelSpan {
    fn new(pres: &RigidPresentation, m: u32, dmax: u32) -> LevelSpan {
        let n = pres.nvars();
        let r = pres.relations.len();
        let mut gens: Vec<Gen> = (0..n)
            .map(|i| {
                let mut w = Monomial::one(n);
                w.0[i] = 1;
                Gen { dg: Form::dx(n, i), pexp: 0, sdeg: pres.degree_weights[i], weight: pres.mono_weight(&w) }
            })
            .collect();
        let bs: Vec<Vec<u32>> = multisets(r, m)
            .into_iter()
            .map(|ms| {
                let mut b = vec![0u32; r];
                ms.iter().for_each(|&i| b[i] += 1);
                b
            })
            .collect();
        let pow = |b: &[u32]| {
            b.iter().enumerate().fold(SparsePoly::one(n), |acc, (i, &e)| acc.mul(&pres.relations[i].pow(e)))
        };
        let rel_deg: Vec<u32> = pres.relations.iter().map(|f| pres.poly_degree(f)).collect();
        let rel_wt: Vec<Vec<i64>> = pres.relations.iter().map(|f| f.terms().next().map(|(m, _)| pres.mono_weight(m)).unwrap_or_default()).collect();
        let bdeg = |b: &[u32]| b.iter().zip(&rel_deg).map(|(e, d)| e * d).sum::<u32>();
        let bwt = |b: &[u32]| -> Vec<i64> { (0..pres.torus.len()).map(|j| b.iter().zip(&rel_wt).map(|(&e, w)| e as i64 * w[j]).sum()).collect() };
        for b in &bs {
            let f = pow(b);
            gens.push(Gen { dg: d_poly(&f), pexp: 1, sdeg: bdeg(b), weight: bwt(b) });
        }
        // F-monomials f^B / p^k with |B| = mk and degree ≤ dmax
        let mut fmonos = Vec::new();
        let mut bb = vec![0u32; r];
        fn rec(i: usize, left: u32, deg: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i == deg.len() {
                out.push(cur.clone());
                return;
            }
            let mut e = 0;
            loop {
                cur[i] = e;
                rec(i + 1, left - e * deg[i], deg, cur, out);
                if deg[i] == 0 || (e + 1) * deg[i] > left {
                    break;
                }
                e += 1;
            }
            cur[i] = 0;
        }
        let mut all = Vec::new();
        if r > 0 && rel_deg.iter().all(|&d| d > 0) {
            rec(0, dmax, &rel_deg, &mut bb, &mut all);
        } else {
            all.push(vec![0; r]);
        }
        for b in all {
            let tot: u32 = b.iter().sum();
            if tot % m == 0 {
                fmonos.push((pow(&b), tot / m, bdeg(&b), bwt(&b)));
            }
        }
        let leads: Vec<Monomial> = bs
            .iter()
            .filter_map(|b| {
                let ls: Option<Vec<Monomial>> = b.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| pres.leading(&pres.relations[i])).collect();
                let ls = ls?;
                let mut out = Monomial::one(n);
                for (l, (_, &e)) in ls.iter().zip(b.iter().enumerate().filter(|(_, &e)| e > 0)) {
                    for _ in 0..e {
                        out = out.mul(l);
                    }
                }
                Some(out)
            })
            .collect();
        let standard = monomials_up_to(&pres.degree_weights, dmax).into_iter().filter(|a| !leads.iter().any(|l| l.divides(a))).collect();
        LevelSpan { gens, fmonos, standard }
    }

    /// Largest power of `p` in a denominator of a spanning vector of degree `≤ d`.
    fn max_denominator(&self, d: u32) -> u32 {
        let fmin = self.gens.iter().filter(|g| g.pexp > 0).map(|g| g.sdeg).min();
        let kmax = self.fmonos.iter().filter(|f| f.2 <= d).map(|f| f.1).max().unwrap_or(0);
        match fmin {
            Some(s) if s > 0 => kmax.max(d / s),
            _ => kmax,
        }
    }
}

/// Cohomology of one weight piece at one level, in one form degree.
#[derive(Clone, Debug)]
struct WSpace {
    /// representatives in `L_{D'}` coordinates modulo `p^{τ+1}`
    reps: Vec<Vec<Elem>>,
    x1: Echelon,
    /// images of the representatives in `X1 / p X1`, echelonized over `F_p`
    classes: Echelon,
}

/// All data of one weight piece at one level.
struct PieceLevel {
    ldp: Vec<Echelon>,
    w: Vec<WSpace>,
}

/// Ambient coordinates of one weight piece.
struct Piece {
    weight: Vec<i64>,
    keys: Vec<Vec<FormKey>>,
    index: Vec<BTreeMap<FormKey, usize>>,
}

/// The cohomology tower computed at one degree cap.
#[derive(Clone, Debug, Serialize)]
pub struct RigidTower {
    pub degree_cap: u32,
    pub outer_cap: u32,
    /// `dims[m-1][l]`
    pub dims: Vec<Vec<usize>>,
    /// `transitions[i][l]`: level `i+2` to level `i+1`, over `F_p`
    #[serde(skip)]
    pub transitions: Vec<Vec<Matrix>>,
    pub precision: u32,
    pub scale: u32,
    pub pieces: usize,
    pub skipped_pieces: usize,
    pub max_ambient_dim: usize,
}

impl RigidTower {
    pub fn levels(&self) -> usize {
        self.dims.len()
    }

    /// Rank of the composite from level `level_cap` down to level 1 in each degree.
    pub fn stable_image(&self, p: u64, level_cap: usize) -> Result<Vec<usize>, RigidError> {
        let nl = self.dims[0].len();
        (0..nl)
            .map(|l| {
                if level_cap == 1 {
                    return Ok(self.dims[0][l]);
                }
                let mut c = self.transitions[level_cap - 2][l].clone();
                for t in self.transitions[..level_cap - 2].iter().rev() {
                    c = t[l].mul(&c)?;
                }
                Ok(rank(&c, p, 0)?)
            })
            .collect()
    }

    /// Levels `1..=level_cap` as complexes with zero differential.
    pub fn procomplex(&self, level_cap: usize) -> ProComplex {
        let levels = self.dims[..level_cap].iter().map(|d| FiniteComplex::with_zero_differentials(0, d.clone())).collect();
        ProComplex::new(levels, self.transitions[..level_cap - 1].to_vec()).expect("shapes agree")
    }

    /// `dim H^n(holim)` and `(lim, lim¹)` per degree for the truncated tower.
    pub fn holim_dims(&self, p: u64, level_cap: usize) -> Result<(Vec<usize>, Vec<(usize, usize, usize)>), RigidError> {
        let pc = self.procomplex(level_cap);
        let h = holim(&pc)?.homology_dims(p, 0)?;
        Ok((h, holim_bookkeeping(&pc, p)?))
    }
}

struct Engine<'a> {
    pres: &'a RigidPresentation,
    params: &'a RigidParams,
    ring: Zpk,
    small: Zpk,
    exact_tau: Zpk,
    fp: Zpk,
    scale: u32,
}

impl Engine<'_> {
    fn scaled(&self, c: &BigRational, den: u32) -> Elem {
        let q = c * BigRational::from_integer(BigInt::from(self.pres.p).pow(self.scale - den));
        residue_mod_pn(&q, self.pres.p, self.ring.k()).expect("p-integral after scaling")
    }

    /// Spanning vectors of `L^l` for one weight piece and filtration bound `d`.
    fn spanning(&self, span: &LevelSpan, piece: &Piece, l: usize, d: u32, subsets: &[Vec<usize>]) -> Vec<Vec<Elem>> {
        let n = self.pres.nvars();
        let dim = piece.keys[l].len();
        let mut out = Vec::new();
        let mut std_by_weight: BTreeMap<Vec<i64>, Vec<&Monomial>> = BTreeMap::new();
        for a in &span.standard {
            std_by_weight.entry(self.pres.mono_weight(a)).or_default().push(a);
        }
        for sub in subsets {
            let sd: u32 = sub.iter().map(|&i| span.gens[i].sdeg).sum();
            if sd > d {
                continue;
            }
            let pe: u32 = sub.iter().map(|&i| span.gens[i].pexp).sum();
            let wt: Vec<i64> = (0..self.pres.torus.len()).map(|j| sub.iter().map(|&i| span.gens[i].weight[j]).sum()).collect();
            let mut dg: Option<Form> = None;
            for (fb, k, fdeg, fw) in &span.fmonos {
                if sd + fdeg > d {
                    continue;
                }
                let need: Vec<i64> = (0..wt.len()).map(|j| piece.weight[j] - wt[j] - fw[j]).collect();
                let Some(alphas) = std_by_weight.get(&need) else { continue };
                let left = d - sd - fdeg;
                let alphas: Vec<&&Monomial> = alphas.iter().filter(|a| a.0.iter().zip(&self.pres.degree_weights).map(|(e, w)| e * w).sum::<u32>() <= left).collect();
                if alphas.is_empty() {
                    continue;
                }
                let dgi = dg.get_or_insert_with(|| {
                    sub.iter().fold(Form::from_poly(&SparsePoly::one(n)), |acc, &i| acc.wedge(&span.gens[i].dg))
                });
                if dgi.is_zero() {
                    break;
                }
                let base = dgi.mul_poly(fb);
                for a in alphas {
                    let mut v = vec![0 as Elem; dim];
                    for ((mono, mask), c) in &base.terms {
                        let key = (mono.mul(a), *mask);
                        let idx = piece.index[l][&key];
                        v[idx] = self.ring.add(v[idx], self.scaled(&c.to_rational(), k + pe));
                    }
                    if v.iter().any(|&x| x != 0) {
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    fn d_images(&self, piece: &Piece, l: usize, rows: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
        let ring = &self.ring;
        let map: Vec<Vec<(usize, Elem)>> = piece.keys[l]
            .iter()
            .map(|(m, mask)| d_basis(m, *mask).into_iter().map(|(k, c)| (piece.index[l + 1][&k], ring.from_i64(c))).collect())
            .collect();
        rows.iter()
            .map(|r| {
                let mut out = vec![0 as Elem; piece.keys[l + 1].len()];
                for (i, &x) in r.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    let px = ring.prepare(x);
                    for &(j, c) in &map[i] {
                        out[j] = ring.add(out[j], ring.mul_by(c, px));
                    }
                }
                out
            })
            .collect()
    }

    fn coords_all(&self, e: &Echelon, rows: &[Vec<Elem>]) -> Result<Vec<Vec<Elem>>, RigidError> {
        rows.iter()
            .map(|r| {
                e.coordinates(&self.ring, r)
                    .map(|c| c.into_iter().map(|x| self.small.reduce(x)).collect())
                    .ok_or_else(|| RigidError::Inconsistent("vector outside its lattice".into()))
            })
            .collect()
    }

    fn level(&self, span: &LevelSpan, piece: &Piece, d: u32, dp: u32) -> Result<PieceLevel, RigidError> {
        let n = self.pres.nvars();
        let (tau, s) = (self.params.tau, self.params.s);
        let (small, fp) = (&self.small, &self.fp);
        let nl = n + 1;
        let mut ld = Vec::new();
        let mut ldp = Vec::new();
        for l in 0..nl {
            let subsets = subsets_of(span.gens.len(), l);
            let dim = piece.keys[l].len();
            ld.push(echelon(&self.ring, self.spanning(span, piece, l, d, &subsets), dim));
            ldp.push(echelon(&self.ring, self.spanning(span, piece, l, dp, &subsets), dim));
        }
        let mut ws = Vec::new();
        for l in 0..nl {
            let np = ldp[l].rank();
            if np < piece.keys[l].len() {
                return Err(RigidError::Inconsistent(format!("lattice of degree {l} is not full rank")));
            }
            // Z in L_D coordinates, known modulo p^τ
            let z = if l + 1 < nl {
                let m = self.coords_all(&ldp[l + 1], &self.d_images(piece, l, &ld[l].rows))?;
                let m: Vec<Vec<Elem>> = m.into_iter().map(|r| r.into_iter().map(|x| self.exact_tau.reduce(x)).collect()).collect();
                kernel_mod(&self.exact_tau, &m, ldp[l + 1].rank())
            } else {
                (0..ld[l].rank()).map(|i| (0..ld[l].rank()).map(|j| (i == j) as Elem).collect()).collect()
            };
            let incl = self.coords_all(&ldp[l], &ld[l].rows)?;
            let zp: Vec<Vec<Elem>> = z.iter().map(|v| vec_mat(small, v, &incl, np)).collect();
            let b = if l > 0 { self.coords_all(&ldp[l], &self.d_images(piece, l - 1, &ldp[l - 1].rows))? } else { Vec::new() };
            let scaled = |e: u32| -> Vec<Vec<Elem>> {
                let f = small.prepare(small.p_pow(e));
                let mut g: Vec<Vec<Elem>> = zp.iter().map(|v| v.iter().map(|&x| small.mul_by(x, f)).collect()).collect();
                g.extend(b.iter().cloned());
                g.extend((0..np).map(|i| {
                    let mut v = vec![0; np];
                    v[i] = small.p_pow(tau);
                    v
                }));
                g
            };
            let x1 = echelon(small, scaled(tau - s), np);
            let x0 = echelon(small, scaled(tau - s - 1), np);
            let h = (x1.colength(small) - x0.colength(small)) as usize;
            // classes of p^{τ-s-1} z through X0/X1 → X1/pX1
            let reps: Vec<Vec<Elem>> = scaled(tau - s - 1).into_iter().take(zp.len()).collect();
            let nr = reps.len();
            let imgs: Vec<Vec<Elem>> = reps
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let px = small.prepare(small.p() as Elem);
                    let y: Vec<Elem> = x.iter().map(|&a| small.mul_by(a, px)).collect();
                    let mut c: Vec<Elem> = x1.coordinates(small, &y).expect("generator of X1").into_iter().map(|a| a % small.p() as Elem).collect();
                    c.resize(np + nr, 0);
                    c[np + i] = 1;
                    c
                })
                .collect();
            let (cls, _) = echelon_with(fp, imgs, np + nr, np);
            if cls.rank() != h {
                return Err(RigidError::Inconsistent(format!("W has {} classes but colength difference {h}", cls.rank())));
            }
            let new_reps: Vec<Vec<Elem>> = cls.rows.iter().map(|row| vec_mat(small, &row[np..], &reps, np)).collect();
            let classes = Echelon { rows: cls.rows.iter().map(|r| r[..np].to_vec()).collect(), pivots: cls.pivots.clone(), ncols: np };
            ws.push(WSpace { reps: new_reps, x1, classes });
        }
        let _ = fp;
        Ok(PieceLevel { ldp, w: ws })
    }

    /// Matrix of `W_{m+1} → W_m` (columns: classes of the upper level).
    fn transition(&self, upper: &PieceLevel, lower: &PieceLevel, l: usize) -> Result<Vec<Vec<Elem>>, RigidError> {
        let small = &self.small;
        let incl = self.coords_all(&lower.ldp[l], &upper.ldp[l].rows)?;
        let np = lower.ldp[l].rank();
        let px = small.prepare(small.p() as Elem);
        let wl = &lower.w[l];
        upper.w[l]
            .reps
            .iter()
            .map(|x| {
                let y: Vec<Elem> = vec_mat(small, x, &incl, np).into_iter().map(|a| small.mul_by(a, px)).collect();
                let c: Vec<Elem> = wl.x1.coordinates(small, &y).ok_or_else(|| RigidError::Inconsistent("class outside X0".into()))?.into_iter().map(|a| a % small.p() as Elem).collect();
                wl.classes.coordinates(&self.fp, &c).ok_or_else(|| RigidError::Inconsistent("image outside W".into()))
            })
            .collect()
    }
}

fn subsets_of(n: usize, l: usize) -> Vec<Vec<usize>> {
    (0u64..(1 << n)).filter(|m| m.count_ones() as usize == l).map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect()).collect()
}

fn skipped(weight: &[i64], p: u64, bound: u32) -> bool {
    weight.iter().any(|&w| {
        if w == 0 {
            return false;
        }
        let mut v = 0;
        let mut x = w.unsigned_abs();
        while x % p == 0 {
            x /= p;
            v += 1;
        }
        v <= bound
    })
}

/// Compute the cohomology tower for levels `1..=m_max` at degree cap `D`.
pub fn rigid_tower(pres: &RigidPresentation, params: &RigidParams, degree_cap: u32, m_max: u32) -> Result<RigidTower, RigidError> {
    let n = pres.nvars();
    assert!(n < 31, "too many variables");
    assert!(params.s < params.tau && params.degree_factor >= 1);
    let dp = degree_cap * params.degree_factor;
    let spans: Vec<LevelSpan> = (1..=m_max).map(|m| LevelSpan::new(pres, m, dp)).collect();
    let scale = spans.iter().map(|s| s.max_denominator(dp)).max().unwrap_or(0);
    let e = scale + params.tau + 2;
    let p = pres.p;
    let ring = Zpk::new(p, e).ok_or(RigidError::Precision(e))?;
    let engine = Engine {
        pres,
        params,
        ring,
        small: Zpk::new(p, params.tau + 1).ok_or(RigidError::Precision(params.tau + 1))?,
        exact_tau: Zpk::new(p, params.tau).unwrap(),
        fp: Zpk::new(p, 1).unwrap(),
        scale,
    };
    // weight pieces of the ambient forms
    let monos = monomials_up_to(&pres.degree_weights, dp);
    let mut by_weight: BTreeMap<Vec<i64>, Vec<Vec<FormKey>>> = BTreeMap::new();
    for l in 0..=n {
        for mask in (0u32..(1 << n)).filter(|m| m.count_ones() as usize == l) {
            for a in &monos {
                let k = (a.clone(), mask);
                if pres.key_degree(&k) <= dp {
                    let w = pres.key_weight(&k);
                    by_weight.entry(w).or_insert_with(|| vec![Vec::new(); n + 1])[l].push(k);
                }
            }
        }
    }
    let total = by_weight.len();
    let bound = params.tau - params.s - 1;
    let pieces: Vec<Piece> = by_weight
        .into_iter()
        .filter(|(w, _)| !(params.euler_skip && skipped(w, p, bound)))
        .map(|(weight, mut keys)| {
            for ks in keys.iter_mut() {
                ks.sort_by(|a, b| pres.key_degree(a).cmp(&pres.key_degree(b)).then(a.cmp(b)));
            }
            let index = keys.iter().map(|ks| ks.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect()).collect();
            Piece { weight, keys, index }
        })
        .collect();
    let max_dim = pieces.iter().flat_map(|pc| pc.keys.iter().map(|k| k.len())).max().unwrap_or(0);
    if max_dim > params.max_dim {
        return Err(RigidError::Budget { stage: "ambient form lattice", dim: max_dim, cap: params.max_dim });
    }
    let mut dims = vec![vec![0usize; n + 1]; m_max as usize];
    let mut blocks: Vec<Vec<Vec<Vec<Vec<Elem>>>>> = vec![vec![Vec::new(); n + 1]; m_max.saturating_sub(1) as usize];
    let mut offsets = vec![vec![Vec::new(); n + 1]; m_max as usize];
    for piece in &pieces {
        let mut prev: Option<PieceLevel> = None;
        for (mi, span) in spans.iter().enumerate() {
            let cur = engine.level(span, piece, degree_cap, dp)?;
            for l in 0..=n {
                offsets[mi][l].push(dims[mi][l]);
                dims[mi][l] += cur.w[l].reps.len();
            }
            if let Some(pv) = &prev {
                for (l, block) in blocks[mi - 1].iter_mut().enumerate() {
                    block.push(engine.transition(&cur, pv, l)?);
                }
            }
            prev = Some(cur);
        }
    }
    let field = Field::residue(p);
    let transitions = (0..m_max.saturating_sub(1) as usize)
        .map(|i| {
            (0..=n)
                .map(|l| {
                    let mut mat = Matrix::zeros(dims[i][l], dims[i + 1][l]);
                    for (pi, cols) in blocks[i][l].iter().enumerate() {
                        let (r0, c0) = (offsets[i][l][pi], offsets[i + 1][l][pi]);
                        for (j, col) in cols.iter().enumerate() {
                            for (k, &x) in col.iter().enumerate() {
                                mat.set(r0 + k, c0 + j, field.from_i64(x as i64));
                            }
                        }
                    }
                    mat
                })
                .collect()
        })
        .collect();
    Ok(RigidTower { degree_cap, outer_cap: dp, dims, transitions, precision: e, scale, pieces: pieces.len(), skipped_pieces: total - pieces.len(), max_ambient_dim: max_dim })
}

/// One line of the holim check: `dim H^n(holim)` against `lim H^n` and `lim¹ H^{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HolimCheck {
    pub degree_cap: u32,
    pub level_cap: u32,
    pub degree: usize,
    pub holim: usize,
    pub lim: usize,
    pub lim1: usize,
    pub holds: bool,
}

/// Rigid Betti numbers with stabilization over degree caps and level caps.
#[derive(Clone, Debug, Serialize)]
pub struct RigidReport {
    pub betti: BettiReport,
    pub towers: Vec<RigidTower>,
    pub holim_checks: Vec<HolimCheck>,
    pub params: RigidParams,
}

impl RigidReport {
    pub fn holim_consistent(&self) -> bool {
        self.holim_checks.iter().all(|c| c.holds)
    }
}

/// Level `m` at cap `D` as a complex with zero differential whose terms are
/// the cohomology spaces of the lattice model.
pub fn level_complex(pres: &RigidPresentation, params: &RigidParams, degree_cap: u32, m: u32) -> Result<FiniteComplex, RigidError> {
    let t = rigid_tower(pres, params, degree_cap, m)?;
    Ok(FiniteComplex::with_zero_differentials(0, t.dims[m as usize - 1].clone()))
}

/// Towers for every degree cap; the Betti value of a cell `(D, M)` in degree
/// `n` is the rank of `W^n_M → W^n_1`.
pub fn rigid_report(pres: &RigidPresentation, params: &RigidParams, degree_caps: &[u32], m_max: u32, window: usize) -> RigidReport {
    let p = pres.p;
    let mut cells = Vec::new();
    let mut towers = Vec::new();
    let mut checks = Vec::new();
    let mut cert = Certificate { precision: None, slack: 0, ..Certificate::default() };
    for &d in degree_caps {
        match rigid_tower(pres, params, d, m_max) {
            Ok(t) => {
                cert.precision = Some(cert.precision.map_or(t.precision, |x| x.max(t.precision)));
                for m in 1..=m_max {
                    let (dims, error) = match t.stable_image(p, m as usize) {
                        Ok(v) => (Some(v), None),
                        Err(e) => (None, Some(e.to_string())),
                    };
                    cells.push(BettiCell { degree_cap: d, level_cap: m, dims, error });
                }
                if let Ok((_, rows)) = t.holim_dims(p, m_max as usize) {
                    for (n, (h, lim, lim1)) in rows.into_iter().enumerate() {
                        checks.push(HolimCheck { degree_cap: d, level_cap: m_max, degree: n, holim: h, lim, lim1, holds: h == lim + lim1 });
                    }
                }
                towers.push(t);
            }
            Err(e) => {
                for m in 1..=m_max {
                    cells.push(BettiCell { degree_cap: d, level_cap: m, dims: None, error: Some(e.to_string()) });
                }
            }
        }
    }
    let betti = BettiReport::assemble(degree_caps.to_vec(), (1..=m_max).collect(), window, cells, cert);
    RigidReport { betti, towers, holim_checks: checks, params: params.clone() }
}
