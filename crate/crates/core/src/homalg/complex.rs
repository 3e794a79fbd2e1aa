use serde::Serialize;

use super::matrix::{rank, rank_kernel_image, solve, HomalgError, Matrix};
use crate::scalars::Scalar;

/// A bounded cochain complex `C^lo -> ... -> C^hi`.
///
/// `d[k]` maps degree `lo + k` to `lo + k + 1` and acts on column vectors, so
/// it has shape `dims[k+1] x dims[k]`; the last differential is omitted.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteComplex {
    pub lo: i64,
    pub dims: Vec<usize>,
    pub d: Vec<Matrix>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<Vec<String>>,
}

impl FiniteComplex {
    pub fn new(lo: i64, dims: Vec<usize>, d: Vec<Matrix>) -> Result<FiniteComplex, HomalgError> {
        if !dims.is_empty() && d.len() + 1 != dims.len() {
            return Err(HomalgError::Shape(format!("{} differentials for {} degrees", d.len(), dims.len())));
        }
        for (k, m) in d.iter().enumerate() {
            if m.rows != dims[k + 1] || m.cols != dims[k] {
                return Err(HomalgError::Shape(format!("differential {} is {}x{}, expected {}x{}", k, m.rows, m.cols, dims[k + 1], dims[k])));
            }
        }
        Ok(FiniteComplex { lo, dims, d, labels: Vec::new() })
    }

    pub fn zero(lo: i64, len: usize) -> FiniteComplex {
        FiniteComplex::new(lo, vec![0; len], (1..len).map(|_| Matrix::zeros(0, 0)).collect()).unwrap()
    }

    /// Complex with zero differentials and the given dimensions.
    pub fn with_zero_differentials(lo: i64, dims: Vec<usize>) -> FiniteComplex {
        let d = (1..dims.len()).map(|k| Matrix::zeros(dims[k], dims[k - 1])).collect();
        FiniteComplex::new(lo, dims, d).unwrap()
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }

    pub fn dim(&self, deg: i64) -> usize {
        if deg < self.lo || deg > self.hi() {
            0
        } else {
            self.dims[(deg - self.lo) as usize]
        }
    }

    /// Differential out of degree `deg` (a zero map outside the stored range).
    pub fn differential(&self, deg: i64) -> Matrix {
        if deg >= self.lo && deg < self.hi() {
            self.d[(deg - self.lo) as usize].clone()
        } else {
            Matrix::zeros(self.dim(deg + 1), self.dim(deg))
        }
    }

    pub fn check_d_squared(&self) -> Result<(), HomalgError> {
        for k in 1..self.d.len() {
            if !self.d[k].mul(&self.d[k - 1])?.is_zero() {
                return Err(HomalgError::NotAComplex(self.lo + k as i64 - 1));
            }
        }
        Ok(())
    }

    /// `dim H^k = dim ker d^k - rank d^{k-1}` for every stored degree.
    pub fn homology_dims(&self, p: u64, slack: i64) -> Result<Vec<usize>, HomalgError> {
        let ranks = self.d.iter().map(|m| rank(m, p, slack)).collect::<Result<Vec<_>, _>>()?;
        Ok((0..self.dims.len())
            .map(|k| {
                let out = if k < ranks.len() { ranks[k] } else { 0 };
                let inn = if k > 0 { ranks[k - 1] } else { 0 };
                self.dims[k] - out - inn
            })
            .collect())
    }

    /// Cocycle representatives of a basis of `H^deg`.
    pub fn cohomology_basis(&self, deg: i64, p: u64) -> Result<Vec<Vec<Scalar>>, HomalgError> {
        let n = self.dim(deg);
        let z = rank_kernel_image(&self.differential(deg), p, 0)?.kernel;
        let b = rank_kernel_image(&self.differential(deg - 1), p, 0)?.image;
        let mut chosen: Vec<Vec<Scalar>> = b.clone();
        let mut reps = Vec::new();
        for v in z {
            let mut cand = chosen.clone();
            cand.push(v.clone());
            let r = rank(&Matrix::from_columns(&cand, n), p, 0)?;
            if r == cand.len() {
                chosen = cand;
                reps.push(v);
            }
        }
        Ok(reps)
    }

    /// Coordinates of a cocycle in the basis `reps` modulo coboundaries.
    pub fn cohomology_coordinates(&self, deg: i64, reps: &[Vec<Scalar>], z: &[Scalar], p: u64) -> Result<Vec<Scalar>, HomalgError> {
        let n = self.dim(deg);
        let b = rank_kernel_image(&self.differential(deg - 1), p, 0)?.image;
        let mut cols = reps.to_vec();
        cols.extend(b);
        let a = Matrix::from_columns(&cols, n);
        let x = solve(&a, z, p).ok_or(HomalgError::NotInSpan)?;
        Ok(x[..reps.len()].to_vec())
    }
}

/// A finite tower `C_1 <- C_2 <- ... <- C_M` of complexes.
#[derive(Clone, Debug, Serialize)]
pub struct ProComplex {
    pub levels: Vec<FiniteComplex>,
    /// `transitions[i][k]`: degree-`lo+k` part of the map from level `i+2` to level `i+1`.
    pub transitions: Vec<Vec<Matrix>>,
}

impl ProComplex {
    pub fn new(levels: Vec<FiniteComplex>, transitions: Vec<Vec<Matrix>>) -> Result<ProComplex, HomalgError> {
        if levels.is_empty() || transitions.len() + 1 != levels.len() {
            return Err(HomalgError::Shape("need M levels and M-1 transitions".into()));
        }
        let (lo, len) = (levels[0].lo, levels[0].dims.len());
        for l in &levels {
            if l.lo != lo || l.dims.len() != len {
                return Err(HomalgError::Shape("levels with different degree ranges".into()));
            }
        }
        for (i, t) in transitions.iter().enumerate() {
            if t.len() != len {
                return Err(HomalgError::Shape(format!("transition {i} has {} components", t.len())));
            }
            for (k, m) in t.iter().enumerate() {
                if m.rows != levels[i].dims[k] || m.cols != levels[i + 1].dims[k] {
                    return Err(HomalgError::Shape(format!("transition {i} degree {k}")));
                }
            }
        }
        Ok(ProComplex { levels, transitions })
    }

    pub fn constant(c: FiniteComplex, m: usize) -> ProComplex {
        let t: Vec<Matrix> = c.dims.iter().map(|&n| Matrix::identity(n)).collect();
        ProComplex::new(vec![c; m], vec![t; m - 1]).unwrap()
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn check_chain_maps(&self) -> Result<(), HomalgError> {
        for (i, t) in self.transitions.iter().enumerate() {
            let (tgt, src) = (&self.levels[i], &self.levels[i + 1]);
            for k in 0..src.d.len() {
                let a = tgt.d[k].mul(&t[k])?;
                let b = t[k + 1].mul(&src.d[k])?;
                if !a.sub(&b).is_zero() {
                    return Err(HomalgError::NotAChainMap { level: i, degree: src.lo + k as i64 });
                }
            }
        }
        Ok(())
    }

    /// Composite of transitions from level `from` down to level `to` (1-based) in degree index `k`.
    pub fn composite(&self, from: usize, to: usize, k: usize) -> Result<Matrix, HomalgError> {
        let mut m = Matrix::identity(self.levels[from - 1].dims[k]);
        for lvl in (to..from).rev() {
            m = self.transitions[lvl - 1][k].mul(&m)?;
        }
        Ok(m)
    }
}

/// Homotopy limit of a finite tower.
///
/// With `X = prod_{m<=M} C_m`, `Y = prod_{m<M} C_m` and
/// `Phi(x)_m = x_m - sigma(x_{m+1})`, the result is the mapping cone of
/// `Phi: X -> Y` shifted by one: degree `k` is `X^k + Y^(k-1)` with
/// `d(x, y) = (dx, Phi(x) - dy)`.
pub fn holim(pc: &ProComplex) -> Result<FiniteComplex, HomalgError> {
    let lo = pc.levels[0].lo;
    let len = pc.levels[0].dims.len();
    let mm = pc.depth();
    let xdim = |k: usize| -> usize { pc.levels.iter().map(|l| l.dims[k]).sum() };
    let ydim = |k: usize| -> usize { pc.levels[..mm - 1].iter().map(|l| l.dims[k]).sum() };
    // degree index j of the cone corresponds to X^{j} and Y^{j-1}
    let total = len + 1;
    let cdim = |j: usize| -> usize {
        let x = if j < len { xdim(j) } else { 0 };
        let y = if j >= 1 { ydim(j - 1) } else { 0 };
        x + y
    };
    let dims: Vec<usize> = (0..total).map(cdim).collect();
    let mut ds = Vec::new();
    for j in 0..total - 1 {
        let mut m = Matrix::zeros(dims[j + 1], dims[j]);
        let xs = if j < len { xdim(j) } else { 0 };
        let xt = if j + 1 < len { xdim(j + 1) } else { 0 };
        // dX block
        if j + 1 < len {
            let (mut r0, mut c0) = (0, 0);
            for l in &pc.levels {
                m.paste(r0, c0, &l.d[j]);
                r0 += l.dims[j + 1];
                c0 += l.dims[j];
            }
        }
        // Phi block: X^j -> Y^j sits at rows xt.., cols 0..
        if j < len {
            let (mut r0, mut c0) = (xt, 0);
            for lvl in 0..mm - 1 {
                let nm = pc.levels[lvl].dims[j];
                m.paste(r0, c0, &Matrix::identity(nm));
                m.paste(r0, c0 + nm, &pc.transitions[lvl][j].neg());
                r0 += nm;
                c0 += nm;
            }
        }
        // -dY block: Y^{j-1} -> Y^j at rows xt.., cols xs..
        if j >= 1 && j < len {
            let (mut r0, mut c0) = (xt, xs);
            for l in &pc.levels[..mm - 1] {
                m.paste(r0, c0, &l.d[j - 1].neg());
                r0 += l.dims[j];
                c0 += l.dims[j - 1];
            }
        }
        ds.push(m);
    }
    FiniteComplex::new(lo, dims, ds)
}

/// `lim` and `lim^1` of a finite tower of vector spaces, plus the stable image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LimReport {
    pub lim: usize,
    pub lim1: usize,
    /// Rank of the composite from the deepest level to level one.
    pub stable_image: usize,
}

/// `maps[i]: V_{i+2} -> V_{i+1}` with `dims[i] = dim V_{i+1}`.
pub fn lim_lim1(dims: &[usize], maps: &[Matrix], p: u64) -> Result<LimReport, HomalgError> {
    let mm = dims.len();
    if mm == 0 || maps.len() + 1 != mm {
        return Err(HomalgError::Shape("need M spaces and M-1 maps".into()));
    }
    let xdim: usize = dims.iter().sum();
    let ydim: usize = dims[..mm - 1].iter().sum();
    let mut psi = Matrix::zeros(ydim, xdim);
    let (mut r0, mut c0) = (0, 0);
    for i in 0..mm - 1 {
        psi.paste(r0, c0, &Matrix::identity(dims[i]));
        psi.paste(r0, c0 + dims[i], &maps[i].neg());
        r0 += dims[i];
        c0 += dims[i];
    }
    let r = rank(&psi, p, 0)?;
    let mut comp = Matrix::identity(dims[mm - 1]);
    for i in (0..mm - 1).rev() {
        comp = maps[i].mul(&comp)?;
    }
    Ok(LimReport { lim: xdim - r, lim1: ydim - r, stable_image: rank(&comp, p, 0)? })
}

/// Cohomology of every level with the maps induced by the transitions.
pub fn cohomology_tower(pc: &ProComplex, p: u64) -> Result<Vec<(Vec<usize>, Vec<Matrix>)>, HomalgError> {
    let len = pc.levels[0].dims.len();
    let lo = pc.levels[0].lo;
    let mut out = Vec::new();
    for k in 0..len {
        let deg = lo + k as i64;
        let reps: Vec<Vec<Vec<Scalar>>> = pc.levels.iter().map(|l| l.cohomology_basis(deg, p)).collect::<Result<_, _>>()?;
        let dims: Vec<usize> = reps.iter().map(|r| r.len()).collect();
        let mut maps = Vec::new();
        for i in 0..pc.depth() - 1 {
            let mut cols = Vec::new();
            for z in &reps[i + 1] {
                let img = pc.transitions[i][k].apply(z);
                cols.push(pc.levels[i].cohomology_coordinates(deg, &reps[i], &img, p)?);
            }
            maps.push(Matrix::from_columns(&cols, dims[i]));
        }
        out.push((dims, maps));
    }
    Ok(out)
}

/// Check `dim H^n(holim) = dim lim H^n + dim lim^1 H^(n-1)` in every degree.
pub fn holim_bookkeeping(pc: &ProComplex, p: u64) -> Result<Vec<(usize, usize, usize)>, HomalgError> {
    let h = holim(pc)?.homology_dims(p, 0)?;
    let tower = cohomology_tower(pc, p)?;
    let lims: Vec<LimReport> = tower.iter().map(|(d, m)| lim_lim1(d, m, p)).collect::<Result<_, _>>()?;
    Ok((0..h.len())
        .map(|j| {
            let lim = if j < lims.len() { lims[j].lim } else { 0 };
            let lim1 = if j >= 1 && j - 1 < lims.len() { lims[j - 1].lim1 } else { 0 };
            (h[j], lim, lim1)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_homology() {
        let z = FiniteComplex::zero(0, 3);
        assert_eq!(z.homology_dims(5, 0).unwrap(), vec![0, 0, 0]);
        let id = FiniteComplex::new(0, vec![1, 1], vec![Matrix::identity(1)]).unwrap();
        assert_eq!(id.homology_dims(5, 0).unwrap(), vec![0, 0]);
        // 0 -> K^2 -> K -> 0 surjective: in chain indexing H_1 = 1, H_0 = 0
        let s = FiniteComplex::new(0, vec![2, 1], vec![Matrix::from_i64(&[&[1, 1]])]).unwrap();
        assert_eq!(s.homology_dims(5, 0).unwrap(), vec![1, 0]);
    }

    #[test]
    fn holim_of_constant_tower() {
        let c = FiniteComplex::new(0, vec![2, 1], vec![Matrix::from_i64(&[&[1, 0]])]).unwrap();
        let pc = ProComplex::constant(c.clone(), 3);
        let h = holim(&pc).unwrap();
        h.check_d_squared().unwrap();
        let hd = h.homology_dims(5, 0).unwrap();
        assert_eq!(&hd[..2], &c.homology_dims(5, 0).unwrap()[..]);
        assert_eq!(hd[2], 0);
    }

    #[test]
    fn lim_of_zero_and_identity_towers() {
        let z = Matrix::zeros(1, 1);
        let r = lim_lim1(&[1, 1, 1], &[z.clone(), z], 5).unwrap();
        assert_eq!((r.lim1, r.stable_image), (0, 0));
        let i = Matrix::identity(1);
        let r = lim_lim1(&[1, 1, 1], &[i.clone(), i], 5).unwrap();
        assert_eq!((r.lim, r.lim1, r.stable_image), (1, 0, 1));
    }
}
