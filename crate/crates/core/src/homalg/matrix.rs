use serde::Serialize;
use thiserror::Error;

use crate::scalars::{Scalar, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomalgError {
    #[error("precision exhausted: pivot of valuation {pivot} within {slack} of the noise floor {floor}")]
    PrecisionExhausted { pivot: i64, floor: i64, slack: i64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("d∘d ≠ 0 in degree {0}")]
    NotAComplex(i64),
    #[error("transition {level} does not commute with the differential in degree {degree}")]
    NotAChainMap { level: usize, degree: i64 },
    #[error("vector is not in the span")]
    NotInSpan,
}

/// Dense matrix over [`Scalar`], row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_string()).collect()).collect();
        rows.serialize(s)
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        Matrix::from_rows_with_cols(rows, c).unwrap_or_else(|| panic!("ragged rows ({r} rows)"))
    }

    pub fn from_rows_with_cols(rows: Vec<Vec<Scalar>>, cols: usize) -> Option<Matrix> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return None;
            }
            data.extend(row);
        }
        Some(Matrix { rows: r, cols, data })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::from_i64(x)).collect()).collect())
    }

    pub fn from_columns(cols: &[Vec<Scalar>], rows: usize) -> Matrix {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, o: &Matrix) -> Result<Matrix, HomalgError> {
        if self.cols != o.rows {
            return Err(HomalgError::Shape(format!("{}x{} * {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let mut r = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = r.get(i, j).add(&a.mul(b));
                        r.set(i, j, v);
                    }
                }
            }
        }
        Ok(r)
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn neg(&self) -> Matrix {
        self.map(|x| x.neg())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Copy `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }
}

/// Result of an elimination: rank, kernel and image bases, pivot certificate.
#[derive(Clone, Debug)]
pub struct RankReport {
    pub rank: usize,
    /// Column vectors spanning the kernel.
    pub kernel: Vec<Vec<Scalar>>,
    /// Columns of the input spanning the image.
    pub image: Vec<Vec<Scalar>>,
    pub pivot_columns: Vec<usize>,
    pub min_pivot_valuation: Option<i64>,
    pub max_pivot_valuation: Option<i64>,
    /// Lowest absolute precision among entries discarded as zero (p-adic only).
    pub noise_floor: Option<i64>,
}

fn val_of(x: &Scalar, p: u64) -> Valuation {
    x.valuation(p)
}

fn noise(x: &Scalar) -> Option<i64> {
    match x {
        Scalar::PAdic(a) if a.is_zero() && !a.is_exact_zero() => Some(a.absolute_precision()),
        _ => None,
    }
}

/// Rank, kernel and image with full pivoting on minimal valuation.
///
/// For p-adic input every accepted pivot must lie at least `slack` digits
/// above the lowest absolute precision of an entry that was discarded as
/// zero; otherwise the rank cannot be certified.
pub fn rank_kernel_image(m: &Matrix, p: u64, slack: i64) -> Result<RankReport, HomalgError> {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<Vec<Scalar>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row_used = vec![false; rows];
    let mut col_used = vec![false; cols];
    let (mut vmin, mut vmax): (Option<i64>, Option<i64>) = (None, None);
    loop {
        let mut best: Option<(Valuation, usize, usize)> = None;
        for (i, row) in a.iter().enumerate() {
            if row_used[i] {
                continue;
            }
            for (j, x) in row.iter().enumerate() {
                if col_used[j] || x.is_zero() {
                    continue;
                }
                let v = val_of(x, p);
                if best.map_or(true, |b| v < b.0) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        let v = v.finite().unwrap();
        vmin = Some(vmin.map_or(v, |x: i64| x.min(v)));
        vmax = Some(vmax.map_or(v, |x: i64| x.max(v)));
        row_used[pi] = true;
        col_used[pj] = true;
        pivots.push((pi, pj));
        let piv = a[pi][pj].clone();
        let prow = a[pi].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == pi || row[pj].is_zero() {
                continue;
            }
            let f = row[pj].div(&piv).expect("nonzero pivot");
            for j in 0..cols {
                if !prow[j].is_zero() {
                    row[j] = row[j].sub(&f.mul(&prow[j]));
                }
            }
            row[pj] = Scalar::zero();
        }
    }
    let mut floor: Option<i64> = None;
    for f in a.iter().enumerate().filter(|(i, _)| !row_used[*i]).flat_map(|(_, r)| r.iter()).filter_map(noise) {
        floor = Some(floor.map_or(f, |g: i64| g.min(f)));
    }
    if let (Some(fl), Some(vx)) = (floor, vmax) {
        if vx > fl - slack {
            return Err(HomalgError::PrecisionExhausted { pivot: vx, floor: fl, slack });
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, j)| j).collect();
    let mut kernel = Vec::new();
    for f in 0..cols {
        if col_used[f] {
            continue;
        }
        let mut x = vec![Scalar::zero(); cols];
        x[f] = Scalar::one();
        for &(pi, pj) in &pivots {
            let c = a[pi][f].clone();
            if !c.is_zero() {
                x[pj] = c.div(&a[pi][pj]).unwrap().neg();
            }
        }
        kernel.push(x);
    }
    let mut sorted_cols = pivot_cols.clone();
    sorted_cols.sort();
    let image = sorted_cols.iter().map(|&j| m.column(j)).collect();
    Ok(RankReport {
        rank: pivots.len(),
        kernel,
        image,
        pivot_columns: sorted_cols,
        min_pivot_valuation: vmin,
        max_pivot_valuation: vmax,
        noise_floor: floor,
    })
}

pub fn rank(m: &Matrix, p: u64, slack: i64) -> Result<usize, HomalgError> {
    Ok(rank_kernel_image(m, p, slack)?.rank)
}

/// Solve `A x = b` (any solution), or `None` when inconsistent.
pub fn solve(a: &Matrix, b: &[Scalar], p: u64) -> Option<Vec<Scalar>> {
    let mut aug = Matrix::zeros(a.rows, a.cols + 1);
    aug.paste(0, 0, a);
    for (i, x) in b.iter().enumerate() {
        aug.set(i, a.cols, x.clone());
    }
    let rows: Vec<Vec<Scalar>> = (0..aug.rows).map(|i| aug.row(i).to_vec()).collect();
    let mut r = rows;
    let n = a.cols;
    let mut piv_of_row: Vec<Option<usize>> = vec![None; r.len()];
    let mut used = vec![false; r.len()];
    for j in 0..n {
        let best = (0..r.len()).filter(|&i| !used[i] && !r[i][j].is_zero()).min_by_key(|&i| r[i][j].valuation(p));
        let Some(pi) = best else { continue };
        used[pi] = true;
        piv_of_row[pi] = Some(j);
        let prow = r[pi].clone();
        for (i, row) in r.iter_mut().enumerate() {
            if i == pi || row[j].is_zero() {
                continue;
            }
            let f = row[j].div(&prow[j]).unwrap();
            for k in 0..=n {
                if !prow[k].is_zero() {
                    row[k] = row[k].sub(&f.mul(&prow[k]));
                }
            }
        }
    }
    let mut x = vec![Scalar::zero(); n];
    for (i, row) in r.iter().enumerate() {
        match piv_of_row[i] {
            Some(j) => x[j] = row[n].div(&row[j]).unwrap(),
            None => {
                if !row[n].is_zero() {
                    return None;
                }
            }
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Field;

    #[test]
    fn small_ranks() {
        assert_eq!(rank(&Matrix::identity(3), 5, 4).unwrap(), 3);
        let m = Matrix::from_i64(&[&[5, 1], &[0, 0]]);
        assert_eq!(rank(&m, 5, 4).unwrap(), 1);
        let r = rank_kernel_image(&m, 5, 4).unwrap();
        assert_eq!(r.kernel.len(), 1);
        assert!(m.apply(&r.kernel[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn padic_rank_with_certificate() {
        let f = Field::padic(5, 12).unwrap();
        let m = Matrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[25, 0, 1]]).map(|x| f.convert(x));
        let r = rank_kernel_image(&m, 5, 4).unwrap();
        assert_eq!(r.rank, 2);
        assert!(r.noise_floor.unwrap() >= 12);
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = Matrix::from_i64(&[&[1, 1], &[1, 1]]);
        assert!(solve(&a, &[Scalar::from_i64(2), Scalar::from_i64(2)], 5).is_some());
        assert!(solve(&a, &[Scalar::from_i64(2), Scalar::from_i64(3)], 5).is_none());
    }
}
