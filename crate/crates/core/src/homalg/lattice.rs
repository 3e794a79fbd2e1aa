//! Lattices in `Q_p^n` handled through their images in `(Z/p^k)^n`.
//!
//! Elimination always pivots on an entry of globally minimal valuation, so a
//! lattice containing `p^{k-1} Z_p^n` is determined exactly by the result.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::scalars::{invmod, max_precision, mulmod};

/// Ring elements, canonical representatives in `[0, p^k)`.
pub type Elem = u128;

/// The ring `Z/p^k` with `p^k < 2^80`. Moduli below `2^63` use Montgomery
/// multiplication on machine words.
#[derive(Clone, Debug)]
pub struct Zpk {
    p: u64,
    k: u32,
    m: u128,
    fast: bool,
    /// `-m^{-1} mod 2^64` (odd `p`, fast path only)
    minv: u64,
    /// powers `p^j`, `0 <= j <= k`
    pw: Vec<u128>,
    /// divisibility test data: `(p^j)^{-1} mod 2^64` and `floor((2^64-1)/p^j)`
    div: Vec<(u64, u64)>,
}

impl Zpk {
    /// `None` if `p^k >= 2^80`.
    pub fn new(p: u64, k: u32) -> Option<Zpk> {
        if k > max_precision(p) {
            return None;
        }
        let pw: Vec<u128> = (0..=k).map(|j| (p as u128).pow(j)).collect();
        let m = pw[k as usize];
        let fast = m < 1 << 63;
        let inv64 = |a: u64| {
            let mut x: u64 = 1;
            for _ in 0..7 {
                x = x.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(x)));
            }
            x
        };
        let odd = p % 2 == 1;
        let minv = if odd && fast { inv64(m as u64).wrapping_neg() } else { 0 };
        let div = pw.iter().map(|&q| if odd && q < 1 << 64 { (inv64(q as u64), u64::MAX / q as u64) } else { (0, 0) }).collect();
        Some(Zpk { p, k, m, fast, minv, pw, div })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u128 {
        self.m
    }

    pub fn p_pow(&self, j: u32) -> Elem {
        if j >= self.k {
            0
        } else {
            self.pw[j as usize]
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        mulmod(a, b, self.m)
    }

    /// Prepared multiplier for repeated use with [`Zpk::mul_by`].
    #[inline]
    pub fn prepare(&self, f: Elem) -> Elem {
        if self.fast && self.p % 2 == 1 {
            (f << 64) % self.m
        } else {
            f
        }
    }

    /// `a * f` where `pf = prepare(f)`.
    #[inline]
    pub fn mul_by(&self, a: Elem, pf: Elem) -> Elem {
        if !self.fast {
            return mulmod(a, pf, self.m);
        }
        let m = self.m as u64;
        if self.p % 2 == 1 {
            let t = a * pf;
            let q = (t as u64).wrapping_mul(self.minv);
            let r = ((t + q as u128 * m as u128) >> 64) as u64;
            (if r >= m { r - m } else { r }) as u128
        } else {
            ((a as u64).wrapping_mul(pf as u64) & (m - 1)) as u128
        }
    }

    /// Whether `p^j` divides `a` (as a representative in `[0, p^k)`).
    #[inline]
    pub fn divisible(&self, a: Elem, j: u32) -> bool {
        if j == 0 || a == 0 {
            return true;
        }
        if j > self.k {
            return false;
        }
        if self.p == 2 {
            a.trailing_zeros() >= j
        } else if a < 1 << 64 && self.div[j as usize].1 != 0 {
            let (inv, lim) = self.div[j as usize];
            (a as u64).wrapping_mul(inv) <= lim
        } else {
            a % self.pw[j as usize] == 0
        }
    }

    /// Valuation, with `k` standing for zero.
    pub fn val(&self, a: Elem) -> u32 {
        if a == 0 {
            return self.k;
        }
        let mut v = 0;
        while self.divisible(a, v + 1) {
            v += 1;
        }
        v
    }

    /// `a / b` for `ν(a) >= ν(b)`, `b != 0`; the result is determined modulo
    /// `p^{k - ν(b)}` and lifted with zero top digits.
    pub fn div_exact(&self, a: Elem, b: Elem) -> Elem {
        let vb = self.val(b);
        debug_assert!(vb < self.k && self.divisible(a, vb));
        let q = self.pw[vb as usize];
        let inv = invmod(b / q, self.m).expect("unit");
        self.mul(a / q, inv)
    }

    /// Inverse of the unit part of `b`, i.e. of `b / p^ν(b)`.
    pub fn unit_inverse(&self, b: Elem, v: u32) -> Elem {
        invmod(b / self.pw[v as usize], self.m).expect("unit")
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        let m = self.m as i128;
        (n as i128).rem_euclid(m) as u128
    }

    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        n.mod_floor(&BigInt::from(self.m)).to_u128().unwrap()
    }

    /// Reduce an element of another `Z/p^j`, `j >= k`, into this ring.
    pub fn reduce(&self, a: Elem) -> Elem {
        a % self.m
    }

    /// Symmetric representative, for display and tests.
    pub fn signed(&self, a: Elem) -> BigInt {
        let a = BigInt::from(a);
        let m = BigInt::from(self.m);
        if (&a * 2u32) > m {
            a - m
        } else {
            a
        }
    }
}

/// A lattice given by a Hermite-type basis in pivot order. Row `i` vanishes on
/// the pivot columns of rows `< i`.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<Vec<Elem>>,
    /// `(column, valuation)` of each pivot
    pub pivots: Vec<(usize, u32)>,
    pub ncols: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// `Σ ν(pivot)`, plus `k` for each missing rank. Equals the length of
    /// `Z_p^n / (L + p^k Z_p^n)`.
    pub fn colength(&self, ring: &Zpk) -> u64 {
        let s: u64 = self.pivots.iter().map(|&(_, v)| v as u64).sum();
        s + (self.ncols - self.rank()) as u64 * ring.k() as u64
    }

    pub fn max_pivot_valuation(&self) -> Option<u32> {
        self.pivots.iter().map(|&(_, v)| v).max()
    }

    /// Coordinates of `v` in the basis, or `None` if `v` is not in the lattice
    /// modulo `p^k`.
    pub fn coordinates(&self, ring: &Zpk, v: &[Elem]) -> Option<Vec<Elem>> {
        let mut v = v.to_vec();
        let mut out = vec![0; self.rows.len()];
        for (i, (row, &(c, pv))) in self.rows.iter().zip(&self.pivots).enumerate() {
            if v[c] == 0 {
                continue;
            }
            if !ring.divisible(v[c], pv) {
                return None;
            }
            let f = ring.div_exact(v[c], row[c]);
            out[i] = f;
            let pf = ring.prepare(f);
            for (x, &y) in v.iter_mut().zip(row) {
                if y != 0 {
                    *x = ring.sub(*x, ring.mul_by(y, pf));
                }
            }
        }
        v.iter().all(|&x| x == 0).then_some(out)
    }
}

/// Full-pivot elimination of the span of `rows` in `(Z/p^k)^n`.
///
/// Only the first `pivot_cols` columns are eligible for pivots; remaining
/// columns are carried along (used to track transformations).
pub fn echelon_with(ring: &Zpk, rows: Vec<Vec<Elem>>, ncols: usize, pivot_cols: usize) -> (Echelon, Vec<Vec<Elem>>) {
    let mut rest: Vec<Vec<Elem>> = rows.into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect();
    let mut out = Echelon { rows: Vec::new(), pivots: Vec::new(), ncols };
    // every remaining entry is divisible by p^v
    let mut v = 0u32;
    let mut clean = vec![false; rest.len()];
    while v < ring.k() && !rest.is_empty() {
        let mut found = None;
        for (i, r) in rest.iter().enumerate() {
            if clean[i] {
                continue;
            }
            match r[..pivot_cols].iter().position(|&x| x != 0 && !ring.divisible(x, v + 1)) {
                Some(c) => {
                    found = Some((i, c));
                    break;
                }
                None => clean[i] = true,
            }
        }
        let Some((i, c)) = found else {
            v += 1;
            clean.iter_mut().for_each(|x| *x = false);
            continue;
        };
        let prow = rest.swap_remove(i);
        clean.swap_remove(i);
        let pivot = prow[c];
        let unit_inv = ring.unit_inverse(pivot, v);
        let q = ring.p_pow(v);
        let mut keep = Vec::with_capacity(rest.len());
        let mut keep_clean = Vec::with_capacity(rest.len());
        for (mut r, cl) in rest.into_iter().zip(clean) {
            if r[c] != 0 {
                let f = ring.mul(r[c] / q, unit_inv);
                let pf = ring.prepare(f);
                for (x, &y) in r.iter_mut().zip(&prow) {
                    if y != 0 {
                        *x = ring.sub(*x, ring.mul_by(y, pf));
                    }
                }
                debug_assert_eq!(r[c], 0);
                if r.iter().any(|&x| x != 0) {
                    keep.push(r);
                    keep_clean.push(false);
                }
            } else {
                keep.push(r);
                keep_clean.push(cl);
            }
        }
        rest = keep;
        clean = keep_clean;
        out.rows.push(prow);
        out.pivots.push((c, v));
    }
    (out, rest)
}

pub fn echelon(ring: &Zpk, rows: Vec<Vec<Elem>>, ncols: usize) -> Echelon {
    echelon_with(ring, rows, ncols, ncols).0
}

/// Generators of `{x ∈ Z_p^r : x·M ∈ p^k Z_p^t}` modulo `p^k`, where the rows
/// of `m` are the images of the standard basis vectors.
pub fn kernel_mod(ring: &Zpk, m: &[Vec<Elem>], t: usize) -> Vec<Vec<Elem>> {
    let r = m.len();
    let aug: Vec<Vec<Elem>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut a = row.clone();
            a.resize(t + r, 0);
            a[t + i] = 1;
            a
        })
        .collect();
    let (ech, rest) = echelon_with(ring, aug, t + r, t);
    let mut out = Vec::new();
    for (row, &(_, v)) in ech.rows.iter().zip(&ech.pivots) {
        let s = ring.p_pow(ring.k() - v);
        out.push(row[t..].iter().map(|&x| ring.mul(x, s)).collect());
    }
    // rows with vanishing image: the elimination drops only rows that are
    // zero including the tracking block, which cannot happen for unimodular U
    for row in rest {
        out.push(row[t..].to_vec());
    }
    out
}

/// Row vector times matrix (rows of `m`).
pub fn vec_mat(ring: &Zpk, v: &[Elem], m: &[Vec<Elem>], ncols: usize) -> Vec<Elem> {
    let mut out = vec![0; ncols];
    for (&x, row) in v.iter().zip(m) {
        if x == 0 {
            continue;
        }
        let px = ring.prepare(x);
        for (o, &y) in out.iter_mut().zip(row) {
            if y != 0 {
                *o = ring.add(*o, ring.mul_by(y, px));
            }
        }
    }
    out
}

/// Express rational vectors with denominators dividing `p^scale` as integer
/// vectors scaled by `p^scale`; `None` if a denominator is too large.
pub fn scaled_entry(ring: &Zpk, num: &BigInt, den_pow: u32, scale: u32) -> Option<Elem> {
    if den_pow > scale {
        return None;
    }
    let f = BigInt::from(ring.p()).pow(scale - den_pow);
    Some(ring.from_bigint(&(num * f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ring_basics() {
        let r = Zpk::new(5, 27).unwrap();
        assert!(Zpk::new(5, 35).is_none());
        let a = r.from_i64(-7);
        let b = r.from_i64(123456789);
        assert_eq!(r.mul_by(a, r.prepare(b)), r.mul(a, b));
        assert_eq!(r.val(r.from_i64(250)), 3);
        assert_eq!(r.val(0), 27);
        // only determined modulo p^25
        let q = r.div_exact(r.from_i64(-50), r.from_i64(25));
        assert!(r.divisible(r.add(q, 2), 25));
        let two = Zpk::new(2, 10).unwrap();
        assert_eq!(two.mul_by(3, two.prepare(5)), 15);
        assert_eq!(two.val(two.from_i64(-8)), 3);
    }

    #[test]
    fn colength_of_diagonal_lattice() {
        let r = Zpk::new(5, 6).unwrap();
        let rows = vec![vec![25, 0, 0], vec![0, 1, 5], vec![0, 5, 0], vec![0, 0, 0]];
        let e = echelon(&r, rows, 3);
        // span{25 e0, e1 + 5 e2, 5 e1} = span{25 e0, e1 + 5 e2, 25 e2} has index 5^4
        assert_eq!(e.rank(), 3);
        assert_eq!(e.colength(&r), 4);
    }

    #[test]
    fn kernel_modulo() {
        let r = Zpk::new(5, 2).unwrap();
        // x*M ≡ 0 mod 25 for M = [[5],[1]]: x1 ≡ -5 x0
        let k = kernel_mod(&r, &[vec![5], vec![1]], 1);
        let e = echelon(&r, k, 2);
        assert_eq!(e.colength(&r), 2);
        assert!(e.coordinates(&r, &[1, 20]).is_some());
        assert!(e.coordinates(&r, &[1, 0]).is_none());
    }

    proptest! {
        #[test]
        fn montgomery_agrees(a in 0u64..(1 << 62), b in 0u64..(1 << 62)) {
            let r = Zpk::new(5, 26).unwrap();
            let (a, b) = (a as u128 % r.modulus(), b as u128 % r.modulus());
            prop_assert_eq!(r.mul_by(a, r.prepare(b)), r.mul(a, b));
            let wide = Zpk::new(5, 33).unwrap();
            let c = (a << 14) % wide.modulus();
            prop_assert_eq!(wide.mul_by(c, wide.prepare(b)), (BigInt::from(c) * BigInt::from(b) % BigInt::from(wide.modulus())).try_into().unwrap());
        }

        #[test]
        fn echelon_spans_and_coordinates_reconstruct(rows in proptest::collection::vec(proptest::collection::vec(-60i64..60, 4), 1..7)) {
            let r = Zpk::new(3, 8).unwrap();
            let m: Vec<Vec<Elem>> = rows.iter().map(|v| v.iter().map(|&x| r.from_i64(x)).collect()).collect();
            let e = echelon(&r, m.clone(), 4);
            for v in &m {
                let c = e.coordinates(&r, v).expect("generator lies in its span");
                prop_assert_eq!(vec_mat(&r, &c, &e.rows, 4), v.clone());
            }
            // pivot valuations are nondecreasing under full pivoting
            prop_assert!(e.pivots.windows(2).all(|w| w[0].1 <= w[1].1));
        }
    }
}
