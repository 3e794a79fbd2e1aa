//! Scalars of `K = Frac(V)` where `V` is modelled by the p-adic integers.
//!
//! Two backends share one [`Scalar`] type: exact rationals (valuations read
//! off numerator and denominator) and fixed-precision p-adic numbers stored as
//! `unit * p^val` with the unit known modulo `p^prec`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest modulus a p-adic unit may live in. Products are formed in `u128`
/// by splitting one factor into 32-bit chunks, which needs `p^prec < 2^80`.
const MODULUS_BITS: u32 = 80;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("not invertible")]
    NotInvertible,
    #[error("precision {prec} too large for p = {p} (at most {max})")]
    PrecisionTooLarge { p: u64, prec: u32, max: u32 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("mixed primes {0} and {1}")]
    PrimeMismatch(u64, u64),
}

/// A valuation: an integer, or `+inf` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn add(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }

    /// Clamp to an integer, mapping `+inf` to `cap`.
    pub fn min_with(self, cap: i64) -> i64 {
        match self {
            Valuation::Finite(v) => v.min(cap),
            Valuation::Infinite => cap,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("+inf"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest `prec` with `p^prec < 2^80`.
pub fn max_precision(p: u64) -> u32 {
    let mut n = 0;
    let mut acc: u128 = 1;
    while let Some(next) = acc.checked_mul(p as u128) {
        if next >> MODULUS_BITS != 0 {
            break;
        }
        acc = next;
        n += 1;
    }
    n
}

pub fn pow_u128(p: u64, e: u32) -> u128 {
    (p as u128).pow(e)
}

/// `a * b mod m` for `m < 2^80`.
pub fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a * b) % m;
    }
    let mut r = 0u128;
    for shift in [64u32, 32, 0] {
        let chunk = (b >> shift) & 0xFFFF_FFFF;
        r = ((r << 32) + a * chunk) % m;
    }
    r
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn invmod(a: u128, m: u128) -> Option<u128> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u128)
}

/// p-adic valuation of a nonzero integer, together with the cofactor.
pub fn split_bigint(n: &BigInt, p: u64) -> (i64, BigInt) {
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut n = n.clone();
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return (v, n);
        }
        n = q;
        v += 1;
    }
}

pub fn rational_valuation(q: &BigRational, p: u64) -> Valuation {
    if q.is_zero() {
        return Valuation::Infinite;
    }
    let (a, _) = split_bigint(q.numer(), p);
    let (b, _) = split_bigint(q.denom(), p);
    Valuation::Finite(a - b)
}

fn bigint_mod(n: &BigInt, m: u128) -> u128 {
    n.mod_floor(&BigInt::from(m)).to_u128().unwrap()
}

/// Fixed-precision p-adic number `unit * p^val`, unit known mod `p^prec`.
///
/// A value whose known digits all vanish is a zero at absolute precision
/// `val` (`unit = 0`, `prec = 0`); the exact zero has `val = i64::MAX`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PAdic {
    p: u64,
    cap: u32,
    prec: u32,
    val: i64,
    unit: u128,
}

impl PAdic {
    pub fn zero(p: u64, cap: u32) -> PAdic {
        PAdic { p, cap, prec: 0, val: i64::MAX, unit: 0 }
    }

    pub fn one(p: u64, cap: u32) -> PAdic {
        PAdic::from_i64(1, p, cap)
    }

    pub fn from_i64(n: i64, p: u64, cap: u32) -> PAdic {
        PAdic::from_rational(&BigRational::from_integer(BigInt::from(n)), p, cap)
    }

    pub fn from_rational(q: &BigRational, p: u64, cap: u32) -> PAdic {
        if q.is_zero() {
            return PAdic::zero(p, cap);
        }
        let (vn, n) = split_bigint(q.numer(), p);
        let (vd, d) = split_bigint(q.denom(), p);
        let m = pow_u128(p, cap);
        let unit = mulmod(bigint_mod(&n, m), invmod(bigint_mod(&d, m), m).unwrap(), m);
        PAdic { p, cap, prec: cap, val: vn - vd, unit }
    }

    /// Build from raw parts; the unit is reduced and normalised.
    pub fn from_parts(unit: u128, val: i64, prec: u32, p: u64, cap: u32) -> PAdic {
        PAdic::normalise(p, cap, val, unit, prec)
    }

    fn normalise(p: u64, cap: u32, mut val: i64, mut unit: u128, mut prec: u32) -> PAdic {
        let prec0 = prec.min(cap);
        prec = prec0;
        unit %= pow_u128(p, prec);
        if unit == 0 {
            return PAdic { p, cap, prec: 0, val: val.saturating_add(prec0 as i64), unit: 0 };
        }
        while unit % p as u128 == 0 {
            unit /= p as u128;
            val += 1;
            prec -= 1;
        }
        PAdic { p, cap, prec, val, unit }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Number of known digits of the unit.
    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn unit(&self) -> u128 {
        self.unit
    }

    pub fn is_zero(&self) -> bool {
        self.unit == 0
    }

    pub fn is_exact_zero(&self) -> bool {
        self.unit == 0 && self.val == i64::MAX
    }

    pub fn valuation(&self) -> Valuation {
        if self.is_zero() {
            Valuation::Infinite
        } else {
            Valuation::Finite(self.val)
        }
    }

    /// The value is known modulo `p^absolute_precision`.
    pub fn absolute_precision(&self) -> i64 {
        if self.is_zero() {
            self.val
        } else {
            self.val + self.prec as i64
        }
    }

    fn modulus(&self) -> u128 {
        pow_u128(self.p, self.prec)
    }

    pub fn neg(&self) -> PAdic {
        if self.is_zero() {
            return *self;
        }
        let m = self.modulus();
        PAdic { unit: (m - self.unit) % m, ..*self }
    }

    pub fn add(&self, o: &PAdic) -> PAdic {
        debug_assert_eq!(self.p, o.p);
        let cap = self.cap.max(o.cap);
        let abs = self.absolute_precision().min(o.absolute_precision());
        if self.is_zero() && o.is_zero() {
            return PAdic { p: self.p, cap, prec: 0, val: abs, unit: 0 };
        }
        let (lo, hi) = if o.is_zero() || (!self.is_zero() && self.val <= o.val) {
            (self, o)
        } else {
            (o, self)
        };
        let base = lo.val;
        if abs <= base {
            return PAdic { p: self.p, cap, prec: 0, val: abs, unit: 0 };
        }
        let width = (abs - base) as u32;
        let m = pow_u128(self.p, width);
        let mut u = lo.unit % m;
        if !hi.is_zero() && hi.val < abs {
            let shift = (hi.val - base) as u32;
            let h = mulmod(hi.unit % m, pow_u128(self.p, shift) % m, m);
            u = (u + h) % m;
        }
        PAdic::normalise(self.p, cap, base, u, width)
    }

    pub fn sub(&self, o: &PAdic) -> PAdic {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &PAdic) -> PAdic {
        debug_assert_eq!(self.p, o.p);
        let cap = self.cap.max(o.cap);
        match (self.is_zero(), o.is_zero()) {
            (false, false) => {
                let prec = self.prec.min(o.prec);
                let m = pow_u128(self.p, prec);
                let unit = mulmod(self.unit % m, o.unit % m, m);
                PAdic { p: self.p, cap, prec, val: self.val + o.val, unit }
            }
            _ if self.is_exact_zero() || o.is_exact_zero() => PAdic::zero(self.p, cap),
            _ => PAdic::zero(self.p, cap).with_zero_val(self.val + o.val),
        }
    }

    fn with_zero_val(mut self, v: i64) -> PAdic {
        self.val = v;
        self
    }

    pub fn inv(&self) -> Result<PAdic, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::NotInvertible);
        }
        let m = self.modulus();
        let unit = if self.unit % self.p as u128 == 1 && self.prec > 0 {
            geometric_inverse(self.unit, self.p, self.prec)
        } else {
            invmod(self.unit, m).ok_or(ScalarError::NotInvertible)?
        };
        Ok(PAdic { unit, val: -self.val, ..*self })
    }

    pub fn div(&self, o: &PAdic) -> Result<PAdic, ScalarError> {
        Ok(self.mul(&o.inv()?))
    }

    /// Smallest non-negative integer lift of `unit * p^val` when `val >= 0`,
    /// otherwise the rational `unit / p^-val`.
    pub fn to_rational(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let u = BigRational::from_integer(BigInt::from(self.unit));
        let pp = BigRational::from_integer(BigInt::from(self.p));
        if self.val >= 0 {
            u * pp.pow(self.val as i32)
        } else {
            u / pp.pow((-self.val) as i32)
        }
    }
}

/// `u^{-1} mod p^prec` for `u = 1 - w`, `p | w`, via `sum_{j<prec} w^j`.
fn geometric_inverse(u: u128, p: u64, prec: u32) -> u128 {
    let m = pow_u128(p, prec);
    let w = (m + 1 - u % m) % m;
    let mut acc = 0u128;
    let mut term = 1u128 % m;
    for _ in 0..prec {
        acc = (acc + term) % m;
        term = mulmod(term, w, m);
    }
    acc
}

/// Which arithmetic a computation runs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Backend {
    Rational,
    Padic { precision: u32 },
}

/// A prime together with a backend; creates scalars.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    pub p: u64,
    pub backend: Backend,
}

impl Field {
    pub fn rational(p: u64) -> Field {
        Field { p, backend: Backend::Rational }
    }

    pub fn padic(p: u64, precision: u32) -> Result<Field, ScalarError> {
        if !is_prime(p) {
            return Err(ScalarError::NotPrime(p));
        }
        let max = max_precision(p);
        if precision == 0 || precision > max {
            return Err(ScalarError::PrecisionTooLarge { p, prec: precision, max });
        }
        Ok(Field { p, backend: Backend::Padic { precision } })
    }

    /// `F_p`, represented as p-adic numbers of precision one.
    pub fn residue(p: u64) -> Field {
        Field { p, backend: Backend::Padic { precision: 1 } }
    }

    pub fn from_rational(&self, q: &BigRational) -> Scalar {
        match self.backend {
            Backend::Rational => Scalar::Rational(q.clone()),
            Backend::Padic { precision } => Scalar::PAdic(PAdic::from_rational(q, self.p, precision)),
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        self.from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    /// `p^e` for any integer `e`.
    pub fn p_power(&self, e: i64) -> Scalar {
        let p = BigRational::from_integer(BigInt::from(self.p));
        let q = if e >= 0 { p.pow(e as i32) } else { p.pow(-e as i32).recip() };
        self.from_rational(&q)
    }

    pub fn convert(&self, x: &Scalar) -> Scalar {
        match (x, self.backend) {
            (Scalar::Rational(q), _) => self.from_rational(q),
            (Scalar::PAdic(a), Backend::Padic { .. }) => Scalar::PAdic(*a),
            (Scalar::PAdic(a), Backend::Rational) => Scalar::Rational(a.to_rational()),
        }
    }
}

/// An element of `K` in either backend.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    PAdic(PAdic),
}

impl Scalar {
    pub fn from_i64(n: i64) -> Scalar {
        Scalar::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(n: i64, d: i64) -> Scalar {
        Scalar::Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Scalar {
        Scalar::from_i64(0)
    }

    pub fn one() -> Scalar {
        Scalar::from_i64(1)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::PAdic(a) => a.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::PAdic(a) => !a.is_zero() && a.val == 0 && a.unit == 1,
        }
    }

    /// `p`-adic valuation; `p` is ignored for p-adic scalars.
    pub fn valuation(&self, p: u64) -> Valuation {
        match self {
            Scalar::Rational(q) => rational_valuation(q, p),
            Scalar::PAdic(a) => a.valuation(),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::PAdic(_) => None,
        }
    }

    pub fn to_rational(&self) -> BigRational {
        match self {
            Scalar::Rational(q) => q.clone(),
            Scalar::PAdic(a) => a.to_rational(),
        }
    }

    fn coerce<'a>(a: &'a Scalar, b: &'a Scalar) -> (PAdic, PAdic) {
        match (a, b) {
            (Scalar::PAdic(x), Scalar::PAdic(y)) => (*x, *y),
            (Scalar::PAdic(x), Scalar::Rational(q)) => (*x, PAdic::from_rational(q, x.p, x.cap)),
            (Scalar::Rational(q), Scalar::PAdic(y)) => (PAdic::from_rational(q, y.p, y.cap), *y),
            _ => unreachable!(),
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        if let (Scalar::Rational(a), Scalar::Rational(b)) = (self, o) {
            return Scalar::Rational(a + b);
        }
        let (x, y) = Scalar::coerce(self, o);
        Scalar::PAdic(x.add(&y))
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        if let (Scalar::Rational(a), Scalar::Rational(b)) = (self, o) {
            return Scalar::Rational(a - b);
        }
        let (x, y) = Scalar::coerce(self, o);
        Scalar::PAdic(x.sub(&y))
    }

    /// Product; coerces a rational operand into the p-adic backend.
    pub fn mul(&self, o: &Scalar) -> Scalar {
        if let (Scalar::Rational(a), Scalar::Rational(b)) = (self, o) {
            return Scalar::Rational(a * b);
        }
        let (x, y) = Scalar::coerce(self, o);
        Scalar::PAdic(x.mul(&y))
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::PAdic(a) => Scalar::PAdic(a.neg()),
        }
    }

    pub fn invert(&self) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Rational(q) => {
                if q.is_zero() {
                    Err(ScalarError::NotInvertible)
                } else {
                    Ok(Scalar::Rational(q.recip()))
                }
            }
            Scalar::PAdic(a) => Ok(Scalar::PAdic(a.inv()?)),
        }
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.mul(&o.invert()?))
    }

    pub fn is_integral(&self, p: u64) -> bool {
        self.valuation(p) >= Valuation::Finite(0)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::PAdic(a) => {
                if a.is_zero() {
                    write!(f, "O({}^{})", a.p, a.val)
                } else {
                    write!(f, "{}*{}^{} + O({}^{})", a.unit, a.p, a.val, a.p, a.absolute_precision())
                }
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Valuation of a product equals the sum of valuations.
pub fn valuation_of_product(x: &Scalar, y: &Scalar, p: u64) -> Valuation {
    x.valuation(p).add(y.valuation(p))
}

/// Compare `|x|` and `|y|` through valuations (`epsilon` stays symbolic).
pub fn cmp_abs(x: &Scalar, y: &Scalar, p: u64) -> Ordering {
    y.valuation(p).cmp(&x.valuation(p))
}

/// Unsigned representative in `[0, p^n)` of an integral rational.
pub fn residue_mod_pn(q: &BigRational, p: u64, n: u32) -> Option<u128> {
    if q.is_zero() {
        return Some(0);
    }
    let m = pow_u128(p, n);
    let d = bigint_mod(q.denom(), m);
    let inv = invmod(d, m)?;
    Some(mulmod(bigint_mod(q.numer(), m), inv, m))
}

/// `|q|` as an `i64` when it fits.
pub fn small_abs(q: &BigRational) -> Option<i64> {
    if q.is_integer() {
        q.numer().abs().to_i64()
    } else {
        None
    }
}
