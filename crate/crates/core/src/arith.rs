//! Exact rationals and outward-rounded interval enclosures.
//!
//! Every quantity the strategy manipulates directly (centers, radii, widths,
//! heights, the constants) is an exact [`ExactScalar`]. Transcendental
//! expressions such as `q^λ`, `e^{√ρ}` and `log H` are evaluated as
//! [`CertInterval`]s whose endpoints are rationals rounded outward, so the
//! true real value always lies inside. Strict inequalities between the two
//! are decided by [`Precision::decide`], which doubles the working precision
//! until the answer is certain or the cap is hit.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational scalar. `num_rational` keeps it reduced with a positive
/// denominator.
pub type ExactScalar = BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"n/d"` or `"n"` (optionally signed). Anything else, including
/// decimal or scientific notation and symbolic constants, is rejected.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let parse_int = |x: &str| -> Result<BigInt> {
        let x = x.trim();
        let digits = x.strip_prefix(['-', '+']).unwrap_or(x);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("not a rational literal: {s:?}")));
        }
        x.parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    };
    match t.split_once('/') {
        Some((n, d)) => {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(parse_int(t)?)),
    }
}

/// Canonical `numerator/denominator` form, denominator always written.
pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Precision schedule for certified decisions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision {
    pub start: u32,
    pub cap: u32,
}

static DEFAULT_CAP: AtomicU32 = AtomicU32::new(8192);

/// Process-wide cap used by `Precision::default()`.
pub fn set_default_precision_cap(bits: u32) {
    DEFAULT_CAP.store(bits.max(16), AtomicOrdering::Relaxed);
}

pub fn default_precision_cap() -> u32 {
    DEFAULT_CAP.load(AtomicOrdering::Relaxed)
}

impl Default for Precision {
    fn default() -> Self {
        let cap = default_precision_cap();
        Precision {
            start: 128.min(cap),
            cap,
        }
    }
}

impl Precision {
    pub fn with_cap(cap: u32) -> Self {
        let start = Precision::default().start.min(cap);
        Precision { start, cap }
    }

    /// Runs `f` at increasing precision until it returns a decision.
    pub fn decide<F>(&self, what: &str, mut f: F) -> Result<bool>
    where
        F: FnMut(u32) -> Result<Option<bool>>,
    {
        let mut bits = self.start.max(16);
        loop {
            if let Some(answer) = f(bits)? {
                return Ok(answer);
            }
            if bits >= self.cap {
                return Err(Error::PrecisionExhausted {
                    bits,
                    what: what.to_string(),
                });
            }
            bits = bits.saturating_mul(2).min(self.cap);
        }
    }

    /// Decides `lhs <= value` where `value` is enclosed by `f(bits)`.
    pub fn le<F>(&self, what: &str, lhs: &BigRational, mut f: F) -> Result<bool>
    where
        F: FnMut(u32) -> Result<CertInterval>,
    {
        self.decide(what, |bits| {
            Ok(match f(bits)?.cmp_rational(lhs) {
                Some(Ordering::Greater) | Some(Ordering::Equal) => Some(true),
                Some(Ordering::Less) => Some(false),
                None => None,
            })
        })
    }

    /// Decides `lhs < value` where `value` is enclosed by `f(bits)`.
    pub fn lt<F>(&self, what: &str, lhs: &BigRational, mut f: F) -> Result<bool>
    where
        F: FnMut(u32) -> Result<CertInterval>,
    {
        self.decide(what, |bits| {
            Ok(match f(bits)?.cmp_rational(lhs) {
                Some(Ordering::Greater) => Some(true),
                Some(Ordering::Less) | Some(Ordering::Equal) => Some(false),
                None => None,
            })
        })
    }
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

/// `floor(x * 2^s)`, `s` may be negative.
fn floor_scaled(x: &BigRational, s: i64) -> BigInt {
    let (n, d) = (x.numer(), x.denom());
    if s >= 0 {
        (n << (s as u64)).div_floor(d)
    } else {
        n.div_floor(&(d << ((-s) as u64)))
    }
}

fn from_scaled(m: BigInt, s: i64) -> BigRational {
    if s >= 0 {
        BigRational::new(m, pow2(s as u64))
    } else {
        BigRational::from_integer(m << ((-s) as u64))
    }
}

/// Binary exponent `e` with `2^(e-1) <= |x| < 2^(e+1)`, roughly.
fn magnitude(x: &BigRational) -> i64 {
    x.numer().bits() as i64 - x.denom().bits() as i64
}

fn is_small(x: &BigRational, bits: u32) -> bool {
    x.numer().bits() + x.denom().bits() <= 2 * bits as u64 + 64
}

/// Largest dyadic with `bits` significant bits that is `<= x`. Small
/// rationals are kept exact.
pub(crate) fn round_down(x: &BigRational, bits: u32) -> BigRational {
    if x.is_zero() || is_small(x, bits) {
        return x.clone();
    }
    let s = bits as i64 - magnitude(x) + 1;
    from_scaled(floor_scaled(x, s), s)
}

pub(crate) fn round_up(x: &BigRational, bits: u32) -> BigRational {
    -round_down(&-x, bits)
}

/// Closed interval `[lo, hi]` with rational endpoints enclosing a real value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertInterval {
    lo: BigRational,
    hi: BigRational,
    bits: u32,
}

/// Outcome of comparing two enclosures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    Less,
    Greater,
    Undecided,
}

/// `Less` iff every point of `lhs` is below every point of `rhs`, and so on.
pub fn cert_compare(lhs: &CertInterval, rhs: &CertInterval) -> Comparison {
    if lhs.hi < rhs.lo {
        Comparison::Less
    } else if lhs.lo > rhs.hi {
        Comparison::Greater
    } else {
        Comparison::Undecided
    }
}

impl CertInterval {
    pub fn new(lo: BigRational, hi: BigRational, bits: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::invalid(format!(
                "interval lower bound {} exceeds upper bound {}",
                format_rational(&lo),
                format_rational(&hi)
            )));
        }
        Ok(CertInterval { lo, hi, bits })
    }

    /// Rounds `lo` down and `hi` up to `bits` significant bits.
    pub fn enclose(lo: &BigRational, hi: &BigRational, bits: u32) -> Self {
        debug_assert!(lo <= hi);
        CertInterval {
            lo: round_down(lo, bits),
            hi: round_up(hi, bits),
            bits,
        }
    }

    pub fn point(x: BigRational, bits: u32) -> Self {
        CertInterval {
            lo: x.clone(),
            hi: x,
            bits,
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &CertInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &CertInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / int(2)
    }

    /// `Some(Equal)` only for a point interval equal to `r`.
    pub fn cmp_rational(&self, r: &BigRational) -> Option<Ordering> {
        if &self.hi < r {
            Some(Ordering::Less)
        } else if &self.lo > r {
            Some(Ordering::Greater)
        } else if self.is_point() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    fn out_bits(&self, other: &CertInterval) -> u32 {
        self.bits.min(other.bits)
    }

    pub fn add(&self, other: &CertInterval) -> CertInterval {
        let b = self.out_bits(other);
        CertInterval::enclose(&(&self.lo + &other.lo), &(&self.hi + &other.hi), b)
    }

    pub fn sub(&self, other: &CertInterval) -> CertInterval {
        let b = self.out_bits(other);
        CertInterval::enclose(&(&self.lo - &other.hi), &(&self.hi - &other.lo), b)
    }

    pub fn neg(&self) -> CertInterval {
        CertInterval {
            lo: -&self.hi,
            hi: -&self.lo,
            bits: self.bits,
        }
    }

    pub fn mul(&self, other: &CertInterval) -> CertInterval {
        let b = self.out_bits(other);
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().unwrap();
        let hi = products.iter().max().unwrap();
        CertInterval::enclose(lo, hi, b)
    }

    pub fn scale(&self, k: &BigRational) -> CertInterval {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if a <= b {
            CertInterval::enclose(&a, &b, self.bits)
        } else {
            CertInterval::enclose(&b, &a, self.bits)
        }
    }

    pub fn add_rational(&self, k: &BigRational) -> CertInterval {
        CertInterval::enclose(&(&self.lo + k), &(&self.hi + k), self.bits)
    }

    pub fn recip(&self) -> Result<CertInterval> {
        if self.lo.is_positive() || self.hi.is_negative() {
            Ok(CertInterval::enclose(
                &self.hi.recip(),
                &self.lo.recip(),
                self.bits,
            ))
        } else {
            Err(Error::invalid("reciprocal of an interval containing 0"))
        }
    }

    pub fn div(&self, other: &CertInterval) -> Result<CertInterval> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn abs(&self) -> CertInterval {
        if self.lo.is_negative() && self.hi.is_positive() {
            let hi = (-&self.lo).max(self.hi.clone());
            CertInterval {
                lo: BigRational::zero(),
                hi,
                bits: self.bits,
            }
        } else if self.hi.is_negative() || self.hi.is_zero() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn square(&self) -> CertInterval {
        let a = self.abs();
        CertInterval::enclose(&(&a.lo * &a.lo), &(&a.hi * &a.hi), self.bits)
    }

    pub fn max(&self, other: &CertInterval) -> CertInterval {
        CertInterval {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            bits: self.out_bits(other),
        }
    }

    pub fn min(&self, other: &CertInterval) -> CertInterval {
        CertInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
            bits: self.out_bits(other),
        }
    }

    pub fn sqrt(&self) -> Result<CertInterval> {
        if self.lo.is_negative() {
            return Err(Error::invalid("square root of a negative interval"));
        }
        let w = self.bits + 8;
        let lo = sqrt_bounds(&self.lo, w).0;
        let hi = sqrt_bounds(&self.hi, w).1;
        Ok(CertInterval::enclose(&lo, &hi, self.bits))
    }

    pub fn exp(&self) -> CertInterval {
        let w = self.bits + 16;
        let lo = exp_bounds(&self.lo, w).0;
        let hi = exp_bounds(&self.hi, w).1;
        CertInterval::enclose(&lo, &hi, self.bits)
    }

    pub fn ln(&self) -> Result<CertInterval> {
        if !self.lo.is_positive() {
            return Err(Error::invalid("logarithm of a non-positive interval"));
        }
        let w = self.bits + 16;
        let lo = ln_bounds(&self.lo, w).0;
        let hi = ln_bounds(&self.hi, w).1;
        Ok(CertInterval::enclose(&lo, &hi, self.bits))
    }

    pub fn to_f64_mid(&self) -> f64 {
        to_f64(&self.midpoint())
    }
}

impl fmt::Display for CertInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.17e}, {:.17e}]@{}",
            to_f64(&self.lo),
            to_f64(&self.hi),
            self.bits
        )
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: String,
    hi: String,
    bits: u32,
}

impl Serialize for CertInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntervalRepr {
            lo: format_rational(&self.lo),
            hi: format_rational(&self.hi),
            bits: self.bits,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CertInterval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = IntervalRepr::deserialize(d)?;
        let lo = parse_rational(&r.lo).map_err(D::Error::custom)?;
        let hi = parse_rational(&r.hi).map_err(D::Error::custom)?;
        CertInterval::new(lo, hi, r.bits).map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Transcendental kernels. All return (lower, upper) rational bounds.

/// Bounds on `e^x` with roughly `w` correct bits.
pub(crate) fn exp_bounds(x: &BigRational, w: u32) -> (BigRational, BigRational) {
    if x.is_zero() {
        return (BigRational::one(), BigRational::one());
    }
    if x.is_negative() {
        let (lo, hi) = exp_bounds(&-x, w);
        return (round_down(&hi.recip(), w), round_up(&lo.recip(), w));
    }
    // Reduce to y = x / 2^k <= 1/2, sum the series, then square k times.
    let k = (magnitude(x) + 2).max(0) as u64;
    let yn = x.numer().clone();
    let yd = x.denom() << k;
    let f = w as u64 + k + 16;
    let one = pow2(f);
    let (mut tlo, mut thi) = (one.clone(), one.clone());
    let (mut slo, mut shi) = (one.clone(), one);
    let mut i = 1u64;
    loop {
        let den = &yd * BigInt::from(i);
        tlo = (&tlo * &yn).div_floor(&den);
        thi = -((-(&thi * &yn)).div_floor(&den));
        slo += &tlo;
        shi += &thi;
        if thi <= BigInt::one() {
            break;
        }
        i += 1;
    }
    // The tail after a term of at most one unit is at most one unit.
    shi += BigInt::from(2);
    let wk = w + k as u32 + 16;
    let mut lo = BigRational::new(slo, pow2(f));
    let mut hi = BigRational::new(shi, pow2(f));
    for _ in 0..k {
        lo = round_down(&(&lo * &lo), wk);
        hi = round_up(&(&hi * &hi), wk);
    }
    (round_down(&lo, w), round_up(&hi, w))
}

/// Fixed-point bounds on `atanh(u) * 2^f` for `0 <= u <= 1/3`.
fn atanh_fixed(un: &BigInt, ud: &BigInt, f: u64) -> (BigInt, BigInt) {
    let scaled = un << f;
    let mut plo = scaled.div_floor(ud);
    let mut phi = -((-&scaled).div_floor(ud));
    let (mut slo, mut shi) = (plo.clone(), phi.clone());
    let u2n = un * un;
    let u2d = ud * ud;
    let mut j = 1u64;
    while phi > BigInt::one() {
        plo = (&plo * &u2n).div_floor(&u2d);
        phi = -((-(&phi * &u2n)).div_floor(&u2d));
        let odd = BigInt::from(2 * j + 1);
        slo += plo.div_floor(&odd);
        shi += -((-&phi).div_floor(&odd));
        j += 1;
    }
    shi += BigInt::from(2);
    (slo, shi)
}

fn ln2_fixed(f: u64) -> (BigInt, BigInt) {
    let (lo, hi) = atanh_fixed(&BigInt::one(), &BigInt::from(3), f);
    (lo * 2, hi * 2)
}

/// Bounds on `ln x` for `x > 0`.
pub(crate) fn ln_bounds(x: &BigRational, w: u32) -> (BigRational, BigRational) {
    assert!(x.is_positive(), "ln of non-positive value");
    if x.is_one() {
        return (BigRational::zero(), BigRational::zero());
    }
    let m = magnitude(x);
    let mut y = if m >= 0 {
        x / BigRational::from_integer(pow2(m as u64))
    } else {
        x * BigRational::from_integer(pow2((-m) as u64))
    };
    let inverted = y < BigRational::one();
    if inverted {
        y = y.recip();
    }
    let un = y.numer() - y.denom();
    let ud = y.numer() + y.denom();
    // Extra bits when ln x is tiny so the bound stays relatively accurate.
    let tiny = if un.is_zero() {
        0
    } else {
        (ud.bits() as i64 - un.bits() as i64).max(0) as u64
    };
    let f = w as u64 + 24 + tiny + (m.unsigned_abs().max(1)).ilog2() as u64;
    let (mut lo, mut hi) = if un.is_zero() {
        (BigInt::zero(), BigInt::zero())
    } else {
        let (a, b) = atanh_fixed(&un, &ud, f);
        (a * 2, b * 2)
    };
    if inverted {
        (lo, hi) = (-hi, -lo);
    }
    if m != 0 {
        let (l2lo, l2hi) = ln2_fixed(f);
        let mb = BigInt::from(m);
        if m > 0 {
            lo += &mb * l2lo;
            hi += &mb * l2hi;
        } else {
            lo += &mb * l2hi;
            hi += &mb * l2lo;
        }
    }
    let denom = pow2(f);
    (
        round_down(&BigRational::new(lo, denom.clone()), w),
        round_up(&BigRational::new(hi, denom), w),
    )
}

fn exact_root(x: &BigInt, k: u32) -> Option<BigInt> {
    let r = x.nth_root(k);
    if Pow::pow(&r, k) == *x {
        Some(r)
    } else {
        None
    }
}

/// Bounds on `x^(1/k)` for `x >= 0`; exact when `x` is a perfect `k`-th power.
pub(crate) fn root_bounds(x: &BigRational, k: u32, w: u32) -> (BigRational, BigRational) {
    assert!(!x.is_negative() && k >= 1);
    if x.is_zero() || k == 1 {
        return (x.clone(), x.clone());
    }
    if let (Some(n), Some(d)) = (exact_root(x.numer(), k), exact_root(x.denom(), k)) {
        let r = BigRational::new(n, d);
        return (r.clone(), r);
    }
    let s = (w as i64 + 2 - magnitude(x) / k as i64).max(0);
    let m = floor_scaled(x, s * k as i64);
    let r = m.nth_root(k);
    let lo = BigRational::new(r.clone(), pow2(s as u64));
    let hi = BigRational::new(r + 1, pow2(s as u64));
    (lo, hi)
}

pub(crate) fn sqrt_bounds(x: &BigRational, w: u32) -> (BigRational, BigRational) {
    root_bounds(x, 2, w)
}

/// Rough upper bound on `log2 |x|` used to size working precision.
fn log2_size(x: &BigRational) -> u64 {
    magnitude(x).unsigned_abs() + 1
}

/// Enclosure of `base^exponent` for `base > 0`.
///
/// Integer exponents are exact; exponents with moderate denominators go
/// through an exact integer `k`-th root; everything else uses `exp(e ln b)`.
pub fn pow_real(
    base: &BigRational,
    exponent: &BigRational,
    bits: u32,
) -> Result<CertInterval> {
    if !base.is_positive() {
        return Err(Error::invalid(format!(
            "pow_real needs a positive base, got {}",
            format_rational(base)
        )));
    }
    if exponent.is_zero() || base.is_one() {
        return Ok(CertInterval::point(BigRational::one(), bits));
    }
    let w = bits + 8;
    let m = exponent.numer();
    let k = exponent.denom();
    let base_size = base.numer().bits() + base.denom().bits();
    let m_abs = m.abs().to_u64().unwrap_or(u64::MAX);
    let k_small = k.to_u32().filter(|&k| k <= 4096);

    if k.is_one() && m_abs.saturating_mul(base_size) <= 1 << 16 {
        let e = m_abs as u32;
        let v: BigRational = Pow::pow(base, e);
        let v = if m.is_negative() { v.recip() } else { v };
        return Ok(CertInterval::point(v, bits));
    }
    if let Some(k) = k_small {
        let cost = m_abs
            .saturating_mul(base_size)
            .saturating_add(k as u64 * (w as u64 + 64));
        if cost <= 24_000 {
            let x: BigRational = Pow::pow(base, m_abs as u32);
            let (lo, hi) = root_bounds(&x, k, w);
            let (lo, hi) = if m.is_negative() {
                (hi.recip(), lo.recip())
            } else {
                (lo, hi)
            };
            return Ok(CertInterval::enclose(&lo, &hi, bits));
        }
    }
    let arg_bits = (m.bits() as i64 - k.bits() as i64 + (log2_size(base) as f64).log2().ceil() as i64)
        .max(0) as u32;
    let wl = w + 32 + arg_bits;
    let (llo, lhi) = ln_bounds(base, wl);
    let (alo, ahi) = if exponent.is_positive() {
        (exponent * &llo, exponent * &lhi)
    } else {
        (exponent * &lhi, exponent * &llo)
    };
    let lo = exp_bounds(&alo, wl).0;
    let hi = exp_bounds(&ahi, wl).1;
    Ok(CertInterval::enclose(&lo, &hi, bits))
}

/// Enclosure of `e^{√ρ}`.
pub fn exp_sqrt(rho: &BigRational, bits: u32) -> Result<CertInterval> {
    if rho.is_negative() {
        return Err(Error::invalid(format!(
            "exp_sqrt needs rho >= 0, got {}",
            format_rational(rho)
        )));
    }
    if rho.is_zero() {
        return Ok(CertInterval::point(BigRational::one(), bits));
    }
    let w = bits + 16;
    let (slo, shi) = sqrt_bounds(rho, w);
    let lo = exp_bounds(&slo, w).0;
    let hi = exp_bounds(&shi, w).1;
    Ok(CertInterval::enclose(&lo, &hi, bits))
}

/// Enclosure of `ln x` for rational `x > 0`.
pub fn ln_real(x: &BigRational, bits: u32) -> Result<CertInterval> {
    if !x.is_positive() {
        return Err(Error::invalid(format!(
            "ln needs a positive argument, got {}",
            format_rational(x)
        )));
    }
    let (lo, hi) = ln_bounds(x, bits + 16);
    Ok(CertInterval::enclose(&lo, &hi, bits))
}

pub fn exp_real(x: &BigRational, bits: u32) -> CertInterval {
    let (lo, hi) = exp_bounds(x, bits + 16);
    CertInterval::enclose(&lo, &hi, bits)
}

pub fn sqrt_real(x: &BigRational, bits: u32) -> Result<CertInterval> {
    CertInterval::point(x.clone(), bits).sqrt()
}

/// Serde adapters writing rationals as `"n/d"` strings.
pub mod rational_str {
    use super::*;
    use serde::de::Error as _;

    pub fn serialize<S: serde::Serializer>(
        x: &BigRational,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

/// Same as [`rational_str`] for fixed arrays and vectors of rationals.
pub mod rational_seq {
    use super::*;
    use serde::de::Error as _;

    pub fn serialize<T, S>(xs: &T, s: S) -> std::result::Result<S::Ok, S::Error>
    where
        T: AsRef<[BigRational]>,
        S: serde::Serializer,
    {
        let v: Vec<String> = xs.as_ref().iter().map(format_rational).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, T, D>(d: D) -> std::result::Result<T, D::Error>
    where
        T: TryFrom<Vec<BigRational>>,
        D: serde::Deserializer<'de>,
    {
        let v = Vec::<String>::deserialize(d)?;
        let parsed = v
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let n = parsed.len();
        T::try_from(parsed).map_err(|_| D::Error::custom(format!("wrong number of rationals: {n}")))
    }
}
