//! Certified evaluation of expressions in `ln`, `sqrt` and `exp`.
//!
//! The decision procedure's thresholds are floors and ceilings of
//! transcendental expressions. Rounding those with floating point risks an
//! off-by-one, so every expression is evaluated here as an exact rational
//! interval guaranteed to contain the true value; the working precision is
//! raised until the integer part is unambiguous.
//!
//! All series tails are bounded explicitly, and every interval endpoint is an
//! exact `BigRational`, so the enclosures are proofs, not estimates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An exact rational interval `[lo, hi]` enclosing a real number.
#[derive(Clone, Debug)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

/// `2^k` as an exact rational, for any sign of `k`.
fn pow2(k: i64) -> BigRational {
    if k >= 0 {
        BigRational::from_integer(BigInt::one() << k as u64)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-k) as u64)
    }
}

fn eps(prec: u32) -> BigRational {
    pow2(-(prec as i64))
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_integer(x: i64) -> Self {
        Interval::point(BigRational::from_integer(BigInt::from(x)))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let candidates = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = candidates.iter().min().unwrap().clone();
        let hi = candidates.iter().max().unwrap().clone();
        Interval::new(lo, hi)
    }

    /// Multiply by an exact rational.
    pub fn scale(&self, c: &BigRational) -> Interval {
        if c.is_negative() {
            Interval::new(&self.hi * c, &self.lo * c)
        } else {
            Interval::new(&self.lo * c, &self.hi * c)
        }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Round outward so both endpoints have denominator `2^prec`. Keeps the
    /// rationals small across long computations without losing soundness.
    pub fn round_out(&self, prec: u32) -> Interval {
        let scale = pow2(prec as i64);
        let lo = (&self.lo * &scale).floor() / &scale;
        let hi = (&self.hi * &scale).ceil() / &scale;
        Interval::new(lo, hi)
    }
}

/// `2·atanh(u) = ln((1+u)/(1−u))` for rational `0 ≤ u ≤ 1/3`, with a
/// rigorous geometric tail bound.
fn atanh_times_two(u: &BigRational, prec: u32) -> Interval {
    assert!(!u.is_negative(), "series argument must be nonnegative");
    assert!(
        u * BigRational::from_integer(BigInt::from(3)) <= BigRational::one(),
        "series argument must be at most 1/3"
    );
    if u.is_zero() {
        return Interval::point(BigRational::zero());
    }
    let target = eps(prec + 4);
    let u2 = u * u;
    let geo = BigRational::one() / (BigRational::one() - &u2);
    let two = BigRational::from_integer(BigInt::from(2));
    let mut sum = BigRational::zero();
    let mut pw = u.clone(); // u^{2j+1}
    let mut j: u64 = 0;
    loop {
        let denom = BigRational::from_integer(BigInt::from(2 * j + 1));
        // All remaining terms are bounded by a geometric series from here.
        let tail = &two * &pw / &denom * &geo;
        if tail < target {
            let lo = &two * &sum;
            return Interval::new(lo.clone(), lo + tail).round_out(prec + 2);
        }
        sum += &pw / denom;
        pw *= &u2;
        j += 1;
    }
}

/// Certified enclosure of `ln 2`.
fn ln2(prec: u32) -> Interval {
    // ln 2 = ln((1 + 1/3)/(1 − 1/3)).
    atanh_times_two(&BigRational::new(BigInt::one(), BigInt::from(3)), prec)
}

/// Certified enclosure of `ln x` at a rational point `x > 0`.
fn ln_point(x: &BigRational, prec: u32) -> Result<Interval> {
    if !x.is_positive() {
        return Err(Error::Input("ln requires a positive argument".into()));
    }
    // Range-reduce to r ∈ [1, 2): x = 2^e · r, so ln x = e·ln2 + ln r.
    let mut e: i64 = x.numer().magnitude().bits() as i64 - x.denom().magnitude().bits() as i64;
    let mut r = x * pow2(-e);
    while r < BigRational::one() {
        r *= BigRational::from_integer(BigInt::from(2));
        e -= 1;
    }
    while r >= BigRational::from_integer(BigInt::from(2)) {
        r /= BigRational::from_integer(BigInt::from(2));
        e += 1;
    }
    // ln r = 2·atanh(u) with u = (r−1)/(r+1) ∈ [0, 1/3] for r ∈ [1, 2).
    let u = (&r - BigRational::one()) / (&r + BigRational::one());
    let mut result = atanh_times_two(&u, prec);
    if e != 0 {
        result = result.add(&ln2(prec).scale(&BigRational::from_integer(BigInt::from(e))));
    }
    Ok(result.round_out(prec))
}

/// Certified enclosure of `ln x` over an interval with `x.lo > 0`.
pub fn certified_ln(x: &Interval, prec: u32) -> Result<Interval> {
    let lo = ln_point(x.lo(), prec)?;
    let hi = ln_point(x.hi(), prec)?;
    Ok(Interval::new(lo.lo, hi.hi))
}

/// Rational lower bound on `sqrt(x)` with error below `2^−prec`.
fn sqrt_point_lo(x: &BigRational, prec: u32) -> BigRational {
    assert!(!x.is_negative(), "sqrt requires a nonnegative argument");
    if x.is_zero() {
        return BigRational::zero();
    }
    let a = x.numer().clone();
    let b = x.denom().clone();
    // s = ⌊sqrt(a·b·4^prec)⌋ gives s/(b·2^prec) ≤ sqrt(a/b) < (s+1)/(b·2^prec).
    let s = ((&a * &b) << (2 * prec as u64)).sqrt();
    BigRational::new(s, b << prec as u64)
}

fn sqrt_point_hi(x: &BigRational, prec: u32) -> BigRational {
    assert!(!x.is_negative(), "sqrt requires a nonnegative argument");
    if x.is_zero() {
        return BigRational::zero();
    }
    let a = x.numer().clone();
    let b = x.denom().clone();
    let s = ((&a * &b) << (2 * prec as u64)).sqrt();
    BigRational::new(s + BigInt::one(), b << prec as u64)
}

/// Certified enclosure of `sqrt(x)` over an interval with `x.lo ≥ 0`.
pub fn certified_sqrt(x: &Interval, prec: u32) -> Result<Interval> {
    if x.lo().is_negative() {
        return Err(Error::Input("sqrt requires a nonnegative argument".into()));
    }
    Ok(Interval::new(sqrt_point_lo(x.lo(), prec), sqrt_point_hi(x.hi(), prec)).round_out(prec))
}

/// Taylor enclosure of `exp(y)` for rational `|y| ≤ 1`.
fn exp_taylor(y: &BigRational, prec: u32) -> Interval {
    assert!(y.abs() <= BigRational::one(), "exp series argument must satisfy |y| ≤ 1");
    let target = eps(prec + 4);
    let ay = y.abs();
    let mut sum = BigRational::one();
    let mut term = y.clone(); // y^k / k! for k = 1
    let mut k: u64 = 1;
    loop {
        // Remaining terms from degree k on are bounded by the geometric series
        // |term|·Σ (|y|/(k+1))^j, and |y|/(k+1) ≤ 1/2 once k ≥ 1.
        let ratio = &ay / BigRational::from_integer(BigInt::from(k + 1));
        let tail = term.abs() / (BigRational::one() - ratio);
        if tail < target {
            return Interval::new(&sum - &tail, &sum + &tail).round_out(prec + 2);
        }
        sum += &term;
        k += 1;
        term = term * y / BigRational::from_integer(BigInt::from(k));
    }
}

/// Certified enclosure of `exp(x)` at a rational point.
fn exp_point(x: &BigRational, prec: u32) -> Result<Interval> {
    if x.is_zero() {
        return Ok(Interval::point(BigRational::one()));
    }
    // Reduce x = k·ln2 + r with |r| ≤ ln2/2 (plus interval slack), using an
    // ln2 enclosure precise enough that k·(ln2 error) stays far below 2^−prec.
    let xbits = (x.numer().magnitude().bits() as i64 - x.denom().magnitude().bits() as i64)
        .unsigned_abs() as u32;
    let inner = prec + xbits + 32;
    let l2 = ln2(inner);
    let mid = (l2.lo() + l2.hi()) / BigRational::from_integer(BigInt::from(2));
    let k_rat = (x / mid + BigRational::new(BigInt::one(), BigInt::from(2))).floor();
    let k = k_rat.to_integer();
    let k_i64 = i64::try_from(&k)
        .map_err(|_| Error::ResourceLimit("exp argument magnitude out of range".into()))?;
    let r = Interval::point(x.clone()).sub(&l2.scale(&BigRational::from_integer(k)));
    assert!(
        r.lo().abs() <= BigRational::one() && r.hi().abs() <= BigRational::one(),
        "range reduction left a residual above 1"
    );
    // exp is monotone, so evaluate the series at the residual's endpoints.
    let lo = exp_taylor(r.lo(), prec + 2);
    let hi = exp_taylor(r.hi(), prec + 2);
    let factor = pow2(k_i64);
    Ok(Interval::new(lo.lo * &factor, hi.hi * &factor).round_out(prec))
}

/// Certified enclosure of `exp(x)` over an interval.
pub fn certified_exp(x: &Interval, prec: u32) -> Result<Interval> {
    let lo = exp_point(x.lo(), prec)?;
    let hi = exp_point(x.hi(), prec)?;
    Ok(Interval::new(lo.lo, hi.hi))
}

const MAX_PRECISION: u32 = 1 << 22;

/// Evaluate `f` at increasing precision until the floor of the enclosed value
/// is unambiguous, then return it.
pub fn certified_floor<F>(hint_bits: u32, f: F) -> Result<BigInt>
where
    F: Fn(u32) -> Result<Interval>,
{
    let mut prec = hint_bits.max(96);
    while prec <= MAX_PRECISION {
        let i = f(prec)?;
        let lo = i.lo().floor().to_integer();
        let hi = i.hi().floor().to_integer();
        if lo == hi {
            return Ok(lo);
        }
        prec = prec.saturating_mul(2);
    }
    Err(Error::ResourceLimit(
        "could not certify the integer part within the precision limit".into(),
    ))
}

/// Evaluate `f` at increasing precision until the ceiling of the enclosed
/// value is unambiguous, then return it.
pub fn certified_ceil<F>(hint_bits: u32, f: F) -> Result<BigInt>
where
    F: Fn(u32) -> Result<Interval>,
{
    let mut prec = hint_bits.max(96);
    while prec <= MAX_PRECISION {
        let i = f(prec)?;
        let lo = i.lo().ceil().to_integer();
        let hi = i.hi().ceil().to_integer();
        if lo == hi {
            return Ok(lo);
        }
        prec = prec.saturating_mul(2);
    }
    Err(Error::ResourceLimit(
        "could not certify the integer part within the precision limit".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn assert_encloses(i: &Interval, lo: (i64, i64), hi: (i64, i64)) {
        assert!(i.lo() >= &rat(lo.0, lo.1), "lower endpoint too small: {:?}", i.lo());
        assert!(i.hi() <= &rat(hi.0, hi.1), "upper endpoint too large: {:?}", i.hi());
    }

    #[test]
    fn ln_of_one_is_zero() {
        let i = ln_point(&rat(1, 1), 128).unwrap();
        assert!(i.contains(&BigRational::zero()));
        assert!(i.width() < eps(100));
    }

    #[test]
    fn ln_two_matches_reference_digits() {
        let i = ln2(128);
        assert_encloses(&i, (693147180, 1_000_000_000), (693147181, 1_000_000_000));
    }

    #[test]
    fn ln_ten_matches_reference_digits() {
        let i = ln_point(&rat(10, 1), 128).unwrap();
        assert_encloses(&i, (2302585092, 1_000_000_000), (2302585093, 1_000_000_000));
    }

    #[test]
    fn ln_of_a_fraction_is_negative() {
        let i = ln_point(&rat(1, 2), 128).unwrap();
        assert_encloses(&i, (-693147181, 1_000_000_000), (-693147180, 1_000_000_000));
    }

    #[test]
    fn sqrt_two_matches_reference_digits() {
        let i = certified_sqrt(&Interval::from_integer(2), 128).unwrap();
        assert_encloses(&i, (1414213562, 1_000_000_000), (1414213563, 1_000_000_000));
    }

    #[test]
    fn sqrt_of_exact_square_is_tight() {
        let i = certified_sqrt(&Interval::from_integer(49), 128).unwrap();
        assert!(i.contains(&rat(7, 1)));
        assert!(i.width() < eps(100));
    }

    #[test]
    fn exp_one_matches_reference_digits() {
        let i = certified_exp(&Interval::from_integer(1), 128).unwrap();
        assert_encloses(&i, (2718281828, 1_000_000_000), (2718281829, 1_000_000_000));
    }

    #[test]
    fn exp_of_negative_one_matches_reference_digits() {
        let i = certified_exp(&Interval::from_integer(-1), 128).unwrap();
        assert_encloses(&i, (367879441, 1_000_000_000), (367879442, 1_000_000_000));
    }

    #[test]
    fn exp_of_larger_argument() {
        // e^10 = 22026.4657948…
        let i = certified_exp(&Interval::from_integer(10), 128).unwrap();
        assert_encloses(&i, (220264657, 10_000), (220264658, 10_000));
    }

    #[test]
    fn certified_floor_of_scaled_sqrt() {
        let f = certified_floor(96, |prec| {
            let s = certified_sqrt(&Interval::from_integer(2), prec)?;
            Ok(s.scale(&rat(1000, 1)))
        })
        .unwrap();
        assert_eq!(f, BigInt::from(1414));
    }

    #[test]
    fn certified_ceil_of_scaled_sqrt() {
        let c = certified_ceil(96, |prec| {
            let s = certified_sqrt(&Interval::from_integer(2), prec)?;
            Ok(s.scale(&rat(100, 1)))
        })
        .unwrap();
        assert_eq!(c, BigInt::from(142));
    }

    #[test]
    fn nested_expression_floor() {
        // ⌊exp(sqrt(12·ln 2))⌋ = ⌊exp(2.8840…)⌋ = ⌊17.886…⌋ = 17.
        let f = certified_floor(96, |prec| {
            let l = certified_ln(&Interval::from_integer(2), prec)?;
            let s = certified_sqrt(&l.scale(&rat(12, 1)), prec)?;
            certified_exp(&s, prec)
        })
        .unwrap();
        assert_eq!(f, BigInt::from(17));
    }

    #[test]
    fn interval_multiplication_handles_signs() {
        let a = Interval::new(rat(-2, 1), rat(3, 1));
        let b = Interval::new(rat(-5, 1), rat(1, 1));
        let p = a.mul(&b);
        assert_eq!(p.lo(), &rat(-15, 1));
        assert_eq!(p.hi(), &rat(10, 1));
    }

    #[test]
    fn round_out_widens_never_narrows() {
        let a = Interval::new(rat(1, 3), rat(2, 3));
        let r = a.round_out(16);
        assert!(r.lo() <= a.lo());
        assert!(r.hi() >= a.hi());
        assert!(r.width() < a.width() + eps(14));
    }
}
