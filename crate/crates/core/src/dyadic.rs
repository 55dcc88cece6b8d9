//! Exact dyadic rationals `m / 2^k` and closed dyadic intervals.
//!
//! Every mass and weight in the crate is one of these. There is no floating
//! point on any decision path; `to_f64` exists only for display.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Direction for operations that must leave the dyadic grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Down,
    Up,
}

/// `numerator / 2^exponent`, kept canonical: the numerator is odd, or the
/// value is zero and the exponent is zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numerator: BigInt,
    exponent: u32,
}

impl Dyadic {
    pub fn new(numerator: BigInt, exponent: u32) -> Self {
        let mut d = Dyadic {
            numerator,
            exponent,
        };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.numerator.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.numerator.trailing_zeros().unwrap_or(0);
        let shift = tz.min(self.exponent as u64);
        if shift > 0 {
            self.numerator >>= shift;
            self.exponent -= shift as u32;
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            numerator: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic {
            numerator: BigInt::from(v),
            exponent: 0,
        }
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Dyadic::new(v, 0)
    }

    /// The value `2^e` for any integer `e`.
    pub fn pow2(e: i64) -> Self {
        if e >= 0 {
            Dyadic {
                numerator: BigInt::one() << (e as u64),
                exponent: 0,
            }
        } else {
            Dyadic {
                numerator: BigInt::one(),
                exponent: (-e) as u32,
            }
        }
    }

    /// The value `m / 2^k`.
    pub fn ratio(m: i64, k: u32) -> Self {
        Dyadic::new(BigInt::from(m), k)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.numerator.is_positive()
    }

    /// Multiply by `2^e`.
    pub fn mul_pow2(&self, e: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        if e >= 0 {
            let e = e as u64;
            let drop = e.min(self.exponent as u64);
            Dyadic::new(&self.numerator << (e - drop), self.exponent - drop as u32)
        } else {
            let k = self.exponent as i64 - e;
            Dyadic::new(self.numerator.clone(), k as u32)
        }
    }

    /// `floor(log2(self))` for a positive value: the largest `e` with
    /// `2^e <= self`.
    pub fn floor_log2(&self) -> Option<i64> {
        if !self.is_positive() {
            return None;
        }
        let bits = self.numerator.bits() as i64;
        Some(bits - 1 - self.exponent as i64)
    }

    /// Whether the value is an exact (possibly negative) power of two.
    pub fn is_pow2(&self) -> bool {
        self.is_positive() && self.numerator.trailing_zeros() == Some(self.numerator.bits() - 1)
    }

    /// Three-way comparison with `2^{-n}`.
    pub fn cmp_pow2(&self, n: i64) -> Ordering {
        self.cmp(&Dyadic::pow2(-n))
    }

    pub fn floor(&self) -> BigInt {
        self.numerator.div_floor(&(BigInt::one() << self.exponent))
    }

    pub fn ceil(&self) -> BigInt {
        let d = BigInt::one() << self.exponent;
        let (q, r) = self.numerator.div_mod_floor(&d);
        if r.is_zero() {
            q
        } else {
            q + 1
        }
    }

    /// Round to the grid `2^{-precision}` in the given direction.
    pub fn round_to(&self, precision: u32, dir: Rounding) -> Self {
        if self.exponent <= precision {
            return self.clone();
        }
        let scaled = self.mul_pow2(precision as i64);
        let n = match dir {
            Rounding::Down => scaled.floor(),
            Rounding::Up => scaled.ceil(),
        };
        Dyadic::new(n, precision)
    }

    /// `a / b` rounded to the grid `2^{-precision}`. `b` must be nonzero.
    pub fn div_round(a: &Dyadic, b: &Dyadic, precision: u32, dir: Rounding) -> Self {
        assert!(!b.is_zero(), "division by zero");
        // a/b = (na * 2^eb) / (nb * 2^ea); scaled by 2^precision.
        let mut num = &a.numerator << (b.exponent as u64 + precision as u64);
        let mut den = &b.numerator << a.exponent as u64;
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let (q, r) = num.div_mod_floor(&den);
        let q = match dir {
            Rounding::Down => q,
            Rounding::Up if r.is_zero() => q,
            Rounding::Up => q + 1,
        };
        Dyadic::new(q, precision)
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            numerator: self.numerator.abs(),
            exponent: self.exponent,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        Dyadic::new(
            num_traits::pow(self.numerator.clone(), e as usize),
            self.exponent * e,
        )
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Lossy conversion for display and test cross-checks only.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.numerator.bits();
        // keep 64 significant bits to avoid overflow in huge numerators
        let drop = bits.saturating_sub(64);
        let top = (&self.numerator >> drop).to_f64().unwrap_or(f64::NAN);
        let e = drop as i64 - self.exponent as i64;
        top * 2f64.powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }
}

/// Free-function form of [`Dyadic::cmp_pow2`].
pub fn dyadic_cmp_pow2(d: &Dyadic, n: i64) -> Ordering {
    d.cmp_pow2(n)
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let k = self.exponent.max(other.exponent);
        let a = &self.numerator << (k - self.exponent) as u64;
        let b = &other.numerator << (k - other.exponent) as u64;
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let k = self.exponent.max(rhs.exponent);
        let a = &self.numerator << (k - self.exponent) as u64;
        let b = &rhs.numerator << (k - rhs.exponent) as u64;
        Dyadic::new(a + b, k)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(
            &self.numerator * &rhs.numerator,
            self.exponent + rhs.exponent,
        )
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            numerator: -&self.numerator,
            exponent: self.exponent,
        }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Self {
        iter.fold(Dyadic::zero(), |acc, d| &acc + &d)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `m/2^k`, a plain integer `m`, or `m/d` with `d` a power of two.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_int = |t: &str, at: usize| -> Result<BigInt> {
            BigInt::parse_bytes(t.as_bytes(), 10).ok_or_else(|| Error::Parse {
                position: at,
                message: format!("expected an integer, found {t:?}"),
            })
        };
        let Some((num, den)) = s.split_once('/') else {
            return Ok(Dyadic::from_bigint(parse_int(s, 0)?));
        };
        let numerator = parse_int(num, 0)?;
        let den_at = num.len() + 1;
        if let Some(k) = den.strip_prefix("2^") {
            let k: u32 = k.parse().map_err(|_| Error::Parse {
                position: den_at + 2,
                message: format!("expected an exponent, found {k:?}"),
            })?;
            return Ok(Dyadic::new(numerator, k));
        }
        let d = parse_int(den, den_at)?;
        if d.sign() != Sign::Plus || d.trailing_zeros() != Some(d.bits() - 1) {
            return Err(Error::Parse {
                position: den_at,
                message: format!("denominator {d} is not a power of two"),
            });
        }
        Ok(Dyadic::new(numerator, (d.bits() - 1) as u32))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A closed interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DyadicInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl DyadicInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Result<Self> {
        if lo > hi {
            return Err(Error::validation(
                "interval",
                format!("lower end {lo} exceeds upper end {hi}"),
            ));
        }
        Ok(DyadicInterval { lo, hi })
    }

    pub fn point(v: Dyadic) -> Self {
        DyadicInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Dyadic) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_interval(&self, other: &DyadicInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &DyadicInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

impl Add for &DyadicInterval {
    type Output = DyadicInterval;
    fn add(self, rhs: &DyadicInterval) -> DyadicInterval {
        DyadicInterval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn cmp_pow2_examples() {
        assert_eq!(dyadic_cmp_pow2(&d("1/2"), 1), Ordering::Equal);
        assert_eq!(dyadic_cmp_pow2(&d("3/8"), 1), Ordering::Less);
        assert_eq!(dyadic_cmp_pow2(&d("9/16"), 1), Ordering::Greater);
        assert_eq!(dyadic_cmp_pow2(&d("4"), -2), Ordering::Equal);
    }

    #[test]
    fn canonical_form() {
        let x = Dyadic::new(BigInt::from(12), 4);
        assert_eq!(x.numerator(), &BigInt::from(3));
        assert_eq!(x.exponent(), 2);
        let z = Dyadic::new(BigInt::zero(), 9);
        assert_eq!(z.exponent(), 0);
        assert_eq!(Dyadic::new(BigInt::from(8), 0).exponent(), 0);
    }

    #[test]
    fn text_form() {
        assert_eq!(d("1/2^2").to_string(), "1/2^2");
        assert_eq!(d("1/4"), d("1/2^2"));
        assert_eq!(d("6/2^3").to_string(), "3/2^2");
        assert_eq!(d("-5").to_string(), "-5/2^0");
        assert!("1/3".parse::<Dyadic>().is_err());
        assert!("x/2^2".parse::<Dyadic>().is_err());
        assert!("1/2^q".parse::<Dyadic>().is_err());
    }

    #[test]
    fn floor_log2_values() {
        assert_eq!(d("27/64").floor_log2(), Some(-2));
        assert_eq!(d("1/2").floor_log2(), Some(-1));
        assert_eq!(d("1").floor_log2(), Some(0));
        assert_eq!(d("5").floor_log2(), Some(2));
        assert_eq!(Dyadic::zero().floor_log2(), None);
    }

    #[test]
    fn pow2_detection() {
        assert!(d("1/8").is_pow2());
        assert!(d("4").is_pow2());
        assert!(!d("3/8").is_pow2());
        assert!(!d("6").is_pow2());
        assert!(!Dyadic::zero().is_pow2());
    }

    #[test]
    fn rounding() {
        let x = d("5/2^4");
        assert_eq!(x.round_to(2, Rounding::Down), d("1/4"));
        assert_eq!(x.round_to(2, Rounding::Up), d("1/2"));
        assert_eq!((-x.clone()).round_to(2, Rounding::Down), d("-1/2"));
        let third_lo = Dyadic::div_round(&d("1"), &d("3"), 10, Rounding::Down);
        let third_hi = Dyadic::div_round(&d("1"), &d("3"), 10, Rounding::Up);
        assert_eq!(&third_hi - &third_lo, Dyadic::pow2(-10));
        assert!(third_lo.to_f64() <= 1.0 / 3.0 && 1.0 / 3.0 <= third_hi.to_f64());
        let neg = Dyadic::div_round(&d("1"), &d("-3"), 10, Rounding::Down);
        assert!(neg.to_f64() <= -1.0 / 3.0);
    }

    #[test]
    fn interval_checks() {
        assert!(DyadicInterval::new(d("1/2"), d("1/4")).is_err());
        let a = DyadicInterval::new(d("1/4"), d("1/2")).unwrap();
        let b = DyadicInterval::new(d("1/2"), d("1")).unwrap();
        assert!(a.overlaps(&b));
        assert_eq!((&a + &b).lo(), &d("3/4"));
        assert_eq!(a.width(), d("1/4"));
    }
}
