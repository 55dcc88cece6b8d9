//! Directed-rounding enclosures of `x^{log2 n} · 2^{-x}` for integers `n, x`.
//!
//! Natural logarithms come from `ln r = 2·atanh((r-1)/(r+1))` after pulling
//! out powers of two; the exponential from a range-reduced Taylor series.
//! Every series is summed with terms rounded toward the side being bounded
//! and closed with an explicit tail bound, so the returned interval always
//! contains the true value.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::dyadic::{Dyadic, Rounding};

/// A closed enclosure `[lo, hi]` of a positive real; internal to this module.
#[derive(Debug, Clone)]
struct Pos {
    lo: Dyadic,
    hi: Dyadic,
}

impl Pos {
    fn point(v: Dyadic) -> Self {
        Pos {
            lo: v.clone(),
            hi: v,
        }
    }

    fn add(&self, o: &Pos, p: u32) -> Pos {
        Pos {
            lo: (&self.lo + &o.lo).round_to(p, Rounding::Down),
            hi: (&self.hi + &o.hi).round_to(p, Rounding::Up),
        }
    }

    fn mul(&self, o: &Pos, p: u32) -> Pos {
        Pos {
            lo: (&self.lo * &o.lo).round_to(p, Rounding::Down),
            hi: (&self.hi * &o.hi).round_to(p, Rounding::Up),
        }
    }

    fn div(&self, o: &Pos, p: u32) -> Pos {
        Pos {
            lo: Dyadic::div_round(&self.lo, &o.hi, p, Rounding::Down),
            hi: Dyadic::div_round(&self.hi, &o.lo, p, Rounding::Up),
        }
    }

    fn scale_int(&self, k: i64) -> Pos {
        let k = Dyadic::from_int(k);
        Pos {
            lo: &self.lo * &k,
            hi: &self.hi * &k,
        }
    }
}

/// `atanh(t)` for `t = a/b ∈ [0, 1/3]`.
fn atanh_small(a: u64, b: u64, p: u32) -> Pos {
    let t = Pos {
        lo: Dyadic::div_round(
            &Dyadic::from_int(a as i64),
            &Dyadic::from_int(b as i64),
            p,
            Rounding::Down,
        ),
        hi: Dyadic::div_round(
            &Dyadic::from_int(a as i64),
            &Dyadic::from_int(b as i64),
            p,
            Rounding::Up,
        ),
    };
    if a == 0 {
        return Pos::point(Dyadic::zero());
    }
    let t2 = t.mul(&t, p);
    // (1/9)^J bounds the term ratio; J terms leave a tail below 2^{-(p+2)}
    let terms = (p as usize + 4) / 3 + 2;
    let mut power = t.clone();
    let mut sum = Pos::point(Dyadic::zero());
    for j in 0..terms {
        let d = Pos::point(Dyadic::from_int(2 * j as i64 + 1));
        sum = sum.add(&power.div(&d, p), p);
        power = power.mul(&t2, p);
    }
    // tail ≤ t^{2J+1} / ((2J+1)(1 - t^2)) ≤ 2 · t^{2J+1}
    sum.hi = &sum.hi + &power.hi.mul_pow2(1);
    sum
}

fn ln2(p: u32) -> Pos {
    atanh_small(1, 3, p).scale_int(2)
}

/// `ln m` for an integer `m ≥ 1`.
fn ln_int(m: u64, p: u32) -> Pos {
    assert!(m >= 1);
    let k = 63 - m.leading_zeros() as u64;
    let base = 1u64 << k;
    let mut out = ln2(p).scale_int(k as i64);
    if m != base {
        // m = 2^k · r with r ∈ (1, 2); (r-1)/(r+1) = (m - 2^k)/(m + 2^k) < 1/3
        let frac = atanh_small(m - base, m + base, p).scale_int(2);
        out = out.add(&frac, p);
    }
    out
}

/// `exp(r)` for `0 ≤ r_lo ≤ r_hi < 1`.
fn exp_small(r: &Pos, p: u32) -> Pos {
    let mut terms = 1usize;
    let mut fact = BigInt::one();
    // stop once 2/(J+1)! < 2^{-(p+2)}
    while fact.bits() < p as u64 + 4 {
        terms += 1;
        fact *= terms;
    }
    let mut sum = Pos::point(Dyadic::one());
    let mut term = Pos::point(Dyadic::one());
    for j in 1..=terms {
        term = term
            .mul(r, p)
            .div(&Pos::point(Dyadic::from_int(j as i64)), p);
        sum = sum.add(&term, p);
    }
    sum.hi = &sum.hi + &Dyadic::pow2(-(p as i64 + 2));
    sum
}

/// Enclosure of `x^{log2 n} · 2^{-x}` at working precision `p` bits.
/// Requires `n ≥ 2`, `x ≥ 2`.
pub(crate) fn weight_enclosure(n: u64, x: u64, p: u32) -> (Dyadic, Dyadic) {
    let l2 = ln2(p);
    // u = ln n · ln x / ln 2 = ln(x^{log2 n})
    let u = ln_int(n, p).mul(&ln_int(x, p), p).div(&l2, p);
    let k = Dyadic::div_round(&u.lo, &l2.hi, 0, Rounding::Down)
        .floor()
        .to_i64()
        .expect("exponent fits in i64");
    let shift = l2.scale_int(k);
    let r = Pos {
        lo: (&u.lo - &shift.hi).round_to(p, Rounding::Down),
        hi: (&u.hi - &shift.lo).round_to(p, Rounding::Up),
    };
    debug_assert!(!r.lo.is_negative() && r.hi < Dyadic::one());
    let e = exp_small(&r, p);
    let scale = k - x as i64;
    (e.lo.mul_pow2(scale), e.hi.mul_pow2(scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_encloses_f64() {
        for m in [2u64, 3, 5, 7, 10, 1000, 123_456_789] {
            let v = ln_int(m, 80);
            let f = (m as f64).ln();
            assert!(
                v.lo.to_f64() <= f * (1.0 + 1e-14) && f * (1.0 - 1e-14) <= v.hi.to_f64(),
                "m={m}"
            );
            assert!((&v.hi - &v.lo) < Dyadic::pow2(-64), "m={m}");
        }
    }

    #[test]
    fn exp_encloses_f64() {
        let r = Pos::point("5/2^3".parse().unwrap());
        let v = exp_small(&r, 80);
        let f = 0.625f64.exp();
        assert!(v.lo.to_f64() <= f * (1.0 + 1e-14) && f * (1.0 - 1e-14) <= v.hi.to_f64());
    }
}
