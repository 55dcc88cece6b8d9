//! Level-n Solovay tests: weights, running sums, covers and nesting.
//!
//! The weight of a string `σ` at level `n` is `w(n, x) = x^{log2 n} · 2^{-x}`
//! with `x = h^{(n)}(|σ|)`. A finite test carries an explicit budget in place
//! of convergence of the weight sum.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bits::{BitStream, BitString};
use crate::bounded::weight_enclosure;
use crate::dyadic::{Dyadic, DyadicInterval};
use crate::error::{Error, Result};
use crate::granularity::GranularityTable;
use crate::measures::MeasureOracle;

/// Relative width demanded of inexact weights: `hi - lo ≤ 2^{-30} · hi`.
pub const WEIGHT_RELATIVE_BITS: u32 = 30;

/// A certified enclosure of a weight or weight sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightBound {
    lo: Dyadic,
    hi: Dyadic,
    exact: bool,
    /// `hi - lo ≤ 2^{-precision}`.
    precision: u32,
}

fn precision_of(lo: &Dyadic, hi: &Dyadic) -> u32 {
    match (hi - lo).floor_log2() {
        None => u32::MAX,
        Some(e) => (-(e + 1)).clamp(0, u32::MAX as i64) as u32,
    }
}

impl WeightBound {
    pub fn exact(v: Dyadic) -> Self {
        WeightBound {
            lo: v.clone(),
            hi: v,
            exact: true,
            precision: u32::MAX,
        }
    }

    pub fn zero() -> Self {
        WeightBound::exact(Dyadic::zero())
    }

    pub(crate) fn enclosure(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi);
        let precision = precision_of(&lo, &hi);
        WeightBound {
            exact: lo == hi,
            lo,
            hi,
            precision,
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn add(&self, other: &WeightBound) -> WeightBound {
        let lo = &self.lo + &other.lo;
        let hi = &self.hi + &other.hi;
        let mut w = WeightBound::enclosure(lo, hi);
        w.exact = self.exact && other.exact;
        w
    }

    /// `true` if the value is certainly below `other`'s value.
    pub fn certainly_below(&self, other: &WeightBound) -> bool {
        self.hi < other.lo
    }

    pub fn as_interval(&self) -> DyadicInterval {
        DyadicInterval::new(self.lo.clone(), self.hi.clone()).expect("lo <= hi")
    }
}

/// `true` iff `n` is a power of two; then returns the exponent.
fn log2_exact(n: u64) -> Option<u32> {
    n.is_power_of_two().then(|| n.trailing_zeros())
}

/// `w(n, x) = x^{log2 n} · 2^{-x}`.
///
/// Exact when `n` or `x` is a power of two. Otherwise an enclosure with
/// `hi - lo ≤ 2^{-30} · hi`. At `x = 0` the weight is `1` for `n = 1` and `0`
/// for `n ≥ 2`.
pub fn level_weight(n: u64, x: u64) -> WeightBound {
    assert!(n >= 1, "level must be at least 1");
    if x == 0 {
        return WeightBound::exact(if n == 1 {
            Dyadic::one()
        } else {
            Dyadic::zero()
        });
    }
    let scale = Dyadic::pow2(-(x as i64));
    if let Some(a) = log2_exact(n) {
        let base = Dyadic::from_bigint(num_bigint::BigInt::from(x));
        return WeightBound::exact(&base.pow(a) * &scale);
    }
    if let Some(b) = log2_exact(x) {
        // (2^b)^{log2 n} = n^b
        let base = Dyadic::from_bigint(num_bigint::BigInt::from(n));
        return WeightBound::exact(&base.pow(b) * &scale);
    }
    let mut p = 96;
    loop {
        let (lo, hi) = weight_enclosure(n, x, p);
        let width = &hi - &lo;
        if width <= hi.mul_pow2(-(WEIGHT_RELATIVE_BITS as i64)) {
            return WeightBound::enclosure(lo, hi);
        }
        p *= 2;
    }
}

/// `true` iff `x > 2·log2 n`, decided exactly as `2^x > n^2`.
pub fn past_safe_threshold(n: u64, x: u64) -> bool {
    let n2 = (n as u128) * (n as u128);
    x >= 128 || (1u128 << x) > n2
}

/// A finite level-n test: elements in enumeration order and their weight sum.
#[derive(Debug, Clone, Serialize)]
pub struct LevelTest {
    level: u64,
    measure: serde_json::Value,
    elements: Vec<BitString>,
    #[serde(serialize_with = "ser_sum")]
    weight_sum: WeightBound,
    budget: Dyadic,
}

fn ser_sum<S: serde::Serializer>(w: &WeightBound, s: S) -> std::result::Result<S::Ok, S::Error> {
    w.as_interval().serialize(s)
}

/// The serialized form of a test; weights are recomputed on load.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelTestFile {
    pub level: u64,
    #[serde(default)]
    pub measure: serde_json::Value,
    pub elements: Vec<BitString>,
    #[serde(default)]
    pub weight_sum: Option<DyadicInterval>,
    pub budget: Dyadic,
}

impl LevelTest {
    pub fn new(level: u64, measure: serde_json::Value, budget: Dyadic) -> Result<Self> {
        if level == 0 {
            return Err(Error::validation(
                "level",
                "a test level must be at least 1",
            ));
        }
        if budget.is_negative() {
            return Err(Error::validation("budget", "budget must be non-negative"));
        }
        Ok(LevelTest {
            level,
            measure,
            elements: Vec::new(),
            weight_sum: WeightBound::zero(),
            budget,
        })
    }

    /// Replay a serialized test against a table, pushing elements in order.
    pub fn replay(file: &LevelTestFile, table: &GranularityTable) -> Result<Self> {
        let mut t = LevelTest::new(file.level, table.measure().clone(), file.budget.clone())?;
        for sigma in &file.elements {
            t.push_element(sigma.clone(), table)?;
        }
        Ok(t)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn elements(&self) -> &[BitString] {
        &self.elements
    }

    pub fn weight_sum(&self) -> &WeightBound {
        &self.weight_sum
    }

    pub fn budget(&self) -> &Dyadic {
        &self.budget
    }

    /// Weight of a string at this level under `table`.
    pub fn element_weight(
        &self,
        sigma: &BitString,
        table: &GranularityTable,
    ) -> Result<WeightBound> {
        let x = table
            .h_fn()
            .iterate(self.level as u32, sigma.len() as u64)?;
        Ok(level_weight(self.level, x))
    }

    /// Append `σ`. Fails, leaving the test unchanged, if the sum would pass
    /// the budget or `h^{(n)}(|σ|)` is not tabulated.
    pub fn push_element(&mut self, sigma: BitString, table: &GranularityTable) -> Result<()> {
        let w = self.element_weight(&sigma, table)?;
        let sum = self.weight_sum.add(&w);
        if sum.hi > self.budget {
            return Err(Error::BudgetExceeded {
                sum: sum.hi.to_string(),
                budget: self.budget.to_string(),
            });
        }
        self.weight_sum = sum;
        self.elements.push(sigma);
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

/// Distinct elements of `t` that are prefixes of `x` of length at most `horizon`.
pub fn covers_count(t: &LevelTest, x: &BitStream, horizon: usize) -> usize {
    t.elements
        .iter()
        .filter(|s| s.len() <= horizon && x.has_prefix(s))
        .collect::<BTreeSet<_>>()
        .len()
}

/// Budget of covers built by [`build_cover`]: `Σ 2^{-i} ≤ 2`.
pub fn cover_budget() -> Dyadic {
    Dyadic::from_int(2)
}

/// Prefixes `σ_0, σ_1, …` of `a` of strictly increasing length, where
/// `y = ĥ^{(n)}(|σ_i|)` satisfies `y > n + log2 n` and
/// `(y-n)^{log2 n} · 2^{-(y-n)} < 2^{-i}`.
pub fn build_cover(a: &BitStream, n: u64, table: &GranularityTable, m: usize) -> Result<LevelTest> {
    let mut test = LevelTest::new(n, table.measure().clone(), cover_budget())?;
    let h_hat = table.h_hat_fn();
    let mut len = 0u64;
    while test.elements.len() < m {
        let i = test.elements.len() as i64;
        len += 1;
        let y = match h_hat.iterate(n as u32, len) {
            Ok(y) => y,
            Err(Error::NotTabulated { .. }) => {
                return Err(Error::TableExhausted {
                    found: test.elements.len(),
                    wanted: m,
                    detail: format!(
                        "h_hat^({n}) tabulated only below length {len}; deepest index reached {}",
                        i - 1
                    ),
                })
            }
            Err(e) => return Err(e),
        };
        if y <= n || !past_log_threshold(n, y - n) {
            continue;
        }
        if level_weight(n, y - n).hi().cmp_pow2(i) != Ordering::Less {
            continue;
        }
        test.push_element(a.prefix(len as usize), table)?;
    }
    Ok(test)
}

/// `x > log2 n`, decided exactly as `2^x > n`.
fn past_log_threshold(n: u64, x: u64) -> bool {
    x >= 64 || (1u64 << x) > n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Holds,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct NestingElement {
    pub index: usize,
    pub length: usize,
    /// `h^{(n)}(|σ|)`
    pub x_level: u64,
    /// `h^{(n-1)}(|σ|)`
    pub x_lower: u64,
    pub head: bool,
    pub comparison: Option<Comparison>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NestingReport {
    pub level: u64,
    pub lower_level: u64,
    /// Elements with `h^{(n)}(|σ|) ≤ threshold` are head exceptions.
    pub threshold: String,
    pub elements: Vec<NestingElement>,
    pub head_count: usize,
    /// Level-(n-1) weight of the head, a finite constant.
    pub head_constant: WeightBound,
    pub tail_sum_lower: WeightBound,
    pub tail_sum_level: WeightBound,
    pub violations: Vec<usize>,
    pub inconclusive: Vec<usize>,
    /// Tail sums compare and the level-(n-1) total fits `budget + head_constant`.
    pub holds: bool,
}

/// Check that a level-n test is a level-(n-1) test.
pub fn check_nesting(t: &LevelTest, table: &GranularityTable) -> Result<NestingReport> {
    check_nesting_elements(t.elements(), t.level(), t.budget(), table)
}

/// [`check_nesting`] for an explicit element list read at level `n`.
pub fn check_nesting_elements(
    elements: &[BitString],
    n: u64,
    budget: &Dyadic,
    table: &GranularityTable,
) -> Result<NestingReport> {
    if n < 2 {
        return Err(Error::validation(
            "level",
            "nesting needs a level of at least 2",
        ));
    }
    let h = table.h_fn();
    let mut rows = Vec::with_capacity(elements.len());
    let mut head_constant = WeightBound::zero();
    let mut tail_lower = WeightBound::zero();
    let mut tail_level = WeightBound::zero();
    let mut violations = Vec::new();
    let mut inconclusive = Vec::new();
    for (index, sigma) in elements.iter().enumerate() {
        let l = sigma.len() as u64;
        let x_lower = h.iterate((n - 1) as u32, l)?;
        let x_level = h.apply(x_lower)?;
        let lower = level_weight(n - 1, x_lower);
        let head = !past_safe_threshold(n, x_level);
        let comparison = if head {
            head_constant = head_constant.add(&lower);
            None
        } else {
            let upper = level_weight(n, x_level);
            tail_lower = tail_lower.add(&lower);
            tail_level = tail_level.add(&upper);
            let c = if lower.hi < upper.lo {
                Comparison::Holds
            } else if lower.lo >= upper.hi {
                violations.push(index);
                Comparison::Violated
            } else {
                inconclusive.push(index);
                Comparison::Inconclusive
            };
            Some(c)
        };
        rows.push(NestingElement {
            index,
            length: sigma.len(),
            x_level,
            x_lower,
            head,
            comparison,
        });
    }
    let head_count = rows.iter().filter(|r| r.head).count();
    let holds = violations.is_empty()
        && inconclusive.is_empty()
        && tail_lower.hi <= tail_level.hi
        && tail_lower.hi <= *budget;
    Ok(NestingReport {
        level: n,
        lower_level: n - 1,
        threshold: format!("2*log2({n})"),
        elements: rows,
        head_count,
        head_constant,
        tail_sum_lower: tail_lower,
        tail_sum_level: tail_level,
        violations,
        inconclusive,
        holds,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MassReport {
    pub count: usize,
    /// `max μ[σ] / (2^{-h(|σ|)})` over the elements; `0` for an empty test.
    pub max_ratio: Dyadic,
    /// Indices where `μ[σ] ≥ 2 · w(1, h(|σ|))`.
    pub violations: Vec<usize>,
}

/// Level-1 weights dominate masses up to a factor below 2.
pub fn solovay_weight_vs_mass(
    t: &LevelTest,
    mu: &dyn MeasureOracle,
    table: &GranularityTable,
) -> Result<MassReport> {
    if t.level() != 1 {
        return Err(Error::validation(
            "level",
            "mass comparison applies to level-1 tests",
        ));
    }
    let mut max_ratio = Dyadic::zero();
    let mut violations = Vec::new();
    for (i, sigma) in t.elements().iter().enumerate() {
        let mass = mu.exact_mass(sigma).ok_or(Error::NotExact {
            operation: "weight versus mass",
        })?;
        let hl = table.h(sigma.len() as u64)?;
        let ratio = mass.mul_pow2(hl as i64);
        if ratio >= Dyadic::from_int(2) {
            violations.push(i);
        }
        max_ratio = max_ratio.max(ratio);
    }
    Ok(MassReport {
        count: t.elements().len(),
        max_ratio,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::granularity::build_table;
    use crate::measures::{bernoulli, lebesgue};

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn f64_weight(n: u64, x: u64) -> f64 {
        (x as f64).powf((n as f64).log2()) * 2f64.powi(-(x as i32))
    }

    #[test]
    fn exact_weights() {
        assert_eq!(level_weight(1, 7), WeightBound::exact(d("1/128")));
        assert_eq!(level_weight(4, 10), WeightBound::exact(d("25/256")));
        assert_eq!(level_weight(2, 6), WeightBound::exact(d("3/32")));
        assert_eq!(level_weight(1, 0), WeightBound::exact(Dyadic::one()));
        assert_eq!(level_weight(3, 0), WeightBound::exact(Dyadic::zero()));
        // x = 4 is a power of two: 4^{log2 3} = 9
        assert_eq!(level_weight(3, 4), WeightBound::exact(d("9/16")));
    }

    #[test]
    fn bounded_weights_enclose_f64() {
        for n in [3u64, 5, 6, 7, 12] {
            for x in [3u64, 5, 7, 10, 33, 100, 300] {
                let w = level_weight(n, x);
                let f = f64_weight(n, x);
                assert!(!w.is_exact());
                assert!(w.lo().to_f64() <= f * (1.0 + 1e-12), "n={n} x={x}");
                assert!(f * (1.0 - 1e-12) <= w.hi().to_f64(), "n={n} x={x}");
                assert!(w.width() <= w.hi().mul_pow2(-30));
            }
        }
    }

    #[test]
    fn weights_decrease_past_safe_region() {
        for n in [1u64, 2, 3, 4, 8, 16] {
            for x in 1..64u64 {
                if !past_safe_threshold(n, x) || x + 1 > 64 {
                    continue;
                }
                assert!(
                    level_weight(n, x + 1).certainly_below(&level_weight(n, x)),
                    "n={n} x={x}"
                );
            }
        }
    }

    #[test]
    fn push_examples() {
        let leb = build_table(&*lebesgue(), 14, 12).unwrap();
        let mut t = LevelTest::new(1, leb.measure().clone(), d("4")).unwrap();
        t.push_element(b("0101"), &leb).unwrap();
        assert_eq!(t.weight_sum(), &WeightBound::exact(d("1/16")));
        t.push_element(b(""), &leb).unwrap();
        assert_eq!(t.weight_sum(), &WeightBound::exact(d("17/16")));

        let bt = build_table(&*bernoulli(d("1/4")).unwrap(), 14, 8).unwrap();
        let mut t = LevelTest::new(2, bt.measure().clone(), d("1")).unwrap();
        t.push_element(b("01101"), &bt).unwrap();
        assert_eq!(t.weight_sum(), &WeightBound::exact(d("1/2")));
        t.push_element(b("11111"), &bt).unwrap();
        assert_eq!(t.weight_sum(), &WeightBound::exact(d("1")));
        assert!(matches!(
            t.push_element(b("0"), &bt),
            Err(Error::BudgetExceeded { .. })
        ));
        assert_eq!(t.elements().len(), 2);
        assert!(matches!(
            t.push_element(BitString::repeat(true, 40), &bt),
            Err(Error::NotTabulated { .. })
        ));
    }

    #[test]
    fn covers_count_examples() {
        let leb = build_table(&*lebesgue(), 10, 8).unwrap();
        let mut t = LevelTest::new(1, leb.measure().clone(), d("2")).unwrap();
        for s in ["0", "01", "010", "010"] {
            t.push_element(b(s), &leb).unwrap();
        }
        let x = BitStream::alternating();
        assert_eq!(covers_count(&t, &x, 10), 3);
        assert_eq!(covers_count(&t, &x, 2), 2);
        assert_eq!(covers_count(&t, &BitStream::ones(), 10), 0);
    }

    #[test]
    fn cover_examples() {
        let leb = build_table(&*lebesgue(), 40, 30).unwrap();
        let x = BitStream::alternating();
        let t = build_cover(&x, 1, &leb, 0).unwrap();
        assert!(t.elements().is_empty());
        let t = build_cover(&x, 1, &leb, 10).unwrap();
        assert_eq!(covers_count(&t, &x, 100), 10);
        assert!(t.weight_sum().hi() <= &cover_budget());

        let bt = build_table(&*bernoulli(d("1/4")).unwrap(), 14, 8).unwrap();
        let t = build_cover(&x, 1, &bt, 3).unwrap();
        let lens: Vec<usize> = t.elements().iter().map(|s| s.len()).collect();
        assert!(lens.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(
            build_cover(&x, 1, &bt, 50),
            Err(Error::TableExhausted { .. })
        ));
    }

    #[test]
    fn nesting_examples() {
        let leb = build_table(&*lebesgue(), 24, 20).unwrap();
        let elems: Vec<BitString> = (8..=20).map(|l| BitString::repeat(false, l)).collect();
        let r = check_nesting_elements(&elems, 2, &d("2"), &leb).unwrap();
        assert_eq!(r.head_count, 0);
        assert!(r.holds);

        let r = check_nesting_elements(&[b("0")], 2, &d("2"), &leb).unwrap();
        assert_eq!(r.head_count, 1);
        assert!(r.elements[0].comparison.is_none());
    }

    #[test]
    fn mass_ratio_examples() {
        let mu = bernoulli(d("1/4")).unwrap();
        let bt = build_table(&*mu, 14, 8).unwrap();
        let mut t = LevelTest::new(1, bt.measure().clone(), d("4")).unwrap();
        t.push_element(b("000"), &bt).unwrap();
        let r = solovay_weight_vs_mass(&t, &*mu, &bt).unwrap();
        assert_eq!(r.max_ratio, d("27/16"));
        assert!(r.violations.is_empty());

        let empty = LevelTest::new(1, bt.measure().clone(), d("1")).unwrap();
        let r = solovay_weight_vs_mass(&empty, &*mu, &bt).unwrap();
        assert_eq!(r.count, 0);

        let leb = lebesgue();
        let lt = build_table(&*leb, 10, 8).unwrap();
        let mut t = LevelTest::new(1, lt.measure().clone(), d("4")).unwrap();
        t.push_element(b("0110"), &lt).unwrap();
        assert_eq!(
            solovay_weight_vs_mass(&t, &*leb, &lt).unwrap().max_ratio,
            Dyadic::one()
        );
    }

    #[test]
    fn json_layout() {
        let leb = build_table(&*lebesgue(), 10, 8).unwrap();
        let mut t = LevelTest::new(1, leb.measure().clone(), d("2")).unwrap();
        t.push_element(b("01"), &leb).unwrap();
        let v = t.to_json();
        assert_eq!(v["elements"], serde_json::json!(["01"]));
        assert_eq!(v["weight_sum"]["hi"], "1/2^2");
        assert_eq!(v["budget"], "2/2^0");
        let file: LevelTestFile = serde_json::from_value(v).unwrap();
        let back = LevelTest::replay(&file, &leb).unwrap();
        assert_eq!(back.weight_sum(), t.weight_sum());
    }
}
