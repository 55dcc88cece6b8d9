//! Enumeration operators given by finite rule tables, the padding
//! construction `B ↦ C` for a set `B` enumerated above an oracle `A`, and the
//! lifting of a level-2n test of `A` to a level-n test failed by `C`.
//!
//! A rule `(j, π, s)` puts `j` into `W^X_{e,t}` for every oracle `X` extending
//! `π` and every step `t ≥ max(s, j)`. The rule `(0, "", 1)` is always present.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::bits::{BitStream, BitString};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::granularity::GranularityTable;
use crate::solovay::{
    covers_count, level_weight, past_safe_threshold, Comparison, LevelTest, WeightBound,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rule {
    pub j: u64,
    #[serde(default)]
    pub prefix: BitString,
    pub s: u64,
}

/// Every `j ≥ from` is enumerated at step `max(s, j)` above `prefix`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CofiniteRule {
    pub from: u64,
    #[serde(default)]
    pub prefix: BitString,
    pub s: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorFile {
    rules: Vec<Rule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cofinite: Option<CofiniteRule>,
}

/// A validated rule table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationOperator {
    rules: Vec<Rule>,
    cofinite: Option<CofiniteRule>,
    by_target: BTreeMap<u64, Vec<usize>>,
}

/// What an operator may inspect of its oracle.
#[derive(Clone, Copy)]
pub enum Oracle<'a> {
    Stream(&'a BitStream),
    Prefix(&'a BitString),
}

impl Oracle<'_> {
    fn extends(&self, pi: &BitString) -> bool {
        match self {
            Oracle::Stream(x) => x.has_prefix(pi),
            Oracle::Prefix(sigma) => pi.is_prefix_of(sigma),
        }
    }
}

impl EnumerationOperator {
    pub fn new(rules: Vec<Rule>, cofinite: Option<CofiniteRule>) -> Result<Self> {
        for (i, r) in rules.iter().enumerate() {
            if r.prefix.len() as u64 > r.s {
                return Err(Error::validation(
                    "operator",
                    format!(
                        "rule {i} reads {} oracle bits by step {}",
                        r.prefix.len(),
                        r.s
                    ),
                ));
            }
            if r.j > r.s {
                return Err(Error::validation(
                    "operator",
                    format!(
                        "rule {i} enumerates {} at step {}, before it may halt",
                        r.j, r.s
                    ),
                ));
            }
        }
        if let Some(c) = &cofinite {
            if c.prefix.len() as u64 > c.s {
                return Err(Error::validation(
                    "operator",
                    format!(
                        "cofinite rule reads {} oracle bits by step {}",
                        c.prefix.len(),
                        c.s
                    ),
                ));
            }
        }
        let mut by_target: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (i, r) in rules.iter().enumerate() {
            by_target.entry(r.j).or_default().push(i);
        }
        Ok(EnumerationOperator {
            rules,
            cofinite,
            by_target,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: OperatorFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            position: e.column(),
            message: e.to_string(),
        })?;
        EnumerationOperator::new(file.rules, file.cofinite)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(OperatorFile {
            rules: self.rules.clone(),
            cofinite: self.cofinite.clone(),
        })
        .expect("serializable")
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn cofinite(&self) -> Option<&CofiniteRule> {
        self.cofinite.as_ref()
    }

    /// The least step at which `j` is enumerated above `oracle`, if ever.
    pub fn settle(&self, j: u64, oracle: Oracle<'_>) -> Option<u64> {
        let mut best = (j == 0).then_some(1);
        let mut offer = |s: u64| {
            let t = s.max(j);
            best = Some(best.map_or(t, |b: u64| b.min(t)));
        };
        for &i in self.by_target.get(&j).into_iter().flatten() {
            let r = &self.rules[i];
            if oracle.extends(&r.prefix) {
                offer(r.s);
            }
        }
        if let Some(c) = &self.cofinite {
            if j >= c.from && oracle.extends(&c.prefix) {
                offer(c.s);
            }
        }
        best
    }
}

/// Rules `(1, "", 37)`, `(3, "", 134)`, `(4, "", 28)`, and every `j ≥ 5`
/// enumerated as soon as allowed, so that `B = ℕ ∖ {2}`.
pub fn example_operator() -> EnumerationOperator {
    let rule = |j, s| Rule {
        j,
        prefix: BitString::new(),
        s,
    };
    EnumerationOperator::new(
        vec![rule(1, 37), rule(3, 134), rule(4, 28)],
        Some(CofiniteRule {
            from: 5,
            prefix: BitString::new(),
            s: 1,
        }),
    )
    .expect("valid")
}

/// `W^A_{e,s}`: every `j ≤ s` enumerated by step `s`.
pub fn enumerate(op: &EnumerationOperator, a: &BitStream, s: u64) -> BTreeSet<u64> {
    (0..=s)
        .filter(|&j| op.settle(j, Oracle::Stream(a)).is_some_and(|t| t <= s))
        .collect()
}

/// A settling time, or `Top` when none was seen by the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Settling {
    Step(u64),
    Top,
}

impl Settling {
    pub fn step(self) -> Option<u64> {
        match self {
            Settling::Step(s) => Some(s),
            Settling::Top => None,
        }
    }
}

impl fmt::Display for Settling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Settling::Step(s) => write!(f, "{s}"),
            Settling::Top => f.write_str("top"),
        }
    }
}

impl Serialize for Settling {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Settling::Step(v) => s.serialize_u64(*v),
            Settling::Top => s.serialize_str("top"),
        }
    }
}

pub fn settling(op: &EnumerationOperator, a: &BitStream, j: u64, cap: u64) -> Settling {
    match op.settle(j, Oracle::Stream(a)) {
        Some(t) if t <= cap => Settling::Step(t),
        _ => Settling::Top,
    }
}

/// The padded set `C` and everything it was built from.
#[derive(Debug, Clone, Serialize)]
pub struct ReaRun {
    #[serde(serialize_with = "ser_label")]
    oracle: BitStream,
    i_max: u64,
    cap: u64,
    /// `b_0 … b_{i_max}`
    b: BitString,
    /// `settling[j]` for `j ≤ m_{i_max}`
    settling: Vec<Settling>,
    m: Vec<u64>,
    f: Vec<u64>,
    c: BitString,
}

fn ser_label<S: Serializer>(x: &BitStream, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(x.label())
}

impl ReaRun {
    pub fn oracle(&self) -> &BitStream {
        &self.oracle
    }

    pub fn b(&self) -> &BitString {
        &self.b
    }

    pub fn f(&self) -> &[u64] {
        &self.f
    }

    pub fn m(&self) -> &[u64] {
        &self.m
    }

    pub fn settling(&self) -> &[Settling] {
        &self.settling
    }

    /// `C_{i_max}`.
    pub fn c(&self) -> &BitString {
        &self.c
    }

    pub fn i_max(&self) -> u64 {
        self.i_max
    }

    /// One row per index: `(i, b_i, f(i), rendered block)`.
    pub fn table_rows(&self) -> Vec<(u64, bool, u64, String)> {
        (0..=self.i_max)
            .map(|i| {
                let bi = self.b.as_slice()[i as usize];
                let fi = self.f[i as usize];
                let mut block = if bi {
                    format!("1^{fi}")
                } else {
                    "0".to_string()
                };
                if i < self.i_max {
                    block.push_str(" 0");
                }
                (i, bi, fi, block)
            })
            .collect()
    }
}

/// Build `C_{i_max} = b_0^{f(0)} 0 b_1^{f(1)} 0 … b_{i_max}^{f(i_max)}`.
///
/// `j ∈ B` when it settles by `cap`. `m_i` is the least element of `B`
/// above `i`; `f(i)` is the largest settling time among elements of `B` up
/// to `m_i` when `i ∈ B`, and `1` otherwise.
pub fn construction_one(
    op: &EnumerationOperator,
    a: &BitStream,
    i_max: u64,
    cap: u64,
) -> Result<ReaRun> {
    if cap < 1 {
        return Err(Error::validation("cap", "cap must be at least 1"));
    }
    let settle_at = |j: u64| settling(op, a, j, cap);
    let mut m = Vec::with_capacity(i_max as usize + 1);
    let mut next = 0u64;
    for i in 0..=i_max {
        if next <= i {
            next = i + 1;
            loop {
                if next > cap {
                    return Err(Error::CapExceeded {
                        what: format!("an element of B above {i}"),
                        cap,
                    });
                }
                if settle_at(next) != Settling::Top {
                    break;
                }
                next += 1;
            }
        }
        m.push(next);
    }
    let settling: Vec<Settling> = (0..=*m.last().expect("i_max + 1 entries"))
        .map(settle_at)
        .collect();
    let in_b = |j: u64| settling[j as usize] != Settling::Top;
    let b = BitString::from_bits((0..=i_max).map(in_b).collect());
    let mut f = Vec::with_capacity(m.len());
    let mut running = 0u64;
    let mut upto = 0u64;
    for i in 0..=i_max {
        while upto <= m[i as usize] {
            if let Settling::Step(s) = settling[upto as usize] {
                running = running.max(s);
            }
            upto += 1;
        }
        f.push(if in_b(i) { running } else { 1 });
    }
    let mut c = BitString::new();
    for i in 0..=i_max {
        if i > 0 {
            c.push(false);
        }
        let bi = in_b(i);
        c.push_run(bi, f[i as usize] as usize);
    }
    Ok(ReaRun {
        oracle: a.clone(),
        i_max,
        cap,
        b,
        settling,
        m,
        f,
        c,
    })
}

/// Read the bits of `B` back from a prefix of `C`.
///
/// A run `1^k` is a `1`; a lone `0` block is a `0`. Blocks are separated by a
/// single `0`, and a trailing separator is allowed.
pub fn decode_b(c: &BitString) -> Result<BitString> {
    let bits = c.as_slice();
    let mut out = BitString::new();
    let mut p = 0usize;
    while p < bits.len() {
        if bits[p] {
            while p < bits.len() && bits[p] {
                p += 1;
            }
            out.push(true);
        } else {
            out.push(false);
            p += 1;
            if p < bits.len() && bits[p] {
                return Err(Error::Malformed {
                    position: p,
                    reason: "a zero block must be followed by a separator".into(),
                });
            }
        }
        if p < bits.len() {
            // bits[p] is the separator
            p += 1;
        }
    }
    Ok(out)
}

/// `t(σ, n)`: `{σ}` if `|σ| < n`, else `{σ↾n} ∪ {σ↾i ⌢ 1^{|σ|-i} : i ≤ n}`.
pub fn t_transform(sigma: &BitString, n: u64) -> BTreeSet<BitString> {
    let len = sigma.len();
    if (len as u64) < n {
        return BTreeSet::from([sigma.clone()]);
    }
    let n = n as usize;
    let mut out = BTreeSet::from([sigma.truncate_to(n)]);
    for i in 0..=n {
        let mut s = sigma.truncate_to(i);
        s.push_run(true, len - i);
        out.insert(s);
    }
    out
}

/// The guess `τ` for a prefix of `C` computed from a finite oracle prefix `σ`,
/// using only `W^σ_{e,|σ|}`; always `|τ| = |σ|`.
pub fn approx_tau(sigma: &BitString, op: &EnumerationOperator) -> BitString {
    let l = sigma.len() as u64;
    let settle: Vec<Option<u64>> = (0..=l)
        .map(|j| op.settle(j, Oracle::Prefix(sigma)).filter(|&t| t <= l))
        .collect();
    // b_{i,l+1} = 1 by convention
    let b = |j: u64| j == l + 1 || settle[j as usize].is_some();
    let mut tau = BitString::new();
    for k in 0..=l {
        if tau.len() as u64 >= l {
            break;
        }
        if k > 0 {
            tau.push(false);
        }
        let fk = if !b(k) {
            1
        } else {
            let mk = (k + 1..=l + 1).find(|&j| b(j)).expect("l + 1 is in");
            if mk == l + 1 {
                l
            } else {
                (0..=mk)
                    .filter_map(|j| settle[j as usize])
                    .max()
                    .unwrap_or(1)
            }
        };
        tau.push_run(b(k), fk as usize);
    }
    tau.truncate_to(l as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverStatus {
    /// Some produced element is a prefix of `C`.
    Covered,
    NotCovered,
    /// `C` is too short to decide.
    Undetermined,
    /// `σ_i` is not a prefix of the oracle; the claim says nothing.
    OffOracle,
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftedElement {
    pub index: usize,
    pub sigma: BitString,
    pub tau: BitString,
    /// `ĥ^{(n)}(|σ_i|)`
    pub h_hat_n: u64,
    pub produced: Vec<BitString>,
    pub contribution: WeightBound,
    /// `3 · w(2n, h^{(2n)}(|σ_i|))`
    pub bound: WeightBound,
    pub past_threshold: bool,
    pub comparison: Option<Comparison>,
    pub cover: CoverStatus,
    pub cover_witness: Option<BitString>,
    /// First `j` with `b_{i,j} ≠ b_j`, when both are known.
    pub first_disagreement: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftReport {
    pub level: u64,
    pub source_level: u64,
    pub lifted: LevelTest,
    pub elements: Vec<LiftedElement>,
    pub inconclusive: Vec<usize>,
    pub violations: Vec<usize>,
    /// Distinct lifted elements that are prefixes of `C`.
    pub covers_count: usize,
    pub horizon: usize,
}

fn scale3(w: &WeightBound) -> WeightBound {
    w.add(w).add(w)
}

/// Lift a level-2n test `{σ_i}` to `⋃_i t(τ_i, ĥ^{(n)}(|σ_i|))` at level n
/// and check the lifted family against `C` from `run`. When a contribution
/// bound is violated the lifted test is left empty and the report lists the
/// offending indices.
pub fn lift_test(
    t: &LevelTest,
    op: &EnumerationOperator,
    table: &GranularityTable,
    run: &ReaRun,
) -> Result<LiftReport> {
    let source_level = t.level();
    if !source_level.is_multiple_of(2) {
        return Err(Error::validation(
            "level",
            "lifting needs an even source level",
        ));
    }
    let n = source_level / 2;
    let h = table.h_fn();
    let c = run.c();
    let mut elements = Vec::with_capacity(t.elements().len());
    let mut violations = Vec::new();
    let mut inconclusive = Vec::new();
    let mut head_total = Dyadic::zero();
    for (index, sigma) in t.elements().iter().enumerate() {
        let l = sigma.len() as u64;
        let tau = approx_tau(sigma, op);
        let h_hat_n = table.h_hat_fn().iterate(n as u32, l)?;
        let produced: Vec<BitString> = t_transform(&tau, h_hat_n).into_iter().collect();
        let mut contribution = WeightBound::zero();
        for e in &produced {
            let x = h.iterate(n as u32, e.len() as u64)?;
            contribution = contribution.add(&level_weight(n, x));
        }
        let x2n = h.iterate(source_level as u32, l)?;
        let xn = h.iterate(n as u32, l)?;
        let bound = scale3(&level_weight(source_level, x2n));
        let past_threshold = past_safe_threshold(source_level, x2n) && h_hat_n + 1 < 2 * xn;
        let comparison = if past_threshold {
            let c = if contribution.hi() <= bound.lo() {
                Comparison::Holds
            } else if contribution.lo() > bound.hi() {
                violations.push(index);
                Comparison::Violated
            } else {
                inconclusive.push(index);
                Comparison::Inconclusive
            };
            Some(c)
        } else {
            head_total += contribution.hi();
            None
        };
        let (cover, cover_witness) = if !run.oracle().has_prefix(sigma) {
            (CoverStatus::OffOracle, None)
        } else if let Some(w) = produced
            .iter()
            .find(|e| e.len() <= c.len() && e.is_prefix_of(c))
        {
            (CoverStatus::Covered, Some(w.clone()))
        } else if produced.iter().any(|e| e.len() > c.len()) {
            (CoverStatus::Undetermined, None)
        } else {
            (CoverStatus::NotCovered, None)
        };
        let first_disagreement = first_disagreement(sigma, op, run);
        elements.push(LiftedElement {
            index,
            sigma: sigma.clone(),
            tau,
            h_hat_n,
            produced,
            contribution,
            bound,
            past_threshold,
            comparison,
            cover,
            cover_witness,
            first_disagreement,
        });
    }
    let budget = &(&t.budget().clone() * &Dyadic::from_int(3)) + &head_total;
    let mut lifted = LevelTest::new(n, table.measure().clone(), budget)?;
    if violations.is_empty() {
        let mut seen = BTreeSet::new();
        for e in elements.iter().flat_map(|e| e.produced.iter()) {
            if seen.insert(e.clone()) {
                lifted.push_element(e.clone(), table)?;
            }
        }
    }
    let horizon = c.len();
    let target = BitStream::from_prefix(c.clone(), false);
    let covers = covers_count(&lifted, &target, horizon);
    Ok(LiftReport {
        level: n,
        source_level,
        lifted,
        elements,
        inconclusive,
        violations,
        covers_count: covers,
        horizon,
    })
}

fn first_disagreement(sigma: &BitString, op: &EnumerationOperator, run: &ReaRun) -> Option<u64> {
    let l = sigma.len() as u64;
    (0..=l.min(run.i_max())).find(|&j| {
        let approx = op.settle(j, Oracle::Prefix(sigma)).is_some_and(|t| t <= l);
        approx != run.b().as_slice()[j as usize]
    })
}
