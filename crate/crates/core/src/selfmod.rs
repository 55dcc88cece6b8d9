//! Self-modulus padding, the test family `T_k` it fails, the domination
//! iteration, the weakly generic variant, and the tree `S` of padded strings.
//!
//! Block `n` of the padded real is `1^{f(l_{n-1})} 0 a_n`, where `l_{n-1}` is
//! the length built so far (`0` before the first block).

use std::cmp::Ordering;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::bits::{BitStream, BitString};
use crate::dyadic::{Dyadic, Rounding};
use crate::error::{Error, Result};
use crate::granularity::{GranularityTable, Padding, Tabulated};
use crate::solovay::{level_weight, LevelTest, WeightBound};

pub use crate::modulus::{classify_in_tree, ModulusFunction, TreePosition};

/// Longest padded prefix that will be materialized, in bits.
pub const MAX_MATERIALIZED_BITS: u64 = 1 << 26;

/// The padded real `B` built from `A` and a modulus `f`.
#[derive(Debug, Clone, Serialize)]
pub struct SelfModRun {
    modulus: ModulusFunction,
    /// `a_0 … a_n` consumed from the oracle.
    a: BitString,
    /// `l_0 … l_n`
    lengths: Vec<u64>,
    /// `B_n`
    b: BitString,
}

impl SelfModRun {
    pub fn modulus(&self) -> &ModulusFunction {
        &self.modulus
    }

    pub fn a(&self) -> &BitString {
        &self.a
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    /// The last built block `B_n`.
    pub fn b(&self) -> &BitString {
        &self.b
    }

    /// `B_i` for a built block.
    pub fn block(&self, i: usize) -> BitString {
        self.b.truncate_to(self.lengths[i] as usize)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

fn padded_len(start: u64, f: &ModulusFunction) -> Result<u64> {
    let ones = f.eval(start)?;
    let end = start
        .checked_add(ones)
        .and_then(|v| v.checked_add(2))
        .filter(|&v| v <= MAX_MATERIALIZED_BITS);
    end.ok_or(Error::Overflow {
        what: "padded prefix length",
        value: format!("{start} + f({start}) + 2"),
    })
}

/// `B_0 = 1^{f(0)} 0 a_0`, `B_{n+1} = B_n 1^{f(l_n)} 0 a_{n+1}`.
pub fn construction_two(f: &ModulusFunction, a: &BitStream, n_blocks: usize) -> Result<SelfModRun> {
    f.validate()?;
    let mut b = BitString::new();
    let mut lengths = Vec::with_capacity(n_blocks + 1);
    let mut bits = BitString::new();
    for n in 0..=n_blocks {
        let start = b.len() as u64;
        let end = padded_len(start, f)?;
        let an = a.bit(n);
        b.push_run(true, (end - start - 2) as usize);
        b.push(false);
        b.push(an);
        bits.push(an);
        lengths.push(end);
    }
    Ok(SelfModRun {
        modulus: f.clone(),
        a: bits,
        lengths,
        b,
    })
}

/// Read `a_0 … a_n` back from `B_n`.
pub fn decode_a(b: &BitString, f: &ModulusFunction) -> Result<BitString> {
    let bits = b.as_slice();
    let mut out = BitString::new();
    let mut p = 0usize;
    while p < bits.len() {
        let ones = f.eval(p as u64)?;
        let sep = (p as u64).saturating_add(ones);
        if sep + 2 > bits.len() as u64 {
            return Err(Error::Malformed {
                position: bits.len(),
                reason: format!("block at {p} needs {} bits", ones + 2),
            });
        }
        let sep = sep as usize;
        if let Some(off) = (p..sep).find(|&i| !bits[i]) {
            return Err(Error::Malformed {
                position: off,
                reason: "expected a padding 1".into(),
            });
        }
        if bits[sep] {
            return Err(Error::Malformed {
                position: sep,
                reason: "expected the separator 0".into(),
            });
        }
        out.push(bits[sep + 1]);
        p = sep + 2;
    }
    Ok(out)
}

/// Classify `σ` against the tree `S` of strings padded by `f`.
pub fn nscr_s_membership(f: &ModulusFunction, sigma: &BitString) -> TreePosition {
    classify_in_tree(f, sigma)
}

/// The length of the padding appended to strings of length `i` in `T_k`.
pub fn tk_padding(pad: Tabulated<'_>, k: u32, i: u64) -> Result<u64> {
    pad.iterate(k, 2 * i)
}

/// `T_k = {σ 1^{ĝ^{(k)}(2|σ|)}}` for `|σ| ≤ max_len`, weighed at level `k`.
pub fn tk_enumerate(
    table: &GranularityTable,
    k: u32,
    max_len: usize,
    padding: Padding,
) -> Result<LevelTest> {
    let bound = tk_weight_bound(table, k, max_len as u64, padding)?;
    let mut test = LevelTest::new(k as u64, table.measure().clone(), bound.hi().clone())?;
    let pad = table.padding_fn(padding);
    for i in 0..=max_len {
        let p = tk_padding(pad, k, i as u64)?;
        for sigma in BitString::all_of_length(i) {
            let mut tau = sigma;
            tau.push_run(true, p as usize);
            test.push_element(tau, table)?;
        }
    }
    Ok(test)
}

/// The split `|σ|` if `τ = σ 1^{ĝ^{(k)}(2|σ|)}`.
pub fn tk_contains(
    tau: &BitString,
    table: &GranularityTable,
    k: u32,
    padding: Padding,
) -> Result<Option<usize>> {
    let bits = tau.as_slice();
    let len = bits.len();
    let first_one_of_run = bits.iter().rposition(|b| !*b).map_or(0, |z| z + 1);
    let pad = table.padding_fn(padding);
    // j + ĝ^{(k)}(2j) is strictly increasing in j
    for j in first_one_of_run..=len {
        let total = j as u64 + tk_padding(pad, k, j as u64)?;
        match total.cmp(&(len as u64)) {
            Ordering::Less => continue,
            Ordering::Equal => return Ok(Some(j)),
            Ordering::Greater => return Ok(None),
        }
    }
    Ok(None)
}

fn ceil_log2(k: u64) -> u32 {
    64 - (k - 1).leading_zeros()
}

/// `(2i)^{log2 k} 2^{-i}`
fn majorant_term(k: u64, i: u64) -> WeightBound {
    let w = level_weight(k, 2 * i);
    let s = Dyadic::pow2(i as i64);
    WeightBound::enclosure(w.lo() * &s, w.hi() * &s)
}

/// Upper bound for the full level-k weight of `T_k`:
/// `Σ_{log k < i ≤ i_max} (2i)^{log k} 2^{-i}`, a ratio-test tail beyond
/// `i_max`, and `γ_k`, the exact head over `i ≤ log k` from the table.
pub fn tk_weight_bound(
    table: &GranularityTable,
    k: u32,
    i_max: u64,
    padding: Padding,
) -> Result<WeightBound> {
    if k == 0 {
        return Err(Error::validation("k", "k must be at least 1"));
    }
    let kk = k as u64;
    let h = table.h_fn();
    let pad = table.padding_fn(padding);
    let mut gamma = WeightBound::zero();
    let mut i = 0u64;
    while (1u64 << i) <= kk {
        let len = i + tk_padding(pad, k, i)?;
        let x = h.iterate(k, len)?;
        let w = level_weight(kk, x);
        let s = Dyadic::pow2(i as i64);
        gamma = gamma.add(&WeightBound::enclosure(w.lo() * &s, w.hi() * &s));
        i += 1;
    }
    let first = i;
    let e = ceil_log2(kk);
    let mut sum = WeightBound::zero();
    let mut last = i_max.max(first);
    for i in first..=last {
        sum = sum.add(&majorant_term(kk, i));
    }
    // ratio a_{i+1}/a_i ≤ ((i+1)/i)^e / 2, decreasing in i
    let ratio_at = |i: u64| {
        let num = num_traits::pow(BigUint::from(i + 1), e as usize);
        let den = num_traits::pow(BigUint::from(i), e as usize) * 2u32;
        Dyadic::div_round(
            &Dyadic::from_bigint(num.into()),
            &Dyadic::from_bigint(den.into()),
            64,
            Rounding::Up,
        )
    };
    while ratio_at(last + 1) >= Dyadic::from_int(3).mul_pow2(-2) {
        last += 1;
        sum = sum.add(&majorant_term(kk, last));
    }
    let next = majorant_term(kk, last + 1);
    let one_minus = &Dyadic::one() - &ratio_at(last + 1);
    let p = next.hi().exponent() + 64;
    let tail = Dyadic::div_round(next.hi(), &one_minus, p, Rounding::Up);
    let total = sum.add(&gamma);
    let hi = total.hi() + &tail;
    Ok(WeightBound::enclosure(total.lo().clone(), hi))
}

/// `G(0) = ĝ^{(k)}(2·start + 1)`, `G(i+1) = G(i) + ĝ^{(k)}(2G(i)+1) + 2`.
pub fn domination_g(
    table: &GranularityTable,
    k: u32,
    start: u64,
    steps: usize,
    padding: Padding,
) -> Result<Vec<u64>> {
    let pad = table.padding_fn(padding);
    let exhausted = |found: usize, e: Error| match e {
        Error::NotTabulated { arg, .. } => Error::TableExhausted {
            found,
            wanted: steps + 1,
            detail: format!(
                "padding not tabulated at {arg}; deepest index {}",
                found as i64 - 1
            ),
        },
        other => other,
    };
    let arg = |g: u64| {
        g.checked_mul(2)
            .and_then(|v| v.checked_add(1))
            .unwrap_or(u64::MAX)
    };
    let mut out = vec![pad.iterate(k, arg(start)).map_err(|e| exhausted(0, e))?];
    for i in 0..steps {
        let g = out[i];
        let next = pad.iterate(k, arg(g)).map_err(|e| exhausted(i + 1, e))?;
        out.push(g + next + 2);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct DominationReport {
    pub k: u32,
    pub n0: usize,
    /// `ĝ^{(k)}(2l_m+1) > f(l_m)` for every built `m ≥ n0`.
    pub hypothesis_holds: bool,
    pub g: Vec<u64>,
    pub lengths: Vec<u64>,
    /// `G(i) ≥ l_{n0+i}` for each built index.
    pub dominated: Vec<bool>,
}

/// Replay the domination induction from block `n0` over a built run.
pub fn domination_check(
    run: &SelfModRun,
    table: &GranularityTable,
    k: u32,
    n0: usize,
    padding: Padding,
) -> Result<DominationReport> {
    let lengths = run.lengths();
    if n0 >= lengths.len() {
        return Err(Error::validation("n0", "start block is beyond the run"));
    }
    let pad = table.padding_fn(padding);
    let mut hypothesis_holds = true;
    for &l in &lengths[n0..] {
        let lhs = pad.iterate(k, 2 * l + 1)?;
        if BigUint::from(lhs) <= run.modulus().eval_big(l)? {
            hypothesis_holds = false;
        }
    }
    let steps = lengths.len() - 1 - n0;
    let g = domination_g(table, k, lengths[n0], steps, padding)?;
    let dominated = g.iter().zip(&lengths[n0..]).map(|(g, l)| g >= l).collect();
    Ok(DominationReport {
        k,
        n0,
        hypothesis_holds,
        g,
        lengths: lengths[n0..].to_vec(),
        dominated,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureEntry {
    pub n: usize,
    pub l_n: u64,
    /// `f(l_n)` in decimal.
    pub f_l_n: String,
    /// `ĝ^{(k)}(2l_n+1)` under the approximate padding.
    pub padding_at: u64,
    pub fails: bool,
    /// `g^{(k)}(2l_n+1)` when `g` is tabulated that far.
    pub exact_padding_at: Option<u64>,
    pub exact_fails: Option<bool>,
    /// `ĝ^{(k)}(2l_n)`, the padding in the witness `B_n 1^{ĝ^{(k)}(2l_n)}`.
    pub witness_padding: Option<u64>,
    pub witness_len: Option<u64>,
    /// The witness is a prefix of `B`: its padding is at most `f(l_n)`, and
    /// when `B_{n+1}` is built the witness is literally a prefix of it.
    pub witness_prefix_of_b: Option<bool>,
    /// The witness decomposes as an element of `T_k`.
    pub witness_in_tk: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureReport {
    pub k: u32,
    pub entries: Vec<FailureEntry>,
    /// `n` with `ĝ^{(k)}(2l_n+1) < f(l_n)`.
    pub failures: Vec<usize>,
    /// The same with the exact granularity.
    pub exact_failures: Vec<usize>,
    /// Failure indices whose witness did not verify.
    pub unverified: Vec<usize>,
}

/// Blocks `n` where the run exceeds the padding, with verified witnesses.
pub fn failure_indices(
    run: &SelfModRun,
    table: &GranularityTable,
    k: u32,
) -> Result<FailureReport> {
    let pad = table.padding_fn(Padding::Approx);
    let exact = table.padding_fn(Padding::Exact);
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    let mut exact_failures = Vec::new();
    let mut unverified = Vec::new();
    for (n, &l) in run.lengths().iter().enumerate() {
        let f_l = run.modulus().eval_big(l)?;
        let padding_at = pad.iterate(k, 2 * l + 1)?;
        let fails = BigUint::from(padding_at) < f_l;
        let exact_padding_at = exact.iterate(k, 2 * l + 1).ok();
        let exact_fails = exact_padding_at.map(|v| BigUint::from(v) < f_l);
        let mut entry = FailureEntry {
            n,
            l_n: l,
            f_l_n: f_l.to_string(),
            padding_at,
            fails,
            exact_padding_at,
            exact_fails,
            witness_padding: None,
            witness_len: None,
            witness_prefix_of_b: None,
            witness_in_tk: None,
        };
        if exact_fails == Some(true) {
            exact_failures.push(n);
        }
        if fails {
            failures.push(n);
            let p = pad.iterate(k, 2 * l)?;
            let mut witness = run.block(n);
            witness.push_run(true, p as usize);
            let mut prefix_ok = BigUint::from(p) <= f_l;
            if n + 1 < run.lengths().len() {
                prefix_ok &= witness.is_prefix_of(run.b());
            }
            let in_tk = tk_contains(&witness, table, k, Padding::Approx)? == Some(l as usize);
            if !(prefix_ok && in_tk) {
                unverified.push(n);
            }
            entry.witness_padding = Some(p);
            entry.witness_len = Some(witness.len() as u64);
            entry.witness_prefix_of_b = Some(prefix_ok);
            entry.witness_in_tk = Some(in_tk);
        }
        entries.push(entry);
    }
    Ok(FailureReport {
        k,
        entries,
        failures,
        exact_failures,
        unverified,
    })
}

/// A c.e. set of strings with a finite search budget: only extensions of at
/// most `budget` extra bits are examined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DenseSet {
    /// Every string.
    All {},
    /// No string; absence is certified.
    Empty {},
    /// A finite list; absence is certified.
    Finite { strings: Vec<BitString> },
    /// Strings ending in `word`.
    Suffix { word: BitString, budget: usize },
    /// Strings containing `word`.
    Contains { word: BitString, budget: usize },
}

/// Largest search budget accepted, in extra bits.
pub const MAX_SEARCH_BUDGET: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Search {
    Found(BitString),
    Absent,
    Indeterminate,
}

fn contains_word(s: &BitString, w: &BitString) -> bool {
    w.is_empty() || s.as_slice().windows(w.len()).any(|win| win == w.as_slice())
}

fn length_lex_search(
    prefix: &BitString,
    budget: usize,
    member: impl Fn(&BitString) -> bool,
) -> Search {
    for extra in 0..=budget {
        for ext in BitString::all_of_length(extra) {
            let tau = prefix.concat(&ext);
            if member(&tau) {
                return Search::Found(tau);
            }
        }
    }
    Search::Indeterminate
}

impl DenseSet {
    pub fn validate(&self) -> Result<()> {
        match self {
            DenseSet::Suffix { budget, .. } | DenseSet::Contains { budget, .. }
                if *budget > MAX_SEARCH_BUDGET =>
            {
                Err(Error::validation(
                    "dense set",
                    format!("budget {budget} exceeds {MAX_SEARCH_BUDGET}"),
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn budget(&self) -> usize {
        match self {
            DenseSet::Suffix { budget, .. } | DenseSet::Contains { budget, .. } => *budget,
            _ => 0,
        }
    }

    /// The length-lexicographically least member extending `prefix`.
    pub fn search(&self, prefix: &BitString) -> Search {
        match self {
            DenseSet::All {} => Search::Found(prefix.clone()),
            DenseSet::Empty {} => Search::Absent,
            DenseSet::Finite { strings } => {
                let mut hits: Vec<&BitString> =
                    strings.iter().filter(|s| prefix.is_prefix_of(s)).collect();
                hits.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
                hits.first()
                    .map_or(Search::Absent, |s| Search::Found((*s).clone()))
            }
            DenseSet::Suffix { word, budget } => {
                length_lex_search(prefix, *budget, |t| t.as_slice().ends_with(word.as_slice()))
            }
            DenseSet::Contains { word, budget } => {
                length_lex_search(prefix, *budget, |t| contains_word(t, word))
            }
        }
    }

    pub fn contains(&self, s: &BitString) -> bool {
        match self {
            DenseSet::All {} => true,
            DenseSet::Empty {} => false,
            DenseSet::Finite { strings } => strings.contains(s),
            DenseSet::Suffix { word, .. } => s.as_slice().ends_with(word.as_slice()),
            DenseSet::Contains { word, .. } => contains_word(s, word),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StageChoice {
    /// A member of `W_i` extending `B_i 1` was found.
    Met,
    /// `W_i` has no member extending `B_i 1`, or there is no `W_i`.
    Otherwise,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenericStage {
    pub i: usize,
    pub choice: StageChoice,
    pub sigma: BitString,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenericRun {
    pub order: &'static str,
    pub stages: Vec<GenericStage>,
    /// `l_0 … l_n`
    pub lengths: Vec<u64>,
    pub b: BitString,
}

impl GenericRun {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

/// `σ_i` is the least member of `W_i` extending `B_i 1` (or `B_i 0` when
/// there is none); `B_{i+1} = σ_i 1^{f(|σ_i|)} 0 a_{i+1}`.
pub fn weakly_generic_build(
    f: &ModulusFunction,
    a: &BitStream,
    dense_sets: &[DenseSet],
    n_blocks: usize,
) -> Result<GenericRun> {
    f.validate()?;
    for d in dense_sets {
        d.validate()?;
    }
    let mut b = BitString::new();
    b.push_run(true, f.eval(0)? as usize);
    b.push(false);
    b.push(a.bit(0));
    let mut lengths = vec![b.len() as u64];
    let mut stages = Vec::with_capacity(n_blocks);
    for i in 0..n_blocks {
        let ext = b.child(true);
        let found = match dense_sets.get(i) {
            None => Search::Absent,
            Some(w) => w.search(&ext),
        };
        let (choice, sigma) = match found {
            Search::Found(t) => (StageChoice::Met, t),
            Search::Absent => (StageChoice::Otherwise, b.child(false)),
            Search::Indeterminate => {
                return Err(Error::Indeterminate {
                    index: i,
                    budget: dense_sets[i].budget(),
                })
            }
        };
        let start = sigma.len() as u64;
        let end = padded_len(start, f)?;
        b = sigma.clone();
        b.push_run(true, (end - start - 2) as usize);
        b.push(false);
        b.push(a.bit(i + 1));
        lengths.push(b.len() as u64);
        stages.push(GenericStage { i, choice, sigma });
    }
    Ok(GenericRun {
        order: "length_lexicographic",
        stages,
        lengths,
        b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::granularity::{build_table, TableConfig};
    use crate::measures::{bernoulli, lebesgue};

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn poly(degree: u32) -> ModulusFunction {
        ModulusFunction::Poly { degree }
    }

    #[test]
    fn construction_two_examples() {
        let run = construction_two(&poly(1), &BitStream::alternating(), 1).unwrap();
        assert_eq!(run.block(0), b("100"));
        assert_eq!(run.b(), &b("100111101"));
        assert_eq!(run.lengths(), &[3, 9]);
        let run = construction_two(&poly(2), &BitStream::ones(), 0).unwrap();
        assert_eq!(run.b(), &b("101"));
        let run = construction_two(&poly(2), &BitStream::zeros(), 3).unwrap();
        for w in run.lengths().windows(2) {
            assert_eq!(w[1], w[0] + poly(2).eval(w[0]).unwrap() + 2);
        }
        for (i, &l) in run.lengths().iter().enumerate() {
            assert!(l > poly(2).eval(i as u64).unwrap());
        }
    }

    #[test]
    fn exp_modulus_overflows_politely() {
        let run = construction_two(&ModulusFunction::Exp {}, &BitStream::zeros(), 2).unwrap();
        assert_eq!(run.lengths(), &[3, 13, 8207]);
        assert!(matches!(
            construction_two(&ModulusFunction::Exp {}, &BitStream::zeros(), 3),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_a(&b("100111101"), &poly(1)).unwrap(), b("01"));
        assert_eq!(decode_a(&b("100"), &poly(1)).unwrap(), b("0"));
        assert!(matches!(
            decode_a(&b("110"), &poly(1)),
            Err(Error::Malformed { position: 1, .. })
        ));
        assert!(decode_a(&b("1001111"), &poly(1)).is_err());
    }

    #[test]
    fn membership_examples() {
        let f = poly(1);
        assert_eq!(
            nscr_s_membership(&f, &b("10")),
            TreePosition::OnTree {
                completed_blocks: 0
            }
        );
        assert_eq!(
            nscr_s_membership(&f, &b("0")),
            TreePosition::OffTree { position: 0 }
        );
        assert_eq!(
            nscr_s_membership(&f, &b("100")),
            TreePosition::OnTree {
                completed_blocks: 1
            }
        );
    }

    #[test]
    fn tk_lebesgue_exact_sum() {
        let t = build_table(&*lebesgue(), 64, 40).unwrap();
        let test = tk_enumerate(&t, 1, 10, Padding::Exact).unwrap();
        // |σ| = i padded to 3i+1: 2^i · 2^{-3i-1} summed over i ≤ 10
        let expect: Dyadic = (0..=10).map(|i| Dyadic::pow2(-2 * i - 1)).sum();
        assert_eq!(test.weight_sum(), &WeightBound::exact(expect.clone()));
        let gap = (&Dyadic::from_int(2) - &(&expect * &Dyadic::from_int(3))).abs();
        assert!(gap < &Dyadic::pow2(-16) * &Dyadic::from_int(3));
        let only_empty = tk_enumerate(&t, 1, 0, Padding::Exact).unwrap();
        assert_eq!(only_empty.elements(), &[b("1")]);
    }

    #[test]
    fn tk_bound_dominates() {
        let t = GranularityTable::build(&*bernoulli(d("1/4")).unwrap(), TableConfig::new(400, 200))
            .unwrap();
        for k in [1u32, 2] {
            let bound = tk_weight_bound(&t, k, 6, Padding::Approx).unwrap();
            let test = tk_enumerate(&t, k, 6, Padding::Approx).unwrap();
            assert!(test.weight_sum().hi() <= bound.hi(), "k={k}");
        }
    }

    #[test]
    fn tk_membership() {
        let t = build_table(&*lebesgue(), 64, 40).unwrap();
        // ĝ(n) = n + 2 for Lebesgue
        assert_eq!(
            tk_contains(&b("0111"), &t, 1, Padding::Approx).unwrap(),
            None
        );
        assert_eq!(
            tk_contains(&b("01111"), &t, 1, Padding::Approx).unwrap(),
            Some(1)
        );
        assert_eq!(
            tk_contains(&b("11"), &t, 1, Padding::Approx).unwrap(),
            Some(0)
        );
    }

    #[test]
    fn g_iteration() {
        let t = build_table(&*lebesgue(), 200, 180).unwrap();
        let g = domination_g(&t, 1, 3, 3, Padding::Exact).unwrap();
        assert_eq!(g[0], 8);
        for w in g.windows(2) {
            assert_eq!(w[1], 3 * w[0] + 4);
        }
        assert_eq!(domination_g(&t, 1, 3, 0, Padding::Exact).unwrap().len(), 1);
        assert!(matches!(
            domination_g(&t, 1, 3, 10, Padding::Exact),
            Err(Error::TableExhausted { .. })
        ));
    }

    #[test]
    fn domination_replay() {
        let t = build_table(&*lebesgue(), 400, 380).unwrap();
        let run = construction_two(&poly(1), &BitStream::alternating(), 3).unwrap();
        let r = domination_check(&run, &t, 1, 0, Padding::Approx).unwrap();
        assert!(r.hypothesis_holds);
        assert!(r.dominated.iter().all(|x| *x));
    }

    #[test]
    fn failures_exp_vs_linear() {
        let t = GranularityTable::build(&*lebesgue(), TableConfig::new(16_500, 16_450)).unwrap();
        let exp = construction_two(&ModulusFunction::Exp {}, &BitStream::alternating(), 2).unwrap();
        let r = failure_indices(&exp, &t, 1).unwrap();
        assert_eq!(r.failures, [1, 2]);
        assert_eq!(r.exact_failures, [1, 2]);
        assert!(r.unverified.is_empty());

        let lin = construction_two(&poly(1), &BitStream::alternating(), 6).unwrap();
        let r = failure_indices(&lin, &t, 1).unwrap();
        assert!(r.failures.is_empty());
    }

    #[test]
    fn generic_examples() {
        let f = poly(1);
        let a = BitStream::alternating();
        let all = vec![DenseSet::All {}; 3];
        let run = weakly_generic_build(&f, &a, &all, 3).unwrap();
        let mut expect = b("100");
        for st in &run.stages {
            assert_eq!(st.choice, StageChoice::Met);
            assert_eq!(st.sigma, expect.child(true));
            expect = st.sigma.clone();
            expect.push_run(true, f.eval(expect.len() as u64).unwrap() as usize);
            expect.push(false);
            expect.push(a.bit(st.i + 1));
        }
        assert_eq!(run.b, expect);

        let none = vec![DenseSet::Empty {}];
        let run = weakly_generic_build(&f, &a, &none, 1).unwrap();
        assert_eq!(run.stages[0].sigma, b("1000"));

        let sets = vec![
            DenseSet::Suffix {
                word: b("0110"),
                budget: 6,
            },
            DenseSet::Contains {
                word: b("000"),
                budget: 6,
            },
        ];
        let run = weakly_generic_build(&f, &a, &sets, 2).unwrap();
        for (st, w) in run.stages.iter().zip(&sets) {
            assert!(w.contains(&st.sigma));
            assert!(st.sigma.is_prefix_of(&run.b));
        }
        let tight = vec![DenseSet::Suffix {
            word: b("0000000"),
            budget: 3,
        }];
        assert!(matches!(
            weakly_generic_build(&f, &a, &tight, 1),
            Err(Error::Indeterminate {
                index: 0,
                budget: 3
            })
        ));
    }
}
