//! Verification suites. Each one runs a family of exact checks and reports
//! the number of violated instances.

use std::time::Instant;

use anyhow::Result;
use ncr_core::granularity::{
    build_table, exact_g, exact_h, GranularityTable, Padding, TableConfig,
};
use ncr_core::measures::lebesgue;
use ncr_core::modulus::ModulusFunction;
use ncr_core::rea::{construction_one, decode_b, example_operator, lift_test};
use ncr_core::selfmod::{
    construction_two, decode_a, failure_indices, tk_enumerate, tk_weight_bound,
};
use ncr_core::solovay::{
    build_cover, check_nesting, check_nesting_elements, solovay_weight_vs_mass, LevelTest,
};
use ncr_core::{concat_blocks, BitStream, Dyadic};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::corpus::{
    self, deep_corpus, measure_corpus, random_bits, random_modulus, random_operator,
};
use crate::input::random_stream;

pub const SUITES: &[&str] = &[
    "closed-forms",
    "gh",
    "approx",
    "solovay",
    "nesting",
    "rea",
    "round-trips",
    "lift",
    "tk",
    "failures",
];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub violations: usize,
    pub detail: Value,
    /// Wall time; left out of serialized output so reports stay reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

impl SuiteReport {
    fn new(suite: &str, violations: usize, detail: Value, started: Instant) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            passed: violations == 0,
            violations,
            detail,
            seconds: started.elapsed().as_secs_f64(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    /// Depth used for exhaustive enumeration, capped at 14.
    pub depth: usize,
    pub seed: u64,
    /// Randomized cases per round-trip family.
    pub cases: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            depth: 14,
            seed: 0,
            cases: 100,
        }
    }
}

pub fn run_suite(name: &str, cfg: SuiteConfig) -> Result<SuiteReport> {
    match name {
        "closed-forms" => closed_forms(cfg),
        "gh" => granularity_laws(cfg, false),
        "approx" => granularity_laws(cfg, true),
        "solovay" => level_one_masses(cfg),
        "nesting" => nesting(cfg),
        "rea" => rea_example(),
        "round-trips" => round_trips(cfg),
        "lift" => lift(),
        "tk" => tk_sums(),
        "failures" => self_modulus_failures(),
        _ => anyhow::bail!(
            "unknown suite {name:?}; expected all or one of {}",
            SUITES.join(", ")
        ),
    }
}

/// `h(l) = l` and `g(n) = n + 1` for Lebesgue measure.
pub fn closed_forms(cfg: SuiteConfig) -> Result<SuiteReport> {
    let t = Instant::now();
    let mu = lebesgue();
    let depth = cfg.depth.min(14);
    let mut bad = Vec::new();
    for l in 0..=depth {
        if exact_h(&*mu, l, depth)? != l as u64 {
            bad.push(format!("h({l})"));
        }
    }
    for n in 0..depth.saturating_sub(1) as u64 {
        if exact_g(&*mu, n, depth)? != n + 1 {
            bad.push(format!("g({n})"));
        }
    }
    Ok(SuiteReport::new(
        "closed-forms",
        bad.len(),
        json!({ "depth": depth, "failed": bad }),
        t,
    ))
}

fn is_approximation_law(msg: &str) -> bool {
    msg.contains("h_hat") || msg.contains("g_hat")
}

/// The granularity laws, or with `approx` the bounds on `ĥ`, `ĝ` and their
/// iterates up to four, on every corpus measure.
pub fn granularity_laws(cfg: SuiteConfig, approx: bool) -> Result<SuiteReport> {
    let t = Instant::now();
    let depth = cfg.depth.min(14);
    let mut per_measure = serde_json::Map::new();
    let mut total = 0;
    for m in measure_corpus(cfg.seed) {
        let table = build_table(&*m.measure, depth, depth as u64)?;
        let bad: Vec<String> = table
            .check_invariants(4)
            .into_iter()
            .filter(|msg| is_approximation_law(msg) == approx)
            .collect();
        total += bad.len();
        per_measure.insert(
            m.name,
            json!({ "h": table.h_values(), "g": table.g_values(), "violations": bad }),
        );
    }
    let name = if approx { "approx" } else { "gh" };
    Ok(SuiteReport::new(
        name,
        total,
        json!({ "depth": depth, "measures": per_measure }),
        t,
    ))
}

/// Random level-1 tests: masses stay below twice the weights.
pub fn level_one_masses(cfg: SuiteConfig) -> Result<SuiteReport> {
    let t = Instant::now();
    let depth = cfg.depth.min(14);
    let mut rng = corpus::rng(cfg.seed.wrapping_add(1));
    let mut per_measure = serde_json::Map::new();
    let mut total = 0;
    for m in measure_corpus(cfg.seed) {
        let table = build_table(&*m.measure, depth, depth as u64)?;
        let mut test = LevelTest::new(1, table.measure().clone(), Dyadic::from_int(256))?;
        for _ in 0..200 {
            let len = rng.gen_range(0..=depth);
            test.push_element(random_bits(&mut rng, len), &table)?;
        }
        let r = solovay_weight_vs_mass(&test, &*m.measure, &table)?;
        let bad = r.violations.len() + usize::from(r.max_ratio >= Dyadic::from_int(2));
        total += bad;
        per_measure.insert(
            m.name,
            json!({ "count": r.count, "max_ratio": r.max_ratio.to_string(), "violations": r.violations }),
        );
    }
    Ok(SuiteReport::new(
        "solovay",
        total,
        json!({ "measures": per_measure }),
        t,
    ))
}

/// Table depth large enough for level-4 covers of eight elements.
pub const NESTING_DEPTH: usize = 1500;

/// Level-4 covers read as level-3 and level-2 tests.
pub fn nesting(cfg: SuiteConfig) -> Result<SuiteReport> {
    let t = Instant::now();
    let mut per_measure = serde_json::Map::new();
    let mut total = 0;
    let stream = BitStream::alternating();
    for m in deep_corpus(cfg.seed) {
        let table = GranularityTable::build(
            &*m.measure,
            TableConfig::new(NESTING_DEPTH, NESTING_DEPTH as u64),
        )?;
        let cover = build_cover(&stream, 4, &table, 8)?;
        let to3 = check_nesting(&cover, &table)?;
        let budget3 = &to3.tail_sum_lower.hi().clone() + to3.head_constant.hi();
        let to2 = check_nesting_elements(cover.elements(), 3, &budget3, &table)?;
        let bad = to3.violations.len()
            + to3.inconclusive.len()
            + usize::from(!to3.holds)
            + to2.violations.len()
            + to2.inconclusive.len()
            + usize::from(!to2.holds);
        total += bad;
        per_measure.insert(
            m.name,
            json!({
                "lengths": cover.elements().iter().map(|s| s.len()).collect::<Vec<_>>(),
                "level_4_to_3": to3,
                "level_3_to_2": to2,
            }),
        );
    }
    Ok(SuiteReport::new(
        "nesting",
        total,
        json!({ "measures": per_measure }),
        t,
    ))
}

/// The worked example: `f = (37, 134, 1, 134)` and the block layout of `C`.
pub fn rea_example() -> Result<SuiteReport> {
    let t = Instant::now();
    let run = construction_one(&example_operator(), &BitStream::ones(), 4, 100_000)?;
    let expected_prefix = concat_blocks(&[
        (true, 37),
        (false, 1),
        (true, 134),
        (false, 1),
        (false, 2),
        (true, 134),
        (false, 1),
        (true, 1),
    ]);
    let mut bad = Vec::new();
    if run.f()[..4] != [37, 134, 1, 134] {
        bad.push("f");
    }
    if !expected_prefix.is_prefix_of(run.c()) {
        bad.push("c_prefix");
    }
    if decode_b(run.c())? != *run.b() {
        bad.push("decode");
    }
    Ok(SuiteReport::new(
        "rea",
        bad.len(),
        json!({ "f": run.f(), "b": run.b(), "failed": bad }),
        t,
    ))
}

/// `decode_B` undoes the REA padding and `decode_A` undoes the self-modulus
/// padding on randomized inputs.
pub fn round_trips(cfg: SuiteConfig) -> Result<SuiteReport> {
    let t = Instant::now();
    let mut rng = corpus::rng(cfg.seed.wrapping_add(2));
    let mut failed_one = Vec::new();
    let mut failed_two = Vec::new();
    for case in 0..cfg.cases {
        let op = random_operator(&mut rng);
        let a = random_stream(rng.gen());
        let i_max = rng.gen_range(0..12);
        let run = construction_one(&op, &a, i_max, 10_000)?;
        if decode_b(run.c())? != *run.b() {
            failed_one.push(case);
        }
    }
    for case in 0..cfg.cases {
        let (f, blocks) = random_modulus(&mut rng);
        let a = random_stream(rng.gen());
        let run = construction_two(&f, &a, blocks)?;
        if decode_a(run.b(), &f)? != *run.a() {
            failed_two.push(case);
        }
    }
    Ok(SuiteReport::new(
        "round-trips",
        failed_one.len() + failed_two.len(),
        json!({ "cases": cfg.cases, "construction_one_failed": failed_one, "construction_two_failed": failed_two }),
        t,
    ))
}

/// A level-2 cover of a computable oracle lifted to level 1 over `C`.
pub fn lift() -> Result<SuiteReport> {
    let t = Instant::now();
    let table = build_table(&*lebesgue(), 64, 40)?;
    let op = example_operator();
    let mut per_oracle = serde_json::Map::new();
    let mut total = 0;
    for a in [
        BitStream::alternating(),
        BitStream::periodic("110".parse()?).with_label("periodic:110"),
    ] {
        let cover = build_cover(&a, 2, &table, 12)?;
        let run = construction_one(&op, &a, 6, 100_000)?;
        let r = lift_test(&cover, &op, &table, &run)?;
        let bad = r.violations.len() + r.inconclusive.len() + usize::from(r.covers_count < 12);
        total += bad;
        per_oracle.insert(
            a.label().to_string(),
            json!({
                "covers_count": r.covers_count,
                "horizon": r.horizon,
                "lifted_elements": r.lifted.elements().len(),
                "lifted_weight": r.lifted.weight_sum(),
                "lifted_budget": r.lifted.budget().to_string(),
                "violations": r.violations,
                "inconclusive": r.inconclusive,
            }),
        );
    }
    Ok(SuiteReport::new(
        "lift",
        total,
        json!({ "oracles": per_oracle }),
        t,
    ))
}

pub const TK_DEPTH: usize = 1500;

/// `T_k` partial sums against their bound, and the Lebesgue `k = 1` limit `2/3`.
pub fn tk_sums() -> Result<SuiteReport> {
    let t = Instant::now();
    let mut rows = Vec::new();
    let mut total = 0;
    let measures = [
        ("lebesgue", lebesgue()),
        (
            "bernoulli:1/4",
            ncr_core::measures::bernoulli(Dyadic::ratio(1, 2))?,
        ),
    ];
    for (name, mu) in &measures {
        let table = GranularityTable::build(&**mu, TableConfig::new(TK_DEPTH, TK_DEPTH as u64))?;
        for padding in [Padding::Exact, Padding::Approx] {
            for k in [1u32, 2, 4] {
                let test = tk_enumerate(&table, k, 10, padding)?;
                let bound = tk_weight_bound(&table, k, 10, padding)?;
                let ok = test.weight_sum().hi() <= bound.hi();
                total += usize::from(!ok);
                rows.push(json!({
                    "measure": name,
                    "padding": format!("{padding:?}").to_lowercase(),
                    "k": k,
                    "elements": test.elements().len(),
                    "sum": test.weight_sum(),
                    "bound": bound,
                    "within": ok,
                }));
            }
        }
    }
    let table = build_table(&*lebesgue(), 64, 40)?;
    let sum = tk_enumerate(&table, 1, 10, Padding::Exact)?;
    let gap = (&Dyadic::from_int(2) - &(sum.weight_sum().hi() * &Dyadic::from_int(3))).abs();
    let converged = gap < &Dyadic::pow2(-16) * &Dyadic::from_int(3);
    total += usize::from(!converged);
    Ok(SuiteReport::new(
        "tk",
        total,
        json!({ "rows": rows, "lebesgue_k1_sum": sum.weight_sum(), "within_2^-16_of_2/3": converged }),
        t,
    ))
}

pub const FAILURE_DEPTH: usize = 16_500;

/// With `f(n) = 2^n` over Lebesgue the padding falls short, and every
/// shortfall yields a verified witness in `T_k` along `B`.
pub fn self_modulus_failures() -> Result<SuiteReport> {
    let t = Instant::now();
    let table = GranularityTable::build(
        &*lebesgue(),
        TableConfig::new(FAILURE_DEPTH, FAILURE_DEPTH as u64 - 50),
    )?;
    let run = construction_two(&ModulusFunction::Exp {}, &BitStream::alternating(), 2)?;
    let mut per_k = serde_json::Map::new();
    let mut total = 0;
    for k in [1u32, 2] {
        let r = failure_indices(&run, &table, k)?;
        total += r.unverified.len() + usize::from(r.failures.is_empty());
        per_k.insert(k.to_string(), serde_json::to_value(&r)?);
    }
    Ok(SuiteReport::new(
        "failures",
        total,
        json!({ "lengths": run.lengths(), "k": per_k }),
        t,
    ))
}
