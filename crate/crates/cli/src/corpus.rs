//! Seeded generators for measures, strings, operators and moduli.

use std::collections::BTreeMap;

use ncr_core::measures::{Measure, MeasureSpec};
use ncr_core::modulus::ModulusFunction;
use ncr_core::rea::{CofiniteRule, EnumerationOperator, Rule};
use ncr_core::{BitString, Dyadic};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Depth below which random split trees carry uneven ratios.
pub const SPLIT_DEPTH: usize = 6;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_bits(rng: &mut impl Rng, len: usize) -> BitString {
    BitString::from_bits((0..len).map(|_| rng.gen::<bool>()).collect())
}

/// Split ratios `k/16` with `3 ≤ k ≤ 13` at every node above `SPLIT_DEPTH`.
pub fn random_split_spec(seed: u64) -> MeasureSpec {
    let mut r = rng(seed ^ 0x5eed_0517);
    let mut nodes = BTreeMap::new();
    for len in 0..SPLIT_DEPTH {
        for sigma in BitString::all_of_length(len) {
            nodes.insert(sigma, Dyadic::ratio(r.gen_range(3..=13), 4));
        }
    }
    MeasureSpec::Split { nodes }
}

#[derive(Debug, Clone)]
pub struct NamedMeasure {
    pub name: String,
    pub spec: MeasureSpec,
    pub measure: Measure,
}

fn named(name: impl Into<String>, spec: MeasureSpec) -> NamedMeasure {
    let measure = spec.build().expect("corpus measures are valid");
    NamedMeasure {
        name: name.into(),
        spec,
        measure,
    }
}

/// Lebesgue, Bernoulli(1/4), Bernoulli(3/8), three random split trees and a
/// perfect-set measure.
pub fn measure_corpus(seed: u64) -> Vec<NamedMeasure> {
    let mut out = vec![
        named("lebesgue", MeasureSpec::Lebesgue {}),
        named(
            "bernoulli:1/4",
            MeasureSpec::Bernoulli {
                p: Dyadic::ratio(1, 2),
            },
        ),
        named(
            "bernoulli:3/8",
            MeasureSpec::Bernoulli {
                p: Dyadic::ratio(3, 3),
            },
        ),
    ];
    for i in 0..3 {
        let s = seed.wrapping_add(i);
        out.push(named(format!("split:{s}"), random_split_spec(s)));
    }
    out.push(named(
        "perfect:poly:1",
        MeasureSpec::PerfectSet {
            modulus: ModulusFunction::Poly { degree: 1 },
        },
    ));
    out
}

/// Measures whose granularity stays within reach of deep tables.
pub fn deep_corpus(seed: u64) -> Vec<NamedMeasure> {
    measure_corpus(seed)
        .into_iter()
        .filter(|m| !matches!(m.spec, MeasureSpec::PerfectSet { .. }))
        .collect()
}

/// Up to six explicit rules, optional prefixes of length at most two, and a
/// cofinite rule so that the enumerated set is infinite.
pub fn random_operator(rng: &mut impl Rng) -> EnumerationOperator {
    let count = rng.gen_range(0..=6);
    let mut rules = Vec::with_capacity(count);
    for _ in 0..count {
        let j = rng.gen_range(0..12u64);
        let plen = rng.gen_range(0..=2usize);
        let prefix = random_bits(rng, plen);
        let s = rng.gen_range(j.max(plen as u64)..=j + 60);
        rules.push(Rule { j, prefix, s });
    }
    let from = rng.gen_range(3..16u64);
    let s = rng.gen_range(1..40u64);
    EnumerationOperator::new(
        rules,
        Some(CofiniteRule {
            from,
            prefix: BitString::new(),
            s,
        }),
    )
    .expect("generated rules respect the bounds")
}

/// A modulus and a block count whose padded prefix stays small.
pub fn random_modulus(rng: &mut impl Rng) -> (ModulusFunction, usize) {
    match rng.gen_range(0..4) {
        0 => (ModulusFunction::Poly { degree: 0 }, rng.gen_range(0..40)),
        1 => (ModulusFunction::Poly { degree: 1 }, rng.gen_range(0..10)),
        2 => (ModulusFunction::Poly { degree: 2 }, rng.gen_range(0..4)),
        _ => {
            let mut v = 0u64;
            let values = (0..8)
                .map(|_| {
                    v += rng.gen_range(1..5);
                    v
                })
                .collect();
            (ModulusFunction::Table { values }, rng.gen_range(0..12))
        }
    }
}
