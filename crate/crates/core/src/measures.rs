//! Cylinder-mass oracles for continuous probability measures on Cantor space.
//!
//! An oracle answers `μ[σ]` as a dyadic interval of width at most
//! `2^{-precision}`. The built-in families are exact: their masses are dyadic
//! and come back as zero-width intervals. [`RoundedMeasure`] wraps an exact
//! oracle and only ever reveals outward-rounded enclosures, which is how a
//! measure given by a representation looks to a machine reading it.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::dyadic::{Dyadic, DyadicInterval, Rounding};
use crate::error::{Error, Result};
use crate::modulus::{classify_in_tree, free_positions_below, ModulusFunction, TreePosition};

pub trait MeasureOracle: Send + Sync + fmt::Debug {
    /// An enclosure of `μ[σ]` of width at most `2^{-precision}`.
    fn mass_interval(&self, sigma: &BitString, precision: u32) -> DyadicInterval;

    /// The exact mass, for oracles whose masses are dyadic.
    fn exact_mass(&self, _sigma: &BitString) -> Option<Dyadic> {
        None
    }

    fn is_exact(&self) -> bool;

    /// Closed-form `max_{|σ| = depth} μ[σ]`, when the family has one.
    fn max_mass_at_depth(&self, _depth: usize) -> Option<Dyadic> {
        None
    }

    /// JSON description used in reports.
    fn descriptor(&self) -> serde_json::Value;
}

pub type Measure = Arc<dyn MeasureOracle>;

/// Serialized measure form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Lebesgue {},
    Bernoulli { p: Dyadic },
    Split { nodes: BTreeMap<BitString, Dyadic> },
    PerfectSet { modulus: ModulusFunction },
}

impl MeasureSpec {
    pub fn build(&self) -> Result<Measure> {
        Ok(match self {
            MeasureSpec::Lebesgue {} => Arc::new(Lebesgue),
            MeasureSpec::Bernoulli { p } => Arc::new(Bernoulli::new(p.clone())?),
            MeasureSpec::Split { nodes } => {
                Arc::new(SplitTreeMeasure::new(SplitTree::new(nodes.clone())?))
            }
            MeasureSpec::PerfectSet { modulus } => {
                Arc::new(PerfectSetMeasure::new(modulus.clone())?)
            }
        })
    }

    fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("measure spec serializes")
    }
}

/// Parse and validate a JSON measure spec.
pub fn load_measure(json: &str) -> Result<Measure> {
    let spec: MeasureSpec = serde_json::from_str(json).map_err(|e| Error::Parse {
        position: byte_offset(json, e.line(), e.column()),
        message: e.to_string(),
    })?;
    spec.build()
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let before: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    before + column.saturating_sub(1)
}

pub fn lebesgue() -> Measure {
    Arc::new(Lebesgue)
}

pub fn bernoulli(p: Dyadic) -> Result<Measure> {
    Ok(Arc::new(Bernoulli::new(p)?))
}

pub fn split_tree_measure(tree: SplitTree) -> Measure {
    Arc::new(SplitTreeMeasure::new(tree))
}

pub fn perfect_set_measure(f: ModulusFunction) -> Result<Measure> {
    Ok(Arc::new(PerfectSetMeasure::new(f)?))
}

#[derive(Debug, Clone, Copy)]
pub struct Lebesgue;

impl MeasureOracle for Lebesgue {
    fn mass_interval(&self, sigma: &BitString, _precision: u32) -> DyadicInterval {
        DyadicInterval::point(Dyadic::pow2(-(sigma.len() as i64)))
    }

    fn exact_mass(&self, sigma: &BitString) -> Option<Dyadic> {
        Some(Dyadic::pow2(-(sigma.len() as i64)))
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn max_mass_at_depth(&self, depth: usize) -> Option<Dyadic> {
        Some(Dyadic::pow2(-(depth as i64)))
    }

    fn descriptor(&self) -> serde_json::Value {
        MeasureSpec::Lebesgue {}.to_value()
    }
}

/// Product measure with `P(bit = 1) = p`.
#[derive(Debug, Clone)]
pub struct Bernoulli {
    p: Dyadic,
    q: Dyadic,
}

impl Bernoulli {
    pub fn new(p: Dyadic) -> Result<Self> {
        if !p.is_positive() || p >= Dyadic::one() {
            return Err(Error::validation(
                "bernoulli parameter",
                format!("p = {p} must lie strictly between 0 and 1"),
            ));
        }
        let q = &Dyadic::one() - &p;
        Ok(Bernoulli { p, q })
    }
}

impl MeasureOracle for Bernoulli {
    fn mass_interval(&self, sigma: &BitString, _precision: u32) -> DyadicInterval {
        DyadicInterval::point(self.exact_mass(sigma).expect("exact"))
    }

    fn exact_mass(&self, sigma: &BitString) -> Option<Dyadic> {
        Some(&self.p.pow(sigma.ones() as u32) * &self.q.pow(sigma.zeros() as u32))
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn max_mass_at_depth(&self, depth: usize) -> Option<Dyadic> {
        Some(self.p.clone().max(self.q.clone()).pow(depth as u32))
    }

    fn descriptor(&self) -> serde_json::Value {
        MeasureSpec::Bernoulli { p: self.p.clone() }.to_value()
    }
}

/// Split ratios at finitely many nodes; every other node splits evenly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitTree {
    nodes: BTreeMap<BitString, Dyadic>,
}

impl SplitTree {
    pub fn new(nodes: BTreeMap<BitString, Dyadic>) -> Result<Self> {
        for (node, r) in &nodes {
            if !r.is_positive() || *r >= Dyadic::one() {
                return Err(Error::validation(
                    "split ratio",
                    format!("ratio {r} at node \"{node}\" must lie strictly between 0 and 1"),
                ));
            }
        }
        Ok(SplitTree { nodes })
    }

    /// Fraction of `μ[σ]` that goes to `σ0`.
    pub fn ratio(&self, sigma: &BitString) -> Dyadic {
        self.nodes
            .get(sigma)
            .cloned()
            .unwrap_or_else(|| Dyadic::ratio(1, 1))
    }

    /// Depth from which every split is even.
    pub fn specified_depth(&self) -> usize {
        self.nodes.keys().map(|k| k.len() + 1).max().unwrap_or(0)
    }

    pub fn nodes(&self) -> &BTreeMap<BitString, Dyadic> {
        &self.nodes
    }
}

#[derive(Debug, Clone)]
pub struct SplitTreeMeasure {
    tree: SplitTree,
    /// Plain level-by-level maxima up to the specified depth.
    level_max: Option<Vec<Dyadic>>,
}

const SPLIT_CLOSED_FORM_DEPTH: usize = 18;

impl SplitTreeMeasure {
    pub fn new(tree: SplitTree) -> Self {
        let depth = tree.specified_depth();
        let level_max = (depth <= SPLIT_CLOSED_FORM_DEPTH).then(|| {
            let mut level = vec![(BitString::new(), Dyadic::one())];
            let mut maxima = vec![Dyadic::one()];
            for _ in 0..depth {
                let mut next = Vec::with_capacity(level.len() * 2);
                for (sigma, mass) in &level {
                    let r = tree.ratio(sigma);
                    let left = mass * &r;
                    let right = mass - &left;
                    next.push((sigma.child(false), left));
                    next.push((sigma.child(true), right));
                }
                maxima.push(
                    next.iter()
                        .map(|(_, m)| m.clone())
                        .max()
                        .expect("nonempty level"),
                );
                level = next;
            }
            maxima
        });
        SplitTreeMeasure { tree, level_max }
    }

    pub fn tree(&self) -> &SplitTree {
        &self.tree
    }
}

impl MeasureOracle for SplitTreeMeasure {
    fn mass_interval(&self, sigma: &BitString, _precision: u32) -> DyadicInterval {
        DyadicInterval::point(self.exact_mass(sigma).expect("exact"))
    }

    fn exact_mass(&self, sigma: &BitString) -> Option<Dyadic> {
        let mut mass = Dyadic::one();
        let mut node = BitString::new();
        for &b in sigma.as_slice() {
            let r = self.tree.ratio(&node);
            mass = if b {
                &mass * &(&Dyadic::one() - &r)
            } else {
                &mass * &r
            };
            node.push(b);
        }
        Some(mass)
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn max_mass_at_depth(&self, depth: usize) -> Option<Dyadic> {
        let maxima = self.level_max.as_ref()?;
        let spec = maxima.len() - 1;
        if depth <= spec {
            Some(maxima[depth].clone())
        } else {
            Some(maxima[spec].mul_pow2(-((depth - spec) as i64)))
        }
    }

    fn descriptor(&self) -> serde_json::Value {
        MeasureSpec::Split {
            nodes: self.tree.nodes.clone(),
        }
        .to_value()
    }
}

/// Unit mass spread uniformly over the paths of the block tree of `f`:
/// every free bit splits evenly, forced bits carry all the mass.
#[derive(Debug, Clone)]
pub struct PerfectSetMeasure {
    f: ModulusFunction,
}

impl PerfectSetMeasure {
    pub fn new(f: ModulusFunction) -> Result<Self> {
        f.validate()?;
        Ok(PerfectSetMeasure { f })
    }

    pub fn modulus(&self) -> &ModulusFunction {
        &self.f
    }
}

impl MeasureOracle for PerfectSetMeasure {
    fn mass_interval(&self, sigma: &BitString, _precision: u32) -> DyadicInterval {
        DyadicInterval::point(self.exact_mass(sigma).expect("exact"))
    }

    fn exact_mass(&self, sigma: &BitString) -> Option<Dyadic> {
        Some(match classify_in_tree(&self.f, sigma) {
            TreePosition::OnTree { completed_blocks } => Dyadic::pow2(-(completed_blocks as i64)),
            TreePosition::OffTree { .. } => Dyadic::zero(),
        })
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn max_mass_at_depth(&self, depth: usize) -> Option<Dyadic> {
        Some(Dyadic::pow2(
            -(free_positions_below(&self.f, depth as u64) as i64),
        ))
    }

    fn descriptor(&self) -> serde_json::Value {
        MeasureSpec::PerfectSet {
            modulus: self.f.clone(),
        }
        .to_value()
    }
}

/// An exact oracle seen only through outward-rounded enclosures on the grid
/// `2^{-(precision+1)}`. Exact masses are never revealed directly.
#[derive(Debug, Clone)]
pub struct RoundedMeasure {
    inner: Measure,
}

impl RoundedMeasure {
    pub fn new(inner: Measure) -> Self {
        RoundedMeasure { inner }
    }
}

impl MeasureOracle for RoundedMeasure {
    fn mass_interval(&self, sigma: &BitString, precision: u32) -> DyadicInterval {
        let m = self.inner.mass_interval(sigma, precision + 1);
        let lo = m
            .lo()
            .round_to(precision + 1, Rounding::Down)
            .max(Dyadic::zero());
        let hi = m
            .hi()
            .round_to(precision + 1, Rounding::Up)
            .min(Dyadic::one());
        DyadicInterval::new(lo, hi).expect("rounding keeps order")
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn descriptor(&self) -> serde_json::Value {
        serde_json::json!({ "kind": "rounded", "base": self.inner.descriptor() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn mass(m: &Measure, s: &str) -> Dyadic {
        let iv = m.mass_interval(&b(s), 20);
        assert!(iv.is_point());
        iv.lo().clone()
    }

    #[test]
    fn lebesgue_masses() {
        let m = lebesgue();
        assert_eq!(mass(&m, ""), Dyadic::one());
        assert_eq!(mass(&m, "01"), d("1/4"));
        assert_eq!(mass(&m, "0101"), d("1/16"));
    }

    #[test]
    fn bernoulli_masses() {
        let m = bernoulli(d("1/4")).unwrap();
        assert_eq!(mass(&m, "00"), d("9/16"));
        assert_eq!(mass(&m, "1"), d("1/4"));
        let half = bernoulli(d("1/2")).unwrap();
        for s in ["", "0", "110", "01010"] {
            assert_eq!(mass(&half, s), Dyadic::pow2(-(s.len() as i64)));
        }
        assert!(bernoulli(Dyadic::zero()).is_err());
        assert!(bernoulli(Dyadic::one()).is_err());
    }

    #[test]
    fn split_masses() {
        let empty = split_tree_measure(SplitTree::default());
        assert_eq!(mass(&empty, "011"), d("1/8"));
        let t = SplitTree::new(BTreeMap::from([(b(""), d("1/4"))])).unwrap();
        let m = split_tree_measure(t);
        assert_eq!(mass(&m, "0"), d("1/4"));
        assert_eq!(mass(&m, "1"), d("3/4"));
        let t = SplitTree::new(BTreeMap::from([(b(""), d("1/4")), (b("1"), d("1/2"))])).unwrap();
        assert_eq!(mass(&split_tree_measure(t), "10"), d("3/8"));
        assert!(SplitTree::new(BTreeMap::from([(b("0"), Dyadic::one())])).is_err());
    }

    #[test]
    fn perfect_set_masses() {
        let m = perfect_set_measure(ModulusFunction::Poly { degree: 1 }).unwrap();
        assert_eq!(mass(&m, "1"), Dyadic::one());
        assert_eq!(mass(&m, "100"), d("1/2"));
        assert_eq!(mass(&m, "0"), Dyadic::zero());
        assert_eq!(mass(&m, "1001111"), d("1/2"));
        assert_eq!(mass(&m, "100111101"), d("1/4"));
    }

    #[test]
    fn load_forms() {
        let m = load_measure(r#"{"kind":"lebesgue"}"#).unwrap();
        assert_eq!(m.descriptor(), serde_json::json!({"kind":"lebesgue"}));
        let m = load_measure(r#"{"kind":"bernoulli","p":"1/2^2"}"#).unwrap();
        assert_eq!(mass(&m, "1"), d("1/4"));
        let m = load_measure(r#"{"kind":"split","nodes":{"":"1/2^2"}}"#).unwrap();
        assert_eq!(mass(&m, "0"), d("1/4"));
        let m =
            load_measure(r#"{"kind":"perfect_set","modulus":{"kind":"table","values":[1,2,3]}}"#)
                .unwrap();
        assert_eq!(mass(&m, "10"), Dyadic::one());
    }

    #[test]
    fn load_errors() {
        match load_measure(r#"{"kind":"bernoulli","p":"1/2^2"#) {
            Err(Error::Parse { position, .. }) => assert!(position > 0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            load_measure(r#"{"kind":"split","nodes":{"0":"3/2"}}"#),
            Err(Error::Validation {
                what: "split ratio",
                ..
            })
        ));
        assert!(matches!(
            load_measure(r#"{"kind":"split","nodes":{"0x":"1/2"}}"#),
            Err(Error::Parse { .. })
        ));
        assert!(load_measure(r#"{"kind":"lebesgue","extra":1}"#).is_err());
        assert!(load_measure(r#"{"kind":"cauchy"}"#).is_err());
    }

    #[test]
    fn rounded_intervals_nest_and_shrink() {
        let m = RoundedMeasure::new(bernoulli(d("3/8")).unwrap());
        let sigma = b("01101");
        let exact = bernoulli(d("3/8")).unwrap().exact_mass(&sigma).unwrap();
        let mut prev: Option<DyadicInterval> = None;
        for k in 0..24 {
            let iv = m.mass_interval(&sigma, k);
            assert!(iv.contains(&exact));
            assert!(iv.width() <= Dyadic::pow2(-(k as i64)));
            if let Some(p) = &prev {
                assert!(p.contains_interval(&iv));
            }
            prev = Some(iv);
        }
        assert!(!m.is_exact());
        assert!(m.exact_mass(&sigma).is_none());
    }
}
