//! Granularity `g`, dissipation `h`, their computable approximations `ĝ`, `ĥ`,
//! and iterates of tabulated functions.
//!
//! With `M(l) = max_{|σ|=l} μ[σ]`:
//!
//! * `h(l) = max{n : M(l) < 2^{-n+1}}`, which is `-floor(log2 M(l))`;
//! * `g(n) = min{l : M(l) < 2^{-n}}`.
//!
//! `ĥ(l)` only looks at interval enclosures. Each depth-`l` cylinder yields
//! the largest certified `n ≤ l` with `2^{-n} < μ[σ] < 2^{-n+2}` (or `l` once
//! the mass is certified below `2^{-l+2}`), the value at `l` is the minimum
//! over cylinders, and the function is then made non-decreasing by a running
//! maximum. This lands in `[h(l), min(l, h(l)+1)]`.
//! `ĝ(n) = min{l : ĥ(l) ≥ n+2}`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::measures::MeasureOracle;

/// Default exhaustive depth: `2^14` cylinders at the deepest level.
pub const DEFAULT_EXHAUSTIVE_DEPTH: usize = 14;

/// Extra bits of precision tried before giving up on a cylinder.
pub const DEFAULT_REFINEMENT_BITS: u32 = 96;

/// `h` from the maximal mass at a depth.
pub fn h_from_max_mass(max_mass: &Dyadic) -> u64 {
    let e = max_mass
        .floor_log2()
        .expect("a probability measure has positive mass at every depth");
    debug_assert!(e <= 0);
    (-e) as u64
}

/// `max_{|σ|=d} μ[σ]` for every `d ≤ depth`, by depth-first enumeration.
///
/// A subtree is skipped when its root mass cannot beat the current maximum at
/// any depth below it; descendants never carry more mass than their root.
pub fn max_masses_exhaustive(mu: &dyn MeasureOracle, depth: usize) -> Result<Vec<Dyadic>> {
    if !mu.is_exact() {
        return Err(Error::NotExact {
            operation: "exhaustive maximal mass",
        });
    }
    let mut best: Vec<Option<Dyadic>> = vec![None; depth + 1];
    let mut stack = vec![BitString::new()];
    while let Some(sigma) = stack.pop() {
        let mass = mu.exact_mass(&sigma).expect("exact oracle");
        if mass.is_zero() && !sigma.is_empty() {
            continue;
        }
        let d = sigma.len();
        let improves = best[d..]
            .iter()
            .any(|b| b.as_ref().is_none_or(|b| &mass > b));
        if !improves {
            continue;
        }
        if best[d].as_ref().is_none_or(|b| &mass > b) {
            best[d] = Some(mass);
        }
        if d < depth {
            // push 1 first so the 0-branch is explored first
            stack.push(sigma.child(true));
            stack.push(sigma.child(false));
        }
    }
    Ok(best
        .into_iter()
        .map(|b| b.expect("every depth has a positive-mass cylinder"))
        .collect())
}

fn check_cap(requested: usize, cap: usize) -> Result<()> {
    if requested > cap {
        Err(Error::DepthCapExceeded { requested, cap })
    } else {
        Ok(())
    }
}

/// Exact `h(l)` by exhaustive enumeration of the depth-`l` cylinders.
pub fn exact_h(mu: &dyn MeasureOracle, l: usize, cap: usize) -> Result<u64> {
    check_cap(l, cap)?;
    let maxima = max_masses_exhaustive(mu, l)?;
    Ok(h_from_max_mass(&maxima[l]))
}

/// Exact `g(n)`: the least depth whose cylinders all weigh less than `2^{-n}`.
pub fn exact_g(mu: &dyn MeasureOracle, n: u64, cap: usize) -> Result<u64> {
    let maxima = max_masses_exhaustive(mu, cap)?;
    maxima
        .iter()
        .position(|m| m.cmp_pow2(n as i64) == Ordering::Less)
        .map(|l| l as u64)
        .ok_or(Error::DepthCapExceeded {
            requested: cap + 1,
            cap,
        })
}

/// Certified witness for one cylinder at depth `l`.
fn cylinder_witness(
    mu: &dyn MeasureOracle,
    sigma: &BitString,
    l: u64,
    refinement_bits: u32,
) -> Result<u64> {
    let base = l as u32 + 3;
    let mut extra = 0u32;
    loop {
        let iv = mu.mass_interval(sigma, base + extra);
        if iv.hi().cmp_pow2(l as i64 - 2) == Ordering::Less {
            return Ok(l);
        }
        if let Some(f_hi) = iv.hi().floor_log2() {
            let top = (1 - f_hi).min(l as i64);
            if top >= 0 && iv.lo().cmp_pow2(top) == Ordering::Greater {
                return Ok(top as u64);
            }
        }
        if iv.is_point() || extra >= refinement_bits {
            return Err(Error::RefinementBudget {
                sigma: sigma.to_string(),
                precision: base + extra,
            });
        }
        extra = (extra * 2).max(4).min(refinement_bits);
    }
}

/// The per-level value before the running maximum: min over depth-`l` cylinders.
fn raw_h_hat(mu: &dyn MeasureOracle, l: usize, refinement_bits: u32) -> Result<u64> {
    if l == 0 {
        return Ok(0);
    }
    let lu = l as u64;
    let mut best = lu;
    let mut stack = vec![BitString::new()];
    while let Some(sigma) = stack.pop() {
        if sigma.len() == l {
            best = best.min(cylinder_witness(mu, &sigma, lu, refinement_bits)?);
            continue;
        }
        let iv = mu.mass_interval(&sigma, l as u32 + 3);
        if iv.hi().cmp_pow2(lu as i64 - 2) == Ordering::Less {
            continue;
        }
        // any certified witness below satisfies n >= -floor(log2 hi)
        if let Some(f_hi) = iv.hi().floor_log2() {
            if -f_hi >= best as i64 {
                continue;
            }
        }
        stack.push(sigma.child(true));
        stack.push(sigma.child(false));
    }
    Ok(best)
}

/// `ĥ(l)` computed from interval enclosures alone, with `ĥ(0) = 0`.
pub fn approx_h(mu: &dyn MeasureOracle, l: usize, cap: usize) -> Result<u64> {
    check_cap(l, cap)?;
    let mut acc = 0;
    for d in 0..=l {
        acc = acc.max(raw_h_hat(mu, d, DEFAULT_REFINEMENT_BITS)?);
    }
    Ok(acc)
}

/// `ĝ(n) = min{l : ĥ(l) ≥ n+2}`, searched up to `cap`.
pub fn approx_g(mu: &dyn MeasureOracle, n: u64, cap: usize) -> Result<u64> {
    let mut acc = 0;
    for d in 0..=cap {
        acc = acc.max(raw_h_hat(mu, d, DEFAULT_REFINEMENT_BITS)?);
        if acc >= n + 2 {
            return Ok(d as u64);
        }
    }
    Err(Error::DepthCapExceeded {
        requested: cap + 1,
        cap,
    })
}

/// A function `ℕ → ℕ` known on the prefix `0..values.len()`.
#[derive(Debug, Clone, Copy)]
pub struct Tabulated<'a> {
    name: &'static str,
    values: &'a [u64],
}

impl<'a> Tabulated<'a> {
    pub fn new(name: &'static str, values: &'a [u64]) -> Self {
        Tabulated { name, values }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn domain_len(&self) -> usize {
        self.values.len()
    }

    pub fn apply(&self, x: u64) -> Result<u64> {
        usize::try_from(x)
            .ok()
            .and_then(|i| self.values.get(i).copied())
            .ok_or(Error::NotTabulated {
                function: self.name,
                arg: x,
            })
    }

    /// `f^{(n)}(x)`; `f^{(0)}` is the identity.
    pub fn iterate(&self, n: u32, x: u64) -> Result<u64> {
        (0..n).try_fold(x, |acc, _| self.apply(acc))
    }
}

/// Free-function form of [`Tabulated::iterate`].
pub fn iterate(f: Tabulated<'_>, n: u32, l: u64) -> Result<u64> {
    f.iterate(n, l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Enumerated over every cylinder at the depth.
    Exhaustive,
    /// From the measure family's closed form for the maximal mass.
    ClosedForm,
}

/// Which padding function a construction consults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Padding {
    /// `ĝ`, computed from interval enclosures.
    #[default]
    Approx,
    /// The exact granularity `g`; it satisfies the same two-sided bound.
    Exact,
}

#[derive(Debug, Clone, Copy)]
pub struct TableConfig {
    /// Tabulate `h` and `ĥ` on `0..=depth`.
    pub depth: usize,
    /// Tabulate `g` and `ĝ` on `0..=n_max` where the value is at most `depth`.
    pub n_max: u64,
    /// Enumerate cylinders up to this depth; closed forms take over beyond it.
    pub exhaustive_depth: usize,
    pub refinement_bits: u32,
}

impl TableConfig {
    pub fn new(depth: usize, n_max: u64) -> Self {
        TableConfig {
            depth,
            n_max,
            exhaustive_depth: DEFAULT_EXHAUSTIVE_DEPTH,
            refinement_bits: DEFAULT_REFINEMENT_BITS,
        }
    }

    pub fn exhaustive_depth(mut self, d: usize) -> Self {
        self.exhaustive_depth = d;
        self
    }
}

/// Memoized `h`, `ĥ`, `g`, `ĝ` for one measure. Entries that could not be
/// computed are absent rather than extrapolated.
#[derive(Debug, Clone)]
pub struct GranularityTable {
    measure: serde_json::Value,
    config: TableConfig,
    h: Vec<u64>,
    h_provenance: Vec<Provenance>,
    h_hat: Vec<u64>,
    h_hat_provenance: Vec<Provenance>,
    g: Vec<u64>,
    g_hat: Vec<u64>,
}

impl GranularityTable {
    pub fn build(mu: &dyn MeasureOracle, config: TableConfig) -> Result<Self> {
        let exhaustive_to = config.exhaustive_depth.min(config.depth);
        let enumerated = if mu.is_exact() {
            max_masses_exhaustive(mu, exhaustive_to)?
        } else {
            Vec::new()
        };

        let mut h = Vec::new();
        let mut h_provenance = Vec::new();
        let mut g = Vec::new();
        for l in 0..=config.depth {
            let (mass, prov) = match enumerated.get(l) {
                Some(m) => (m.clone(), Provenance::Exhaustive),
                None if mu.is_exact() => match mu.max_mass_at_depth(l) {
                    Some(m) => (m, Provenance::ClosedForm),
                    None => break,
                },
                None => break,
            };
            h.push(h_from_max_mass(&mass));
            h_provenance.push(prov);
            while (g.len() as u64) <= config.n_max
                && mass.cmp_pow2(g.len() as i64) == Ordering::Less
            {
                g.push(l as u64);
            }
        }

        let mut h_hat: Vec<u64> = Vec::new();
        let mut h_hat_provenance = Vec::new();
        for l in 0..=config.depth {
            let raw = if l <= exhaustive_to {
                (
                    raw_h_hat(mu, l, config.refinement_bits)?,
                    Provenance::Exhaustive,
                )
            } else if let Some(&hl) = h.get(l) {
                // exact masses certify exactly n = h+1 for the heaviest cylinder
                ((l as u64).min(hl + 1), Provenance::ClosedForm)
            } else {
                break;
            };
            let prev = h_hat.last().copied().unwrap_or(0);
            h_hat.push(prev.max(raw.0));
            h_hat_provenance.push(raw.1);
        }

        let mut g_hat = Vec::new();
        for (l, &v) in h_hat.iter().enumerate() {
            while (g_hat.len() as u64) <= config.n_max && v >= g_hat.len() as u64 + 2 {
                g_hat.push(l as u64);
            }
        }

        Ok(GranularityTable {
            measure: mu.descriptor(),
            config,
            h,
            h_provenance,
            h_hat,
            h_hat_provenance,
            g,
            g_hat,
        })
    }

    pub fn measure(&self) -> &serde_json::Value {
        &self.measure
    }

    pub fn config(&self) -> &TableConfig {
        &self.config
    }

    pub fn depth(&self) -> usize {
        self.config.depth
    }

    pub fn h_values(&self) -> &[u64] {
        &self.h
    }

    pub fn h_hat_values(&self) -> &[u64] {
        &self.h_hat
    }

    pub fn g_values(&self) -> &[u64] {
        &self.g
    }

    pub fn g_hat_values(&self) -> &[u64] {
        &self.g_hat
    }

    pub fn h_provenance(&self) -> &[Provenance] {
        &self.h_provenance
    }

    pub fn h_hat_provenance(&self) -> &[Provenance] {
        &self.h_hat_provenance
    }

    pub fn h_fn(&self) -> Tabulated<'_> {
        Tabulated::new("h", &self.h)
    }

    pub fn h_hat_fn(&self) -> Tabulated<'_> {
        Tabulated::new("h_hat", &self.h_hat)
    }

    pub fn g_fn(&self) -> Tabulated<'_> {
        Tabulated::new("g", &self.g)
    }

    pub fn g_hat_fn(&self) -> Tabulated<'_> {
        Tabulated::new("g_hat", &self.g_hat)
    }

    pub fn padding_fn(&self, padding: Padding) -> Tabulated<'_> {
        match padding {
            Padding::Approx => self.g_hat_fn(),
            Padding::Exact => self.g_fn(),
        }
    }

    pub fn h(&self, l: u64) -> Result<u64> {
        self.h_fn().apply(l)
    }

    pub fn h_hat(&self, l: u64) -> Result<u64> {
        self.h_hat_fn().apply(l)
    }

    pub fn g(&self, n: u64) -> Result<u64> {
        self.g_fn().apply(n)
    }

    pub fn g_hat(&self, n: u64) -> Result<u64> {
        self.g_hat_fn().apply(n)
    }

    /// Every granularity and approximation law that can be checked on the
    /// tabulated range. Returns the violated laws with their arguments.
    pub fn check_invariants(&self, max_iterate: u32) -> Vec<String> {
        let mut bad = Vec::new();
        let h = &self.h;
        let g = &self.g;
        for l in 0..h.len().saturating_sub(1) {
            if !(h[l] <= h[l + 1] && h[l + 1] <= h[l] + 1 && h[l] <= l as u64) {
                bad.push(format!("gh(2) at l={l}"));
            }
        }
        for n in 0..g.len() {
            if let Some(&hg) = h.get(g[n] as usize) {
                if hg != n as u64 + 1 {
                    bad.push(format!("gh(3) at n={n}"));
                }
            }
            if n + 1 < g.len() {
                if let Some(&ggn1) = g.get(g[n + 1] as usize) {
                    if !((n as u64) < g[n] && g[n] < g[n + 1] && g[n + 1] < ggn1) {
                        bad.push(format!("gh(1) at n={n}"));
                    }
                }
            }
            if g[n] == 0
                || h.get(g[n] as usize).is_some_and(|&v| v <= n as u64)
                || h[(g[n] - 1) as usize] > n as u64
            {
                bad.push(format!("g(n) = min{{l : h(l) = n+1}} at n={n}"));
            }
        }
        for (l, &hl) in h.iter().enumerate() {
            // h(l) = max{n : g(n-1) <= l}: every n-1 < h(l) has g(n-1) <= l, the next does not
            let n = hl as usize;
            if n >= 1 && g.get(n - 1).is_some_and(|&v| v > l as u64) {
                bad.push(format!("h(l) = max{{n : g(n-1) <= l}} at l={l}"));
            }
            if g.get(n).is_some_and(|&v| v <= l as u64) {
                bad.push(format!("h(l) = max{{n : g(n-1) <= l}} at l={l}"));
            }
        }
        for (l, &hh) in self.h_hat.iter().enumerate() {
            if l > 0 && hh < self.h_hat[l - 1] {
                bad.push(format!("h_hat non-decreasing at l={l}"));
            }
            if let Some(&hl) = h.get(l) {
                if l >= 1 && !(hl <= hh && hh <= (l as u64).min(hl + 1)) {
                    bad.push(format!("h <= h_hat <= min(l, h+1) at l={l}"));
                }
            }
        }
        for (n, &gh) in self.g_hat.iter().enumerate() {
            if let (Some(&gn), Some(&gn1)) = (g.get(n), g.get(n + 1)) {
                if !(gn <= gh && gh <= gn1) {
                    bad.push(format!("g <= g_hat <= g(n+1) at n={n}"));
                }
            }
        }
        for k in 1..=max_iterate {
            for l in 0..h.len().min(self.h_hat.len()) as u64 {
                if let (Ok(a), Ok(b)) = (self.h_fn().iterate(k, l), self.h_hat_fn().iterate(k, l)) {
                    if !(a <= b && b <= a + k as u64) {
                        bad.push(format!("h^(k) <= h_hat^(k) <= h^(k)+k at k={k}, l={l}"));
                    }
                }
            }
        }
        bad
    }

    /// The `table` report: `{"measure", "D", "h", "g", "h_hat", "g_hat"}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "measure": self.measure,
            "D": self.config.depth,
            "h": self.h,
            "g": self.g,
            "h_hat": self.h_hat,
            "g_hat": self.g_hat,
        })
    }

    /// CSV with columns `l,h,h_hat,n,g,g_hat`; one row per index, blank when absent.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<&u64>| v.map(|x| x.to_string()).unwrap_or_default();
        let rows = self
            .h
            .len()
            .max(self.h_hat.len())
            .max(self.g.len())
            .max(self.g_hat.len());
        let mut out = String::from("l,h,h_hat,n,g,g_hat\n");
        for i in 0..rows {
            out.push_str(&format!(
                "{i},{},{},{i},{},{}\n",
                opt(self.h.get(i)),
                opt(self.h_hat.get(i)),
                opt(self.g.get(i)),
                opt(self.g_hat.get(i)),
            ));
        }
        out
    }
}

/// Build a table with default exhaustive depth.
pub fn build_table(mu: &dyn MeasureOracle, depth: usize, n_max: u64) -> Result<GranularityTable> {
    GranularityTable::build(mu, TableConfig::new(depth, n_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{bernoulli, lebesgue, Measure, RoundedMeasure};
    use std::sync::Arc;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    /// Independent route: compare every cylinder mass with `2^{-n+1}` directly.
    fn brute_h(mu: &Measure, l: usize) -> u64 {
        let masses: Vec<Dyadic> = BitString::all_of_length(l)
            .map(|s| mu.exact_mass(&s).unwrap())
            .collect();
        let mut n = 0u64;
        while masses
            .iter()
            .all(|m| m.cmp_pow2(n as i64) == Ordering::Less)
        {
            n += 1;
        }
        n
    }

    #[test]
    fn exact_h_examples() {
        let leb = lebesgue();
        assert_eq!(exact_h(&*leb, 5, 14).unwrap(), 5);
        assert_eq!(exact_h(&*leb, 0, 14).unwrap(), 0);
        let b = bernoulli(d("1/4")).unwrap();
        assert_eq!(exact_h(&*b, 3, 14).unwrap(), 2);
        assert!(matches!(
            exact_h(&*leb, 15, 14),
            Err(Error::DepthCapExceeded { .. })
        ));
    }

    #[test]
    fn exact_g_examples() {
        let leb = lebesgue();
        assert_eq!(exact_g(&*leb, 4, 14).unwrap(), 5);
        assert_eq!(exact_g(&*leb, 0, 14).unwrap(), 1);
        let b = bernoulli(d("1/4")).unwrap();
        assert_eq!(exact_g(&*b, 1, 14).unwrap(), 3);
        assert!(exact_g(&*leb, 20, 14).is_err());
    }

    #[test]
    fn exhaustive_matches_brute_force() {
        for p in ["1/4", "3/8", "1/2", "5/8"] {
            let mu = bernoulli(d(p)).unwrap();
            for l in 0..=10 {
                assert_eq!(
                    exact_h(&*mu, l, 14).unwrap(),
                    brute_h(&mu, l),
                    "p={p} l={l}"
                );
            }
        }
    }

    #[test]
    fn approx_h_examples() {
        let leb = lebesgue();
        let v = approx_h(&*leb, 5, 14).unwrap();
        assert!(v == 5 || v == 6);
        assert!(v >= exact_h(&*leb, 5, 14).unwrap());
        assert_eq!(approx_h(&*leb, 0, 14).unwrap(), 0);
        let b = bernoulli(d("1/4")).unwrap();
        assert!([2, 3].contains(&approx_h(&*b, 3, 14).unwrap()));
        let rounded: Measure = Arc::new(RoundedMeasure::new(b.clone()));
        for l in 1..=10 {
            let hl = exact_h(&*b, l, 14).unwrap();
            let hh = approx_h(&*rounded, l, 14).unwrap();
            assert!(hl <= hh && hh <= (l as u64).min(hl + 1), "l={l}");
        }
    }

    #[test]
    fn approx_g_examples() {
        let leb = lebesgue();
        let v = approx_g(&*leb, 1, 14).unwrap();
        assert!((2..=3).contains(&v));
        let v = approx_g(&*leb, 0, 14).unwrap();
        assert!((1..=2).contains(&v));
        let b = bernoulli(d("1/4")).unwrap();
        let g2 = exact_g(&*b, 2, 14).unwrap();
        let v = approx_g(&*b, 1, 14).unwrap();
        assert!(3 <= v && v <= g2);
    }

    #[test]
    fn iterate_examples() {
        let ids: Vec<u64> = (0..20).collect();
        let id = Tabulated::new("h", &ids);
        assert_eq!(iterate(id, 3, 7).unwrap(), 7);
        assert_eq!(iterate(id, 0, 9).unwrap(), 9);
        let b = bernoulli(d("1/4")).unwrap();
        let t = build_table(&*b, 8, 3).unwrap();
        assert_eq!(t.h(5).unwrap(), 3);
        assert_eq!(iterate(t.h_fn(), 2, 5).unwrap(), 2);
        let short = Tabulated::new("f", &[1, 5]);
        assert!(matches!(
            short.iterate(3, 0),
            Err(Error::NotTabulated { arg: 5, .. })
        ));
    }

    #[test]
    fn table_examples() {
        let leb = build_table(&*lebesgue(), 8, 6).unwrap();
        assert_eq!(leb.h_values(), &[0, 1, 2, 3, 4, 5, 6, 7, 8]);
        assert_eq!(leb.g_values(), &[1, 2, 3, 4, 5, 6, 7]);
        let half = build_table(&*bernoulli(d("1/2")).unwrap(), 8, 6).unwrap();
        assert_eq!(half.h_values(), leb.h_values());
        assert_eq!(half.g_values(), leb.g_values());
        assert_eq!(half.h_hat_values(), leb.h_hat_values());
        let b = build_table(&*bernoulli(d("1/4")).unwrap(), 8, 3).unwrap();
        // (3/4)^7 = 2187/16384 >= 1/8, so h(7) = 3
        assert_eq!(b.h_values(), &[0, 1, 1, 2, 2, 3, 3, 3, 4]);
        assert!(b.check_invariants(4).is_empty());
    }

    #[test]
    fn closed_form_extends_the_table() {
        let b = bernoulli(d("1/4")).unwrap();
        let t =
            GranularityTable::build(&*b, TableConfig::new(40, 20).exhaustive_depth(10)).unwrap();
        assert_eq!(t.h_values().len(), 41);
        assert_eq!(t.h_provenance()[10], Provenance::Exhaustive);
        assert_eq!(t.h_provenance()[11], Provenance::ClosedForm);
        let full = GranularityTable::build(&*b, TableConfig::new(14, 20)).unwrap();
        assert_eq!(&t.h_values()[..15], full.h_values());
        assert_eq!(&t.h_hat_values()[..15], full.h_hat_values());
        assert!(t.check_invariants(3).is_empty());
    }

    #[test]
    fn interval_only_tables_omit_h() {
        let m: Measure = Arc::new(RoundedMeasure::new(lebesgue()));
        let t = build_table(&*m, 10, 5).unwrap();
        assert!(t.h_values().is_empty());
        assert_eq!(t.h_hat_values().len(), 11);
        assert!(matches!(t.h(3), Err(Error::NotTabulated { .. })));
    }

    #[test]
    fn csv_layout() {
        let t = build_table(&*lebesgue(), 2, 1).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("l,h,h_hat,n,g,g_hat\n0,0,0,0,1,2\n"));
    }
}
