//! Monotone moduli `f: ℕ → ℕ` and the block layout they induce.
//!
//! Both the self-modulus padding and the perfect-set tree use the same layout:
//! block `n` starts at position `p_n`, holds `f(p_n)` forced ones, a forced
//! `0` separator and one free bit, so `p_{n+1} = p_n + f(p_n) + 2`.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModulusFunction {
    /// `f(n) = (n+1)^degree`
    Poly { degree: u32 },
    /// `f(n) = values[n]`; the last value repeats past the end of the table.
    Table { values: Vec<u64> },
    /// `f(n) = 2^n`
    Exp {},
}

impl ModulusFunction {
    pub fn validate(&self) -> Result<()> {
        if let ModulusFunction::Table { values } = self {
            if values.is_empty() {
                return Err(Error::validation("modulus", "table has no values"));
            }
            if let Some(i) = values.iter().position(|v| *v == 0) {
                return Err(Error::validation(
                    "modulus",
                    format!("f({i}) = 0 but a modulus must satisfy f(n) >= 1"),
                ));
            }
            if let Some(i) = values.windows(2).position(|w| w[1] < w[0]) {
                return Err(Error::validation(
                    "modulus",
                    format!("table decreases at n = {}", i + 1),
                ));
            }
        }
        Ok(())
    }

    pub fn is_strictly_increasing(&self) -> bool {
        match self {
            ModulusFunction::Poly { degree } => *degree > 0,
            ModulusFunction::Table { .. } => false,
            ModulusFunction::Exp {} => true,
        }
    }

    /// Exact value, or `Overflow` when it does not fit in a `u64`.
    pub fn eval(&self, n: u64) -> Result<u64> {
        let overflow = || Error::Overflow {
            what: "modulus value",
            value: format!("f({n})"),
        };
        match self {
            ModulusFunction::Poly { degree } => {
                let base = n.checked_add(1).ok_or_else(overflow)?;
                base.checked_pow(*degree).ok_or_else(overflow)
            }
            ModulusFunction::Table { values } => {
                let i = usize::try_from(n)
                    .unwrap_or(usize::MAX)
                    .min(values.len() - 1);
                Ok(values[i])
            }
            ModulusFunction::Exp {} => {
                if n >= 64 {
                    Err(overflow())
                } else {
                    Ok(1u64 << n)
                }
            }
        }
    }

    /// Value clamped to `u64::MAX`; only for comparisons against lengths.
    pub fn eval_saturating(&self, n: u64) -> u64 {
        self.eval(n).unwrap_or(u64::MAX)
    }

    /// Exact arbitrary-precision value.
    pub fn eval_big(&self, n: u64) -> Result<BigUint> {
        match self {
            ModulusFunction::Poly { degree } => {
                Ok(num_traits::pow(BigUint::from(n) + 1u32, *degree as usize))
            }
            ModulusFunction::Exp {} => {
                if n > (1 << 24) {
                    return Err(Error::Overflow {
                        what: "modulus value",
                        value: format!("2^{n}"),
                    });
                }
                Ok(BigUint::from(1u32) << n)
            }
            ModulusFunction::Table { .. } => self.eval(n).map(BigUint::from),
        }
    }
}

/// Where a finite string sits relative to the block tree of a modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TreePosition {
    /// Consistent with the tree; `completed_blocks` free bits have been read.
    OnTree { completed_blocks: usize },
    /// The bit at `position` contradicts a forced bit.
    OffTree { position: usize },
}

/// Walk `sigma` against the block layout of `f`.
pub fn classify_in_tree(f: &ModulusFunction, sigma: &BitString) -> TreePosition {
    let len = sigma.len() as u64;
    let mut start = 0u64;
    let mut completed = 0usize;
    let bit = |i: u64| sigma.as_slice()[i as usize];
    while start < len {
        let ones = f.eval_saturating(start);
        let sep = start.saturating_add(ones);
        let run_end = sep.min(len);
        if let Some(off) = (start..run_end).find(|&i| !bit(i)) {
            return TreePosition::OffTree {
                position: off as usize,
            };
        }
        if sep >= len {
            break;
        }
        if bit(sep) {
            return TreePosition::OffTree {
                position: sep as usize,
            };
        }
        let free = sep + 1;
        if free >= len {
            break;
        }
        completed += 1;
        start = free + 1;
    }
    TreePosition::OnTree {
        completed_blocks: completed,
    }
}

/// Number of free positions strictly below `len`.
pub fn free_positions_below(f: &ModulusFunction, len: u64) -> u64 {
    let mut start = 0u64;
    let mut count = 0u64;
    loop {
        let free = start
            .saturating_add(f.eval_saturating(start))
            .saturating_add(1);
        if free >= len {
            return count;
        }
        count += 1;
        start = free + 1;
    }
}
