//! Finite binary words and deterministic infinite bit streams.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite word over `{0,1}`. Text form is ASCII `0`/`1`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        BitString::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString { bits }
    }

    pub fn repeat(bit: bool, count: usize) -> Self {
        BitString {
            bits: vec![bit; count],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn push_run(&mut self, bit: bool, count: usize) {
        self.bits.extend(std::iter::repeat_n(bit, count));
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn child(&self, bit: bool) -> BitString {
        let mut c = self.clone();
        c.push(bit);
        c
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut c = self.clone();
        c.extend_from(other);
        c
    }

    /// `self ↾ n`: the first `min(n, len)` bits.
    pub fn truncate_to(&self, n: usize) -> BitString {
        BitString {
            bits: self.bits[..n.min(self.bits.len())].to_vec(),
        }
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.bits.starts_with(&self.bits)
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn zeros(&self) -> usize {
        self.len() - self.ones()
    }

    /// All words of length `n` in lexicographic order.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = BitString> {
        assert!(n < 64, "refusing to enumerate 2^{n} words");
        (0u64..(1u64 << n)).map(move |v| {
            BitString::from_bits((0..n).map(|i| (v >> (n - 1 - i)) & 1 == 1).collect())
        })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .bits
            .iter()
            .map(|b| if *b { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    position: i,
                    message: format!("expected '0' or '1', found {other:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::from_bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Concatenate runs `bit^count` in order.
pub fn concat_blocks(parts: &[(bool, usize)]) -> BitString {
    let mut out = BitString::new();
    for &(bit, count) in parts {
        out.push_run(bit, count);
    }
    out
}

/// A deterministic infinite binary sequence given by a pure indexed rule.
#[derive(Clone)]
pub struct BitStream {
    label: String,
    rule: Arc<dyn Fn(usize) -> bool + Send + Sync>,
}

impl BitStream {
    pub fn from_fn(
        label: impl Into<String>,
        rule: impl Fn(usize) -> bool + Send + Sync + 'static,
    ) -> Self {
        BitStream {
            label: label.into(),
            rule: Arc::new(rule),
        }
    }

    pub fn zeros() -> Self {
        BitStream::from_fn("zeros", |_| false)
    }

    pub fn ones() -> Self {
        BitStream::from_fn("ones", |_| true)
    }

    /// `0101…`
    pub fn alternating() -> Self {
        BitStream::from_fn("alt", |i| i % 2 == 1)
    }

    /// `pattern` repeated forever. An empty pattern gives all zeros.
    pub fn periodic(pattern: BitString) -> Self {
        if pattern.is_empty() {
            return BitStream::zeros();
        }
        let label = format!("periodic:{pattern}");
        BitStream::from_fn(label, move |i| pattern.as_slice()[i % pattern.len()])
    }

    /// `prefix` followed by `tail` forever.
    pub fn from_prefix(prefix: BitString, tail: bool) -> Self {
        let label = format!("{prefix}({})*", u8::from(tail));
        BitStream::from_fn(label, move |i| prefix.bit(i).unwrap_or(tail))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn bit(&self, i: usize) -> bool {
        (self.rule)(i)
    }

    pub fn prefix(&self, n: usize) -> BitString {
        BitString::from_bits((0..n).map(|i| self.bit(i)).collect())
    }

    pub fn has_prefix(&self, sigma: &BitString) -> bool {
        sigma
            .as_slice()
            .iter()
            .enumerate()
            .all(|(i, b)| self.bit(i) == *b)
    }
}

impl fmt::Debug for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BitStream")
            .field("label", &self.label)
            .finish()
    }
}

/// The first `n` bits of `x`.
pub fn stream_prefix(x: &BitStream, n: usize) -> BitString {
    x.prefix(n)
}
