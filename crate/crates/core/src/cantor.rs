//! Finite levels of the Cantor tree and the adjunction with the unit interval.
//!
//! Infinite words exist only as truncations to a working depth.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::poset::{ElementId, Poset};
use crate::valuation::{SimpleValuation, ValuationError};

/// Deepest level a table may be materialized at.
pub const MAX_DEPTH: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CantorError {
    #[error("depth {requested} exceeds word length {available}")]
    DepthExceeded { requested: usize, available: usize },
    #[error("{0} is outside [0, 1]")]
    OutOfRange(Dyadic),
    #[error("table is undefined at word {0}")]
    PartialMap(String),
    #[error("table has {found} entries, level {depth} has {expected}")]
    LevelSize { depth: u32, expected: usize, found: usize },
    #[error("depth {0} is above the supported maximum")]
    DepthTooLarge(u32),
    #[error("invalid word {0:?}")]
    Syntax(String),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordKind {
    Finite,
    /// A prefix of an infinite word, cut at the working depth.
    TruncatedInfinite,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    bits: Vec<bool>,
    kind: WordKind,
}

impl Word {
    pub fn finite(bits: Vec<bool>) -> Self {
        Self { bits, kind: WordKind::Finite }
    }

    pub fn truncated(bits: Vec<bool>) -> Self {
        Self { bits, kind: WordKind::TruncatedInfinite }
    }

    pub fn empty() -> Self {
        Self::finite(Vec::new())
    }

    /// The `depth`-bit word whose binary value is `i`, most significant first.
    pub fn from_index(i: u64, depth: u32) -> Self {
        assert!(depth <= 64 && (depth == 64 || i >> depth == 0), "index {i} does not fit in {depth} bits");
        Self::finite((0..depth).rev().map(|k| (i >> k) & 1 == 1).collect())
    }

    pub fn index(&self) -> u64 {
        assert!(self.bits.len() <= 64);
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn kind(&self) -> WordKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `π_{m}`: the `m`-bit prefix, as a finite word.
    pub fn project(&self, m: usize) -> Result<Word, CantorError> {
        if m > self.len() {
            return Err(CantorError::DepthExceeded { requested: m, available: self.len() });
        }
        Ok(Word { bits: self.bits[..m].to_vec(), kind: if m == self.len() { self.kind } else { WordKind::Finite } })
    }

    /// `ι_n`: pads with zeros to length `n`.
    pub fn embed(&self, n: usize) -> Result<Word, CantorError> {
        if self.len() > n {
            return Err(CantorError::DepthExceeded { requested: self.len(), available: n });
        }
        let mut bits = self.bits.clone();
        bits.resize(n, false);
        Ok(Word { bits, kind: self.kind })
    }

    /// Prefix order.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.bits.starts_with(&self.bits)
    }

    /// `u ≪ v` iff `u` is finite and a prefix of `v`.
    pub fn way_below(&self, other: &Word) -> bool {
        self.kind == WordKind::Finite && self.is_prefix_of(other)
    }

    /// All extensions of length `n`, in lexicographic order.
    pub fn extensions(&self, n: usize) -> impl Iterator<Item = Word> + '_ {
        let extra = n.saturating_sub(self.len());
        assert!(extra < 64);
        (0..1u64 << extra).map(move |tail| {
            let mut bits = self.bits.clone();
            bits.extend((0..extra).rev().map(|k| (tail >> k) & 1 == 1));
            Word::finite(bits)
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            WordKind::Finite => write!(f, "\"{self}\""),
            WordKind::TruncatedInfinite => write!(f, "\"{self}…\""),
        }
    }
}

impl FromStr for Word {
    type Err = CantorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(CantorError::Syntax(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word::finite)
    }
}

/// `C_n`, the `2^n` words of length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Level {
    pub depth: u32,
}

impl Level {
    pub fn new(depth: u32) -> Result<Self, CantorError> {
        if depth > MAX_DEPTH {
            return Err(CantorError::DepthTooLarge(depth));
        }
        Ok(Self { depth })
    }

    pub fn len(&self) -> usize {
        1 << self.depth
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> impl Iterator<Item = Word> {
        let depth = self.depth;
        (0..1u64 << depth).map(move |i| Word::from_index(i, depth))
    }

    /// `ν_n`'s weight on each word.
    pub fn cell(&self) -> Dyadic {
        Dyadic::pow2_neg(self.depth)
    }
}

/// `g_* ν_n` for a table on level `depth`, indexed by word value.
pub fn pushforward_counting(base: &Arc<Poset>, depth: u32, table: &[Option<ElementId>]) -> Result<SimpleValuation, CantorError> {
    let level = Level::new(depth)?;
    if table.len() != level.len() {
        return Err(CantorError::LevelSize { depth, expected: level.len(), found: table.len() });
    }
    let mut counts = vec![0u64; base.len()];
    for (i, y) in table.iter().enumerate() {
        let y = y.ok_or_else(|| CantorError::PartialMap(Word::from_index(i as u64, depth).to_string()))?;
        if !base.contains(y) {
            return Err(ValuationError::UnknownElement(format!("#{}", y.index())).into());
        }
        counts[y.index()] += 1;
    }
    let atoms = base.elements().map(|y| (y, Dyadic::new(counts[y.index()], depth)));
    Ok(SimpleValuation::new(base, atoms)?)
}

/// `Σ bit_i · 2^-(i+1)`.
pub fn word_to_unit(w: &Word) -> Dyadic {
    let n = BigUint::from_radix_be(&w.bits.iter().map(|&b| b as u8).collect::<Vec<_>>(), 2).unwrap_or_default();
    Dyadic::new(n, w.len() as u32)
}

/// `j(r)` cut to `n` bits: the least infinite word with value at least `r`.
/// For dyadic `r > 0` this is the expansion ending in ones, whose `n`-bit
/// prefix has index `⌈r·2^n⌉ − 1`.
pub fn unit_to_word(r: &Dyadic, n: u32) -> Result<Word, CantorError> {
    if *r > Dyadic::one() {
        return Err(CantorError::OutOfRange(r.clone()));
    }
    if n > 64 {
        return Err(CantorError::DepthTooLarge(n));
    }
    let index = if r.is_zero() {
        BigUint::zero()
    } else {
        let k = r.numerator().clone();
        let e = r.exponent();
        let scaled = if n >= e { k << (n - e) } else { Integer::div_ceil(&k, &(BigUint::one() << (e - n))) };
        scaled - 1u32
    };
    let bits = (0..n).rev().map(|i| index.bit(i as u64)).collect();
    Ok(Word::truncated(bits))
}
