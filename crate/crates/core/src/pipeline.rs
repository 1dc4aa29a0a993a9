//! Unit-interval samplers: representation maps precomposed with `j`.
//!
//! At precision `d` the interval is read through the grid of right endpoints
//! `i/2^d`, `i = 1..=2^d`. With the non-terminating expansion, `j` sends these
//! bijectively onto the `2^d` words of length `d`, so each grid point stands
//! for the cell `((i−1)/2^d, i/2^d]` of Lebesgue measure `2^-d`.

use std::sync::Arc;

use thiserror::Error;

use crate::cantor::{unit_to_word, CantorError, Word};
use crate::dyadic::{Dyadic, DyadicError};
use crate::poset::{ElementId, Poset};
use crate::skorohod::{
    build_schedule, convergence_check, represent, represent_sequence, represent_subprobability, ConvergenceReport,
    RepresentationMap, SkorohodError,
};
use crate::valuation::{SimpleValuation, ValuationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Skorohod(#[from] SkorohodError),
    #[error(transparent)]
    Cantor(#[from] CantorError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;

/// `X = X′ ∘ j` at a fixed precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkorohodWitness {
    pub map: RepresentationMap,
    pub precision: u32,
    /// For subprobability targets: the original poset and the fresh bottom of
    /// the lifted one. Grid points sent to the fresh bottom are undefined.
    pub restriction: Option<(Arc<Poset>, ElementId)>,
}

/// One row of a grid tabulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridRecord {
    pub point: Dyadic,
    pub word: Word,
    /// `None` where the witness is undefined.
    pub value: Option<ElementId>,
}

impl SkorohodWitness {
    fn new(map: RepresentationMap, restriction: Option<(Arc<Poset>, ElementId)>) -> Self {
        let precision = map.depth();
        Self { map, precision, restriction }
    }

    pub fn driver(&self) -> String {
        format!("r -> evaluate(unit_to_word(r, {}))", self.precision)
    }

    pub fn grid(&self) -> impl Iterator<Item = Dyadic> {
        let d = self.precision;
        (1..=1u64 << d).map(move |i| Dyadic::new(i, d))
    }

    /// `X(r)`, or `None` on the excluded region of a subprobability witness.
    pub fn apply(&self, r: &Dyadic) -> Result<Option<ElementId>> {
        let w = unit_to_word(r, self.precision)?;
        let y = self.map.value(&w)?;
        Ok(match &self.restriction {
            Some((_, fresh)) if y == *fresh => None,
            _ => Some(y),
        })
    }

    pub fn records(&self) -> Result<Vec<GridRecord>> {
        self.grid()
            .map(|point| {
                let word = unit_to_word(&point, self.precision)?;
                let value = self.apply(&point)?;
                Ok(GridRecord { point, word, value })
            })
            .collect()
    }

    /// The poset the law lives on: the original one for subprobability witnesses.
    pub fn law_base(&self) -> &Arc<Poset> {
        match &self.restriction {
            Some((original, _)) => original,
            None => self.map.base(),
        }
    }

    /// Law of the grid-uniform distribution through the witness, with the
    /// undefined region dropped.
    pub fn tabulate(&self) -> Result<SimpleValuation> {
        let cell = Dyadic::pow2_neg(self.precision);
        let mut atoms = Vec::new();
        for r in self.grid() {
            if let Some(y) = self.apply(&r)? {
                atoms.push((y, cell.clone()));
            }
        }
        Ok(SimpleValuation::new(self.law_base(), atoms)?)
    }
}

pub fn skorohod(target: &SimpleValuation, k: usize) -> Result<SkorohodWitness> {
    let map = represent(&build_schedule(target, k)?)?;
    Ok(SkorohodWitness::new(map, None))
}

/// Builds a valuation from integer ratios, rejecting weights whose reduced
/// denominator is not a power of two.
pub fn target_from_ratios(base: &Arc<Poset>, weights: &[(&str, u64, u64)]) -> Result<SimpleValuation> {
    let mut atoms = Vec::with_capacity(weights.len());
    for (name, num, den) in weights {
        atoms.push((base.id(name).map_err(ValuationError::from)?, Dyadic::from_ratio(*num, *den)?));
    }
    Ok(SimpleValuation::new(base, atoms)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceReport {
    /// Common grid precision.
    pub precision: u32,
    pub convergence: ConvergenceReport,
}

impl SequenceReport {
    /// Grid words whose limit value is maximal.
    pub fn maximal_words(&self) -> usize {
        self.convergence.maximal_words()
    }

    /// Of those, the words where the sequence eventually equals the limit.
    pub fn equal_words(&self) -> usize {
        self.convergence.equal_words()
    }

    /// Whether eventual equality holds on every maximal-limit word.
    pub fn fraction_is_one(&self) -> bool {
        self.equal_words() == self.maximal_words()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceWitness {
    pub witnesses: Vec<SkorohodWitness>,
    pub limit: SkorohodWitness,
    pub report: SequenceReport,
}

pub fn skorohod_sequence(
    targets: &[SimpleValuation],
    limit: &SimpleValuation,
    k: usize,
    from_index: usize,
) -> Result<SequenceWitness> {
    let rep = represent_sequence(targets, limit, k, from_index)?;
    let precision = rep.depth();
    let words = (1..=1u64 << precision)
        .map(|i| unit_to_word(&Dyadic::new(i, precision), precision))
        .collect::<Result<Vec<_>, _>>()?;
    let convergence = convergence_check(&rep.maps, &rep.limit_map, &words)?;
    let witnesses = rep.maps.into_iter().map(|m| SkorohodWitness::new(m, None)).collect();
    let limit = SkorohodWitness::new(rep.limit_map, None);
    Ok(SequenceWitness { witnesses, limit, report: SequenceReport { precision, convergence } })
}

pub fn skorohod_subprobability(target: &SimpleValuation, k: usize) -> Result<SkorohodWitness> {
    let rep = represent_subprobability(target, k)?;
    Ok(SkorohodWitness::new(rep.map, Some((rep.original, rep.fresh_bottom))))
}
