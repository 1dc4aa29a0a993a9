//! Distribution functions on finite chains and their lower adjoints.

use std::sync::Arc;

use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::poset::{ElementId, Poset};
use crate::valuation::{same_base, SimpleValuation, ValuationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("the base poset is not a chain")]
    NotAChain,
    #[error("{0} is above the total mass, the quantile map is undefined there")]
    Unreachable(Dyadic),
    #[error("quantile map stops at {0}, it must reach 1")]
    PartialQuantile(Dyadic),
    #[error("invalid breakpoints: {0}")]
    InvalidBreakpoints(String),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

pub type Result<T, E = ChainError> = std::result::Result<T, E>;

/// `F_μ(x) = μ(↓x)`, stored along the chain from the bottom up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cdf {
    base: Arc<Poset>,
    order: Vec<ElementId>,
    values: Vec<Dyadic>,
}

impl Cdf {
    pub fn base(&self) -> &Arc<Poset> {
        &self.base
    }

    /// `(x, F(x))` from the bottom up.
    pub fn values(&self) -> impl Iterator<Item = (ElementId, &Dyadic)> {
        self.order.iter().copied().zip(&self.values)
    }

    pub fn at(&self, x: ElementId) -> Dyadic {
        let i = self.order.iter().position(|&y| y == x).expect("element of the base chain");
        self.values[i].clone()
    }

    pub fn mass(&self) -> Dyadic {
        self.values.last().cloned().unwrap_or_default()
    }

    pub fn pointwise_le(&self, other: &Cdf) -> Result<bool> {
        if !same_base(&self.base, &other.base) {
            return Err(ValuationError::MixedBase.into());
        }
        Ok(self.values.iter().zip(&other.values).all(|(a, b)| a <= b))
    }
}

fn chain_of(p: &Poset) -> Result<Vec<ElementId>> {
    if !p.is_chain() {
        return Err(ChainError::NotAChain);
    }
    Ok(p.chain_order())
}

pub fn cdf(v: &SimpleValuation) -> Result<Cdf> {
    let base = v.base().clone();
    let order = chain_of(&base)?;
    let mut running = Dyadic::zero();
    let mut values = Vec::with_capacity(order.len());
    for &x in &order {
        running = &running + &v.weight(x);
        values.push(running.clone());
    }
    debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
    Ok(Cdf { base, order, values })
}

/// A left-continuous step function `[0, 1] → D`: `G(r) = e_i` for the least
/// `i` with `r ≤ t_i`. Undefined above the last threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantileMap {
    base: Arc<Poset>,
    breaks: Vec<(Dyadic, ElementId)>,
}

impl QuantileMap {
    /// Thresholds must strictly increase (the first may be zero) and stay
    /// within `[0, 1]`; elements must strictly increase along the chain.
    pub fn new(base: &Arc<Poset>, breaks: Vec<(Dyadic, ElementId)>) -> Result<Self> {
        chain_of(base)?;
        if breaks.is_empty() {
            return Err(ChainError::InvalidBreakpoints("no breakpoints".into()));
        }
        for (t, x) in &breaks {
            if !base.contains(*x) {
                return Err(ValuationError::UnknownElement(format!("#{}", x.index())).into());
            }
            if *t > Dyadic::one() {
                return Err(ChainError::InvalidBreakpoints(format!("threshold {t} exceeds 1")));
            }
        }
        for pair in breaks.windows(2) {
            let ((s, x), (t, y)) = (&pair[0], &pair[1]);
            if s >= t {
                return Err(ChainError::InvalidBreakpoints(format!("thresholds {s} and {t} are not increasing")));
            }
            if x == y || !base.le(*x, *y) {
                return Err(ChainError::InvalidBreakpoints(format!(
                    "{} does not lie strictly above {}",
                    base.name(*y),
                    base.name(*x)
                )));
            }
        }
        Ok(Self { base: base.clone(), breaks })
    }

    pub fn base(&self) -> &Arc<Poset> {
        &self.base
    }

    pub fn breaks(&self) -> &[(Dyadic, ElementId)] {
        &self.breaks
    }

    pub fn is_total(&self) -> bool {
        self.breaks.last().is_some_and(|(t, _)| t.is_one())
    }

    pub fn at(&self, r: &Dyadic) -> Result<ElementId> {
        self.breaks.iter().find(|(t, _)| r <= t).map(|(_, x)| *x).ok_or_else(|| ChainError::Unreachable(r.clone()))
    }

    /// `G ≤ G′` at every point of `[0, 1]`. Both maps are constant on each
    /// interval between consecutive thresholds of either map, and take the
    /// interval's value at its right end, so checking `0` and every threshold
    /// suffices.
    pub fn pointwise_le(&self, other: &QuantileMap) -> Result<bool> {
        if !same_base(&self.base, &other.base) {
            return Err(ValuationError::MixedBase.into());
        }
        for q in [self, other] {
            if !q.is_total() {
                return Err(ChainError::PartialQuantile(q.breaks.last().expect("nonempty").0.clone()));
            }
        }
        let points = std::iter::once(Dyadic::zero()).chain(self.breaks.iter().chain(&other.breaks).map(|(t, _)| t.clone()));
        for r in points {
            if !self.base.le(self.at(&r)?, other.at(&r)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `G(r) = min { x : F(x) ≥ r }`. Elements whose interval `(F(x⁻), F(x)]`
/// is empty are skipped, except the least one, which carries `G(0)`.
pub fn lower_adjoint(f: &Cdf) -> QuantileMap {
    let mut breaks: Vec<(Dyadic, ElementId)> = Vec::new();
    for (x, t) in f.values() {
        if breaks.last().is_none_or(|(s, _)| s < t) {
            breaks.push((t.clone(), x));
        }
    }
    QuantileMap { base: f.base.clone(), breaks }
}

/// `G_* λ`: each element gets the length of the interval it is taken on.
pub fn pushforward_lebesgue(g: &QuantileMap) -> Result<SimpleValuation> {
    if !g.is_total() {
        return Err(ChainError::PartialQuantile(g.breaks.last().expect("nonempty").0.clone()));
    }
    let mut prev = Dyadic::zero();
    let mut atoms = Vec::with_capacity(g.breaks.len());
    for (t, x) in &g.breaks {
        atoms.push((*x, t.checked_sub(&prev).expect("thresholds increase")));
        prev = t.clone();
    }
    Ok(SimpleValuation::new(&g.base, atoms)?)
}
