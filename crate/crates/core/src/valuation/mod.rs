//! Simple valuations `Σ r_x δ_x` with dyadic weights on a finite poset.

mod order;
mod portmanteau;

pub use order::{OrderDecision, TransportPlan};
pub use portmanteau::{portmanteau_check, Condition, PortmanteauReport, PortmanteauWitness, SetCheck};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::dyadic::{common_exponent, Dyadic, DyadicError};
use crate::poset::{ElementId, Poset, PosetError, UpperSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValuationError {
    #[error("valuations live on different posets")]
    MixedBase,
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("total mass {0} exceeds 1")]
    MassExceeded(Dyadic),
    #[error("the first valuation is not below the second")]
    NotComparable,
    #[error("valuation has mass {0}, expected 1")]
    NotProbability(Dyadic),
    #[error("function is not monotone: {0}")]
    NotMonotone(String),
    #[error("map is undefined at {0}")]
    PartialMap(String),
    #[error("tail index {index} is outside a sequence of length {len}")]
    InvalidTail { index: usize, len: usize },
    #[error("transport plan check failed: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
}

pub type Result<T, E = ValuationError> = std::result::Result<T, E>;

/// Selects the ambient powerdomain for the way-below test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// Subprobability valuations, `V D`.
    Subprobability,
    /// Probability valuations, `V₁ D`.
    Probability,
}

#[derive(Clone)]
pub struct SimpleValuation {
    base: Arc<Poset>,
    weights: BTreeMap<ElementId, Dyadic>,
}

impl PartialEq for SimpleValuation {
    fn eq(&self, other: &Self) -> bool {
        same_base(&self.base, &other.base) && self.weights == other.weights
    }
}

impl Eq for SimpleValuation {}

pub(crate) fn same_base(a: &Arc<Poset>, b: &Arc<Poset>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl SimpleValuation {
    /// Repeated atoms are summed; zero weights are dropped.
    pub fn new(base: &Arc<Poset>, atoms: impl IntoIterator<Item = (ElementId, Dyadic)>) -> Result<Self> {
        let mut weights: BTreeMap<ElementId, Dyadic> = BTreeMap::new();
        for (x, w) in atoms {
            if !base.contains(x) {
                return Err(ValuationError::UnknownElement(format!("#{}", x.index())));
            }
            if w.is_zero() {
                continue;
            }
            let entry = weights.entry(x).or_default();
            *entry = &*entry + &w;
        }
        let v = Self { base: base.clone(), weights };
        let mass = v.mass();
        if mass > Dyadic::one() {
            return Err(ValuationError::MassExceeded(mass));
        }
        Ok(v)
    }

    /// Convenience constructor from element names and dyadic literals.
    pub fn from_named(base: &Arc<Poset>, atoms: &[(&str, &str)]) -> Result<Self> {
        let mut parsed = Vec::with_capacity(atoms.len());
        for (name, w) in atoms {
            parsed.push((base.id(name)?, w.parse::<Dyadic>()?));
        }
        Self::new(base, parsed)
    }

    pub fn zero(base: &Arc<Poset>) -> Self {
        Self { base: base.clone(), weights: BTreeMap::new() }
    }

    pub fn point(base: &Arc<Poset>, x: ElementId) -> Self {
        Self { base: base.clone(), weights: BTreeMap::from([(x, Dyadic::one())]) }
    }

    /// `δ_⊥`.
    pub fn bottom(base: &Arc<Poset>) -> Self {
        Self::point(base, base.bottom())
    }

    pub fn base(&self) -> &Arc<Poset> {
        &self.base
    }

    pub fn weight(&self, x: ElementId) -> Dyadic {
        self.weights.get(&x).cloned().unwrap_or_default()
    }

    /// Nonzero atoms in declaration order.
    pub fn atoms(&self) -> impl Iterator<Item = (ElementId, &Dyadic)> {
        self.weights.iter().map(|(x, w)| (*x, w))
    }

    pub fn support(&self) -> Vec<ElementId> {
        self.weights.keys().copied().collect()
    }

    pub fn mass(&self) -> Dyadic {
        self.weights.values().sum()
    }

    pub fn is_probability(&self) -> bool {
        self.mass().is_one()
    }

    /// Exponent of the common denominator of all weights.
    pub fn exponent(&self) -> u32 {
        common_exponent(self.weights.values())
    }

    pub(crate) fn check_base(&self, other: &Self) -> Result<()> {
        if same_base(&self.base, &other.base) { Ok(()) } else { Err(ValuationError::MixedBase) }
    }

    pub(crate) fn require_probability(&self) -> Result<()> {
        let mass = self.mass();
        if mass.is_one() { Ok(()) } else { Err(ValuationError::NotProbability(mass)) }
    }

    /// `μ(U) = Σ { r_x : x ∈ U }`.
    pub fn evaluate(&self, set: &UpperSet) -> Result<Dyadic> {
        if !set.belongs_to(&self.base) {
            return Err(ValuationError::MixedBase);
        }
        Ok(self.weights.iter().filter(|(x, _)| set.contains(**x)).map(|(_, w)| w).sum())
    }

    /// `μ(↑x)`.
    pub fn evaluate_up(&self, x: ElementId) -> Dyadic {
        self.weights.iter().filter(|(y, _)| self.base.le(x, **y)).map(|(_, w)| w).sum()
    }

    /// `c · μ` for `c ≤ 1`.
    pub fn scale(&self, c: &Dyadic) -> Result<Self> {
        if *c > Dyadic::one() {
            return Err(ValuationError::MassExceeded(c.clone()));
        }
        let mut weights = BTreeMap::new();
        for (x, w) in &self.weights {
            let cw = w.checked_mul(c)?;
            if !cw.is_zero() {
                weights.insert(*x, cw);
            }
        }
        Ok(Self { base: self.base.clone(), weights })
    }

    /// Pointwise sum; fails if the total mass exceeds one.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let atoms = self.atoms().chain(other.atoms()).map(|(x, w)| (x, w.clone()));
        Self::new(&self.base, atoms)
    }

    /// `(1 − ε)·self + ε·other` for `ε ∈ [0, 1]`.
    pub fn mix(&self, other: &Self, eps: &Dyadic) -> Result<Self> {
        self.check_base(other)?;
        let keep = Dyadic::one().checked_sub(eps).map_err(|_| ValuationError::MassExceeded(eps.clone()))?;
        self.scale(&keep)?.plus(&other.scale(eps)?)
    }

    /// `φ(μ) = μ + (1 − μ(D))·δ_⊥`.
    pub fn normalize(&self) -> Self {
        let deficit = Dyadic::one().checked_sub(&self.mass()).expect("mass is at most one");
        let mut out = self.clone();
        if !deficit.is_zero() {
            let b = self.base.bottom();
            let entry = out.weights.entry(b).or_default();
            *entry = &*entry + &deficit;
        }
        out
    }

    /// `∫ f dμ` for `f` monotone, given as one value per element.
    pub fn integrate_monotone(&self, f: &[Dyadic]) -> Result<Dyadic> {
        let p = &self.base;
        if f.len() != p.len() {
            return Err(ValuationError::PartialMap(format!("expected {} values, got {}", p.len(), f.len())));
        }
        for x in p.elements() {
            for y in p.elements() {
                if p.le(x, y) && f[x.index()] > f[y.index()] {
                    return Err(ValuationError::NotMonotone(format!("{} <= {}", p.name(x), p.name(y))));
                }
            }
        }
        let mut total = Dyadic::zero();
        for (x, w) in &self.weights {
            total = &total + &w.checked_mul(&f[x.index()])?;
        }
        Ok(total)
    }

    /// `g_* μ`.
    pub fn pushforward(&self, g: &MonotoneMap) -> Result<Self> {
        if !same_base(&self.base, &g.source) {
            return Err(ValuationError::MixedBase);
        }
        let mut atoms = Vec::with_capacity(self.weights.len());
        for (x, w) in &self.weights {
            let y = g.apply(*x).ok_or_else(|| ValuationError::PartialMap(self.base.name(*x).to_string()))?;
            atoms.push((y, w.clone()));
        }
        Self::new(&g.target, atoms)
    }

    /// The same weights viewed on another poset that shares element ids for
    /// the support (used when restricting from a lifted poset).
    pub fn rebase(&self, base: &Arc<Poset>) -> Result<Self> {
        Self::new(base, self.atoms().map(|(x, w)| (x, w.clone())))
    }
}

/// Prints `name weight` per atom in declaration order.
impl fmt::Display for SimpleValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, w) in &self.weights {
            writeln!(f, "{} {}", self.base.name(*x), w)?;
        }
        Ok(())
    }
}

impl fmt::Debug for SimpleValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.weights.iter().map(|(x, w)| format!("{w}·δ_{}", self.base.name(*x))).collect();
        if terms.is_empty() { write!(f, "0") } else { write!(f, "{}", terms.join(" + ")) }
    }
}

/// A monotone map between finite posets, possibly partial.
#[derive(Debug, Clone)]
pub struct MonotoneMap {
    source: Arc<Poset>,
    target: Arc<Poset>,
    table: Vec<Option<ElementId>>,
}

impl MonotoneMap {
    pub fn new(source: &Arc<Poset>, target: &Arc<Poset>, table: Vec<Option<ElementId>>) -> Result<Self> {
        if table.len() != source.len() {
            return Err(ValuationError::PartialMap(format!("table has {} entries for {} elements", table.len(), source.len())));
        }
        if let Some(y) = table.iter().flatten().find(|y| !target.contains(**y)) {
            return Err(ValuationError::UnknownElement(format!("#{}", y.index())));
        }
        for x in source.elements() {
            for y in source.elements() {
                if let (true, Some(gx), Some(gy)) = (source.le(x, y), table[x.index()], table[y.index()]) {
                    if !target.le(gx, gy) {
                        return Err(ValuationError::NotMonotone(format!("{} <= {}", source.name(x), source.name(y))));
                    }
                }
            }
        }
        Ok(Self { source: source.clone(), target: target.clone(), table })
    }

    pub fn identity(p: &Arc<Poset>) -> Self {
        Self { source: p.clone(), target: p.clone(), table: p.elements().map(Some).collect() }
    }

    pub fn apply(&self, x: ElementId) -> Option<ElementId> {
        self.table.get(x.index()).copied().flatten()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &MonotoneMap) -> Result<Self> {
        if !same_base(&self.target, &other.source) {
            return Err(ValuationError::MixedBase);
        }
        let table = self.table.iter().map(|y| y.and_then(|y| other.apply(y))).collect();
        Self::new(&self.source, &other.target, table)
    }
}
