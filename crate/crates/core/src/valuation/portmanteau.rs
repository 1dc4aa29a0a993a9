//! Finite-tail Portmanteau conditions for a sequence of valuations.
//!
//! A finite list cannot witness a limit, so the sequence is read as a regular
//! sequence with modulus `2^-n`: from the tail index on, the liminf condition
//! becomes `μ_n(O) + 2^-n ≥ μ(O)` and the limsup condition becomes
//! `μ_n(E) ≤ μ(E) + 2^-n`, where `n` is the 1-based position in the list. Every upper
//! set of a finite poset is both Scott open and finitely generated, so both
//! conditions run over the same family.

use crate::dyadic::Dyadic;
use crate::poset::UpperSet;

use super::{Result, SimpleValuation, ValuationError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `liminf μ_n(O) ≥ μ(O)`.
    Liminf,
    /// `limsup μ_n(E) ≤ μ(E)`.
    Limsup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCheck {
    pub set: UpperSet,
    pub limit: Dyadic,
    /// `min μ_n(U)` over the tail.
    pub tail_min: Dyadic,
    /// `max μ_n(U)` over the tail.
    pub tail_max: Dyadic,
    pub liminf_ok: bool,
    pub limsup_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortmanteauWitness {
    pub set: UpperSet,
    pub index: usize,
    pub condition: Condition,
    pub value: Dyadic,
    pub limit: Dyadic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortmanteauReport {
    pub from_index: usize,
    pub checks: Vec<SetCheck>,
    /// First violation found, scanning sets in enumeration order.
    pub witness: Option<PortmanteauWitness>,
}

impl PortmanteauReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

pub fn portmanteau_check(seq: &[SimpleValuation], limit: &SimpleValuation, from_index: usize) -> Result<PortmanteauReport> {
    if from_index >= seq.len() {
        return Err(ValuationError::InvalidTail { index: from_index, len: seq.len() });
    }
    for mu in seq {
        mu.check_base(limit)?;
    }
    let mut checks = Vec::new();
    let mut witness = None;
    for set in limit.base().enumerate_upper_sets()? {
        let target = limit.evaluate(&set)?;
        let mut tail_min: Option<Dyadic> = None;
        let mut tail_max = Dyadic::zero();
        let (mut liminf_ok, mut limsup_ok) = (true, true);
        for (n, mu) in seq.iter().enumerate().skip(from_index) {
            let value = mu.evaluate(&set)?;
            let slack = Dyadic::pow2_neg(n as u32 + 1);
            let low = &value + &slack < target;
            let high = value > &target + &slack;
            if (low || high) && witness.is_none() {
                let condition = if low { Condition::Liminf } else { Condition::Limsup };
                witness = Some(PortmanteauWitness {
                    set: set.clone(),
                    index: n,
                    condition,
                    value: value.clone(),
                    limit: target.clone(),
                });
            }
            liminf_ok &= !low;
            limsup_ok &= !high;
            tail_max = tail_max.max(value.clone());
            tail_min = Some(match tail_min {
                Some(m) => m.min(value),
                None => value,
            });
        }
        checks.push(SetCheck {
            set,
            limit: target,
            tail_min: tail_min.unwrap_or_default(),
            tail_max,
            liminf_ok,
            limsup_ok,
        });
    }
    Ok(PortmanteauReport { from_index, checks, witness })
}
