//! Representations of a convergent sequence and pointwise convergence checks.

use crate::cantor::{CantorError, Word};
use crate::poset::ElementId;
use crate::valuation::{portmanteau_check, SimpleValuation};

use super::{build_schedule, represent, NonConvergence, RepresentationMap, Result, SkorohodError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceRepresentation {
    pub maps: Vec<RepresentationMap>,
    pub limit_map: RepresentationMap,
}

impl SequenceRepresentation {
    pub fn depth(&self) -> u32 {
        self.maps.iter().chain([&self.limit_map]).map(RepresentationMap::depth).max().unwrap_or(0)
    }
}

/// Checks the Portmanteau conditions from `from_index` on, then represents
/// every target and the limit with schedules of `k` steps.
pub fn represent_sequence(
    targets: &[SimpleValuation],
    limit: &SimpleValuation,
    k: usize,
    from_index: usize,
) -> Result<SequenceRepresentation> {
    let report = portmanteau_check(targets, limit, from_index)?;
    if let Some(witness) = report.witness {
        let set_display = witness.set.display(limit.base());
        return Err(SkorohodError::NotConvergent(Box::new(NonConvergence { witness, set_display })));
    }
    let maps = targets.iter().map(|t| represent(&build_schedule(t, k)?)).collect::<Result<Vec<_>>>()?;
    let limit_map = represent(&build_schedule(limit, k)?)?;
    Ok(SequenceRepresentation { maps, limit_map })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordOutcome {
    pub word: Word,
    pub limit_value: ElementId,
    /// Whether the limit value is maximal in the poset.
    pub maximal: bool,
    /// Least `N` with `X_n(w) ≥ X(w)` for all `n ≥ N` in the list.
    pub eventually_above: Option<usize>,
    /// Least `N` with `X_n(w) = X(w)` for all `n ≥ N`; only computed when the
    /// limit value is maximal.
    pub eventually_equal: Option<usize>,
}

impl WordOutcome {
    /// The dichotomy: eventually above everywhere, eventually equal where the limit is maximal.
    pub fn holds(&self) -> bool {
        self.eventually_above.is_some() && (!self.maximal || self.eventually_equal.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub outcomes: Vec<WordOutcome>,
}

impl ConvergenceReport {
    pub fn holds(&self) -> bool {
        self.outcomes.iter().all(WordOutcome::holds)
    }

    pub fn maximal_words(&self) -> usize {
        self.outcomes.iter().filter(|o| o.maximal).count()
    }

    pub fn equal_words(&self) -> usize {
        self.outcomes.iter().filter(|o| o.maximal && o.eventually_equal.is_some()).count()
    }
}

/// Least `N` such that `ok(n)` holds for every `n ≥ N`, or `None` if it fails at the end.
fn eventually(len: usize, ok: impl Fn(usize) -> bool) -> Option<usize> {
    let mut n = len;
    while n > 0 && ok(n - 1) {
        n -= 1;
    }
    if len > 0 && n == len { None } else { Some(n) }
}

pub fn convergence_check(maps: &[RepresentationMap], limit_map: &RepresentationMap, words: &[Word]) -> Result<ConvergenceReport> {
    let base = limit_map.base();
    if maps.iter().any(|m| !crate::valuation::same_base(m.base(), base)) {
        return Err(crate::valuation::ValuationError::MixedBase.into());
    }
    let depth = maps.iter().chain([limit_map]).map(RepresentationMap::depth).max().unwrap_or(0) as usize;
    let mut outcomes = Vec::with_capacity(words.len());
    for w in words {
        if w.len() < depth {
            return Err(CantorError::DepthExceeded { requested: depth, available: w.len() }.into());
        }
        let limit_value = limit_map.value(w)?;
        let values = maps.iter().map(|m| m.value(w)).collect::<Result<Vec<_>>>()?;
        let maximal = base.is_maximal(limit_value);
        let eventually_above = eventually(values.len(), |n| base.le(limit_value, values[n]));
        let eventually_equal = if maximal { eventually(values.len(), |n| values[n] == limit_value) } else { None };
        outcomes.push(WordOutcome { word: w.clone(), limit_value, maximal, eventually_above, eventually_equal });
    }
    Ok(ConvergenceReport { outcomes })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::dyadic::Dyadic;
    use crate::testkit::{self, fixtures};

    #[test]
    fn eventually_finds_tail() {
        assert_eq!(eventually(0, |_| false), Some(0));
        assert_eq!(eventually(3, |n| n >= 1), Some(1));
        assert_eq!(eventually(3, |n| n != 2), None);
        assert_eq!(eventually(3, |_| true), Some(0));
    }

    fn escaping(n_max: u32, tail: usize) -> (Arc<crate::poset::Poset>, Vec<SimpleValuation>, SimpleValuation) {
        let m4 = Arc::new(fixtures::m4());
        let top = SimpleValuation::point(&m4, m4.id("top").unwrap());
        let a = SimpleValuation::point(&m4, m4.id("a").unwrap());
        let mut seq: Vec<SimpleValuation> = (1..=n_max).map(|n| top.mix(&a, &Dyadic::pow2_neg(n)).unwrap()).collect();
        seq.extend(std::iter::repeat_n(top.clone(), tail));
        (m4, seq, top)
    }

    #[test]
    fn escaping_family_represents_each_target() {
        let (_, seq, top) = escaping(4, 0);
        let rep = represent_sequence(&seq, &top, 3, 0).unwrap();
        assert_eq!(rep.maps.len() + 1, 5);
        for (map, target) in rep.maps.iter().zip(&seq) {
            assert_eq!(&map.final_law().unwrap(), target);
        }
        let words = testkit::level_words(rep.depth());
        let report = convergence_check(&rep.maps, &rep.limit_map, &words).unwrap();
        let ones = Word::finite(vec![true; rep.depth() as usize]);
        let o = report.outcomes.iter().find(|o| o.word == ones).unwrap();
        assert!(o.maximal && o.eventually_equal.is_some());
        // the last target still puts 2^-4 on `a`, so one word in sixteen disagrees
        assert_eq!(report.maximal_words(), words.len());
        assert_eq!(report.equal_words() * 16, words.len() * 15);
    }

    #[test]
    fn eventually_constant_family_converges_everywhere() {
        let (_, seq, top) = escaping(4, 2);
        let rep = represent_sequence(&seq, &top, 3, 0).unwrap();
        let words = testkit::level_words(rep.depth());
        let report = convergence_check(&rep.maps, &rep.limit_map, &words).unwrap();
        assert!(report.holds());
    }

    #[test]
    fn constant_sequence_has_zero_tail() {
        let m4 = Arc::new(fixtures::m4());
        let v = SimpleValuation::from_named(&m4, &[("a", "1/2^1"), ("top", "1/2^1")]).unwrap();
        let rep = represent_sequence(&vec![v.clone(); 3], &v, 2, 0).unwrap();
        assert!(rep.maps.iter().all(|m| *m == rep.limit_map));
        let words = testkit::level_words(rep.depth());
        let report = convergence_check(&rep.maps, &rep.limit_map, &words).unwrap();
        assert!(report.outcomes.iter().all(|o| o.eventually_above == Some(0)));
        assert!(report.outcomes.iter().filter(|o| o.maximal).all(|o| o.eventually_equal == Some(0)));
    }

    #[test]
    fn non_maximal_limit_gets_only_the_lower_check() {
        let m4 = Arc::new(fixtures::m4());
        let v = SimpleValuation::from_named(&m4, &[("bot", "1/2^1"), ("top", "1/2^1")]).unwrap();
        let rep = represent_sequence(&vec![v.clone(); 2], &v, 1, 0).unwrap();
        let words = testkit::level_words(rep.depth());
        let report = convergence_check(&rep.maps, &rep.limit_map, &words).unwrap();
        let low = report.outcomes.iter().find(|o| !o.maximal).unwrap();
        assert_eq!(low.limit_value, m4.bottom());
        assert_eq!(low.eventually_equal, None);
        assert!(low.holds());
    }

    #[test]
    fn stuck_sequence_is_rejected() {
        let m4 = Arc::new(fixtures::m4());
        let a = SimpleValuation::point(&m4, m4.id("a").unwrap());
        let top = SimpleValuation::point(&m4, m4.id("top").unwrap());
        let err = represent_sequence(&vec![a; 4], &top, 2, 0).unwrap_err();
        match err {
            SkorohodError::NotConvergent(nc) => assert_eq!(nc.set_display, "{top}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_words_rejected() {
        let (_, seq, top) = escaping(2, 0);
        let rep = represent_sequence(&seq, &top, 2, 0).unwrap();
        let err = convergence_check(&rep.maps, &rep.limit_map, &[Word::empty()]);
        assert!(matches!(err, Err(SkorohodError::Cantor(CantorError::DepthExceeded { .. }))));
    }
}
