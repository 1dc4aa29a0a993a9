//! The valuation order, transport plans and the way-below relation.

use std::fmt;

use crate::dyadic::Dyadic;
use crate::flow::{max_flow, max_flow_min_cut, Edge, FlowNetwork, Node};
use crate::poset::{ElementId, Poset, UpperSet};

use super::{Result, SimpleValuation, Space, ValuationError};

/// Transport numbers `t_{x,y}`, stored sparsely in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportPlan {
    entries: Vec<(ElementId, ElementId, Dyadic)>,
}

impl TransportPlan {
    pub fn entries(&self) -> &[(ElementId, ElementId, Dyadic)] {
        &self.entries
    }

    pub fn get(&self, x: ElementId, y: ElementId) -> Dyadic {
        self.entries.iter().filter(|(a, b, _)| *a == x && *b == y).map(|(_, _, t)| t).sum()
    }

    pub fn row_sum(&self, x: ElementId) -> Dyadic {
        self.entries.iter().filter(|(a, _, _)| *a == x).map(|(_, _, t)| t).sum()
    }

    pub fn column_sum(&self, y: ElementId) -> Dyadic {
        self.entries.iter().filter(|(_, b, _)| *b == y).map(|(_, _, t)| t).sum()
    }

    /// Checks row sums, column bounds, upward movement and the exponent bound.
    pub fn verify(&self, mu: &SimpleValuation, nu: &SimpleValuation) -> Result<()> {
        let p = mu.base();
        let bad = |msg: String| Err(ValuationError::InvalidPlan(msg));
        for (x, y, t) in &self.entries {
            if !t.is_zero() && !p.le(*x, *y) {
                return bad(format!("mass moves from {} to {}", p.name(*x), p.name(*y)));
            }
        }
        for x in p.elements() {
            if self.row_sum(x) != mu.weight(x) {
                return bad(format!("row {} sums to {}, expected {}", p.name(x), self.row_sum(x), mu.weight(x)));
            }
            if self.column_sum(x) > nu.weight(x) {
                return bad(format!("column {} exceeds {}", p.name(x), nu.weight(x)));
            }
        }
        let bound = mu.exponent().max(nu.exponent());
        if let Some((_, _, t)) = self.entries.iter().find(|(_, _, t)| t.exponent() > bound) {
            return bad(format!("entry {t} is finer than 2^-{bound}"));
        }
        Ok(())
    }

    pub fn display(&self, p: &Poset) -> String {
        let mut s = String::new();
        for (x, y, t) in &self.entries {
            s.push_str(&format!("transport {} {} {}\n", p.name(*x), p.name(*y), t));
        }
        s
    }
}

impl fmt::Display for TransportPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, y, t) in &self.entries {
            writeln!(f, "#{} #{} {}", x.index(), y.index(), t)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderDecision {
    Leq(TransportPlan),
    /// An upper set `U` with `μ(U) > ν(U)`.
    NotLeq(UpperSet),
}

struct Transport {
    net: FlowNetwork,
    rows: Vec<ElementId>,
    cols: Vec<ElementId>,
}

/// Supply `r_x` on `supp μ`, demand `s_y` on `supp ν`, unit links where `x ≤ y`.
fn transport_network(mu: &SimpleValuation, nu: &SimpleValuation) -> Transport {
    let p = mu.base();
    let rows = mu.support();
    let cols = nu.support();
    let mut net = FlowNetwork::new(
        rows.iter().map(|&x| mu.weight(x)).collect(),
        cols.iter().map(|&y| nu.weight(y)).collect(),
    );
    for (i, &x) in rows.iter().enumerate() {
        for (j, &y) in cols.iter().enumerate() {
            if p.le(x, y) {
                net.add_link(i, j, Dyadic::one()).expect("indices in range");
            }
        }
    }
    Transport { net, rows, cols }
}

impl SimpleValuation {
    /// Decides `μ ≤ ν` by max flow and returns a plan or a separating upper set.
    pub fn decide_order(&self, nu: &Self) -> Result<OrderDecision> {
        self.check_base(nu)?;
        let Transport { net, rows, cols } = transport_network(self, nu);
        let (flow, cut) = max_flow_min_cut(&net);
        if flow.value == self.mass() {
            let mut entries = Vec::new();
            for (e, t) in &flow.edge_flows {
                if let (Edge::Link(i, j), false) = (e, t.is_zero()) {
                    entries.push((rows[*i], cols[*j], t.clone()));
                }
            }
            entries.sort_by_key(|(x, y, _)| (*x, *y));
            let plan = TransportPlan { entries };
            plan.verify(self, nu)?;
            Ok(OrderDecision::Leq(plan))
        } else {
            let side = cut.source_side.iter().filter_map(|n| match n {
                Node::Supply(i) => Some(rows[*i]),
                _ => None,
            });
            let witness = self.base().up_closure(side);
            debug_assert!(self.evaluate(&witness)? > nu.evaluate(&witness)?);
            Ok(OrderDecision::NotLeq(witness))
        }
    }

    pub fn leq(&self, nu: &Self) -> Result<bool> {
        Ok(matches!(self.decide_order(nu)?, OrderDecision::Leq(_)))
    }

    /// `μ(U) ≤ ν(U)` on every upper set, by enumeration.
    pub fn leq_oracle(&self, nu: &Self) -> Result<bool> {
        self.check_base(nu)?;
        for u in self.base().enumerate_upper_sets()? {
            if self.evaluate(&u)? > nu.evaluate(&u)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn transport_plan(&self, nu: &Self) -> Result<TransportPlan> {
        match self.decide_order(nu)? {
            OrderDecision::Leq(plan) => Ok(plan),
            OrderDecision::NotLeq(_) => Err(ValuationError::NotComparable),
        }
    }

    pub fn way_below(&self, nu: &Self, space: Space) -> Result<bool> {
        match space {
            Space::Subprobability => self.way_below_subprobability(nu),
            Space::Probability => Ok(self.way_below_epsilon(nu)?.is_some()),
        }
    }

    /// Strict Hall condition: `Σ_A r < s(N(A))` for every nonempty `A ⊆ supp μ`.
    ///
    /// For each `x₀` the supply edge of `x₀` is made uncuttable, so the min cut
    /// ranges over sets `A ∋ x₀` and equals `min r(F∖A) + s(N(A))`; the
    /// condition holds iff that exceeds `r(F)` for every `x₀`.
    fn way_below_subprobability(&self, nu: &Self) -> Result<bool> {
        self.check_base(nu)?;
        let total = self.mass();
        let Transport { net, rows, .. } = transport_network(self, nu);
        for pinned in 0..rows.len() {
            let mut supplies = net.supplies().to_vec();
            supplies[pinned] = Dyadic::from_int(3);
            let mut forced = FlowNetwork::new(supplies, net.demands().to_vec());
            for (i, j, c) in net.links() {
                forced.add_link(*i, *j, c.clone()).expect("indices in range");
            }
            if max_flow(&forced).value <= total {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Least `k` with `μ ≤ (1 − 2^-k)ν + 2^-k δ_⊥`, searched up to
    /// `p + ⌈log₂(|F| + |G|)⌉ + 2`; `Some(k)` means `μ ≪ ν` in `V₁ D`.
    pub fn way_below_epsilon(&self, nu: &Self) -> Result<Option<u32>> {
        self.check_base(nu)?;
        self.require_probability()?;
        nu.require_probability()?;
        let p = self.exponent().max(nu.exponent());
        let atoms = self.support().len() + nu.support().len();
        let log = ceil_log2(atoms);
        let bottom = SimpleValuation::bottom(self.base());
        for k in 1..=p + log + 2 {
            let reduced = nu.mix(&bottom, &Dyadic::pow2_neg(k))?;
            if self.leq(&reduced)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }
}

/// `⌈log₂ n⌉`, with `ceil_log2(0) = 0`.
fn ceil_log2(n: usize) -> u32 {
    usize::BITS - n.saturating_sub(1).leading_zeros()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::testkit::{self, fixtures};

    fn val(p: &Arc<Poset>, atoms: &[(&str, &str)]) -> SimpleValuation {
        SimpleValuation::from_named(p, atoms).unwrap()
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(8), 3);
        assert_eq!(ceil_log2(9), 4);
    }

    #[test]
    fn leq_examples() {
        let m4 = Arc::new(fixtures::m4());
        let bot = SimpleValuation::bottom(&m4);
        let top = val(&m4, &[("top", "1")]);
        let half = val(&m4, &[("a", "1/2^1"), ("b", "1/2^1")]);
        assert!(bot.leq(&top).unwrap());
        assert!(half.leq(&top).unwrap());
        assert!(half.leq_oracle(&top).unwrap());
        let a = val(&m4, &[("a", "1")]);
        let b = val(&m4, &[("b", "1")]);
        assert!(!a.leq(&b).unwrap());
        let half_top = val(&m4, &[("top", "1/2^1")]);
        assert!(!top.leq_oracle(&half_top).unwrap());
        assert!(half.leq_oracle(&half).unwrap());
    }

    #[test]
    fn cut_witness_separates() {
        let m4 = Arc::new(fixtures::m4());
        let a = val(&m4, &[("a", "1")]);
        let b = val(&m4, &[("b", "1")]);
        match a.decide_order(&b).unwrap() {
            OrderDecision::NotLeq(u) => {
                assert_eq!(u.display(&m4), "{a,top}");
                assert!(a.evaluate(&u).unwrap() > b.evaluate(&u).unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn transport_examples() {
        let m4 = Arc::new(fixtures::m4());
        let id = |s| m4.id(s).unwrap();
        let half = val(&m4, &[("a", "1/2^1"), ("b", "1/2^1")]);
        let top = val(&m4, &[("top", "1")]);
        let plan = half.transport_plan(&top).unwrap();
        assert_eq!(plan.get(id("a"), id("top")), "1/2^1".parse().unwrap());
        assert_eq!(plan.get(id("b"), id("top")), "1/2^1".parse().unwrap());

        let plan = SimpleValuation::bottom(&m4).transport_plan(&half).unwrap();
        assert_eq!(plan.get(id("bot"), id("a")), "1/2^1".parse().unwrap());
        assert_eq!(plan.get(id("bot"), id("b")), "1/2^1".parse().unwrap());
        assert_eq!(plan.display(&m4), "transport bot a 1/2^1\ntransport bot b 1/2^1\n");

        let a = val(&m4, &[("a", "1")]);
        let b = val(&m4, &[("b", "1")]);
        assert_eq!(a.transport_plan(&b), Err(ValuationError::NotComparable));
    }

    #[test]
    fn way_below_examples() {
        let m4 = Arc::new(fixtures::m4());
        let top = val(&m4, &[("top", "1")]);
        let quarter_bot = val(&m4, &[("bot", "1/2^2")]);
        assert!(quarter_bot.way_below(&top, Space::Subprobability).unwrap());
        assert!(!top.way_below(&top, Space::Subprobability).unwrap());
        let mixed = val(&m4, &[("bot", "1/2^1"), ("top", "1/2^1")]);
        assert_eq!(mixed.way_below_epsilon(&top).unwrap(), Some(1));
        assert!(!top.way_below(&top, Space::Probability).unwrap());
        assert_eq!(
            quarter_bot.way_below(&top, Space::Probability),
            Err(ValuationError::NotProbability("1/2^2".parse().unwrap()))
        );
        let zero = SimpleValuation::zero(&m4);
        assert!(zero.way_below(&zero, Space::Subprobability).unwrap());
        let bot = SimpleValuation::bottom(&m4);
        assert!(bot.way_below(&bot, Space::Probability).unwrap());
    }

    #[test]
    fn mixed_base_rejected() {
        let m4 = Arc::new(fixtures::m4());
        let c3 = Arc::new(fixtures::chain(3));
        let u = SimpleValuation::bottom(&m4);
        let v = SimpleValuation::bottom(&c3);
        assert_eq!(u.leq(&v), Err(ValuationError::MixedBase));
        assert_eq!(u.way_below(&v, Space::Subprobability), Err(ValuationError::MixedBase));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn leq_matches_oracle_and_plan_verifies(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Arc::new(testkit::random_poset(&mut rng, 6));
            let (mu, nu) = testkit::random_pair(&mut rng, &p, 4);
            let fast = mu.leq(&nu).unwrap();
            prop_assert_eq!(fast, mu.leq_oracle(&nu).unwrap());
            if fast {
                prop_assert!(mu.transport_plan(&nu).unwrap().verify(&mu, &nu).is_ok());
            }
        }

        #[test]
        fn integration_characterizes_order(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Arc::new(testkit::random_poset(&mut rng, 5));
            let (mu, nu) = testkit::random_pair(&mut rng, &p, 3);
            let mut all = true;
            for u in p.enumerate_upper_sets().unwrap() {
                let f: Vec<Dyadic> = p.elements().map(|x| if u.contains(x) { Dyadic::one() } else { Dyadic::zero() }).collect();
                all &= mu.integrate_monotone(&f).unwrap() <= nu.integrate_monotone(&f).unwrap();
            }
            prop_assert_eq!(all, mu.leq(&nu).unwrap());
        }

        #[test]
        fn subprobability_way_below_matches_subsets(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Arc::new(testkit::random_poset(&mut rng, 6));
            let (mu, nu) = testkit::random_pair(&mut rng, &p, 4);
            let fast = mu.way_below(&nu, Space::Subprobability).unwrap();
            prop_assert_eq!(fast, testkit::strict_hall(&mu, &nu));
            if fast {
                prop_assert!(mu.leq(&nu).unwrap());
            }
        }

        #[test]
        fn probability_way_below_implies_leq(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Arc::new(testkit::random_poset(&mut rng, 6));
            let mu = testkit::random_probability(&mut rng, &p, 4);
            let nu = testkit::random_probability(&mut rng, &p, 4);
            if mu.way_below(&nu, Space::Probability).unwrap() {
                prop_assert!(mu.leq(&nu).unwrap());
            }
            prop_assert_eq!(
                mu.way_below(&nu, Space::Probability).unwrap(),
                testkit::v1_strict_hall(&mu, &nu)
            );
        }

        #[test]
        fn normalize_idempotent_and_monotone(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Arc::new(testkit::random_poset(&mut rng, 6));
            let (mu, nu) = testkit::random_pair(&mut rng, &p, 4);
            let n = mu.normalize();
            prop_assert!(n.is_probability());
            prop_assert_eq!(n.normalize(), n.clone());
            if mu.leq(&nu).unwrap() {
                prop_assert!(n.leq(&nu.normalize()).unwrap());
            }
        }
    }
}
