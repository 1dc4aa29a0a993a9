//! Representing simple valuations as layered maps out of the Cantor tree.
//!
//! A schedule `δ_⊥ = μ_0 ≤ μ_1 ≤ … ≤ μ_K` is realized level by level: each
//! lift step reads a transport plan from the previous layer's law to the next
//! stage and hands the extensions of every word to targets above its value.

mod sequence;

pub use sequence::{convergence_check, represent_sequence, ConvergenceReport, SequenceRepresentation, WordOutcome};

use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::cantor::{self, CantorError, Level, Word};
use crate::dyadic::Dyadic;
use crate::poset::{escape, ElementId, Poset};
use crate::valuation::{PortmanteauWitness, SimpleValuation, Space, ValuationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkorohodError {
    #[error("valuation has mass {0}, expected 1")]
    NotProbability(Dyadic),
    #[error("the current layer's law is not below the next stage")]
    NotComparable,
    #[error("stage {0} is not way below stage {next}", next = .0 + 1)]
    NotWayBelow(usize),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid representation map: {0}")]
    InvalidMap(String),
    #[error("bit source ran out after {0} bits")]
    SourceExhausted(usize),
    #[error("sequence fails the Portmanteau check on {} at index {}", .0.set_display, .0.witness.index)]
    NotConvergent(Box<NonConvergence>),
    #[error(transparent)]
    Cantor(#[from] CantorError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

/// A Portmanteau violation, with the offending set already rendered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonConvergence {
    pub witness: PortmanteauWitness,
    pub set_display: String,
}

pub type Result<T, E = SkorohodError> = std::result::Result<T, E>;

/// `δ_⊥ = μ_0 ≤ μ_1 ≤ … ≤ μ_K = target`, all probability valuations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproximationSchedule {
    stages: Vec<SimpleValuation>,
}

impl ApproximationSchedule {
    /// Accepts any increasing list of probability valuations starting at
    /// `δ_⊥`. Use [`Self::is_strict`] to ask whether it is a `≪`-chain.
    pub fn from_stages(stages: Vec<SimpleValuation>) -> Result<Self> {
        let first = stages.first().ok_or_else(|| SkorohodError::InvalidSchedule("no stages".into()))?;
        let base = first.base().clone();
        if *first != SimpleValuation::bottom(&base) {
            return Err(SkorohodError::InvalidSchedule("the first stage must be the point mass at bottom".into()));
        }
        for (k, s) in stages.iter().enumerate() {
            if !s.is_probability() {
                return Err(SkorohodError::NotProbability(s.mass()));
            }
            if k > 0 && !stages[k - 1].leq(s)? {
                return Err(SkorohodError::InvalidSchedule(format!("stage {} is not below stage {k}", k - 1)));
            }
        }
        Ok(Self { stages })
    }

    pub fn stages(&self) -> &[SimpleValuation] {
        &self.stages
    }

    pub fn target(&self) -> &SimpleValuation {
        self.stages.last().expect("schedules are nonempty")
    }

    pub fn base(&self) -> &Arc<Poset> {
        self.target().base()
    }

    /// Number of steps `K`.
    pub fn steps(&self) -> usize {
        self.stages.len() - 1
    }

    /// Whether every consecutive pair is way below in `V₁`.
    pub fn is_strict(&self) -> Result<bool> {
        for pair in self.stages.windows(2) {
            if !pair[0].way_below(&pair[1], Space::Probability)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `μ_k = (1 − 2^-k)·target + 2^-k·δ_⊥` for `0 < k < K`, with `μ_0 = δ_⊥` and
/// `μ_K = target`. A target of `δ_⊥` gives the constant schedule.
pub fn build_schedule(target: &SimpleValuation, k: usize) -> Result<ApproximationSchedule> {
    if !target.is_probability() {
        return Err(SkorohodError::NotProbability(target.mass()));
    }
    let bottom = SimpleValuation::bottom(target.base());
    if *target == bottom {
        return Ok(ApproximationSchedule { stages: vec![bottom; k + 1] });
    }
    if k == 0 {
        return Err(SkorohodError::InvalidSchedule("a target other than the bottom point mass needs at least one step".into()));
    }
    let mut stages = vec![bottom.clone()];
    for j in 1..k {
        stages.push(target.mix(&bottom, &Dyadic::pow2_neg(j as u32))?);
    }
    stages.push(target.clone());
    for (j, pair) in stages.windows(2).enumerate() {
        if !pair[0].way_below(&pair[1], Space::Probability)? {
            return Err(SkorohodError::NotWayBelow(j));
        }
    }
    Ok(ApproximationSchedule { stages })
}

/// A total table `C_depth → D`, indexed by word value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Layer {
    depth: u32,
    table: Vec<ElementId>,
}

impl Layer {
    pub fn new(depth: u32, table: Vec<ElementId>) -> Result<Self> {
        let level = Level::new(depth)?;
        if table.len() != level.len() {
            return Err(CantorError::LevelSize { depth, expected: level.len(), found: table.len() }.into());
        }
        Ok(Self { depth, table })
    }

    pub fn constant(depth: u32, x: ElementId) -> Result<Self> {
        Self::new(depth, vec![x; Level::new(depth)?.len()])
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn table(&self) -> &[ElementId] {
        &self.table
    }

    /// Value at the `depth`-bit prefix of `w`.
    pub fn at(&self, w: &Word) -> Result<ElementId> {
        let prefix = w.project(self.depth as usize)?;
        Ok(self.table[prefix.index() as usize])
    }

    /// `f_* ν_depth`.
    pub fn law(&self, base: &Arc<Poset>) -> Result<SimpleValuation> {
        let table: Vec<Option<ElementId>> = self.table.iter().copied().map(Some).collect();
        Ok(cantor::pushforward_counting(base, self.depth, &table)?)
    }

    /// `self ∘ π ≤ finer` on every word of the finer level.
    pub fn is_below(&self, finer: &Layer, base: &Poset) -> bool {
        finer.depth >= self.depth
            && finer.table.iter().enumerate().all(|(i, &y)| {
                let coarse = self.table[i >> (finer.depth - self.depth)];
                base.le(coarse, y)
            })
    }
}

/// The lift step: a layer at depth `n > m` with law `μ′` lying above `f_m`.
///
/// Each word `i` of level `m` owns its `2^{n−m}` extensions. Extensions are
/// visited in lexicographic order, and those under a word with value `x` are
/// handed to targets `y` in declaration order, `t_{x,y}·2^n` each.
pub fn lift_step(f_m: &Layer, mu_prime: &SimpleValuation, base: &Arc<Poset>) -> Result<Layer> {
    if !mu_prime.is_probability() {
        return Err(SkorohodError::NotProbability(mu_prime.mass()));
    }
    let mu = f_m.law(base)?;
    let plan = mu.transport_plan(mu_prime).map_err(|e| match e {
        ValuationError::NotComparable => SkorohodError::NotComparable,
        other => other.into(),
    })?;
    let m = f_m.depth;
    let n = plan
        .entries()
        .iter()
        .map(|(_, _, t)| t.exponent())
        .chain([m + 1, mu.exponent(), mu_prime.exponent()])
        .max()
        .expect("nonempty");
    Level::new(n)?;

    let mut quotas: Vec<Vec<(ElementId, u64)>> = vec![Vec::new(); base.len()];
    for (x, y, t) in plan.entries() {
        let slots = t.rescale(n).expect("depth covers every entry").to_u64().expect("depth is bounded");
        quotas[x.index()].push((*y, slots));
    }
    let mut cursor = vec![0usize; base.len()];
    let shift = n - m;
    let mut table = Vec::with_capacity(1 << n);
    for w in 0..1usize << n {
        let x = f_m.table[w >> shift];
        let queue = &mut quotas[x.index()];
        let c = &mut cursor[x.index()];
        while queue[*c].1 == 0 {
            *c += 1;
        }
        queue[*c].1 -= 1;
        table.push(queue[*c].0);
    }
    assert!(quotas.iter().flatten().all(|(_, left)| *left == 0), "slot filling leaves no remainder");

    let layer = Layer { depth: n, table };
    debug_assert!(f_m.is_below(&layer, base));
    debug_assert_eq!(&layer.law(base)?, mu_prime);
    Ok(layer)
}

/// The finite-depth form of a Scott-continuous map `CT → D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentationMap {
    base: Arc<Poset>,
    layers: Vec<Layer>,
}

impl RepresentationMap {
    /// Checks that tables point into `base`, depths strictly increase and
    /// consecutive layers are monotone.
    pub fn new(base: &Arc<Poset>, layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(SkorohodError::InvalidMap("no layers".into()));
        }
        for layer in &layers {
            if layer.table.iter().any(|&y| !base.contains(y)) {
                return Err(SkorohodError::InvalidMap(format!("layer {} names an unknown element", layer.depth)));
            }
        }
        for pair in layers.windows(2) {
            if pair[1].depth <= pair[0].depth {
                return Err(SkorohodError::InvalidMap(format!("depth {} follows depth {}", pair[1].depth, pair[0].depth)));
            }
            if !pair[0].is_below(&pair[1], base) {
                return Err(SkorohodError::InvalidMap(format!("layer {} is not above layer {}", pair[1].depth, pair[0].depth)));
            }
        }
        Ok(Self { base: base.clone(), layers })
    }

    pub fn base(&self) -> &Arc<Poset> {
        &self.base
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Depth of the deepest layer.
    pub fn depth(&self) -> u32 {
        self.layers.last().expect("maps are nonempty").depth
    }

    pub fn final_layer(&self) -> &Layer {
        self.layers.last().expect("maps are nonempty")
    }

    pub fn final_law(&self) -> Result<SimpleValuation> {
        self.final_layer().law(&self.base)
    }

    /// The chain `f_k(π_{m_k} w)` and its supremum, the last entry.
    pub fn evaluate(&self, w: &Word) -> Result<(Vec<ElementId>, ElementId)> {
        if w.len() < self.depth() as usize {
            return Err(CantorError::DepthExceeded { requested: self.depth() as usize, available: w.len() }.into());
        }
        let chain = self.layers.iter().map(|l| l.at(w)).collect::<Result<Vec<_>>>()?;
        let value = *chain.last().expect("maps are nonempty");
        Ok((chain, value))
    }

    pub fn value(&self, w: &Word) -> Result<ElementId> {
        Ok(self.evaluate(w)?.1)
    }

    /// Reads `depth()` bits and evaluates there.
    pub fn sample(&self, bits: &mut impl Iterator<Item = bool>) -> Result<ElementId> {
        let d = self.depth() as usize;
        let drawn: Vec<bool> = bits.take(d).collect();
        if drawn.len() < d {
            return Err(SkorohodError::SourceExhausted(drawn.len()));
        }
        self.value(&Word::finite(drawn))
    }

    /// Graphviz rendering: one node per word of every layer, joined to the
    /// words of the next layer that extend it.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph representation {\n  rankdir=TB;\n");
        for (k, layer) in self.layers.iter().enumerate() {
            let _ = writeln!(s, "  subgraph layer{k} {{\n    rank=same;");
            for (i, y) in layer.table.iter().enumerate() {
                let word = Word::from_index(i as u64, layer.depth);
                let _ = writeln!(s, "    l{k}w{i} [label=\"{}\\n{}\"];", word, escape(self.base.name(*y)));
            }
            s.push_str("  }\n");
            if let Some(next) = self.layers.get(k + 1) {
                let shift = next.depth - layer.depth;
                for j in 0..next.table.len() {
                    let _ = writeln!(s, "  l{k}w{} -> l{}w{j};", j >> shift, k + 1);
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// One lift step per stage, starting from the constant-bottom layer at depth 0.
pub fn represent(schedule: &ApproximationSchedule) -> Result<RepresentationMap> {
    let base = schedule.base().clone();
    let mut layers = vec![Layer::constant(0, base.bottom())?];
    for stage in &schedule.stages()[1..] {
        let next = lift_step(layers.last().expect("nonempty"), stage, &base)?;
        layers.push(next);
    }
    RepresentationMap::new(&base, layers)
}

/// A representation of a subprobability valuation on `D_⊥`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubprobabilityRepresentation {
    /// The original poset.
    pub original: Arc<Poset>,
    /// `D_⊥`, with the fresh bottom appended last.
    pub lifted: Arc<Poset>,
    pub fresh_bottom: ElementId,
    pub map: RepresentationMap,
}

impl SubprobabilityRepresentation {
    /// Whether `w` lies outside the Scott-closed set sent to the fresh bottom.
    pub fn is_defined(&self, w: &Word) -> Result<bool> {
        Ok(self.map.value(w)? != self.fresh_bottom)
    }

    /// Law of the final layer restricted to the defined words, on the original poset.
    pub fn restricted_law(&self) -> Result<SimpleValuation> {
        let layer = self.map.final_layer();
        let cell = Dyadic::pow2_neg(layer.depth);
        let atoms = layer.table.iter().filter(|&&y| y != self.fresh_bottom).map(|&y| (y, cell.clone()));
        Ok(SimpleValuation::new(&self.original, atoms)?)
    }
}

/// Adjoins a fresh bottom, moves the missing mass onto it and represents the result.
pub fn represent_subprobability(target: &SimpleValuation, k: usize) -> Result<SubprobabilityRepresentation> {
    let original = target.base().clone();
    let (lifted, fresh_bottom) = original.lifted(&original.fresh_name(original.name(original.bottom())))?;
    let lifted = Arc::new(lifted);
    let full = target.rebase(&lifted)?.normalize();
    let map = represent(&build_schedule(&full, k)?)?;
    Ok(SubprobabilityRepresentation { original, lifted, fresh_bottom, map })
}

impl From<crate::poset::PosetError> for SkorohodError {
    fn from(e: crate::poset::PosetError) -> Self {
        SkorohodError::Valuation(e.into())
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::testkit::{self, fixtures};

    fn m4() -> Arc<Poset> {
        Arc::new(fixtures::m4())
    }

    fn val(p: &Arc<Poset>, atoms: &[(&str, &str)]) -> SimpleValuation {
        SimpleValuation::from_named(p, atoms).unwrap()
    }

    fn names(p: &Poset, xs: &[ElementId]) -> Vec<String> {
        xs.iter().map(|&x| p.name(x).to_string()).collect()
    }

    fn three_layer(p: &Arc<Poset>) -> RepresentationMap {
        let schedule = ApproximationSchedule::from_stages(vec![
            SimpleValuation::bottom(p),
            val(p, &[("a", "1/2^1"), ("b", "1/2^1")]),
            val(p, &[("top", "1")]),
        ])
        .unwrap();
        represent(&schedule).unwrap()
    }

    #[test]
    fn schedule_examples() {
        let p = m4();
        let top = val(&p, &[("top", "1")]);
        let s = build_schedule(&top, 2).unwrap();
        assert_eq!(s.stages(), &[SimpleValuation::bottom(&p), val(&p, &[("bot", "1/2^1"), ("top", "1/2^1")]), top.clone()]);
        assert!(s.is_strict().unwrap());

        let bot = SimpleValuation::bottom(&p);
        assert_eq!(build_schedule(&bot, 3).unwrap().stages(), &vec![bot.clone(); 4][..]);

        let half = val(&p, &[("a", "1/2^1"), ("b", "1/2^1")]);
        assert_eq!(build_schedule(&half, 1).unwrap().stages(), &[bot, half.clone()]);
        assert!(matches!(build_schedule(&half, 0), Err(SkorohodError::InvalidSchedule(_))));
        let sub = val(&p, &[("a", "1/2^1")]);
        assert!(matches!(build_schedule(&sub, 2), Err(SkorohodError::NotProbability(_))));
    }

    #[test]
    fn schedule_validation() {
        let p = m4();
        let half = val(&p, &[("a", "1/2^1"), ("b", "1/2^1")]);
        let top = val(&p, &[("top", "1")]);
        let loose = ApproximationSchedule::from_stages(vec![SimpleValuation::bottom(&p), half.clone(), top.clone()]).unwrap();
        assert!(!loose.is_strict().unwrap());
        assert!(ApproximationSchedule::from_stages(vec![half.clone(), top.clone()]).is_err());
        assert!(ApproximationSchedule::from_stages(vec![SimpleValuation::bottom(&p), top, half]).is_err());
    }

    #[test]
    fn lift_step_examples() {
        let p = m4();
        let f0 = Layer::constant(0, p.bottom()).unwrap();
        let f1 = lift_step(&f0, &val(&p, &[("a", "1/2^1"), ("b", "1/2^1")]), &p).unwrap();
        assert_eq!(f1.depth(), 1);
        assert_eq!(names(&p, f1.table()), ["a", "b"]);
        let f2 = lift_step(&f1, &val(&p, &[("top", "1")]), &p).unwrap();
        assert_eq!(f2.depth(), 2);
        assert_eq!(names(&p, f2.table()), ["top"; 4]);
        let back = lift_step(&f2, &val(&p, &[("a", "1")]), &p);
        assert_eq!(back, Err(SkorohodError::NotComparable));
    }

    #[test]
    fn represent_examples() {
        let p = m4();
        let map = three_layer(&p);
        assert_eq!(map.layers().iter().map(Layer::depth).collect::<Vec<_>>(), [0, 1, 2]);
        let (chain, value) = map.evaluate(&"11".parse().unwrap()).unwrap();
        assert_eq!(names(&p, &chain), ["bot", "b", "top"]);
        assert_eq!(p.name(value), "top");
        let (chain, _) = map.evaluate(&"00".parse().unwrap()).unwrap();
        assert_eq!(names(&p, &chain), ["bot", "a", "top"]);
        assert!(matches!(map.evaluate(&"1".parse().unwrap()), Err(SkorohodError::Cantor(CantorError::DepthExceeded { .. }))));

        let constant = represent(&build_schedule(&SimpleValuation::bottom(&p), 3).unwrap()).unwrap();
        assert!(constant.layers().iter().all(|l| l.table().iter().all(|&y| y == p.bottom())));
        let single = represent(&build_schedule(&SimpleValuation::bottom(&p), 0).unwrap()).unwrap();
        assert_eq!(single.layers().len(), 1);
        assert_eq!(single.value(&Word::empty()).unwrap(), p.bottom());
    }

    #[test]
    fn sample_examples() {
        let p = m4();
        let map = three_layer(&p);
        let mut bits = [true, false, true].into_iter();
        assert_eq!(p.name(map.sample(&mut bits).unwrap()), "top");
        assert_eq!(map.sample(&mut bits), Err(SkorohodError::SourceExhausted(1)));

        let half = val(&p, &[("a", "1/2^1"), ("b", "1/2^1")]);
        let short = represent(&build_schedule(&half, 1).unwrap()).unwrap();
        assert_eq!(p.name(short.sample(&mut [false].into_iter()).unwrap()), "a");
    }

    #[test]
    fn subprobability_examples() {
        let p = m4();
        let r = represent_subprobability(&val(&p, &[("top", "1/2^1")]), 2).unwrap();
        assert_eq!(r.lifted.name(r.fresh_bottom), "bot'");
        let law = r.map.final_law().unwrap();
        let top = r.lifted.id("top").unwrap();
        assert_eq!(law.weight(top), "1/2^1".parse().unwrap());
        assert_eq!(law.weight(r.fresh_bottom), "1/2^1".parse().unwrap());
        assert_eq!(r.restricted_law().unwrap(), val(&p, &[("top", "1/2^1")]));

        let full = represent_subprobability(&val(&p, &[("a", "1")]), 2).unwrap();
        let d = full.map.depth();
        assert!(testkit::level_words(d).iter().all(|w| full.is_defined(w).unwrap()));

        let none = represent_subprobability(&SimpleValuation::zero(&p), 2).unwrap();
        let d = none.map.depth();
        assert!(testkit::level_words(d).iter().all(|w| !none.is_defined(w).unwrap()));
        assert_eq!(none.restricted_law().unwrap(), SimpleValuation::zero(&p));
    }

    #[test]
    fn map_validation() {
        let p = m4();
        let a = p.id("a").unwrap();
        let b = p.id("b").unwrap();
        let l1 = Layer::new(1, vec![a, b]).unwrap();
        let bad = Layer::new(2, vec![b, b, b, b]).unwrap();
        assert!(matches!(RepresentationMap::new(&p, vec![l1.clone(), bad]), Err(SkorohodError::InvalidMap(_))));
        assert!(matches!(RepresentationMap::new(&p, vec![l1.clone(), l1]), Err(SkorohodError::InvalidMap(_))));
        assert!(Layer::new(2, vec![a]).is_err());
    }

    #[test]
    fn dot_has_one_edge_per_child() {
        let p = m4();
        let dot = three_layer(&p).to_dot();
        assert_eq!(dot.matches("->").count(), 2 + 4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn lift_step_is_exact_and_monotone(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Arc::new(testkit::random_poset(&mut rng, 6));
            let m = rand::Rng::random_range(&mut rng, 0..=3u32);
            let f = testkit::random_layer(&mut rng, &p, m);
            let mu = f.law(&p).unwrap();
            let target = testkit::random_above(&mut rng, &mu, 4);
            let g = lift_step(&f, &target, &p).unwrap();
            prop_assert!(g.depth() > m);
            prop_assert_eq!(testkit::tabulate(&p, g.table(), g.depth()), target);
            prop_assert!(f.is_below(&g, &p));
        }

        #[test]
        fn represent_is_exact(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Arc::new(testkit::random_poset(&mut rng, 6));
            let target = testkit::random_probability(&mut rng, &p, 4);
            let k = rand::Rng::random_range(&mut rng, 1..=4usize);
            let schedule = build_schedule(&target, k).unwrap();
            let map = represent(&schedule).unwrap();
            for (layer, stage) in map.layers().iter().zip(schedule.stages()) {
                prop_assert_eq!(&testkit::tabulate(&p, layer.table(), layer.depth()), stage);
            }
            for pair in map.layers().windows(2) {
                prop_assert!(pair[0].depth() < pair[1].depth());
            }
            prop_assert_eq!(represent(&schedule).unwrap(), map);
        }

        #[test]
        fn sampling_every_word_reproduces_target(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = Arc::new(testkit::random_poset(&mut rng, 5));
            let target = testkit::random_probability(&mut rng, &p, 3);
            let map = represent(&build_schedule(&target, 2).unwrap()).unwrap();
            let d = map.depth();
            let drawn: Vec<ElementId> = testkit::level_words(d)
                .iter()
                .map(|w| map.sample(&mut w.bits().iter().copied()).unwrap())
                .collect();
            prop_assert_eq!(testkit::tabulate(&p, &drawn, d), target);
        }
    }
}
