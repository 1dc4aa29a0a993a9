//! Fixtures, random instance generators and brute-force oracles.
//!
//! Everything here is deliberately naive: the oracles enumerate subsets or
//! grids instead of sharing code with the algorithms they check.

use std::sync::Arc;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::cantor::Word;
use crate::dyadic::Dyadic;
use crate::flow::{FlowNetwork, Node};
use crate::poset::{ElementId, Poset};
use crate::skorohod::Layer;
use crate::valuation::SimpleValuation;

pub mod fixtures {
    use crate::poset::Poset;

    /// The diamond `bot < a, b < top`.
    pub fn m4() -> Poset {
        Poset::from_covers(
            &["bot", "a", "b", "top"],
            &[("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")],
            "bot",
        )
        .unwrap()
    }

    /// `c0 < c1 < … < c{n-1}`.
    pub fn chain(n: usize) -> Poset {
        let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let covers: Vec<(String, String)> = (1..n).map(|i| (names[i - 1].clone(), names[i].clone())).collect();
        Poset::from_covers(&names, &covers, "c0").unwrap()
    }

    /// `bot < a`, `bot < b`, nothing else.
    pub fn vee() -> Poset {
        Poset::from_covers(&["bot", "a", "b"], &[("bot", "a"), ("bot", "b")], "bot").unwrap()
    }
}

/// A random poset on `1..=max` elements with `e0` as bottom. Elements are
/// numbered along a random linear extension.
pub fn random_poset<R: Rng>(rng: &mut R, max: usize) -> Poset {
    let n = rng.random_range(1..=max);
    let density = rng.random_range(0.15..0.7);
    let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut covers = Vec::new();
    for j in 1..n {
        covers.push((names[0].clone(), names[j].clone()));
        for i in 1..j {
            if rng.random_bool(density) {
                covers.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    Poset::from_covers(&names, &covers, "e0").unwrap()
}

/// A random chain `c0 < … < c{n-1}` with `1 ≤ n ≤ max`.
pub fn random_chain<R: Rng>(rng: &mut R, max: usize) -> Poset {
    fixtures::chain(rng.random_range(1..=max))
}

fn random_dyadic<R: Rng>(rng: &mut R, max_exp: u32, max_units: u64) -> Dyadic {
    Dyadic::new(rng.random_range(0..=max_units), max_exp)
}

pub fn random_network<R: Rng>(rng: &mut R, max_supply: usize, max_demand: usize, max_exp: u32) -> FlowNetwork {
    let m = rng.random_range(0..=max_supply);
    let k = rng.random_range(0..=max_demand);
    let scale = 1u64 << max_exp;
    let supplies = (0..m).map(|_| random_dyadic(rng, max_exp, scale)).collect();
    let demands = (0..k).map(|_| random_dyadic(rng, max_exp, scale)).collect();
    let mut net = FlowNetwork::new(supplies, demands);
    for i in 0..m {
        for j in 0..k {
            if rng.random_bool(0.4) {
                let cap = random_dyadic(rng, max_exp, 2 * scale);
                net.add_link(i, j, cap).unwrap();
            }
        }
    }
    net
}

/// Minimum over every source-side choice of supply and demand nodes.
pub fn brute_min_cut(net: &FlowNetwork) -> (Dyadic, Vec<Node>) {
    let m = net.supplies().len();
    let k = net.demands().len();
    assert!(m + k <= 20, "brute force cut enumeration is limited to 20 inner nodes");
    let mut best: Option<(Dyadic, Vec<Node>)> = None;
    for mask in 0u32..(1 << (m + k)) {
        let mut side = vec![Node::Source];
        side.extend((0..m).filter(|i| mask & (1 << i) != 0).map(Node::Supply));
        side.extend((0..k).filter(|j| mask & (1 << (m + j)) != 0).map(Node::Demand));
        let value = net.cut_value(&side);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, side));
        }
    }
    best.expect("at least the empty choice")
}

/// Splits `units` (out of `2^exp`) among random elements of `p`.
fn spread<R: Rng>(rng: &mut R, p: &Arc<Poset>, units: u64, exp: u32) -> SimpleValuation {
    let n = p.len();
    let atoms = rng.random_range(1..=n.min(4));
    let mut ids: Vec<ElementId> = p.elements().collect();
    ids.shuffle(rng);
    let mut cuts: Vec<u64> = (0..atoms - 1).map(|_| rng.random_range(0..=units)).collect();
    cuts.push(0);
    cuts.push(units);
    cuts.sort_unstable();
    let weights = cuts.windows(2).map(|w| Dyadic::new(w[1] - w[0], exp));
    SimpleValuation::new(p, ids.into_iter().zip(weights)).unwrap()
}

/// A random subprobability valuation with denominator at most `2^exp`.
pub fn random_subprobability<R: Rng>(rng: &mut R, p: &Arc<Poset>, exp: u32) -> SimpleValuation {
    let units = rng.random_range(0..=1u64 << exp);
    spread(rng, p, units, exp)
}

/// A random probability valuation with denominator at most `2^exp`.
pub fn random_probability<R: Rng>(rng: &mut R, p: &Arc<Poset>, exp: u32) -> SimpleValuation {
    spread(rng, p, 1 << exp, exp)
}

/// Moves every atom of `mu` to a random element above it, then adds some
/// unused mass at random; the result is always above `mu`.
pub fn random_above<R: Rng>(rng: &mut R, mu: &SimpleValuation, exp: u32) -> SimpleValuation {
    let p = mu.base();
    let mut atoms: Vec<(ElementId, Dyadic)> = Vec::new();
    for (x, w) in mu.atoms() {
        let up = p.up_set(x);
        atoms.push((up[rng.random_range(0..up.len())], w.clone()));
    }
    let spare = Dyadic::one().checked_sub(&mu.mass()).unwrap();
    let scale = 1u64 << exp;
    let extra_units = rng.random_range(0..=scale);
    let extra = Dyadic::new(extra_units, exp).min(spare);
    if !extra.is_zero() {
        atoms.push((ElementId(rng.random_range(0..p.len())), extra));
    }
    SimpleValuation::new(p, atoms).unwrap()
}

/// A pair that is comparable about half the time.
pub fn random_pair<R: Rng>(rng: &mut R, p: &Arc<Poset>, exp: u32) -> (SimpleValuation, SimpleValuation) {
    let mu = random_subprobability(rng, p, exp);
    let nu = if rng.random_bool(0.5) { random_above(rng, &mu, exp) } else { random_subprobability(rng, p, exp) };
    (mu, nu)
}

/// `N(A)`: support points of `nu` above some member of `a`.
fn neighbourhood(a: &[ElementId], nu: &SimpleValuation) -> Vec<ElementId> {
    let p = nu.base();
    nu.support().into_iter().filter(|&y| a.iter().any(|&x| p.le(x, y))).collect()
}

/// Nonempty subsets of `items`.
fn subsets(items: &[ElementId]) -> Vec<Vec<ElementId>> {
    assert!(items.len() < 24);
    (1u32..(1 << items.len()))
        .map(|mask| items.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &x)| x).collect())
        .collect()
}

/// `Σ_A r < s(N(A))` for every nonempty `A ⊆ supp μ`, by subset enumeration.
pub fn strict_hall(mu: &SimpleValuation, nu: &SimpleValuation) -> bool {
    subsets(&mu.support()).into_iter().all(|a| {
        let r: Dyadic = a.iter().map(|&x| mu.weight(x)).sum();
        let s: Dyadic = neighbourhood(&a, nu).iter().map(|&y| nu.weight(y)).sum();
        r < s
    })
}

/// Strict Hall condition with the bottom exempt: subsets of `supp μ ∖ {⊥}`
/// only, so `⊥`'s mass can always stay put.
pub fn v1_strict_hall(mu: &SimpleValuation, nu: &SimpleValuation) -> bool {
    let b = mu.base().bottom();
    let rows: Vec<ElementId> = mu.support().into_iter().filter(|&x| x != b).collect();
    subsets(&rows).into_iter().all(|a| {
        let r: Dyadic = a.iter().map(|&x| mu.weight(x)).sum();
        let s: Dyadic = neighbourhood(&a, nu).iter().map(|&y| nu.weight(y)).sum();
        r < s
    })
}

/// Searches for transport numbers on the `2^-grid` lattice with every column
/// except `⊥` strictly below its bound. Feasibility of an integer transport
/// problem is decided by Hall's condition on integer capacities: column `y`
/// holds at most `s_y·2^grid − 1` units, column `⊥` is unbounded.
pub fn v1_way_below_grid(mu: &SimpleValuation, nu: &SimpleValuation, grid: u32) -> bool {
    let b = mu.base().bottom();
    let units = |d: &Dyadic| -> i128 {
        d.rescale(grid).expect("input finer than the search grid").to_i128().unwrap()
    };
    let rows: Vec<ElementId> = mu.support().into_iter().filter(|&x| x != b).collect();
    subsets(&rows).into_iter().all(|a| {
        let r: i128 = a.iter().map(|&x| units(&mu.weight(x))).sum();
        let cap: i128 = neighbourhood(&a, nu).iter().map(|&y| (units(&nu.weight(y)) - 1).max(0)).sum();
        r <= cap
    })
}

/// The law of a finite table over a full level: weight `|g⁻¹(y)| / 2^depth`.
pub fn tabulate(p: &Arc<Poset>, table: &[ElementId], depth: u32) -> SimpleValuation {
    assert_eq!(table.len(), 1usize << depth);
    let mut counts = vec![0u64; p.len()];
    for y in table {
        counts[y.index()] += 1;
    }
    let atoms = p.elements().map(|y| (y, Dyadic::new(counts[y.index()], depth)));
    SimpleValuation::new(p, atoms).unwrap()
}

/// A random total table on level `depth`.
pub fn random_layer<R: Rng>(rng: &mut R, p: &Arc<Poset>, depth: u32) -> Layer {
    let table = (0..1usize << depth).map(|_| ElementId(rng.random_range(0..p.len()))).collect();
    Layer::new(depth, table).unwrap()
}

/// All words of a level, in lexicographic order.
pub fn level_words(depth: u32) -> Vec<Word> {
    (0..1u64 << depth).map(|i| Word::from_index(i, depth)).collect()
}
