//! Exact max-flow / min-cut on four-layer transport networks.
//!
//! The network has a source, a row of supply nodes, a row of demand nodes and
//! a sink. Source edges carry the supplies, sink edges carry the demands, and
//! links join a supply node to a demand node. All capacities are dyadic; they
//! are rescaled to a common denominator `2^p`, the breadth-first augmenting
//! path method runs over the integers, and the result is scaled back. Every
//! returned flow is therefore dyadic with exponent at most `p`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::dyadic::{common_exponent, Dyadic};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("link ({0}, {1}) refers to a node outside the network")]
    UnknownNode(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Source,
    Supply(usize),
    Demand(usize),
    Sink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Edge {
    /// Source to supply node.
    Supply(usize),
    /// Supply node to demand node.
    Link(usize, usize),
    /// Demand node to sink.
    Demand(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    supplies: Vec<Dyadic>,
    demands: Vec<Dyadic>,
    links: Vec<(usize, usize, Dyadic)>,
}

impl FlowNetwork {
    pub fn new(supplies: Vec<Dyadic>, demands: Vec<Dyadic>) -> Self {
        Self { supplies, demands, links: Vec::new() }
    }

    pub fn add_link(&mut self, from: usize, to: usize, capacity: Dyadic) -> Result<(), FlowError> {
        if from >= self.supplies.len() || to >= self.demands.len() {
            return Err(FlowError::UnknownNode(from, to));
        }
        self.links.push((from, to, capacity));
        Ok(())
    }

    pub fn supplies(&self) -> &[Dyadic] {
        &self.supplies
    }

    pub fn demands(&self) -> &[Dyadic] {
        &self.demands
    }

    pub fn links(&self) -> &[(usize, usize, Dyadic)] {
        &self.links
    }

    pub fn capacity(&self, edge: Edge) -> Dyadic {
        match edge {
            Edge::Supply(i) => self.supplies[i].clone(),
            Edge::Demand(j) => self.demands[j].clone(),
            Edge::Link(i, j) => self
                .links
                .iter()
                .filter(|(a, b, _)| (*a, *b) == (i, j))
                .map(|(_, _, c)| c)
                .sum(),
        }
    }

    /// Exponent of the common denominator of all capacities.
    pub fn scale_exponent(&self) -> u32 {
        common_exponent(self.supplies.iter().chain(&self.demands).chain(self.links.iter().map(|(_, _, c)| c)))
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = (0..self.supplies.len()).map(Edge::Supply).collect();
        out.extend(self.links.iter().map(|&(i, j, _)| Edge::Link(i, j)));
        out.extend((0..self.demands.len()).map(Edge::Demand));
        out
    }

    /// Value of the cut whose source side is `source_side` (the source is
    /// always included, the sink never).
    pub fn cut_value(&self, source_side: &[Node]) -> Dyadic {
        let inside = |n: Node| n == Node::Source || (n != Node::Sink && source_side.contains(&n));
        let mut total = Dyadic::zero();
        for (i, s) in self.supplies.iter().enumerate() {
            if !inside(Node::Supply(i)) {
                total = &total + s;
            }
        }
        for (i, j, c) in &self.links {
            if inside(Node::Supply(*i)) && !inside(Node::Demand(*j)) {
                total = &total + c;
            }
        }
        for (j, d) in self.demands.iter().enumerate() {
            if inside(Node::Demand(j)) {
                total = &total + d;
            }
        }
        total
    }

    pub fn to_dot(&self, flow: Option<&Flow>) -> String {
        let label = |e: Edge, cap: &Dyadic| match flow {
            Some(f) => format!("{}/{}", f.on(e), cap),
            None => cap.to_string(),
        };
        let mut s = String::from("digraph flow {\n  rankdir=LR;\n  source; sink;\n");
        for (i, c) in self.supplies.iter().enumerate() {
            let _ = writeln!(s, "  source -> x{i} [label=\"{}\"];", label(Edge::Supply(i), c));
        }
        for (i, j, c) in &self.links {
            let _ = writeln!(s, "  x{i} -> y{j} [label=\"{}\"];", label(Edge::Link(*i, *j), c));
        }
        for (j, c) in self.demands.iter().enumerate() {
            let _ = writeln!(s, "  y{j} -> sink [label=\"{}\"];", label(Edge::Demand(j), c));
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    pub value: Dyadic,
    pub edge_flows: Vec<(Edge, Dyadic)>,
}

impl Flow {
    pub fn on(&self, edge: Edge) -> Dyadic {
        self.edge_flows.iter().filter(|(e, _)| *e == edge).map(|(_, f)| f).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub value: Dyadic,
    /// Nodes reachable from the source in the final residual graph.
    pub source_side: Vec<Node>,
}

struct Arc {
    to: usize,
    cap: BigUint,
    rev: usize,
}

struct Residual {
    adj: Vec<Vec<Arc>>,
    // (node, arc index) of each forward arc, in `FlowNetwork::edges` order
    handles: Vec<(usize, usize)>,
    original: Vec<BigUint>,
}

impl Residual {
    fn add(&mut self, from: usize, to: usize, cap: BigUint) {
        let rev_from = self.adj[to].len();
        let rev_to = self.adj[from].len();
        self.adj[from].push(Arc { to, cap: cap.clone(), rev: rev_from });
        self.adj[to].push(Arc { to: from, cap: BigUint::zero(), rev: rev_to });
        self.handles.push((from, rev_to));
        self.original.push(cap);
    }
}

fn node_index(net: &FlowNetwork, node: Node) -> usize {
    match node {
        Node::Source => 0,
        Node::Supply(i) => 1 + i,
        Node::Demand(j) => 1 + net.supplies.len() + j,
        Node::Sink => 1 + net.supplies.len() + net.demands.len(),
    }
}

fn index_node(net: &FlowNetwork, idx: usize) -> Node {
    let (l, r) = (net.supplies.len(), net.demands.len());
    match idx {
        0 => Node::Source,
        i if i <= l => Node::Supply(i - 1),
        i if i <= l + r => Node::Demand(i - 1 - l),
        _ => Node::Sink,
    }
}

struct Solution {
    residual: Residual,
    scale: u32,
    value: BigUint,
}

fn solve(net: &FlowNetwork) -> Solution {
    let scale = net.scale_exponent();
    let n = net.supplies.len() + net.demands.len() + 2;
    let mut res = Residual { adj: (0..n).map(|_| Vec::new()).collect(), handles: Vec::new(), original: Vec::new() };
    let int = |d: &Dyadic| d.rescale(scale).expect("scale covers every capacity");
    let (source, sink) = (0, n - 1);
    for (i, s) in net.supplies.iter().enumerate() {
        res.add(source, node_index(net, Node::Supply(i)), int(s));
    }
    for (i, j, c) in &net.links {
        res.add(node_index(net, Node::Supply(*i)), node_index(net, Node::Demand(*j)), int(c));
    }
    for (j, d) in net.demands.iter().enumerate() {
        res.add(node_index(net, Node::Demand(j)), sink, int(d));
    }

    let mut value = BigUint::zero();
    loop {
        // BFS over nodes in declaration order; parent holds (node, arc).
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            if u == sink {
                break;
            }
            for (k, arc) in res.adj[u].iter().enumerate() {
                if !seen[arc.to] && !arc.cap.is_zero() {
                    seen[arc.to] = true;
                    parent[arc.to] = Some((u, k));
                    queue.push_back(arc.to);
                }
            }
        }
        if !seen[sink] {
            break;
        }
        let mut bottleneck: Option<BigUint> = None;
        let mut v = sink;
        while let Some((u, k)) = parent[v] {
            let c = &res.adj[u][k].cap;
            if bottleneck.as_ref().is_none_or(|b| c < b) {
                bottleneck = Some(c.clone());
            }
            v = u;
        }
        let b = bottleneck.expect("augmenting path has at least one arc");
        let mut v = sink;
        while let Some((u, k)) = parent[v] {
            res.adj[u][k].cap -= &b;
            let rev = res.adj[u][k].rev;
            res.adj[v][rev].cap += &b;
            v = u;
        }
        value += b;
    }
    Solution { residual: res, scale, value }
}

pub fn max_flow(net: &FlowNetwork) -> Flow {
    let sol = solve(net);
    flow_from(net, &sol)
}

fn flow_from(net: &FlowNetwork, sol: &Solution) -> Flow {
    let edge_flows = net
        .edges()
        .into_iter()
        .zip(&sol.residual.handles)
        .zip(&sol.residual.original)
        .map(|((e, &(u, k)), orig)| {
            let used = orig - &sol.residual.adj[u][k].cap;
            (e, Dyadic::from_scaled(used, sol.scale))
        })
        .collect();
    Flow { value: Dyadic::from_scaled(sol.value.clone(), sol.scale), edge_flows }
}

fn cut_from(net: &FlowNetwork, sol: &Solution) -> Cut {
    let n = sol.residual.adj.len();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for arc in &sol.residual.adj[u] {
            if !seen[arc.to] && !arc.cap.is_zero() {
                seen[arc.to] = true;
                queue.push_back(arc.to);
            }
        }
    }
    let source_side = (0..n).filter(|&i| seen[i]).map(|i| index_node(net, i)).collect();
    Cut { value: Dyadic::from_scaled(sol.value.clone(), sol.scale), source_side }
}

pub fn min_cut(net: &FlowNetwork) -> Cut {
    let sol = solve(net);
    cut_from(net, &sol)
}

/// Max flow and the residual min cut from a single run.
pub fn max_flow_min_cut(net: &FlowNetwork) -> (Flow, Cut) {
    let sol = solve(net);
    (flow_from(net, &sol), cut_from(net, &sol))
}
