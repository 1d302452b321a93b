//! Lifting arc vectors to MTZ potentials through shortest paths.
//!
//! Arc `(i, j)` gets weight `(n-1) - n x_ij`, arcs into node 1 are dropped, and
//! `u_j = -dist(1, j)`. The shortest-path inequality `dist(j) <= dist(i) + w_ij` is the
//! MTZ row for `(i, j)` rearranged, so any finite distance labelling certifies MTZ
//! feasibility. A negative cycle `C` with node set `Q` instead gives
//! `sum_C x_ij > |Q| (n-1)/n >= |Q| - 1`, a violated subtour constraint.

use itertools::Itertools;

use crate::dfj::CutCertificate;
use crate::error::{Error, Result};
use crate::instance::FractionalPoint;
use crate::mtz::Potentials;
use crate::scalar::Scalar;

/// Dense weighted digraph on nodes `1..=n`; `None` marks an absent arc.
#[derive(Debug, Clone, PartialEq)]
pub struct Digraph<S> {
    w: Vec<Vec<Option<S>>>,
}

impl<S: Scalar> Digraph<S> {
    /// Graph with no arcs.
    pub fn new(n: usize) -> Self {
        Self {
            w: vec![vec![None; n]; n],
        }
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn set_arc(&mut self, i: usize, j: usize, weight: S) {
        assert!(i != j, "self-loop ({i}, {j})");
        self.w[i - 1][j - 1] = Some(weight);
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<&S> {
        self.w[i - 1][j - 1].as_ref()
    }

    /// Present arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, &S)> + '_ {
        self.w.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(j, w)| w.as_ref().map(|w| (i + 1, j + 1, w)))
        })
    }

    /// Total weight of the closed walk `nodes[0] -> nodes[1] -> ... -> nodes[0]`.
    pub fn cycle_weight(&self, nodes: &[usize]) -> Option<S> {
        let mut total = S::zero();
        for k in 0..nodes.len() {
            total += self.weight(nodes[k], nodes[(k + 1) % nodes.len()])?;
        }
        Some(total)
    }
}

/// The graph weighted `(n-1) - n x_ij`, without arcs into node 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedGraph<S> {
    graph: Digraph<S>,
}

impl<S: Scalar> ModifiedGraph<S> {
    pub fn graph(&self) -> &Digraph<S> {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<&S> {
        self.graph.weight(i, j)
    }
}

pub fn build_modified_graph<S: Scalar>(p: &FractionalPoint<S>) -> ModifiedGraph<S> {
    let n = p.n();
    let n_s = S::from_usize(n);
    let mut base = n_s.clone();
    base -= &S::one();
    let mut graph = Digraph::new(n);
    for i in 1..=n {
        for j in (2..=n).filter(|&j| j != i) {
            let mut w = base.clone();
            w.sub_mul_assign(&n_s, p.get(i, j));
            graph.set_arc(i, j, w);
        }
    }
    ModifiedGraph { graph }
}

/// Simple directed cycle, stored open and rotated to start at its smallest node.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeCycle<S> {
    pub nodes: Vec<usize>,
    pub weight: S,
}

impl<S: Scalar> NegativeCycle<S> {
    /// The cycle written closed, e.g. `[2, 3, 2]`.
    pub fn closed(&self) -> Vec<usize> {
        let mut out = self.nodes.clone();
        out.push(self.nodes[0]);
        out
    }
}

impl<S: Scalar> std::fmt::Display for NegativeCycle<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}) weight {}",
            self.closed().iter().join(","),
            self.weight.render()
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShortestPaths<S> {
    /// `dist[v - 1]`, `None` when `v` is unreachable.
    Distances(Vec<Option<S>>),
    NegativeCycle(NegativeCycle<S>),
}

fn rotate_to_min(mut nodes: Vec<usize>) -> Vec<usize> {
    let pos = nodes.iter().position_min().unwrap_or(0);
    nodes.rotate_left(pos);
    nodes
}

/// Bellman-Ford from `source`, relaxing arcs in lexicographic order.
///
/// After `n - 1` rounds a further round looks for an improvable arc. If one exists its head
/// is walked back `n` predecessor steps, which lands on a cycle of the predecessor graph;
/// that cycle is simple and has negative weight.
pub fn bellman_ford<S: Scalar>(g: &Digraph<S>, source: usize) -> ShortestPaths<S> {
    let n = g.n();
    let arcs: Vec<(usize, usize, &S)> = g.arcs().map(|(i, j, w)| (i - 1, j - 1, w)).collect();
    let mut dist: Vec<Option<S>> = vec![None; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    dist[source - 1] = Some(S::zero());

    let relax = |dist: &mut Vec<Option<S>>, pred: &mut Vec<Option<usize>>, i: usize, j: usize, w: &S| -> bool {
        let Some(di) = &dist[i] else { return false };
        let mut cand = di.clone();
        cand += w;
        let improves = match &dist[j] {
            None => true,
            Some(dj) => {
                let mut d = cand.clone();
                d -= dj;
                d.is_neg_tol()
            }
        };
        if improves {
            dist[j] = Some(cand);
            pred[j] = Some(i);
        }
        improves
    };

    for _ in 1..n {
        let mut changed = false;
        for &(i, j, w) in &arcs {
            changed |= relax(&mut dist, &mut pred, i, j, w);
        }
        if !changed {
            return ShortestPaths::Distances(dist);
        }
    }

    let Some(start) = arcs
        .iter()
        .find_map(|&(i, j, w)| relax(&mut dist, &mut pred, i, j, w).then_some(j))
    else {
        return ShortestPaths::Distances(dist);
    };
    let mut v = start;
    for _ in 0..n {
        v = pred[v].expect("relaxed node has a predecessor chain");
    }
    let mut cycle = vec![v];
    let mut w = pred[v].expect("cycle node has a predecessor");
    while w != v {
        cycle.push(w);
        w = pred[w].expect("cycle node has a predecessor");
    }
    cycle.reverse();
    let nodes = rotate_to_min(cycle.into_iter().map(|v| v + 1).collect());
    let weight = g.cycle_weight(&nodes).expect("predecessor arcs exist");
    debug_assert!(weight.is_negative(), "predecessor cycle must be negative");
    ShortestPaths::NegativeCycle(NegativeCycle { nodes, weight })
}

#[derive(Debug, Clone, PartialEq)]
pub enum LiftResult<S> {
    /// `u_j = -dist(1, j)`, so `u_1 = 0`.
    Potentials(Potentials<S>),
    NegativeCycle(NegativeCycle<S>),
}

impl<S: Scalar> LiftResult<S> {
    pub fn is_success(&self) -> bool {
        matches!(self, LiftResult::Potentials(_))
    }
}

/// Shortest-path lift of `p`; total over all points.
pub fn lift_point<S: Scalar>(p: &FractionalPoint<S>) -> LiftResult<S> {
    let g = build_modified_graph(p);
    match bellman_ford(g.graph(), 1) {
        ShortestPaths::Distances(dist) => {
            let u = dist
                .into_iter()
                .map(|d| {
                    let mut u = S::zero();
                    u -= &d.expect("every node is one arc away from node 1");
                    u
                })
                .collect();
            LiftResult::Potentials(Potentials::new(u))
        }
        ShortestPaths::NegativeCycle(c) => LiftResult::NegativeCycle(c),
    }
}

/// Turns a negative cycle of the modified graph into the subtour cut on its node set.
///
/// Accepts the cycle open (`[2, 3]`) or closed (`[2, 3, 2]`).
pub fn cycle_to_cut<S: Scalar>(p: &FractionalPoint<S>, cycle: &[usize]) -> Result<CutCertificate<S>> {
    let mut nodes = cycle.to_vec();
    if nodes.len() > 1 && nodes.first() == nodes.last() {
        nodes.pop();
    }
    if nodes.len() < 2 {
        return Err(Error::Domain(format!("cycle {cycle:?} has fewer than two nodes")));
    }
    if nodes.contains(&1) {
        return Err(Error::Domain(format!("cycle {cycle:?} passes through node 1")));
    }
    if nodes.iter().duplicates().next().is_some() {
        return Err(Error::Domain(format!("cycle {cycle:?} is not simple")));
    }
    if let Some(v) = nodes.iter().find(|&&v| v == 0 || v > p.n()) {
        return Err(Error::Domain(format!("node {v} outside 1..={}", p.n())));
    }
    let g = build_modified_graph(p);
    let weight = g.graph().cycle_weight(&nodes).expect("all arcs avoiding node 1 exist");
    if !weight.is_neg_tol() {
        return Err(Error::Domain(format!(
            "cycle {cycle:?} has weight {}, not negative",
            weight.render()
        )));
    }
    CutCertificate::for_set(p, &nodes)
}
