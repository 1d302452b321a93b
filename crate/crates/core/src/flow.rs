//! Edmonds-Karp maximum flow on a dense capacity matrix.

use std::collections::VecDeque;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct MinCut<S> {
    pub value: S,
    /// `source_side[v]` is true for nodes reachable from the source in the final residual graph.
    pub source_side: Vec<bool>,
}

/// Maximum `source -> sink` flow with capacities `cap[i][j]` (0-indexed).
///
/// Augmenting paths are shortest (BFS), neighbours scanned in increasing index, so the
/// result is deterministic. The returned cut is the minimal source side.
pub fn max_flow<S: Scalar>(cap: &[Vec<S>], source: usize, sink: usize) -> MinCut<S> {
    let n = cap.len();
    assert!(
        source < n && sink < n && source != sink,
        "bad terminals {source} -> {sink}"
    );
    let mut residual: Vec<Vec<S>> = cap.to_vec();
    let mut value = S::zero();
    loop {
        let parent = bfs(&residual, source);
        if parent[sink].is_none() {
            let source_side = parent.iter().map(Option::is_some).collect();
            return MinCut { value, source_side };
        }
        let mut bottleneck: Option<S> = None;
        let mut v = sink;
        while v != source {
            let u = parent[v].expect("path node has a parent");
            let r = &residual[u][v];
            if bottleneck.as_ref().is_none_or(|b| r < b) {
                bottleneck = Some(r.clone());
            }
            v = u;
        }
        let delta = bottleneck.expect("path has at least one arc");
        let mut v = sink;
        while v != source {
            let u = parent[v].expect("path node has a parent");
            residual[u][v] -= &delta;
            residual[v][u] += &delta;
            v = u;
        }
        value += &delta;
    }
}

/// BFS tree over arcs with positive residual; `parent[source] = Some(source)`.
fn bfs<S: Scalar>(residual: &[Vec<S>], source: usize) -> Vec<Option<usize>> {
    let n = residual.len();
    let mut parent = vec![None; n];
    parent[source] = Some(source);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if parent[v].is_none() && residual[u][v].is_pos_tol() {
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    parent
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn classic_network() {
        // CLRS figure 26.1: max flow 23.
        let raw = [
            [0, 16, 13, 0, 0, 0],
            [0, 0, 10, 12, 0, 0],
            [0, 4, 0, 0, 14, 0],
            [0, 0, 9, 0, 0, 20],
            [0, 0, 0, 7, 0, 4],
            [0, 0, 0, 0, 0, 0],
        ];
        let cap: Vec<Vec<Rational>> = raw
            .iter()
            .map(|r| r.iter().map(|&v| Rational::from_i64(v)).collect())
            .collect();
        let cut = max_flow(&cap, 0, 5);
        assert_eq!(cut.value, Rational::from_i64(23));
        assert_eq!(cut.source_side, vec![true, true, true, false, true, false]);
    }

    #[test]
    fn disconnected_sink() {
        let cap = vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]];
        let cut = max_flow(&cap, 0, 2);
        assert_eq!(cut.value, 0.0);
        assert_eq!(cut.source_side, vec![true, true, false]);
    }
}
