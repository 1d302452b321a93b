//! ATSP instances, fractional arc vectors, tours, and their generators.
//!
//! Nodes are labelled `1..=n` on every public interface; node 1 is the root.
//! Storage is 0-indexed.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{sum, Rational, Scalar};

/// Complete digraph on `1..=n` with arc costs; the diagonal is carried but unused.
#[derive(Debug, Clone, PartialEq)]
pub struct AtspInstance<S = Rational> {
    name: String,
    costs: Vec<Vec<S>>,
}

impl<S: Scalar> AtspInstance<S> {
    pub fn new(name: impl Into<String>, costs: Vec<Vec<S>>) -> Result<Self> {
        let n = costs.len();
        if n < 3 {
            return Err(Error::InvalidInstance(format!("need at least 3 nodes, got {n}")));
        }
        if let Some((i, row)) = costs.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidInstance(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        Ok(Self {
            name: name.into(),
            costs,
        })
    }

    /// Builds an instance from integer costs.
    pub fn from_integers(name: impl Into<String>, costs: &[Vec<i64>]) -> Result<Self> {
        let costs = costs
            .iter()
            .map(|row| row.iter().map(|&c| S::from_i64(c)).collect())
            .collect();
        Self::new(name, costs)
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Cost of arc `(i, j)`, 1-indexed.
    pub fn cost(&self, i: usize, j: usize) -> &S {
        &self.costs[i - 1][j - 1]
    }

    pub fn costs(&self) -> &[Vec<S>] {
        &self.costs
    }

    /// Objective value `sum c_ij x_ij` over off-diagonal arcs.
    pub fn objective(&self, p: &FractionalPoint<S>) -> S {
        let mut acc = S::zero();
        for (i, j) in arcs(self.n()) {
            let mut t = self.cost(i, j).clone();
            t *= p.get(i, j);
            acc += &t;
        }
        acc
    }

    pub fn tour_cost(&self, t: &Tour) -> S {
        let mut acc = S::zero();
        for (i, j) in t.arcs() {
            acc += self.cost(i, j);
        }
        acc
    }
}

/// All arcs `(i, j)` with `i != j` in lexicographic order, 1-indexed.
pub fn arcs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j)))
}

/// Position of arc `(i, j)` in the lexicographic order of [`arcs`].
pub fn arc_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j && i >= 1 && j >= 1 && i <= n && j <= n);
    (i - 1) * (n - 1) + if j < i { j - 1 } else { j - 2 }
}

/// Arc values `x_ij` of a candidate point in a relaxation polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalPoint<S = Rational> {
    x: Vec<Vec<S>>,
}

impl<S: Scalar> FractionalPoint<S> {
    pub fn new(x: Vec<Vec<S>>) -> Result<Self> {
        let n = x.len();
        if n < 2 {
            return Err(Error::InvalidPoint(format!("need at least 2 nodes, got {n}")));
        }
        let one = S::one();
        for (i, row) in x.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidPoint(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if i == j {
                    if !v.is_zero() {
                        return Err(Error::InvalidPoint(format!("x_{0}{0} must be 0", i + 1)));
                    }
                    continue;
                }
                let mut over = v.clone();
                over -= &one;
                if v.is_neg_tol() || over.is_pos_tol() {
                    return Err(Error::InvalidPoint(format!(
                        "x_{},{} = {} outside [0, 1]",
                        i + 1,
                        j + 1,
                        v.render()
                    )));
                }
            }
        }
        Ok(Self { x })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            x: vec![vec![S::zero(); n]; n],
        }
    }

    /// Builds a point from `(i, j, value)` triples on an otherwise zero matrix.
    pub fn from_arcs(n: usize, entries: &[(usize, usize, S)]) -> Result<Self> {
        let mut x = vec![vec![S::zero(); n]; n];
        for (i, j, v) in entries {
            if *i == 0 || *j == 0 || *i > n || *j > n {
                return Err(Error::InvalidPoint(format!("arc ({i}, {j}) out of range")));
            }
            x[i - 1][j - 1] = v.clone();
        }
        Self::new(x)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Value of arc `(i, j)`, 1-indexed.
    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.x[i - 1][j - 1]
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.x
    }

    /// Inverse of flattening by [`arc_index`]: `values[arc_index(n, i, j)] = x_ij`.
    pub fn from_arc_values(n: usize, values: &[S]) -> Result<Self> {
        if values.len() != n * (n - 1) {
            return Err(Error::InvalidPoint(format!(
                "{} arc values for n = {n}, expected {}",
                values.len(),
                n * (n - 1)
            )));
        }
        let mut x = vec![vec![S::zero(); n]; n];
        for ((i, j), v) in arcs(n).zip(values) {
            x[i - 1][j - 1] = v.clone();
        }
        Self::new(x)
    }

    /// True when every entry is 0 or 1.
    pub fn is_integral(&self) -> bool {
        self.x.iter().flatten().all(|v| v.is_zero() || v.is_one())
    }
}

/// Hamiltonian cycle written as a visiting order starting at node 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Tour {
    order: Vec<usize>,
}

impl Tour {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n < 2 {
            return Err(Error::InvalidTour(format!("need at least 2 nodes, got {n}")));
        }
        if order[0] != 1 {
            return Err(Error::InvalidTour("tour must start at node 1".into()));
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v == 0 || v > n || std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::InvalidTour(format!("{order:?} is not a permutation of 1..={n}")));
            }
        }
        Ok(Self { order })
    }

    /// The tour `1, 2, ..., n`.
    pub fn identity(n: usize) -> Self {
        Self {
            order: (1..=n).collect(),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Consecutive pairs including the closing arc back to node 1.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.order.len();
        (0..n).map(move |k| (self.order[k], self.order[(k + 1) % n]))
    }

    /// Visit-order potentials: the k-th visited node (0-based) gets `k`.
    pub fn visit_order(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (k, &v) in self.order.iter().enumerate() {
            pos[v - 1] = k;
        }
        pos
    }
}

impl TryFrom<Vec<usize>> for Tour {
    type Error = Error;

    fn try_from(order: Vec<usize>) -> Result<Self> {
        Tour::new(order)
    }
}

impl From<Tour> for Vec<usize> {
    fn from(t: Tour) -> Self {
        t.order
    }
}

/// Incidence vector of a tour.
pub fn point_from_tour<S: Scalar>(t: &Tour, n: usize) -> Result<FractionalPoint<S>> {
    if t.len() != n {
        return Err(Error::InvalidTour(format!("tour has {} nodes, expected {n}", t.len())));
    }
    let mut p = FractionalPoint::zeros(n);
    for (i, j) in t.arcs() {
        p.x[i - 1][j - 1] = S::one();
    }
    Ok(p)
}

/// Entrywise weighted sum; weights must be nonnegative and sum to one.
pub fn convex_combination<S: Scalar>(points: &[FractionalPoint<S>], weights: &[S]) -> Result<FractionalPoint<S>> {
    if points.is_empty() || points.len() != weights.len() {
        return Err(Error::InvalidWeights(format!(
            "{} points but {} weights",
            points.len(),
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| w.is_neg_tol()) {
        return Err(Error::InvalidWeights(format!("negative weight {}", w.render())));
    }
    let total = sum(weights);
    if !total.approx_eq(&S::one()) {
        return Err(Error::InvalidWeights(format!(
            "weights sum to {}, not 1",
            total.render()
        )));
    }
    let n = points[0].n();
    if points.iter().any(|p| p.n() != n) {
        return Err(Error::InvalidPoint("points differ in node count".into()));
    }
    let mut x = vec![vec![S::zero(); n]; n];
    for (p, w) in points.iter().zip(weights) {
        for (row, prow) in x.iter_mut().zip(&p.x) {
            for (acc, v) in row.iter_mut().zip(prow) {
                if !v.is_zero() {
                    let mut t = v.clone();
                    t *= w;
                    *acc += &t;
                }
            }
        }
    }
    // Float rounding may push an entry a hair past 1; the constructor absorbs it within tolerance.
    FractionalPoint::new(x)
}

/// Every row and column of `x` sums to one.
pub fn check_degrees<S: Scalar>(p: &FractionalPoint<S>) -> bool {
    let n = p.n();
    let one = S::one();
    let rows_ok = p.x.iter().all(|row| sum(row).approx_eq(&one));
    rows_ok && (0..n).all(|j| sum(p.x.iter().map(|row| &row[j])).approx_eq(&one))
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniformly random tour over `1..=n` starting at node 1.
pub fn random_tour(n: usize, rng: &mut impl Rng) -> Tour {
    let mut rest: Vec<usize> = (2..=n).collect();
    rest.shuffle(rng);
    let mut order = Vec::with_capacity(n);
    order.push(1);
    order.extend(rest);
    Tour { order }
}

/// Random simplex weights built from integers in `1..=100`, so they sum to one exactly
/// in rational mode.
fn random_weights<S: Scalar>(k: usize, rng: &mut impl Rng) -> Vec<S> {
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=100)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| S::from_ratio(w, total)).collect()
}

fn combine_with_random_weights<S: Scalar>(points: Vec<FractionalPoint<S>>, rng: &mut impl Rng) -> FractionalPoint<S> {
    let weights = random_weights(points.len(), rng);
    convex_combination(&points, &weights).expect("random simplex weights are valid")
}

/// Convex combination of `k` random tours; always inside the DFJ polytope.
pub fn random_dfj_point<S: Scalar>(n: usize, k: usize, seed: u64) -> Result<FractionalPoint<S>> {
    if n < 3 || k == 0 {
        return Err(Error::Precondition(format!(
            "random_dfj_point needs n >= 3 and k >= 1 (n = {n}, k = {k})"
        )));
    }
    let mut rng = rng_for(seed);
    let tours: Vec<FractionalPoint<S>> = (0..k)
        .map(|_| point_from_tour(&random_tour(n, &mut rng), n).expect("tour matches n"))
        .collect();
    Ok(combine_with_random_weights(tours, &mut rng))
}

/// Convex combination of `k` random fixed-point-free permutations (cycle covers).
/// Degree-feasible; may or may not satisfy the subtour constraints.
pub fn random_cycle_cover_point<S: Scalar>(n: usize, k: usize, seed: u64) -> Result<FractionalPoint<S>> {
    if n < 2 || k == 0 {
        return Err(Error::Precondition(format!(
            "random_cycle_cover_point needs n >= 2 and k >= 1 (n = {n}, k = {k})"
        )));
    }
    let mut rng = rng_for(seed);
    let covers = (0..k)
        .map(|_| {
            let succ = random_derangement(n, &mut rng);
            let mut p = FractionalPoint::zeros(n);
            for (i, &j) in succ.iter().enumerate() {
                p.x[i][j] = S::one();
            }
            p
        })
        .collect();
    Ok(combine_with_random_weights(covers, &mut rng))
}

/// Splits the nodes into random cycles of length at least two and returns successors (0-indexed).
fn random_derangement(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(rng);
    let mut succ = vec![0; n];
    let mut start = 0;
    while start < n {
        let remaining = n - start;
        let len = if remaining <= 3 {
            remaining
        } else {
            rng.gen_range(2..=remaining)
        };
        let len = if remaining - len == 1 { len + 1 } else { len };
        let cycle = &nodes[start..start + len];
        for k in 0..len {
            succ[cycle[k]] = cycle[(k + 1) % len];
        }
        start += len;
    }
    succ
}

/// Degree-feasible point carrying a subtour of `subtour_len` nodes at value 1 on a random
/// subset of `{2..n}`; the remaining nodes (including node 1) carry a convex combination of
/// `k` random tours over themselves.
pub fn random_subtour_point<S: Scalar>(
    n: usize,
    subtour_len: usize,
    k: usize,
    seed: u64,
) -> Result<FractionalPoint<S>> {
    if subtour_len < 2 || n < subtour_len + 2 || k == 0 {
        return Err(Error::Precondition(format!(
            "random_subtour_point needs 2 <= len <= n - 2 and k >= 1 (n = {n}, len = {subtour_len}, k = {k})"
        )));
    }
    let mut rng = rng_for(seed);
    let mut others: Vec<usize> = (2..=n).collect();
    others.shuffle(&mut rng);
    let sub: Vec<usize> = others.split_off(others.len() - subtour_len);
    let mut rest = vec![1];
    rest.extend(others);
    rest.sort_unstable();

    let parts: Vec<FractionalPoint<S>> = (0..k)
        .map(|_| {
            let mut order = rest.clone();
            order[1..].shuffle(&mut rng);
            let mut p = FractionalPoint::zeros(n);
            for cycle in [&order, &sub] {
                for idx in 0..cycle.len() {
                    let (i, j) = (cycle[idx], cycle[(idx + 1) % cycle.len()]);
                    p.x[i - 1][j - 1] = S::one();
                }
            }
            p
        })
        .collect();
    Ok(combine_with_random_weights(parts, &mut rng))
}

/// Random instance with integer costs uniform in `1..=100` and zero diagonal.
pub fn random_instance<S: Scalar>(n: usize, seed: u64) -> Result<AtspInstance<S>> {
    let mut rng = rng_for(seed);
    let costs: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 0 } else { rng.gen_range(1..=100) })
                .collect()
        })
        .collect();
    AtspInstance::from_integers(format!("random-n{n}-s{seed}"), &costs)
}

// ---------------------------------------------------------------------------
// TSPLIB (EXPLICIT / FULL_MATRIX ATSP subset)
// ---------------------------------------------------------------------------

/// Parses a TSPLIB `ATSP` file with `EXPLICIT` / `FULL_MATRIX` weights.
pub fn parse_tsplib<S: Scalar>(text: &str) -> Result<AtspInstance<S>> {
    let err = |line: usize, msg: String| Error::Parse { line, msg };

    let mut name = String::new();
    let mut dimension: Option<usize> = None;
    let mut kind: Option<String> = None;
    let mut weight_type: Option<String> = None;
    let mut weight_format: Option<String> = None;
    let mut weights: Vec<S> = Vec::new();
    let mut in_section = false;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if in_section {
            let expected = dimension.unwrap_or(0).pow(2);
            for tok in line.split_whitespace() {
                let v = S::parse_scalar(tok).ok_or_else(|| err(line_no, format!("non-numeric weight {tok:?}")))?;
                if weights.len() == expected {
                    return Err(err(
                        line_no,
                        format!("more than {expected} weights for DIMENSION {}", expected.isqrt()),
                    ));
                }
                weights.push(v);
            }
            continue;
        }
        if line.trim_end_matches(':').trim() == "EDGE_WEIGHT_SECTION" {
            if dimension.is_none() {
                return Err(err(line_no, "EDGE_WEIGHT_SECTION before DIMENSION".into()));
            }
            match kind.as_deref() {
                Some("ATSP") => {}
                other => return Err(err(line_no, format!("TYPE must be ATSP, got {other:?}"))),
            }
            if weight_type.as_deref() != Some("EXPLICIT") {
                return Err(err(
                    line_no,
                    format!("EDGE_WEIGHT_TYPE must be EXPLICIT, got {weight_type:?}"),
                ));
            }
            if weight_format.as_deref() != Some("FULL_MATRIX") {
                return Err(err(
                    line_no,
                    format!("EDGE_WEIGHT_FORMAT must be FULL_MATRIX, got {weight_format:?}"),
                ));
            }
            in_section = true;
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| err(line_no, format!("malformed header line {line:?}")))?;
        let (key, value) = (key.trim(), value.trim().to_string());
        match key {
            "NAME" => name = value,
            "COMMENT" => {}
            "TYPE" => kind = Some(value),
            "DIMENSION" => {
                let d: usize = value
                    .parse()
                    .map_err(|_| err(line_no, format!("DIMENSION is not a count: {value:?}")))?;
                dimension = Some(d);
            }
            "EDGE_WEIGHT_TYPE" => weight_type = Some(value),
            "EDGE_WEIGHT_FORMAT" => weight_format = Some(value),
            other => return Err(err(line_no, format!("unsupported keyword {other:?}"))),
        }
    }

    if !in_section {
        return Err(err(last_line, "missing EDGE_WEIGHT_SECTION".into()));
    }
    let n = dimension.unwrap_or(0);
    if weights.len() != n * n {
        return Err(err(
            last_line,
            format!(
                "dimension mismatch: DIMENSION {n} needs {} weights, found {}",
                n * n,
                weights.len()
            ),
        ));
    }
    let costs: Vec<Vec<S>> = weights.chunks(n).map(|c| c.to_vec()).collect();
    AtspInstance::new(name, costs).map_err(|e| err(last_line, e.to_string()))
}

/// Writes the instance in the subset accepted by [`parse_tsplib`].
pub fn serialize_tsplib<S: Scalar>(inst: &AtspInstance<S>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME: {}", inst.name);
    let _ = writeln!(out, "TYPE: ATSP");
    let _ = writeln!(out, "DIMENSION: {}", inst.n());
    let _ = writeln!(out, "EDGE_WEIGHT_TYPE: EXPLICIT");
    let _ = writeln!(out, "EDGE_WEIGHT_FORMAT: FULL_MATRIX");
    let _ = writeln!(out, "EDGE_WEIGHT_SECTION");
    for row in &inst.costs {
        let line: Vec<String> = row.iter().map(Scalar::render).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out.push_str("EOF\n");
    out
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

/// A scalar as it may appear in JSON: a `"p/q"` string or a bare number.
#[derive(Deserialize)]
#[serde(untagged)]
pub(crate) enum ScalarRepr {
    Text(String),
    Int(i64),
    Float(f64),
}

impl ScalarRepr {
    pub(crate) fn into_scalar<S: Scalar>(self) -> Option<S> {
        match self {
            ScalarRepr::Text(s) => S::parse_scalar(&s),
            ScalarRepr::Int(v) => Some(S::from_i64(v)),
            ScalarRepr::Float(v) => S::parse_scalar(&v.to_string()),
        }
    }
}

#[derive(Serialize)]
struct PointOut {
    n: usize,
    x: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct PointIn {
    n: usize,
    x: Vec<Vec<ScalarRepr>>,
}

impl<S: Scalar> Serialize for FractionalPoint<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        PointOut {
            n: self.n(),
            x: self.x.iter().map(|r| r.iter().map(Scalar::render).collect()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for FractionalPoint<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = PointIn::deserialize(deserializer)?;
        if raw.x.len() != raw.n {
            return Err(D::Error::custom(format!(
                "n = {} but x has {} rows",
                raw.n,
                raw.x.len()
            )));
        }
        let x = raw
            .x
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| v.into_scalar().ok_or_else(|| D::Error::custom("unparseable scalar")))
                    .collect::<std::result::Result<Vec<S>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        FractionalPoint::new(x).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{One, Zero};

    type Q = Rational;

    fn q(p: i64, d: i64) -> Q {
        Q::from_ratio(p, d)
    }

    fn half_half() -> FractionalPoint<Q> {
        let a = point_from_tour(&Tour::new(vec![1, 2, 3, 4]).unwrap(), 4).unwrap();
        let b = point_from_tour(&Tour::new(vec![1, 3, 2, 4]).unwrap(), 4).unwrap();
        convex_combination(&[a, b], &[q(1, 2), q(1, 2)]).unwrap()
    }

    #[test]
    fn parse_three_node_matrix() {
        let text = "NAME: t3\nTYPE: ATSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\n\
                    EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n0 1 2\n2 0 1\n1 2 0\nEOF\n";
        let inst: AtspInstance<Q> = parse_tsplib(text).unwrap();
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.name(), "t3");
        assert_eq!(*inst.cost(1, 2), q(1, 1));
        assert_eq!(*inst.cost(1, 3), q(2, 1));
        assert_eq!(*inst.cost(2, 1), q(2, 1));
        assert_eq!(*inst.cost(2, 3), q(1, 1));
        assert_eq!(*inst.cost(3, 1), q(1, 1));
        assert_eq!(*inst.cost(3, 2), q(2, 1));
    }

    #[test]
    fn parse_accepts_wrapped_matrix_rows() {
        let text = "TYPE : ATSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EXPLICIT\n\
                    EDGE_WEIGHT_FORMAT : FULL_MATRIX\nEDGE_WEIGHT_SECTION :\n0 1 2 2\n0 1 1 2 0\n";
        let inst: AtspInstance<Q> = parse_tsplib(text).unwrap();
        assert_eq!(*inst.cost(3, 2), q(2, 1));
    }

    #[test]
    fn parse_dimension_mismatch() {
        let text = "TYPE: ATSP\nDIMENSION: 4\nEDGE_WEIGHT_TYPE: EXPLICIT\n\
                    EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n0 1 2 3\n1 0 2 3\n1 2 0 3\nEOF\n";
        let e = parse_tsplib::<Q>(text).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 9, .. }), "{e}");
        assert!(e.to_string().contains("dimension mismatch"));
    }

    #[test]
    fn parse_non_numeric_names_line() {
        let text = "TYPE: ATSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\n\
                    EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n0 1 2\n2 x 1\n1 2 0\n";
        let e = parse_tsplib::<Q>(text).unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 7,
                msg: "non-numeric weight \"x\"".into()
            }
        );
    }

    #[test]
    fn parse_rejects_bad_headers() {
        let geo = "TYPE: ATSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EUC_2D\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n";
        assert!(matches!(parse_tsplib::<Q>(geo), Err(Error::Parse { line: 5, .. })));
        let tsp = "TYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n";
        assert!(parse_tsplib::<Q>(tsp).is_err());
        let junk = "TYPE ATSP\n";
        assert!(matches!(parse_tsplib::<Q>(junk), Err(Error::Parse { line: 1, .. })));
        let dim = "DIMENSION: three\n";
        assert!(matches!(parse_tsplib::<Q>(dim), Err(Error::Parse { line: 1, .. })));
        let too_many = "TYPE: ATSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\n\
                        EDGE_WEIGHT_SECTION\n0 1 2\n2 0 1\n1 2 0 9\n";
        assert!(matches!(parse_tsplib::<Q>(too_many), Err(Error::Parse { line: 8, .. })));
    }

    #[test]
    fn tour_points() {
        let p: FractionalPoint<Q> = point_from_tour(&Tour::new(vec![1, 2, 3]).unwrap(), 3).unwrap();
        for (i, j) in arcs(3) {
            let expect = matches!((i, j), (1, 2) | (2, 3) | (3, 1));
            assert_eq!(p.get(i, j).is_one(), expect, "({i},{j})");
        }
        let p: FractionalPoint<Q> = point_from_tour(&Tour::new(vec![1, 3, 2]).unwrap(), 3).unwrap();
        assert!(p.get(1, 3).is_one() && p.get(3, 2).is_one() && p.get(2, 1).is_one());
        assert_eq!(sum(p.rows().iter().flatten()), q(3, 1));
        assert!(point_from_tour::<Q>(&Tour::identity(3), 4).is_err());
    }

    #[test]
    fn arc_indexing_matches_arc_order() {
        for (k, (i, j)) in arcs(5).enumerate() {
            assert_eq!(arc_index(5, i, j), k);
        }
        let vals: Vec<Q> = (0..12).map(|k| q(k, 12)).collect();
        let p = FractionalPoint::from_arc_values(4, &vals).unwrap();
        assert_eq!(*p.get(2, 1), q(3, 12));
        assert!(FractionalPoint::<Q>::from_arc_values(4, &vals[1..]).is_err());
    }

    #[test]
    fn tour_validation() {
        assert!(Tour::new(vec![2, 1, 3]).is_err());
        assert!(Tour::new(vec![1, 2, 2]).is_err());
        assert!(Tour::new(vec![1, 2, 4]).is_err());
        assert_eq!(Tour::new(vec![1, 3, 2]).unwrap().visit_order(), vec![0, 2, 1]);
    }

    #[test]
    fn half_half_combination() {
        let p = half_half();
        let half = q(1, 2);
        for (i, j) in [(1, 2), (2, 3), (1, 3), (3, 2), (2, 4), (3, 4)] {
            assert_eq!(*p.get(i, j), half, "({i},{j})");
        }
        assert!(p.get(4, 1).is_one());
        for (i, j) in [(2, 1), (3, 1), (1, 4), (4, 2), (4, 3)] {
            assert!(p.get(i, j).is_zero());
        }
        assert!(check_degrees(&p));
    }

    #[test]
    fn combination_identity_and_bad_weights() {
        let t: FractionalPoint<Q> = point_from_tour(&Tour::identity(4), 4).unwrap();
        assert_eq!(convex_combination(std::slice::from_ref(&t), &[q(1, 1)]).unwrap(), t);
        let e = convex_combination(&[t.clone(), t.clone()], &[q(3, 5), q(3, 5)]).unwrap_err();
        assert!(matches!(e, Error::InvalidWeights(_)));
        assert!(convex_combination(&[t.clone(), t.clone()], &[q(3, 2), q(-1, 2)]).is_err());
        let tf: FractionalPoint<f64> = point_from_tour(&Tour::identity(4), 4).unwrap();
        assert!(convex_combination(&[tf.clone(), tf.clone()], &[0.6, 0.6]).is_err());
        assert!(convex_combination(&[tf.clone(), tf], &[0.3, 0.7]).is_ok());
    }

    #[test]
    fn degrees() {
        assert!(!check_degrees(&FractionalPoint::<Q>::zeros(4)));
        let p: FractionalPoint<Q> = point_from_tour(&Tour::new(vec![1, 3, 2]).unwrap(), 3).unwrap();
        assert!(check_degrees(&p));
    }

    #[test]
    fn point_validation() {
        assert!(FractionalPoint::<Q>::from_arcs(3, &[(1, 2, q(3, 2))]).is_err());
        assert!(FractionalPoint::<Q>::from_arcs(3, &[(1, 2, q(-1, 2))]).is_err());
        assert!(FractionalPoint::<Q>::new(vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(0, 1)]]).is_err());
        assert!(FractionalPoint::<Q>::new(vec![vec![q(0, 1)]; 3]).is_err());
    }

    #[test]
    fn random_points() {
        let p: FractionalPoint<Q> = random_dfj_point(5, 1, 7).unwrap();
        assert!(p.is_integral() && check_degrees(&p));
        let p: FractionalPoint<Q> = random_dfj_point(6, 4, 1).unwrap();
        assert!(check_degrees(&p));
        assert_eq!(p, random_dfj_point(6, 4, 1).unwrap());
        let f: FractionalPoint<f64> = random_dfj_point(6, 4, 1).unwrap();
        assert!(check_degrees(&f));
        for seed in 0..20 {
            assert!(check_degrees(&random_cycle_cover_point::<Q>(7, 3, seed).unwrap()));
            let s = random_subtour_point::<Q>(7, 2 + (seed as usize % 2), 2, seed).unwrap();
            assert!(check_degrees(&s));
        }
        assert!(random_subtour_point::<Q>(4, 3, 1, 0).is_err());
    }

    #[test]
    fn point_json_uses_fraction_strings() {
        let p = half_half();
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.starts_with("{\"n\":4,\"x\":[[\"0\",\"1/2\""), "{json}");
        let back: FractionalPoint<Q> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        let numeric: FractionalPoint<Q> = serde_json::from_str(r#"{"n":3,"x":[[0,1,0],[0,0,1],[1,0,0]]}"#).unwrap();
        assert!(check_degrees(&numeric));
        assert!(serde_json::from_str::<FractionalPoint<Q>>(r#"{"n":2,"x":[[0,1,0],[0,0,1],[1,0,0]]}"#).is_err());
    }
}
