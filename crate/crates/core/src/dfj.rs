//! Subtour elimination constraints `sum_{i,j in Q} x_ij <= |Q| - 1` for `Q ⊆ {2..n}`.
//!
//! Evaluation, exhaustive checking, exact separation by minimum cuts, the cutting-plane
//! LP bound, and a brute-force integer optimum for small instances.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::max_flow;
use crate::instance::{arc_index, arcs, check_degrees, AtspInstance, FractionalPoint, Tour};
use crate::lp::{lp_solve, Bound, Constraint, LpModel, LpStatus, Relation};
use crate::scalar::Scalar;

/// Largest `n` accepted by [`dfj_check_enumerate`].
pub const MAX_ENUMERATE_N: usize = 20;
/// Largest `n` accepted by [`brute_force_optimum`].
pub const MAX_BRUTE_FORCE_N: usize = 10;

/// A node set `Q ⊆ {2..n}` whose subtour constraint is violated by some point.
#[derive(Debug, Clone, PartialEq)]
pub struct CutCertificate<S> {
    q: Vec<usize>,
    lhs: S,
    violation: S,
}

impl<S: Scalar> CutCertificate<S> {
    /// Evaluates `q` on `p`; fails unless the constraint is violated (beyond tolerance).
    pub fn for_set(p: &FractionalPoint<S>, q: &[usize]) -> Result<Self> {
        let mut q = q.to_vec();
        q.sort_unstable();
        let lhs = dfj_lhs(p, &q)?;
        let mut violation = lhs.clone();
        violation -= &S::from_usize(q.len() - 1);
        if !violation.is_pos_tol() {
            return Err(Error::Domain(format!(
                "Q = {q:?} is not violated (lhs {}, bound {})",
                lhs.render(),
                q.len() - 1
            )));
        }
        Ok(Self { q, lhs, violation })
    }

    /// Sorted node set.
    pub fn q(&self) -> &[usize] {
        &self.q
    }

    pub fn lhs(&self) -> &S {
        &self.lhs
    }

    pub fn violation(&self) -> &S {
        &self.violation
    }

    /// Coefficient row of this cut over the `n(n-1)` arc variables.
    pub fn row(&self, n: usize) -> Constraint<S> {
        subtour_row(n, &self.q)
    }
}

impl<S: Scalar> std::fmt::Display for CutCertificate<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Q={{{}}} lhs {} violation {}",
            self.q.iter().join(","),
            self.lhs.render(),
            self.violation.render()
        )
    }
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    q: Vec<usize>,
    lhs: String,
    violation: String,
}

impl<S: Scalar> Serialize for CutCertificate<S> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        CertificateJson {
            q: self.q.clone(),
            lhs: self.lhs.render(),
            violation: self.violation.render(),
        }
        .serialize(s)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for CutCertificate<S> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = CertificateJson::deserialize(d)?;
        let parse = |s: &str| S::parse_scalar(s).ok_or_else(|| D::Error::custom(format!("bad scalar {s:?}")));
        Ok(Self {
            q: raw.q,
            lhs: parse(&raw.lhs)?,
            violation: parse(&raw.violation)?,
        })
    }
}

fn validate_set(n: usize, q: &[usize]) -> Result<()> {
    if q.len() < 2 {
        return Err(Error::Domain(format!("|Q| must be at least 2, got {q:?}")));
    }
    if q.contains(&1) {
        return Err(Error::Domain(format!("Q must exclude node 1, got {q:?}")));
    }
    if let Some(v) = q.iter().find(|&&v| v == 0 || v > n) {
        return Err(Error::Domain(format!("node {v} outside 1..={n}")));
    }
    if q.iter().duplicates().next().is_some() {
        return Err(Error::Domain(format!("Q has repeated nodes: {q:?}")));
    }
    Ok(())
}

/// `sum_{i in Q} sum_{j in Q} x_ij`.
pub fn dfj_lhs<S: Scalar>(p: &FractionalPoint<S>, q: &[usize]) -> Result<S> {
    validate_set(p.n(), q)?;
    let mut acc = S::zero();
    for &i in q {
        for &j in q {
            if i != j {
                acc += p.get(i, j);
            }
        }
    }
    Ok(acc)
}

/// The row `sum_{i,j in Q} x_ij <= |Q| - 1` over arc variables.
pub fn subtour_row<S: Scalar>(n: usize, q: &[usize]) -> Constraint<S> {
    let mut coeffs = vec![S::zero(); n * (n - 1)];
    for &i in q {
        for &j in q {
            if i != j {
                coeffs[arc_index(n, i, j)] = S::one();
            }
        }
    }
    Constraint {
        coeffs,
        relation: Relation::Le,
        rhs: S::from_usize(q.len() - 1),
    }
}

/// Checks every `Q ⊆ {2..n}` with `|Q| >= 2`.
///
/// Returns a most violated set; ties go to the smaller set, then the lexicographically
/// smaller sorted node list.
pub fn dfj_check_enumerate<S: Scalar>(p: &FractionalPoint<S>) -> Result<Option<CutCertificate<S>>> {
    let n = p.n();
    if n > MAX_ENUMERATE_N {
        return Err(Error::TooLarge {
            what: "dfj_check_enumerate",
            n,
            max: MAX_ENUMERATE_N,
        });
    }
    // Bit b of a mask stands for node b + 2. lhs[mask] = lhs[mask minus lowest] + arcs touching lowest.
    let m = n - 1;
    let mut lhs: Vec<S> = Vec::with_capacity(1 << m);
    lhs.push(S::zero());
    let mut best: Option<(S, Vec<usize>)> = None;
    for mask in 1usize..(1 << m) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut value = lhs[rest].clone();
        let v = low + 2;
        let mut bits = rest;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            value += p.get(v, b + 2);
            value += p.get(b + 2, v);
        }
        let size = mask.count_ones() as usize;
        if size >= 2 {
            let mut violation = value.clone();
            violation -= &S::from_usize(size - 1);
            if violation.is_pos_tol() {
                let nodes: Vec<usize> = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| b + 2).collect();
                let better = match &best {
                    None => true,
                    Some((bv, bq)) => {
                        let mut d = violation.clone();
                        d -= bv;
                        d.is_pos_tol() || (!d.is_neg_tol() && (nodes.len(), &nodes) < (bq.len(), bq))
                    }
                };
                if better {
                    best = Some((violation, nodes));
                }
            }
        }
        lhs.push(value);
    }
    best.map(|(_, q)| CutCertificate::for_set(p, &q)).transpose()
}

/// Exact separation by minimum `1 -> k` cuts for `k = 2..n`.
///
/// For a degree-feasible point, `sum_{i,j in Q} x_ij = |Q| - x(δ⁻(Q))`, so `Q` is violated
/// exactly when less than one unit of `x` enters it. The sink side of the first cut below
/// one (scanning `k` upward) is returned.
pub fn separation_mincut<S: Scalar>(p: &FractionalPoint<S>) -> Result<Option<CutCertificate<S>>> {
    if !check_degrees(p) {
        return Err(Error::Precondition(
            "separation_mincut needs a degree-feasible point".into(),
        ));
    }
    let n = p.n();
    let cap = p.rows();
    let mut threshold = S::one();
    threshold -= &S::tolerance();
    for sink in 1..n {
        let cut = max_flow(cap, 0, sink);
        if cut.value < threshold {
            let q: Vec<usize> = (0..n).filter(|&v| !cut.source_side[v]).map(|v| v + 1).collect();
            return CutCertificate::for_set(p, &q).map(Some);
        }
    }
    Ok(None)
}

/// Result of [`dfj_lp_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct DfjBound<S> {
    pub value: S,
    pub point: FractionalPoint<S>,
    /// Cuts in the order they were added.
    pub cuts: Vec<CutCertificate<S>>,
    /// LP value after each solve, starting with the degree-only relaxation.
    pub history: Vec<S>,
}

/// Assignment relaxation: degree equalities and `0 <= x <= 1` over arc variables.
pub fn dfj_base_model<S: Scalar>(inst: &AtspInstance<S>) -> LpModel<S> {
    let n = inst.n();
    let objective: Vec<S> = arcs(n).map(|(i, j)| inst.cost(i, j).clone()).collect();
    let mut m = LpModel::new(objective);
    add_degree_rows(&mut m, n, 0);
    for var in 0..n * (n - 1) {
        m.set_bounds(var, Bound::between(S::zero(), S::one()))
            .expect("valid bounds");
    }
    m
}

/// Adds `sum_j x_ij = 1` and `sum_i x_ij = 1` for arc variables starting at column `offset`.
pub(crate) fn add_degree_rows<S: Scalar>(m: &mut LpModel<S>, n: usize, offset: usize) {
    let width = m.num_vars();
    for v in 1..=n {
        let mut out = vec![S::zero(); width];
        let mut inc = vec![S::zero(); width];
        for w in (1..=n).filter(|&w| w != v) {
            out[offset + arc_index(n, v, w)] = S::one();
            inc[offset + arc_index(n, w, v)] = S::one();
        }
        m.add_constraint(out, Relation::Eq, S::one())
            .expect("row width matches");
        m.add_constraint(inc, Relation::Eq, S::one())
            .expect("row width matches");
    }
}

fn solve_point<S: Scalar>(m: &LpModel<S>, n: usize) -> Result<(S, FractionalPoint<S>, Vec<S>)> {
    let sol = lp_solve(m);
    if sol.status != LpStatus::Optimal {
        return Err(Error::UnexpectedLpStatus(format!("{:?}", sol.status)));
    }
    let point = FractionalPoint::from_arc_values(n, &sol.primal[..n * (n - 1)])?;
    Ok((sol.objective_value, point, sol.primal))
}

/// DFJ LP bound by cutting planes: start from the assignment relaxation and add the cut
/// from [`separation_mincut`] until none is violated. Each solve starts from scratch.
pub fn dfj_lp_bound<S: Scalar>(inst: &AtspInstance<S>) -> Result<DfjBound<S>> {
    let n = inst.n();
    let mut model = dfj_base_model(inst);
    let mut cuts: Vec<CutCertificate<S>> = Vec::new();
    let mut history = Vec::new();
    loop {
        let (value, point, _) = solve_point(&model, n)?;
        history.push(value.clone());
        match separation_mincut(&point)? {
            None => {
                return Ok(DfjBound {
                    value,
                    point,
                    cuts,
                    history,
                })
            }
            Some(cut) => {
                if cuts.iter().any(|c| c.q() == cut.q()) {
                    return Err(Error::Domain(format!("separation repeated cut {:?}", cut.q())));
                }
                let row = cut.row(n);
                model.add_constraint(row.coeffs, row.relation, row.rhs)?;
                cuts.push(cut);
            }
        }
    }
}

/// Cheapest tour by enumerating all `(n-1)!` orders; ties go to the lexicographically
/// smallest order.
pub fn brute_force_optimum<S: Scalar>(inst: &AtspInstance<S>) -> Result<(S, Tour)> {
    let n = inst.n();
    if n > MAX_BRUTE_FORCE_N {
        return Err(Error::TooLarge {
            what: "brute_force_optimum",
            n,
            max: MAX_BRUTE_FORCE_N,
        });
    }
    let mut best: Option<(S, Vec<usize>)> = None;
    for rest in (2..=n).permutations(n - 1) {
        let mut cost = inst.cost(1, rest[0]).clone();
        for w in rest.windows(2) {
            cost += inst.cost(w[0], w[1]);
        }
        cost += inst.cost(rest[n - 2], 1);
        let better = match &best {
            None => true,
            Some((bc, br)) => {
                let mut d = cost.clone();
                d -= bc;
                d.is_neg_tol() || (!d.is_pos_tol() && rest < *br)
            }
        };
        if better {
            best = Some((cost, rest));
        }
    }
    let (cost, rest) = best.expect("n >= 3 gives at least one tour");
    let mut order = vec![1];
    order.extend(rest);
    Ok((cost, Tour::new(order)?))
}
