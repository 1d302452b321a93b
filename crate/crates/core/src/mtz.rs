//! Node-order constraints `u_i - u_j + n x_ij <= n - 1`.
//!
//! The arc family is every `(i, j)` with `i != j` and `j != 1`. Arcs into node 1 are left
//! out: the closing arc of any tour would otherwise force `u_i - u_1 <= -1` around a cycle
//! through node 1, which no potentials satisfy. The `u` variables carry no bounds.

use serde::{Deserialize, Serialize};

use crate::dfj::add_degree_rows;
use crate::error::{Error, Result};
use crate::instance::{arc_index, arcs, AtspInstance, FractionalPoint, Tour};
use crate::lp::{lp_solve, Bound, LpModel, LpStatus, Relation};
use crate::scalar::Scalar;

/// Node potentials `u_1..u_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potentials<S> {
    u: Vec<S>,
}

impl<S: Scalar> Potentials<S> {
    pub fn new(u: Vec<S>) -> Self {
        Self { u }
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    /// `u_i`, 1-indexed.
    pub fn get(&self, i: usize) -> &S {
        &self.u[i - 1]
    }

    pub fn values(&self) -> &[S] {
        &self.u
    }

    /// `u = (0, 1, ..., n-1)` along the tour's visiting order.
    pub fn visit_order(t: &Tour) -> Self {
        Self {
            u: t.visit_order().into_iter().map(S::from_usize).collect(),
        }
    }

    /// Adds `delta` to every potential.
    pub fn translate(&self, delta: &S) -> Self {
        Self {
            u: self
                .u
                .iter()
                .map(|v| {
                    let mut w = v.clone();
                    w += delta;
                    w
                })
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PotentialsJson {
    u: Vec<String>,
}

#[derive(Deserialize)]
struct PotentialsIn {
    u: Vec<crate::instance::ScalarRepr>,
}

impl<S: Scalar> Serialize for Potentials<S> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        PotentialsJson {
            u: self.u.iter().map(Scalar::render).collect(),
        }
        .serialize(s)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Potentials<S> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PotentialsIn::deserialize(d)?;
        let u = raw
            .u
            .into_iter()
            .map(|v| v.into_scalar().ok_or_else(|| D::Error::custom("unparseable scalar")))
            .collect::<std::result::Result<Vec<S>, _>>()?;
        Ok(Self { u })
    }
}

/// A violated arc and its (negative) slack.
#[derive(Debug, Clone, PartialEq)]
pub struct MtzViolation<S> {
    pub i: usize,
    pub j: usize,
    pub slack: S,
}

/// True when `(i, j)` belongs to the constrained arc family.
pub fn in_arc_family(i: usize, j: usize) -> bool {
    i != j && j != 1
}

/// `(n-1) - (u_i - u_j + n x_ij)`; nonnegative exactly when the arc's constraint holds.
pub fn mtz_slack<S: Scalar>(p: &FractionalPoint<S>, u: &Potentials<S>, i: usize, j: usize) -> Result<S> {
    let n = p.n();
    if u.n() != n {
        return Err(Error::Domain(format!("{} potentials for {n} nodes", u.n())));
    }
    if i == 0 || j == 0 || i > n || j > n {
        return Err(Error::Domain(format!("arc ({i}, {j}) outside 1..={n}")));
    }
    if i == j {
        return Err(Error::Domain(format!("arc ({i}, {j}) is a loop")));
    }
    if j == 1 {
        return Err(Error::Domain(format!(
            "arc ({i}, 1) enters node 1; arcs into the root are excluded from the MTZ family"
        )));
    }
    Ok(slack_unchecked(p, u, i, j))
}

fn slack_unchecked<S: Scalar>(p: &FractionalPoint<S>, u: &Potentials<S>, i: usize, j: usize) -> S {
    let n = S::from_usize(p.n());
    let mut slack = n.clone();
    slack -= &S::one();
    slack -= u.get(i);
    slack += u.get(j);
    slack.sub_mul_assign(&n, p.get(i, j));
    slack
}

/// First violated arc in lexicographic order, if any.
pub fn mtz_check<S: Scalar>(p: &FractionalPoint<S>, u: &Potentials<S>) -> Result<Option<MtzViolation<S>>> {
    let n = p.n();
    if u.n() != n {
        return Err(Error::Domain(format!("{} potentials for {n} nodes", u.n())));
    }
    for (i, j) in arcs(n).filter(|&(i, j)| in_arc_family(i, j)) {
        let slack = slack_unchecked(p, u, i, j);
        if slack.is_neg_tol() {
            return Ok(Some(MtzViolation { i, j, slack }));
        }
    }
    Ok(None)
}

/// Result of [`mtz_lp_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct MtzBound<S> {
    pub value: S,
    pub point: FractionalPoint<S>,
    pub potentials: Potentials<S>,
}

/// MTZ relaxation: arc variables (first `n(n-1)` columns, in `[0, 1]`) then free `u_1..u_n`.
pub fn mtz_model<S: Scalar>(inst: &AtspInstance<S>) -> LpModel<S> {
    let n = inst.n();
    let num_arcs = n * (n - 1);
    let mut objective: Vec<S> = arcs(n).map(|(i, j)| inst.cost(i, j).clone()).collect();
    objective.extend((0..n).map(|_| S::zero()));
    let mut m = LpModel::new(objective);
    for var in 0..num_arcs {
        m.set_bounds(var, Bound::between(S::zero(), S::one()))
            .expect("valid bounds");
    }
    for v in 0..n {
        m.set_bounds(num_arcs + v, Bound::free()).expect("valid bounds");
    }
    add_degree_rows(&mut m, n, 0);
    let n_s = S::from_usize(n);
    let mut rhs = n_s.clone();
    rhs -= &S::one();
    for (i, j) in arcs(n).filter(|&(i, j)| in_arc_family(i, j)) {
        let mut row = vec![S::zero(); num_arcs + n];
        row[arc_index(n, i, j)] = n_s.clone();
        row[num_arcs + i - 1] = S::one();
        row[num_arcs + j - 1] = -S::one();
        m.add_constraint(row, Relation::Le, rhs.clone())
            .expect("row width matches");
    }
    m
}

/// Optimal value of the MTZ relaxation together with an optimal `(x, u)`.
pub fn mtz_lp_bound<S: Scalar>(inst: &AtspInstance<S>) -> Result<MtzBound<S>> {
    let n = inst.n();
    let num_arcs = n * (n - 1);
    let sol = lp_solve(&mtz_model(inst));
    if sol.status != LpStatus::Optimal {
        return Err(Error::UnexpectedLpStatus(format!("{:?}", sol.status)));
    }
    let point = FractionalPoint::from_arc_values(n, &sol.primal[..num_arcs])?;
    let potentials = Potentials::new(sol.primal[num_arcs..].to_vec());
    Ok(MtzBound {
        value: sol.objective_value,
        point,
        potentials,
    })
}
