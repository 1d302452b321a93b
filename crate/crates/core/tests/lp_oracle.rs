//! The simplex solver against vertex enumeration on small boxed LPs.

mod common;

use atsp_core::lp::{lp_solve, Bound, LpModel, LpStatus, Relation};
use atsp_core::{Rational, Scalar};
use common::{big, Big};
use itertools::Itertools;
use num::Zero;
use proptest::prelude::*;

type Q = Rational;

/// `a . x (rel) b` in big rationals.
struct Row {
    a: Vec<Big>,
    rel: Relation,
    b: Big,
}

fn holds(r: &Row, x: &[Big]) -> bool {
    let lhs: Big = r.a.iter().zip(x).map(|(a, x)| a * x).sum();
    match r.rel {
        Relation::Le => lhs <= r.b,
        Relation::Ge => lhs >= r.b,
        Relation::Eq => lhs == r.b,
    }
}

/// Unique solution of the square system `rows . x = b`, by Gauss-Jordan elimination.
fn solve_square(rows: &[&Row]) -> Option<Vec<Big>> {
    let n = rows.len();
    let mut m: Vec<Vec<Big>> = rows
        .iter()
        .map(|r| r.a.iter().cloned().chain([r.b.clone()]).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v = &*v / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..=n {
                    let t = &f * &m[col][c];
                    m[r][c] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Minimum of `c . x` over a bounded polyhedron, or `None` when it is empty.
fn vertex_optimum(c: &[Big], rows: &[Row]) -> Option<Big> {
    let nv = c.len();
    let mut best: Option<Big> = None;
    for subset in rows.iter().combinations(nv) {
        let Some(x) = solve_square(&subset) else { continue };
        if rows.iter().all(|r| holds(r, &x)) {
            let val: Big = c.iter().zip(&x).map(|(c, x)| c * x).sum();
            if best.as_ref().is_none_or(|b| val < *b) {
                best = Some(val);
            }
        }
    }
    best
}

fn relation(k: usize) -> Relation {
    [Relation::Le, Relation::Eq, Relation::Ge][k]
}

type RawRow = (Vec<(i64, i64)>, usize, i64);

fn raw_rows(nv: usize) -> impl Strategy<Value = Vec<RawRow>> {
    prop::collection::vec(
        (prop::collection::vec((-6i64..=6, 1i64..=3), nv), 0usize..3, -8i64..=8),
        0..5,
    )
}

fn check(obj: Vec<i64>, boxes: Vec<(i64, i64)>, raw: Vec<RawRow>) -> Result<(), TestCaseError> {
    let nv = obj.len();
    let mut m = LpModel::new(obj.iter().map(|&c| Q::from_i64(c)).collect());
    let mut rows = Vec::new();
    for (v, &(lo, width)) in boxes.iter().enumerate() {
        let (l, u) = (Q::from_i64(lo), Q::from_i64(lo + width));
        m.set_bounds(v, Bound::between(l.clone(), u.clone())).unwrap();
        let unit: Vec<Big> = (0..nv).map(|k| common::int((k == v) as i64)).collect();
        rows.push(Row {
            a: unit.clone(),
            rel: Relation::Ge,
            b: big(&l),
        });
        rows.push(Row {
            a: unit,
            rel: Relation::Le,
            b: big(&u),
        });
    }
    for (coeffs, rel, b) in &raw {
        let a: Vec<Q> = coeffs.iter().map(|&(p, q)| Q::from_ratio(p, q)).collect();
        rows.push(Row {
            a: a.iter().map(big).collect(),
            rel: relation(*rel),
            b: common::int(*b),
        });
        m.add_constraint(a, relation(*rel), Q::from_i64(*b)).unwrap();
    }
    let c: Vec<Big> = obj.iter().map(|&v| common::int(v)).collect();
    let sol = lp_solve(&m);
    match vertex_optimum(&c, &rows) {
        None => prop_assert_eq!(sol.status, LpStatus::Infeasible),
        Some(opt) => {
            prop_assert_eq!(sol.status, LpStatus::Optimal);
            prop_assert_eq!(big(&sol.objective_value), opt);
            prop_assert!(m.max_violation(&sol.primal).is_zero());
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_vertex_enumeration_2d(obj in prop::collection::vec(-5i64..=5, 2), boxes in prop::collection::vec((-4i64..=2, 0i64..=5), 2), raw in raw_rows(2)) {
        check(obj, boxes, raw)?;
    }

    #[test]
    fn matches_vertex_enumeration_3d(obj in prop::collection::vec(-5i64..=5, 3), boxes in prop::collection::vec((-4i64..=2, 0i64..=5), 3), raw in raw_rows(3)) {
        check(obj, boxes, raw)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn matches_vertex_enumeration_4d(obj in prop::collection::vec(-5i64..=5, 4), boxes in prop::collection::vec((-3i64..=1, 0i64..=4), 4), raw in raw_rows(4)) {
        check(obj, boxes, raw)?;
    }
}

#[test]
fn degenerate_vertex_with_many_active_rows() {
    // Five rows meet at (1, 1); the optimum sits there.
    let rows: [(&[i64], i64); 5] = [(&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 2), (&[2, 1], 3), (&[1, 2], 3)];
    let mut m = LpModel::new(vec![Q::from_i64(-1), Q::from_i64(-1)]);
    for (a, b) in rows {
        m.add_constraint(
            a.iter().map(|&v| Q::from_i64(v)).collect(),
            Relation::Le,
            Q::from_i64(b),
        )
        .unwrap();
    }
    let sol = lp_solve(&m);
    assert_eq!(sol.status, LpStatus::Optimal);
    assert_eq!(sol.objective_value, Q::from_i64(-2));
    assert_eq!(sol.primal, vec![Q::from_i64(1), Q::from_i64(1)]);
}
