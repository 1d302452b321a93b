//! Reference implementations used to check the library. They work on `BigRational`
//! and share no code with the crate beyond the data types they read.

#![allow(dead_code)]

use atsp_core::instance::{AtspInstance, FractionalPoint};
use atsp_core::Rational;
use num::{BigRational, One, Signed, Zero};

pub type Big = BigRational;

pub fn big(v: &Rational) -> Big {
    v.to_big()
}

pub fn int(v: i64) -> Big {
    Big::from_integer(v.into())
}

/// `x(i, j)` as a big rational, 1-indexed.
pub fn x(p: &FractionalPoint<Rational>, i: usize, j: usize) -> Big {
    big(p.get(i, j))
}

/// Sum of `x_ij` over ordered pairs inside `q`.
pub fn subset_lhs(p: &FractionalPoint<Rational>, q: &[usize]) -> Big {
    let mut total = Big::zero();
    for &i in q {
        for &j in q {
            if i != j {
                total += x(p, i, j);
            }
        }
    }
    total
}

/// Largest `lhs(Q) - (|Q| - 1)` over all `Q` in `{2..n}` with `|Q| >= 2`, by plain subset
/// enumeration, with one set achieving it.
pub fn max_subtour_violation(p: &FractionalPoint<Rational>) -> (Big, Vec<usize>) {
    let n = p.n();
    let others: Vec<usize> = (2..=n).collect();
    let mut best = (int(i64::MIN / 2), Vec::new());
    for mask in 1u32..(1 << others.len()) {
        if mask.count_ones() < 2 {
            continue;
        }
        let q: Vec<usize> = others
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let v = subset_lhs(p, &q) - int(q.len() as i64 - 1);
        if v > best.0 {
            best = (v, q);
        }
    }
    best
}

pub fn violates_dfj(p: &FractionalPoint<Rational>) -> bool {
    max_subtour_violation(p).0.is_positive()
}

pub fn degrees_ok(p: &FractionalPoint<Rational>) -> bool {
    let n = p.n();
    (1..=n).all(|v| {
        let out: Big = (1..=n).filter(|&w| w != v).map(|w| x(p, v, w)).sum();
        let inc: Big = (1..=n).filter(|&w| w != v).map(|w| x(p, w, v)).sum();
        out.is_one() && inc.is_one()
    })
}

/// Cheapest Hamiltonian cycle by depth-first search over partial paths from node 1.
pub fn cheapest_tour(inst: &AtspInstance<Rational>) -> Big {
    let n = inst.n();
    let c = |i: usize, j: usize| big(inst.cost(i, j));
    fn go(
        n: usize,
        c: &dyn Fn(usize, usize) -> Big,
        last: usize,
        used: &mut Vec<bool>,
        depth: usize,
        acc: Big,
        best: &mut Option<Big>,
    ) {
        if depth == n {
            let total = acc + c(last, 1);
            if best.as_ref().is_none_or(|b| total < *b) {
                *best = Some(total);
            }
            return;
        }
        for next in 2..=n {
            if !used[next] {
                used[next] = true;
                go(n, c, next, used, depth + 1, acc.clone() + c(last, next), best);
                used[next] = false;
            }
        }
    }
    let mut best = None;
    let mut used = vec![false; n + 1];
    used[1] = true;
    go(n, &c, 1, &mut used, 1, Big::zero(), &mut best);
    best.expect("n >= 2")
}

/// All-pairs shortest paths; `None` is unreachable. `weights[i][j]` is 0-indexed.
/// Returns `Err(())` when some node lies on a negative cycle.
pub fn floyd_warshall(weights: &[Vec<Option<Big>>]) -> Result<Vec<Vec<Option<Big>>>, ()> {
    let n = weights.len();
    let mut d: Vec<Vec<Option<Big>>> = weights.to_vec();
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(match row[i].take() {
            Some(w) if w.is_negative() => w,
            _ => Big::zero(),
        });
    }
    for k in 0..n {
        for i in 0..n {
            let Some(dik) = d[i][k].clone() else { continue };
            for j in 0..n {
                if let Some(dkj) = &d[k][j] {
                    let cand = &dik + dkj;
                    if d[i][j].as_ref().is_none_or(|cur| cand < *cur) {
                        d[i][j] = Some(cand);
                    }
                }
            }
        }
    }
    if (0..n).any(|i| d[i][i].as_ref().is_some_and(|v| v.is_negative())) {
        return Err(());
    }
    Ok(d)
}

/// Arc weights `(n-1) - n x_ij` of the lifting graph, without arcs into node 1.
pub fn lift_weight(p: &FractionalPoint<Rational>, i: usize, j: usize) -> Option<Big> {
    let n = p.n() as i64;
    (i != j && j != 1).then(|| int(n - 1) - int(n) * x(p, i, j))
}
