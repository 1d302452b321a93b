//! Dense two-phase primal simplex with Bland's pivoting rule.
//!
//! Models are minimizations over `num_vars` variables with per-variable bounds and
//! `<=`, `=`, `>=` rows. Internally every variable becomes nonnegative (shifted,
//! negated, or split into a difference), equalities become a `<=`/`>=` pair, and
//! finite upper bounds become rows. The tableau is dense; row updates skip zeros.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Pivot magnitudes below this raise the conditioning flag in floating-point mode.
pub const SMALL_PIVOT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<S> {
    pub coeffs: Vec<S>,
    pub relation: Relation,
    pub rhs: S,
}

/// Variable bounds; `None` is infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Bound<S> {
    pub lower: Option<S>,
    pub upper: Option<S>,
}

impl<S: Scalar> Bound<S> {
    pub fn nonnegative() -> Self {
        Self {
            lower: Some(S::zero()),
            upper: None,
        }
    }

    pub fn free() -> Self {
        Self {
            lower: None,
            upper: None,
        }
    }

    pub fn between(lower: S, upper: S) -> Self {
        Self {
            lower: Some(lower),
            upper: Some(upper),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpModel<S> {
    num_vars: usize,
    objective: Vec<S>,
    constraints: Vec<Constraint<S>>,
    bounds: Vec<Bound<S>>,
}

impl<S: Scalar> LpModel<S> {
    /// Minimize `objective . x` with every variable in `[0, +inf)` and no rows.
    pub fn new(objective: Vec<S>) -> Self {
        let num_vars = objective.len();
        Self {
            num_vars,
            objective,
            constraints: Vec::new(),
            bounds: vec![Bound::nonnegative(); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn objective(&self) -> &[S] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint<S>] {
        &self.constraints
    }

    pub fn bounds(&self) -> &[Bound<S>] {
        &self.bounds
    }

    pub fn set_bounds(&mut self, var: usize, bound: Bound<S>) -> Result<()> {
        if var >= self.num_vars {
            return Err(Error::InvalidModel(format!("variable {var} out of range")));
        }
        if let (Some(l), Some(u)) = (&bound.lower, &bound.upper) {
            if l > u {
                return Err(Error::InvalidModel(format!(
                    "variable {var}: lower {} above upper {}",
                    l.render(),
                    u.render()
                )));
            }
        }
        self.bounds[var] = bound;
        Ok(())
    }

    /// Appends a row; duplicates are kept.
    pub fn add_constraint(&mut self, coeffs: Vec<S>, relation: Relation, rhs: S) -> Result<()> {
        if coeffs.len() != self.num_vars {
            return Err(Error::InvalidModel(format!(
                "row has {} coefficients, model has {} variables",
                coeffs.len(),
                self.num_vars
            )));
        }
        self.constraints.push(Constraint { coeffs, relation, rhs });
        Ok(())
    }

    /// Largest amount by which `x` breaks a row or a bound (zero when feasible).
    pub fn max_violation(&self, x: &[S]) -> S {
        let mut worst = S::zero();
        let mut bump = |v: S| {
            if v > worst {
                worst = v;
            }
        };
        for c in &self.constraints {
            let mut lhs = S::zero();
            for (a, v) in c.coeffs.iter().zip(x) {
                if !a.is_zero() {
                    let mut t = a.clone();
                    t *= v;
                    lhs += &t;
                }
            }
            let mut over = lhs.clone();
            over -= &c.rhs;
            match c.relation {
                Relation::Le => bump(over),
                Relation::Ge => bump(-over),
                Relation::Eq => bump(over.abs()),
            }
        }
        for (b, v) in self.bounds.iter().zip(x) {
            if let Some(l) = &b.lower {
                let mut d = l.clone();
                d -= v;
                bump(d);
            }
            if let Some(u) = &b.upper {
                let mut d = v.clone();
                d -= u;
                bump(d);
            }
        }
        worst
    }

    pub fn objective_value(&self, x: &[S]) -> S {
        let mut acc = S::zero();
        for (c, v) in self.objective.iter().zip(x) {
            let mut t = c.clone();
            t *= v;
            acc += &t;
        }
        acc
    }
}

/// Returns a copy of `m` with one more row; `m` is left untouched.
pub fn lp_add_constraint<S: Scalar>(m: &LpModel<S>, row: Constraint<S>) -> Result<LpModel<S>> {
    let mut out = m.clone();
    out.add_constraint(row.coeffs, row.relation, row.rhs)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S> {
    pub status: LpStatus,
    /// Optimal objective; zero unless `status` is `Optimal`.
    pub objective_value: S,
    /// Optimal point in the model's variables; empty unless `status` is `Optimal`.
    pub primal: Vec<S>,
    /// Set when a float pivot fell below [`SMALL_PIVOT`] in magnitude.
    pub conditioning_warning: bool,
    pub pivots: usize,
}

impl<S: Scalar> LpSolution<S> {
    fn without_point(status: LpStatus, conditioning_warning: bool, pivots: usize) -> Self {
        Self {
            status,
            objective_value: S::zero(),
            primal: Vec::new(),
            conditioning_warning,
            pivots,
        }
    }
}

/// How an original variable is expressed through nonnegative tableau columns.
#[derive(Debug, Clone)]
enum VarMap<S> {
    /// `x = lower + col`
    Shift { col: usize, lower: S },
    /// `x = upper - col`
    Negate { col: usize, upper: S },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    /// Reduced-cost row; the last entry holds minus the current objective.
    z: Vec<S>,
    basis: Vec<usize>,
    width: usize,
    pivots: usize,
    small_pivot: bool,
}

impl<S: Scalar> Tableau<S> {
    fn rhs(&self, r: usize) -> &S {
        &self.rows[r][self.width]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        self.pivots += 1;
        let p = self.rows[pr][pc].clone();
        if !S::EXACT && p.abs().to_f64() < SMALL_PIVOT {
            self.small_pivot = true;
        }
        let mut nz: Vec<(usize, S)> = Vec::new();
        for (c, v) in self.rows[pr].iter_mut().enumerate() {
            if !v.is_zero() {
                *v /= &p;
                nz.push((c, v.clone()));
            }
        }
        let eliminate = |row: &mut Vec<S>| {
            let f = row[pc].clone();
            if f.is_zero() {
                return;
            }
            for (c, v) in &nz {
                row[*c].sub_mul_assign(&f, v);
            }
            if !S::EXACT {
                row[pc] = S::zero();
            }
        };
        for (r, row) in self.rows.iter_mut().enumerate() {
            if r != pr {
                eliminate(row);
            }
        }
        eliminate(&mut self.z);
        self.basis[pr] = pc;
    }

    /// Bland's rule: lowest-index column with negative reduced cost.
    fn entering(&self, limit: usize) -> Option<usize> {
        (0..limit).find(|&c| self.z[c].is_neg_tol())
    }

    /// Minimum-ratio row for column `c`; ties go to the lowest basic index.
    fn leaving(&self, c: usize) -> Option<usize> {
        let mut best: Option<(usize, S)> = None;
        for (r, row) in self.rows.iter().enumerate() {
            let a = &row[c];
            if !a.is_pos_tol() {
                continue;
            }
            let mut ratio = self.rhs(r).clone();
            ratio /= a;
            best = match best {
                None => Some((r, ratio)),
                Some((br, bv)) => {
                    let mut diff = ratio.clone();
                    diff -= &bv;
                    if diff.is_neg_tol() || (!diff.is_pos_tol() && self.basis[r] < self.basis[br]) {
                        Some((r, ratio))
                    } else {
                        Some((br, bv))
                    }
                }
            };
        }
        best.map(|(r, _)| r)
    }

    /// Runs simplex iterations over columns `0..limit`. Returns false on an unbounded ray.
    fn optimize(&mut self, limit: usize) -> bool {
        while let Some(c) = self.entering(limit) {
            match self.leaving(c) {
                Some(r) => self.pivot(r, c),
                None => return false,
            }
        }
        true
    }
}

/// Solves `m` to optimality or reports infeasibility/unboundedness.
pub fn lp_solve<S: Scalar>(m: &LpModel<S>) -> LpSolution<S> {
    // Map variables onto nonnegative columns.
    let mut maps = Vec::with_capacity(m.num_vars);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(usize, S)> = Vec::new();
    for b in &m.bounds {
        let map = match (&b.lower, &b.upper) {
            (Some(l), upper) => {
                let col = ncols;
                ncols += 1;
                if let Some(u) = upper {
                    let mut span = u.clone();
                    span -= l;
                    bound_rows.push((col, span));
                }
                VarMap::Shift { col, lower: l.clone() }
            }
            (None, Some(u)) => {
                ncols += 1;
                VarMap::Negate {
                    col: ncols - 1,
                    upper: u.clone(),
                }
            }
            (None, None) => {
                ncols += 2;
                VarMap::Split {
                    pos: ncols - 2,
                    neg: ncols - 1,
                }
            }
        };
        maps.push(map);
    }
    let nstd = ncols;

    let translate = |coeffs: &[S], rhs: &mut S| -> Vec<S> {
        let mut out = vec![S::zero(); nstd];
        for (a, map) in coeffs.iter().zip(&maps) {
            if a.is_zero() {
                continue;
            }
            match map {
                VarMap::Shift { col, lower } => {
                    out[*col] += a;
                    rhs.sub_mul_assign(a, lower);
                }
                VarMap::Negate { col, upper } => {
                    out[*col] -= a;
                    rhs.sub_mul_assign(a, upper);
                }
                VarMap::Split { pos, neg } => {
                    out[*pos] += a;
                    out[*neg] -= a;
                }
            }
        }
        out
    };

    // Rows in standard columns, all as <= or >=.
    let mut std_rows: Vec<(Vec<S>, Relation, S)> = Vec::new();
    for c in &m.constraints {
        let mut rhs = c.rhs.clone();
        let coeffs = translate(&c.coeffs, &mut rhs);
        match c.relation {
            Relation::Eq => {
                std_rows.push((coeffs.clone(), Relation::Le, rhs.clone()));
                std_rows.push((coeffs, Relation::Ge, rhs));
            }
            rel => std_rows.push((coeffs, rel, rhs)),
        }
    }
    for (col, span) in bound_rows {
        let mut coeffs = vec![S::zero(); nstd];
        coeffs[col] = S::one();
        std_rows.push((coeffs, Relation::Le, span));
    }

    // Normalize to nonnegative right-hand sides.
    for (coeffs, rel, rhs) in std_rows.iter_mut() {
        let flip = rhs.is_negative() || (rhs.is_zero() && *rel == Relation::Ge);
        if flip {
            for a in coeffs.iter_mut() {
                *a = -a.clone();
            }
            *rhs = -rhs.clone();
            *rel = if *rel == Relation::Le {
                Relation::Ge
            } else {
                Relation::Le
            };
        }
    }

    let nrows = std_rows.len();
    let num_art = std_rows.iter().filter(|r| r.1 == Relation::Ge).count();
    let slack_start = nstd;
    let art_start = nstd + nrows;
    let width = art_start + num_art;

    let mut rows = Vec::with_capacity(nrows);
    let mut basis = Vec::with_capacity(nrows);
    let mut next_art = art_start;
    for (r, (coeffs, rel, rhs)) in std_rows.into_iter().enumerate() {
        let mut row = coeffs;
        row.resize(width + 1, S::zero());
        row[width] = rhs;
        match rel {
            Relation::Le => {
                row[slack_start + r] = S::one();
                basis.push(slack_start + r);
            }
            _ => {
                row[slack_start + r] = -S::one();
                row[next_art] = S::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
    }

    // Phase 1: minimize the sum of artificials.
    let mut z = vec![S::zero(); width + 1];
    for c in art_start..width {
        z[c] = S::one();
    }
    for (row, &b) in rows.iter().zip(&basis) {
        if b >= art_start {
            for (zc, v) in z.iter_mut().zip(row) {
                *zc -= v;
            }
        }
    }
    let mut t = Tableau {
        rows,
        z,
        basis,
        width,
        pivots: 0,
        small_pivot: false,
    };
    if num_art > 0 {
        t.optimize(width);
        let infeasibility = -t.z[width].clone();
        if infeasibility.is_pos_tol() {
            return LpSolution::without_point(LpStatus::Infeasible, t.small_pivot, t.pivots);
        }
        // Drive zero-level artificials out of the basis; rows where that is impossible are redundant.
        let mut redundant = Vec::new();
        for r in 0..t.rows.len() {
            if t.basis[r] < art_start {
                continue;
            }
            match (0..art_start).find(|&c| t.rows[r][c].abs().is_pos_tol()) {
                Some(c) => t.pivot(r, c),
                None => redundant.push(r),
            }
        }
        for r in redundant.into_iter().rev() {
            t.rows.remove(r);
            t.basis.remove(r);
        }
        for row in t.rows.iter_mut() {
            row.drain(art_start..width);
        }
        t.width = art_start;
    }

    // Phase 2 with the real objective.
    let width = t.width;
    let mut costs = vec![S::zero(); width + 1];
    let mut obj_offset = S::zero();
    for (c, map) in m.objective.iter().zip(&maps) {
        match map {
            VarMap::Shift { col, lower } => {
                costs[*col] += c;
                let mut o = c.clone();
                o *= lower;
                obj_offset += &o;
            }
            VarMap::Negate { col, upper } => {
                costs[*col] -= c;
                let mut o = c.clone();
                o *= upper;
                obj_offset += &o;
            }
            VarMap::Split { pos, neg } => {
                costs[*pos] += c;
                costs[*neg] -= c;
            }
        }
    }
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        let cb = costs[b].clone();
        if cb.is_zero() {
            continue;
        }
        for (zc, v) in costs.iter_mut().zip(row) {
            zc.sub_mul_assign(&cb, v);
        }
    }
    t.z = costs;
    if !t.optimize(width) {
        return LpSolution::without_point(LpStatus::Unbounded, t.small_pivot, t.pivots);
    }

    let mut std_vals = vec![S::zero(); width];
    for (r, &b) in t.basis.iter().enumerate() {
        std_vals[b] = t.rhs(r).clone();
    }
    let primal: Vec<S> = maps
        .iter()
        .map(|map| match map {
            VarMap::Shift { col, lower } => {
                let mut v = lower.clone();
                v += &std_vals[*col];
                v
            }
            VarMap::Negate { col, upper } => {
                let mut v = upper.clone();
                v -= &std_vals[*col];
                v
            }
            VarMap::Split { pos, neg } => {
                let mut v = std_vals[*pos].clone();
                v -= &std_vals[*neg];
                v
            }
        })
        .collect();
    let objective_value = m.objective_value(&primal);
    debug_assert!(objective_value.approx_eq(&{
        let mut v = -t.z[width].clone();
        v += &obj_offset;
        v
    }));
    LpSolution {
        status: LpStatus::Optimal,
        objective_value,
        primal,
        conditioning_warning: t.small_pivot,
        pivots: t.pivots,
    }
}
