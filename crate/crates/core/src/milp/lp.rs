//! Dense-tableau bounded primal and dual simplex.
//!
//! Every row gets a slack (`<=`: `[0, inf)`, `>=`: `(-inf, 0]`, `=`: `[0, 0]`),
//! rows whose starting residual the slack cannot absorb get an artificial, and
//! a first phase minimizes the artificials. Columns with equal bounds are
//! substituted out before the tableau is built.

#![allow(clippy::needless_range_loop)]

use serde::{Deserialize, Serialize};

use super::Tolerances;
use crate::model::{Sense, SparseMip};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// One value per model column, including substituted ones.
    pub values: Vec<f64>,
    /// Objective including the model constant.
    pub objective: f64,
    pub iterations: usize,
}

/// Solves the continuous relaxation of `mip` under its own bounds.
pub fn solve_lp(mip: &SparseMip, tol: &Tolerances) -> LpSolution {
    let lower: Vec<f64> = mip.columns.iter().map(|c| c.lower).collect();
    let upper: Vec<f64> = mip.columns.iter().map(|c| c.upper).collect();
    solve_lp_with_bounds(mip, &lower, &upper, tol)
}

fn start_value(lo: f64, up: f64) -> f64 {
    if lo.is_finite() {
        lo
    } else if up.is_finite() {
        up
    } else {
        0.0
    }
}

/// Solves the continuous relaxation of `mip` with column bounds replaced by
/// `lower`/`upper`.
pub fn solve_lp_with_bounds(
    mip: &SparseMip,
    lower: &[f64],
    upper: &[f64],
    tol: &Tolerances,
) -> LpSolution {
    match Reduced::new(mip, lower, upper, tol) {
        Ok(reduced) => {
            let mut tableau = reduced.tableau(*tol);
            let status = tableau.solve();
            reduced.solution(mip, &tableau, status, lower, upper)
        }
        Err(values) => infeasible(mip, values),
    }
}

fn infeasible(mip: &SparseMip, values: Vec<f64>) -> LpSolution {
    LpSolution {
        objective: mip.objective_value(&values),
        status: LpStatus::Infeasible,
        values,
        iterations: 0,
    }
}

/// Sparse row entries with their sense and right-hand side.
type ReducedRow = (Vec<(usize, f64)>, Sense, f64);

/// The model with columns fixed by the bounds substituted out.
#[derive(Clone)]
struct Reduced {
    /// Model column of each tableau column.
    active: Vec<usize>,
    /// Values of all model columns, exact for the substituted ones.
    base: Vec<f64>,
    rows: Vec<ReducedRow>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    up: Vec<f64>,
}

impl Reduced {
    /// `Err` carries the starting values when the bounds alone are infeasible.
    fn new(
        mip: &SparseMip,
        lower: &[f64],
        upper: &[f64],
        tol: &Tolerances,
    ) -> Result<Self, Vec<f64>> {
        let ncols = mip.num_columns();
        let base: Vec<f64> = (0..ncols).map(|j| start_value(lower[j], upper[j])).collect();
        if (0..ncols).any(|j| lower[j] > upper[j] + tol.feasibility) {
            return Err(base);
        }
        let active: Vec<usize> = (0..ncols).filter(|&j| upper[j] - lower[j] > 1e-12).collect();
        let mut position = vec![usize::MAX; ncols];
        for (p, &j) in active.iter().enumerate() {
            position[j] = p;
        }
        let mut rows = Vec::with_capacity(mip.num_rows());
        for row in &mip.rows {
            let mut rhs = row.rhs;
            let mut coefs = Vec::with_capacity(row.coefs.len());
            for &(j, a) in &row.coefs {
                if position[j] == usize::MAX {
                    rhs -= a * base[j];
                } else {
                    coefs.push((position[j], a));
                }
            }
            if coefs.is_empty() {
                if row.sense.violation(0.0, rhs) > tol.feasibility {
                    return Err(base);
                }
                continue;
            }
            // Rows the column bounds already satisfy stay satisfied under any
            // tighter bounds.
            let (mut min, mut max) = (0.0, 0.0);
            for &(p, a) in &coefs {
                let (l, u) = (lower[active[p]], upper[active[p]]);
                let (lo_term, up_term) = if a > 0.0 { (a * l, a * u) } else { (a * u, a * l) };
                min += lo_term;
                max += up_term;
            }
            let redundant = match row.sense {
                Sense::Le => max <= rhs,
                Sense::Ge => min >= rhs,
                Sense::Eq => false,
            };
            if redundant {
                continue;
            }
            rows.push((coefs, row.sense, rhs));
        }
        Ok(Self {
            cost: active.iter().map(|&j| mip.columns[j].objective).collect(),
            lo: active.iter().map(|&j| lower[j]).collect(),
            up: active.iter().map(|&j| upper[j]).collect(),
            active,
            base,
            rows,
        })
    }

    fn tableau(&self, tol: Tolerances) -> Tableau {
        Tableau::new(&self.rows, &self.cost, &self.lo, &self.up, tol)
    }

    fn solution(
        &self,
        mip: &SparseMip,
        tableau: &Tableau,
        status: LpStatus,
        lower: &[f64],
        upper: &[f64],
    ) -> LpSolution {
        let mut values = self.base.clone();
        for (p, &j) in self.active.iter().enumerate() {
            values[j] = tableau.x[p].clamp(lower[j], upper[j]);
        }
        LpSolution {
            objective: mip.objective_value(&values),
            status,
            values,
            iterations: tableau.iterations,
        }
    }
}

/// An optimal tableau that can be re-optimized after bound changes with the
/// dual simplex. Bounds may only fix columns the root left free; columns fixed
/// at the root stay fixed.
#[derive(Clone)]
pub(crate) struct WarmLp<'a> {
    mip: &'a SparseMip,
    tol: Tolerances,
    reduced: Reduced,
    tableau: Tableau,
    /// Set after a failed re-optimization; later solves start from scratch.
    stale: bool,
}

impl<'a> WarmLp<'a> {
    /// Solves the relaxation under the given bounds. The warm state is only
    /// returned if that solve is optimal.
    pub(crate) fn new(
        mip: &'a SparseMip,
        lower: &[f64],
        upper: &[f64],
        tol: &Tolerances,
    ) -> (Option<Self>, LpSolution) {
        let reduced = match Reduced::new(mip, lower, upper, tol) {
            Ok(r) => r,
            Err(values) => return (None, infeasible(mip, values)),
        };
        let mut tableau = reduced.tableau(*tol);
        let status = tableau.solve();
        let solution = reduced.solution(mip, &tableau, status, lower, upper);
        let warm = (status == LpStatus::Optimal).then_some(Self {
            mip,
            tol: *tol,
            reduced,
            tableau,
            stale: false,
        });
        (warm, solution)
    }

    /// Re-optimizes under new bounds, starting from the current basis.
    pub(crate) fn resolve(&mut self, lower: &[f64], upper: &[f64]) -> LpSolution {
        if self.stale {
            return solve_lp_with_bounds(self.mip, lower, upper, &self.tol);
        }
        let feas = self.tol.feasibility;
        for (j, &v) in self.reduced.base.iter().enumerate() {
            let outside = !self.is_active(j) && (lower[j] > v + feas || upper[j] < v - feas);
            if lower[j] > upper[j] + feas || outside {
                return infeasible(self.mip, self.reduced.base.clone());
            }
        }
        let start = self.tableau.iterations;
        for (p, &j) in self.reduced.active.iter().enumerate() {
            self.tableau.set_bounds(p, lower[j], upper[j]);
        }
        let status = self.tableau.reoptimize();
        if status == LpStatus::IterationLimit {
            self.stale = true;
            let mut fresh = solve_lp_with_bounds(self.mip, lower, upper, &self.tol);
            fresh.iterations += self.tableau.iterations - start;
            return fresh;
        }
        let mut solution = self.reduced.solution(self.mip, &self.tableau, status, lower, upper);
        solution.iterations = self.tableau.iterations - start;
        solution
    }

    /// Reduced cost of every model column in objective units; zero for basic
    /// and substituted columns.
    pub(crate) fn reduced_costs(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.mip.num_columns()];
        for (p, &j) in self.reduced.active.iter().enumerate() {
            if self.tableau.basic_row[p].is_none() {
                d[j] = self.tableau.d[p] / self.tableau.scale;
            }
        }
        d
    }

    fn is_active(&self, j: usize) -> bool {
        self.reduced.active.binary_search(&j).is_ok()
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Phase {
    One,
    Two,
}

#[derive(Clone)]
struct Tableau {
    tol: Tolerances,
    m: usize,
    n: usize,
    /// Width: structurals then slacks.
    width: usize,
    t: Vec<f64>,
    /// Variable per basis row; artificials are `width + row`.
    basis: Vec<usize>,
    basic_row: Vec<Option<usize>>,
    x: Vec<f64>,
    lo: Vec<f64>,
    up: Vec<f64>,
    cost: Vec<f64>,
    phase_cost: Vec<f64>,
    d: Vec<f64>,
    art_sign: Vec<f64>,
    columns: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    /// Factor applied to the objective inside the tableau.
    scale: f64,
    iterations: usize,
    /// Iteration count when the current solve started.
    solve_start: usize,
    max_iterations: usize,
    degenerate_run: usize,
    bland: bool,
}

impl Tableau {
    fn new(
        rows: &[ReducedRow],
        cost: &[f64],
        lo: &[f64],
        up: &[f64],
        tol: Tolerances,
    ) -> Self {
        let m = rows.len();
        let n = cost.len();
        let width = n + m;
        let total = width + m;
        let scale = cost.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        let scale = if scale > 0.0 { 1.0 / scale } else { 1.0 };

        let mut columns = vec![Vec::new(); n];
        for (i, (coefs, _, _)) in rows.iter().enumerate() {
            for &(j, a) in coefs {
                columns[j].push((i, a));
            }
        }
        let mut x = vec![0.0; total];
        let mut vlo = vec![0.0; total];
        let mut vup = vec![0.0; total];
        let mut vcost = vec![0.0; total];
        for j in 0..n {
            vlo[j] = lo[j];
            vup[j] = up[j];
            x[j] = start_value(lo[j], up[j]);
            vcost[j] = cost[j] * scale;
        }
        let b: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let mut t = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let mut basic_row = vec![None; total];
        let mut art_sign = vec![1.0; m];
        for (i, (coefs, sense, rhs)) in rows.iter().enumerate() {
            let s = n + i;
            let (slo, sup) = match sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            vlo[s] = slo;
            vup[s] = sup;
            let residual = rhs - coefs.iter().map(|&(j, a)| a * x[j]).sum::<f64>();
            let art = width + i;
            let sign;
            if residual >= slo && residual <= sup {
                sign = 1.0;
                basis[i] = s;
                basic_row[s] = Some(i);
                x[s] = residual;
                vlo[art] = 0.0;
                vup[art] = 0.0;
            } else {
                sign = if residual >= 0.0 { 1.0 } else { -1.0 };
                art_sign[i] = sign;
                basis[i] = art;
                basic_row[art] = Some(i);
                x[s] = 0.0;
                x[art] = residual.abs();
                vlo[art] = 0.0;
                vup[art] = f64::INFINITY;
            }
            let row = &mut t[i * width..(i + 1) * width];
            for &(j, a) in coefs {
                row[j] = sign * a;
            }
            row[s] = sign;
        }
        let phase_cost = vec![0.0; total];
        Self {
            tol,
            m,
            n,
            width,
            t,
            basis,
            basic_row,
            x,
            lo: vlo,
            up: vup,
            cost: vcost,
            phase_cost,
            d: vec![0.0; width],
            art_sign,
            columns,
            b,
            scale,
            iterations: 0,
            solve_start: 0,
            max_iterations: 20_000 + 50 * (m + n),
            degenerate_run: 0,
            bland: false,
        }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.t[i * self.width..(i + 1) * self.width]
    }

    /// Tableau entry of variable `v` (artificials included) in row `i`.
    fn entry(&self, i: usize, v: usize) -> f64 {
        if v < self.width {
            self.t[i * self.width + v]
        } else {
            let k = v - self.width;
            self.art_sign[k] * self.t[i * self.width + self.n + k]
        }
    }

    fn is_artificial(&self, v: usize) -> bool {
        v >= self.width
    }

    /// Recomputes basic values from the nonbasic ones and reduced costs from
    /// the current basis inverse (held in the slack columns).
    fn refresh(&mut self) {
        let (m, n) = (self.m, self.n);
        let mut r = self.b.clone();
        for j in 0..n {
            if self.basic_row[j].is_none() && self.x[j] != 0.0 {
                for &(i, a) in &self.columns[j] {
                    r[i] -= a * self.x[j];
                }
            }
        }
        for i in 0..m {
            let s = n + i;
            if self.basic_row[s].is_none() {
                r[i] -= self.x[s];
            }
            let art = self.width + i;
            if self.basic_row[art].is_none() {
                r[i] -= self.art_sign[i] * self.x[art];
            }
        }
        let mut y = vec![0.0; m];
        for row in 0..m {
            let inv = &self.t[row * self.width + n..(row + 1) * self.width];
            let value: f64 = inv.iter().zip(&r).map(|(a, b)| a * b).sum();
            let v = self.basis[row];
            self.x[v] = value;
            let c = self.phase_cost[v];
            if c != 0.0 {
                for (yi, a) in y.iter_mut().zip(inv) {
                    *yi += c * a;
                }
            }
        }
        for j in 0..n {
            self.d[j] = if self.basic_row[j].is_some() {
                0.0
            } else {
                self.phase_cost[j] - self.columns[j].iter().map(|&(i, a)| y[i] * a).sum::<f64>()
            };
        }
        for i in 0..m {
            let s = n + i;
            self.d[s] = if self.basic_row[s].is_some() {
                0.0
            } else {
                self.phase_cost[s] - y[i]
            };
        }
    }

    fn set_phase(&mut self, phase: Phase) {
        for v in 0..self.phase_cost.len() {
            self.phase_cost[v] = match phase {
                Phase::One => {
                    if self.is_artificial(v) {
                        1.0
                    } else {
                        0.0
                    }
                }
                Phase::Two => {
                    if self.is_artificial(v) {
                        0.0
                    } else {
                        self.cost[v]
                    }
                }
            };
        }
        self.refresh();
    }

    fn artificial_sum(&self) -> f64 {
        (0..self.m).map(|i| self.x[self.width + i].abs()).sum()
    }

    fn solve(&mut self) -> LpStatus {
        let has_artificial = self.basis.iter().any(|&v| self.is_artificial(v));
        if has_artificial {
            self.set_phase(Phase::One);
            match self.iterate() {
                LpStatus::Optimal => {}
                LpStatus::Unbounded => return LpStatus::Infeasible,
                other => return other,
            }
            self.refresh();
            let scale = 1.0 + self.b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            if self.artificial_sum() > self.tol.feasibility * scale {
                return LpStatus::Infeasible;
            }
            self.drive_out_artificials();
        }
        self.set_phase(Phase::Two);
        let status = self.iterate();
        self.refresh();
        status
    }

    /// Pivots basic artificials out where possible and fixes all of them at 0.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.m {
            let v = self.basis[i];
            if !self.is_artificial(v) {
                continue;
            }
            let row = self.row(i);
            let mut best: Option<(usize, f64)> = None;
            for (j, &a) in row.iter().enumerate() {
                if self.basic_row[j].is_none() && self.up[j] > self.lo[j] && a.abs() > 1e-7
                    && best.is_none_or(|(_, b)| a.abs() > b) {
                        best = Some((j, a.abs()));
                    }
            }
            if let Some((j, _)) = best {
                self.pivot(i, j);
                self.x[v] = 0.0;
            }
        }
        for i in 0..self.m {
            let art = self.width + i;
            self.lo[art] = 0.0;
            self.up[art] = 0.0;
            if self.basic_row[art].is_none() {
                self.x[art] = 0.0;
            }
        }
        self.refresh();
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let width = self.width;
        let piv = self.t[r * width + q];
        {
            let row = &mut self.t[r * width..(r + 1) * width];
            let inv = 1.0 / piv;
            for a in row.iter_mut() {
                *a *= inv;
            }
            row[q] = 1.0;
        }
        let (before, rest) = self.t.split_at_mut(r * width);
        let (pivot_row, after) = rest.split_at_mut(width);
        for other in before.chunks_mut(width).chain(after.chunks_mut(width)) {
            let f = other[q];
            if f != 0.0 {
                for (a, p) in other.iter_mut().zip(pivot_row.iter()) {
                    *a -= f * p;
                }
                other[q] = 0.0;
            }
        }
        let dq = self.d[q];
        if dq != 0.0 {
            for (dj, p) in self.d.iter_mut().zip(pivot_row.iter()) {
                *dj -= dq * p;
            }
            self.d[q] = 0.0;
        }
        let leaving = self.basis[r];
        self.basic_row[leaving] = None;
        self.basis[r] = q;
        self.basic_row[q] = Some(r);
    }

    fn choose_entering(&self) -> Option<(usize, f64)> {
        let opt = self.tol.optimality;
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.width {
            if self.basic_row[j].is_some() {
                continue;
            }
            let dj = self.d[j];
            let dir = if dj < -opt && self.x[j] < self.up[j] {
                1.0
            } else if dj > opt && self.x[j] > self.lo[j] {
                -1.0
            } else {
                continue;
            };
            if self.bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(b, _)| dj.abs() > self.d[b].abs()) {
                best = Some((j, dir));
            }
        }
        best
    }

    fn iterate(&mut self) -> LpStatus {
        let mut since_refresh = 0;
        loop {
            if self.iterations - self.solve_start >= self.max_iterations {
                return LpStatus::IterationLimit;
            }
            let Some((q, dir)) = self.choose_entering() else {
                return LpStatus::Optimal;
            };
            // Harris ratio test: the longest step that keeps every basic
            // variable within its bounds widened by the feasibility tolerance,
            // then the largest pivot among rows blocking within that step.
            let feas = self.tol.feasibility;
            let range = self.up[q] - self.lo[q];
            let mut reach = f64::INFINITY;
            for i in 0..self.m {
                let a = self.entry(i, q);
                if a.abs() <= self.tol.pivot {
                    continue;
                }
                let v = self.basis[i];
                let room = if -dir * a < 0.0 {
                    self.x[v] - self.lo[v]
                } else {
                    self.up[v] - self.x[v]
                };
                if room.is_finite() {
                    reach = reach.min((room + feas).max(0.0) / a.abs());
                }
            }
            if range == f64::INFINITY && reach == f64::INFINITY {
                return LpStatus::Unbounded;
            }
            let mut theta = range;
            let mut leave: Option<(usize, f64)> = None;
            if range > reach {
                let mut best = 0.0;
                for i in 0..self.m {
                    let a = self.entry(i, q);
                    if a.abs() <= self.tol.pivot {
                        continue;
                    }
                    let v = self.basis[i];
                    let delta = -dir * a;
                    let room = if delta < 0.0 {
                        self.x[v] - self.lo[v]
                    } else {
                        self.up[v] - self.x[v]
                    };
                    if !room.is_finite() {
                        continue;
                    }
                    let limit = room.max(0.0) / a.abs();
                    if limit <= reach && a.abs() > best {
                        best = a.abs();
                        theta = limit;
                        leave = Some((i, delta));
                    }
                }
            }
            self.iterations += 1;
            if theta <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run >= self.tol.bland_after {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }

            self.x[q] += dir * theta;
            for i in 0..self.m {
                let a = self.entry(i, q);
                if a != 0.0 {
                    let v = self.basis[i];
                    self.x[v] -= dir * theta * a;
                }
            }
            match leave {
                None => {
                    // Bound flip.
                    self.x[q] = if dir > 0.0 { self.up[q] } else { self.lo[q] };
                }
                Some((r, delta)) => {
                    let v = self.basis[r];
                    self.x[v] = if delta < 0.0 { self.lo[v] } else { self.up[v] };
                    self.pivot(r, q);
                    if self.is_artificial(v) {
                        self.lo[v] = 0.0;
                        self.up[v] = 0.0;
                        self.x[v] = 0.0;
                    }
                    since_refresh += 1;
                    if since_refresh >= self.tol.refresh_every {
                        self.refresh();
                        since_refresh = 0;
                    }
                }
            }
        }
    }

    /// Changes the bounds of a column of an optimal tableau. Nonbasic columns
    /// move to the bound their reduced cost prefers.
    fn set_bounds(&mut self, j: usize, lo: f64, up: f64) {
        self.lo[j] = lo;
        self.up[j] = up;
        if self.basic_row[j].is_some() {
            return;
        }
        let dj = self.d[j];
        let opt = self.tol.optimality;
        let x = self.x[j];
        self.x[j] = if dj > opt && lo.is_finite() {
            lo
        } else if dj < -opt && up.is_finite() {
            up
        } else if lo.is_finite() && up.is_finite() {
            if x - lo <= up - x {
                lo
            } else {
                up
            }
        } else if lo.is_finite() {
            lo
        } else if up.is_finite() {
            up
        } else {
            x
        };
    }

    /// Restores optimality after bound changes: dual simplex to primal
    /// feasibility, then primal simplex for any remaining reduced cost.
    fn reoptimize(&mut self) -> LpStatus {
        self.solve_start = self.iterations;
        self.bland = false;
        self.degenerate_run = 0;
        self.refresh();
        match self.dual_iterate() {
            LpStatus::Optimal => {}
            other => return other,
        }
        self.refresh();
        let status = self.iterate();
        self.refresh();
        if status == LpStatus::Optimal && self.max_primal_violation() > self.primal_tolerance() {
            // Drift left the basis infeasible; one more dual pass.
            let status = self.dual_iterate();
            self.refresh();
            return status;
        }
        status
    }

    fn primal_tolerance(&self) -> f64 {
        self.tol.feasibility
    }

    fn violation_of(&self, v: usize) -> f64 {
        let x = self.x[v];
        if x < self.lo[v] {
            (self.lo[v] - x) / (1.0 + self.lo[v].abs())
        } else if x > self.up[v] {
            (x - self.up[v]) / (1.0 + self.up[v].abs())
        } else {
            0.0
        }
    }

    fn max_primal_violation(&self) -> f64 {
        self.basis.iter().map(|&v| self.violation_of(v)).fold(0.0, f64::max)
    }

    /// Bounded dual simplex from a dual feasible basis.
    fn dual_iterate(&mut self) -> LpStatus {
        let opt = self.tol.optimality;
        let mut since_refresh = 0;
        loop {
            if self.iterations - self.solve_start >= self.max_iterations {
                return LpStatus::IterationLimit;
            }
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let v = self.basis[i];
                let viol = self.violation_of(v);
                if viol > self.primal_tolerance() && leave.is_none_or(|(_, b)| viol > b) {
                    leave = Some((i, viol));
                }
            }
            let Some((r, _)) = leave else {
                return LpStatus::Optimal;
            };
            let v = self.basis[r];
            let increase = self.x[v] < self.lo[v];
            let target = if increase { self.lo[v] } else { self.up[v] };

            // Candidates move the leaving variable toward its violated bound;
            // Harris two-pass ratio test on the reduced costs.
            let row = self.row(r);
            let mut candidates: Vec<(usize, f64, f64)> = Vec::new();
            let mut limit = f64::INFINITY;
            for (j, &a) in row.iter().enumerate() {
                if self.basic_row[j].is_some() || a.abs() <= self.tol.pivot || self.up[j] <= self.lo[j] {
                    continue;
                }
                // x_B[r] moves by -a per unit increase of x_j.
                let j_up = (a < 0.0) == increase;
                let movable = if j_up { self.x[j] < self.up[j] } else { self.x[j] > self.lo[j] };
                if !movable {
                    continue;
                }
                let dj = if j_up { self.d[j] } else { -self.d[j] };
                let dj = dj.max(0.0);
                limit = limit.min((dj + opt) / a.abs());
                candidates.push((j, dj, a.abs()));
            }
            let mut entering: Option<(usize, f64)> = None;
            for &(j, dj, a) in &candidates {
                if dj / a <= limit && entering.is_none_or(|(_, b)| a > b) {
                    entering = Some((j, a));
                }
            }
            let Some((q, _)) = entering else {
                return LpStatus::Infeasible;
            };
            self.iterations += 1;
            let a_rq = self.t[r * self.width + q];
            let step = (self.x[v] - target) / a_rq;
            self.x[q] += step;
            for i in 0..self.m {
                let a = self.entry(i, q);
                if a != 0.0 {
                    let b = self.basis[i];
                    self.x[b] -= step * a;
                }
            }
            self.pivot(r, q);
            self.x[v] = target;
            since_refresh += 1;
            if since_refresh >= self.tol.refresh_every {
                self.refresh();
                since_refresh = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn single_lower_bound_row() {
        let mut m = SparseMip::new("t");
        let x = m.add_column("x", 0.0, 10.0, false, 1.0);
        m.add_row("r", [(x, 1.0)], Sense::Ge, 3.0);
        let s = solve_lp(&m, &tol());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.values[0] - 3.0).abs() < 1e-9);
        assert!((s.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn assignment_row_picks_cheapest() {
        let mut m = SparseMip::new("t");
        let a = m.add_column("a", 0.0, 1.0, true, 2.0);
        let b = m.add_column("b", 0.0, 1.0, true, 5.0);
        m.add_row("one", [(a, 1.0), (b, 1.0)], Sense::Eq, 1.0);
        let s = solve_lp(&m, &tol());
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.values, vec![1.0, 0.0]);
        assert!((s.objective - 2.0).abs() < 1e-12);
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
        let mut m = SparseMip::new("t");
        let x = m.add_column("x", 0.0, f64::INFINITY, false, -3.0);
        let y = m.add_column("y", 0.0, f64::INFINITY, false, -5.0);
        m.add_row("a", [(x, 1.0)], Sense::Le, 4.0);
        m.add_row("b", [(y, 2.0)], Sense::Le, 12.0);
        m.add_row("c", [(x, 3.0), (y, 2.0)], Sense::Le, 18.0);
        let s = solve_lp(&m, &tol());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 36.0).abs() < 1e-9);
        assert!((s.values[0] - 2.0).abs() < 1e-9 && (s.values[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut m = SparseMip::new("t");
        let x = m.add_column("x", 0.0, 1.0, false, 1.0);
        m.add_row("r", [(x, 1.0)], Sense::Ge, 2.0);
        assert_eq!(solve_lp(&m, &tol()).status, LpStatus::Infeasible);

        let mut m = SparseMip::new("t");
        let x = m.add_column("x", 0.0, f64::INFINITY, false, -1.0);
        let y = m.add_column("y", 0.0, f64::INFINITY, false, 0.0);
        m.add_row("r", [(x, 1.0), (y, -1.0)], Sense::Le, 1.0);
        assert_eq!(solve_lp(&m, &tol()).status, LpStatus::Unbounded);
    }

    #[test]
    fn constant_row_after_substitution() {
        let mut m = SparseMip::new("t");
        let x = m.add_column("x", 1.0, 1.0, false, 1.0);
        m.add_row("r", [(x, 1.0)], Sense::Ge, 2.0);
        assert_eq!(solve_lp(&m, &tol()).status, LpStatus::Infeasible);
        m.rows[0].rhs = 0.5;
        let s = solve_lp(&m, &tol());
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.values, vec![1.0]);
    }

    #[test]
    fn free_and_negative_ranges() {
        // min x + y with x free, y in [-3, 2], x - y >= 1 -> y = -3, x = -2.
        let mut m = SparseMip::new("t");
        let x = m.add_column("x", f64::NEG_INFINITY, f64::INFINITY, false, 1.0);
        let y = m.add_column("y", -3.0, 2.0, false, 1.0);
        m.add_row("r", [(x, 1.0), (y, -1.0)], Sense::Ge, 1.0);
        let s = solve_lp(&m, &tol());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 5.0).abs() < 1e-9, "{:?}", s);
    }

    #[test]
    fn equality_system_with_redundant_row() {
        let mut m = SparseMip::new("t");
        let x = m.add_column("x", 0.0, 10.0, false, 1.0);
        let y = m.add_column("y", 0.0, 10.0, false, 2.0);
        m.add_row("a", [(x, 1.0), (y, 1.0)], Sense::Eq, 4.0);
        m.add_row("b", [(x, 2.0), (y, 2.0)], Sense::Eq, 8.0);
        m.add_row("c", [(x, 1.0), (y, -1.0)], Sense::Eq, 2.0);
        let s = solve_lp(&m, &tol());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.values[0] - 3.0).abs() < 1e-9 && (s.values[1] - 1.0).abs() < 1e-9);
    }
}
