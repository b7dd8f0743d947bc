//! Best-bound branch-and-bound with plunging: every selected node is followed
//! by a dive that reuses the simplex tableau.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lp::{LpStatus, WarmLp};
use super::{SolveError, Tolerances};
use crate::model::SparseMip;

/// Nodes started together, each followed by a plunge. Fixed so that results
/// do not depend on the number of worker threads.
const BATCH_SIZE: usize = 8;
/// Deepest plunge below a batch node.
const MAX_PLUNGE: usize = 64;
/// Node limit of a neighbourhood search around the incumbent.
const NEIGHBOURHOOD_NODES: usize = 500;
/// Share of integer columns the incumbent and the root relaxation must agree
/// on before their neighbourhood is searched.
const NEIGHBOURHOOD_MIN_FIXED: f64 = 0.3;
/// Row tolerance for accepting an incumbent.
const ACCEPT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MipLimits {
    pub time_limit_s: Option<f64>,
    pub node_limit: Option<usize>,
    /// Relative gap `(incumbent - bound) / max(1, |incumbent|)` at which to stop.
    pub gap: f64,
    /// Worker threads for node evaluation; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for MipLimits {
    fn default() -> Self {
        Self {
            time_limit_s: None,
            node_limit: None,
            gap: 1e-6,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveOptions {
    pub limits: MipLimits,
    pub tolerances: Tolerances,
    /// A candidate solution; used as the first incumbent if feasible.
    pub start: Option<Vec<f64>>,
    /// Keep a record of every evaluated node.
    pub record_nodes: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MipStatus {
    Optimal,
    TimeLimit,
    NodeLimit,
}

/// One evaluated node: the bound changes leading to it and its LP bound
/// (`None` if the relaxation was infeasible).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub changes: Vec<(usize, f64, f64)>,
    pub lp_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: MipStatus,
    pub objective: f64,
    pub bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub wall_time_s: f64,
    pub limits: MipLimits,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub values: Vec<f64>,
    #[serde(skip)]
    pub node_log: Vec<NodeRecord>,
}

impl SolveReport {
    pub fn at_gap(&self) -> bool {
        self.gap <= self.limits.gap
    }
}

#[derive(Clone)]
struct Node {
    id: usize,
    parent: Option<usize>,
    depth: usize,
    bound: f64,
    changes: Vec<(usize, f64, f64)>,
    branch: Option<Branch>,
}

/// The bound change that created a node.
#[derive(Debug, Clone, Copy)]
struct Branch {
    column: usize,
    /// Distance from the parent's LP value to the new bound.
    distance: f64,
    up: bool,
}

/// Average objective gain per unit of bound change, per column and direction.
#[derive(Debug, Clone)]
struct PseudoCosts {
    down: Vec<(f64, u32)>,
    up: Vec<(f64, u32)>,
}

impl PseudoCosts {
    fn new(columns: usize) -> Self {
        Self {
            down: vec![(0.0, 0); columns],
            up: vec![(0.0, 0); columns],
        }
    }

    fn record(&mut self, branch: Branch, gain: f64) {
        let side = if branch.up { &mut self.up } else { &mut self.down };
        let entry = &mut side[branch.column];
        entry.0 += gain.max(0.0) / branch.distance.max(1e-6);
        entry.1 += 1;
    }

    /// Mean over observed columns, or 1 if nothing was observed.
    fn average(side: &[(f64, u32)]) -> f64 {
        let (sum, count) = side
            .iter()
            .filter(|e| e.1 > 0)
            .fold((0.0, 0), |(s, c), e| (s + e.0 / e.1 as f64, c + 1));
        if count == 0 {
            1.0
        } else {
            sum / count as f64
        }
    }
}

/// A node identifier inside a batch job; local ids are numbered globally
/// when the batch is merged.
#[derive(Debug, Clone, Copy)]
enum NodeId {
    Global(usize),
    Local(usize),
}

struct JobNode {
    id: NodeId,
    parent: Option<NodeId>,
    depth: usize,
    bound: f64,
    changes: Vec<(usize, f64, f64)>,
    branch: Option<Branch>,
}

struct Evaluated {
    id: NodeId,
    parent: Option<NodeId>,
    depth: usize,
    changes: Vec<(usize, f64, f64)>,
    lp_bound: Option<f64>,
}

/// Outcome of one batch node and the plunge below it.
#[derive(Default)]
struct Job {
    evaluated: Vec<Evaluated>,
    open: Vec<JobNode>,
    /// Feasible integral solutions in the order they were found.
    candidates: Vec<(f64, Vec<f64>)>,
    /// Bound gains seen when solving children.
    observations: Vec<(Branch, f64)>,
    local_ids: usize,
    pruned_bound: f64,
    iterations: usize,
    error: Option<SolveError>,
}

/// Root relaxation under the current global bounds.
struct RootLp<'a> {
    warm: WarmLp<'a>,
    objective: f64,
    values: Vec<f64>,
    reduced_costs: Vec<f64>,
}

impl<'a> RootLp<'a> {
    fn new(warm: WarmLp<'a>, lp: &super::LpSolution) -> Self {
        Self {
            reduced_costs: warm.reduced_costs(),
            warm,
            objective: lp.objective,
            values: lp.values.clone(),
        }
    }
}

struct Search<'a> {
    mip: &'a SparseMip,
    tol: Tolerances,
    lower: Vec<f64>,
    upper: Vec<f64>,
    incumbent: Option<(f64, Vec<f64>)>,
    iterations: usize,
    pseudo: PseudoCosts,
}

impl Search<'_> {
    fn bounds(&self, changes: &[(usize, f64, f64)]) -> (Vec<f64>, Vec<f64>) {
        let mut lo = self.lower.clone();
        let mut up = self.upper.clone();
        for &(j, l, u) in changes {
            lo[j] = lo[j].max(l);
            up[j] = up[j].min(u);
        }
        (lo, up)
    }

    /// Solves the sub-problem with every integer column fixed where the
    /// incumbent agrees with the root relaxation.
    fn neighbourhood(
        &self,
        root: &RootLp,
        options: &SolveOptions,
        deadline: Option<Instant>,
    ) -> Option<(f64, Vec<f64>)> {
        let (obj, incumbent) = self.incumbent.as_ref()?;
        let mut sub = self.mip.clone();
        let mut fixed = 0;
        let mut integers = 0;
        for (j, col) in sub.columns.iter_mut().enumerate() {
            col.lower = self.lower[j];
            col.upper = self.upper[j];
            if col.integer {
                integers += 1;
                if (incumbent[j] - root.values[j]).abs() <= self.tol.integrality {
                    col.lower = incumbent[j];
                    col.upper = incumbent[j];
                    fixed += 1;
                }
            }
        }
        if fixed == integers || (fixed as f64) < NEIGHBOURHOOD_MIN_FIXED * integers as f64 {
            return None;
        }
        let remaining = deadline.map(|d| d.saturating_duration_since(Instant::now()).as_secs_f64());
        let sub_options = SolveOptions {
            limits: MipLimits {
                time_limit_s: remaining,
                node_limit: Some(NEIGHBOURHOOD_NODES),
                gap: options.limits.gap,
                threads: None,
            },
            tolerances: options.tolerances,
            start: Some(incumbent.clone()),
            record_nodes: false,
        };
        let report = search(&sub, &sub_options, false).ok()?;
        log::debug!(
            "neighbourhood with {fixed}/{integers} fixed: {} -> {} in {} nodes",
            obj,
            report.objective,
            report.nodes
        );
        self.feasible(report.values)
    }

    /// Tightens the global bounds of integer columns that cannot move away
    /// from their root LP value without exceeding the incumbent. Returns the
    /// number of columns tightened.
    fn fix_by_reduced_cost(&mut self, root: &RootLp) -> usize {
        let Some((inc, _)) = &self.incumbent else {
            return 0;
        };
        let slack = inc - root.objective;
        if slack < 0.0 {
            return 0;
        }
        let tiny = 1e-9 * inc.abs().max(1.0);
        let mut tightened = 0;
        for (j, col) in self.mip.columns.iter().enumerate() {
            let d = root.reduced_costs[j];
            if !col.integer || d.abs() <= tiny {
                continue;
            }
            let reach = (slack / d.abs() + 1e-9).floor();
            let x = root.values[j].round();
            if d > 0.0 && x + reach < self.upper[j] {
                self.upper[j] = (x + reach).max(self.lower[j]);
                tightened += 1;
            } else if d < 0.0 && x - reach > self.lower[j] {
                self.lower[j] = (x - reach).min(self.upper[j]);
                tightened += 1;
            }
        }
        tightened
    }

    /// Integer columns rounded and fixed, continuous ones re-optimized.
    fn polish(&self, warm: &mut WarmLp, values: &[f64]) -> Option<Vec<f64>> {
        let mut lo = self.lower.clone();
        let mut up = self.upper.clone();
        for (j, col) in self.mip.columns.iter().enumerate() {
            if col.integer {
                let v = values[j].round();
                if v < self.lower[j] - ACCEPT_TOLERANCE || v > self.upper[j] + ACCEPT_TOLERANCE {
                    return None;
                }
                lo[j] = v;
                up[j] = v;
            }
        }
        let lp = warm.resolve(&lo, &up);
        (lp.status == LpStatus::Optimal).then_some(lp.values)
    }

    /// Rounded values and their objective if they satisfy the model.
    fn feasible(&self, mut values: Vec<f64>) -> Option<(f64, Vec<f64>)> {
        for (j, col) in self.mip.columns.iter().enumerate() {
            if col.integer {
                values[j] = values[j].round();
            }
        }
        if !self.mip.violations(&values, ACCEPT_TOLERANCE).is_empty() {
            return None;
        }
        Some((self.mip.objective_value(&values), values))
    }

    fn offer(&mut self, candidate: Option<(f64, Vec<f64>)>) {
        let Some((obj, values)) = candidate else {
            return;
        };
        if improves(obj, self.incumbent.as_ref().map(|i| i.0)) {
            self.incumbent = Some((obj, values));
        }
    }

    /// Fractional integer column with the best pseudo-cost product score;
    /// ties by larger objective magnitude, then lower index.
    fn branching_column(&self, values: &[f64]) -> Option<usize> {
        let avg_down = PseudoCosts::average(&self.pseudo.down);
        let avg_up = PseudoCosts::average(&self.pseudo.up);
        let estimate = |e: (f64, u32), avg: f64| if e.1 > 0 { e.0 / e.1 as f64 } else { avg };
        let mut best: Option<(usize, f64)> = None;
        for (j, col) in self.mip.columns.iter().enumerate() {
            if !col.integer {
                continue;
            }
            let f = values[j] - values[j].floor();
            if f.min(1.0 - f) <= self.tol.integrality {
                continue;
            }
            let down = f * estimate(self.pseudo.down[j], avg_down);
            let up = (1.0 - f) * estimate(self.pseudo.up[j], avg_up);
            let score = down.max(1e-6) * up.max(1e-6);
            let better = match best {
                None => true,
                Some((b, bs)) => {
                    if score > bs * (1.0 + 1e-9) {
                        true
                    } else if score >= bs * (1.0 - 1e-9) {
                        col.objective.abs() > self.mip.columns[b].objective.abs()
                    } else {
                        false
                    }
                }
            };
            if better {
                best = Some((j, score));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Evaluates `start` and dives below it, always following the child on
    /// the side the branching value rounds to, until the dive ends. Pruning
    /// uses `incumbent`, which is fixed for the whole batch.
    fn plunge(
        &self,
        start: JobNode,
        warm: &mut WarmLp,
        incumbent: Option<f64>,
        gap: f64,
        deadline: Option<Instant>,
    ) -> Job {
        let mut job = Job {
            pruned_bound: f64::INFINITY,
            ..Job::default()
        };
        let mut current = start;
        for depth in 0.. {
            if depth > 0 && deadline.is_some_and(|d| Instant::now() >= d) {
                job.open.push(current);
                break;
            }
            let (lo, up) = self.bounds(&current.changes);
            let lp = warm.resolve(&lo, &up);
            job.iterations += lp.iterations;
            job.evaluated.push(Evaluated {
                id: current.id,
                parent: current.parent,
                depth: current.depth,
                changes: current.changes.clone(),
                lp_bound: (lp.status == LpStatus::Optimal).then_some(lp.objective),
            });
            if let (Some(b), LpStatus::Optimal) = (current.branch, lp.status) {
                job.observations.push((b, lp.objective - current.bound));
            }
            match lp.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => break,
                LpStatus::Unbounded => {
                    job.error = Some(SolveError::Unbounded);
                    break;
                }
                LpStatus::IterationLimit => {
                    job.error = Some(SolveError::IterationLimit);
                    break;
                }
            }
            let bound = lp.objective.max(current.bound);
            if bound >= prune_threshold(incumbent, gap) {
                job.pruned_bound = job.pruned_bound.min(bound);
                break;
            }
            let Some(j) = self.branching_column(&lp.values) else {
                let found = self
                    .feasible(lp.values.clone())
                    .or_else(|| self.polish(warm, &lp.values).and_then(|v| self.feasible(v)));
                match found {
                    Some(candidate) => job.candidates.push(candidate),
                    // Integral but not accepted: keep its bound so the gap stays honest.
                    None => job.pruned_bound = job.pruned_bound.min(bound),
                }
                break;
            };
            let v = lp.values[j];
            let mut down = current.changes.clone();
            down.push((j, lo[j], v.floor()));
            let mut upc = current.changes;
            upc.push((j, v.ceil(), up[j]));
            let parent = Some(current.id);
            let f = v - v.floor();
            let mut child = |changes, up: bool| {
                job.local_ids += 1;
                JobNode {
                    id: NodeId::Local(job.local_ids - 1),
                    parent,
                    depth: current.depth + 1,
                    bound,
                    changes,
                    branch: Some(Branch {
                        column: j,
                        distance: if up { 1.0 - f } else { f },
                        up,
                    }),
                }
            };
            let down = child(down, false);
            let upn = child(upc, true);
            let (next, other) = if v - v.floor() >= 0.5 { (upn, down) } else { (down, upn) };
            job.open.push(other);
            if depth + 1 >= MAX_PLUNGE {
                job.open.push(next);
                break;
            }
            current = next;
        }
        job
    }
}

fn prune_threshold(incumbent: Option<f64>, gap: f64) -> f64 {
    match incumbent {
        Some(obj) => obj - gap * obj.abs().max(1.0),
        None => f64::INFINITY,
    }
}

fn improves(obj: f64, incumbent: Option<f64>) -> bool {
    match incumbent {
        None => true,
        Some(best) => obj < best - 1e-9 * best.abs().max(1.0),
    }
}

fn relative_gap(incumbent: f64, bound: f64) -> f64 {
    ((incumbent - bound) / incumbent.abs().max(1.0)).max(0.0)
}

/// Solves `mip` to the requested relative gap or until a limit is reached.
pub fn solve_mip(mip: &SparseMip, options: &SolveOptions) -> Result<SolveReport, SolveError> {
    match options.limits.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .map_err(|e| SolveError::ThreadPool(e.to_string()))?;
            pool.install(|| search(mip, options, true))
        }
        None => search(mip, options, true),
    }
}

fn search(
    mip: &SparseMip,
    options: &SolveOptions,
    heuristics: bool,
) -> Result<SolveReport, SolveError> {
    let started = Instant::now();
    let limits = options.limits;
    let deadline = limits
        .time_limit_s
        .map(|s| started + Duration::from_secs_f64(s.max(0.0)));
    let mut s = Search {
        mip,
        tol: options.tolerances,
        lower: mip.columns.iter().map(|c| c.lower).collect(),
        upper: mip.columns.iter().map(|c| c.upper).collect(),
        incumbent: None,
        iterations: 0,
        pseudo: PseudoCosts::new(mip.num_columns()),
    };
    if let Some(start) = &options.start {
        if start.len() == mip.num_columns() {
            let candidate = s.feasible(start.clone());
            s.offer(candidate);
        }
    }

    let mut open: Vec<Node> = Vec::new();
    let mut next_id = 1;
    let mut evaluated = 0;
    let mut pruned_bound = f64::INFINITY;
    let mut node_log = Vec::new();
    let mut status = MipStatus::Optimal;
    let mut root_lp: Option<RootLp> = None;
    let integer_columns = mip.columns.iter().filter(|c| c.integer).count();
    let mut fixed_since_rebuild = 0;

    if limits.node_limit == Some(0) {
        status = MipStatus::NodeLimit;
        open.push(Node {
            id: 0,
            parent: None,
            depth: 0,
            bound: f64::NEG_INFINITY,
            changes: Vec::new(),
            branch: None,
        });
    } else {
        let (warm, lp) = WarmLp::new(mip, &s.lower, &s.upper, &s.tol);
        s.iterations += lp.iterations;
        evaluated += 1;
        if options.record_nodes {
            node_log.push(NodeRecord {
                id: 0,
                parent: None,
                depth: 0,
                changes: Vec::new(),
                lp_bound: (lp.status == LpStatus::Optimal).then_some(lp.objective),
            });
        }
        match lp.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Err(SolveError::Infeasible),
            LpStatus::Unbounded => return Err(SolveError::Unbounded),
            LpStatus::IterationLimit => return Err(SolveError::IterationLimit),
        }
        let warm = warm.expect("an optimal root keeps its tableau");
        let candidate = s
            .polish(&mut warm.clone(), &lp.values)
            .and_then(|v| s.feasible(v));
        s.offer(candidate);
        if lp.objective >= prune_threshold(s.incumbent.as_ref().map(|i| i.0), limits.gap) {
            pruned_bound = lp.objective;
        } else {
            match s.branching_column(&lp.values) {
                None => {
                    let candidate = s.feasible(lp.values.clone());
                    s.offer(candidate);
                }
                Some(_) => open.push(Node {
                    id: 0,
                    parent: None,
                    depth: 0,
                    bound: lp.objective,
                    changes: Vec::new(),
                    branch: None,
                }),
            }
        }
        let root = RootLp::new(warm, &lp);
        fixed_since_rebuild += s.fix_by_reduced_cost(&root);
        if heuristics {
            let candidate = s.neighbourhood(&root, options, deadline);
            s.offer(candidate);
            fixed_since_rebuild += s.fix_by_reduced_cost(&root);
        }
        root_lp = Some(root);
    }
    // The root, if still open, is re-evaluated as the first batch node; its
    // warm re-solve costs no pivots.
    let mut root_pending = true;

    while !open.is_empty() {
        if let Some((inc, _)) = &s.incumbent {
            let open_bound = open.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
            if relative_gap(*inc, open_bound.min(pruned_bound)) <= limits.gap {
                pruned_bound = pruned_bound.min(open_bound);
                open.clear();
                break;
            }
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            status = MipStatus::TimeLimit;
            break;
        }
        if limits.node_limit.is_some_and(|limit| evaluated >= limit) {
            status = MipStatus::NodeLimit;
            break;
        }
        if fixed_since_rebuild * 10 > integer_columns {
            log::debug!("restart after {fixed_since_rebuild} reduced-cost fixings");
            // Restart from a smaller tableau with the tightened bounds.
            fixed_since_rebuild = 0;
            let (warm, lp) = WarmLp::new(mip, &s.lower, &s.upper, &s.tol);
            s.iterations += lp.iterations;
            let threshold = prune_threshold(s.incumbent.as_ref().map(|i| i.0), limits.gap);
            match (warm, lp.status) {
                (Some(warm), LpStatus::Optimal) if lp.objective < threshold => {
                    let root = RootLp::new(warm, &lp);
                    fixed_since_rebuild += s.fix_by_reduced_cost(&root);
                    root_lp = Some(root);
                }
                (_, LpStatus::Optimal) => {
                    pruned_bound = pruned_bound.min(lp.objective);
                    open.clear();
                    break;
                }
                (_, LpStatus::Infeasible) => {
                    open.clear();
                    break;
                }
                (_, LpStatus::Unbounded) => return Err(SolveError::Unbounded),
                (_, LpStatus::IterationLimit) => return Err(SolveError::IterationLimit),
            }
        }
        let Some(root) = root_lp.as_ref() else {
            break;
        };

        open.sort_by(|a, b| a.bound.total_cmp(&b.bound).then(a.id.cmp(&b.id)));
        let take = open.len().min(BATCH_SIZE);
        let batch: Vec<Node> = open.drain(..take).collect();
        let snapshot = s.incumbent.as_ref().map(|i| i.0);
        let run = |node: &Node| {
            let start = JobNode {
                id: NodeId::Global(node.id),
                parent: node.parent.map(NodeId::Global),
                depth: node.depth,
                bound: node.bound,
                changes: node.changes.clone(),
                branch: node.branch,
            };
            s.plunge(start, &mut root.warm.clone(), snapshot, limits.gap, deadline)
        };
        let jobs: Vec<Job> = if batch.len() == 1 {
            vec![run(&batch[0])]
        } else {
            batch.par_iter().map(run).collect()
        };

        for (node, job) in batch.iter().zip(jobs) {
            let base = next_id;
            next_id += job.local_ids;
            let global = |id: NodeId| match id {
                NodeId::Global(g) => g,
                NodeId::Local(l) => base + l,
            };
            // Re-evaluating the root repeats its record.
            let skip_root = root_pending && node.id == 0;
            for (k, e) in job.evaluated.into_iter().enumerate() {
                if skip_root && k == 0 {
                    continue;
                }
                evaluated += 1;
                if options.record_nodes {
                    node_log.push(NodeRecord {
                        id: global(e.id),
                        parent: e.parent.map(global),
                        depth: e.depth,
                        changes: e.changes,
                        lp_bound: e.lp_bound,
                    });
                }
            }
            s.iterations += job.iterations;
            if let Some(err) = job.error {
                return Err(err);
            }
            pruned_bound = pruned_bound.min(job.pruned_bound);
            for (branch, gain) in job.observations {
                s.pseudo.record(branch, gain);
            }
            for candidate in job.candidates {
                s.offer(Some(candidate));
            }
            open.extend(job.open.into_iter().map(|n| Node {
                id: global(n.id),
                parent: n.parent.map(global),
                depth: n.depth,
                bound: n.bound,
                changes: n.changes,
                branch: n.branch,
            }));
        }
        root_pending = false;
        if s.incumbent.as_ref().map(|i| i.0) != snapshot {
            if let Some(root) = &root_lp {
                if heuristics {
                    let candidate = s.neighbourhood(root, options, deadline);
                    s.offer(candidate);
                }
                let fixed = s.fix_by_reduced_cost(root);
                log::debug!(
                    "incumbent {:?} after {evaluated} nodes, {fixed} columns fixed",
                    s.incumbent.as_ref().map(|i| i.0)
                );
                fixed_since_rebuild += fixed;
            }
        }
    }

    let (objective, values) = match s.incumbent {
        Some(inc) => inc,
        None if status == MipStatus::Optimal => return Err(SolveError::Infeasible),
        None => return Err(SolveError::NoFeasibleSolutionFound),
    };
    let open_bound = open.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    let bound = open_bound.min(pruned_bound).min(objective);
    let gap = relative_gap(objective, bound);
    if status != MipStatus::Optimal && gap <= limits.gap {
        status = MipStatus::Optimal;
    }
    Ok(SolveReport {
        status,
        objective,
        bound,
        gap,
        nodes: evaluated,
        lp_iterations: s.iterations,
        wall_time_s: started.elapsed().as_secs_f64(),
        limits,
        tolerances: options.tolerances,
        values,
        node_log,
    })
}
