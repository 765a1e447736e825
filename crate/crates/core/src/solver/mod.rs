//! Exact anytime branch and bound.
//!
//! Decisions are taken in four phases: yard locations of inbound shipments,
//! quay crane assignment, task sequencing per crane, then the order of every
//! active interfering pair. Each node is propagated to a fixpoint before it
//! is expanded; see [`SearchNode::propagate`].

mod node;

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use node::{Problem, Propagation, SearchNode};

use crate::derived::DerivedTables;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::schedule::compute_schedule;
use crate::solution::{Solution, Status};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveParams {
    pub time_limit: Duration,
    pub workers: usize,
    /// Recorded in the report. The search itself is deterministic.
    pub seed: u64,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            time_limit: Duration::from_secs(600),
            workers: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    /// Seconds since the start of the search.
    pub time: f64,
    pub objective: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub best_objective: Option<i64>,
    pub lower_bound: i64,
    pub gap_percent: Option<f64>,
    pub status: Status,
    pub nodes: u64,
    pub propagations: u64,
    /// Seconds.
    pub wall_time: f64,
    pub incumbent_trace: Vec<TracePoint>,
    pub seed: u64,
    pub workers: usize,
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "none".to_string());
        writeln!(
            f,
            "best_objective: {}",
            opt(self.best_objective.map(|v| v.to_string()))
        )?;
        writeln!(f, "lower_bound: {}", self.lower_bound)?;
        writeln!(
            f,
            "gap_percent: {}",
            opt(self.gap_percent.map(|g| format!("{g:.2}")))
        )?;
        writeln!(f, "status: {}", self.status)?;
        writeln!(f, "nodes: {}", self.nodes)?;
        writeln!(f, "propagations: {}", self.propagations)?;
        writeln!(f, "wall_time: {:.3}", self.wall_time)?;
        let trace: Vec<String> = self
            .incumbent_trace
            .iter()
            .map(|p| format!("({:.3}, {})", p.time, p.objective))
            .collect();
        writeln!(f, "incumbent_trace: [{}]", trace.join(", "))?;
        writeln!(f, "seed: {}", self.seed)?;
        write!(f, "workers: {}", self.workers)
    }
}

/// `(best - lb) / best · 100`.
pub fn gap_percent(best: i64, lower_bound: i64) -> f64 {
    if best <= 0 {
        return 0.0;
    }
    (best - lower_bound) as f64 * 100.0 / best as f64
}

struct Shared<'a> {
    pb: Problem<'a>,
    start: Instant,
    deadline: Instant,
    ub: AtomicI64,
    best: Mutex<Option<Solution>>,
    trace: Mutex<Vec<TracePoint>>,
    nodes: AtomicU64,
    propagations: AtomicU64,
    timed_out: AtomicBool,
}

impl Shared<'_> {
    fn ub(&self) -> Option<i64> {
        let v = self.ub.load(Ordering::Acquire);
        (v != i64::MAX).then_some(v)
    }

    fn offer(&self, solution: Solution) {
        let mut best = self.best.lock().expect("incumbent lock");
        if best
            .as_ref()
            .is_some_and(|b| b.objective <= solution.objective)
        {
            return;
        }
        self.ub.store(solution.objective, Ordering::Release);
        self.trace.lock().expect("trace lock").push(TracePoint {
            time: self.start.elapsed().as_secs_f64(),
            objective: solution.objective,
        });
        *best = Some(solution);
    }

    fn out_of_time(&self) -> bool {
        if self.timed_out.load(Ordering::Relaxed) {
            return true;
        }
        if Instant::now() >= self.deadline {
            self.timed_out.store(true, Ordering::Relaxed);
            return true;
        }
        false
    }

    /// Propagates and either evaluates a leaf or returns its children.
    fn expand(&self, mut node: SearchNode) -> Vec<SearchNode> {
        self.nodes.fetch_add(1, Ordering::Relaxed);
        let (outcome, rounds) = node.propagate(&self.pb, self.ub());
        self.propagations.fetch_add(rounds, Ordering::Relaxed);
        if outcome == Propagation::Pruned {
            return Vec::new();
        }
        let children = node.branch(&self.pb);
        if children.is_empty() {
            if let Some(d) = node.decisions(&self.pb) {
                if let Ok(sol) = compute_schedule(self.pb.instance, self.pb.derived, &d) {
                    self.offer(sol);
                }
            }
        }
        let bound = node.lower_bound();
        children
            .into_iter()
            .map(|mut c| {
                c.set_bound(bound);
                c
            })
            .collect()
    }

    /// Depth-first search below `root`; on timeout returns the smallest bound
    /// among the open nodes.
    fn dfs(&self, root: SearchNode) -> Option<i64> {
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            if self.out_of_time() {
                stack.push(node);
                return stack.iter().map(SearchNode::lower_bound).min();
            }
            let children = self.expand(node);
            stack.extend(children.into_iter().rev());
        }
        None
    }
}

/// Solves to proven optimality or until `params.time_limit`.
///
/// The returned solution, if any, is the best incumbent. Its status is
/// [`Status::Optimal`] when the search space was exhausted.
pub fn solve(
    instance: &Instance,
    derived: &DerivedTables,
    params: &SolveParams,
) -> Result<(SolveReport, Option<Solution>)> {
    if params.time_limit.is_zero() {
        return Err(Error::InvalidParams("time_limit must be positive".into()));
    }
    let workers = params.workers.max(1);
    let start = Instant::now();
    let shared = Shared {
        pb: Problem::new(instance, derived),
        start,
        deadline: start + params.time_limit,
        ub: AtomicI64::new(i64::MAX),
        best: Mutex::new(None),
        trace: Mutex::new(Vec::new()),
        nodes: AtomicU64::new(0),
        propagations: AtomicU64::new(0),
        timed_out: AtomicBool::new(false),
    };
    let root = SearchNode::root(&shared.pb);

    let open_bound = if workers == 1 {
        shared.dfs(root)
    } else {
        // Breadth-first split into a frontier, then workers drain it in order.
        let mut frontier = std::collections::VecDeque::from([root]);
        while !frontier.is_empty() && frontier.len() < 4 * workers && !shared.out_of_time() {
            let node = frontier.pop_front().expect("nonempty");
            frontier.extend(shared.expand(node));
        }
        let queue = Mutex::new(frontier);
        let open: Mutex<Option<i64>> = Mutex::new(None);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let next = queue.lock().expect("queue lock").pop_front();
                    let Some(node) = next else { break };
                    if let Some(b) = shared.dfs(node) {
                        let mut o = open.lock().expect("bound lock");
                        *o = Some(o.map_or(b, |x| x.min(b)));
                    }
                });
            }
        });
        let leftover = queue
            .into_inner()
            .expect("queue")
            .iter()
            .map(SearchNode::lower_bound)
            .min();
        match (open.into_inner().expect("bound"), leftover) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    };

    let mut best = shared.best.into_inner().expect("incumbent");
    let best_objective = best.as_ref().map(|s| s.objective);
    let exhausted = open_bound.is_none();
    let status = match (best_objective, exhausted) {
        (Some(_), true) => Status::Optimal,
        (Some(_), false) => Status::Feasible,
        (None, true) => Status::Infeasible,
        (None, false) => Status::Unknown,
    };
    let lower_bound = match (best_objective, open_bound) {
        (Some(ub), Some(lb)) => lb.min(ub),
        (Some(ub), None) => ub,
        (None, Some(lb)) => lb,
        (None, None) => 0,
    };
    if let Some(sol) = best.as_mut() {
        sol.status = status;
    }
    let report = SolveReport {
        best_objective,
        lower_bound,
        gap_percent: best_objective.map(|b| gap_percent(b, lower_bound)),
        status,
        nodes: shared.nodes.into_inner(),
        propagations: shared.propagations.into_inner(),
        wall_time: start.elapsed().as_secs_f64(),
        incumbent_trace: shared.trace.into_inner().expect("trace"),
        seed: params.seed,
        workers,
    };
    Ok((report, best))
}

/// Bound of the root node after propagation, without an incumbent.
pub fn root_lower_bound(instance: &Instance, derived: &DerivedTables) -> i64 {
    let pb = Problem::new(instance, derived);
    let mut root = SearchNode::root(&pb);
    root.propagate(&pb, None);
    root.lower_bound()
}
