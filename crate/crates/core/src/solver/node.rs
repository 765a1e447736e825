//! Search nodes: partial decisions, time windows, propagation and bounds.
//!
//! Task `i` is the QC handling of shipment `i`; task `n + i` its YC handling.

use std::collections::BTreeMap;

use crate::derived::DerivedTables;
use crate::instance::{Direction, Instance, Time};
use crate::schedule::PrecedenceGraph;
use crate::solution::{Decisions, First, InterferenceKey};

const INF: Time = Time::MAX / 4;

/// Instance data the search reads at every node.
pub struct Problem<'a> {
    pub instance: &'a Instance,
    pub derived: &'a DerivedTables,
    n: usize,
    /// Processing time per task.
    p: Vec<Time>,
    /// Inbound locations by increasing `(tt, id)`.
    free_locs: Vec<usize>,
    yc_metric: bool,
}

impl<'a> Problem<'a> {
    pub fn new(instance: &'a Instance, derived: &'a DerivedTables) -> Self {
        let n = instance.num_shipments();
        let mut p = vec![0; 2 * n];
        for s in instance.shipments() {
            p[s.id] = s.qc_time;
            p[n + s.id] = s.yc_time;
        }
        let mut free_locs = instance.inbound_locations().to_vec();
        free_locs.sort_by_key(|&k| (instance.tt(k), k));
        Self {
            instance,
            derived,
            n,
            p,
            free_locs,
            yc_metric: instance.yc_travel_is_metric(),
        }
    }

    fn terminal(&self, i: usize) -> usize {
        match self.instance.shipment(i).direction {
            Direction::Inbound => self.n + i,
            Direction::Outbound => i,
        }
    }
}

/// Crane a task runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Crane {
    Qc(u32),
    Yc(usize),
}

/// Outcome of propagating a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    Consistent,
    Pruned,
}

#[derive(Debug, Clone)]
pub struct SearchNode {
    loc_of: Vec<Option<usize>>,
    loc_used: Vec<bool>,
    crane_of: Vec<u32>,
    qc_seq: Vec<Vec<usize>>,
    yc_seq: Vec<Vec<usize>>,
    sequenced: Vec<bool>,
    /// Order per interference tuple, indexed like `derived.interference_set`.
    orders: Vec<Option<First>>,
    /// Precedences implied by the bounds: `(from, to) -> length`.
    derived_arcs: BTreeMap<(usize, usize), Time>,
    est: Vec<Time>,
    lst: Vec<Time>,
    vessel_lb: Vec<Time>,
    bound: i64,
    pub depth: usize,
}

impl SearchNode {
    /// No decisions beyond the forced ones: outbound locations and QCs of
    /// shipments with a single eligible crane.
    pub fn root(pb: &Problem) -> Self {
        let inst = pb.instance;
        let n = pb.n;
        let mut loc_of = vec![None; n];
        for s in inst.outbound_shipments() {
            loc_of[s.id] = s.fixed_location;
        }
        let crane_of = pb
            .derived
            .eligible_qcs
            .iter()
            .map(|e| if e.len() == 1 { e[0] } else { 0 })
            .collect();
        Self {
            loc_of,
            loc_used: vec![false; inst.yard_locations().len()],
            crane_of,
            qc_seq: vec![Vec::new(); inst.qc_count() as usize],
            yc_seq: vec![Vec::new(); inst.yc_count()],
            sequenced: vec![false; 2 * n],
            orders: vec![None; pb.derived.interference_set.len()],
            derived_arcs: BTreeMap::new(),
            est: vec![0; 2 * n],
            lst: vec![INF; 2 * n],
            vessel_lb: vec![0; inst.vessels().len()],
            bound: 0,
            depth: 0,
        }
    }

    /// Earliest start of every task after the last propagation.
    pub fn est(&self) -> &[Time] {
        &self.est
    }

    /// Latest start of every task after the last propagation (huge when unbounded).
    pub fn lst(&self) -> &[Time] {
        &self.lst
    }

    /// Weighted sum of the per-vessel completion bounds after the last propagation.
    pub fn lower_bound(&self) -> i64 {
        self.bound
    }

    pub(crate) fn set_bound(&mut self, bound: i64) {
        self.bound = bound;
    }

    fn crane(&self, pb: &Problem, task: usize) -> Option<Crane> {
        if task < pb.n {
            (self.crane_of[task] != 0).then(|| Crane::Qc(self.crane_of[task]))
        } else {
            self.loc_of[task - pb.n].map(|k| Crane::Yc(pb.instance.yc_of(k)))
        }
    }

    /// Lower bound on the setup between tasks on the same crane when `a`
    /// precedes `b`, not necessarily immediately.
    fn setup(&self, pb: &Problem, a: usize, b: usize) -> Time {
        if a < pb.n {
            pb.derived.eqc(a, b)
        } else if pb.yc_metric {
            let (la, lb) = (self.loc_of[a - pb.n], self.loc_of[b - pb.n]);
            pb.instance.tyc(la.expect("located"), lb.expect("located"))
        } else {
            0
        }
    }

    fn min_free_tt(&self, pb: &Problem) -> Time {
        pb.free_locs
            .iter()
            .find(|&&k| !self.loc_used[k])
            .map_or(0, |&k| pb.instance.tt(k))
    }

    fn transfer_lb(&self, pb: &Problem, i: usize, min_free: Time) -> Time {
        let s = pb.instance.shipment(i);
        match s.direction {
            Direction::Inbound => self.loc_of[i].map_or(min_free, |k| pb.instance.tt(k)),
            Direction::Outbound => s.yt_outbound_time.unwrap_or(0),
        }
    }

    fn active(&self, pb: &Problem, idx: usize) -> bool {
        let t = &pb.derived.interference_set[idx];
        self.crane_of[t.i] == t.v && self.crane_of[t.j] == t.w
    }

    /// Unsequenced tasks per known crane, in id order.
    fn remaining(&self, pb: &Problem) -> BTreeMap<Crane, Vec<usize>> {
        let mut out: BTreeMap<Crane, Vec<usize>> = BTreeMap::new();
        for task in 0..2 * pb.n {
            if !self.sequenced[task] {
                if let Some(c) = self.crane(pb, task) {
                    out.entry(c).or_default().push(task);
                }
            }
        }
        out
    }

    fn last_on(&self, pb: &Problem, crane: Crane) -> Option<usize> {
        match crane {
            Crane::Qc(q) => self.qc_seq[q as usize - 1].last().copied(),
            Crane::Yc(c) => self.yc_seq[c].last().map(|&i| pb.n + i),
        }
    }

    fn graph(&self, pb: &Problem, remaining: &BTreeMap<Crane, Vec<usize>>) -> PrecedenceGraph {
        let n = pb.n;
        let inst = pb.instance;
        let mut g = PrecedenceGraph::new(2 * n);
        let min_free = self.min_free_tt(pb);
        for s in inst.shipments() {
            let lag = self.transfer_lb(pb, s.id, min_free);
            match s.direction {
                Direction::Inbound => g.add_arc(s.id, n + s.id, s.qc_time + lag),
                Direction::Outbound => g.add_arc(n + s.id, s.id, s.yc_time + lag),
            }
        }
        for seq in &self.qc_seq {
            for w in seq.windows(2) {
                g.add_arc(w[0], w[1], pb.p[w[0]] + pb.derived.eqc(w[0], w[1]));
            }
        }
        for seq in &self.yc_seq {
            for w in seq.windows(2) {
                let (a, b) = (n + w[0], n + w[1]);
                let travel = inst.tyc(
                    self.loc_of[w[0]].expect("located"),
                    self.loc_of[w[1]].expect("located"),
                );
                g.add_arc(a, b, pb.p[a] + travel);
            }
        }
        for (&crane, tasks) in remaining {
            if let Some(last) = self.last_on(pb, crane) {
                for &r in tasks {
                    g.add_arc(last, r, pb.p[last] + self.setup(pb, last, r));
                }
            }
        }
        for (idx, t) in pb.derived.interference_set.iter().enumerate() {
            if let Some(order) = self.orders[idx] {
                let key = InterferenceKey {
                    i: t.i,
                    j: t.j,
                    v: t.v,
                    w: t.w,
                };
                let (f, s) = key.ordered(order);
                g.add_arc(f, s, pb.p[f] + t.delta);
            }
        }
        for (&(a, b), &len) in &self.derived_arcs {
            g.add_arc(a, b, len);
        }
        g
    }

    /// Per-vessel completion bounds: longest chains to each terminal task and
    /// a release-date relaxation of every (crane, vessel) group of unsequenced tasks.
    fn vessel_bounds(&mut self, pb: &Problem, remaining: &BTreeMap<Crane, Vec<usize>>) {
        let inst = pb.instance;
        let n = pb.n;
        let min_free = self.min_free_tt(pb);
        self.vessel_lb.iter_mut().for_each(|b| *b = 0);
        for s in inst.shipments() {
            let t = pb.terminal(s.id);
            let b = &mut self.vessel_lb[s.vessel];
            *b = (*b).max(self.est[t] + pb.p[t]);
        }
        for tasks in remaining.values() {
            let mut by_vessel: BTreeMap<usize, Vec<(Time, Time, Time)>> = BTreeMap::new();
            for &task in tasks {
                let i = task % n;
                let s = inst.shipment(i);
                let tail = if task == pb.terminal(i) {
                    0
                } else if task < n {
                    self.transfer_lb(pb, i, min_free) + s.yc_time
                } else {
                    self.transfer_lb(pb, i, min_free) + s.qc_time
                };
                by_vessel
                    .entry(s.vessel)
                    .or_default()
                    .push((self.est[task], pb.p[task], tail));
            }
            for (v, mut jobs) in by_vessel {
                jobs.sort_unstable();
                let mut t = 0;
                let mut min_tail = INF;
                for &(r, p, tail) in &jobs {
                    t = t.max(r) + p;
                    min_tail = min_tail.min(tail);
                }
                self.vessel_lb[v] = self.vessel_lb[v].max(t + min_tail);
            }
        }
        self.bound = inst
            .vessels()
            .iter()
            .map(|v| v.weight * self.vessel_lb[v.id])
            .sum();
    }

    /// Tightens time windows to a fixpoint. With an incumbent `ub`, only
    /// completions strictly better than `ub` are kept. Returns the number of
    /// propagation rounds alongside the outcome.
    pub fn propagate(&mut self, pb: &Problem, ub: Option<i64>) -> (Propagation, u64) {
        let n = pb.n;
        let mut rounds = 0;
        if pb.free_locs.len() < pb.instance.inbound_shipments().count() {
            return (Propagation::Pruned, rounds);
        }
        loop {
            rounds += 1;
            let remaining = self.remaining(pb);
            let g = self.graph(pb, &remaining);
            let Some(order) = g.topological_order() else {
                return (Propagation::Pruned, rounds);
            };
            self.est = g.longest_paths_from(&order, &vec![0; 2 * n]);
            self.vessel_bounds(pb, &remaining);

            let Some(ub) = ub else {
                self.lst = vec![INF; 2 * n];
                return (Propagation::Consistent, rounds);
            };
            if self.bound >= ub {
                return (Propagation::Pruned, rounds);
            }

            // Latest starts from per-vessel deadlines.
            let inst = pb.instance;
            let mut deadline = vec![INF; inst.vessels().len()];
            for v in inst.vessels() {
                let others = self.bound - v.weight * self.vessel_lb[v.id];
                deadline[v.id] = (ub - 1 - others).div_euclid(v.weight);
            }
            let mut lst = vec![INF; 2 * n];
            for s in inst.shipments() {
                let t = pb.terminal(s.id);
                lst[t] = deadline[s.vessel] - pb.p[t];
            }
            for &u in order.iter().rev() {
                for &(v, len) in g.successors(u) {
                    lst[u] = lst[u].min(lst[v] - len);
                }
            }
            if (0..2 * n).any(|t| self.est[t] > lst[t]) {
                return (Propagation::Pruned, rounds);
            }
            self.lst = lst;

            let mut changed = false;
            for tasks in remaining.values() {
                for (x, &a) in tasks.iter().enumerate() {
                    for &b in &tasks[x + 1..] {
                        let ab = self.est[a] + pb.p[a] + self.setup(pb, a, b) <= self.lst[b];
                        let ba = self.est[b] + pb.p[b] + self.setup(pb, b, a) <= self.lst[a];
                        let forced = match (ab, ba) {
                            (false, false) => return (Propagation::Pruned, rounds),
                            (true, false) => Some((a, b)),
                            (false, true) => Some((b, a)),
                            (true, true) => None,
                        };
                        if let Some((f, s)) = forced {
                            if !self.derived_arcs.contains_key(&(f, s)) {
                                self.derived_arcs
                                    .insert((f, s), pb.p[f] + self.setup(pb, f, s));
                                changed = true;
                            }
                        }
                    }
                }
            }
            for idx in 0..self.orders.len() {
                if self.orders[idx].is_some() || !self.active(pb, idx) {
                    continue;
                }
                let t = &pb.derived.interference_set[idx];
                let i_first = self.est[t.i] + pb.p[t.i] + t.delta <= self.lst[t.j];
                let j_first = self.est[t.j] + pb.p[t.j] + t.delta <= self.lst[t.i];
                match (i_first, j_first) {
                    (false, false) => return (Propagation::Pruned, rounds),
                    (true, false) => self.orders[idx] = Some(First::I),
                    (false, true) => self.orders[idx] = Some(First::J),
                    (true, true) => continue,
                }
                changed = true;
            }
            if !changed {
                return (Propagation::Consistent, rounds);
            }
        }
    }

    fn child(&self) -> Self {
        let mut c = self.clone();
        c.depth += 1;
        c
    }

    /// Children in exploration order; empty at a leaf.
    pub fn branch(&self, pb: &Problem) -> Vec<SearchNode> {
        let inst = pb.instance;
        let n = pb.n;

        // Yard locations, closest first.
        if let Some(i) = inst
            .inbound_shipments()
            .map(|s| s.id)
            .find(|&i| self.loc_of[i].is_none())
        {
            return pb
                .free_locs
                .iter()
                .filter(|&&k| !self.loc_used[k])
                .map(|&k| {
                    let mut c = self.child();
                    c.loc_of[i] = Some(k);
                    c.loc_used[k] = true;
                    c
                })
                .collect();
        }

        // Quay crane assignment, least-loaded crane first.
        if let Some(i) = (0..n)
            .filter(|&i| self.crane_of[i] == 0)
            .min_by_key(|&i| (pb.derived.eligible_qcs[i].len(), i))
        {
            let mut load = vec![0; inst.qc_count() as usize + 1];
            for j in 0..n {
                load[self.crane_of[j] as usize] += pb.p[j];
            }
            let mut cranes = pb.derived.eligible_qcs[i].clone();
            cranes.sort_by_key(|&q| (load[q as usize], q));
            return cranes
                .into_iter()
                .map(|q| {
                    let mut c = self.child();
                    c.crane_of[i] = q;
                    c
                })
                .collect();
        }

        // Sequencing on the crane with the most remaining work.
        let remaining = self.remaining(pb);
        if let Some((&crane, tasks)) = remaining.iter().max_by_key(|(&c, tasks)| {
            (
                tasks.iter().map(|&t| pb.p[t]).sum::<Time>(),
                std::cmp::Reverse(c),
            )
        }) {
            let mut cands: Vec<usize> = tasks
                .iter()
                .copied()
                .filter(|&r| {
                    !tasks
                        .iter()
                        .any(|&x| x != r && self.derived_arcs.contains_key(&(x, r)))
                })
                .collect();
            cands.sort_by_key(|&r| (self.est[r], r));
            return cands
                .into_iter()
                .map(|r| {
                    let mut c = self.child();
                    c.sequenced[r] = true;
                    match crane {
                        Crane::Qc(q) => c.qc_seq[q as usize - 1].push(r),
                        Crane::Yc(y) => c.yc_seq[y].push(r - n),
                    }
                    c
                })
                .collect();
        }

        // Interference orders, earlier start first.
        if let Some(idx) =
            (0..self.orders.len()).find(|&idx| self.orders[idx].is_none() && self.active(pb, idx))
        {
            let t = &pb.derived.interference_set[idx];
            let prefer = if self.est[t.i] <= self.est[t.j] {
                First::I
            } else {
                First::J
            };
            let other = if prefer == First::I {
                First::J
            } else {
                First::I
            };
            return [prefer, other]
                .into_iter()
                .map(|o| {
                    let mut c = self.child();
                    c.orders[idx] = Some(o);
                    c
                })
                .collect();
        }
        Vec::new()
    }

    /// Complete decisions, once every choice is made.
    pub fn decisions(&self, pb: &Problem) -> Option<Decisions> {
        let n = pb.n;
        if self.loc_of.iter().any(Option::is_none)
            || self.crane_of.contains(&0)
            || self.sequenced.iter().any(|&s| !s)
        {
            return None;
        }
        let mut interference_order = BTreeMap::new();
        for (idx, t) in pb.derived.interference_set.iter().enumerate() {
            if self.active(pb, idx) {
                let key = InterferenceKey {
                    i: t.i,
                    j: t.j,
                    v: t.v,
                    w: t.w,
                };
                interference_order.insert(key, self.orders[idx]?);
            }
        }
        Some(Decisions {
            yard_assignment: pb
                .instance
                .inbound_shipments()
                .map(|s| (s.id, self.loc_of[s.id].expect("located")))
                .collect(),
            qc_assignment: (0..n).map(|i| (i, self.crane_of[i])).collect(),
            qc_sequences: self.qc_seq.clone(),
            yc_sequences: self.yc_seq.clone(),
            interference_order,
        })
    }

    /// Fixes the location of inbound shipment `i`.
    pub fn assign_location(&mut self, i: usize, loc: usize) {
        self.loc_of[i] = Some(loc);
        self.loc_used[loc] = true;
    }

    /// Fixes the quay crane of shipment `i`.
    pub fn assign_crane(&mut self, i: usize, q: u32) {
        self.crane_of[i] = q;
    }

    /// Appends shipment `i` to the QC sequence of crane `q`.
    pub fn append_qc(&mut self, q: u32, i: usize) {
        self.crane_of[i] = q;
        self.qc_seq[q as usize - 1].push(i);
        self.sequenced[i] = true;
    }

    /// Appends shipment `i` to the sequence of yard crane `c`.
    pub fn append_yc(&mut self, pb: &Problem, c: usize, i: usize) {
        self.yc_seq[c].push(i);
        self.sequenced[pb.n + i] = true;
    }

    /// Fixes the order of interference tuple `idx`.
    pub fn order(&mut self, idx: usize, first: First) {
        self.orders[idx] = Some(first);
    }
}
