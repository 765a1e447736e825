//! Earliest-start timing of a fixed set of decisions, and the objective.
//!
//! Every shipment has two tasks: its QC handling (node `i`) and its YC
//! handling (node `n + i`). Decisions induce arcs `u -> v` of length `L`,
//! meaning `start(v) >= start(u) + L`; start times are longest paths from 0.

use std::collections::BTreeMap;

use crate::derived::DerivedTables;
use crate::error::{Error, Result};
use crate::instance::{Direction, Instance, Time};
use crate::solution::{Decisions, InterferenceKey, Solution, Starts, Status};

/// Directed graph with weighted precedence arcs.
#[derive(Debug, Clone)]
pub struct PrecedenceGraph {
    succ: Vec<Vec<(usize, Time)>>,
}

impl PrecedenceGraph {
    pub fn new(nodes: usize) -> Self {
        Self {
            succ: vec![Vec::new(); nodes],
        }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn add_arc(&mut self, from: usize, to: usize, length: Time) {
        self.succ[from].push((to, length));
    }

    pub fn successors(&self, node: usize) -> &[(usize, Time)] {
        &self.succ[node]
    }

    /// Kahn's algorithm; `None` when the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.succ.len();
        let mut indeg = vec![0usize; n];
        for arcs in &self.succ {
            for &(to, _) in arcs {
                indeg[to] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..n).rev().filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = stack.pop() {
            order.push(u);
            for &(to, _) in &self.succ[u] {
                indeg[to] -= 1;
                if indeg[to] == 0 {
                    stack.push(to);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Longest path to every node from a common time-0 source, never below `release`.
    pub fn longest_paths_from(&self, order: &[usize], release: &[Time]) -> Vec<Time> {
        let mut est = release.to_vec();
        for &u in order {
            let t = est[u];
            for &(to, len) in &self.succ[u] {
                if t + len > est[to] {
                    est[to] = t + len;
                }
            }
        }
        est
    }

    /// Longest paths from time 0; `None` on a cycle.
    pub fn longest_paths(&self) -> Option<Vec<Time>> {
        let order = self.topological_order()?;
        Some(self.longest_paths_from(&order, &vec![0; self.len()]))
    }
}

pub fn qc_node(shipment: usize) -> usize {
    shipment
}

pub fn yc_node(n: usize, shipment: usize) -> usize {
    n + shipment
}

/// Yard location of a shipment under a yard assignment.
pub fn location_of(
    instance: &Instance,
    yard: &BTreeMap<usize, usize>,
    shipment: usize,
) -> Option<usize> {
    let s = instance.shipment(shipment);
    match s.direction {
        Direction::Outbound => s.fixed_location,
        Direction::Inbound => yard.get(&shipment).copied(),
    }
}

/// Interference tuples activated by a crane placement (`crane_of[i]`, 0 = unplaced).
pub fn active_interference(
    derived: &DerivedTables,
    crane_of: &[u32],
) -> Vec<(InterferenceKey, Time)> {
    derived
        .interference_set
        .iter()
        .filter(|t| crane_of[t.i] == t.v && crane_of[t.j] == t.w)
        .map(|t| {
            (
                InterferenceKey {
                    i: t.i,
                    j: t.j,
                    v: t.v,
                    w: t.w,
                },
                t.delta,
            )
        })
        .collect()
}

/// Structural checks on decisions; returns per-shipment crane and location.
fn check_decisions(
    instance: &Instance,
    derived: &DerivedTables,
    d: &Decisions,
) -> Result<(Vec<u32>, Vec<usize>)> {
    let bad = |msg: String| Err(Error::InvalidDecisions(msg));
    let n = instance.num_shipments();

    if d.qc_sequences.len() != instance.qc_count() as usize {
        return bad(format!(
            "{} QC sequences for {} quay cranes",
            d.qc_sequences.len(),
            instance.qc_count()
        ));
    }
    if d.yc_sequences.len() != instance.yc_count() {
        return bad(format!(
            "{} YC sequences for {} yard cranes",
            d.yc_sequences.len(),
            instance.yc_count()
        ));
    }

    let mut crane_of = vec![0u32; n];
    for (q0, seq) in d.qc_sequences.iter().enumerate() {
        let q = q0 as u32 + 1;
        for &i in seq {
            if i >= n {
                return bad(format!("QC {q} sequence holds unknown shipment {i}"));
            }
            if crane_of[i] != 0 {
                return bad(format!(
                    "shipment {i} appears more than once in QC sequences"
                ));
            }
            if !derived.is_eligible(i, q) {
                return bad(format!("shipment {i} is not eligible for QC {q}"));
            }
            crane_of[i] = q;
        }
    }
    for (i, &q) in crane_of.iter().enumerate() {
        if q == 0 {
            return bad(format!("shipment {i} is in no QC sequence"));
        }
        if d.qc_assignment.get(&i) != Some(&q) {
            return bad(format!(
                "qc_assignment of shipment {i} disagrees with its sequence (QC {q})"
            ));
        }
    }

    let mut used = vec![false; instance.yard_locations().len()];
    let mut loc_of = vec![usize::MAX; n];
    for s in instance.shipments() {
        let loc = match s.direction {
            Direction::Outbound => {
                if d.yard_assignment.contains_key(&s.id) {
                    return bad(format!("outbound shipment {} has a yard assignment", s.id));
                }
                s.fixed_location.expect("validated outbound")
            }
            Direction::Inbound => {
                let Some(&k) = d.yard_assignment.get(&s.id) else {
                    return bad(format!("inbound shipment {} has no yard location", s.id));
                };
                if instance.inbound_locations().binary_search(&k).is_err() {
                    return bad(format!(
                        "location {k} is not available for inbound shipment {}",
                        s.id
                    ));
                }
                if used[k] {
                    return bad(format!("location {k} is assigned twice"));
                }
                used[k] = true;
                k
            }
        };
        loc_of[s.id] = loc;
    }

    let mut seen = vec![false; n];
    for (c, seq) in d.yc_sequences.iter().enumerate() {
        for &i in seq {
            if i >= n {
                return bad(format!("YC {c} sequence holds unknown shipment {i}"));
            }
            if seen[i] {
                return bad(format!(
                    "shipment {i} appears more than once in YC sequences"
                ));
            }
            if instance.yc_of(loc_of[i]) != c {
                return bad(format!(
                    "shipment {i} is on YC {c} but its location belongs to another YC"
                ));
            }
            seen[i] = true;
        }
    }
    if let Some(i) = seen.iter().position(|&s| !s) {
        return bad(format!("shipment {i} is in no YC sequence"));
    }

    for (key, _) in active_interference(derived, &crane_of) {
        if !d.interference_order.contains_key(&key) {
            return bad(format!(
                "no order for interfering shipments {} and {} on QCs {} and {}",
                key.i, key.j, key.v, key.w
            ));
        }
    }
    Ok((crane_of, loc_of))
}

/// Builds the precedence graph of complete decisions. `loc_of[i]` is the
/// location of every shipment.
pub(crate) fn decision_graph(
    instance: &Instance,
    derived: &DerivedTables,
    d: &Decisions,
    crane_of: &[u32],
    loc_of: &[usize],
) -> PrecedenceGraph {
    let n = instance.num_shipments();
    let mut g = PrecedenceGraph::new(2 * n);
    let ships = instance.shipments();

    for seq in &d.qc_sequences {
        for pair in seq.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            g.add_arc(qc_node(a), qc_node(b), ships[a].qc_time + derived.eqc(a, b));
        }
    }
    for seq in &d.yc_sequences {
        for pair in seq.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            g.add_arc(
                yc_node(n, a),
                yc_node(n, b),
                ships[a].yc_time + derived.eyc(loc_of[a], loc_of[b]),
            );
        }
    }
    for s in ships {
        match s.direction {
            Direction::Inbound => g.add_arc(
                qc_node(s.id),
                yc_node(n, s.id),
                s.qc_time + instance.tt(loc_of[s.id]),
            ),
            Direction::Outbound => g.add_arc(
                yc_node(n, s.id),
                qc_node(s.id),
                s.yc_time + s.yt_outbound_time.expect("validated outbound"),
            ),
        }
    }
    for (key, delta) in active_interference(derived, crane_of) {
        let (first, second) = key.ordered(d.interference_order[&key]);
        g.add_arc(
            qc_node(first),
            qc_node(second),
            ships[first].qc_time + delta,
        );
    }
    g
}

/// Per-vessel completion: the last YC end of its inbound shipments and QC end
/// of its outbound ones. Vessels without shipments complete at 0.
pub fn vessel_completions(instance: &Instance, starts: &Starts) -> Vec<Time> {
    let mut done = vec![0; instance.vessels().len()];
    for s in instance.shipments() {
        let end = match s.direction {
            Direction::Inbound => starts.yc[s.id] + s.yc_time,
            Direction::Outbound => starts.qc[s.id] + s.qc_time,
        };
        done[s.vessel] = done[s.vessel].max(end);
    }
    done
}

/// Weighted sum of vessel completion times under the solution's start times.
pub fn objective_of(instance: &Instance, solution: &Solution) -> i64 {
    weighted_sum(instance, &vessel_completions(instance, &solution.starts))
}

pub(crate) fn weighted_sum(instance: &Instance, completions: &[Time]) -> i64 {
    instance
        .vessels()
        .iter()
        .zip(completions)
        .map(|(v, &c)| v.weight * c)
        .sum()
}

/// Start times and objective for complete decisions, without assembling a [`Solution`].
pub(crate) fn evaluate(
    instance: &Instance,
    derived: &DerivedTables,
    d: &Decisions,
    crane_of: &[u32],
    loc_of: &[usize],
) -> Option<(Starts, i64)> {
    let n = instance.num_shipments();
    let times = decision_graph(instance, derived, d, crane_of, loc_of).longest_paths()?;
    let starts = Starts {
        qc: times[..n].to_vec(),
        yc: times[n..].to_vec(),
    };
    let obj = weighted_sum(instance, &vessel_completions(instance, &starts));
    Some((starts, obj))
}

pub(crate) fn assemble(
    instance: &Instance,
    d: &Decisions,
    loc_of: &[usize],
    starts: Starts,
    status: Status,
) -> Solution {
    let yt_time = d
        .yard_assignment
        .iter()
        .map(|(&i, &k)| (i, instance.tt(k)))
        .collect();
    let mut yc_empty = BTreeMap::new();
    for seq in &d.yc_sequences {
        for pair in seq.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if instance.shipment(a).is_inbound() || instance.shipment(b).is_inbound() {
                yc_empty.insert((a, b), instance.tyc(loc_of[a], loc_of[b]));
            }
        }
    }
    let per_vessel_completion = vessel_completions(instance, &starts);
    let objective = weighted_sum(instance, &per_vessel_completion);
    Solution {
        yard_assignment: d.yard_assignment.clone(),
        qc_assignment: d.qc_assignment.clone(),
        qc_sequences: d.qc_sequences.clone(),
        yc_sequences: d.yc_sequences.clone(),
        interference_order: d.interference_order.clone(),
        starts,
        yt_time,
        yc_empty,
        per_vessel_completion,
        objective,
        status,
    }
}

/// Earliest start times for complete decisions.
///
/// Fails with [`Error::InvalidDecisions`] on structurally broken decisions and
/// [`Error::CyclicOrdering`] when the orderings admit no schedule.
pub fn compute_schedule(
    instance: &Instance,
    derived: &DerivedTables,
    decisions: &Decisions,
) -> Result<Solution> {
    let (crane_of, loc_of) = check_decisions(instance, derived, decisions)?;
    let (starts, _) =
        evaluate(instance, derived, decisions, &crane_of, &loc_of).ok_or(Error::CyclicOrdering)?;
    Ok(assemble(
        instance,
        decisions,
        &loc_of,
        starts,
        Status::Feasible,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::InstanceBuilder;
    use crate::solution::First;

    fn decisions(qc: Vec<Vec<usize>>, yc: Vec<Vec<usize>>, yard: &[(usize, usize)]) -> Decisions {
        let mut qc_assignment = BTreeMap::new();
        for (q0, seq) in qc.iter().enumerate() {
            for &i in seq {
                qc_assignment.insert(i, q0 as u32 + 1);
            }
        }
        Decisions {
            yard_assignment: yard.iter().copied().collect(),
            qc_assignment,
            qc_sequences: qc,
            yc_sequences: yc,
            interference_order: BTreeMap::new(),
        }
    }

    #[test]
    fn single_outbound_chain() {
        let mut b = InstanceBuilder::new(2, 1, 1);
        b.outbound(0, 1, 8, 10, 0, 5);
        let inst = b.build().unwrap();
        let der = DerivedTables::build(&inst).unwrap();
        let sol =
            compute_schedule(&inst, &der, &decisions(vec![vec![0]], vec![vec![0]], &[])).unwrap();
        assert_eq!(sol.starts.yc, vec![0]);
        assert_eq!(sol.starts.qc, vec![15]);
        assert_eq!(sol.objective, 23);
    }

    #[test]
    fn single_inbound_chain() {
        let mut b = InstanceBuilder::new(2, 1, 1);
        let k = b.inbound_location(0, 5);
        b.inbound(0, 1, 8, 10);
        let inst = b.build().unwrap();
        let der = DerivedTables::build(&inst).unwrap();
        let sol = compute_schedule(
            &inst,
            &der,
            &decisions(vec![vec![0]], vec![vec![0]], &[(0, k)]),
        )
        .unwrap();
        assert_eq!(sol.starts.qc, vec![0]);
        assert_eq!(sol.starts.yc, vec![13]);
        assert_eq!(sol.objective, 23);
        assert_eq!(sol.yt_time[&0], 5);
    }

    /// Two outbound shipments at bays 4 and 5 on different cranes of a
    /// 9-bay / 2-QC quay: Δ(0,1,1,2) = (4-5+2)*3 = 3 with Q_0 = 4.
    fn interfering_pair() -> (Instance, DerivedTables) {
        let mut b = InstanceBuilder::new(9, 2, 2);
        b.outbound(0, 4, 4, 2, 0, 0);
        b.outbound(0, 5, 6, 2, 1, 0);
        let inst = b.build().unwrap();
        let der = DerivedTables::build(&inst).unwrap();
        (inst, der)
    }

    #[test]
    fn interference_arc_delays_second_shipment() {
        let (inst, der) = interfering_pair();
        assert_eq!(der.interference_time(0, 1, 1, 2), 3);
        let mut d = decisions(vec![vec![0], vec![1]], vec![vec![0], vec![1]], &[]);
        let key = InterferenceKey {
            i: 0,
            j: 1,
            v: 1,
            w: 2,
        };
        d.interference_order.insert(key, First::I);
        let sol = compute_schedule(&inst, &der, &d).unwrap();

        // Brute-force longest path on the two QC nodes: both released at
        // Y + tyt = 2, arc 0 -> 1 of length Q_0 + Δ.
        let release = [2i64, 2];
        let brute_start_1 = (release[0] + 4 + 3).max(release[1]);
        assert_eq!(sol.starts.qc, vec![2, brute_start_1]);
        assert!(sol.starts.qc[1] >= sol.starts.qc[0] + 4 + 3);
    }

    #[test]
    fn missing_interference_order_is_rejected() {
        let (inst, der) = interfering_pair();
        let d = decisions(vec![vec![0], vec![1]], vec![vec![0], vec![1]], &[]);
        assert!(matches!(
            compute_schedule(&inst, &der, &d),
            Err(Error::InvalidDecisions(_))
        ));
    }

    #[test]
    fn incompatible_orders_are_cyclic() {
        // Inbound 0 then outbound 1 on the QC, but the YC handles 1 before 0:
        // qc0 -> yc0 -> yc1 -> qc1 is fine, so flip the QC order instead.
        let mut b = InstanceBuilder::new(2, 1, 1);
        let k = b.inbound_location(0, 5);
        b.inbound(0, 1, 8, 10);
        b.outbound(0, 2, 8, 10, 0, 5);
        let inst = b.build().unwrap();
        let der = DerivedTables::build(&inst).unwrap();
        let d = decisions(vec![vec![1, 0]], vec![vec![0, 1]], &[(0, k)]);
        assert!(matches!(
            compute_schedule(&inst, &der, &d),
            Err(Error::CyclicOrdering)
        ));
        let ok = decisions(vec![vec![0, 1]], vec![vec![0, 1]], &[(0, k)]);
        assert!(compute_schedule(&inst, &der, &ok).is_ok());
    }

    #[test]
    fn objective_is_weighted_sum() {
        let mut b = InstanceBuilder::new(2, 1, 2).vessel_weights(&[2, 3]);
        b.outbound(0, 1, 5, 3, 0, 2); // completes at 10
        b.outbound(1, 2, 10, 5, 1, 2); // released at 7, after 0 on the QC
        let inst = b.build().unwrap();
        let der = DerivedTables::build(&inst).unwrap();
        let sol = compute_schedule(
            &inst,
            &der,
            &decisions(vec![vec![0, 1]], vec![vec![0], vec![1]], &[]),
        )
        .unwrap();
        assert_eq!(sol.per_vessel_completion, vec![10, 23]);
        assert_eq!(sol.objective, 2 * 10 + 3 * 23);
        assert_eq!(objective_of(&inst, &sol), sol.objective);
    }

    #[test]
    fn weighted_sum_of_given_completions() {
        let mut b = InstanceBuilder::new(2, 1, 1).vessel_weights(&[2, 3]);
        b.outbound(0, 1, 5, 3, 0, 2);
        let inst = b.build().unwrap();
        assert_eq!(weighted_sum(&inst, &[10, 20]), 80);
        assert_eq!(weighted_sum(&inst, &[100, 0]), 200);
    }
}
