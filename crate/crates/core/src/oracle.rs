//! Exhaustive optimum for tiny instances.
//!
//! Every injective yard assignment, eligible QC assignment, permutation of
//! each crane's tasks (QC and YC) and order of each active interfering pair is
//! evaluated. No symmetry is exploited.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::derived::DerivedTables;
use crate::error::{Error, Result};
use crate::instance::{Direction, Instance, Time};
use crate::schedule::{active_interference, compute_schedule};
use crate::solution::{Decisions, First, InterferenceKey, Solution, Status};

/// Default combination budget.
pub const DEFAULT_LIMIT: u128 = 200_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub best_objective: i64,
    pub best_solution: Solution,
    /// Complete decision combinations visited, including cyclic ones.
    pub enumerated: u128,
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Injective maps from `ships` (in order) to distinct entries of `locs`.
fn injective_assignments(ships: &[usize], locs: &[usize]) -> Vec<Vec<usize>> {
    fn rec(
        depth: usize,
        n: usize,
        locs: &[usize],
        used: &mut Vec<bool>,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if depth == n {
            out.push(cur.clone());
            return;
        }
        for (idx, &k) in locs.iter().enumerate() {
            if !used[idx] {
                used[idx] = true;
                cur.push(k);
                rec(depth + 1, n, locs, used, cur, out);
                cur.pop();
                used[idx] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(
        0,
        ships.len(),
        locs,
        &mut vec![false; locs.len()],
        &mut Vec::new(),
        &mut out,
    );
    out
}

/// All permutations of `items` in lexicographic order.
fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = items.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    loop {
        let Some(p) = (1..cur.len()).rev().find(|&p| cur[p - 1] < cur[p]) else {
            return out;
        };
        let pivot = p - 1;
        let swap = (p..cur.len())
            .rev()
            .find(|&s| cur[s] > cur[pivot])
            .expect("successor exists");
        cur.swap(pivot, swap);
        cur[p..].reverse();
        out.push(cur.clone());
    }
}

/// The first decision level: yard assignment and QC assignment.
struct Assignment {
    loc_of: Vec<usize>,
    crane_of: Vec<u32>,
}

fn assignments(
    instance: &Instance,
    derived: &DerivedTables,
    limit: u128,
) -> Result<Vec<Assignment>> {
    let inbound: Vec<usize> = instance.inbound_shipments().map(|s| s.id).collect();
    let locs = instance.inbound_locations();
    if locs.len() < inbound.len() {
        return Err(Error::NoFeasibleSolution);
    }
    let yard_count: u128 = (0..inbound.len())
        .map(|r| (locs.len() - r) as u128)
        .product();
    let qc_count: u128 = derived
        .eligible_qcs
        .iter()
        .map(|e| e.len() as u128)
        .product();
    let first_level = yard_count.saturating_mul(qc_count);
    if first_level > limit {
        return Err(Error::BudgetExceeded {
            estimated: first_level,
            limit,
        });
    }

    let n = instance.num_shipments();
    let mut base_loc = vec![usize::MAX; n];
    for s in instance.outbound_shipments() {
        base_loc[s.id] = s.fixed_location.expect("outbound has a fixed location");
    }
    let mut qc_choices: Vec<Vec<u32>> = vec![Vec::new()];
    for elig in &derived.eligible_qcs {
        qc_choices = qc_choices
            .into_iter()
            .flat_map(|prefix| {
                elig.iter().map(move |&q| {
                    let mut next = prefix.clone();
                    next.push(q);
                    next
                })
            })
            .collect();
    }

    let mut out = Vec::new();
    for yard in injective_assignments(&inbound, locs) {
        let mut loc_of = base_loc.clone();
        for (&i, &k) in inbound.iter().zip(&yard) {
            loc_of[i] = k;
        }
        for crane_of in &qc_choices {
            out.push(Assignment {
                loc_of: loc_of.clone(),
                crane_of: crane_of.clone(),
            });
        }
    }
    Ok(out)
}

/// Exact number of complete decision combinations, saturating just above `limit`.
pub fn count_combinations(
    instance: &Instance,
    derived: &DerivedTables,
    limit: u128,
) -> Result<u128> {
    let mut total: u128 = 0;
    for a in assignments(instance, derived, limit)? {
        total = total.saturating_add(combinations_of(instance, derived, &a));
        if total > limit {
            return Ok(total);
        }
    }
    Ok(total)
}

fn groups(instance: &Instance, a: &Assignment) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut qc = vec![Vec::new(); instance.qc_count() as usize];
    let mut yc = vec![Vec::new(); instance.yc_count()];
    for i in 0..instance.num_shipments() {
        qc[a.crane_of[i] as usize - 1].push(i);
        yc[instance.yc_of(a.loc_of[i])].push(i);
    }
    (qc, yc)
}

fn combinations_of(instance: &Instance, derived: &DerivedTables, a: &Assignment) -> u128 {
    let (qc, yc) = groups(instance, a);
    let active = active_interference(derived, &a.crane_of).len() as u32;
    qc.iter()
        .chain(&yc)
        .map(|g| factorial(g.len()))
        .fold(1u128, u128::saturating_mul)
        .saturating_mul(1u128.checked_shl(active).unwrap_or(u128::MAX))
}

/// Longest paths over positive arcs; `None` on a cycle.
fn longest_paths(nodes: usize, arcs: &[(usize, usize, Time)], est: &mut Vec<Time>) -> bool {
    est.clear();
    est.resize(nodes, 0);
    for _ in 0..=nodes {
        let mut changed = false;
        for &(u, v, len) in arcs {
            if est[u] + len > est[v] {
                est[v] = est[u] + len;
                changed = true;
            }
        }
        if !changed {
            return true;
        }
    }
    false
}

struct Best {
    objective: i64,
    qc_perm: Vec<usize>,
    yc_perm: Vec<usize>,
    orders: u128,
}

/// Minimum over every sequencing of one assignment; ties go to the first found.
fn search_assignment(
    instance: &Instance,
    derived: &DerivedTables,
    a: &Assignment,
) -> (Option<Best>, u128) {
    let n = instance.num_shipments();
    let ships = instance.shipments();
    let (qc_groups, yc_groups) = groups(instance, a);
    let qc_perms: Vec<Vec<Vec<usize>>> = qc_groups.iter().map(|g| permutations(g)).collect();
    let yc_perms: Vec<Vec<Vec<usize>>> = yc_groups.iter().map(|g| permutations(g)).collect();
    let active = active_interference(derived, &a.crane_of);

    let mut base = Vec::new();
    for s in ships {
        match s.direction {
            Direction::Inbound => {
                base.push((s.id, n + s.id, s.qc_time + instance.tt(a.loc_of[s.id])))
            }
            Direction::Outbound => {
                base.push((n + s.id, s.id, s.yc_time + s.yt_outbound_time.unwrap_or(0)))
            }
        }
    }

    let radices: Vec<usize> = qc_perms.iter().chain(&yc_perms).map(Vec::len).collect();
    let mut digits = vec![0usize; radices.len()];
    let mut arcs = Vec::with_capacity(base.len() + 2 * n + active.len());
    let mut est = Vec::with_capacity(2 * n);
    let mut best: Option<Best> = None;
    let mut visited: u128 = 0;
    let order_count: u128 = 1u128 << active.len();

    loop {
        arcs.clear();
        arcs.extend_from_slice(&base);
        for (g, perms) in qc_perms.iter().enumerate() {
            for w in perms[digits[g]].windows(2) {
                arcs.push((w[0], w[1], ships[w[0]].qc_time + derived.eqc(w[0], w[1])));
            }
        }
        for (g, perms) in yc_perms.iter().enumerate() {
            for w in perms[digits[qc_perms.len() + g]].windows(2) {
                let len = ships[w[0]].yc_time + instance.tyc(a.loc_of[w[0]], a.loc_of[w[1]]);
                arcs.push((n + w[0], n + w[1], len));
            }
        }
        let fixed = arcs.len();
        for bits in 0..order_count {
            visited += 1;
            arcs.truncate(fixed);
            for (b, (key, delta)) in active.iter().enumerate() {
                let (f, s) = if bits >> b & 1 == 0 {
                    (key.i, key.j)
                } else {
                    (key.j, key.i)
                };
                arcs.push((f, s, ships[f].qc_time + delta));
            }
            if !longest_paths(2 * n, &arcs, &mut est) {
                continue;
            }
            let mut done = vec![0; instance.vessels().len()];
            for s in ships {
                let end = match s.direction {
                    Direction::Inbound => est[n + s.id] + s.yc_time,
                    Direction::Outbound => est[s.id] + s.qc_time,
                };
                done[s.vessel] = done[s.vessel].max(end);
            }
            let obj: i64 = instance
                .vessels()
                .iter()
                .map(|v| v.weight * done[v.id])
                .sum();
            if best.as_ref().is_none_or(|b| obj < b.objective) {
                best = Some(Best {
                    objective: obj,
                    qc_perm: digits[..qc_perms.len()].to_vec(),
                    yc_perm: digits[qc_perms.len()..].to_vec(),
                    orders: bits,
                });
            }
        }

        // Odometer over permutation choices, last crane fastest.
        let mut pos = radices.len();
        loop {
            if pos == 0 {
                return (best, visited);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}

fn decisions_of(
    instance: &Instance,
    derived: &DerivedTables,
    a: &Assignment,
    b: &Best,
) -> Decisions {
    let (qc_groups, yc_groups) = groups(instance, a);
    let qc_sequences = qc_groups
        .iter()
        .zip(&b.qc_perm)
        .map(|(g, &d)| permutations(g).swap_remove(d))
        .collect();
    let yc_sequences = yc_groups
        .iter()
        .zip(&b.yc_perm)
        .map(|(g, &d)| permutations(g).swap_remove(d))
        .collect();
    let interference_order: BTreeMap<InterferenceKey, First> =
        active_interference(derived, &a.crane_of)
            .into_iter()
            .enumerate()
            .map(|(bit, (key, _))| {
                (
                    key,
                    if b.orders >> bit & 1 == 0 {
                        First::I
                    } else {
                        First::J
                    },
                )
            })
            .collect();
    Decisions {
        yard_assignment: instance
            .inbound_shipments()
            .map(|s| (s.id, a.loc_of[s.id]))
            .collect(),
        qc_assignment: a
            .crane_of
            .iter()
            .enumerate()
            .map(|(i, &q)| (i, q))
            .collect(),
        qc_sequences,
        yc_sequences,
        interference_order,
    }
}

/// Proven optimum by exhaustion. Fails with [`Error::BudgetExceeded`] before
/// enumerating anything when the instance has more than `limit` combinations.
pub fn brute_force(
    instance: &Instance,
    derived: &DerivedTables,
    limit: u128,
) -> Result<OracleResult> {
    let total = count_combinations(instance, derived, limit)?;
    if total > limit {
        return Err(Error::BudgetExceeded {
            estimated: total,
            limit,
        });
    }
    let firsts = assignments(instance, derived, limit)?;
    let results: Vec<(Option<Best>, u128)> = firsts
        .par_iter()
        .map(|a| search_assignment(instance, derived, a))
        .collect();

    let enumerated = results.iter().map(|r| r.1).sum();
    let (idx, best) = results
        .into_iter()
        .enumerate()
        .filter_map(|(idx, (b, _))| b.map(|b| (idx, b)))
        .min_by_key(|(idx, b)| (b.objective, *idx))
        .ok_or(Error::NoFeasibleSolution)?;

    let decisions = decisions_of(instance, derived, &firsts[idx], &best);
    let mut solution = compute_schedule(instance, derived, &decisions)?;
    debug_assert_eq!(solution.objective, best.objective);
    solution.status = Status::Optimal;
    Ok(OracleResult {
        best_objective: solution.objective,
        best_solution: solution,
        enumerated,
    })
}
