//! Mixed-integer model export in CPLEX LP format.
//!
//! Shipment `i` of the instance is shipment `i + 1` in the model; `0` and
//! `N = n + 1` are the dummy first and last shipments of every crane.
//! Locations, yard cranes and vessels keep their ids, quay cranes their
//! 1-based numbers. Variables are named
//! `x_i_k`, `z_i_j_q`, `qz_i_j`, `v_i_j_c`, `theta_i_k_j_l`, `sqc_i`,
//! `syc_i`, `t_i`, `sy_i_j` and `Cmax_s`.
//!
//! Interference rows are emitted for both orders of each interfering pair,
//! so either shipment may go first.

mod lp;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use lp::{parse_values, write_lp};

use crate::derived::DerivedTables;
use crate::error::{Error, Result};
use crate::instance::{Direction, Instance, Time};
use crate::schedule::compute_schedule;
use crate::solution::{Decisions, First, InterferenceKey, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Binary,
    Continuous,
}

/// What a model variable stands for, in instance ids (shipments 0-based,
/// dummies as `None`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VarMeaning {
    Location {
        shipment: usize,
        location: usize,
    },
    QcSuccessor {
        from: Option<usize>,
        to: Option<usize>,
        qc: u32,
    },
    QcBefore {
        first: usize,
        second: usize,
    },
    YcSuccessor {
        from: Option<usize>,
        to: Option<usize>,
        yc: usize,
    },
    LocationPair {
        i: usize,
        k: usize,
        j: usize,
        l: usize,
    },
    QcStart {
        shipment: usize,
    },
    YcStart {
        shipment: usize,
    },
    TruckTime {
        shipment: usize,
    },
    YcTravel {
        from: usize,
        to: usize,
    },
    WeightedCompletion {
        vessel: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub meaning: VarMeaning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    /// Constraint family, `"2-02"` .. `"2-27"`.
    pub family: String,
    pub terms: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

impl Row {
    pub fn activity(&self, values: &[i64]) -> i64 {
        self.terms.iter().map(|&(v, c)| c * values[v]).sum()
    }

    pub fn satisfied(&self, values: &[i64]) -> bool {
        let a = self.activity(values);
        match self.sense {
            Sense::Le => a <= self.rhs,
            Sense::Ge => a >= self.rhs,
            Sense::Eq => a == self.rhs,
        }
    }
}

/// Linear model with integer coefficients; minimize the sum of `objective` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearModel {
    pub variables: Vec<Variable>,
    pub objective: Vec<usize>,
    pub rows: Vec<Row>,
    index: BTreeMap<String, usize>,
}

impl LinearModel {
    pub fn var(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Names of rows violated by a full assignment.
    pub fn violated_rows(&self, values: &[i64]) -> Vec<&Row> {
        self.rows.iter().filter(|r| !r.satisfied(values)).collect()
    }

    pub fn objective_value(&self, values: &[i64]) -> i64 {
        self.objective.iter().map(|&v| values[v]).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExportOptions {
    /// Overrides the computed big-M.
    pub big_m: Option<i64>,
    /// Constraint families to leave out, e.g. `"2-25"`.
    pub skip_families: BTreeSet<String>,
}

/// Companion data of an exported model; serialized as the mapping file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MipArtifacts {
    pub variables: Vec<Variable>,
    pub dummy_start: usize,
    pub dummy_end: usize,
    pub big_m: i64,
    pub rows_per_family: BTreeMap<String, usize>,
}

impl MipArtifacts {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("mapping serializes")
    }
}

/// Start-time horizon of any earliest-start schedule, and the largest lag
/// added on top of a handling time by any arc or model row.
pub fn horizon(instance: &Instance, derived: &DerivedTables) -> (i64, i64) {
    let n = instance.num_shipments() as i64;
    let work: i64 = instance
        .shipments()
        .iter()
        .map(|s| s.qc_time + s.yc_time)
        .sum();
    let max_of = |it: &mut dyn Iterator<Item = Time>| it.max().unwrap_or(0);
    let lag = [
        max_of(&mut derived.qc_empty_travel.iter().flatten().copied()),
        max_of(&mut derived.yc_empty_travel.iter().flatten().copied()),
        max_of(&mut instance.travel().yt_inbound_transfer.iter().copied()),
        max_of(
            &mut instance
                .shipments()
                .iter()
                .filter_map(|s| s.yt_outbound_time),
        ),
        max_of(&mut derived.interference_set.iter().map(|t| t.delta)),
    ]
    .into_iter()
    .max()
    .unwrap_or(0);
    (work + 2 * n * lag, lag)
}

/// Smallest big-M this exporter considers safe: horizon plus the largest
/// handling time plus the largest lag.
pub fn default_big_m(instance: &Instance, derived: &DerivedTables) -> i64 {
    let (h, lag) = horizon(instance, derived);
    let p = instance
        .shipments()
        .iter()
        .map(|s| s.qc_time.max(s.yc_time))
        .max()
        .unwrap_or(0);
    h + p + lag
}

struct Builder {
    variables: Vec<Variable>,
    index: BTreeMap<String, usize>,
    rows: Vec<Row>,
    counters: BTreeMap<String, usize>,
    skip: BTreeSet<String>,
}

impl Builder {
    fn add_var(&mut self, name: String, kind: VarKind, meaning: VarMeaning) -> usize {
        let id = self.variables.len();
        self.index.insert(name.clone(), id);
        self.variables.push(Variable {
            name,
            kind,
            meaning,
        });
        id
    }

    fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn row(&mut self, family: &str, terms: Vec<(usize, i64)>, sense: Sense, rhs: i64) {
        if self.skip.contains(family) || terms.is_empty() {
            return;
        }
        let count = self.counters.entry(family.to_string()).or_insert(0);
        let name = format!("c{}_{}", family.replace('-', "_"), count);
        *count += 1;
        self.rows.push(Row {
            name,
            family: family.to_string(),
            terms,
            sense,
            rhs,
        });
    }
}

/// Model index of instance shipment `i`.
fn m(i: usize) -> usize {
    i + 1
}

/// Sets of real shipments each crane may handle.
struct CraneSets {
    /// `qc[q-1]`: shipments eligible for QC `q`.
    qc: Vec<Vec<usize>>,
    /// `yc[c]`: shipments that may be handled by YC `c`.
    yc: Vec<Vec<usize>>,
}

fn crane_sets(instance: &Instance, derived: &DerivedTables) -> CraneSets {
    let n = instance.num_shipments();
    let qc = (1..=instance.qc_count())
        .map(|q| (0..n).filter(|&i| derived.is_eligible(i, q)).collect())
        .collect();
    let inbound_ycs: BTreeSet<usize> = instance
        .inbound_locations()
        .iter()
        .map(|&k| instance.yc_of(k))
        .collect();
    let yc = (0..instance.yc_count())
        .map(|c| {
            instance
                .shipments()
                .iter()
                .filter(|s| match s.direction {
                    Direction::Inbound => inbound_ycs.contains(&c),
                    Direction::Outbound => instance.yc_of(s.fixed_location.expect("outbound")) == c,
                })
                .map(|s| s.id)
                .collect()
        })
        .collect();
    CraneSets { qc, yc }
}

/// Builds the model and its mapping.
pub fn build_model(
    instance: &Instance,
    derived: &DerivedTables,
    options: &ExportOptions,
) -> (LinearModel, MipArtifacts) {
    let n = instance.num_shipments();
    let end = n + 1;
    let big_m = options
        .big_m
        .unwrap_or_else(|| default_big_m(instance, derived));
    let ships = instance.shipments();
    let inbound: Vec<usize> = instance.inbound_shipments().map(|s| s.id).collect();
    let outbound: Vec<usize> = instance.outbound_shipments().map(|s| s.id).collect();
    let lu = instance.inbound_locations().to_vec();
    let sets = crane_sets(instance, derived);
    let is_in = |i: usize| ships[i].is_inbound();
    let fixed = |i: usize| ships[i].fixed_location.expect("outbound");

    let mut b = Builder {
        variables: Vec::new(),
        index: BTreeMap::new(),
        rows: Vec::new(),
        counters: BTreeMap::new(),
        skip: options.skip_families.clone(),
    };

    // Variables.
    for &i in &inbound {
        for &k in &lu {
            b.add_var(
                format!("x_{}_{k}", m(i)),
                VarKind::Binary,
                VarMeaning::Location {
                    shipment: i,
                    location: k,
                },
            );
        }
    }
    for (q0, set) in sets.qc.iter().enumerate() {
        let q = q0 as u32 + 1;
        let froms = std::iter::once(None).chain(set.iter().map(|&i| Some(i)));
        for from in froms {
            let tos = set.iter().map(|&j| Some(j)).chain(std::iter::once(None));
            for to in tos {
                if from.is_some() && from == to {
                    continue;
                }
                let (a, z) = (from.map_or(0, m), to.map_or(end, m));
                b.add_var(
                    format!("z_{a}_{z}_{q}"),
                    VarKind::Binary,
                    VarMeaning::QcSuccessor { from, to, qc: q },
                );
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                b.add_var(
                    format!("qz_{}_{}", m(i), m(j)),
                    VarKind::Binary,
                    VarMeaning::QcBefore {
                        first: i,
                        second: j,
                    },
                );
            }
        }
    }
    for (c, set) in sets.yc.iter().enumerate() {
        let froms = std::iter::once(None).chain(set.iter().map(|&i| Some(i)));
        for from in froms {
            let tos = set.iter().map(|&j| Some(j)).chain(std::iter::once(None));
            for to in tos {
                if from.is_some() && from == to {
                    continue;
                }
                let (a, z) = (from.map_or(0, m), to.map_or(end, m));
                b.add_var(
                    format!("v_{a}_{z}_{c}"),
                    VarKind::Binary,
                    VarMeaning::YcSuccessor { from, to, yc: c },
                );
            }
        }
    }
    for &i in &inbound {
        for &k in &lu {
            for &j in &inbound {
                for &l in &lu {
                    if i != j && k != l {
                        b.add_var(
                            format!("theta_{}_{k}_{}_{l}", m(i), m(j)),
                            VarKind::Binary,
                            VarMeaning::LocationPair { i, k, j, l },
                        );
                    }
                }
            }
        }
    }
    for i in 0..n {
        b.add_var(
            format!("sqc_{}", m(i)),
            VarKind::Continuous,
            VarMeaning::QcStart { shipment: i },
        );
    }
    for i in 0..n {
        b.add_var(
            format!("syc_{}", m(i)),
            VarKind::Continuous,
            VarMeaning::YcStart { shipment: i },
        );
    }
    for &i in &inbound {
        b.add_var(
            format!("t_{}", m(i)),
            VarKind::Continuous,
            VarMeaning::TruckTime { shipment: i },
        );
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && (is_in(i) || is_in(j)) {
                b.add_var(
                    format!("sy_{}_{}", m(i), m(j)),
                    VarKind::Continuous,
                    VarMeaning::YcTravel { from: i, to: j },
                );
            }
        }
    }
    let cmax: Vec<usize> = instance
        .vessels()
        .iter()
        .map(|v| {
            b.add_var(
                format!("Cmax_{}", v.id),
                VarKind::Continuous,
                VarMeaning::WeightedCompletion { vessel: v.id },
            )
        })
        .collect();

    let x = |b: &Builder, i: usize, k: usize| b.get(&format!("x_{}_{k}", m(i))).expect("x");
    let z = |b: &Builder, a: usize, zz: usize, q: u32| b.get(&format!("z_{a}_{zz}_{q}"));
    let v = |b: &Builder, a: usize, zz: usize, c: usize| b.get(&format!("v_{a}_{zz}_{c}"));
    let qz = |b: &Builder, i: usize, j: usize| b.get(&format!("qz_{}_{}", m(i), m(j))).expect("qz");
    let sqc = |b: &Builder, i: usize| b.get(&format!("sqc_{}", m(i))).expect("sqc");
    let syc = |b: &Builder, i: usize| b.get(&format!("syc_{}", m(i))).expect("syc");
    let sy = |b: &Builder, i: usize, j: usize| b.get(&format!("sy_{}_{}", m(i), m(j))).expect("sy");
    // Incoming QC arcs of shipment i on crane q (as model variables).
    let z_in = |b: &Builder, i: usize, q: u32| -> Vec<usize> {
        std::iter::once(0)
            .chain(sets.qc[q as usize - 1].iter().map(|&u| m(u)))
            .filter_map(|a| z(b, a, m(i), q))
            .collect()
    };

    // 2-02 / 2-03: weighted vessel completion.
    for s in ships {
        let w = instance.vessels()[s.vessel].weight;
        match s.direction {
            Direction::Outbound => b.row(
                "2-02",
                vec![(cmax[s.vessel], 1), (sqc(&b, s.id), -w)],
                Sense::Ge,
                w * s.qc_time,
            ),
            Direction::Inbound => b.row(
                "2-03",
                vec![(cmax[s.vessel], 1), (syc(&b, s.id), -w)],
                Sense::Ge,
                w * s.yc_time,
            ),
        }
    }
    // 2-04 / 2-05: location capacity and assignment.
    for &k in &lu {
        let terms = inbound.iter().map(|&i| (x(&b, i, k), 1)).collect();
        b.row("2-04", terms, Sense::Le, 1);
    }
    for &i in &inbound {
        let terms = lu.iter().map(|&k| (x(&b, i, k), 1)).collect();
        b.row("2-05", terms, Sense::Eq, 1);
    }
    // 2-06 .. 2-09: dummy first and last shipments.
    for (q0, set) in sets.qc.iter().enumerate() {
        let q = q0 as u32 + 1;
        let first = set
            .iter()
            .map(|&j| m(j))
            .chain([end])
            .filter_map(|j| z(&b, 0, j, q))
            .map(|id| (id, 1))
            .collect();
        b.row("2-06", first, Sense::Eq, 1);
    }
    for (c, set) in sets.yc.iter().enumerate() {
        let first = set
            .iter()
            .map(|&j| m(j))
            .chain([end])
            .filter_map(|j| v(&b, 0, j, c))
            .map(|id| (id, 1))
            .collect();
        b.row("2-07", first, Sense::Eq, 1);
    }
    for (q0, set) in sets.qc.iter().enumerate() {
        let q = q0 as u32 + 1;
        let last = [0]
            .into_iter()
            .chain(set.iter().map(|&j| m(j)))
            .filter_map(|a| z(&b, a, end, q))
            .map(|id| (id, 1))
            .collect();
        b.row("2-08", last, Sense::Eq, 1);
    }
    for (c, set) in sets.yc.iter().enumerate() {
        let last = [0]
            .into_iter()
            .chain(set.iter().map(|&j| m(j)))
            .filter_map(|a| v(&b, a, end, c))
            .map(|id| (id, 1))
            .collect();
        b.row("2-09", last, Sense::Eq, 1);
    }
    // 2-10: one successor on one eligible QC.
    for i in 0..n {
        let mut terms = Vec::new();
        for &q in &derived.eligible_qcs[i] {
            for j in sets.qc[q as usize - 1].iter().map(|&j| m(j)).chain([end]) {
                if let Some(id) = z(&b, m(i), j, q) {
                    terms.push((id, 1));
                }
            }
        }
        b.row("2-10", terms, Sense::Eq, 1);
    }
    // 2-11 / 2-12: the YC follows the location.
    for (c, set) in sets.yc.iter().enumerate() {
        for &i in set {
            let mut terms: Vec<(usize, i64)> = set
                .iter()
                .map(|&j| m(j))
                .chain([end])
                .filter_map(|j| v(&b, m(i), j, c))
                .map(|id| (id, 1))
                .collect();
            if is_in(i) {
                for &k in &lu {
                    if instance.yc_of(k) == c {
                        terms.push((x(&b, i, k), -1));
                    }
                }
                b.row("2-11", terms, Sense::Eq, 0);
            } else {
                b.row("2-12", terms, Sense::Eq, 1);
            }
        }
    }
    // 2-13 / 2-14: flow conservation.
    for (q0, set) in sets.qc.iter().enumerate() {
        let q = q0 as u32 + 1;
        for &i in set {
            let mut terms: Vec<(usize, i64)> =
                z_in(&b, i, q).into_iter().map(|id| (id, 1)).collect();
            for j in set.iter().map(|&j| m(j)).chain([end]) {
                if let Some(id) = z(&b, m(i), j, q) {
                    terms.push((id, -1));
                }
            }
            b.row("2-13", terms, Sense::Eq, 0);
        }
    }
    for (c, set) in sets.yc.iter().enumerate() {
        for &i in set {
            let mut terms: Vec<(usize, i64)> = [0]
                .into_iter()
                .chain(set.iter().map(|&u| m(u)))
                .filter_map(|a| v(&b, a, m(i), c))
                .map(|id| (id, 1))
                .collect();
            for j in set.iter().map(|&j| m(j)).chain([end]) {
                if let Some(id) = v(&b, m(i), j, c) {
                    terms.push((id, -1));
                }
            }
            b.row("2-14", terms, Sense::Eq, 0);
        }
    }
    // 2-15: truck time of inbound shipments.
    for &i in &inbound {
        let t = b.get(&format!("t_{}", m(i))).expect("t");
        let mut terms = vec![(t, 1)];
        terms.extend(
            lu.iter()
                .map(|&k| (x(&b, i, k), -instance.tt(k)))
                .filter(|&(_, c)| c != 0),
        );
        b.row("2-15", terms, Sense::Eq, 0);
    }
    // 2-16 .. 2-18: YC empty travel involving inbound locations.
    for &i in &inbound {
        for &j in &outbound {
            let mut terms = vec![(sy(&b, i, j), 1)];
            terms.extend(
                lu.iter()
                    .map(|&k| (x(&b, i, k), -instance.tyc(k, fixed(j))))
                    .filter(|&(_, c)| c != 0),
            );
            b.row("2-16", terms, Sense::Eq, 0);
        }
    }
    for &i in &inbound {
        for &j in &inbound {
            if i == j {
                continue;
            }
            let mut terms = vec![(sy(&b, i, j), 1)];
            for &k in &lu {
                for &l in &lu {
                    if k != l && instance.tyc(k, l) != 0 {
                        let th = b
                            .get(&format!("theta_{}_{k}_{}_{l}", m(i), m(j)))
                            .expect("theta");
                        terms.push((th, -instance.tyc(k, l)));
                    }
                }
            }
            b.row("2-17", terms, Sense::Eq, 0);
            for &k in &lu {
                for &l in &lu {
                    if k == l {
                        continue;
                    }
                    let th = b
                        .get(&format!("theta_{}_{k}_{}_{l}", m(i), m(j)))
                        .expect("theta");
                    let (xi, xj) = (x(&b, i, k), x(&b, j, l));
                    b.row("2-17", vec![(th, 1), (xi, -1), (xj, -1)], Sense::Ge, -1);
                    b.row("2-17", vec![(xi, -1), (xj, -1), (th, 2)], Sense::Le, 0);
                }
            }
        }
    }
    for &i in &outbound {
        for &j in &inbound {
            let mut terms = vec![(sy(&b, i, j), 1)];
            terms.extend(
                lu.iter()
                    .map(|&k| (x(&b, j, k), -instance.tyc(fixed(i), k)))
                    .filter(|&(_, c)| c != 0),
            );
            b.row("2-18", terms, Sense::Eq, 0);
        }
    }
    // 2-19: consecutive QC tasks.
    for (q0, set) in sets.qc.iter().enumerate() {
        let q = q0 as u32 + 1;
        for &i in set {
            for &j in set {
                if let (true, Some(zz)) = (i != j, z(&b, m(i), m(j), q)) {
                    b.row(
                        "2-19",
                        vec![(sqc(&b, j), 1), (sqc(&b, i), -1), (zz, -big_m)],
                        Sense::Ge,
                        ships[i].qc_time + derived.eqc(i, j) - big_m,
                    );
                }
            }
        }
    }
    // 2-20 .. 2-22: consecutive YC tasks.
    for (c, set) in sets.yc.iter().enumerate() {
        for &i in set {
            for &j in set {
                let Some(vv) = v(&b, m(i), m(j), c).filter(|_| i != j) else {
                    continue;
                };
                let base = vec![(syc(&b, j), 1), (syc(&b, i), -1), (vv, -big_m)];
                match (is_in(i), is_in(j)) {
                    (true, _) => {
                        let mut t = base;
                        t.push((sy(&b, i, j), -1));
                        b.row("2-20", t, Sense::Ge, ships[i].yc_time - big_m);
                    }
                    (false, true) => {
                        let mut t = base;
                        t.push((sy(&b, i, j), -1));
                        b.row("2-21", t, Sense::Ge, ships[i].yc_time - big_m);
                    }
                    (false, false) => b.row(
                        "2-22",
                        base,
                        Sense::Ge,
                        ships[i].yc_time + instance.tyc(fixed(i), fixed(j)) - big_m,
                    ),
                }
            }
        }
    }
    // 2-23 / 2-24: shipment precedence.
    for &i in &outbound {
        let tyt = ships[i].yt_outbound_time.expect("outbound");
        b.row(
            "2-23",
            vec![(sqc(&b, i), 1), (syc(&b, i), -1)],
            Sense::Ge,
            ships[i].yc_time + tyt,
        );
    }
    for &i in &inbound {
        let t = b.get(&format!("t_{}", m(i))).expect("t");
        b.row(
            "2-24",
            vec![(syc(&b, i), 1), (sqc(&b, i), -1), (t, -1)],
            Sense::Ge,
            ships[i].qc_time,
        );
    }
    // 2-25: a shipment ordered first ends before the other starts.
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        for j in 0..n {
            if i != j {
                b.row(
                    "2-25",
                    vec![(sqc(&b, i), 1), (sqc(&b, j), -1), (qz(&b, i, j), big_m)],
                    Sense::Le,
                    big_m - ships[i].qc_time,
                );
            }
        }
    }
    // 2-26 / 2-27: interfering pairs are ordered and separated.
    for t in &derived.interference_set {
        let mut on_cranes: Vec<(usize, i64)> =
            z_in(&b, t.i, t.v).into_iter().map(|id| (id, 1)).collect();
        on_cranes.extend(z_in(&b, t.j, t.w).into_iter().map(|id| (id, 1)));
        let mut terms = on_cranes.clone();
        terms.push((qz(&b, t.i, t.j), -1));
        terms.push((qz(&b, t.j, t.i), -1));
        b.row("2-26", terms, Sense::Le, 1);
        for (f, s) in [(t.i, t.j), (t.j, t.i)] {
            let mut terms = vec![(sqc(&b, f), 1), (sqc(&b, s), -1), (qz(&b, f, s), big_m)];
            terms.extend(on_cranes.iter().map(|&(id, _)| (id, big_m)));
            b.row(
                "2-27",
                terms,
                Sense::Le,
                3 * big_m - ships[f].qc_time - t.delta,
            );
        }
    }

    let mut rows_per_family = BTreeMap::new();
    for code in (2..=27).map(|c| format!("2-{c:02}")) {
        rows_per_family.insert(code, 0);
    }
    for r in &b.rows {
        *rows_per_family.get_mut(&r.family).expect("known family") += 1;
    }
    let artifacts = MipArtifacts {
        variables: b.variables.clone(),
        dummy_start: 0,
        dummy_end: end,
        big_m,
        rows_per_family,
    };
    let model = LinearModel {
        variables: b.variables,
        objective: cmax,
        rows: b.rows,
        index: b.index,
    };
    (model, artifacts)
}

/// LP text and mapping of the model.
pub fn export_lp(
    instance: &Instance,
    derived: &DerivedTables,
    options: &ExportOptions,
) -> (String, MipArtifacts) {
    let (model, artifacts) = build_model(instance, derived, options);
    (write_lp(&model), artifacts)
}

/// The model point encoding a solution. Interfering pairs get the recorded
/// order; all other `qz` are 0.
pub fn solution_point(instance: &Instance, model: &LinearModel, solution: &Solution) -> Vec<i64> {
    let n = instance.num_shipments();
    let mut loc_of: Vec<usize> = vec![usize::MAX; n];
    for s in instance.shipments() {
        loc_of[s.id] = match s.direction {
            Direction::Inbound => solution.yard_assignment[&s.id],
            Direction::Outbound => s.fixed_location.expect("outbound"),
        };
    }
    let mut qc_next: BTreeSet<(Option<usize>, Option<usize>, u32)> = BTreeSet::new();
    for (q0, seq) in solution.qc_sequences.iter().enumerate() {
        let q = q0 as u32 + 1;
        let nodes: Vec<Option<usize>> = std::iter::once(None)
            .chain(seq.iter().map(|&i| Some(i)))
            .chain(std::iter::once(None))
            .collect();
        for w in nodes.windows(2) {
            qc_next.insert((w[0], w[1], q));
        }
    }
    let mut yc_next: BTreeSet<(Option<usize>, Option<usize>, usize)> = BTreeSet::new();
    for (c, seq) in solution.yc_sequences.iter().enumerate() {
        let nodes: Vec<Option<usize>> = std::iter::once(None)
            .chain(seq.iter().map(|&i| Some(i)))
            .chain(std::iter::once(None))
            .collect();
        for w in nodes.windows(2) {
            yc_next.insert((w[0], w[1], c));
        }
    }
    let before: BTreeSet<(usize, usize)> = solution
        .interference_order
        .iter()
        .map(|(k, &o)| k.ordered(o))
        .collect();

    let ships = instance.shipments();
    model
        .variables
        .iter()
        .map(|var| match var.meaning {
            VarMeaning::Location { shipment, location } => i64::from(loc_of[shipment] == location),
            VarMeaning::QcSuccessor { from, to, qc } => {
                i64::from(qc_next.contains(&(from, to, qc)))
            }
            VarMeaning::QcBefore { first, second } => i64::from(before.contains(&(first, second))),
            VarMeaning::YcSuccessor { from, to, yc } => {
                i64::from(yc_next.contains(&(from, to, yc)))
            }
            VarMeaning::LocationPair { i, k, j, l } => i64::from(loc_of[i] == k && loc_of[j] == l),
            VarMeaning::QcStart { shipment } => solution.starts.qc[shipment],
            VarMeaning::YcStart { shipment } => solution.starts.yc[shipment],
            VarMeaning::TruckTime { shipment } => instance.tt(loc_of[shipment]),
            VarMeaning::YcTravel { from, to } => instance.tyc(loc_of[from], loc_of[to]),
            VarMeaning::WeightedCompletion { vessel } => {
                let w = instance.vessels()[vessel].weight;
                let done = ships
                    .iter()
                    .filter(|s| s.vessel == vessel)
                    .map(|s| match s.direction {
                        Direction::Inbound => solution.starts.yc[s.id] + s.yc_time,
                        Direction::Outbound => solution.starts.qc[s.id] + s.qc_time,
                    })
                    .max()
                    .unwrap_or(0);
                w * done
            }
        })
        .collect()
}

fn follow(
    next: &BTreeMap<Option<usize>, Option<usize>>,
    limit: usize,
    what: &str,
    crane: impl std::fmt::Display,
) -> Result<Vec<usize>> {
    let mut seq = Vec::new();
    let mut cur = None;
    loop {
        let Some(&nxt) = next.get(&cur) else {
            return Err(Error::InvalidDecisions(format!(
                "{what} {crane} has a broken successor chain"
            )));
        };
        match nxt {
            None => return Ok(seq),
            Some(i) => {
                if seq.len() > limit {
                    return Err(Error::InvalidDecisions(format!(
                        "{what} {crane} has a cycle"
                    )));
                }
                seq.push(i);
                cur = Some(i);
            }
        }
    }
}

/// Decisions encoded by a model point (binaries read as `value >= 0.5`).
pub fn decisions_from_values(
    instance: &Instance,
    derived: &DerivedTables,
    model: &LinearModel,
    values: &BTreeMap<String, f64>,
) -> Result<Decisions> {
    let n = instance.num_shipments();
    let on = |name: &str| values.get(name).copied().unwrap_or(0.0) >= 0.5;
    let mut yard_assignment = BTreeMap::new();
    let mut qc_next: BTreeMap<u32, BTreeMap<Option<usize>, Option<usize>>> = BTreeMap::new();
    let mut yc_next: BTreeMap<usize, BTreeMap<Option<usize>, Option<usize>>> = BTreeMap::new();
    let mut before = BTreeSet::new();
    for var in &model.variables {
        if var.kind != VarKind::Binary || !on(&var.name) {
            continue;
        }
        match var.meaning {
            VarMeaning::Location { shipment, location } => {
                yard_assignment.insert(shipment, location);
            }
            VarMeaning::QcSuccessor { from, to, qc } => {
                qc_next.entry(qc).or_default().insert(from, to);
            }
            VarMeaning::YcSuccessor { from, to, yc } => {
                yc_next.entry(yc).or_default().insert(from, to);
            }
            VarMeaning::QcBefore { first, second } => {
                before.insert((first, second));
            }
            _ => {}
        }
    }
    let mut qc_sequences = Vec::new();
    let mut qc_assignment = BTreeMap::new();
    for q in 1..=instance.qc_count() {
        let seq = follow(&qc_next.get(&q).cloned().unwrap_or_default(), n, "QC", q)?;
        for &i in &seq {
            qc_assignment.insert(i, q);
        }
        qc_sequences.push(seq);
    }
    let yc_sequences = (0..instance.yc_count())
        .map(|c| follow(&yc_next.get(&c).cloned().unwrap_or_default(), n, "YC", c))
        .collect::<Result<Vec<_>>>()?;
    let mut interference_order = BTreeMap::new();
    for t in &derived.interference_set {
        if qc_assignment.get(&t.i) == Some(&t.v) && qc_assignment.get(&t.j) == Some(&t.w) {
            let first = if before.contains(&(t.i, t.j)) {
                First::I
            } else {
                First::J
            };
            interference_order.insert(
                InterferenceKey {
                    i: t.i,
                    j: t.j,
                    v: t.v,
                    w: t.w,
                },
                first,
            );
        }
    }
    Ok(Decisions {
        yard_assignment,
        qc_assignment,
        qc_sequences,
        yc_sequences,
        interference_order,
    })
}

/// Earliest-start solution of the decisions in an external solver's values.
pub fn solution_from_values(
    instance: &Instance,
    derived: &DerivedTables,
    model: &LinearModel,
    values: &BTreeMap<String, f64>,
) -> Result<Solution> {
    let d = decisions_from_values(instance, derived, model, values)?;
    compute_schedule(instance, derived, &d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::InstanceBuilder;

    #[test]
    fn single_inbound_two_locations() {
        let mut b = InstanceBuilder::new(2, 1, 1);
        b.inbound_location(0, 5);
        b.inbound_location(0, 7);
        b.inbound(0, 1, 8, 4);
        let inst = b.build().unwrap();
        let der = DerivedTables::build(&inst).unwrap();
        let (model, art) = build_model(&inst, &der, &ExportOptions::default());
        let rows: Vec<&Row> = model.rows.iter().filter(|r| r.family == "2-05").collect();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].terms.len(), 2);
        assert_eq!((rows[0].sense, rows[0].rhs), (Sense::Eq, 1));
        assert_eq!(art.rows_per_family["2-04"], 2);
        assert_eq!(art.dummy_end, 2);
    }

    #[test]
    fn skipped_family_emits_nothing() {
        let mut b = InstanceBuilder::new(2, 1, 1);
        b.inbound_location(0, 5);
        b.inbound(0, 1, 8, 4);
        let inst = b.build().unwrap();
        let der = DerivedTables::build(&inst).unwrap();
        let opts = ExportOptions {
            skip_families: ["2-05".to_string()].into(),
            ..ExportOptions::default()
        };
        let (_, art) = build_model(&inst, &der, &opts);
        assert_eq!(art.rows_per_family["2-05"], 0);
        assert_eq!(art.rows_per_family["2-04"], 1);
    }
}
