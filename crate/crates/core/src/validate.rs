//! Semantic feasibility check of a [`Solution`] against every constraint
//! family of the mixed-integer model, independent of how the solution was built.
//!
//! Crane sequences are checked as ordered lists: the dummy first/last
//! shipments of the MIP correspond to the ends of each list.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::derived::DerivedTables;
use crate::instance::{Direction, Instance, Reservation, Time};
use crate::solution::Solution;

/// Constraint families of the MIP, numbered as in the model (`2-01` .. `2-27`),
/// plus variable domains (nonnegative, fully specified start times).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Constraint {
    /// Reported objective equals the weighted sum of reported vessel completions.
    Objective,
    /// Vessel completion covers the QC end of each outbound shipment.
    OutboundCompletion,
    /// Vessel completion covers the YC end of each inbound shipment.
    InboundCompletion,
    /// At most one inbound shipment per location.
    LocationCapacity,
    /// Every inbound shipment has one inbound-available location.
    LocationAssignment,
    /// One sequence per quay crane.
    QcSequenceCount,
    /// One sequence per yard crane.
    YcSequenceCount,
    /// QC sequences only contain shipments.
    QcSequenceMembers,
    /// YC sequences only contain shipments.
    YcSequenceMembers,
    /// Every shipment on exactly one eligible quay crane.
    QcAssignment,
    /// Inbound shipments on the yard crane of their location.
    InboundYardCrane,
    /// Outbound shipments on the yard crane of their fixed location.
    OutboundYardCrane,
    /// QC sequences are simple paths consistent with the QC assignment.
    QcSequenceFlow,
    /// YC sequences are simple paths.
    YcSequenceFlow,
    /// YT time of an inbound shipment matches its location.
    YtTransfer,
    /// YC empty travel from an inbound to an outbound location.
    YcTravelInboundOutbound,
    /// YC empty travel between two inbound locations.
    YcTravelInboundInbound,
    /// YC empty travel from an outbound to an inbound location.
    YcTravelOutboundInbound,
    /// Consecutive QC tasks respect handling plus empty travel.
    QcSuccession,
    /// Consecutive YC tasks after an inbound shipment.
    YcSuccessionFromInbound,
    /// Consecutive YC tasks from an outbound to an inbound shipment.
    YcSuccessionOutboundInbound,
    /// Consecutive YC tasks between outbound shipments.
    YcSuccessionOutbound,
    /// Outbound: YC handling and YT transfer precede QC handling.
    OutboundPrecedence,
    /// Inbound: QC handling and YT transfer precede YC handling.
    InboundPrecedence,
    /// The recorded order of an interfering pair matches the schedule.
    InterferenceNoOverlap,
    /// Every active interfering pair has a recorded order.
    InterferenceDisjunction,
    /// Interfering pairs are separated by the first handling time plus the interference time.
    InterferenceSeparation,
    /// Start times missing or negative.
    Domain,
}

impl Constraint {
    pub const NUMBERED: [Constraint; 27] = [
        Constraint::Objective,
        Constraint::OutboundCompletion,
        Constraint::InboundCompletion,
        Constraint::LocationCapacity,
        Constraint::LocationAssignment,
        Constraint::QcSequenceCount,
        Constraint::YcSequenceCount,
        Constraint::QcSequenceMembers,
        Constraint::YcSequenceMembers,
        Constraint::QcAssignment,
        Constraint::InboundYardCrane,
        Constraint::OutboundYardCrane,
        Constraint::QcSequenceFlow,
        Constraint::YcSequenceFlow,
        Constraint::YtTransfer,
        Constraint::YcTravelInboundOutbound,
        Constraint::YcTravelInboundInbound,
        Constraint::YcTravelOutboundInbound,
        Constraint::QcSuccession,
        Constraint::YcSuccessionFromInbound,
        Constraint::YcSuccessionOutboundInbound,
        Constraint::YcSuccessionOutbound,
        Constraint::OutboundPrecedence,
        Constraint::InboundPrecedence,
        Constraint::InterferenceNoOverlap,
        Constraint::InterferenceDisjunction,
        Constraint::InterferenceSeparation,
    ];

    /// Model row label, e.g. `"2-04"`; `"domain"` for [`Constraint::Domain`].
    pub fn code(self) -> String {
        match Self::NUMBERED.iter().position(|&c| c == self) {
            Some(idx) => format!("2-{:02}", idx + 1),
            None => "domain".to_string(),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub shipments: Vec<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.constraint, self.message)
    }
}

struct Report(Vec<Violation>);

impl Report {
    fn push(&mut self, constraint: Constraint, shipments: &[usize], message: String) {
        self.0.push(Violation {
            constraint,
            shipments: shipments.to_vec(),
            message,
        });
    }
}

/// First occurrences of known shipments, in order.
fn simple_path(seq: &[usize], n: usize) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    seq.iter()
        .copied()
        .filter(|&i| i < n && seen.insert(i))
        .collect()
}

/// All violations of `solution`; empty iff it is feasible.
pub fn validate(
    instance: &Instance,
    derived: &DerivedTables,
    solution: &Solution,
) -> Vec<Violation> {
    use Constraint::*;

    let mut out = Report(Vec::new());
    let n = instance.num_shipments();
    let ships = instance.shipments();
    let st = &solution.starts;

    if st.qc.len() != n || st.yc.len() != n {
        out.push(
            Domain,
            &[],
            format!("start times must be given for all {n} shipments"),
        );
        return out.0;
    }
    if solution.per_vessel_completion.len() != instance.vessels().len() {
        out.push(
            Domain,
            &[],
            "per_vessel_completion must list every vessel".to_string(),
        );
        return out.0;
    }
    for i in 0..n {
        if st.qc[i] < 0 || st.yc[i] < 0 {
            out.push(
                Domain,
                &[i],
                format!("shipment {i} has a negative start time"),
            );
        }
    }

    // Completion and objective.
    let cmax = &solution.per_vessel_completion;
    let claimed: i64 = instance
        .vessels()
        .iter()
        .map(|v| v.weight * cmax[v.id])
        .sum();
    if claimed != solution.objective {
        out.push(
            Objective,
            &[],
            format!(
                "objective {} differs from weighted vessel completions {claimed}",
                solution.objective
            ),
        );
    }
    for s in ships {
        let (end, family) = match s.direction {
            Direction::Outbound => (st.qc[s.id] + s.qc_time, OutboundCompletion),
            Direction::Inbound => (st.yc[s.id] + s.yc_time, InboundCompletion),
        };
        if cmax[s.vessel] < end {
            out.push(
                family,
                &[s.id],
                format!(
                    "vessel {} completes at {} before shipment {} ends at {end}",
                    s.vessel, cmax[s.vessel], s.id
                ),
            );
        }
    }

    // Yard locations.
    let n_loc = instance.yard_locations().len();
    let mut loc_of: Vec<Option<usize>> = vec![None; n];
    let mut occupants: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in solution.yard_assignment.keys() {
        if i >= n || !ships[i].is_inbound() {
            out.push(
                LocationAssignment,
                &[i],
                format!("shipment {i} is not an inbound shipment"),
            );
        }
    }
    for s in ships {
        match s.direction {
            Direction::Outbound => loc_of[s.id] = s.fixed_location,
            Direction::Inbound => match solution.yard_assignment.get(&s.id) {
                None => out.push(
                    LocationAssignment,
                    &[s.id],
                    format!("inbound shipment {} has no location", s.id),
                ),
                Some(&k)
                    if k >= n_loc
                        || instance.yard_locations()[k].reserved_for
                            != Reservation::InboundAvailable =>
                {
                    out.push(
                        LocationAssignment,
                        &[s.id],
                        format!(
                            "location {k} of shipment {} is not available for inbound storage",
                            s.id
                        ),
                    );
                    if k < n_loc {
                        loc_of[s.id] = Some(k);
                    }
                }
                Some(&k) => {
                    loc_of[s.id] = Some(k);
                    occupants.entry(k).or_default().push(s.id);
                }
            },
        }
    }
    for (k, holders) in &occupants {
        if holders.len() > 1 {
            out.push(
                LocationCapacity,
                holders,
                format!("location {k} stores {} inbound shipments", holders.len()),
            );
        }
    }

    // Quay crane sequences.
    let qc_count = instance.qc_count() as usize;
    if solution.qc_sequences.len() != qc_count {
        out.push(
            QcSequenceCount,
            &[],
            format!(
                "{} QC sequences for {qc_count} quay cranes",
                solution.qc_sequences.len()
            ),
        );
    }
    let mut qc_cranes: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (q0, seq) in solution.qc_sequences.iter().enumerate() {
        let q = q0 as u32 + 1;
        let mut count = BTreeMap::new();
        for &i in seq {
            if i >= n {
                out.push(
                    QcSequenceMembers,
                    &[],
                    format!("QC {q} sequence holds unknown shipment {i}"),
                );
                continue;
            }
            *count.entry(i).or_insert(0) += 1;
        }
        for (&i, &c) in &count {
            qc_cranes[i].push(q);
            if c > 1 {
                out.push(
                    QcSequenceFlow,
                    &[i],
                    format!("shipment {i} repeats in the sequence of QC {q}"),
                );
            }
        }
    }
    let mut crane_of = vec![0u32; n];
    for i in 0..n {
        match qc_cranes[i].as_slice() {
            [q] => {
                crane_of[i] = *q;
                if !derived.is_eligible(i, *q) {
                    out.push(
                        QcAssignment,
                        &[i],
                        format!("shipment {i} is on QC {q}, outside its eligible set"),
                    );
                }
                if solution.qc_assignment.get(&i) != Some(q) {
                    out.push(
                        QcSequenceFlow,
                        &[i],
                        format!("qc_assignment of shipment {i} disagrees with its place on QC {q}"),
                    );
                }
            }
            [] => out.push(
                QcAssignment,
                &[i],
                format!("shipment {i} is handled by no quay crane"),
            ),
            many => out.push(
                QcAssignment,
                &[i],
                format!("shipment {i} is handled by {} quay cranes", many.len()),
            ),
        }
    }
    for &i in solution.qc_assignment.keys() {
        if i >= n {
            out.push(
                QcSequenceFlow,
                &[],
                format!("qc_assignment names unknown shipment {i}"),
            );
        }
    }

    // Yard crane sequences.
    let yc_count = instance.yc_count();
    if solution.yc_sequences.len() != yc_count {
        out.push(
            YcSequenceCount,
            &[],
            format!(
                "{} YC sequences for {yc_count} yard cranes",
                solution.yc_sequences.len()
            ),
        );
    }
    let mut yc_cranes: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, seq) in solution.yc_sequences.iter().enumerate() {
        let mut count = BTreeMap::new();
        for &i in seq {
            if i >= n {
                out.push(
                    YcSequenceMembers,
                    &[],
                    format!("YC {c} sequence holds unknown shipment {i}"),
                );
                continue;
            }
            *count.entry(i).or_insert(0) += 1;
        }
        for (&i, &cnt) in &count {
            yc_cranes[i].push(c);
            if cnt > 1 {
                out.push(
                    YcSequenceFlow,
                    &[i],
                    format!("shipment {i} repeats in the sequence of YC {c}"),
                );
            }
        }
    }
    for s in ships {
        let Some(loc) = loc_of[s.id] else { continue };
        let expected = instance.yc_of(loc);
        if yc_cranes[s.id] != [expected] {
            let family = if s.is_inbound() {
                InboundYardCrane
            } else {
                OutboundYardCrane
            };
            out.push(
                family,
                &[s.id],
                format!(
                    "shipment {} must be handled once by YC {expected}, found on {:?}",
                    s.id, yc_cranes[s.id]
                ),
            );
        }
    }

    // YT transfer times.
    for s in instance.inbound_shipments() {
        let Some(loc) = loc_of[s.id] else { continue };
        let want = instance.tt(loc);
        if solution.yt_time.get(&s.id) != Some(&want) {
            out.push(
                YtTransfer,
                &[s.id],
                format!(
                    "yt_time of shipment {} must be {want} for location {loc}",
                    s.id
                ),
            );
        }
    }

    // YC empty travel involving inbound shipments.
    let travel_family = |a: usize, b: usize| match (ships[a].direction, ships[b].direction) {
        (Direction::Inbound, Direction::Outbound) => Some(YcTravelInboundOutbound),
        (Direction::Inbound, Direction::Inbound) => Some(YcTravelInboundInbound),
        (Direction::Outbound, Direction::Inbound) => Some(YcTravelOutboundInbound),
        (Direction::Outbound, Direction::Outbound) => None,
    };
    let mut travel_pairs: BTreeSet<(usize, usize)> = solution.yc_empty.keys().copied().collect();
    for seq in &solution.yc_sequences {
        for w in simple_path(seq, n).windows(2) {
            travel_pairs.insert((w[0], w[1]));
        }
    }
    for (a, b) in travel_pairs {
        if a >= n || b >= n || a == b {
            continue;
        }
        let (Some(family), Some(la), Some(lb)) = (travel_family(a, b), loc_of[a], loc_of[b]) else {
            continue;
        };
        let want = instance.tyc(la, lb);
        match solution.yc_empty.get(&(a, b)) {
            Some(&got) if got == want => {}
            got => out.push(
                family,
                &[a, b],
                format!("YC empty travel {a} -> {b} must be {want}, got {got:?}"),
            ),
        }
    }

    // Crane succession.
    for seq in &solution.qc_sequences {
        for w in simple_path(seq, n).windows(2) {
            let (a, b) = (w[0], w[1]);
            let need = st.qc[a] + ships[a].qc_time + derived.eqc(a, b);
            if st.qc[b] < need {
                out.push(
                    QcSuccession,
                    &[a, b],
                    format!(
                        "QC start of {b} is {} but {a} frees the crane at {need}",
                        st.qc[b]
                    ),
                );
            }
        }
    }
    for seq in &solution.yc_sequences {
        for w in simple_path(seq, n).windows(2) {
            let (a, b) = (w[0], w[1]);
            let (Some(la), Some(lb)) = (loc_of[a], loc_of[b]) else {
                continue;
            };
            let need = st.yc[a] + ships[a].yc_time + instance.tyc(la, lb);
            if st.yc[b] < need {
                let family = match (ships[a].direction, ships[b].direction) {
                    (Direction::Inbound, _) => YcSuccessionFromInbound,
                    (Direction::Outbound, Direction::Inbound) => YcSuccessionOutboundInbound,
                    (Direction::Outbound, Direction::Outbound) => YcSuccessionOutbound,
                };
                out.push(
                    family,
                    &[a, b],
                    format!(
                        "YC start of {b} is {} but {a} frees the crane at {need}",
                        st.yc[b]
                    ),
                );
            }
        }
    }

    // Shipment precedence through the yard trucks.
    for s in ships {
        match s.direction {
            Direction::Outbound => {
                let need = st.yc[s.id] + s.yc_time + s.yt_outbound_time.unwrap_or(0);
                if st.qc[s.id] < need {
                    out.push(
                        OutboundPrecedence,
                        &[s.id],
                        format!(
                            "QC start of outbound {} is {} before arrival at {need}",
                            s.id, st.qc[s.id]
                        ),
                    );
                }
            }
            Direction::Inbound => {
                let Some(loc) = loc_of[s.id] else { continue };
                let need = st.qc[s.id] + s.qc_time + instance.tt(loc);
                if st.yc[s.id] < need {
                    out.push(
                        InboundPrecedence,
                        &[s.id],
                        format!(
                            "YC start of inbound {} is {} before arrival at {need}",
                            s.id, st.yc[s.id]
                        ),
                    );
                }
            }
        }
    }

    // Quay crane interference.
    for t in &derived.interference_set {
        if crane_of[t.i] != t.v || crane_of[t.j] != t.w {
            continue;
        }
        let key = crate::solution::InterferenceKey {
            i: t.i,
            j: t.j,
            v: t.v,
            w: t.w,
        };
        match solution.interference_order.get(&key) {
            None => out.push(
                InterferenceDisjunction,
                &[t.i, t.j],
                format!(
                    "no order recorded for interfering shipments {} and {}",
                    t.i, t.j
                ),
            ),
            Some(&order) => {
                let (f, s) = key.ordered(order);
                if st.qc[f] + ships[f].qc_time > st.qc[s] {
                    out.push(
                        InterferenceNoOverlap,
                        &[t.i, t.j],
                        format!("{f} is recorded first but {s} starts before {f} ends"),
                    );
                }
            }
        }
        let (f, s) = if st.qc[t.j] < st.qc[t.i] {
            (t.j, t.i)
        } else {
            (t.i, t.j)
        };
        let need: Time = st.qc[f] + ships[f].qc_time + t.delta;
        if st.qc[s] < need {
            out.push(
                InterferenceSeparation,
                &[t.i, t.j],
                format!(
                    "shipment {s} starts at {} but interference with {f} requires {need}",
                    st.qc[s]
                ),
            );
        }
    }

    out.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_numbered() {
        assert_eq!(Constraint::Objective.code(), "2-01");
        assert_eq!(Constraint::LocationCapacity.code(), "2-04");
        assert_eq!(Constraint::QcAssignment.code(), "2-10");
        assert_eq!(Constraint::InterferenceSeparation.code(), "2-27");
        assert_eq!(Constraint::Domain.code(), "domain");
    }
}
