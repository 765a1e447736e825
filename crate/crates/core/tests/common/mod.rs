//! Shared fixtures for the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use statrs::distribution::{ChiSquared, ContinuousCDF};

use ipctp_core::builder::InstanceBuilder;
use ipctp_core::generator::{generate, GenConfig};
use ipctp_core::instance::Field;
use ipctp_core::schedule::active_interference;
use ipctp_core::{
    compute_schedule, Constraint, Decisions, DerivedTables, First, Instance, Solution,
};

/// A generated instance drawn directly from `seed`.
pub fn small(
    seed: u64,
    shipments: usize,
    bays: u32,
    inbound_ratio: f64,
    ul_ratio: u32,
) -> Instance {
    generate(&GenConfig::new(
        ul_ratio,
        bays,
        shipments,
        inbound_ratio,
        seed,
    ))
    .expect("valid config")
}

/// Hand-built instance with every shipment role the validator distinguishes:
/// inbound and outbound on two vessels, an idle yard crane, an
/// outbound-to-inbound hand-over on one yard crane and one interfering pair.
///
/// Shipments: 0, 1 inbound on QC 1; 2, 3, 4 outbound and 5 inbound on QC 2.
/// Locations 0, 1 (YC 0), 2 (YC 1), 3 (YC 2) are inbound candidates.
pub fn validator_instance() -> Instance {
    let mut b = InstanceBuilder::new(6, 2, 3).vessel_weights(&[1, 1]);
    b.inbound_location(0, 5);
    b.inbound_location(0, 5);
    b.inbound_location(1, 5);
    b.inbound_location(2, 5);
    b.inbound(1, 1, 10, 6);
    b.inbound(1, 2, 8, 5);
    b.outbound(0, 5, 9, 7, 0, 4);
    b.outbound(0, 6, 6, 80, 1, 3);
    b.outbound(0, 3, 5, 3, 1, 3);
    b.inbound(1, 6, 4, 3);
    b.build().expect("fixture instance")
}

/// Earliest-start solution of fixed decisions on [`validator_instance`].
pub fn validator_base(instance: &Instance, derived: &DerivedTables) -> Solution {
    let crane_of = [1, 1, 2, 2, 2, 2];
    let interference_order = active_interference(derived, &crane_of)
        .into_iter()
        .map(|(k, _)| (k, First::I))
        .collect();
    let d = Decisions {
        yard_assignment: BTreeMap::from([(0, 0), (1, 1), (5, 2)]),
        qc_assignment: crane_of.iter().enumerate().map(|(i, &q)| (i, q)).collect(),
        qc_sequences: vec![vec![0, 1], vec![4, 5, 2, 3]],
        yc_sequences: vec![vec![0, 1, 2], vec![4, 3, 5], vec![]],
        interference_order,
    };
    compute_schedule(instance, derived, &d).expect("fixture decisions are consistent")
}

/// One mutated copy of the base solution per numbered constraint family,
/// each breaking exactly that family.
pub fn single_violations(
    instance: &Instance,
    derived: &DerivedTables,
    base: &Solution,
) -> Vec<(Constraint, Solution)> {
    use Constraint::*;
    let ships = instance.shipments();
    let qc_end = |s: &Solution, i: usize| s.starts.qc[i] + ships[i].qc_time;
    let yc_end = |s: &Solution, i: usize| s.starts.yc[i] + ships[i].yc_time;
    let key = *base
        .interference_order
        .keys()
        .next()
        .expect("one interfering pair");
    let delta = derived
        .interference_set
        .iter()
        .find(|t| (t.i, t.j, t.v, t.w) == (key.i, key.j, key.v, key.w))
        .expect("active tuple")
        .delta;

    let mut out = Vec::new();
    let mut add = |c: Constraint, f: &dyn Fn(&mut Solution)| {
        let mut s = base.clone();
        f(&mut s);
        out.push((c, s));
    };

    add(Objective, &|s| s.objective += 1);
    add(OutboundCompletion, &|s| {
        s.per_vessel_completion[0] -= 1;
        s.objective -= 1;
    });
    add(InboundCompletion, &|s| {
        s.per_vessel_completion[1] -= 1;
        s.objective -= 1;
    });
    add(LocationCapacity, &|s| {
        s.yard_assignment.insert(1, 0);
        s.yc_empty.insert((0, 1), 0);
    });
    add(LocationAssignment, &|s| {
        s.yard_assignment.remove(&1);
    });
    add(QcSequenceCount, &|s| s.qc_sequences.push(Vec::new()));
    add(YcSequenceCount, &|s| s.yc_sequences.push(Vec::new()));
    add(QcSequenceMembers, &|s| s.qc_sequences[0].push(99));
    add(YcSequenceMembers, &|s| s.yc_sequences[0].push(99));
    add(QcAssignment, &|s| {
        s.qc_sequences[1].pop();
    });
    add(InboundYardCrane, &|s| {
        s.yc_sequences[0].remove(0);
        s.yc_sequences[2].push(0);
    });
    add(OutboundYardCrane, &|s| {
        s.yc_sequences[1].remove(0);
        s.yc_sequences[2].push(4);
    });
    add(QcSequenceFlow, &|s| {
        s.qc_assignment.insert(4, 1);
    });
    add(YcSequenceFlow, &|s| s.yc_sequences[1].push(5));
    add(YtTransfer, &|s| {
        *s.yt_time.get_mut(&0).expect("inbound") += 1
    });
    add(YcTravelInboundOutbound, &|s| {
        *s.yc_empty.get_mut(&(1, 2)).expect("pair") += 1
    });
    add(YcTravelInboundInbound, &|s| {
        *s.yc_empty.get_mut(&(0, 1)).expect("pair") += 1
    });
    add(YcTravelOutboundInbound, &|s| {
        *s.yc_empty.get_mut(&(3, 5)).expect("pair") += 1
    });
    add(QcSuccession, &|s| {
        s.starts.qc[1] = qc_end(s, 0) + derived.eqc(0, 1) - 1
    });
    add(YcSuccessionFromInbound, &|s| {
        s.starts.yc[2] = yc_end(s, 1) + instance.tyc(1, 4) - 1
    });
    add(YcSuccessionOutboundInbound, &|s| {
        s.starts.yc[5] = yc_end(s, 3) + instance.tyc(5, 2) - 1
    });
    add(YcSuccessionOutbound, &|s| {
        s.starts.yc[3] = yc_end(s, 4) + instance.tyc(6, 5) - 1
    });
    add(OutboundPrecedence, &|s| {
        s.starts.qc[3] = yc_end(s, 3) + 3 - 1
    });
    add(InboundPrecedence, &|s| {
        s.starts.yc[0] = qc_end(s, 0) + instance.tt(0) - 1
    });
    add(InterferenceNoOverlap, &|s| {
        s.interference_order.insert(key, First::J);
    });
    add(InterferenceDisjunction, &|s| {
        s.interference_order.remove(&key);
    });
    add(InterferenceSeparation, &|s| {
        s.starts.qc[key.j] = qc_end(s, key.i) + delta - 1
    });
    out
}

/// Raw draws collected from generated instances.
#[derive(Debug, Default)]
pub struct Draws {
    pub containers: Vec<i64>,
    pub qc_rate: Vec<i64>,
    pub yc_rate: Vec<i64>,
    /// Inbound transfer and outbound truck times, by field of the location.
    pub transfer: BTreeMap<Field, Vec<i64>>,
    pub block_group: Vec<i64>,
}

/// Draws from generated 25-shipment instances until every collection holds
/// at least `samples` values.
pub fn collect_draws(samples: usize, seed: u64) -> Draws {
    let mut d = Draws::default();
    let mut rep = 0u64;
    let enough = |d: &Draws| {
        d.containers.len() >= samples
            && d.block_group.len() >= samples
            && [Field::A, Field::B, Field::C]
                .iter()
                .all(|f| d.transfer.get(f).map_or(0, Vec::len) >= samples)
    };
    while !enough(&d) {
        let inst = small(seed.wrapping_add(rep), 25, 8, 0.5, 3);
        rep += 1;
        let locs = inst.yard_locations();
        for s in inst.shipments() {
            let c = i64::from(s.containers);
            d.containers.push(c);
            d.qc_rate.push(s.qc_time / c);
            d.yc_rate.push(s.yc_time / c);
            if let (Some(loc), Some(tyt)) = (s.fixed_location, s.yt_outbound_time) {
                d.transfer.entry(locs[loc].field).or_default().push(tyt);
            }
        }
        for &k in inst.inbound_locations() {
            d.transfer
                .entry(locs[k].field)
                .or_default()
                .push(inst.tt(k));
        }
        d.block_group
            .extend(locs.iter().map(|l| i64::from(l.block_group)));
    }
    d
}

/// Pearson statistic of `values` against the uniform law on `lo..=hi`, and
/// its 95% critical value. Values outside the range make the statistic infinite.
pub fn chi_square_uniform(values: &[i64], lo: i64, hi: i64) -> (f64, f64) {
    let k = (hi - lo + 1) as usize;
    let mut counts = vec![0usize; k];
    for &v in values {
        if v < lo || v > hi {
            return (f64::INFINITY, 0.0);
        }
        counts[(v - lo) as usize] += 1;
    }
    let expected = values.len() as f64 / k as f64;
    let stat = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let critical = ChiSquared::new((k - 1) as f64)
        .expect("positive dof")
        .inverse_cdf(0.95);
    (stat, critical)
}

/// Instance, LP and external solution files committed under `tests/fixtures/mip`.
pub struct MipFixture {
    pub name: String,
    pub instance: Instance,
    pub lp: String,
    pub sol: String,
}

pub fn mip_fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mip")
}

pub fn mip_fixtures() -> Vec<MipFixture> {
    let dir = mip_fixture_dir();
    let manifest = ipctp_core::generator::read_manifest(&dir).expect("fixture manifest");
    manifest
        .iter()
        .map(|m| {
            let stem = m.file.trim_end_matches(".json");
            MipFixture {
                name: stem.to_string(),
                instance: Instance::load(dir.join(&m.file)).expect("fixture instance"),
                lp: std::fs::read_to_string(dir.join(format!("{stem}.lp"))).expect("fixture lp"),
                sol: std::fs::read_to_string(dir.join(format!("{stem}.sol"))).expect("fixture sol"),
            }
        })
        .collect()
}

/// The `# objective <value>` header of an external solution file.
pub fn reported_objective(sol: &str) -> Option<f64> {
    sol.lines()
        .find_map(|l| l.strip_prefix("# objective "))
        .and_then(|v| v.trim().parse().ok())
}
