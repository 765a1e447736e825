//! Quantities derived once from an [`Instance`]: crane eligibility windows,
//! crane spacing, pairwise interference times and empty-travel matrices.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, Time};

/// Quay cranes able to stand at `bay` when every crane keeps `safety_distance`
/// free bays to its neighbours and none can leave `[1, total_bays]`.
///
/// Crane `q` can reach bays `(q-1)(δ+1)+1 ..= B_T-(QC_T-q)(δ+1)`.
pub fn eligible_qcs(
    bay: u32,
    total_bays: u32,
    qc_count: u32,
    safety_distance: u32,
) -> Result<Vec<u32>> {
    let step = i64::from(safety_distance) + 1;
    let (bay_i, bt, qt) = (i64::from(bay), i64::from(total_bays), i64::from(qc_count));
    let cranes: Vec<u32> = (1..=qc_count)
        .filter(|&q| {
            let q = i64::from(q);
            let lo = (q - 1) * step + 1;
            let hi = bt - (qt - q) * step;
            lo <= bay_i && bay_i <= hi
        })
        .collect();
    if cranes.is_empty() || bay == 0 || bay > total_bays {
        return Err(Error::NoEligibleCrane {
            bay,
            total_bays,
            qc_count,
            safety_distance,
        });
    }
    Ok(cranes)
}

/// Smallest allowed bay difference between cranes `v` and `w`.
pub fn crane_min_distance(v: u32, w: u32, safety_distance: u32) -> u32 {
    (safety_distance + 1) * v.abs_diff(w)
}

/// Minimum start-time separation when shipment `i` (at `bay_i`, crane `v`) and
/// shipment `j` (at `bay_j`, crane `w`) are handled by different cranes.
///
/// Zero when the two positions already respect the crane spacing. The
/// `v > w` branch tests `bay_i < bay_j + δ_vw`, the mirror image of the
/// `v < w` branch, so that `Δ(i,j,v,w) == Δ(j,i,w,v)`.
pub fn interference_time(
    bay_i: u32,
    bay_j: u32,
    v: u32,
    w: u32,
    safety_distance: u32,
    qc_unit_travel: Time,
) -> Time {
    let d = i64::from(crane_min_distance(v, w, safety_distance));
    let (bi, bj) = (i64::from(bay_i), i64::from(bay_j));
    if v < w && bi > bj - d {
        (bi - bj + d) * qc_unit_travel
    } else if v > w && bi < bj + d {
        (bj - bi + d) * qc_unit_travel
    } else {
        0
    }
}

/// One element of the interference set: shipments `i < j` on cranes `v`, `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct InterferenceTuple {
    pub i: usize,
    pub j: usize,
    pub v: u32,
    pub w: u32,
    pub delta: Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivedTables {
    /// `eligible_qcs[i]`: sorted eligible cranes of shipment `i`.
    pub eligible_qcs: Vec<Vec<u32>>,
    /// `crane_min_distance[v-1][w-1]`.
    pub crane_min_distance: Vec<Vec<u32>>,
    /// Interference tuples with positive time, sorted by `(i, j, v, w)`.
    pub interference_set: Vec<InterferenceTuple>,
    /// QC travel between the bays of two shipments.
    pub qc_empty_travel: Vec<Vec<Time>>,
    /// YC travel between two yard locations.
    pub yc_empty_travel: Vec<Vec<Time>>,
    #[serde(skip)]
    lookup: BTreeMap<(usize, usize, u32, u32), Time>,
}

impl DerivedTables {
    pub fn build(instance: &Instance) -> Result<Self> {
        build_derived(instance)
    }

    /// Interference time of shipments `i`, `j` on cranes `v`, `w` (order-insensitive
    /// in the pair). Zero when the tuple is not in the interference set.
    pub fn interference_time(&self, i: usize, j: usize, v: u32, w: u32) -> Time {
        let key = if i < j { (i, j, v, w) } else { (j, i, w, v) };
        self.lookup.get(&key).copied().unwrap_or(0)
    }

    pub fn is_eligible(&self, shipment: usize, crane: u32) -> bool {
        self.eligible_qcs[shipment].binary_search(&crane).is_ok()
    }

    pub fn eqc(&self, i: usize, j: usize) -> Time {
        self.qc_empty_travel[i][j]
    }

    pub fn eyc(&self, k: usize, l: usize) -> Time {
        self.yc_empty_travel[k][l]
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("derived tables serialize")
    }
}

pub fn build_derived(instance: &Instance) -> Result<DerivedTables> {
    let g = instance.geometry();
    let shipments = instance.shipments();

    let eligible = shipments
        .iter()
        .map(|s| eligible_qcs(s.bay, g.total_bays, g.qc_count, g.safety_distance))
        .collect::<Result<Vec<_>>>()?;

    let qcs = g.qc_count as usize;
    let crane_dist = (1..=g.qc_count)
        .map(|v| {
            (1..=g.qc_count)
                .map(|w| crane_min_distance(v, w, g.safety_distance))
                .collect()
        })
        .collect::<Vec<Vec<u32>>>();
    debug_assert_eq!(crane_dist.len(), qcs);

    let mut interference_set = Vec::new();
    let mut lookup = BTreeMap::new();
    for i in 0..shipments.len() {
        for j in (i + 1)..shipments.len() {
            for &v in &eligible[i] {
                for &w in &eligible[j] {
                    let delta = interference_time(
                        shipments[i].bay,
                        shipments[j].bay,
                        v,
                        w,
                        g.safety_distance,
                        g.qc_unit_travel,
                    );
                    if delta > 0 {
                        interference_set.push(InterferenceTuple { i, j, v, w, delta });
                        lookup.insert((i, j, v, w), delta);
                    }
                }
            }
        }
    }

    let qc_empty_travel = shipments
        .iter()
        .map(|a| {
            shipments
                .iter()
                .map(|b| g.qc_unit_travel * i64::from(a.bay.abs_diff(b.bay)))
                .collect()
        })
        .collect();

    Ok(DerivedTables {
        eligible_qcs: eligible,
        crane_min_distance: crane_dist,
        interference_set,
        qc_empty_travel,
        yc_empty_travel: instance.travel().yc_travel.clone(),
        lookup,
    })
}
