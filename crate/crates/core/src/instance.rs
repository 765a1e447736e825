//! Immutable problem data for integrated quay crane / yard crane scheduling.
//!
//! Identifier conventions used throughout the crate:
//!
//! - vessels, shipments and yard locations are identified by their position
//!   in the corresponding list (`id` must equal the index);
//! - yard cranes are numbered `0..yc_count`;
//! - quay cranes are numbered `1..=qc_count` from one end of the quay, since
//!   their eligibility windows depend on the rail position;
//! - bays are numbered `1..=total_bays`.
//!
//! All times are nonnegative integers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer time unit.
pub type Time = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Discharged from the vessel: QC, then YT, then YC.
    Inbound,
    /// Loaded onto the vessel: YC, then YT, then QC.
    Outbound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reservation {
    InboundAvailable,
    OutboundFixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vessel {
    pub id: usize,
    pub weight: i64,
}

/// A group of containers handled as one batch by one QC and one YC.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shipment {
    pub id: usize,
    pub vessel: usize,
    pub direction: Direction,
    pub bay: u32,
    pub containers: u32,
    /// Total QC handling time of the batch.
    pub qc_time: Time,
    /// Total YC handling time of the batch.
    pub yc_time: Time,
    /// Yard location holding an outbound shipment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_location: Option<usize>,
    /// YT travel time from the fixed location to the quay (outbound only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yt_outbound_time: Option<Time>,
}

impl Shipment {
    pub fn is_inbound(&self) -> bool {
        self.direction == Direction::Inbound
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YardLocation {
    pub id: usize,
    pub yc: usize,
    pub block_group: u32,
    pub field: Field,
    pub reserved_for: Reservation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geometry {
    #[serde(alias = "B_T")]
    pub total_bays: u32,
    #[serde(alias = "QC_T")]
    pub qc_count: u32,
    pub yc_count: usize,
    /// Minimum number of free bays between two adjacent quay cranes.
    #[serde(alias = "delta")]
    pub safety_distance: u32,
    /// QC travel time per bay.
    #[serde(alias = "s_qc")]
    pub qc_unit_travel: Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Travel {
    /// Symmetric YC travel matrix between yard locations.
    #[serde(alias = "tyc")]
    pub yc_travel: Vec<Vec<Time>>,
    /// YT travel from the quay to each location; only read for inbound-available locations.
    #[serde(alias = "tt")]
    pub yt_inbound_transfer: Vec<Time>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct InstanceData {
    vessels: Vec<Vessel>,
    shipments: Vec<Shipment>,
    yard_locations: Vec<YardLocation>,
    geometry: Geometry,
    travel: Travel,
}

/// A validated problem instance. Construct with [`Instance::new`] or by
/// deserializing; both paths run the same invariant checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceData")]
pub struct Instance {
    vessels: Vec<Vessel>,
    shipments: Vec<Shipment>,
    yard_locations: Vec<YardLocation>,
    geometry: Geometry,
    travel: Travel,
    #[serde(skip)]
    inbound_locations: Vec<usize>,
}

impl TryFrom<InstanceData> for Instance {
    type Error = Error;

    fn try_from(data: InstanceData) -> Result<Self> {
        Instance::new(
            data.vessels,
            data.shipments,
            data.yard_locations,
            data.geometry,
            data.travel,
        )
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInstance(msg.into()))
}

impl Instance {
    pub fn new(
        vessels: Vec<Vessel>,
        shipments: Vec<Shipment>,
        yard_locations: Vec<YardLocation>,
        geometry: Geometry,
        travel: Travel,
    ) -> Result<Self> {
        let inbound_locations = yard_locations
            .iter()
            .filter(|l| l.reserved_for == Reservation::InboundAvailable)
            .map(|l| l.id)
            .collect();
        let instance = Self {
            vessels,
            shipments,
            yard_locations,
            geometry,
            travel,
            inbound_locations,
        };
        instance.check()?;
        Ok(instance)
    }

    fn check(&self) -> Result<()> {
        let g = &self.geometry;
        if g.total_bays == 0 {
            return invalid("geometry.total_bays must be positive");
        }
        if g.qc_count == 0 {
            return invalid("geometry.qc_count must be positive");
        }
        if g.yc_count == 0 {
            return invalid("geometry.yc_count must be positive");
        }
        if g.qc_unit_travel < 0 {
            return invalid("geometry.qc_unit_travel must be nonnegative");
        }

        for (idx, v) in self.vessels.iter().enumerate() {
            if v.id != idx {
                return invalid(format!(
                    "vessels[{idx}].id is {} (ids must equal positions)",
                    v.id
                ));
            }
            if v.weight <= 0 {
                return invalid(format!("vessels[{idx}].weight must be positive"));
            }
        }

        let n_loc = self.yard_locations.len();
        for (idx, l) in self.yard_locations.iter().enumerate() {
            if l.id != idx {
                return invalid(format!(
                    "yard_locations[{idx}].id is {} (ids must equal positions)",
                    l.id
                ));
            }
            if l.yc >= g.yc_count {
                return invalid(format!(
                    "yard_locations[{idx}].yc = {} but yc_count = {}",
                    l.yc, g.yc_count
                ));
            }
        }

        let mut fixed_refs = vec![0usize; n_loc];
        for (idx, s) in self.shipments.iter().enumerate() {
            let at = format!("shipments[{idx}]");
            if s.id != idx {
                return invalid(format!("{at}.id is {} (ids must equal positions)", s.id));
            }
            if s.vessel >= self.vessels.len() {
                return invalid(format!("{at}.vessel = {} is not a vessel id", s.vessel));
            }
            if s.bay == 0 || s.bay > g.total_bays {
                return invalid(format!(
                    "{at}.bay = {} outside [1, {}]",
                    s.bay, g.total_bays
                ));
            }
            if s.containers == 0 {
                return invalid(format!("{at}.containers must be positive"));
            }
            if s.qc_time <= 0 || s.yc_time <= 0 {
                return invalid(format!("{at}: qc_time and yc_time must be positive"));
            }
            match s.direction {
                Direction::Inbound => {
                    if s.fixed_location.is_some() || s.yt_outbound_time.is_some() {
                        return invalid(format!(
                            "{at}: inbound shipments must not carry fixed_location or yt_outbound_time"
                        ));
                    }
                }
                Direction::Outbound => {
                    let (Some(loc), Some(tyt)) = (s.fixed_location, s.yt_outbound_time) else {
                        return invalid(format!(
                            "{at}: outbound shipments need fixed_location and yt_outbound_time"
                        ));
                    };
                    if tyt < 0 {
                        return invalid(format!("{at}.yt_outbound_time must be nonnegative"));
                    }
                    if loc >= n_loc {
                        return invalid(format!(
                            "{at}.fixed_location = {loc} is not a location id"
                        ));
                    }
                    if self.yard_locations[loc].reserved_for != Reservation::OutboundFixed {
                        return invalid(format!(
                            "{at}.fixed_location = {loc} is not reserved as outbound_fixed"
                        ));
                    }
                    fixed_refs[loc] += 1;
                }
            }
        }
        for (loc, l) in self.yard_locations.iter().enumerate() {
            if l.reserved_for == Reservation::OutboundFixed && fixed_refs[loc] != 1 {
                return invalid(format!(
                    "outbound_fixed location {loc} is referenced by {} outbound shipments (expected 1)",
                    fixed_refs[loc]
                ));
            }
        }

        let tyc = &self.travel.yc_travel;
        if tyc.len() != n_loc || tyc.iter().any(|row| row.len() != n_loc) {
            return invalid(format!("travel.yc_travel must be a {n_loc}x{n_loc} matrix"));
        }
        #[allow(clippy::needless_range_loop)]
        for k in 0..n_loc {
            if tyc[k][k] != 0 {
                return invalid(format!("travel.yc_travel[{k}][{k}] must be 0"));
            }
            for l in 0..n_loc {
                if tyc[k][l] < 0 {
                    return invalid(format!("travel.yc_travel[{k}][{l}] is negative"));
                }
                if tyc[k][l] != tyc[l][k] {
                    return invalid(format!("travel.yc_travel is not symmetric at ({k}, {l})"));
                }
            }
        }
        if self.travel.yt_inbound_transfer.len() != n_loc {
            return invalid(format!(
                "travel.yt_inbound_transfer must have {n_loc} entries (one per location)"
            ));
        }
        if let Some(k) = self.travel.yt_inbound_transfer.iter().position(|&t| t < 0) {
            return invalid(format!("travel.yt_inbound_transfer[{k}] is negative"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    pub fn vessels(&self) -> &[Vessel] {
        &self.vessels
    }

    pub fn shipments(&self) -> &[Shipment] {
        &self.shipments
    }

    pub fn shipment(&self, id: usize) -> &Shipment {
        &self.shipments[id]
    }

    pub fn yard_locations(&self) -> &[YardLocation] {
        &self.yard_locations
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn travel(&self) -> &Travel {
        &self.travel
    }

    pub fn num_shipments(&self) -> usize {
        self.shipments.len()
    }

    pub fn total_bays(&self) -> u32 {
        self.geometry.total_bays
    }

    pub fn qc_count(&self) -> u32 {
        self.geometry.qc_count
    }

    pub fn yc_count(&self) -> usize {
        self.geometry.yc_count
    }

    pub fn safety_distance(&self) -> u32 {
        self.geometry.safety_distance
    }

    pub fn qc_unit_travel(&self) -> Time {
        self.geometry.qc_unit_travel
    }

    /// Locations inbound shipments may be stored at, in id order.
    pub fn inbound_locations(&self) -> &[usize] {
        &self.inbound_locations
    }

    pub fn inbound_shipments(&self) -> impl Iterator<Item = &Shipment> {
        self.shipments.iter().filter(|s| s.is_inbound())
    }

    pub fn outbound_shipments(&self) -> impl Iterator<Item = &Shipment> {
        self.shipments.iter().filter(|s| !s.is_inbound())
    }

    /// YC travel time between two yard locations.
    pub fn tyc(&self, from: usize, to: usize) -> Time {
        self.travel.yc_travel[from][to]
    }

    /// YT transfer time from the quay to inbound location `loc`.
    pub fn tt(&self, loc: usize) -> Time {
        self.travel.yt_inbound_transfer[loc]
    }

    /// The yard crane responsible for a location.
    pub fn yc_of(&self, loc: usize) -> usize {
        self.yard_locations[loc].yc
    }

    /// Whether `yc_travel` satisfies the triangle inequality.
    pub fn yc_travel_is_metric(&self) -> bool {
        let t = &self.travel.yc_travel;
        let n = t.len();
        (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| t[a][c] <= t[a][b] + t[b][c])))
    }

    /// A copy of this instance whose shipments are relabeled: new shipment
    /// `k` is old shipment `order[k]`.
    pub fn permute_shipments(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.shipments.len() {
            return invalid("permutation length differs from shipment count");
        }
        let shipments = order
            .iter()
            .enumerate()
            .map(|(new_id, &old)| Shipment {
                id: new_id,
                ..self.shipments[old].clone()
            })
            .collect();
        Self::new(
            self.vessels.clone(),
            shipments,
            self.yard_locations.clone(),
            self.geometry.clone(),
            self.travel.clone(),
        )
    }

    /// A copy with one inbound-available location removed; ids above it shift down.
    pub fn without_location(&self, loc: usize) -> Result<Self> {
        if self.yard_locations.get(loc).map(|l| l.reserved_for)
            != Some(Reservation::InboundAvailable)
        {
            return invalid(format!(
                "location {loc} is not an inbound-available location"
            ));
        }
        let remap = |k: usize| if k > loc { k - 1 } else { k };
        let yard_locations = self
            .yard_locations
            .iter()
            .filter(|l| l.id != loc)
            .map(|l| YardLocation {
                id: remap(l.id),
                ..l.clone()
            })
            .collect();
        let shipments = self
            .shipments
            .iter()
            .map(|s| Shipment {
                fixed_location: s.fixed_location.map(remap),
                ..s.clone()
            })
            .collect();
        let keep = |v: &[Time]| -> Vec<Time> {
            v.iter()
                .enumerate()
                .filter(|&(k, _)| k != loc)
                .map(|(_, &t)| t)
                .collect()
        };
        let travel = Travel {
            yc_travel: self
                .travel
                .yc_travel
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != loc)
                .map(|(_, row)| keep(row))
                .collect(),
            yt_inbound_transfer: keep(&self.travel.yt_inbound_transfer),
        };
        Self::new(
            self.vessels.clone(),
            shipments,
            yard_locations,
            self.geometry.clone(),
            travel,
        )
    }

    /// A copy with all vessel weights multiplied by `factor`.
    pub fn scale_weights(&self, factor: i64) -> Result<Self> {
        let vessels = self
            .vessels
            .iter()
            .map(|v| Vessel {
                id: v.id,
                weight: v.weight * factor,
            })
            .collect();
        Self::new(
            vessels,
            self.shipments.clone(),
            self.yard_locations.clone(),
            self.geometry.clone(),
            self.travel.clone(),
        )
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// One vessel, one inbound shipment at bay 1, two inbound locations on YC 0.
    pub(crate) fn tiny_inbound() -> Instance {
        Instance::new(
            vec![Vessel { id: 0, weight: 1 }],
            vec![Shipment {
                id: 0,
                vessel: 0,
                direction: Direction::Inbound,
                bay: 1,
                containers: 4,
                qc_time: 8,
                yc_time: 10,
                fixed_location: None,
                yt_outbound_time: None,
            }],
            vec![
                YardLocation {
                    id: 0,
                    yc: 0,
                    block_group: 0,
                    field: Field::C,
                    reserved_for: Reservation::InboundAvailable,
                },
                YardLocation {
                    id: 1,
                    yc: 0,
                    block_group: 1,
                    field: Field::A,
                    reserved_for: Reservation::InboundAvailable,
                },
            ],
            Geometry {
                total_bays: 2,
                qc_count: 1,
                yc_count: 1,
                safety_distance: 1,
                qc_unit_travel: 3,
            },
            Travel {
                yc_travel: vec![vec![0, 1], vec![1, 0]],
                yt_inbound_transfer: vec![5, 9],
            },
        )
        .unwrap()
    }

    #[test]
    fn json_round_trip_preserves_instance() {
        let inst = tiny_inbound();
        let back = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(inst, back);
        assert_eq!(back.inbound_locations(), &[0, 1]);
    }

    #[test]
    fn accepts_short_geometry_aliases() {
        let text = inst_json_with_geometry(
            r#"{"B_T": 2, "QC_T": 1, "yc_count": 1, "delta": 1, "s_qc": 3}"#,
        );
        let inst = Instance::from_json(&text).unwrap();
        assert_eq!(inst.safety_distance(), 1);
        assert_eq!(inst.qc_unit_travel(), 3);
    }

    fn inst_json_with_geometry(geometry: &str) -> String {
        let mut v: serde_json::Value = serde_json::from_str(&tiny_inbound().to_json()).unwrap();
        v["geometry"] = serde_json::from_str(geometry).unwrap();
        v.to_string()
    }

    #[test]
    fn rejects_bay_out_of_range() {
        let mut v: serde_json::Value = serde_json::from_str(&tiny_inbound().to_json()).unwrap();
        v["shipments"][0]["bay"] = 3.into();
        let err = Instance::from_json(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("shipments[0].bay"), "{err}");
    }

    #[test]
    fn rejects_asymmetric_travel() {
        let mut v: serde_json::Value = serde_json::from_str(&tiny_inbound().to_json()).unwrap();
        v["travel"]["yc_travel"][0][1] = 2.into();
        assert!(Instance::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn rejects_outbound_without_fixed_location() {
        let mut v: serde_json::Value = serde_json::from_str(&tiny_inbound().to_json()).unwrap();
        v["shipments"][0]["direction"] = "outbound".into();
        let err = Instance::from_json(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("fixed_location"), "{err}");
    }

    #[test]
    fn rejects_zero_weight() {
        let mut v: serde_json::Value = serde_json::from_str(&tiny_inbound().to_json()).unwrap();
        v["vessels"][0]["weight"] = 0.into();
        assert!(Instance::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn without_location_shifts_ids() {
        let inst = tiny_inbound().without_location(0).unwrap();
        assert_eq!(inst.yard_locations().len(), 1);
        assert_eq!(inst.tt(0), 9);
    }
}
