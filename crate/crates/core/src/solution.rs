//! Candidate solutions: discrete decisions plus the timing they induce.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::instance::Time;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Feasible,
    Infeasible,
    Unknown,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Optimal => "optimal",
            Status::Feasible => "feasible",
            Status::Infeasible => "infeasible",
            Status::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// Which shipment of an interfering pair is handled first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum First {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "j")]
    J,
}

/// Shipments `i < j` handled by quay cranes `v` and `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InterferenceKey {
    pub i: usize,
    pub j: usize,
    pub v: u32,
    pub w: u32,
}

impl InterferenceKey {
    /// `(first, second)` shipment ids under `order`.
    pub fn ordered(&self, order: First) -> (usize, usize) {
        match order {
            First::I => (self.i, self.j),
            First::J => (self.j, self.i),
        }
    }
}

/// The discrete part of a solution; timing follows from these by longest path.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Decisions {
    /// Inbound shipment → yard location.
    pub yard_assignment: BTreeMap<usize, usize>,
    /// Shipment → quay crane.
    pub qc_assignment: BTreeMap<usize, u32>,
    /// `qc_sequences[q-1]`: handling order on quay crane `q`.
    pub qc_sequences: Vec<Vec<usize>>,
    /// `yc_sequences[c]`: handling order on yard crane `c`.
    pub yc_sequences: Vec<Vec<usize>>,
    pub interference_order: BTreeMap<InterferenceKey, First>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Starts {
    pub qc: Vec<Time>,
    pub yc: Vec<Time>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub yard_assignment: BTreeMap<usize, usize>,
    pub qc_assignment: BTreeMap<usize, u32>,
    pub qc_sequences: Vec<Vec<usize>>,
    pub yc_sequences: Vec<Vec<usize>>,
    #[serde(with = "interference_entries")]
    pub interference_order: BTreeMap<InterferenceKey, First>,
    pub starts: Starts,
    /// YT travel time of each inbound shipment.
    pub yt_time: BTreeMap<usize, Time>,
    /// YC empty travel between consecutive shipments when at least one is inbound.
    #[serde(with = "pair_entries")]
    pub yc_empty: BTreeMap<(usize, usize), Time>,
    pub per_vessel_completion: Vec<Time>,
    pub objective: i64,
    pub status: Status,
}

impl Solution {
    pub fn decisions(&self) -> Decisions {
        Decisions {
            yard_assignment: self.yard_assignment.clone(),
            qc_assignment: self.qc_assignment.clone(),
            qc_sequences: self.qc_sequences.clone(),
            yc_sequences: self.yc_sequences.clone(),
            interference_order: self.interference_order.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

mod interference_entries {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        i: usize,
        j: usize,
        v: u32,
        w: u32,
        first: First,
    }

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<InterferenceKey, First>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = map
            .iter()
            .map(|(k, &first)| Entry {
                i: k.i,
                j: k.j,
                v: k.v,
                w: k.w,
                first,
            })
            .collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<InterferenceKey, First>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        Ok(entries
            .into_iter()
            .map(|e| {
                (
                    InterferenceKey {
                        i: e.i,
                        j: e.j,
                        v: e.v,
                        w: e.w,
                    },
                    e.first,
                )
            })
            .collect())
    }
}

mod pair_entries {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        from: usize,
        to: usize,
        time: Time,
    }

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<(usize, usize), Time>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = map
            .iter()
            .map(|(&(from, to), &time)| Entry { from, to, time })
            .collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<(usize, usize), Time>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        Ok(entries
            .into_iter()
            .map(|e| ((e.from, e.to), e.time))
            .collect())
    }
}
