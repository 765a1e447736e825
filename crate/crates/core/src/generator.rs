//! Random instances on a fixed terminal layout.
//!
//! The yard has three fields, `C` next to the quay and `A` furthest away
//! uphill. Each field has two areas served by one yard crane each, and each
//! area has two block groups. Yard cranes are numbered `2·field + area` with
//! fields ordered `A, B, C`.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::instance::{
    Direction, Field, Geometry, Instance, Reservation, Shipment, Time, Travel, Vessel, YardLocation,
};

pub const FIELDS: [Field; 3] = [Field::A, Field::B, Field::C];
pub const AREAS_PER_FIELD: usize = 2;
pub const GROUPS_PER_AREA: usize = 2;
pub const YC_COUNT: usize = FIELDS.len() * AREAS_PER_FIELD;

pub const CONTAINERS: (u32, u32) = (4, 40);
pub const QC_RATE: (Time, Time) = (2, 4);
pub const YC_RATE: (Time, Time) = (2, 5);
pub const QC_UNIT_TRAVEL: Time = 3;
pub const SAFETY_DISTANCE: u32 = 1;

pub const GRID_UL_RATIOS: [u32; 2] = [2, 3];
pub const GRID_BAYS: [u32; 3] = [4, 6, 8];
pub const GRID_SHIPMENTS: [usize; 5] = [5, 10, 15, 20, 25];
pub const GRID_INBOUND_RATIOS: [f64; 2] = [0.2, 0.5];

/// YT transfer range by field: closer to the quay is faster.
pub fn transfer_range(field: Field) -> (Time, Time) {
    match field {
        Field::C => (5, 7),
        Field::B => (6, 8),
        Field::A => (8, 10),
    }
}

/// YC travel between two block groups (global group ids `4·field + 2·area + group`).
pub fn group_travel(from: u32, to: u32) -> Time {
    let (f1, a1) = (from as usize / 4, from as usize / 2 % 2);
    let (f2, a2) = (to as usize / 4, to as usize / 2 % 2);
    if from == to {
        0
    } else if f1 == f2 && a1 == a2 {
        1
    } else if f1 == f2 {
        2
    } else {
        2 + 2 * f1.abs_diff(f2) as Time
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    /// Available inbound locations per inbound shipment.
    pub ul_ratio: u32,
    pub bays: u32,
    pub shipments: usize,
    pub inbound_ratio: f64,
    #[serde(default = "one")]
    pub vessels: usize,
    pub seed: u64,
    #[serde(default = "five")]
    pub instances_per_config: usize,
}

fn one() -> usize {
    1
}

fn five() -> usize {
    5
}

impl GenConfig {
    pub fn new(ul_ratio: u32, bays: u32, shipments: usize, inbound_ratio: f64, seed: u64) -> Self {
        Self {
            ul_ratio,
            bays,
            shipments,
            inbound_ratio,
            vessels: 1,
            seed,
            instances_per_config: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ConfigInvalid(m));
        if self.bays < 2 || !self.bays.is_multiple_of(2) {
            return bad(format!(
                "bays must be a positive even number, got {}",
                self.bays
            ));
        }
        if self.ul_ratio == 0 {
            return bad("ul_ratio must be positive".into());
        }
        if self.shipments == 0 {
            return bad("shipments must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.inbound_ratio) {
            return bad(format!(
                "inbound_ratio must lie in [0, 1], got {}",
                self.inbound_ratio
            ));
        }
        if self.vessels == 0 || self.vessels > self.bays as usize {
            return bad(format!(
                "vessels must lie in [1, {}], got {}",
                self.bays, self.vessels
            ));
        }
        Ok(())
    }

    pub fn qc_count(&self) -> u32 {
        self.bays / 2
    }

    /// Rounded half away from zero, so 2.5 inbound shipments become 3.
    pub fn inbound_count(&self) -> usize {
        (self.inbound_ratio * self.shipments as f64).round() as usize
    }

    pub fn inbound_location_count(&self) -> usize {
        self.ul_ratio as usize * self.inbound_count()
    }

    /// Stable identifier, e.g. `u2_b4_s5_r20`.
    pub fn id(&self) -> String {
        format!(
            "u{}_b{}_s{}_r{}",
            self.ul_ratio,
            self.bays,
            self.shipments,
            (self.inbound_ratio * 100.0).round() as u32
        )
    }

    pub fn file_name(&self, replicate: usize) -> String {
        format!("ipctp_{}_{replicate}.json", self.id())
    }

    /// Seed of replicate `replicate`, derived from `seed` and every config field.
    pub fn replicate_seed(&self, replicate: usize) -> u64 {
        let mut h = Sha256::new();
        h.update(b"ipctp-gen");
        h.update(self.seed.to_le_bytes());
        h.update(self.ul_ratio.to_le_bytes());
        h.update(self.bays.to_le_bytes());
        h.update((self.shipments as u64).to_le_bytes());
        h.update(self.inbound_ratio.to_bits().to_le_bytes());
        h.update((self.vessels as u64).to_le_bytes());
        h.update((replicate as u64).to_le_bytes());
        let digest = h.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
    }
}

/// Vessel owning `bay` when bays are split into contiguous ranges.
fn vessel_of_bay(bay: u32, bays: u32, vessels: usize) -> usize {
    ((bay as usize - 1) * vessels) / bays as usize
}

/// One instance drawn from `config.seed`.
pub fn generate(config: &GenConfig) -> Result<Instance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.shipments;
    let n_in = config.inbound_count();
    let n_out = n - n_in;
    let n_free = config.inbound_location_count();

    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut rng);
    let mut inbound = vec![false; n];
    for &i in &ids[..n_in] {
        inbound[i] = true;
    }

    // Outbound shipments take the first n_out locations, in id order.
    let total_groups = (YC_COUNT * GROUPS_PER_AREA) as u32;
    let mut locations = Vec::with_capacity(n_out + n_free);
    let mut tt = Vec::with_capacity(n_out + n_free);
    for id in 0..n_out + n_free {
        let group = rng.gen_range(0..total_groups);
        let field = FIELDS[group as usize / 4];
        let (lo, hi) = transfer_range(field);
        tt.push(rng.gen_range(lo..=hi));
        locations.push(YardLocation {
            id,
            yc: group as usize / GROUPS_PER_AREA,
            block_group: group,
            field,
            reserved_for: if id < n_out {
                Reservation::OutboundFixed
            } else {
                Reservation::InboundAvailable
            },
        });
    }

    let mut next_out = 0;
    let mut shipments = Vec::with_capacity(n);
    for (id, &is_inbound) in inbound.iter().enumerate() {
        let containers = rng.gen_range(CONTAINERS.0..=CONTAINERS.1);
        let qc_rate = rng.gen_range(QC_RATE.0..=QC_RATE.1);
        let yc_rate = rng.gen_range(YC_RATE.0..=YC_RATE.1);
        let bay = rng.gen_range(1..=config.bays);
        let (direction, fixed_location, yt_outbound_time) = if is_inbound {
            (Direction::Inbound, None, None)
        } else {
            let loc = next_out;
            next_out += 1;
            let (lo, hi) = transfer_range(locations[loc].field);
            (Direction::Outbound, Some(loc), Some(rng.gen_range(lo..=hi)))
        };
        shipments.push(Shipment {
            id,
            vessel: vessel_of_bay(bay, config.bays, config.vessels),
            direction,
            bay,
            containers,
            qc_time: qc_rate * Time::from(containers),
            yc_time: yc_rate * Time::from(containers),
            fixed_location,
            yt_outbound_time,
        });
    }

    let yc_travel = locations
        .iter()
        .map(|a| {
            locations
                .iter()
                .map(|b| group_travel(a.block_group, b.block_group))
                .collect()
        })
        .collect();

    Instance::new(
        (0..config.vessels)
            .map(|id| Vessel { id, weight: 1 })
            .collect(),
        shipments,
        locations,
        Geometry {
            total_bays: config.bays,
            qc_count: config.qc_count(),
            yc_count: YC_COUNT,
            safety_distance: SAFETY_DISTANCE,
            qc_unit_travel: QC_UNIT_TRAVEL,
        },
        Travel {
            yc_travel,
            yt_inbound_transfer: tt,
        },
    )
}

/// Replicate `replicate` of a configuration, seeded by [`GenConfig::replicate_seed`].
pub fn generate_replicate(config: &GenConfig, replicate: usize) -> Result<Instance> {
    generate(&GenConfig {
        seed: config.replicate_seed(replicate),
        ..config.clone()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub config: String,
    pub ul_ratio: u32,
    pub bays: u32,
    pub shipments: usize,
    pub inbound_ratio: f64,
    pub vessels: usize,
    pub replicate: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub manifest: ManifestEntry,
    pub instance: Instance,
}

/// The configurations of the full experimental grid, in grid order.
pub fn grid_configs(base_seed: u64) -> Vec<GenConfig> {
    let mut out = Vec::new();
    for &ul in &GRID_UL_RATIOS {
        for &bays in &GRID_BAYS {
            for &shp in &GRID_SHIPMENTS {
                for &ratio in &GRID_INBOUND_RATIOS {
                    out.push(GenConfig::new(ul, bays, shp, ratio, base_seed));
                }
            }
        }
    }
    out
}

/// All replicates of the given configurations.
pub fn generate_corpus(configs: &[GenConfig]) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for config in configs {
        for rep in 0..config.instances_per_config {
            let seed = config.replicate_seed(rep);
            out.push(CorpusEntry {
                manifest: ManifestEntry {
                    file: config.file_name(rep),
                    config: config.id(),
                    ul_ratio: config.ul_ratio,
                    bays: config.bays,
                    shipments: config.shipments,
                    inbound_ratio: config.inbound_ratio,
                    vessels: config.vessels,
                    replicate: rep,
                    seed,
                },
                instance: generate_replicate(config, rep)?,
            });
        }
    }
    Ok(out)
}

/// The 300-instance grid: 2 U-L ratios × 3 bay counts × 5 shipment counts ×
/// 2 inbound ratios × 5 replicates.
pub fn generate_grid(base_seed: u64) -> Result<Vec<CorpusEntry>> {
    generate_corpus(&grid_configs(base_seed))
}

/// Writes every instance plus `manifest.json` into `dir`.
pub fn write_corpus(entries: &[CorpusEntry], dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    for e in entries {
        e.instance.save(dir.join(&e.manifest.file))?;
    }
    let manifest: Vec<&ManifestEntry> = entries.iter().map(|e| &e.manifest).collect();
    std::fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(())
}

pub fn read_manifest(dir: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let text = std::fs::read_to_string(dir.as_ref().join("manifest.json"))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_bays() {
        let c = GenConfig::new(2, 5, 5, 0.2, 1);
        assert!(matches!(generate(&c), Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn group_travel_is_a_metric() {
        for a in 0..12 {
            for b in 0..12 {
                assert_eq!(group_travel(a, b), group_travel(b, a));
                for c in 0..12 {
                    assert!(group_travel(a, c) <= group_travel(a, b) + group_travel(b, c));
                }
            }
        }
        assert_eq!(group_travel(0, 1), 1);
        assert_eq!(group_travel(0, 2), 2);
        assert_eq!(group_travel(0, 11), 6);
    }

    #[test]
    fn contiguous_vessel_split() {
        let owners: Vec<usize> = (1..=6).map(|b| vessel_of_bay(b, 6, 3)).collect();
        assert_eq!(owners, vec![0, 0, 1, 1, 2, 2]);
    }
}
