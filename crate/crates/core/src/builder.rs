//! Programmatic construction of small instances, mostly for tests and examples.

use crate::error::Result;
use crate::instance::{
    Direction, Field, Geometry, Instance, Reservation, Shipment, Time, Travel, Vessel, YardLocation,
};

#[derive(Debug, Clone)]
pub struct InstanceBuilder {
    vessels: Vec<Vessel>,
    shipments: Vec<Shipment>,
    locations: Vec<YardLocation>,
    tt: Vec<Time>,
    tyc: Option<Vec<Vec<Time>>>,
    geometry: Geometry,
}

impl InstanceBuilder {
    /// Starts with one vessel of weight 1, safety distance 1 and 3 time units per bay.
    pub fn new(total_bays: u32, qc_count: u32, yc_count: usize) -> Self {
        Self {
            vessels: vec![Vessel { id: 0, weight: 1 }],
            shipments: Vec::new(),
            locations: Vec::new(),
            tt: Vec::new(),
            tyc: None,
            geometry: Geometry {
                total_bays,
                qc_count,
                yc_count,
                safety_distance: 1,
                qc_unit_travel: 3,
            },
        }
    }

    pub fn safety_distance(mut self, delta: u32) -> Self {
        self.geometry.safety_distance = delta;
        self
    }

    pub fn qc_unit_travel(mut self, s_qc: Time) -> Self {
        self.geometry.qc_unit_travel = s_qc;
        self
    }

    /// Replaces the vessel list with vessels of the given weights.
    pub fn vessel_weights(mut self, weights: &[i64]) -> Self {
        self.vessels = weights
            .iter()
            .enumerate()
            .map(|(id, &weight)| Vessel { id, weight })
            .collect();
        self
    }

    /// Overrides the default YC travel matrix (0 on the diagonal, 1 within a
    /// crane's area, 2 across areas).
    pub fn yc_travel(mut self, matrix: Vec<Vec<Time>>) -> Self {
        self.tyc = Some(matrix);
        self
    }

    pub fn inbound_location(&mut self, yc: usize, tt: Time) -> usize {
        self.push_location(yc, tt, Reservation::InboundAvailable)
    }

    pub fn inbound(&mut self, vessel: usize, bay: u32, qc_time: Time, yc_time: Time) -> usize {
        let id = self.shipments.len();
        self.shipments.push(Shipment {
            id,
            vessel,
            direction: Direction::Inbound,
            bay,
            containers: 1,
            qc_time,
            yc_time,
            fixed_location: None,
            yt_outbound_time: None,
        });
        id
    }

    /// Adds an outbound shipment together with its fixed location on `yc`.
    pub fn outbound(
        &mut self,
        vessel: usize,
        bay: u32,
        qc_time: Time,
        yc_time: Time,
        yc: usize,
        tyt: Time,
    ) -> usize {
        let loc = self.push_location(yc, 0, Reservation::OutboundFixed);
        let id = self.shipments.len();
        self.shipments.push(Shipment {
            id,
            vessel,
            direction: Direction::Outbound,
            bay,
            containers: 1,
            qc_time,
            yc_time,
            fixed_location: Some(loc),
            yt_outbound_time: Some(tyt),
        });
        id
    }

    fn push_location(&mut self, yc: usize, tt: Time, reserved_for: Reservation) -> usize {
        let id = self.locations.len();
        self.locations.push(YardLocation {
            id,
            yc,
            block_group: 0,
            field: Field::C,
            reserved_for,
        });
        self.tt.push(tt);
        id
    }

    pub fn build(self) -> Result<Instance> {
        let n = self.locations.len();
        let tyc = self.tyc.unwrap_or_else(|| {
            (0..n)
                .map(|k| {
                    (0..n)
                        .map(|l| {
                            if k == l {
                                0
                            } else if self.locations[k].yc == self.locations[l].yc {
                                1
                            } else {
                                2
                            }
                        })
                        .collect()
                })
                .collect()
        });
        Instance::new(
            self.vessels,
            self.shipments,
            self.locations,
            self.geometry,
            Travel {
                yc_travel: tyc,
                yt_inbound_transfer: self.tt,
            },
        )
    }
}
