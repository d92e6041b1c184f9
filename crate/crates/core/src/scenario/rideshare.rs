//! Ride-share instance construction: move/pickup transition kernels,
//! fare/fuel/wait driver costs, and per-zone capacity constraints.
//!
//! Action layout per state: action 0 waits for a pickup; actions
//! `1..=max_neighbors` move to the corresponding neighbor. States with
//! fewer neighbors than the maximum fill the remaining slots with a
//! deterministic stay-in-place cruise, so the action tensor stays
//! rectangular.

use serde::{Deserialize, Serialize};

use crate::dims::Dimensions;
use crate::error::{Error, Result};
use crate::game::CostModel;
use crate::mdp::{InitialDistribution, TransitionKernel};
use crate::scenario::geometry::ZoneGeometry;
use crate::scenario::trips::TripRecords;
use crate::scenario::Instance;
use crate::tolling::ConstraintSet;

/// Driver cost parameters; defaults follow the published UberX-style
/// figures (fares in dollars, distances in miles, 12-minute bins).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RideShareParams {
    /// Time-money tradeoff factor multiplying `d / velocity`.
    pub mu: f64,
    /// Average driving speed, miles per hour.
    pub velocity: f64,
    /// Dollars per gallon.
    pub fuel_price: f64,
    /// Miles per gallon.
    pub fuel_efficiency: f64,
    /// Probability of deviating from the chosen move target.
    pub deviation: f64,
    /// Average trip duration in minutes, used in the fare.
    pub trip_minutes: f64,
    pub base_fare: f64,
    pub per_minute: f64,
    pub per_mile: f64,
    pub min_fare: f64,
    /// Multiplier turning observed trip counts into ride demand.
    pub demand_scale: f64,
    /// Congestion coefficient of move actions.
    pub omega: f64,
}

impl Default for RideShareParams {
    fn default() -> Self {
        Self {
            mu: 15.0,
            velocity: 8.0,
            fuel_price: 2.5,
            fuel_efficiency: 20.0,
            deviation: 0.1,
            trip_minutes: 12.0,
            base_fare: 2.55,
            per_minute: 0.35,
            per_mile: 1.75,
            min_fare: 7.0,
            demand_scale: 3.0,
            omega: 0.1,
        }
    }
}

impl RideShareParams {
    fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.deviation) {
            return Err(Error::validation(format!(
                "deviation probability {} outside [0, 1)",
                self.deviation
            )));
        }
        let monetary = [
            self.mu,
            self.velocity,
            self.fuel_price,
            self.fuel_efficiency,
            self.trip_minutes,
            self.base_fare,
            self.per_minute,
            self.per_mile,
            self.min_fare,
            self.demand_scale,
            self.omega,
        ];
        if monetary.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::validation("ride-share parameters must be nonnegative".to_string()));
        }
        if self.velocity == 0.0 || self.fuel_efficiency == 0.0 {
            return Err(Error::validation("velocity and fuel efficiency must be positive".to_string()));
        }
        Ok(())
    }

    /// Fare `max(min_fare, base + per_minute * trip_minutes + per_mile * d)`.
    pub fn fare(&self, distance_miles: f64) -> f64 {
        (self.base_fare + self.per_minute * self.trip_minutes + self.per_mile * distance_miles)
            .max(self.min_fare)
    }

    /// Travel cost `mu * d / velocity + fuel_price * d / fuel_efficiency`.
    pub fn travel_cost(&self, distance_miles: f64) -> f64 {
        self.mu * distance_miles / self.velocity
            + self.fuel_price * distance_miles / self.fuel_efficiency
    }
}

/// Destination distributions of the move actions: `cols[s][j]` is the
/// distribution over destinations when moving toward the j-th neighbor of
/// `s`. Slots beyond the neighbor count are stay-in-place cruises.
#[derive(Debug, Clone)]
pub struct MoveKernel {
    pub states: usize,
    pub slots: usize,
    cols: Vec<Vec<f64>>,
}

impl MoveKernel {
    pub fn column(&self, s: usize, slot: usize) -> &[f64] {
        &self.cols[s * self.slots + slot]
    }

    /// True when the slot is a padded self-loop rather than a real move.
    pub fn is_padding(&self, geometry: &ZoneGeometry, s: usize, slot: usize) -> bool {
        slot >= geometry.neighbors(s).len()
    }
}

/// Builds the move-action kernel slice: mass `1 - delta` on the chosen
/// neighbor and `delta / (|N(s)| - 1)` on each other neighbor.
pub fn build_move_kernel(geometry: &ZoneGeometry, delta: f64) -> Result<MoveKernel> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::validation(format!("deviation {delta} outside [0, 1)")));
    }
    let states = geometry.num_zones();
    let slots = geometry.max_neighbors();
    let mut cols = Vec::with_capacity(states * slots);
    for s in 0..states {
        let neighbors = geometry.neighbors(s);
        if delta > 0.0 && neighbors.len() == 1 {
            return Err(Error::validation(format!(
                "zone {} has a single neighbor; deviation {delta} has no alternative target",
                geometry.zones()[s].id
            )));
        }
        for slot in 0..slots {
            let mut col = vec![0.0; states];
            if slot < neighbors.len() {
                let target = neighbors[slot];
                col[target] = 1.0 - delta;
                if delta > 0.0 {
                    let spread = delta / (neighbors.len() - 1) as f64;
                    for &other in neighbors {
                        if other != target {
                            col[other] += spread;
                        }
                    }
                }
            } else {
                // padded slot: deterministic stay-in-place cruise
                col[s] = 1.0;
            }
            cols.push(col);
        }
    }
    Ok(MoveKernel { states, slots, cols })
}

/// Destination distributions of the pickup action per (t, s), proportional
/// to observed rider demand.
#[derive(Debug, Clone)]
pub struct PickupKernel {
    pub states: usize,
    pub horizon: usize,
    cols: Vec<Vec<f64>>,
    /// (t, s) cells that had zero demand and fell back to a self loop.
    pub fallback_cells: usize,
}

impl PickupKernel {
    pub fn column(&self, t: usize, s: usize) -> &[f64] {
        &self.cols[t * self.states + s]
    }
}

/// Builds the pickup-action kernel slice from demand counts. Cells with no
/// demand fall back to a self loop (with a logged warning) so the action
/// remains well defined.
pub fn build_pickup_kernel(trips: &TripRecords) -> Result<PickupKernel> {
    let states = trips.states();
    let horizon = trips.horizon();
    let mut cols = Vec::with_capacity(horizon * states);
    let mut fallback_cells = 0usize;
    for t in 0..horizon {
        for s in 0..states {
            let total = trips.total_demand(s, t);
            let mut col = vec![0.0; states];
            if total > 0.0 {
                for dest in 0..states {
                    col[dest] = trips.count(s, dest, t) / total;
                }
            } else {
                log::warn!("no rider demand at zone index {s}, bin {t}; pickup falls back to a self loop");
                col[s] = 1.0;
                fallback_cells += 1;
            }
            cols.push(col);
        }
    }
    Ok(PickupKernel { states, horizon, cols, fallback_cells })
}

/// Assembles the full transition kernel from the pickup and move slices.
/// Action 0 is the pickup; the remaining slots are moves.
pub fn assemble_kernel(
    pickup: &PickupKernel,
    moves: &MoveKernel,
) -> Result<TransitionKernel> {
    if pickup.states != moves.states {
        return Err(Error::dim("pickup and move slices disagree on state count".to_string()));
    }
    let dims = Dimensions::new(pickup.horizon, pickup.states, moves.slots + 1)?;
    let mut p = vec![0.0; dims.kernel_len()];
    for t in 0..dims.horizon {
        for src in 0..dims.states {
            let col = pickup.column(t, src);
            for dest in 0..dims.states {
                p[dims.kidx(t, dest, src, 0)] = col[dest];
            }
            for slot in 0..moves.slots {
                let col = moves.column(src, slot);
                for dest in 0..dims.states {
                    p[dims.kidx(t, dest, src, slot + 1)] = col[dest];
                }
            }
        }
    }
    TransitionKernel::new(dims, p)
}

/// Builds the affine driver cost model: per-coordinate slope (the wait or
/// congestion coefficient) plus the expected net travel cost offset.
///
/// The pickup slope at (t, s) is the demand-weighted expected fare divided
/// by the scaled demand rate; zero-demand cells fall back to a unit rate.
/// The final time slice reuses the last demand bin for its expectations.
pub fn build_costs(
    trips: &TripRecords,
    geometry: &ZoneGeometry,
    params: &RideShareParams,
) -> Result<CostModel> {
    params.validate()?;
    let moves = build_move_kernel(geometry, params.deviation)?;
    let pickup = build_pickup_kernel(trips)?;
    let dims = Dimensions::new(trips.horizon(), geometry.num_zones(), moves.slots + 1)?;

    let mut slopes = vec![0.0; dims.flat_len()];
    let mut intercepts = vec![0.0; dims.flat_len()];
    for t in 0..=dims.horizon {
        // expectations at the terminal slice reuse the last transition bin
        let bin = t.min(dims.horizon.saturating_sub(1));
        for s in 0..dims.states {
            // pickup action: expected (travel - fare) plus congestion by
            // waiting drivers
            let col = pickup.column(bin, s);
            let mut offset = 0.0;
            let mut expected_fare = 0.0;
            for dest in 0..dims.states {
                let prob = col[dest];
                if prob == 0.0 {
                    continue;
                }
                let d = geometry.distance(s, dest);
                offset += prob * (params.travel_cost(d) - params.fare(d));
                expected_fare += prob * params.fare(d);
            }
            let mut demand_rate = params.demand_scale * trips.total_demand(s, bin);
            if demand_rate <= 0.0 {
                log::warn!("zero demand rate at zone index {s}, bin {bin}; using unit rate");
                demand_rate = 1.0;
            }
            slopes[dims.idx(t, s, 0)] = expected_fare / demand_rate;
            intercepts[dims.idx(t, s, 0)] = offset;

            // move actions: expected fuel/time cost, linear congestion
            for slot in 0..moves.slots {
                let col = moves.column(s, slot);
                let mut offset = 0.0;
                for dest in 0..dims.states {
                    if col[dest] > 0.0 {
                        offset += col[dest] * params.travel_cost(geometry.distance(s, dest));
                    }
                }
                slopes[dims.idx(t, s, slot + 1)] = params.omega;
                intercepts[dims.idx(t, s, slot + 1)] = offset;
            }
        }
    }
    CostModel::affine(dims, slopes, intercepts)
}

/// One capacity row per (t, s): `sum_a y[t][s][a] <= cap`.
pub fn build_capacity_constraints(cap: f64, dims: Dimensions) -> Result<ConstraintSet> {
    if !(cap > 0.0) {
        return Err(Error::validation(format!("capacity must be positive, got {cap}")));
    }
    let mut rows = Vec::with_capacity((dims.horizon + 1) * dims.states);
    for t in 0..=dims.horizon {
        for s in 0..dims.states {
            rows.push((0..dims.actions).map(|a| (dims.idx(t, s, a), 1.0)).collect());
        }
    }
    let b = vec![cap; rows.len()];
    ConstraintSet::from_rows(rows, b, dims.flat_len())
}

/// Builds the complete ride-share instance: kernel, uniform initial
/// distribution of the given mass, cost model, and optional per-zone
/// capacity constraints.
pub fn build_rideshare_instance(
    geometry: &ZoneGeometry,
    trips: &TripRecords,
    params: &RideShareParams,
    mass: f64,
    capacity: Option<f64>,
) -> Result<Instance> {
    let moves = build_move_kernel(geometry, params.deviation)?;
    let pickup = build_pickup_kernel(trips)?;
    let kernel = assemble_kernel(&pickup, &moves)?;
    let dims = kernel.dims();
    let model = build_costs(trips, geometry, params)?;
    let p0 = InitialDistribution::uniform(dims.states, mass)?;
    let constraints = match capacity {
        Some(cap) => Some(build_capacity_constraints(cap, dims)?),
        None => None,
    };
    Ok(Instance { dims, kernel, p0, model, constraints })
}
