//! Seeded synthetic ride-share data: a rectangular zone grid plus trip
//! records with a few persistently hot zones. Output uses the exact file
//! schemas of the real pipeline (zone-geometry JSON, trip-record CSV), so
//! tests exercise the ingestion path end to end.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scenario::geometry::{Zone, ZoneGeometry};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticRideshareConfig {
    pub zone_rows: usize,
    pub zone_cols: usize,
    pub horizon: usize,
    pub seed: u64,
    /// Mean trips per (zone, bin) before the hot-zone multiplier.
    pub base_demand: f64,
    /// Demand multiplier of the hot zones.
    pub hot_multiplier: f64,
    /// Grid pitch of the zone centroids in degrees; 0.012 is roughly a
    /// 0.8 mile spacing.
    pub zone_spacing_deg: f64,
}

impl Default for SyntheticRideshareConfig {
    fn default() -> Self {
        Self {
            zone_rows: 3,
            zone_cols: 3,
            horizon: 15,
            seed: 7,
            base_demand: 40.0,
            hot_multiplier: 3.0,
            zone_spacing_deg: 0.012,
        }
    }
}

/// Generates the geometry JSON and trip CSV for a synthetic scenario.
/// Deterministic per config.
pub fn generate_synthetic_rideshare(cfg: &SyntheticRideshareConfig) -> Result<(String, String)> {
    let rows = cfg.zone_rows;
    let cols = cfg.zone_cols;
    let states = rows * cols;
    let id_of = |s: usize| 100 + s as u32;

    let mut zones = Vec::with_capacity(states);
    for s in 0..states {
        let (r, c) = (s / cols, s % cols);
        let mut neighbors = Vec::new();
        if r > 0 {
            neighbors.push(id_of(s - cols));
        }
        if r + 1 < rows {
            neighbors.push(id_of(s + cols));
        }
        if c > 0 {
            neighbors.push(id_of(s - 1));
        }
        if c + 1 < cols {
            neighbors.push(id_of(s + 1));
        }
        zones.push(Zone {
            id: id_of(s),
            lat: 40.70 + cfg.zone_spacing_deg * r as f64,
            lon: -74.00 + cfg.zone_spacing_deg * c as f64,
            neighbors,
        });
    }
    let geometry = ZoneGeometry::new(zones)?;
    let geometry_json = geometry.to_json_string()?;

    // three comparably hot zones of slightly decreasing intensity: the
    // south-west corner, the grid center, and the north-east corner
    let hot: [(usize, f64); 3] = [
        (0, cfg.hot_multiplier),
        ((rows / 2) * cols + cols / 2, 0.95 * cfg.hot_multiplier),
        (states - 1, 0.9 * cfg.hot_multiplier),
    ];
    let boost_of = |s: usize| -> f64 {
        hot.iter().find(|&&(z, _)| z == s).map(|&(_, m)| m).unwrap_or(1.0)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut csv = String::from("origin_zone,dest_zone,pickup_datetime\n");
    // destination popularity: hot zones attract more riders
    let weights: Vec<f64> = (0..states).map(boost_of).collect();
    let weight_sum: f64 = weights.iter().sum();

    for t in 0..cfg.horizon {
        for origin in 0..states {
            let boost = boost_of(origin);
            // mid-morning demand peak
            let profile = 1.0 + 0.3 * (std::f64::consts::PI * t as f64 / cfg.horizon as f64).sin();
            let lambda = cfg.base_demand * boost * profile;
            let trips = (lambda * (0.8 + 0.4 * rng.gen::<f64>())).round() as usize;
            for _ in 0..trips.max(1) {
                let mut pick = rng.gen::<f64>() * weight_sum;
                let mut dest = states - 1;
                for (s, &w) in weights.iter().enumerate() {
                    if pick < w {
                        dest = s;
                        break;
                    }
                    pick -= w;
                }
                let minute = 9 * 60 + t * 12 + rng.gen_range(0..12);
                csv.push_str(&format!(
                    "{},{},2019-01-15 {:02}:{:02}:00\n",
                    id_of(origin),
                    id_of(dest),
                    minute / 60,
                    minute % 60
                ));
            }
        }
    }
    Ok((geometry_json, csv))
}
