//! Zone geometry: centroids, adjacency, and pairwise haversine distances.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EARTH_RADIUS_MILES: f64 = 3958.7613;

/// One zone: an external id, a centroid, and the ids of its neighbors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Zone {
    pub id: u32,
    pub lat: f64,
    pub lon: f64,
    pub neighbors: Vec<u32>,
}

/// Zone set with symmetric adjacency and a distance table in miles. The
/// self distance is fixed at exactly one mile (the within-zone trip
/// estimate); cross distances are haversine.
#[derive(Debug, Clone)]
pub struct ZoneGeometry {
    zones: Vec<Zone>,
    /// neighbor lists as internal indices
    adjacency: Vec<Vec<usize>>,
    /// dense S x S distance table, row-major
    distance: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GeometryDoc {
    zones: Vec<Zone>,
}

impl ZoneGeometry {
    pub fn new(zones: Vec<Zone>) -> Result<Self> {
        if zones.is_empty() {
            return Err(Error::validation("zone geometry needs at least one zone".to_string()));
        }
        let index_of = |id: u32| -> Result<usize> {
            zones
                .iter()
                .position(|z| z.id == id)
                .ok_or_else(|| Error::validation(format!("neighbor references unknown zone id {id}")))
        };
        let mut seen = std::collections::HashSet::new();
        for z in &zones {
            if !seen.insert(z.id) {
                return Err(Error::validation(format!("duplicate zone id {}", z.id)));
            }
        }
        let mut adjacency = Vec::with_capacity(zones.len());
        for z in &zones {
            let mut list = Vec::with_capacity(z.neighbors.len());
            for &nb in &z.neighbors {
                if nb == z.id {
                    return Err(Error::validation(format!("zone {} lists itself as neighbor", z.id)));
                }
                list.push(index_of(nb)?);
            }
            adjacency.push(list);
        }
        // adjacency must be symmetric
        for (s, list) in adjacency.iter().enumerate() {
            for &t in list {
                if !adjacency[t].contains(&s) {
                    return Err(Error::validation(format!(
                        "adjacency is not symmetric: {} -> {} has no reverse edge",
                        zones[s].id, zones[t].id
                    )));
                }
            }
        }

        let n = zones.len();
        let mut distance = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                distance[i * n + j] = if i == j {
                    1.0
                } else {
                    haversine_miles(zones[i].lat, zones[i].lon, zones[j].lat, zones[j].lon)
                };
            }
        }
        Ok(Self { zones, adjacency, distance })
    }

    pub fn from_json_reader(reader: impl std::io::Read) -> Result<Self> {
        let doc: GeometryDoc = serde_json::from_reader(reader)?;
        Self::new(doc.zones)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_reader(std::fs::File::open(path)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&GeometryDoc { zones: self.zones.clone() })?)
    }

    pub fn num_zones(&self) -> usize {
        self.zones.len()
    }

    pub fn zones(&self) -> &[Zone] {
        &self.zones
    }

    /// Internal index of an external zone id.
    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.zones.iter().position(|z| z.id == id)
    }

    pub fn neighbors(&self, s: usize) -> &[usize] {
        &self.adjacency[s]
    }

    /// Largest neighbor count over all zones.
    pub fn max_neighbors(&self) -> usize {
        self.adjacency.iter().map(|l| l.len()).max().unwrap_or(0)
    }

    /// Distance in miles; `distance(s, s) == 1.0` exactly.
    pub fn distance(&self, s: usize, t: usize) -> f64 {
        self.distance[s * self.zones.len() + t]
    }
}

fn haversine_miles(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (phi1, phi2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let a = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_MILES * a.sqrt().atan2((1.0 - a).sqrt())
}
