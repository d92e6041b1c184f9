//! Instance builders: synthetic grid worlds and the ride-share model
//! (zone geometry, trip-record ingestion, demand-driven pickup kernels,
//! fare/fuel/wait costs, capacity constraints).

mod geometry;
mod gridworld;
mod rideshare;
mod synthetic;
mod trips;

pub use geometry::{Zone, ZoneGeometry};
pub use gridworld::{generate_gridworld, CostSpread, GridworldConfig, GRID_ACTIONS};
pub use rideshare::{
    assemble_kernel, build_capacity_constraints, build_costs, build_move_kernel,
    build_pickup_kernel, build_rideshare_instance, MoveKernel, PickupKernel, RideShareParams,
};
pub use synthetic::{generate_synthetic_rideshare, SyntheticRideshareConfig};
pub use trips::TripRecords;

use serde::{Deserialize, Serialize};

use crate::dims::Dimensions;
use crate::error::{Error, Result};
use crate::game::CostModel;
use crate::mdp::{InitialDistribution, TransitionKernel};
use crate::tolling::ConstraintSet;

/// A fully built game instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub dims: Dimensions,
    pub kernel: TransitionKernel,
    pub p0: InitialDistribution,
    pub model: CostModel,
    pub constraints: Option<ConstraintSet>,
}

/// Scenario selection for config files. Paths are resolved relative to the
/// config file location by the loader.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScenarioConfig {
    Gridworld(GridworldScenario),
    Rideshare(RideshareFiles),
    Explicit(ExplicitScenario),
}

/// Grid-world scenario, optionally replacing the generated capacity rows
/// with a constraint set from a sparse-triplet file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridworldScenario {
    #[serde(flatten)]
    pub grid: GridworldConfig,
    #[serde(default)]
    pub constraints_file: Option<String>,
}

/// Fully explicit scenario: a kernel tensor document on disk, the initial
/// distribution, an affine cost specification, and optional constraints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExplicitScenario {
    /// Path to a kernel tensor JSON of shape T x S x S x A.
    pub kernel: String,
    /// Initial mass per state.
    pub initial: Vec<f64>,
    pub costs: CostModelSpec,
    #[serde(default)]
    pub constraints_file: Option<String>,
}

/// Affine congestion costs, broadcast or per coordinate in flat order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CostModelSpec {
    Broadcast { slope: f64, intercept: f64 },
    PerCoordinate { slopes: Vec<f64>, intercepts: Vec<f64> },
}

impl CostModelSpec {
    pub fn build(&self, dims: Dimensions) -> Result<CostModel> {
        match self {
            CostModelSpec::Broadcast { slope, intercept } => {
                CostModel::broadcast_affine(dims, *slope, *intercept)
            }
            CostModelSpec::PerCoordinate { slopes, intercepts } => {
                CostModel::affine(dims, slopes.clone(), intercepts.clone())
            }
        }
    }
}

/// Ride-share scenario backed by a zone-geometry JSON file and a
/// trip-record CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RideshareFiles {
    pub geometry: String,
    pub trips: String,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_mass")]
    pub mass: f64,
    /// Per-(t, s) zone capacity; omitted means no constraint set.
    #[serde(default)]
    pub capacity: Option<f64>,
    #[serde(default)]
    pub params: RideShareParams,
    /// Sparse-triplet constraint file; overrides `capacity` when present.
    #[serde(default)]
    pub constraints_file: Option<String>,
}

fn default_horizon() -> usize {
    15
}

fn default_mass() -> f64 {
    10_000.0
}

fn load_constraints(
    file: &Option<String>,
    base_dir: &std::path::Path,
    dims: Dimensions,
) -> Result<Option<ConstraintSet>> {
    let Some(name) = file else { return Ok(None) };
    let path = base_dir.join(name);
    if !path.exists() {
        return Err(Error::Config(format!("constraint file {path:?} does not exist")));
    }
    let cons = ConstraintSet::from_triplet_file(&path)?;
    if cons.num_cols() != dims.flat_len() {
        return Err(Error::Config(format!(
            "constraint set has {} columns, instance is {}-dimensional",
            cons.num_cols(),
            dims.flat_len()
        )));
    }
    Ok(Some(cons))
}

/// Builds an instance from a scenario config, resolving file paths against
/// `base_dir`.
pub fn build_scenario(cfg: &ScenarioConfig, base_dir: &std::path::Path) -> Result<Instance> {
    match cfg {
        ScenarioConfig::Gridworld(g) => {
            let mut instance = generate_gridworld(&g.grid)?;
            if let Some(cons) = load_constraints(&g.constraints_file, base_dir, instance.dims)? {
                instance.constraints = Some(cons);
            }
            Ok(instance)
        }
        ScenarioConfig::Rideshare(r) => {
            let geo_path = base_dir.join(&r.geometry);
            let trips_path = base_dir.join(&r.trips);
            if !geo_path.exists() {
                return Err(Error::Config(format!("geometry file {geo_path:?} does not exist")));
            }
            if !trips_path.exists() {
                return Err(Error::Config(format!("trip file {trips_path:?} does not exist")));
            }
            let geometry = ZoneGeometry::from_json_file(&geo_path)?;
            let trips = TripRecords::from_csv_file(&trips_path, &geometry, r.horizon)?;
            let mut instance =
                build_rideshare_instance(&geometry, &trips, &r.params, r.mass, r.capacity)?;
            if let Some(cons) = load_constraints(&r.constraints_file, base_dir, instance.dims)? {
                instance.constraints = Some(cons);
            }
            Ok(instance)
        }
        ScenarioConfig::Explicit(e) => {
            let kernel_path = base_dir.join(&e.kernel);
            if !kernel_path.exists() {
                return Err(Error::Config(format!("kernel file {kernel_path:?} does not exist")));
            }
            let doc: crate::dims::TensorDoc =
                serde_json::from_reader(std::fs::File::open(&kernel_path)?)?;
            let kernel = TransitionKernel::from_doc(doc)?;
            let dims = kernel.dims();
            if e.initial.len() != dims.states {
                return Err(Error::Config(format!(
                    "initial distribution has {} states, kernel has {}",
                    e.initial.len(),
                    dims.states
                )));
            }
            let p0 = InitialDistribution::new(e.initial.clone())?;
            let model = e.costs.build(dims)?;
            let constraints = load_constraints(&e.constraints_file, base_dir, dims)?;
            Ok(Instance { dims, kernel, p0, model, constraints })
        }
    }
}
