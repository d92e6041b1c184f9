//! Shared instance builders for the solver benchmarks.

use mdpcg_core::scenario::{generate_gridworld, CostSpread, GridworldConfig, Instance};

/// Deterministic mid-size grid world with congestion-dominated costs.
pub fn bench_instance(rows: usize, cols: usize, horizon: usize) -> Instance {
    generate_gridworld(&GridworldConfig {
        rows,
        cols,
        horizon,
        seed: 17,
        mass: 0.01,
        cost_spread: CostSpread {
            min_slope: 0.1,
            max_slope: 0.3,
            offset_scale: 0.0,
            offset_levels: None,
        },
        capacity: None,
    })
    .unwrap()
}
