//! Shared builders for the integration and acceptance suites.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mdpcg_core::scenario::{generate_gridworld, CostSpread, GridworldConfig};
use mdpcg_core::{
    solve_unconstrained_potential, ConstraintSet, CostModel, Dimensions, InitialDistribution,
    Policy, PopulationDistribution, TransitionKernel,
};

/// Random column-stochastic kernel.
pub fn random_kernel(dims: Dimensions, seed: u64) -> TransitionKernel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = vec![0.0; dims.kernel_len()];
    for t in 0..dims.horizon {
        for src in 0..dims.states {
            for a in 0..dims.actions {
                let col: Vec<f64> = (0..dims.states).map(|_| rng.gen::<f64>() + 0.05).collect();
                let sum: f64 = col.iter().sum();
                for (dest, v) in col.iter().enumerate() {
                    p[dims.kidx(t, dest, src, a)] = v / sum;
                }
            }
        }
    }
    TransitionKernel::new(dims, p).unwrap()
}

/// Random row-stochastic policy.
pub fn random_policy(dims: Dimensions, seed: u64) -> Policy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pi = vec![0.0; dims.flat_len()];
    for t in 0..=dims.horizon {
        for s in 0..dims.states {
            let row: Vec<f64> = (0..dims.actions).map(|_| rng.gen::<f64>() + 0.01).collect();
            let sum: f64 = row.iter().sum();
            for (a, v) in row.iter().enumerate() {
                pi[dims.idx(t, s, a)] = v / sum;
            }
        }
    }
    Policy::new(dims, pi).unwrap()
}

/// A small constrained instance for the dual-ascent suites: a seeded grid
/// world with unit-scale slopes, plus a pair of capacity rows on the most
/// loaded (t, s) cell of its unconstrained equilibrium. The tighter row
/// binds at the constrained optimum; the looser one is violated early and
/// slack in the limit, which keeps the averaged dual gap on an O(1/k)
/// trajectory.
pub struct ConstrainedInstance {
    pub model: CostModel,
    pub cons: ConstraintSet,
    pub kernel: TransitionKernel,
    pub p0: InitialDistribution,
    pub dims: Dimensions,
    /// Unconstrained equilibrium of the instance.
    pub y_free: PopulationDistribution,
}

pub fn constrained_instance(seed: u64) -> ConstrainedInstance {
    constrained_instance_with(seed, 0.8, 0.82)
}

pub fn constrained_instance_with(seed: u64, tight: f64, loose: f64) -> ConstrainedInstance {
    let shapes = [(1usize, 2usize, 1usize), (1, 3, 2), (2, 2, 2), (1, 2, 2)];
    let (rows, cols, horizon) = shapes[(seed % shapes.len() as u64) as usize];
    let cfg = GridworldConfig {
        rows,
        cols,
        horizon,
        seed,
        mass: 1.0,
        cost_spread: CostSpread {
            min_slope: 1.0,
            max_slope: 2.0,
            offset_scale: 1.5,
            offset_levels: Some(4),
        },
        capacity: None,
    };
    let inst = generate_gridworld(&cfg).unwrap();
    let (_, y_free) = solve_unconstrained_potential(&inst.model, &inst.kernel, &inst.p0).unwrap();

    // find the most loaded (t, s) cell with t >= 1 (loads at t = 0 are
    // pinned by the initial distribution and cannot be capped below them)
    let loads = y_free.state_loads();
    let (cell, &peak) = loads
        .iter()
        .enumerate()
        .skip(inst.dims.states)
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let (t, s) = (cell / inst.dims.states, cell % inst.dims.states);
    let row: Vec<(usize, f64)> =
        (0..inst.dims.actions).map(|a| (inst.dims.idx(t, s, a), 1.0)).collect();
    let cons = ConstraintSet::from_rows(
        vec![row.clone(), row],
        vec![tight * peak, loose * peak],
        inst.dims.flat_len(),
    )
    .unwrap();

    ConstrainedInstance {
        model: inst.model,
        cons,
        kernel: inst.kernel,
        p0: inst.p0,
        dims: inst.dims,
        y_free,
    }
}
