//! Occupancy-measure MDP primitives: the feasible flow polytope, policy
//! rollout, Q-value backward recursion, and the dynamic-programming solver
//! for linear objectives over the polytope.
//!
//! A population distribution `y` lives on (t, s, a) triplets. Feasibility
//! means the flow-conservation equations hold:
//!
//! ```text
//! sum_a y[0][s][a]   = p[s]
//! sum_a y[t+1][s][a] = sum_{s',a} P[t][s][s'][a] * y[t][s'][a]
//! ```
//!
//! Kernels are indexed `P[t][destination][source][action]`.

use serde::{Deserialize, Serialize};

use crate::dims::{Dimensions, TensorDoc};
use crate::error::{Error, Result};
use crate::linalg::dot;

/// Tolerance for validating that kernel columns and policy rows are
/// stochastic. Inputs are validated at construction and never silently
/// renormalized.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Time-varying transition kernel of shape T x S x S x A.
///
/// Entry (t, dest, src, a) is the probability of landing in `dest` when
/// taking `a` from `src` at time t. Every (t, src, a) column sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionKernel {
    dims: Dimensions,
    p: Vec<f64>,
}

impl TransitionKernel {
    pub fn new(dims: Dimensions, p: Vec<f64>) -> Result<Self> {
        if p.len() != dims.kernel_len() {
            return Err(Error::dim(format!(
                "kernel has length {}, expected {}",
                p.len(),
                dims.kernel_len()
            )));
        }
        for (i, &v) in p.iter().enumerate() {
            if !(0.0..=1.0 + STOCHASTIC_TOL).contains(&v) {
                return Err(Error::validation(format!(
                    "kernel entry {i} = {v} outside [0, 1]"
                )));
            }
        }
        for t in 0..dims.horizon {
            for src in 0..dims.states {
                for a in 0..dims.actions {
                    let col_sum: f64 =
                        (0..dims.states).map(|dest| p[dims.kidx(t, dest, src, a)]).sum();
                    if (col_sum - 1.0).abs() > STOCHASTIC_TOL {
                        return Err(Error::validation(format!(
                            "kernel column (t={t}, s'={src}, a={a}) sums to {col_sum}, not 1"
                        )));
                    }
                }
            }
        }
        Ok(Self { dims, p })
    }

    /// Identity kernel: every action keeps the population in place.
    pub fn identity(dims: Dimensions) -> Self {
        let mut p = vec![0.0; dims.kernel_len()];
        for t in 0..dims.horizon {
            for s in 0..dims.states {
                for a in 0..dims.actions {
                    p[dims.kidx(t, s, s, a)] = 1.0;
                }
            }
        }
        Self { dims, p }
    }

    pub fn dims(&self) -> Dimensions {
        self.dims
    }

    #[inline]
    pub fn prob(&self, t: usize, dest: usize, src: usize, a: usize) -> f64 {
        self.p[self.dims.kidx(t, dest, src, a)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn to_doc(&self) -> TensorDoc {
        TensorDoc { dims: self.dims, data: self.p.clone() }
    }

    pub fn from_doc(doc: TensorDoc) -> Result<Self> {
        Self::new(doc.dims, doc.data)
    }
}

/// Initial population distribution over states, with total mass M > 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDistribution {
    p: Vec<f64>,
    mass: f64,
}

impl InitialDistribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::dim("initial distribution is empty".to_string()));
        }
        if p.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::validation("initial distribution has a negative or non-finite entry".to_string()));
        }
        let mass: f64 = p.iter().sum();
        if mass <= 0.0 {
            return Err(Error::validation("total population mass must be positive".to_string()));
        }
        Ok(Self { p, mass })
    }

    /// Mass M split evenly over S states.
    pub fn uniform(states: usize, mass: f64) -> Result<Self> {
        Self::new(vec![mass / states as f64; states])
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn states(&self) -> usize {
        self.p.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }
}

/// Population distribution (occupancy measure) of shape (T+1) x S x A,
/// stored flat in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationDistribution {
    dims: Dimensions,
    y: Vec<f64>,
}

impl PopulationDistribution {
    /// Wraps a flat nonnegative tensor. Membership in the feasible polytope
    /// is a separate check; see [`check_feasibility`].
    pub fn new(dims: Dimensions, y: Vec<f64>) -> Result<Self> {
        dims.check_flat(y.len(), "population distribution")?;
        if y.iter().any(|&v| v < -1e-12 || !v.is_finite()) {
            return Err(Error::validation("population distribution has a negative or non-finite entry".to_string()));
        }
        Ok(Self { dims, y })
    }

    pub fn dims(&self) -> Dimensions {
        self.dims
    }

    #[inline]
    pub fn at(&self, t: usize, s: usize, a: usize) -> f64 {
        self.y[self.dims.idx(t, s, a)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.y
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.y
    }

    /// Total mass at time slice t.
    pub fn mass_at(&self, t: usize) -> f64 {
        let sa = self.dims.states * self.dims.actions;
        self.y[t * sa..(t + 1) * sa].iter().sum()
    }

    /// Aggregate load per (t, s): `sum_a y[t][s][a]`.
    pub fn state_loads(&self) -> Vec<f64> {
        let dims = self.dims;
        let mut loads = vec![0.0; (dims.horizon + 1) * dims.states];
        for t in 0..=dims.horizon {
            for s in 0..dims.states {
                let base = dims.idx(t, s, 0);
                loads[t * dims.states + s] = self.y[base..base + dims.actions].iter().sum();
            }
        }
        loads
    }

    pub fn to_doc(&self) -> TensorDoc {
        TensorDoc { dims: self.dims, data: self.y.clone() }
    }

    pub fn from_doc(doc: TensorDoc) -> Result<Self> {
        Self::new(doc.dims, doc.data)
    }
}

/// Time-varying policy of shape (T+1) x S x A; rows over actions sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    dims: Dimensions,
    pi: Vec<f64>,
}

impl Policy {
    pub fn new(dims: Dimensions, pi: Vec<f64>) -> Result<Self> {
        dims.check_flat(pi.len(), "policy")?;
        for (i, &v) in pi.iter().enumerate() {
            if !(0.0..=1.0 + STOCHASTIC_TOL).contains(&v) {
                return Err(Error::validation(format!("policy entry {i} = {v} outside [0, 1]")));
            }
        }
        for t in 0..=dims.horizon {
            for s in 0..dims.states {
                let base = dims.idx(t, s, 0);
                let row_sum: f64 = pi[base..base + dims.actions].iter().sum();
                if (row_sum - 1.0).abs() > STOCHASTIC_TOL {
                    return Err(Error::validation(format!(
                        "policy row (t={t}, s={s}) sums to {row_sum}, not 1"
                    )));
                }
            }
        }
        Ok(Self { dims, pi })
    }

    pub fn uniform(dims: Dimensions) -> Self {
        let w = 1.0 / dims.actions as f64;
        Self { dims, pi: vec![w; dims.flat_len()] }
    }

    /// Deterministic policy from a per-(t, s) action table.
    pub fn deterministic(dims: Dimensions, choice: &[usize]) -> Result<Self> {
        let slots = (dims.horizon + 1) * dims.states;
        if choice.len() != slots {
            return Err(Error::dim(format!(
                "deterministic policy table has {} entries, expected {slots}",
                choice.len()
            )));
        }
        let mut pi = vec![0.0; dims.flat_len()];
        for t in 0..=dims.horizon {
            for s in 0..dims.states {
                let a = choice[t * dims.states + s];
                if a >= dims.actions {
                    return Err(Error::validation(format!("action index {a} out of range")));
                }
                pi[dims.idx(t, s, a)] = 1.0;
            }
        }
        Ok(Self { dims, pi })
    }

    pub fn dims(&self) -> Dimensions {
        self.dims
    }

    #[inline]
    pub fn at(&self, t: usize, s: usize, a: usize) -> f64 {
        self.pi[self.dims.idx(t, s, a)]
    }
}

/// Outcome of a feasibility check: verdict plus the largest absolute
/// flow-conservation residual.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub max_residual: f64,
    pub tol: f64,
}

/// Default feasibility tolerance `1e-8 * max(1, M)`, scale free in the
/// population mass.
pub fn default_feasibility_tol(mass: f64) -> f64 {
    1e-8 * mass.max(1.0)
}

fn check_shapes(dims: Dimensions, kernel: &TransitionKernel, p0: &InitialDistribution) -> Result<()> {
    if kernel.dims() != dims {
        return Err(Error::dim(format!(
            "kernel dims {:?} do not match instance dims {:?}",
            kernel.dims(),
            dims
        )));
    }
    if p0.states() != dims.states {
        return Err(Error::dim(format!(
            "initial distribution has {} states, instance has {}",
            p0.states(),
            dims.states
        )));
    }
    Ok(())
}

/// Checks membership of `y` in the feasible polytope defined by the kernel
/// and initial distribution. `tol` defaults to [`default_feasibility_tol`].
pub fn check_feasibility(
    y: &PopulationDistribution,
    kernel: &TransitionKernel,
    p0: &InitialDistribution,
    tol: Option<f64>,
) -> Result<FeasibilityReport> {
    let dims = y.dims();
    check_shapes(dims, kernel, p0)?;
    let tol = tol.unwrap_or_else(|| default_feasibility_tol(p0.mass()));

    let mut max_residual = 0.0f64;
    for s in 0..dims.states {
        let out: f64 = (0..dims.actions).map(|a| y.at(0, s, a)).sum();
        max_residual = max_residual.max((out - p0.as_slice()[s]).abs());
    }
    for t in 0..dims.horizon {
        let inflow = propagate_slice(y, kernel, t);
        for s in 0..dims.states {
            let out: f64 = (0..dims.actions).map(|a| y.at(t + 1, s, a)).sum();
            max_residual = max_residual.max((out - inflow[s]).abs());
        }
    }
    Ok(FeasibilityReport { feasible: max_residual <= tol, max_residual, tol })
}

/// Mass arriving in each state at time t+1 given the slice of `y` at t.
fn propagate_slice(y: &PopulationDistribution, kernel: &TransitionKernel, t: usize) -> Vec<f64> {
    let dims = y.dims();
    let mut inflow = vec![0.0; dims.states];
    for src in 0..dims.states {
        for a in 0..dims.actions {
            let mass = y.at(t, src, a);
            if mass == 0.0 {
                continue;
            }
            for dest in 0..dims.states {
                inflow[dest] += kernel.prob(t, dest, src, a) * mass;
            }
        }
    }
    inflow
}

/// Propagates the initial distribution through a policy, producing the
/// induced population distribution `y[t][s][a] = x[t][s] * pi[t][s][a]`.
/// The result is feasible by construction.
pub fn rollout_policy(
    policy: &Policy,
    kernel: &TransitionKernel,
    p0: &InitialDistribution,
) -> Result<PopulationDistribution> {
    let dims = policy.dims();
    check_shapes(dims, kernel, p0)?;

    let mut y = vec![0.0; dims.flat_len()];
    let mut x = p0.as_slice().to_vec();
    for t in 0..=dims.horizon {
        for s in 0..dims.states {
            for a in 0..dims.actions {
                y[dims.idx(t, s, a)] = x[s] * policy.at(t, s, a);
            }
        }
        if t == dims.horizon {
            break;
        }
        let mut next = vec![0.0; dims.states];
        for src in 0..dims.states {
            for a in 0..dims.actions {
                let mass = y[dims.idx(t, src, a)];
                if mass == 0.0 {
                    continue;
                }
                for dest in 0..dims.states {
                    next[dest] += kernel.prob(t, dest, src, a) * mass;
                }
            }
        }
        x = next;
    }
    PopulationDistribution::new(dims, y)
}

/// Backward Q-value recursion for a fixed flat cost vector:
///
/// ```text
/// Q[T][s][a] = c[T][s][a]
/// Q[t][s][a] = c[t][s][a] + sum_{s'} P[t][s'][s][a] * min_{a'} Q[t+1][s'][a']
/// ```
///
/// Returns the flat (T+1) x S x A tensor of Q-values.
pub fn q_values(costs: &[f64], kernel: &TransitionKernel) -> Result<Vec<f64>> {
    let dims = kernel.dims();
    dims.check_flat(costs.len(), "cost vector")?;
    if costs.iter().any(|v| v.is_nan()) {
        return Err(Error::validation("cost vector contains NaN".to_string()));
    }

    let mut q = vec![0.0; dims.flat_len()];
    let t_last = dims.horizon;
    for s in 0..dims.states {
        for a in 0..dims.actions {
            q[dims.idx(t_last, s, a)] = costs[dims.idx(t_last, s, a)];
        }
    }
    for t in (0..dims.horizon).rev() {
        // value of the next slice: min over actions per state
        let mut next_value = vec![f64::INFINITY; dims.states];
        for s in 0..dims.states {
            for a in 0..dims.actions {
                next_value[s] = next_value[s].min(q[dims.idx(t + 1, s, a)]);
            }
        }
        for s in 0..dims.states {
            for a in 0..dims.actions {
                let mut expect = 0.0;
                for dest in 0..dims.states {
                    expect += kernel.prob(t, dest, s, a) * next_value[dest];
                }
                q[dims.idx(t, s, a)] = costs[dims.idx(t, s, a)] + expect;
            }
        }
    }
    Ok(q)
}

/// Greedy deterministic policy on a Q-value tensor; ties break toward the
/// lowest action index so the result is reproducible.
pub fn greedy_policy(q: &[f64], dims: Dimensions) -> Result<Policy> {
    dims.check_flat(q.len(), "q tensor")?;
    let mut choice = vec![0usize; (dims.horizon + 1) * dims.states];
    for t in 0..=dims.horizon {
        for s in 0..dims.states {
            let mut best_a = 0;
            let mut best_q = q[dims.idx(t, s, 0)];
            for a in 1..dims.actions {
                let v = q[dims.idx(t, s, a)];
                if v < best_q {
                    best_q = v;
                    best_a = a;
                }
            }
            choice[t * dims.states + s] = best_a;
        }
    }
    Policy::deterministic(dims, &choice)
}

/// Solves `min c'v` over the feasible polytope by dynamic programming.
/// The minimizer is the extreme point induced by the greedy policy on the
/// Q-values of `c`; ties break toward the lowest action index.
pub fn best_response(
    costs: &[f64],
    kernel: &TransitionKernel,
    p0: &InitialDistribution,
) -> Result<PopulationDistribution> {
    let q = q_values(costs, kernel)?;
    let policy = greedy_policy(&q, kernel.dims())?;
    rollout_policy(&policy, kernel, p0)
}

/// The dynamic-programming optimal value `sum_s p[s] * min_a Q[0][s][a]`,
/// equal to `c . best_response(c)`.
pub fn min_total_cost(
    costs: &[f64],
    kernel: &TransitionKernel,
    p0: &InitialDistribution,
) -> Result<f64> {
    let dims = kernel.dims();
    if p0.states() != dims.states {
        return Err(Error::dim("initial distribution does not match kernel".to_string()));
    }
    let q = q_values(costs, kernel)?;
    let mut total = 0.0;
    for s in 0..dims.states {
        let mut best = f64::INFINITY;
        for a in 0..dims.actions {
            best = best.min(q[dims.idx(0, s, a)]);
        }
        total += p0.as_slice()[s] * best;
    }
    Ok(total)
}

/// Convenience: `c . y` over flat tensors.
pub fn total_cost(costs: &[f64], y: &PopulationDistribution) -> f64 {
    dot(costs, y.as_slice())
}
