//! Toll synthesis for affine population constraints: the toll-augmented
//! game, the projected dual-ascent loop, and its convergence diagnostics.
//!
//! The dual update is
//!
//! ```text
//! tau^{k+1} = [ tau^k + gamma * (A y^k - b) ]_+
//! ```
//!
//! where `y^k` is an eps^k-approximate equilibrium of the game with costs
//! `l(y) + A' tau^k`. Convergence of the averaged toll and response is
//! governed by the step bound `gamma <= alpha / (2 ||A||_2^2)` and the
//! accumulated inner error `E^k = sum eps^s`.

mod constraints;
mod diagnostics;

pub use constraints::{project_nonneg, ConstraintSet, SparseRow, Toll, TripletDoc};
pub use diagnostics::{
    convergence_report, log_log_slope, penalized_potential, penalized_subgradient,
    residue_inequality_check, ConvergenceReport, ConvergenceRow, ResidueCheck,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{
    solve_equilibrium_fw_warm, CostModel, FwOptions, StepRule,
};
use crate::linalg::{axpy, dot, norm2};
use crate::mdp::{
    best_response, rollout_policy, InitialDistribution, Policy, PopulationDistribution,
    TransitionKernel,
};
use crate::oracle::DualOracle;

/// Toll-augmented cost model `l_tau(y) = l(y) + A' tau`. The offset is
/// constant in `y`, so the monotonicity constant is unchanged.
pub fn augment_costs(model: &CostModel, cons: &ConstraintSet, tau: &Toll) -> Result<CostModel> {
    if cons.num_cols() != model.dims().flat_len() {
        return Err(Error::dim("constraint set does not match cost model dimension".to_string()));
    }
    let offset = cons.t_matvec(tau.as_slice())?;
    model.with_cost_offset(&offset)
}

/// Lagrangian `L(y, tau) = F0(y) + tau' (A y - b)`, the potential of the
/// toll-augmented game up to the constant `-tau'b`.
pub fn lagrangian(
    model: &CostModel,
    cons: &ConstraintSet,
    y: &[f64],
    tau: &Toll,
) -> Result<f64> {
    let f0 = model.eval_potential(y)?.0;
    let resid = cons.residual(y)?;
    Ok(f0 + tau.dot(&resid))
}

/// Inexact first-order information about the dual function at `tau`,
/// obtained from an approximate equilibrium of the tolled game.
#[derive(Debug, Clone)]
pub struct DualCertificate {
    /// `d_hat(tau) = L(y, tau)`.
    pub value: f64,
    /// `grad_hat d(tau) = A y - b`.
    pub gradient: Vec<f64>,
    pub y: PopulationDistribution,
    /// Certified equilibrium gap of `y` for the tolled game.
    pub epsilon: f64,
    /// False when the inner solver hit its iteration budget; the
    /// certificate then reflects the best iterate found.
    pub converged: bool,
}

/// Solves the tolled game to gap `inner_eps` with conditional gradient and
/// assembles the dual value and gradient approximations.
pub fn dual_value_and_gradient(
    model: &CostModel,
    cons: &ConstraintSet,
    kernel: &TransitionKernel,
    p0: &InitialDistribution,
    tau: &Toll,
    inner_eps: f64,
    warm: Option<PopulationDistribution>,
) -> Result<DualCertificate> {
    if inner_eps < 0.0 {
        return Err(Error::validation("inner_eps must be nonnegative".to_string()));
    }
    let tolled = augment_costs(model, cons, tau)?;
    let start = match warm {
        Some(y) => y,
        None => rollout_policy(&Policy::uniform(model.dims()), kernel, p0)?,
    };
    let opts = FwOptions { eps_target: inner_eps.max(1e-15), ..Default::default() };
    let res = solve_equilibrium_fw_warm(&tolled, kernel, p0, start, &opts)?;
    let value = lagrangian(model, cons, res.y.as_slice(), tau)?;
    let gradient = cons.residual(res.y.as_slice())?;
    Ok(DualCertificate {
        value,
        gradient,
        epsilon: res.epsilon,
        converged: res.converged,
        y: res.y,
    })
}

/// Inner accuracy schedule `eps^k` for the synthesis loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EpsSchedule {
    /// `eps^k = eps0`.
    Constant(f64),
    /// `eps^k = eps0 / (k + 1)`; keeps `E^k` growing logarithmically.
    Harmonic(f64),
    /// `eps^k = eps0 * ratio^k`.
    Geometric { eps0: f64, ratio: f64 },
}

impl EpsSchedule {
    pub fn eps_at(&self, k: usize) -> f64 {
        match *self {
            EpsSchedule::Constant(e) => e,
            EpsSchedule::Harmonic(e0) => e0 / (k as f64 + 1.0),
            EpsSchedule::Geometric { eps0, ratio } => eps0 * ratio.powi(k as i32),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            EpsSchedule::Constant(e) => e >= 0.0,
            EpsSchedule::Harmonic(e0) => e0 >= 0.0,
            EpsSchedule::Geometric { eps0, ratio } => eps0 >= 0.0 && ratio > 0.0 && ratio <= 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::validation(format!("invalid eps schedule {self:?}")))
        }
    }
}

/// Equilibrium oracle used inside the synthesis loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSolver {
    /// Warm-started conditional gradient run to the scheduled gap.
    FrankWolfe,
    /// Dense reference solve; the recorded eps is its (tiny) certified gap.
    Exact,
    /// Dense reference solve deliberately degraded to an approximate
    /// equilibrium whose true potential gap matches the schedule. Used to
    /// study the inexact-oracle floor.
    ExactWithInjectedError,
}

/// Configuration for [`synthesize_tolls`].
#[derive(Debug, Clone)]
pub struct TollSynthesisConfig {
    /// Dual step size; defaults to the largest admissible value
    /// `alpha / (2 ||A||_2^2)` and is clamped (with a warning) above it.
    pub gamma: Option<f64>,
    /// Number of dual-ascent iterations K.
    pub iters: usize,
    pub eps_schedule: EpsSchedule,
    pub inner: InnerSolver,
    /// Initial toll; defaults to zero.
    pub tau0: Option<Toll>,
    /// Iteration budget for each inner conditional-gradient solve.
    pub fw_max_iters: usize,
    /// Experimental per-iteration step override. Convergence guarantees
    /// cover the constant step only; diagnostics assume it.
    pub experimental_gamma: Option<fn(usize) -> f64>,
}

impl Default for TollSynthesisConfig {
    fn default() -> Self {
        Self {
            gamma: None,
            iters: 500,
            eps_schedule: EpsSchedule::Constant(1e-6),
            inner: InnerSolver::FrankWolfe,
            tau0: None,
            fw_max_iters: 200_000,
            experimental_gamma: None,
        }
    }
}

/// Per-iteration record of the synthesis loop. `tau` is the toll the
/// population responded to at step k; averages run over the records up to
/// and including this one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TollRecord {
    pub k: usize,
    pub tau: Vec<f64>,
    /// Certified inner gap eps^k.
    pub eps: f64,
    /// `|| [A y^k - b]_+ ||_2`.
    pub violation: f64,
    /// `|| [A ybar^{k+1} - b]_+ ||_2` with the running average through y^k.
    pub avg_violation: f64,
    /// `d_hat(tau^k) = L(y^k, tau^k)`.
    pub dual_value: f64,
    /// Average per-driver cost `y . l_tau(y) / M` at this iteration.
    pub avg_cost: f64,
    pub inner_converged: bool,
}

/// Full history of a synthesis run: per-iteration records plus the raw
/// toll and response series needed by the diagnostics.
#[derive(Debug, Clone)]
pub struct TollTrajectory {
    pub gamma: f64,
    pub gamma_clamped: bool,
    pub records: Vec<TollRecord>,
    /// `tau^0 .. tau^K` (length K+1).
    pub taus: Vec<Vec<f64>>,
    /// Flat `y^0 .. y^{K-1}`.
    pub ys: Vec<Vec<f64>>,
    pub mass: f64,
}

impl TollTrajectory {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// Average toll `taubar^k = (1/k) sum_{s=1..k} tau^s`, defined for
    /// `1 <= k <= K`.
    pub fn tau_bar(&self, k: usize) -> Vec<f64> {
        assert!(k >= 1 && k < self.taus.len(), "tau_bar defined for 1 <= k <= K");
        let c = self.taus[0].len();
        let mut acc = vec![0.0; c];
        for tau in &self.taus[1..=k] {
            axpy(1.0, tau, &mut acc);
        }
        for v in &mut acc {
            *v /= k as f64;
        }
        acc
    }

    /// Average response `ybar^k = (1/k) sum_{s=0..k-1} y^s`.
    pub fn y_bar(&self, k: usize) -> Vec<f64> {
        assert!(k >= 1 && k <= self.ys.len(), "y_bar defined for 1 <= k <= K");
        let n = self.ys[0].len();
        let mut acc = vec![0.0; n];
        for y in &self.ys[..k] {
            axpy(1.0, y, &mut acc);
        }
        for v in &mut acc {
            *v /= k as f64;
        }
        acc
    }

    /// Accumulated inner error `E^k = sum_{s=0..k-1} eps^s`.
    pub fn eps_sum(&self, k: usize) -> f64 {
        self.records[..k].iter().map(|r| r.eps).sum()
    }

    pub fn final_tau(&self) -> &[f64] {
        self.taus.last().expect("trajectory holds tau^0..tau^K")
    }
}

/// Produces deliberately inexact equilibria of tolled games: the dense
/// exact minimizer mixed toward a fixed feasible extreme point until the
/// true potential gap reaches a target. The returned eps is the achieved
/// gap, measured against the oracle dual value, so it is a valid
/// sub-optimality certificate.
pub struct DegradedEquilibriumOracle {
    dual: DualOracle,
    mix: Vec<f64>,
    model: CostModel,
    cons: ConstraintSet,
}

impl DegradedEquilibriumOracle {
    pub fn new(
        model: &CostModel,
        cons: &ConstraintSet,
        kernel: &TransitionKernel,
        p0: &InitialDistribution,
    ) -> Result<Self> {
        // fixed feasible mixing target, chosen once among the
        // constant-action rollouts. Prefer the one that violates the
        // constraints hardest (an inexact population crowds the capped
        // cells); fall back to the largest potential gap when none
        // violates.
        let mut dual = DualOracle::new(model, cons, kernel, p0)?;
        let d0 = dual.eval(&Toll::zeros(cons.num_rows()))?.value;
        let dims = model.dims();
        let slots = (dims.horizon + 1) * dims.states;
        let mut best: Option<((f64, f64), Vec<f64>)> = None;
        for a in 0..dims.actions {
            let rollout =
                rollout_policy(&Policy::deterministic(dims, &vec![a; slots])?, kernel, p0)?;
            let violation = cons.violation_norm(rollout.as_slice())?;
            let gap = model.eval_potential(rollout.as_slice())?.0 - d0;
            let score = (violation, gap);
            let better = match &best {
                None => true,
                Some((s, _)) => score > *s,
            };
            if better {
                best = Some((score, rollout.into_vec()));
            }
        }
        let mix = best.expect("at least one action").1;
        Ok(Self { dual, mix, model: model.clone(), cons: cons.clone() })
    }

    /// Returns `(y, eps)` with `y` feasible and `L(y, tau) - d(tau) = eps`,
    /// where `eps` approaches `eps_target` from below (capped by the
    /// injectable range of the mixing direction).
    pub fn solve(
        &mut self,
        tau: &Toll,
        eps_target: f64,
    ) -> Result<(PopulationDistribution, f64)> {
        let eval = self.dual.eval(tau)?;
        let exact = eval.minimizer.as_slice();
        let gap_at = |theta: f64| -> Result<f64> {
            let y: Vec<f64> = exact
                .iter()
                .zip(self.mix.iter())
                .map(|(a, b)| (1.0 - theta) * a + theta * b)
                .collect();
            Ok(lagrangian(&self.model, &self.cons, &y, tau)? - eval.value)
        };
        // bisect the convex, increasing gap profile to the target
        let mut theta = 1.0;
        if gap_at(1.0)? > eps_target {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if gap_at(mid)? > eps_target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            theta = lo;
        }
        let y: Vec<f64> = exact
            .iter()
            .zip(self.mix.iter())
            .map(|(a, b)| (1.0 - theta) * a + theta * b)
            .collect();
        let eps = gap_at(theta)?.max(0.0);
        Ok((PopulationDistribution::new(self.model.dims(), y)?, eps))
    }
}

enum InnerState {
    Fw { warm: Option<PopulationDistribution> },
    Exact { dual: DualOracle },
    Injected(DegradedEquilibriumOracle),
}

impl InnerState {
    fn build(
        inner: InnerSolver,
        model: &CostModel,
        cons: &ConstraintSet,
        kernel: &TransitionKernel,
        p0: &InitialDistribution,
    ) -> Result<Self> {
        Ok(match inner {
            InnerSolver::FrankWolfe => InnerState::Fw { warm: None },
            InnerSolver::Exact => InnerState::Exact { dual: DualOracle::new(model, cons, kernel, p0)? },
            InnerSolver::ExactWithInjectedError => {
                InnerState::Injected(DegradedEquilibriumOracle::new(model, cons, kernel, p0)?)
            }
        })
    }

    /// Produces `(y^k, eps^k, converged)` for the tolled game at `tau`.
    #[allow(clippy::too_many_arguments)]
    fn solve(
        &mut self,
        model: &CostModel,
        cons: &ConstraintSet,
        kernel: &TransitionKernel,
        p0: &InitialDistribution,
        tau: &Toll,
        eps_target: f64,
        fw_max_iters: usize,
    ) -> Result<(PopulationDistribution, f64, bool)> {
        match self {
            InnerState::Fw { warm } => {
                let tolled = augment_costs(model, cons, tau)?;
                let start = match warm.take() {
                    Some(y) => y,
                    None => rollout_policy(&Policy::uniform(model.dims()), kernel, p0)?,
                };
                let opts = FwOptions {
                    eps_target: eps_target.max(1e-15),
                    max_iters: fw_max_iters,
                    step_rule: StepRule::LineSearch,
                };
                let res = solve_equilibrium_fw_warm(&tolled, kernel, p0, start, &opts)?;
                *warm = Some(res.y.clone());
                Ok((res.y, res.epsilon, res.converged))
            }
            InnerState::Exact { dual } => {
                let eval = dual.eval(tau)?;
                let tolled = augment_costs(model, cons, tau)?;
                let costs = tolled.eval_costs(eval.minimizer.as_slice())?;
                let v = best_response(&costs, kernel, p0)?;
                let gap = (dot(&costs, eval.minimizer.as_slice()) - dot(&costs, v.as_slice())).max(0.0);
                Ok((eval.minimizer, gap, true))
            }
            InnerState::Injected(oracle) => {
                let (y, eps) = oracle.solve(tau, eps_target)?;
                Ok((y, eps, true))
            }
        }
    }
}

/// Runs the projected dual-ascent loop (iterative toll synthesis) for
/// `cfg.iters` steps and records the full trajectory.
pub fn synthesize_tolls(
    model: &CostModel,
    cons: &ConstraintSet,
    kernel: &TransitionKernel,
    p0: &InitialDistribution,
    cfg: &TollSynthesisConfig,
) -> Result<TollTrajectory> {
    let dims = model.dims();
    if kernel.dims() != dims {
        return Err(Error::dim("cost model and kernel dimensions differ".to_string()));
    }
    if cons.num_cols() != dims.flat_len() {
        return Err(Error::dim("constraint set does not match instance dimension".to_string()));
    }
    if cfg.iters == 0 {
        return Err(Error::validation("toll synthesis needs at least one iteration".to_string()));
    }
    cfg.eps_schedule.validate()?;

    let alpha = model.alpha();
    let norm_a = cons.operator_norm();
    let gamma_max = alpha / (2.0 * norm_a * norm_a);
    let (gamma, gamma_clamped) = match cfg.gamma {
        None => (gamma_max, false),
        Some(g) if g <= 0.0 => {
            return Err(Error::validation(format!("step size gamma must be positive, got {g}")));
        }
        Some(g) if g > gamma_max => {
            log::warn!(
                "step size {g} exceeds the admissible bound alpha/(2||A||^2) = {gamma_max}; clamping"
            );
            (gamma_max, true)
        }
        Some(g) => (g, false),
    };

    let c = cons.num_rows();
    let mut tau = match &cfg.tau0 {
        Some(t) => {
            if t.len() != c {
                return Err(Error::dim("tau0 length does not match constraint count".to_string()));
            }
            t.clone()
        }
        None => Toll::zeros(c),
    };

    let mut inner = InnerState::build(cfg.inner, model, cons, kernel, p0)?;
    let mass = p0.mass();
    let n = dims.flat_len();
    let mut y_sum = vec![0.0; n];
    let mut records = Vec::with_capacity(cfg.iters);
    let mut taus = Vec::with_capacity(cfg.iters + 1);
    let mut ys = Vec::with_capacity(cfg.iters);
    taus.push(tau.as_slice().to_vec());

    for k in 0..cfg.iters {
        let eps_target = cfg.eps_schedule.eps_at(k);
        let (y, eps, inner_converged) =
            inner.solve(model, cons, kernel, p0, &tau, eps_target, cfg.fw_max_iters)?;

        let resid = cons.residual(y.as_slice())?;
        let violation = norm2(&resid.iter().map(|&v| v.max(0.0)).collect::<Vec<_>>());
        axpy(1.0, y.as_slice(), &mut y_sum);
        let y_bar: Vec<f64> = y_sum.iter().map(|v| v / (k as f64 + 1.0)).collect();
        let avg_violation = cons.violation_norm(&y_bar)?;
        let dual_value = lagrangian(model, cons, y.as_slice(), &tau)?;
        let tolled = augment_costs(model, cons, &tau)?;
        let tolled_costs = tolled.eval_costs(y.as_slice())?;
        let avg_cost = dot(&tolled_costs, y.as_slice()) / mass;

        records.push(TollRecord {
            k,
            tau: tau.as_slice().to_vec(),
            eps,
            violation,
            avg_violation,
            dual_value,
            avg_cost,
            inner_converged,
        });
        ys.push(y.into_vec());

        let step = cfg
            .experimental_gamma
            .map(|f| f(k).clamp(0.0, gamma_max))
            .unwrap_or(gamma);
        let mut next = tau.as_slice().to_vec();
        axpy(step, &resid, &mut next);
        tau = project_nonneg(&next);
        taus.push(tau.as_slice().to_vec());
    }

    Ok(TollTrajectory { gamma, gamma_clamped, records, taus, ys, mass })
}
