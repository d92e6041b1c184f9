//! Convergence diagnostics for toll-synthesis runs: the averaged-iterate
//! bound series, the penalized-potential subgradient, and the per-step
//! residue inequality that underpins the convergence proofs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::CostModel;
use crate::linalg::{dot, norm2};
use crate::mdp::{InitialDistribution, TransitionKernel};
use crate::oracle::{DualOracle, OracleSolution};
use crate::parallel;
use crate::tolling::{ConstraintSet, Toll, TollTrajectory};

/// One row of the per-k convergence report (k is 1-based). Bound columns
/// are present only when an exact oracle solution was supplied.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub k: usize,
    /// `|| taubar^k ||_2`.
    pub tau_bar_norm: f64,
    /// Total averaged toll `sum_i taubar^k_i`.
    pub tau_bar_total: f64,
    /// `|| [A ybar^k - b]_+ ||_2`.
    pub avg_violation: f64,
    /// Accumulated inner error `E^k`.
    pub eps_sum: f64,
    /// Observed dual gap `d(tau*) - d(taubar^k)`.
    pub dual_gap: Option<f64>,
    /// Averaged-toll bound `(1/k)(||tau^0 - tau*||^2/(2 gamma) + 2 E^k)`.
    pub dual_gap_bound: Option<f64>,
    /// Constraint-violation bound
    /// `(1/(gamma k))(||tau*|| + ||tau^0 - tau*|| + 2 sqrt(gamma E^k))`.
    pub violation_bound: Option<f64>,
    /// `|| ybar^k - y* ||_2^2`.
    pub avg_response_dist2: Option<f64>,
    /// Averaged-response bound `(alpha/(2 gamma k)) * D(tau^0, tau*, E^k)`.
    pub avg_response_bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub gamma: f64,
    pub rows: Vec<ConvergenceRow>,
}

/// Builds the per-k diagnostic series for a recorded trajectory. With an
/// oracle solution the three theorem bounds are evaluated as well; the
/// oracle dual values come from the dense solver, never from the
/// conditional-gradient inner loop.
pub fn convergence_report(
    traj: &TollTrajectory,
    cons: &ConstraintSet,
    model: &CostModel,
    kernel: &TransitionKernel,
    p0: &InitialDistribution,
    oracle: Option<&OracleSolution>,
) -> Result<ConvergenceReport> {
    let big_k = traj.iterations();
    if big_k == 0 {
        return Err(Error::validation("cannot report on an empty trajectory".to_string()));
    }
    let gamma = traj.gamma;
    let tau0 = &traj.taus[0];
    let c = tau0.len();
    let n = traj.ys[0].len();

    // prefix sums for the averaged series
    let mut tau_bars: Vec<Vec<f64>> = Vec::with_capacity(big_k);
    let mut acc_tau = vec![0.0; c];
    for k in 1..=big_k {
        for (a, t) in acc_tau.iter_mut().zip(&traj.taus[k]) {
            *a += t;
        }
        tau_bars.push(acc_tau.iter().map(|v| v / k as f64).collect());
    }
    let mut y_bars: Vec<Vec<f64>> = Vec::with_capacity(big_k);
    let mut acc_y = vec![0.0; n];
    for k in 1..=big_k {
        for (a, y) in acc_y.iter_mut().zip(&traj.ys[k - 1]) {
            *a += y;
        }
        y_bars.push(acc_y.iter().map(|v| v / k as f64).collect());
    }

    // oracle dual values at every averaged toll, chunked over workers
    let dual_at_tau_bar: Option<Vec<f64>> = match oracle {
        Some(_) => {
            let workers = parallel::thread_cap().min(big_k).max(1);
            let chunk = big_k.div_ceil(workers);
            let chunks = parallel::map_indexed(workers, |w| -> Result<Vec<f64>> {
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(big_k);
                let mut out = Vec::with_capacity(hi.saturating_sub(lo));
                if lo < hi {
                    let mut dual = DualOracle::new(model, cons, kernel, p0)?;
                    for item in tau_bars.iter().take(hi).skip(lo) {
                        out.push(dual.eval(&Toll::new(item.clone())?)?.value);
                    }
                }
                Ok(out)
            });
            let mut flat = Vec::with_capacity(big_k);
            for c in chunks {
                flat.extend(c?);
            }
            Some(flat)
        }
        None => None,
    };

    let alpha = model.alpha();
    let mut rows = Vec::with_capacity(big_k);
    for k in 1..=big_k {
        let tau_bar = &tau_bars[k - 1];
        let y_bar = &y_bars[k - 1];
        let e_k = traj.eps_sum(k);
        let avg_violation = cons.violation_norm(y_bar)?;

        let (dual_gap, dual_gap_bound, violation_bound, avg_response_dist2, avg_response_bound) =
            if let (Some(sol), Some(duals)) = (oracle, dual_at_tau_bar.as_ref()) {
                let tau_star = sol.tau_star.as_slice();
                let dist0: f64 = tau0
                    .iter()
                    .zip(tau_star)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>();
                let kf = k as f64;
                let dual_gap = sol.d_star - duals[k - 1];
                let dual_gap_bound = (dist0 / (2.0 * gamma) + 2.0 * e_k) / kf;
                let violation_bound = (sol.tau_star.norm2()
                    + dist0.sqrt()
                    + 2.0 * (gamma * e_k).sqrt())
                    / (gamma * kf);
                let dist2: f64 = y_bar
                    .iter()
                    .zip(sol.y_star.as_slice())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                let tau0_norm2 = dot(tau0, tau0);
                let d_cap = (0.5 * tau0_norm2 + 2.0 * e_k).max(
                    sol.tau_star.norm2().powi(2)
                        + sol.tau_star.norm2() * dist0.sqrt()
                        + 2.0 * (gamma * e_k).sqrt(),
                );
                let avg_response_bound = alpha / (2.0 * gamma * kf) * d_cap;
                (
                    Some(dual_gap),
                    Some(dual_gap_bound),
                    Some(violation_bound),
                    Some(dist2),
                    Some(avg_response_bound),
                )
            } else {
                (None, None, None, None, None)
            };

        rows.push(ConvergenceRow {
            k,
            tau_bar_norm: norm2(tau_bar),
            tau_bar_total: tau_bar.iter().sum(),
            avg_violation,
            eps_sum: e_k,
            dual_gap,
            dual_gap_bound,
            violation_bound,
            avg_response_dist2,
            avg_response_bound,
        });
    }
    Ok(ConvergenceReport { gamma, rows })
}

/// Least-squares slope of `log(v)` against `log(k)` over the positive
/// entries of the series (pairs of iteration index and value). A slope of
/// -1 corresponds to O(1/k) decay.
pub fn log_log_slope(series: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(_, v)| *v > 0.0)
        .map(|&(k, v)| ((k as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in pts {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Subgradient of the penalized potential
/// `G(y) = F0(y) + sum_i tau_i (A_i y - b_i)_+` restricted to the feasible
/// polytope: the game costs plus the rows of the violated constraints
/// weighted by their penalties.
pub fn penalized_subgradient(
    model: &CostModel,
    cons: &ConstraintSet,
    tau: &Toll,
    y: &[f64],
) -> Result<Vec<f64>> {
    if tau.len() != cons.num_rows() {
        return Err(Error::dim("penalty weights do not match constraint count".to_string()));
    }
    let mut g = model.eval_costs(y)?;
    let resid = cons.residual(y)?;
    for (r, (&rv, &tv)) in resid.iter().zip(tau.as_slice()).enumerate() {
        if rv > 0.0 && tv != 0.0 {
            for &(c, v) in &cons.rows()[r] {
                g[c] += tv * v;
            }
        }
    }
    Ok(g)
}

/// The penalized potential `G(y) = F0(y) + sum_i tau_i (A_i y - b_i)_+`.
pub fn penalized_potential(
    model: &CostModel,
    cons: &ConstraintSet,
    tau: &Toll,
    y: &[f64],
) -> Result<f64> {
    let f0 = model.eval_potential(y)?.0;
    let resid = cons.residual(y)?;
    let penalty: f64 = resid
        .iter()
        .zip(tau.as_slice())
        .map(|(&r, &t)| t * r.max(0.0))
        .sum();
    Ok(f0 + penalty)
}

/// Outcome of the residue inequality at one recorded step.
#[derive(Debug, Clone, Serialize)]
pub struct ResidueCheck {
    pub step: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Verifies, for every recorded step s and a probe toll `tau`, that
///
/// ```text
/// ||tau^{s+1} - tau||^2 <= ||tau^s - tau||^2
///   + 2 gamma ( d(tau^{s+1}) - L(y^s, tau^s) + 2 eps^s
///               + grad_hat d(tau^s)' (tau^s - tau) )
/// ```
///
/// with `d` evaluated by the dense oracle. Requires the recorded step size
/// to satisfy `gamma <= alpha / (2 ||A||_2^2)`.
pub fn residue_inequality_check(
    traj: &TollTrajectory,
    cons: &ConstraintSet,
    model: &CostModel,
    kernel: &TransitionKernel,
    p0: &InitialDistribution,
    probe: &Toll,
) -> Result<Vec<ResidueCheck>> {
    if probe.len() != cons.num_rows() {
        return Err(Error::dim("probe toll does not match constraint count".to_string()));
    }
    let alpha_bar = cons.operator_norm().powi(2) / model.alpha();
    if traj.gamma > 1.0 / (2.0 * alpha_bar) + 1e-12 {
        return Err(Error::validation(format!(
            "recorded step {} violates gamma <= 1/(2 alpha_bar) = {}",
            traj.gamma,
            1.0 / (2.0 * alpha_bar)
        )));
    }

    let mut dual = DualOracle::new(model, cons, kernel, p0)?;
    let gamma = traj.gamma;
    let mut checks = Vec::with_capacity(traj.iterations());
    for s in 0..traj.iterations() {
        let tau_s = &traj.taus[s];
        let tau_next = &traj.taus[s + 1];
        let d_next = dual.eval(&Toll::new(tau_next.clone())?)?.value;
        let l_s = traj.records[s].dual_value;
        let eps_s = traj.records[s].eps;
        let grad = cons.residual(&traj.ys[s])?;
        let diff: Vec<f64> =
            tau_s.iter().zip(probe.as_slice()).map(|(a, b)| a - b).collect();
        let lhs: f64 = tau_next
            .iter()
            .zip(probe.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let rhs = dot(&diff, &diff)
            + 2.0 * gamma * (d_next - l_s + 2.0 * eps_s + dot(&grad, &diff));
        let pass = lhs <= rhs + 1e-9 * (1.0 + rhs.abs());
        checks.push(ResidueCheck { step: s, lhs, rhs, pass });
    }
    Ok(checks)
}
