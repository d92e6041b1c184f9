//! Independent brute-force solvers used as ground truth: dense constrained
//! potential minimization, the exact dual function, and exhaustive policy
//! enumeration for tiny instances.
//!
//! Nothing here shares solver logic with the conditional-gradient path: the
//! flow polytope is handled by dense projected-gradient steps with exact
//! active-set projections, not by dynamic programming. For the affine cost
//! families the projected-gradient step in the slope-weighted metric lands
//! on the exact minimizer, so solutions are certified by their KKT residual
//! rather than by an iteration budget.

mod projection;

pub use projection::{FlowPolytope, Projection, Projector};

use serde::Serialize;

use crate::dims::TensorDoc;
use crate::error::{Error, InfeasibilityCertificate, Result};
use crate::game::CostModel;
use crate::linalg::{dot, norm_inf};
use crate::mdp::{rollout_policy, InitialDistribution, Policy, PopulationDistribution, TransitionKernel};
use crate::tolling::{ConstraintSet, Toll};

/// Largest flattened dimension the dense oracle accepts.
pub const MAX_ORACLE_DIM: usize = 2048;

/// Largest deterministic-policy count [`enumerate_policies`] will sweep.
pub const MAX_ENUMERATED_POLICIES: f64 = 1e6;

/// Exact solution of the constrained potential problem together with the
/// minimum toll recovered from the active constraints.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub y_star: PopulationDistribution,
    pub tau_star: Toll,
    /// Optimal potential value `F0(y*)`.
    pub f_star: f64,
    /// Dual optimum `d(tau*)`; equals `f_star` by strong duality.
    pub d_star: f64,
    pub kkt_residual: f64,
}

impl OracleSolution {
    pub fn to_doc(&self) -> OracleSolutionDoc {
        OracleSolutionDoc {
            y_star: self.y_star.to_doc(),
            tau_star: self.tau_star.as_slice().to_vec(),
            f_star: self.f_star,
            d_star: self.d_star,
            kkt_residual: self.kkt_residual,
        }
    }
}

/// Serialized oracle solution for fixture generation.
#[derive(Debug, Clone, Serialize)]
pub struct OracleSolutionDoc {
    pub y_star: TensorDoc,
    pub tau_star: Vec<f64>,
    pub f_star: f64,
    pub d_star: f64,
    pub kkt_residual: f64,
}

fn affine_parts(model: &CostModel) -> Result<(Vec<f64>, Vec<f64>)> {
    match (model.slopes(), model.intercepts()) {
        (Some(m), Some(q)) => Ok((m.to_vec(), q.to_vec())),
        _ => Err(Error::capability(
            "the dense oracle supports affine cost families only".to_string(),
        )),
    }
}

fn guard_size(n: usize) -> Result<()> {
    if n > MAX_ORACLE_DIM {
        return Err(Error::capability(format!(
            "instance dimension {n} exceeds the dense-oracle limit {MAX_ORACLE_DIM}"
        )));
    }
    Ok(())
}

/// Quadratic minimization `min sum_i m_i/2 y_i^2 + lin_i y_i` over the
/// projector's polyhedron. The projected-gradient step in the `m`-weighted
/// metric maps every iterate to the projection of `-lin/m`, so the loop
/// settles after one step; extra passes confirm the fixed point.
fn minimize_quadratic(
    projector: &mut Projector,
    slopes: &[f64],
    lin: &[f64],
) -> Result<(Projection, f64)> {
    let z: Vec<f64> = lin.iter().zip(slopes).map(|(q, m)| -q / m).collect();
    let scale = z.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let mut proj = projector.project(&z)?;
    let mut residual = f64::INFINITY;
    for _ in 0..6 {
        let prev = proj.y.clone();
        proj = projector.project(&z)?;
        residual = proj
            .y
            .iter()
            .zip(&prev)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if residual <= 1e-13 * scale {
            break;
        }
    }
    Ok((proj, residual))
}

/// Finds a point in the intersection of the flow polytope with the
/// constraint set, or reports infeasibility with a separating certificate.
fn find_feasible_point(
    poly: &FlowPolytope,
    cons: &ConstraintSet,
    kernel: &TransitionKernel,
    p0: &InitialDistribution,
) -> Result<Vec<f64>> {
    let dims = kernel.dims();
    let start = rollout_policy(&Policy::uniform(dims), kernel, p0)?.into_vec();
    let b_scale = cons.bounds().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let feas_tol = 1e-11 * b_scale;

    if norm_inf(&cons.violation(&start)?) <= feas_tol {
        return Ok(start);
    }

    // projected gradient on 0.5 * || [Ay - b]_+ ||^2 over the flow polytope
    let n = start.len();
    let mut projector =
        Projector::new(poly.clone(), vec![1.0; n], Vec::new(), Vec::new(), start.clone())?;
    let step = 1.0 / cons.operator_norm().powi(2);
    let mut y = start;
    let y_scale = p0.mass().max(1.0);
    for _ in 0..20_000 {
        let viol = cons.violation(&y)?;
        if norm_inf(&viol) <= feas_tol {
            return Ok(y);
        }
        let grad = cons.t_matvec(&viol)?;
        let z: Vec<f64> = y.iter().zip(&grad).map(|(yi, g)| yi - step * g).collect();
        let moved_to = projector.project(&z)?.y;
        let moved = moved_to
            .iter()
            .zip(&y)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        y = moved_to;
        if moved <= 1e-14 * y_scale {
            // stationary with residual violation: the intersection is empty
            let row_weights = cons.violation(&y)?;
            let separation = dot(&row_weights, &cons.residual(&y)?);
            return Err(Error::Infeasible(InfeasibilityCertificate { row_weights, separation }));
        }
    }
    Err(Error::validation("feasibility search did not converge".to_string()))
}

/// Minimizes the potential over the bare flow polytope. Returns the optimal
/// value and minimizer (the unconstrained Wardrop equilibrium).
pub fn solve_unconstrained_potential(
    model: &CostModel,
    kernel: &TransitionKernel,
    p0: &InitialDistribution,
) -> Result<(f64, PopulationDistribution)> {
    let dims = model.dims();
    guard_size(dims.flat_len())?;
    let (slopes, intercepts) = affine_parts(model)?;
    let poly = FlowPolytope::new(kernel, p0)?;
    let start = rollout_policy(&Policy::uniform(dims), kernel, p0)?.into_vec();
    let mut projector = Projector::new(poly, slopes.clone(), Vec::new(), Vec::new(), start)?;
    let (proj, _) = minimize_quadratic(&mut projector, &slopes, &intercepts)?;
    let f = model.eval_potential(&proj.y)?.0;
    Ok((f, PopulationDistribution::new(dims, proj.y)?))
}

/// Minimizes `F0` over the flow polytope intersected with `A y <= b` and
/// recovers the Lagrange multipliers of the constraint rows (the minimum
/// constraint-enforcing toll). Fails with a certificate when the
/// intersection is empty, and with a validation error when the final KKT
/// residual exceeds `tol`.
pub fn solve_constrained_potential(
    model: &CostModel,
    cons: &ConstraintSet,
    kernel: &TransitionKernel,
    p0: &InitialDistribution,
    tol: f64,
) -> Result<OracleSolution> {
    let dims = model.dims();
    guard_size(dims.flat_len())?;
    if cons.num_cols() != dims.flat_len() {
        return Err(Error::dim(format!(
            "constraint set has {} columns, instance is {}-dimensional",
            cons.num_cols(),
            dims.flat_len()
        )));
    }
    let (slopes, intercepts) = affine_parts(model)?;

    let poly = FlowPolytope::new(kernel, p0)?;
    let start = find_feasible_point(&poly, cons, kernel, p0)?;
    let mut projector = Projector::new(
        poly,
        slopes.clone(),
        cons.rows().to_vec(),
        cons.bounds().to_vec(),
        start,
    )?;
    let (proj, _) = minimize_quadratic(&mut projector, &slopes, &intercepts)?;

    let kkt_residual = kkt_residual(
        projector.polytope(),
        cons,
        &slopes,
        &intercepts,
        &proj,
        p0.mass(),
    )?;
    if kkt_residual > tol {
        return Err(Error::validation(format!(
            "oracle KKT residual {kkt_residual:e} exceeds requested tolerance {tol:e}"
        )));
    }

    let tau_star = Toll::new(proj.lambda.clone())?;
    let f_star = model.eval_potential(&proj.y)?.0;
    let mut dual = DualOracle::new(model, cons, kernel, p0)?;
    let d_star = dual.eval(&tau_star)?.value;
    Ok(OracleSolution {
        y_star: PopulationDistribution::new(dims, proj.y)?,
        tau_star,
        f_star,
        d_star,
        kkt_residual,
    })
}

/// Max-norm KKT residual of a candidate primal/dual pair for the
/// constrained potential problem.
fn kkt_residual(
    poly: &FlowPolytope,
    cons: &ConstraintSet,
    slopes: &[f64],
    intercepts: &[f64],
    proj: &Projection,
    mass: f64,
) -> Result<f64> {
    let n = proj.y.len();
    let support_tol = 1e-10 * mass.max(1.0);

    // dual stationarity vector: grad F0 + E' nu + A' lambda
    let mut dual_vec: Vec<f64> = (0..n)
        .map(|i| slopes[i] * proj.y[i] + intercepts[i])
        .collect();
    for (r, row) in poly_eq_rows(poly).iter().enumerate() {
        let nu = proj.nu[r];
        if nu == 0.0 {
            continue;
        }
        for &(c, v) in row.iter() {
            dual_vec[c] += v * nu;
        }
    }
    let toll_offset = cons.t_matvec(&proj.lambda)?;
    for (dv, off) in dual_vec.iter_mut().zip(&toll_offset) {
        *dv += off;
    }

    let mut worst = poly.eq_residual(&proj.y);
    for (i, &yi) in proj.y.iter().enumerate() {
        worst = worst.max(-yi);
        if yi > support_tol {
            worst = worst.max(dual_vec[i].abs());
        } else {
            worst = worst.max(-dual_vec[i]);
        }
    }
    let resid = cons.residual(&proj.y)?;
    for (r, &g) in resid.iter().enumerate() {
        worst = worst.max(g);
        worst = worst.max((proj.lambda[r] * g).abs());
        worst = worst.max(-proj.lambda[r]);
    }
    Ok(worst)
}

fn poly_eq_rows(poly: &FlowPolytope) -> &[crate::tolling::SparseRow] {
    poly.eq_rows()
}

/// One dual-function evaluation: the value `d(tau)` and the minimizer of
/// the Lagrangian over the flow polytope.
#[derive(Debug, Clone)]
pub struct DualEval {
    pub value: f64,
    pub minimizer: PopulationDistribution,
}

/// Warm-startable dense evaluator of the dual function
/// `d(tau) = min_{y in Y} F0(y) + tau'(Ay - b)`.
pub struct DualOracle {
    slopes: Vec<f64>,
    intercepts: Vec<f64>,
    cons: ConstraintSet,
    projector: Projector,
    model: CostModel,
}

impl DualOracle {
    pub fn new(
        model: &CostModel,
        cons: &ConstraintSet,
        kernel: &TransitionKernel,
        p0: &InitialDistribution,
    ) -> Result<Self> {
        let dims = model.dims();
        guard_size(dims.flat_len())?;
        if kernel.dims() != dims {
            return Err(Error::dim("cost model and kernel dimensions differ".to_string()));
        }
        if cons.num_cols() != dims.flat_len() {
            return Err(Error::dim("constraint set does not match instance dimension".to_string()));
        }
        let (slopes, intercepts) = affine_parts(model)?;
        let poly = FlowPolytope::new(kernel, p0)?;
        let start = rollout_policy(&Policy::uniform(dims), kernel, p0)?.into_vec();
        let projector = Projector::new(poly, slopes.clone(), Vec::new(), Vec::new(), start)?;
        Ok(Self { slopes, intercepts, cons: cons.clone(), projector, model: model.clone() })
    }

    /// Evaluates `d(tau)` to the oracle's native accuracy (machine-level for
    /// affine families).
    pub fn eval(&mut self, tau: &Toll) -> Result<DualEval> {
        let offset = self.cons.t_matvec(tau.as_slice())?;
        let lin: Vec<f64> = self.intercepts.iter().zip(&offset).map(|(q, o)| q + o).collect();
        let (proj, _) = minimize_quadratic(&mut self.projector, &self.slopes, &lin)?;
        let f0 = self.model.eval_potential(&proj.y)?.0;
        let resid = self.cons.residual(&proj.y)?;
        let value = f0 + tau.dot(&resid);
        Ok(DualEval {
            value,
            minimizer: PopulationDistribution::new(self.model.dims(), proj.y)?,
        })
    }
}

/// One-shot evaluation of the dual function.
pub fn dual_function_oracle(
    model: &CostModel,
    cons: &ConstraintSet,
    kernel: &TransitionKernel,
    p0: &InitialDistribution,
    tau: &Toll,
) -> Result<DualEval> {
    DualOracle::new(model, cons, kernel, p0)?.eval(tau)
}

/// Exhaustively enumerates deterministic policies and returns the minimum
/// of `c . y` over their rollouts, i.e. the exact linear-subproblem optimum.
pub fn enumerate_policies(
    costs: &[f64],
    kernel: &TransitionKernel,
    p0: &InitialDistribution,
) -> Result<(f64, PopulationDistribution)> {
    let dims = kernel.dims();
    dims.check_flat(costs.len(), "cost vector")?;
    let slots = (dims.horizon + 1) * dims.states;
    let count = (dims.actions as f64).powi(slots as i32);
    if !(count <= MAX_ENUMERATED_POLICIES) {
        return Err(Error::capability(format!(
            "enumeration over {count:e} deterministic policies exceeds the limit"
        )));
    }

    let mut choice = vec![0usize; slots];
    let mut best_obj = f64::INFINITY;
    let mut best_y: Option<PopulationDistribution> = None;
    loop {
        let policy = Policy::deterministic(dims, &choice)?;
        let y = rollout_policy(&policy, kernel, p0)?;
        let obj = dot(costs, y.as_slice());
        if obj < best_obj {
            best_obj = obj;
            best_y = Some(y);
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == slots {
                return Ok((best_obj, best_y.expect("at least one policy")));
            }
            choice[pos] += 1;
            if choice[pos] < dims.actions {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::Dimensions;
    use crate::game::{solve_equilibrium_fw, FwOptions};
    use crate::mdp::{best_response, min_total_cost};

    fn dims(t: usize, s: usize, a: usize) -> Dimensions {
        Dimensions::new(t, s, a).unwrap()
    }

    fn capped_split_instance() -> (CostModel, ConstraintSet, TransitionKernel, InitialDistribution) {
        // 1 state, 2 actions, T=0, l = x on both, mass 1, cap y_a0 <= 0.3
        let d = dims(0, 1, 2);
        let model = CostModel::affine(d, vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        let cons =
            ConstraintSet::from_rows(vec![vec![(0, 1.0)]], vec![0.3], d.flat_len()).unwrap();
        let kernel = TransitionKernel::new(d, vec![]).unwrap();
        let p0 = InitialDistribution::new(vec![1.0]).unwrap();
        (model, cons, kernel, p0)
    }

    #[test]
    fn inactive_constraints_recover_zero_toll() {
        let (model, _, kernel, p0) = capped_split_instance();
        let d = model.dims();
        // generous cap: unconstrained optimum (0.5, 0.5) already satisfies it
        let cons =
            ConstraintSet::from_rows(vec![vec![(0, 1.0)]], vec![0.9], d.flat_len()).unwrap();
        let sol = solve_constrained_potential(&model, &cons, &kernel, &p0, 1e-8).unwrap();
        assert!(sol.tau_star.as_slice()[0].abs() < 1e-10);
        assert!((sol.y_star.at(0, 0, 0) - 0.5).abs() < 1e-9);
        let (f_unc, _) = solve_unconstrained_potential(&model, &kernel, &p0).unwrap();
        assert!((sol.f_star - f_unc).abs() < 1e-10);
    }

    #[test]
    fn binding_cap_recovers_analytic_toll() {
        let (model, cons, kernel, p0) = capped_split_instance();
        let sol = solve_constrained_potential(&model, &cons, &kernel, &p0, 1e-8).unwrap();
        // analytic KKT: y* = (0.3, 0.7), tau* = l1(0.7) - l0(0.3) = 0.4
        assert!((sol.y_star.at(0, 0, 0) - 0.3).abs() < 1e-9);
        assert!((sol.y_star.at(0, 0, 1) - 0.7).abs() < 1e-9);
        assert!((sol.tau_star.as_slice()[0] - 0.4).abs() < 1e-9);
        assert!(sol.kkt_residual <= 1e-8);
        // strong duality
        assert!((sol.f_star - sol.d_star).abs() < 1e-8);

        // cross-check against a dense grid at resolution 1e-4
        let mut best = (f64::INFINITY, 0.0);
        let mut x = 0.0;
        while x <= 0.3 + 1e-12 {
            let f = 0.5 * x * x + 0.5 * (1.0 - x) * (1.0 - x);
            if f < best.0 {
                best = (f, x);
            }
            x += 1e-4;
        }
        assert!((best.1 - sol.y_star.at(0, 0, 0)).abs() < 1e-3);
        assert!((best.0 - sol.f_star).abs() < 1e-7);
    }

    #[test]
    fn constrained_optimum_dominates_random_feasible_points() {
        use rand::{Rng, SeedableRng};
        let (model, cons, kernel, p0) = capped_split_instance();
        let sol = solve_constrained_potential(&model, &cons, &kernel, &p0, 1e-8).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let mut tested = 0;
        while tested < 1000 {
            let a = rng.gen::<f64>();
            let y = vec![a, 1.0 - a];
            if cons.violation_norm(&y).unwrap() > 0.0 {
                continue;
            }
            let f = model.eval_potential(&y).unwrap().0;
            assert!(sol.f_star <= f + 1e-10);
            tested += 1;
        }
    }

    #[test]
    fn infeasible_intersection_yields_separating_certificate() {
        let (model, _, kernel, p0) = capped_split_instance();
        let d = model.dims();
        // y_a0 + y_a1 <= 0.5 contradicts total mass 1
        let cons = ConstraintSet::from_rows(
            vec![vec![(0, 1.0), (1, 1.0)]],
            vec![0.5],
            d.flat_len(),
        )
        .unwrap();
        match solve_constrained_potential(&model, &cons, &kernel, &p0, 1e-8) {
            Err(Error::Infeasible(cert)) => {
                assert!(cert.separation > 0.0);
                assert!(cert.row_weights.iter().all(|&v| v >= 0.0));
                // certificate separates: u'(Ay - b) > 0 for feasible y
                let y = [0.5, 0.5];
                let r = cons.residual(&y).unwrap();
                assert!(dot(&cert.row_weights, &r) > 0.0);
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn dual_oracle_properties_at_and_away_from_optimum() {
        let (model, cons, kernel, p0) = capped_split_instance();
        let sol = solve_constrained_potential(&model, &cons, &kernel, &p0, 1e-8).unwrap();
        let mut dual = DualOracle::new(&model, &cons, &kernel, &p0).unwrap();
        // d(tau*) = F*
        let d_at_star = dual.eval(&sol.tau_star).unwrap().value;
        assert!((d_at_star - sol.f_star).abs() < 1e-9);
        // d(0) = unconstrained minimum
        let (f_unc, _) = solve_unconstrained_potential(&model, &kernel, &p0).unwrap();
        let d0 = dual.eval(&Toll::zeros(1)).unwrap().value;
        assert!((d0 - f_unc).abs() < 1e-10);
        // d(tau) <= d(tau*) everywhere
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let tau = Toll::new(vec![rng.gen_range(0.0..2.0)]).unwrap();
            let val = dual.eval(&tau).unwrap().value;
            assert!(val <= sol.d_star + 1e-10);
        }
    }

    #[test]
    fn enumeration_matches_dynamic_programming() {
        use rand::{Rng, SeedableRng};
        let d = dims(1, 2, 2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let mut pdata = vec![0.0; d.kernel_len()];
        for t in 0..d.horizon {
            for src in 0..d.states {
                for a in 0..d.actions {
                    let x = rng.gen::<f64>();
                    pdata[d.kidx(t, 0, src, a)] = x;
                    pdata[d.kidx(t, 1, src, a)] = 1.0 - x;
                }
            }
        }
        let kernel = TransitionKernel::new(d, pdata).unwrap();
        let p0 = InitialDistribution::new(vec![0.4, 0.6]).unwrap();
        let c: Vec<f64> = (0..d.flat_len()).map(|_| rng.gen_range(-1.0..1.0)).collect();

        let (enum_obj, _) = enumerate_policies(&c, &kernel, &p0).unwrap();
        let dp_obj = min_total_cost(&c, &kernel, &p0).unwrap();
        assert!((enum_obj - dp_obj).abs() < 1e-12);
        let v = best_response(&c, &kernel, &p0).unwrap();
        assert!((dot(&c, v.as_slice()) - enum_obj).abs() < 1e-12);

        // zero costs enumerate to zero
        let (zero_obj, _) = enumerate_policies(&vec![0.0; d.flat_len()], &kernel, &p0).unwrap();
        assert_eq!(zero_obj, 0.0);
    }

    #[test]
    fn enumeration_rejects_oversized_instances() {
        let d = dims(9, 4, 5); // 5^40 policies
        let kernel = TransitionKernel::identity(d);
        let p0 = InitialDistribution::uniform(4, 1.0).unwrap();
        let c = vec![0.0; d.flat_len()];
        assert!(matches!(
            enumerate_policies(&c, &kernel, &p0),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn oracle_handles_zero_mass_initial_states() {
        // a state with no initial mass starts with its coordinates pinned
        // at the bound; the active-set projection must release them as
        // inflow arrives
        let d = dims(1, 2, 2);
        let mut pdata = vec![0.0; d.kernel_len()];
        for src in 0..2 {
            for a in 0..2 {
                // action 0 stays, action 1 swaps states
                let dest = if a == 0 { src } else { 1 - src };
                pdata[d.kidx(0, dest, src, a)] = 1.0;
            }
        }
        let kernel = TransitionKernel::new(d, pdata).unwrap();
        let p0 = InitialDistribution::new(vec![1.0, 0.0]).unwrap();
        let model = CostModel::affine(
            d,
            vec![1.0; d.flat_len()],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.0],
        )
        .unwrap();
        let (f_star, y_star) = solve_unconstrained_potential(&model, &kernel, &p0).unwrap();
        // all mass starts in state 0 and splits into the two symmetric flows
        assert!((f_star - 0.5).abs() < 1e-10);
        let report =
            crate::mdp::check_feasibility(&y_star, &kernel, &p0, None).unwrap();
        assert!(report.feasible);
        assert_eq!(y_star.at(0, 1, 0), 0.0);
        assert_eq!(y_star.at(0, 1, 1), 0.0);
        // cross-check against conditional gradient through its certificate
        // (the equilibrium face is degenerate here, so the gap tail is slow)
        let res = solve_equilibrium_fw(
            &model,
            &kernel,
            &p0,
            &FwOptions { eps_target: 1e-6, ..Default::default() },
        )
        .unwrap();
        let f_fw = model.eval_potential(res.y.as_slice()).unwrap().0;
        assert!(f_fw - f_star <= res.epsilon + 1e-12);
        assert!(f_fw >= f_star - 1e-10);
    }

    #[test]
    fn oracle_agrees_with_conditional_gradient_on_random_instances() {
        use rand::{Rng, SeedableRng};
        for seed in 0..5u64 {
            let d = dims(2, 3, 2);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(100 + seed);
            let mut pdata = vec![0.0; d.kernel_len()];
            for t in 0..d.horizon {
                for src in 0..d.states {
                    for a in 0..d.actions {
                        let col: Vec<f64> =
                            (0..d.states).map(|_| rng.gen::<f64>() + 0.1).collect();
                        let s: f64 = col.iter().sum();
                        for (dest, v) in col.iter().enumerate() {
                            pdata[d.kidx(t, dest, src, a)] = v / s;
                        }
                    }
                }
            }
            let kernel = TransitionKernel::new(d, pdata).unwrap();
            let p0 = InitialDistribution::uniform(3, 1.0).unwrap();
            let slopes: Vec<f64> = (0..d.flat_len()).map(|_| rng.gen_range(0.5..1.5)).collect();
            let intercepts: Vec<f64> =
                (0..d.flat_len()).map(|_| rng.gen_range(0.0..1.0)).collect();
            let model = CostModel::affine(d, slopes, intercepts).unwrap();

            let eps = 1e-9;
            let res = solve_equilibrium_fw(
                &model,
                &kernel,
                &p0,
                &FwOptions { eps_target: eps, ..Default::default() },
            )
            .unwrap();
            let (f_star, _) = solve_unconstrained_potential(&model, &kernel, &p0).unwrap();
            let f_fw = model.eval_potential(res.y.as_slice()).unwrap().0;
            assert!(
                f_fw - f_star <= res.epsilon + 1e-12,
                "seed {seed}: potential excess {:e} vs certificate {:e}",
                f_fw - f_star,
                res.epsilon
            );
            assert!(f_fw + 1e-12 >= f_star, "oracle must lower bound fw");
        }
    }
}
