//! Wardrop equilibria of finite-horizon MDP congestion games, and minimum
//! tolls enforcing affine population constraints via inexact projected dual
//! ascent.
//!
//! The crate is organized by problem layer:
//!
//! - [`mdp`]: occupancy-measure primitives — the feasible flow polytope,
//!   policy rollout, Q-value recursion, and the dynamic-programming solver
//!   for linear objectives (the conditional-gradient subproblem).
//! - [`game`]: congestion cost models, the integral potential, and the
//!   conditional-gradient equilibrium solver with gap certificates.
//! - [`tolling`]: affine constraints, the toll-augmented game, the
//!   projected dual-ascent synthesis loop, and convergence diagnostics.
//! - [`oracle`]: independent dense solvers (exact projections, constrained
//!   potential minimization, the exact dual function, exhaustive policy
//!   enumeration) used as ground truth.
//! - [`scenario`]: instance builders — synthetic grid worlds and the
//!   ride-share model with trip-record ingestion.

// indexed loops mirror the tensor arithmetic; negated comparisons also
// reject NaN in validations
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod dims;
pub mod error;
pub mod game;
pub mod linalg;
pub mod mdp;
pub mod oracle;
pub mod parallel;
pub mod scenario;
pub mod tolling;

pub use dims::{Dimensions, TensorDoc};
pub use error::{Error, InfeasibilityCertificate, Result};
pub use game::{
    solve_equilibrium_fw, solve_equilibrium_fw_warm, wardrop_violation, CostModel,
    EquilibriumResult, FwOptions, PotentialValue, StepRule, WardropReport,
};
pub use mdp::{
    best_response, check_feasibility, min_total_cost, q_values, rollout_policy,
    FeasibilityReport, InitialDistribution, Policy, PopulationDistribution, TransitionKernel,
};
pub use oracle::{
    dual_function_oracle, enumerate_policies, solve_constrained_potential,
    solve_unconstrained_potential, DualEval, DualOracle, OracleSolution,
};
pub use tolling::{
    augment_costs, convergence_report, dual_value_and_gradient, lagrangian,
    penalized_potential, penalized_subgradient, project_nonneg, residue_inequality_check,
    synthesize_tolls, ConstraintSet, ConvergenceReport, DegradedEquilibriumOracle,
    DualCertificate, EpsSchedule, InnerSolver, Toll, TollRecord, TollSynthesisConfig,
    TollTrajectory,
};
