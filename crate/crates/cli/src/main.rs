//! `mdpcg`: equilibria and toll synthesis for MDP congestion games.
//!
//! Subcommands: `solve` (Wardrop equilibrium of a scenario), `toll`
//! (iterative toll synthesis with convergence diagnostics), `report`
//! (plot-ready CSV bundles from run artifacts), and a hidden `oracle`
//! subcommand that emits dense reference solutions for fixtures.
//!
//! The `MDPCG_THREADS` environment variable caps worker parallelism in the
//! diagnostic evaluations.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use config::{parse_eps_schedule, RunConfig};
use mdpcg_core::scenario::Instance;
use mdpcg_core::{
    convergence_report, solve_constrained_potential, solve_equilibrium_fw, synthesize_tolls,
    ConstraintSet, Dimensions, Error, FwOptions, InnerSolver, OracleSolution, Result, StepRule,
    TensorDoc, Toll, TollRecord, TollSynthesisConfig,
};
use output::{csv_doc, fmt_f64, write_atomic};

#[derive(Parser)]
#[command(name = "mdpcg", version, about = "MDP congestion games: equilibria and toll synthesis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario/run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Computes the Wardrop equilibrium and writes equilibrium.json,
    /// gaps.csv, and zone_loads.csv.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        /// Conditional-gradient gap target.
        #[arg(long)]
        eps_target: Option<f64>,
    },
    /// Runs iterative toll synthesis and writes trajectory.jsonl,
    /// convergence.csv, and summary.json.
    Toll {
        #[command(flatten)]
        common: CommonArgs,
        /// Dual-ascent step size (clamped to the admissible bound).
        #[arg(long)]
        gamma: Option<f64>,
        /// Number of dual-ascent iterations.
        #[arg(long)]
        iters: Option<usize>,
        /// Inner accuracy schedule: const:F, harmonic:F, or geom:F,R.
        #[arg(long)]
        eps_schedule: Option<String>,
        /// Also solve the instance with the dense reference oracle and add
        /// the theorem-bound columns to convergence.csv.
        #[arg(long)]
        oracle: bool,
    },
    /// Emits plot-ready CSV bundles from the artifacts of one or more runs.
    Report {
        /// Directory holding run artifacts (or subdirectories of runs for
        /// an accuracy-sweep summary).
        #[arg(long)]
        run_dir: PathBuf,
    },
    /// Dense reference solution of the constrained problem (fixtures).
    #[command(hide = true)]
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Capability(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Solve { common, eps_target } => cmd_solve(&common, eps_target),
        Command::Toll { common, gamma, iters, eps_schedule, oracle } => {
            cmd_toll(&common, gamma, iters, eps_schedule.as_deref(), oracle)
        }
        Command::Report { run_dir } => cmd_report(&run_dir),
        Command::Oracle { common } => cmd_oracle(&common),
    }
}

fn load(common: &CommonArgs) -> Result<(RunConfig, Instance)> {
    let mut cfg = RunConfig::load(&common.config)?;
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    let instance = cfg.build_instance(&common.config)?;
    Ok((cfg, instance))
}

fn write_config_copy(out: &Path, cfg: &RunConfig) -> Result<()> {
    write_atomic(&out.join("config.json"), serde_json::to_string_pretty(cfg)?.as_bytes())
}

#[derive(Serialize)]
struct EquilibriumDoc {
    dims: Dimensions,
    y: TensorDoc,
    epsilon: f64,
    iterations: usize,
    converged: bool,
    gap_history: Vec<f64>,
}

fn cmd_solve(common: &CommonArgs, eps_target: Option<f64>) -> Result<()> {
    let (mut cfg, instance) = load(common)?;
    if let Some(eps) = eps_target {
        cfg.solver.eps_target = eps;
    }
    cfg.validate()?;

    let opts = FwOptions {
        eps_target: cfg.solver.eps_target,
        max_iters: cfg.solver.max_iters,
        step_rule: if cfg.solver.line_search { StepRule::LineSearch } else { StepRule::Vanilla },
    };
    let res = solve_equilibrium_fw(&instance.model, &instance.kernel, &instance.p0, &opts)?;

    let doc = EquilibriumDoc {
        dims: instance.dims,
        y: res.y.to_doc(),
        epsilon: res.epsilon,
        iterations: res.iterations,
        converged: res.converged,
        gap_history: res.gap_history.clone(),
    };
    write_atomic(
        &common.out.join("equilibrium.json"),
        serde_json::to_string_pretty(&doc)?.as_bytes(),
    )?;

    let gaps = csv_doc(
        &["iter", "gap"],
        res.gap_history
            .iter()
            .enumerate()
            .map(|(i, g)| vec![i.to_string(), fmt_f64(*g)]),
    );
    write_atomic(&common.out.join("gaps.csv"), gaps.as_bytes())?;

    let loads = res.y.state_loads();
    let states = instance.dims.states;
    let loads_csv = csv_doc(
        &["t", "s", "load"],
        loads.iter().enumerate().map(|(i, v)| {
            vec![(i / states).to_string(), (i % states).to_string(), fmt_f64(*v)]
        }),
    );
    write_atomic(&common.out.join("zone_loads.csv"), loads_csv.as_bytes())?;
    write_config_copy(&common.out, &cfg)?;
    println!(
        "equilibrium gap {:.3e} after {} iterations ({})",
        res.epsilon,
        res.iterations,
        if res.converged { "converged" } else { "budget exhausted" }
    );
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct SummaryDoc {
    gamma: f64,
    gamma_clamped: bool,
    iterations: usize,
    mass: f64,
    tau_final: Vec<f64>,
    tau_bar_final: Vec<f64>,
    eps_sum: f64,
    final_violation: f64,
    final_avg_violation: f64,
}

fn cmd_toll(
    common: &CommonArgs,
    gamma: Option<f64>,
    iters: Option<usize>,
    eps_schedule: Option<&str>,
    with_oracle: bool,
) -> Result<()> {
    let (mut cfg, instance) = load(common)?;
    if let Some(g) = gamma {
        cfg.tolling.gamma = Some(g);
    }
    if let Some(k) = iters {
        cfg.tolling.iters = k;
    }
    if let Some(text) = eps_schedule {
        cfg.tolling.eps_schedule = parse_eps_schedule(text)?;
    }
    cfg.validate()?;

    let cons = instance.constraints.clone().ok_or_else(|| {
        Error::Config("toll synthesis needs a scenario with a constraint set".to_string())
    })?;
    let tau0 = match &cfg.tolling.tau0 {
        Some(v) => Some(Toll::new(v.clone())?),
        None => None,
    };
    let synth_cfg = TollSynthesisConfig {
        gamma: cfg.tolling.gamma,
        iters: cfg.tolling.iters,
        eps_schedule: cfg.tolling.eps_schedule,
        inner: InnerSolver::FrankWolfe,
        tau0,
        fw_max_iters: cfg.solver.max_iters,
        experimental_gamma: None,
    };
    let traj =
        synthesize_tolls(&instance.model, &cons, &instance.kernel, &instance.p0, &synth_cfg)?;

    let mut jsonl = String::new();
    for record in &traj.records {
        jsonl.push_str(&serde_json::to_string(record)?);
        jsonl.push('\n');
    }
    write_atomic(&common.out.join("trajectory.jsonl"), jsonl.as_bytes())?;

    let oracle_solution: Option<OracleSolution> = if with_oracle {
        Some(solve_constrained_potential(
            &instance.model,
            &cons,
            &instance.kernel,
            &instance.p0,
            1e-8,
        )?)
    } else {
        None
    };
    let report = convergence_report(
        &traj,
        &cons,
        &instance.model,
        &instance.kernel,
        &instance.p0,
        oracle_solution.as_ref(),
    )?;
    let opt_cell = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let conv_csv = csv_doc(
        &[
            "k",
            "tau_bar_norm",
            "tau_bar_total",
            "avg_violation",
            "eps_sum",
            "dual_gap",
            "dual_gap_bound",
            "violation_bound",
            "avg_response_dist2",
            "avg_response_bound",
        ],
        report.rows.iter().map(|r| {
            vec![
                r.k.to_string(),
                fmt_f64(r.tau_bar_norm),
                fmt_f64(r.tau_bar_total),
                fmt_f64(r.avg_violation),
                fmt_f64(r.eps_sum),
                opt_cell(r.dual_gap),
                opt_cell(r.dual_gap_bound),
                opt_cell(r.violation_bound),
                opt_cell(r.avg_response_dist2),
                opt_cell(r.avg_response_bound),
            ]
        }),
    );
    write_atomic(&common.out.join("convergence.csv"), conv_csv.as_bytes())?;

    if let Some(sol) = &oracle_solution {
        write_atomic(
            &common.out.join("oracle_solution.json"),
            serde_json::to_string_pretty(&sol.to_doc())?.as_bytes(),
        )?;
    }

    let iterations = traj.iterations();
    let summary = SummaryDoc {
        gamma: traj.gamma,
        gamma_clamped: traj.gamma_clamped,
        iterations,
        mass: traj.mass,
        tau_final: traj.final_tau().to_vec(),
        tau_bar_final: traj.tau_bar(iterations),
        eps_sum: traj.eps_sum(iterations),
        final_violation: traj.records.last().map(|r| r.violation).unwrap_or(0.0),
        final_avg_violation: traj.records.last().map(|r| r.avg_violation).unwrap_or(0.0),
    };
    write_atomic(
        &common.out.join("summary.json"),
        serde_json::to_string_pretty(&summary)?.as_bytes(),
    )?;
    write_config_copy(&common.out, &cfg)?;
    println!(
        "toll synthesis: {} iterations, final violation {:.3e}, averaged violation {:.3e}",
        iterations, summary.final_violation, summary.final_avg_violation
    );
    Ok(())
}

fn read_records(run_dir: &Path) -> Result<Vec<TollRecord>> {
    let path = run_dir.join("trajectory.jsonl");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Config(format!("missing run artifact {path:?}: {e}")))?;
    let mut records = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        records.push(
            serde_json::from_str(line)
                .map_err(|e| Error::Config(format!("bad trajectory record: {e}")))?,
        );
    }
    if records.is_empty() {
        return Err(Error::Config(format!("trajectory {path:?} holds no records")));
    }
    Ok(records)
}

fn read_summary(run_dir: &Path) -> Result<SummaryDoc> {
    let path = run_dir.join("summary.json");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Config(format!("missing run artifact {path:?}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad summary: {e}")))
}

fn cmd_report(run_dir: &Path) -> Result<()> {
    if run_dir.join("trajectory.jsonl").exists() {
        report_single(run_dir)?;
    }

    // accuracy-sweep summary over immediate subdirectories holding runs
    let mut sweep_rows = Vec::new();
    if run_dir.is_dir() {
        let mut entries: Vec<PathBuf> = std::fs::read_dir(run_dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_dir() && p.join("trajectory.jsonl").exists())
            .collect();
        entries.sort();
        for sub in entries {
            let records = read_records(&sub)?;
            let summary = read_summary(&sub)?;
            let eps_level =
                records.iter().map(|r| r.eps).sum::<f64>() / records.len() as f64;
            let final_avg_toll: f64 = summary.tau_bar_final.iter().sum();
            sweep_rows.push((
                sub.file_name().and_then(|n| n.to_str()).unwrap_or("run").to_string(),
                eps_level,
                records.last().unwrap().avg_violation,
                final_avg_toll,
            ));
        }
    }
    if !sweep_rows.is_empty() {
        sweep_rows.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let csv = csv_doc(
            &["run", "eps", "final_avg_violation", "final_avg_toll"],
            sweep_rows.iter().map(|(run, eps, v, t)| {
                vec![run.clone(), fmt_f64(*eps), fmt_f64(*v), fmt_f64(*t)]
            }),
        );
        write_atomic(&run_dir.join("eps_sweep.csv"), csv.as_bytes())?;
    } else if !run_dir.join("trajectory.jsonl").exists() {
        return Err(Error::Config(format!(
            "{run_dir:?} holds neither run artifacts nor run subdirectories"
        )));
    }
    Ok(())
}

fn report_single(run_dir: &Path) -> Result<()> {
    let records = read_records(run_dir)?;
    let summary = read_summary(run_dir)?;
    let k_count = records.len();

    // averaged toll per k: mean of tau^1..tau^k; the final update comes
    // from the summary
    let mut avg_toll = vec![0.0f64; k_count];
    let mut acc = 0.0f64;
    for k in 1..k_count {
        acc += records[k].tau.iter().sum::<f64>();
        avg_toll[k] = acc / k as f64;
    }
    let toll_csv = csv_doc(
        &["k", "total_toll", "avg_total_toll"],
        records.iter().enumerate().map(|(k, r)| {
            vec![
                k.to_string(),
                fmt_f64(r.tau.iter().sum::<f64>()),
                fmt_f64(avg_toll[k]),
            ]
        }),
    );
    write_atomic(&run_dir.join("toll_vs_k.csv"), toll_csv.as_bytes())?;

    let viol_csv = csv_doc(
        &["k", "violation", "avg_violation"],
        records.iter().map(|r| {
            vec![r.k.to_string(), fmt_f64(r.violation), fmt_f64(r.avg_violation)]
        }),
    );
    write_atomic(&run_dir.join("violation_vs_k.csv"), viol_csv.as_bytes())?;

    let base_cost = records[0].avg_cost;
    let cost_csv = csv_doc(
        &["k", "avg_cost", "normalized"],
        records.iter().map(|r| {
            vec![r.k.to_string(), fmt_f64(r.avg_cost), fmt_f64(r.avg_cost / base_cost)]
        }),
    );
    write_atomic(&run_dir.join("avg_cost_vs_k.csv"), cost_csv.as_bytes())?;

    // keep the summary honest: recomputable averages must match
    let tau_bar_total_rec: f64 = summary.tau_bar_final.iter().sum();
    if k_count > 1 {
        let from_records = (acc + summary.tau_final.iter().sum::<f64>()) / k_count as f64;
        if (from_records - tau_bar_total_rec).abs() > 1e-12 * (1.0 + tau_bar_total_rec.abs()) {
            return Err(Error::Validation(format!(
                "summary averaged toll {tau_bar_total_rec} disagrees with records ({from_records})"
            )));
        }
    }
    Ok(())
}

fn cmd_oracle(common: &CommonArgs) -> Result<()> {
    let (cfg, instance) = load(common)?;
    let cons: &ConstraintSet = instance.constraints.as_ref().ok_or_else(|| {
        Error::Config("the oracle needs a scenario with a constraint set".to_string())
    })?;
    let sol = solve_constrained_potential(
        &instance.model,
        cons,
        &instance.kernel,
        &instance.p0,
        1e-8,
    )?;
    write_atomic(
        &common.out.join("oracle_solution.json"),
        serde_json::to_string_pretty(&sol.to_doc())?.as_bytes(),
    )?;
    write_config_copy(&common.out, &cfg)?;
    println!(
        "oracle: F* = {:.6}, d* = {:.6}, kkt residual {:.3e}",
        sol.f_star, sol.d_star, sol.kkt_residual
    );
    Ok(())
}
