//! Run configuration: scenario selection plus solver and tolling settings.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use mdpcg_core::scenario::{build_scenario, Instance, ScenarioConfig};
use mdpcg_core::{EpsSchedule, Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub tolling: TollingConfig,
    /// Overrides the scenario seed when present.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub eps_target: f64,
    pub max_iters: usize,
    pub line_search: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { eps_target: 1e-6, max_iters: 200_000, line_search: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TollingConfig {
    /// Dual step size; defaults to the largest admissible value.
    pub gamma: Option<f64>,
    pub iters: usize,
    pub eps_schedule: EpsSchedule,
    pub tau0: Option<Vec<f64>>,
}

impl Default for TollingConfig {
    fn default() -> Self {
        Self { gamma: None, iters: 500, eps_schedule: EpsSchedule::Constant(1e-6), tau0: None }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {path:?}: {e}")))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("cannot parse config {path:?}: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.solver.eps_target.is_nan() || self.solver.eps_target <= 0.0 {
            return Err(Error::Config("solver.eps_target must be positive".to_string()));
        }
        if self.solver.max_iters == 0 {
            return Err(Error::Config("solver.max_iters must be positive".to_string()));
        }
        if self.tolling.iters == 0 {
            return Err(Error::Config("tolling.iters must be positive".to_string()));
        }
        if let Some(g) = self.tolling.gamma {
            if g.is_nan() || g <= 0.0 {
                return Err(Error::Config("tolling.gamma must be positive".to_string()));
            }
        }
        self.tolling.eps_schedule.validate()?;
        Ok(())
    }

    /// Applies the scenario seed override and builds the instance. Paths
    /// inside the scenario resolve relative to the config file directory.
    pub fn build_instance(&self, config_path: &Path) -> Result<Instance> {
        let mut scenario = self.scenario.clone();
        if let (Some(seed), ScenarioConfig::Gridworld(g)) = (self.seed, &mut scenario) {
            g.grid.seed = seed;
        }
        let base: PathBuf = config_path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        build_scenario(&scenario, &base)
    }
}

/// Parses the `--eps-schedule` flag: `const:F`, `harmonic:F`, or
/// `geom:F,R`.
pub fn parse_eps_schedule(text: &str) -> Result<EpsSchedule> {
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("bad eps schedule {text:?}; expected kind:value")))?;
    let schedule = match kind {
        "const" => EpsSchedule::Constant(parse_f64(rest)?),
        "harmonic" => EpsSchedule::Harmonic(parse_f64(rest)?),
        "geom" => {
            let (a, b) = rest.split_once(',').ok_or_else(|| {
                Error::Config(format!("geometric schedule needs geom:EPS0,RATIO, got {text:?}"))
            })?;
            EpsSchedule::Geometric { eps0: parse_f64(a)?, ratio: parse_f64(b)? }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown eps schedule kind {other:?}; expected const, harmonic, or geom"
            )));
        }
    };
    schedule.validate()?;
    Ok(schedule)
}

fn parse_f64(text: &str) -> Result<f64> {
    text.trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse number {text:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_parse_from_flag_syntax() {
        assert_eq!(parse_eps_schedule("const:1e-6").unwrap(), EpsSchedule::Constant(1e-6));
        assert_eq!(parse_eps_schedule("harmonic:0.5").unwrap(), EpsSchedule::Harmonic(0.5));
        assert_eq!(
            parse_eps_schedule("geom:1.0,0.9").unwrap(),
            EpsSchedule::Geometric { eps0: 1.0, ratio: 0.9 }
        );
        assert!(parse_eps_schedule("linear:1").is_err());
        assert!(parse_eps_schedule("const").is_err());
        assert!(parse_eps_schedule("geom:1.0,1.5").is_err());
    }

    #[test]
    fn config_defaults_deserialize() {
        let text = r#"{"scenario": {"type": "gridworld", "rows": 2, "cols": 2}}"#;
        let cfg: RunConfig = serde_json::from_str(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.solver.eps_target, 1e-6);
        assert_eq!(cfg.tolling.iters, 500);
    }
}
