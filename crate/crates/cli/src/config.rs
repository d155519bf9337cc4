use std::path::{Path, PathBuf};

use altproj::alternating::ToleranceConfig;
use altproj::consensus::{AgentDynamics, ConsensusConfig, SolveMode};
use altproj::Agent;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    FirstOrder,
    SecondOrder,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    #[default]
    Centralized,
    Ring,
}

impl ModeSpec {
    pub fn name(self) -> &'static str {
        match self {
            ModeSpec::Centralized => "centralized",
            ModeSpec::Ring => "ring",
        }
    }
}

impl From<ModeSpec> for SolveMode {
    fn from(m: ModeSpec) -> Self {
        match m {
            ModeSpec::Centralized => SolveMode::Centralized,
            ModeSpec::Ring => SolveMode::Ring,
        }
    }
}

/// A position, written either as a bare number or as a list.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Position {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Position {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            Position::Scalar(x) => vec![*x],
            Position::Vector(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub model: ModelSpec,
    pub x0: Position,
    #[serde(default)]
    pub v0: f64,
    #[serde(default = "one")]
    pub u_max: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    pub err: f64,
    pub outer_tol: f64,
    pub max_inner_cycles: usize,
    pub max_outer_iters: usize,
    pub t_min: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let t = ToleranceConfig::<f64>::default();
        Self {
            err: t.err,
            outer_tol: t.outer_tol,
            max_inner_cycles: t.max_inner_cycles,
            max_outer_iters: t.max_outer_iters,
            t_min: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub solution: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
    /// Trajectory sample spacing in seconds.
    pub dt: f64,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { solution: None, trace: None, trajectory: None, dt: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub agents: Vec<AgentSpec>,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
}

impl ExperimentConfig {
    /// Reads and validates a config file. Relative output paths are taken
    /// relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Invalid(vec![format!("{}: {e}", path.display())]))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.outputs.solution, &mut cfg.outputs.trace, &mut cfg.outputs.trajectory].into_iter().flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            let key = if key == "." { "(root)".to_string() } else { key };
            CliError::Invalid(vec![format!("{key}: {}", e.inner())])
        })?;
        let problems = cfg.problems();
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(CliError::Invalid(problems))
        }
    }

    /// Every semantic problem, each prefixed with the offending key.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.agents.is_empty() {
            out.push("agents: at least one agent is required".to_string());
        }
        let dim = self.agents.first().map(|a| a.x0.to_vec().len());
        for (i, a) in self.agents.iter().enumerate() {
            let x0 = a.x0.to_vec();
            if x0.is_empty() {
                out.push(format!("agents[{i}].x0: must not be empty"));
            }
            if x0.iter().any(|v| !v.is_finite()) {
                out.push(format!("agents[{i}].x0: must be finite"));
            }
            if Some(x0.len()) != dim {
                out.push(format!("agents[{i}].x0: dimension {} differs from agents[0]", x0.len()));
            }
            if !(a.u_max > 0.0) || !a.u_max.is_finite() {
                out.push(format!("agents[{i}].u_max: must be positive"));
            }
            if !a.v0.is_finite() {
                out.push(format!("agents[{i}].v0: must be finite"));
            }
            if a.model != self.agents[0].model {
                out.push(format!("agents[{i}].model: all agents must share one model"));
            }
            match a.model {
                ModelSpec::FirstOrder if a.v0 != 0.0 => {
                    out.push(format!("agents[{i}].v0: first-order agents have no velocity state"))
                }
                ModelSpec::SecondOrder if x0.len() != 1 => {
                    out.push(format!("agents[{i}].x0: second-order agents are one-dimensional"))
                }
                _ => {}
            }
        }
        let s = &self.solver;
        for (key, v) in [("solver.err", s.err), ("solver.outer_tol", s.outer_tol)] {
            if !(v > 0.0) || !v.is_finite() {
                out.push(format!("{key}: must be positive"));
            }
        }
        for (key, v) in [("solver.max_inner_cycles", s.max_inner_cycles), ("solver.max_outer_iters", s.max_outer_iters)]
        {
            if v == 0 {
                out.push(format!("{key}: must be at least 1"));
            }
        }
        if !(s.t_min <= 0.0) || !s.t_min.is_finite() {
            out.push("solver.t_min: must be a finite value <= 0".to_string());
        }
        if !(self.outputs.dt > 0.0) || !self.outputs.dt.is_finite() {
            out.push("outputs.dt: must be positive".to_string());
        }
        out
    }

    pub fn agents(&self) -> Vec<Agent> {
        self.agents
            .iter()
            .map(|a| AgentDynamics {
                model: match a.model {
                    ModelSpec::FirstOrder => altproj::consensus::Model::FirstOrder,
                    ModelSpec::SecondOrder => altproj::consensus::Model::SecondOrder,
                },
                x0: a.x0.to_vec(),
                v0: a.v0,
                u_max: a.u_max,
            })
            .collect()
    }

    pub fn consensus_config(&self) -> ConsensusConfig<f64> {
        let s = &self.solver;
        ConsensusConfig {
            tolerances: ToleranceConfig {
                err: s.err,
                outer_tol: s.outer_tol,
                max_inner_cycles: s.max_inner_cycles,
                max_outer_iters: s.max_outer_iters,
            },
            t_min: s.t_min,
            max_ring_cycles: s.max_inner_cycles.saturating_mul(s.max_outer_iters),
            ..ConsensusConfig::default()
        }
    }
}
