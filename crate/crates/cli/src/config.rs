//! Scenario files: TOML parsing, exhaustive validation, canonical emission,
//! and lowering into a runnable [`oscsync::Scenario`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use oscsync::{DirectedGraph, InitialState, Scenario, ZoomConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Path to the graph edge-list file (relative paths resolve against the
    /// scenario file's directory).
    pub graph: String,
    pub omega: f64,
    pub tau: f64,
    pub delta: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub horizon: f64,
    #[serde(default)]
    pub dense_substeps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub allow_infeasible: bool,
    pub zoom: ZoomSection,
    #[serde(default)]
    pub initial: InitialSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoomSection {
    /// `"fixed"` or `"adjustable"`.
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default = "default_eps_slack")]
    pub eps_slack: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_norm: Option<f64>,
}

fn default_eps_slack() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// `"seeded"` or `"explicit"`.
    pub mode: String,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default)]
    pub gamma0: f64,
    #[serde(default)]
    pub nu0: f64,
    #[serde(default)]
    pub zero_average: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<f64>>,
}

fn default_scale() -> f64 {
    0.8
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            mode: "seeded".into(),
            scale: default_scale(),
            gamma0: 0.0,
            nu0: 0.0,
            zero_average: false,
            r: None,
            v: None,
        }
    }
}

#[derive(Debug)]
pub enum ConfigError {
    /// The text was not well-formed TOML.
    Syntax(String),
    /// Every invariant violation found, each with its key path.
    Invalid(Vec<String>),
    Io(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Syntax(m) => write!(f, "scenario syntax: {m}"),
            ConfigError::Invalid(v) => {
                writeln!(f, "scenario rejected ({} violation(s)):", v.len())?;
                for msg in v {
                    writeln!(f, "  - {msg}")?;
                }
                Ok(())
            }
            ConfigError::Io(m) => write!(f, "scenario io: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Parse and validate. All violations are reported, not just the first.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let cfg: ScenarioConfig =
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let violations = cfg.violations();
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Invalid(violations))
    }
}

/// Canonical TOML emission; [`parse_scenario`] of the result round-trips.
pub fn emit_scenario(cfg: &ScenarioConfig) -> String {
    toml::to_string_pretty(cfg).expect("scenario serializes")
}

impl ScenarioConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            v.push(format!("omega: must be positive, got {}", self.omega));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            v.push(format!("tau: must be positive, got {}", self.tau));
        } else if self.omega > 0.0 && (self.omega * self.tau).sin().abs() < 1e-12 {
            v.push(format!(
                "tau: {} lies on a sampling window boundary k*pi/omega",
                self.tau
            ));
        }
        if !(self.delta > 0.0) {
            v.push(format!("delta: must be positive, got {}", self.delta));
        }
        if !(self.m > self.delta) {
            v.push(format!(
                "M: must exceed delta ({} <= {})",
                self.m, self.delta
            ));
        }
        let adjustable = match self.zoom.mode.as_str() {
            "fixed" => {
                match self.zoom.mu {
                    Some(mu) if mu > 0.0 => {}
                    Some(mu) => v.push(format!("zoom.mu: must be positive, got {mu}")),
                    None => v.push("zoom.mu: required in fixed mode".into()),
                }
                false
            }
            "adjustable" => true,
            other => {
                v.push(format!(
                    "zoom.mode: expected \"fixed\" or \"adjustable\", got \"{other}\""
                ));
                false
            }
        };
        if adjustable && !(self.m > 2.0 * self.delta) {
            v.push(format!(
                "M: adjustable zooming requires M > 2*delta ({} <= {})",
                self.m,
                2.0 * self.delta
            ));
        }
        if !(self.zoom.eps_slack > 0.0) {
            v.push(format!(
                "zoom.eps_slack: must be positive, got {}",
                self.zoom.eps_slack
            ));
        }
        if let Some(e) = self.zoom.eps_norm {
            if !(e > 0.0) {
                v.push(format!("zoom.eps_norm: must be positive, got {e}"));
            }
        }
        if self.tau > 0.0 {
            let steps = self.horizon / self.tau;
            if !(self.horizon > 0.0) || (steps - steps.round()).abs() > 1e-9 * steps.abs().max(1.0)
            {
                v.push(format!(
                    "horizon: must be a positive multiple of tau, got {} / {}",
                    self.horizon, self.tau
                ));
            }
        }
        match self.initial.mode.as_str() {
            "seeded" => {
                if !(self.initial.scale > 0.0) {
                    v.push(format!(
                        "initial.scale: must be positive, got {}",
                        self.initial.scale
                    ));
                }
            }
            "explicit" => match (&self.initial.r, &self.initial.v) {
                (Some(r), Some(vv)) => {
                    if r.len() != vv.len() || r.is_empty() {
                        v.push(format!(
                            "initial.r/initial.v: need equal nonzero lengths, got {} / {}",
                            r.len(),
                            vv.len()
                        ));
                    }
                }
                _ => v.push("initial.r, initial.v: required in explicit mode".into()),
            },
            other => v.push(format!(
                "initial.mode: expected \"seeded\" or \"explicit\", got \"{other}\""
            )),
        }
        if self.graph.trim().is_empty() {
            v.push("graph: path must not be empty".into());
        }
        if self.seed > i64::MAX as u64 {
            v.push(format!(
                "seed: must fit a TOML integer (<= {}), got {}",
                i64::MAX,
                self.seed
            ));
        }
        v
    }

    /// Resolve the graph path against the scenario file location.
    pub fn graph_path(&self, scenario_dir: Option<&Path>) -> PathBuf {
        let p = PathBuf::from(&self.graph);
        if p.is_absolute() {
            p
        } else {
            match scenario_dir {
                Some(d) => d.join(p),
                None => p,
            }
        }
    }

    /// Load the graph and produce a runnable scenario.
    pub fn lower(&self, scenario_dir: Option<&Path>) -> Result<Scenario, ConfigError> {
        let path = self.graph_path(scenario_dir);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        let graph = DirectedGraph::from_edge_list_text(&text)
            .map_err(|e| ConfigError::Invalid(vec![format!("graph: {e}")]))?;
        let zoom = if self.zoom.mode == "fixed" {
            ZoomConfig::Fixed {
                mu: self.zoom.mu.expect("validated"),
            }
        } else {
            ZoomConfig::Adjustable
        };
        let initial = if self.initial.mode == "seeded" {
            InitialState::Seeded {
                scale: self.initial.scale,
                gamma0: self.initial.gamma0,
                nu0: self.initial.nu0,
                zero_average: self.initial.zero_average,
            }
        } else {
            InitialState::Explicit {
                r: self.initial.r.clone().expect("validated"),
                v: self.initial.v.clone().expect("validated"),
            }
        };
        Ok(Scenario {
            graph,
            omega: self.omega,
            tau: self.tau,
            delta: self.delta,
            m_range: self.m,
            zoom,
            eps_slack: self.zoom.eps_slack,
            eps_norm: self.zoom.eps_norm,
            horizon: self.horizon,
            dense_substeps: self.dense_substeps,
            seed: self.seed,
            initial,
            allow_infeasible: self.allow_infeasible,
        })
    }
}
