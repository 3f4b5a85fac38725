//! Experiment configuration files (TOML).
//!
//! Units: `c_y`, `delta` are surplus per unit time, `sigma` is surplus per
//! square-root time, `kappa` is jumps per unit time, `q` is per unit time,
//! `omega` is per unit surplus. Payoffs are in original currency units
//! unless the key says `rho_bar` (dimensionless `q rho / delta`).

use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use twolayer_core::{LevyModel, PhaseType, Problem};

use crate::AppError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Value,
    Simulate,
    Sweep,
    Converge,
    Check,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Value => "value",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Converge => "converge",
            Command::Check => "check",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "solve" => Ok(Command::Solve),
            "value" => Ok(Command::Value),
            "simulate" => Ok(Command::Simulate),
            "sweep" => Ok(Command::Sweep),
            "converge" => Ok(Command::Converge),
            "check" => Ok(Command::Check),
            other => Err(format!("unknown command `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Optional; must match the command given on the command line.
    pub command: Option<Command>,
    pub model: ModelBlock,
    pub problem: ProblemBlock,
    #[serde(default)]
    pub grid: GridBlock,
    pub sweep: Option<SweepBlock>,
    pub value: Option<StrategyBlock>,
    #[serde(default)]
    pub simulate: SimulateBlock,
    #[serde(default)]
    pub converge: ConvergeBlock,
    #[serde(default)]
    pub check: CheckBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub c_y: f64,
    #[serde(default)]
    pub sigma: f64,
    pub kappa: f64,
    /// Exponential jumps with this rate; excludes `alpha`/`generator`.
    pub omega: Option<f64>,
    pub alpha: Option<Vec<f64>>,
    /// Sub-generator, one row per line.
    pub generator: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBlock {
    pub q: f64,
    pub delta: f64,
    #[serde(default = "one")]
    pub beta_a: f64,
    pub beta_s: f64,
    pub rho_tilde: Option<f64>,
    pub rho_bar: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    /// Upper end of the x-grid; defaults to twice the optimal `b*` (at least 1).
    pub x_max: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self { x_max: None, points: default_points() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    RhoBar,
    Beta,
    Delta,
    /// Exponential jump rate with `kappa / omega` held fixed.
    OmegaVolatility,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::RhoBar => "rho_bar",
            SweepParameter::Beta => "beta",
            SweepParameter::Delta => "delta",
            SweepParameter::OmegaVolatility => "omega",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    /// Points at which each row reports the optimal value.
    #[serde(default)]
    pub x_ref: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyBlock {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    /// Strategy to simulate; the optimal one when absent.
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// Starting points; defaults to `b / 2` of the simulated strategy.
    #[serde(default)]
    pub x0: Vec<f64>,
    #[serde(default = "default_paths")]
    pub n_paths: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub horizon: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "yes")]
    pub trace: bool,
}

impl Default for SimulateBlock {
    fn default() -> Self {
        Self {
            a: None,
            b: None,
            x0: Vec::new(),
            n_paths: default_paths(),
            dt: default_dt(),
            horizon: None,
            seed: 0,
            trace: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeBlock {
    #[serde(default = "default_beta_high")]
    pub beta_high: Vec<f64>,
    #[serde(default = "default_beta_low")]
    pub beta_low: Vec<f64>,
    #[serde(default = "default_delta_grid")]
    pub delta: Vec<f64>,
}

impl Default for ConvergeBlock {
    fn default() -> Self {
        Self { beta_high: default_beta_high(), beta_low: default_beta_low(), delta: default_delta_grid() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckBlock {
    /// Paths per Monte Carlo cell; defaults depend on whether the model has
    /// a diffusion part.
    pub mc_paths: Option<usize>,
    #[serde(default = "default_check_dt")]
    pub mc_dt: f64,
    #[serde(default = "default_check_points")]
    pub grid_points: usize,
}

impl Default for CheckBlock {
    fn default() -> Self {
        Self { mc_paths: None, mc_dt: default_check_dt(), grid_points: default_check_points() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub directory: Option<String>,
    /// Significant digits in CSV output.
    #[serde(default = "default_precision")]
    pub precision: usize,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { directory: None, precision: default_precision() }
    }
}

fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn default_points() -> usize {
    201
}
fn default_paths() -> usize {
    100_000
}
fn default_dt() -> f64 {
    1e-3
}
fn default_check_dt() -> f64 {
    1e-2
}
fn default_check_points() -> usize {
    500
}
fn default_precision() -> usize {
    12
}
fn default_beta_high() -> Vec<f64> {
    vec![0.9, 0.95, 0.99]
}
fn default_beta_low() -> Vec<f64> {
    vec![0.05, 0.02, 0.01]
}
fn default_delta_grid() -> Vec<f64> {
    vec![3.0]
}

fn bad(field: &str, msg: impl std::fmt::Display) -> AppError {
    AppError::Config(format!("{field}: {msg}"))
}

fn finite(field: &str, v: f64) -> Result<(), AppError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, format!("must be finite, got {v}")))
    }
}

fn positive(field: &str, v: f64) -> Result<(), AppError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(bad(field, format!("must be positive, got {v}")))
    }
}

fn monotone_grid(field: &str, g: &[f64]) -> Result<(), AppError> {
    if g.is_empty() {
        return Err(bad(field, "grid must not be empty"));
    }
    for &v in g {
        finite(field, v)?;
    }
    let up = g.windows(2).all(|w| w[0] < w[1]);
    let down = g.windows(2).all(|w| w[0] > w[1]);
    if !(up || down) {
        return Err(bad(field, "grid must be strictly sorted (ascending or descending)"));
    }
    Ok(())
}

impl Config {
    pub fn from_path(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            AppError::Config(m) => AppError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Parses and validates without building any scale functions.
    pub fn parse(text: &str) -> Result<Self, AppError> {
        let cfg: Config = toml::from_str(text).map_err(|e| AppError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), AppError> {
        let m = &self.model;
        finite("model.c_y", m.c_y)?;
        finite("model.sigma", m.sigma)?;
        if m.sigma < 0.0 {
            return Err(bad("model.sigma", "must be non-negative"));
        }
        positive("model.kappa", m.kappa)?;
        match (m.omega, &m.alpha, &m.generator) {
            (Some(w), None, None) => positive("model.omega", w)?,
            (None, Some(_), Some(_)) => {}
            (None, None, None) => return Err(bad("model", "give either `omega` or both `alpha` and `generator`")),
            (Some(_), _, _) => return Err(bad("model.omega", "cannot be combined with `alpha`/`generator`")),
            (None, Some(_), None) => return Err(bad("model.generator", "missing (required with `alpha`)")),
            (None, None, Some(_)) => return Err(bad("model.alpha", "missing (required with `generator`)")),
        }
        if let (Some(alpha), Some(gen)) = (&m.alpha, &m.generator) {
            for (i, row) in gen.iter().enumerate() {
                if row.len() != alpha.len() {
                    return Err(bad(
                        "model.generator",
                        format!("row {} has {} entries, expected {} (length of alpha)", i + 1, row.len(), alpha.len()),
                    ));
                }
            }
            if gen.len() != alpha.len() {
                return Err(bad("model.generator", format!("{} rows, expected {}", gen.len(), alpha.len())));
            }
        }
        self.jumps()?;
        if m.sigma == 0.0 && m.c_y <= 0.0 {
            return Err(bad("model.c_y", "must be positive when sigma = 0"));
        }

        let p = &self.problem;
        positive("problem.q", p.q)?;
        positive("problem.delta", p.delta)?;
        positive("problem.beta_a", p.beta_a)?;
        positive("problem.beta_s", p.beta_s)?;
        if p.beta_s >= p.beta_a {
            return Err(bad(
                "problem.beta_s",
                format!("must be below beta_a (beta = {} must lie in (0, 1))", p.beta_s / p.beta_a),
            ));
        }
        match (p.rho_tilde, p.rho_bar) {
            (Some(_), Some(_)) => return Err(bad("problem", "give at most one of `rho_tilde` and `rho_bar`")),
            (Some(r), None) => finite("problem.rho_tilde", r)?,
            (None, Some(r)) => finite("problem.rho_bar", r)?,
            (None, None) => {}
        }

        if self.grid.points < 2 {
            return Err(bad("grid.points", "need at least 2 points"));
        }
        if let Some(x) = self.grid.x_max {
            positive("grid.x_max", x)?;
        }
        if let Some(s) = &self.sweep {
            monotone_grid("sweep.grid", &s.grid)?;
            for &x in &s.x_ref {
                if !(x >= 0.0 && x.is_finite()) {
                    return Err(bad("sweep.x_ref", format!("points must be non-negative, got {x}")));
                }
            }
            match s.parameter {
                SweepParameter::Beta => {
                    if s.grid.iter().any(|&b| !(b > 0.0 && b < 1.0)) {
                        return Err(bad("sweep.grid", "beta values must lie in (0, 1)"));
                    }
                }
                SweepParameter::Delta | SweepParameter::OmegaVolatility => {
                    if s.grid.iter().any(|&v| v <= 0.0) {
                        return Err(bad("sweep.grid", "values must be positive"));
                    }
                }
                SweepParameter::RhoBar => {}
            }
            if s.parameter == SweepParameter::OmegaVolatility && m.omega.is_none() {
                return Err(bad("sweep.parameter", "omega_volatility needs exponential jumps (`model.omega`)"));
            }
        }
        if let Some(v) = &self.value {
            finite("value.a", v.a)?;
            finite("value.b", v.b)?;
        }
        let s = &self.simulate;
        if s.a.is_some() != s.b.is_some() {
            return Err(bad("simulate", "give both `a` and `b` or neither"));
        }
        if s.n_paths == 0 {
            return Err(bad("simulate.n_paths", "must be positive"));
        }
        positive("simulate.dt", s.dt)?;
        if let Some(h) = s.horizon {
            positive("simulate.horizon", h)?;
        }
        for &x in &s.x0 {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(bad("simulate.x0", format!("starting points must be non-negative, got {x}")));
            }
        }
        let c = &self.converge;
        monotone_grid("converge.beta_high", &c.beta_high)?;
        monotone_grid("converge.beta_low", &c.beta_low)?;
        monotone_grid("converge.delta", &c.delta)?;
        for (f, g) in [("converge.beta_high", &c.beta_high), ("converge.beta_low", &c.beta_low)] {
            if g.iter().any(|&b| !(b > 0.0 && b < 1.0)) {
                return Err(bad(f, "beta values must lie in (0, 1)"));
            }
        }
        if c.delta.iter().any(|&d| d <= 0.0) {
            return Err(bad("converge.delta", "values must be positive"));
        }
        positive("check.mc_dt", self.check.mc_dt)?;
        if self.check.grid_points < 3 {
            return Err(bad("check.grid_points", "need at least 3 points"));
        }
        if self.check.mc_paths == Some(0) {
            return Err(bad("check.mc_paths", "must be positive"));
        }
        if !(1..=17).contains(&self.output.precision) {
            return Err(bad("output.precision", "must be between 1 and 17"));
        }
        Ok(())
    }

    pub fn jumps(&self) -> Result<PhaseType, AppError> {
        let m = &self.model;
        let r = match (m.omega, &m.alpha, &m.generator) {
            (Some(w), _, _) => PhaseType::exponential(w),
            (None, Some(a), Some(g)) => PhaseType::new(a.clone(), g.clone()),
            _ => return Err(bad("model", "jump distribution missing")),
        };
        r.map_err(|e| bad("model.alpha/generator", e))
    }

    pub fn model(&self) -> Result<LevyModel, AppError> {
        let m = &self.model;
        LevyModel::new(m.c_y, m.sigma, m.kappa, self.jumps()?, self.problem.delta).map_err(AppError::from)
    }

    /// `rho_tilde` in original units.
    pub fn rho_tilde(&self) -> f64 {
        let p = &self.problem;
        match (p.rho_tilde, p.rho_bar) {
            (Some(r), _) => r,
            (None, Some(rb)) => p.beta_a * rb * p.delta / p.q,
            (None, None) => 0.0,
        }
    }

    pub fn problem(&self) -> Result<Problem, AppError> {
        let p = &self.problem;
        Problem::new(self.model()?, p.q, p.beta_a, p.beta_s, self.rho_tilde()).map_err(AppError::from)
    }

    /// Checks the optional `command` key against the requested command.
    pub fn check_command(&self, requested: Command) -> Result<(), AppError> {
        match self.command {
            Some(c) if c != requested => Err(bad(
                "command",
                format!("config is for `{}` but `{}` was requested", c.name(), requested.name()),
            )),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXPO: &str = r#"
[model]
c_y = 1.0
kappa = 4.0
omega = 2.0

[problem]
q = 0.2
delta = 0.1
beta_s = 0.6
"#;

    #[test]
    fn minimal_config() {
        let c = Config::parse(EXPO).unwrap();
        assert_eq!(c.rho_tilde(), 0.0);
        assert_eq!(c.grid.points, 201);
        assert_eq!(c.output.precision, 12);
        assert!(c.problem().is_ok());
    }

    #[test]
    fn rho_bar_converts() {
        let c = Config::parse(&format!("{EXPO}rho_bar = 0.5\n")).unwrap();
        assert!((c.rho_tilde() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn beta_above_one_rejected() {
        let e = Config::parse(&EXPO.replace("beta_s = 0.6", "beta_s = 1.2")).unwrap_err();
        assert!(e.to_string().contains("problem.beta_s"), "{e}");
    }

    #[test]
    fn unknown_key_reports_line() {
        let e = Config::parse(&EXPO.replace("kappa = 4.0", "kapa = 4.0")).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("kapa") && msg.contains("line"), "{msg}");
    }

    #[test]
    fn ragged_generator_rejected() {
        let text = EXPO.replace(
            "omega = 2.0",
            "alpha = [0.5, 0.5]\ngenerator = [\n  [-1.0, 0.5],\n  [0.0],\n]",
        );
        let e = Config::parse(&text).unwrap_err();
        assert!(e.to_string().contains("row 2"), "{e}");
    }

    #[test]
    fn unsorted_grid_rejected() {
        let text = format!("{EXPO}\n[sweep]\nparameter = \"rho_bar\"\ngrid = [0.0, 0.5, 0.2]\n");
        assert!(Config::parse(&text).is_err());
        let text = format!("{EXPO}\n[sweep]\nparameter = \"rho_bar\"\ngrid = []\n");
        assert!(Config::parse(&text).is_err());
    }

    #[test]
    fn command_mismatch() {
        let c = Config::parse(&format!("command = \"solve\"\n{EXPO}")).unwrap();
        assert!(c.check_command(Command::Solve).is_ok());
        assert!(c.check_command(Command::Sweep).is_err());
    }
}
