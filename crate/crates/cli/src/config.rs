//! Experiment configuration: a TOML document describing the base model, the
//! transformation chain, the evaluation window and the route.

use serde::Deserialize;
use sha2::{Digest, Sha256};
use std::path::Path;

use susy_core::darboux::{Action, BaseModel, DarbouxChain};
use susy_core::jets::BasisFunction;
use susy_core::propagators::{ComplexTime, TheoremOptions};
use susy_core::quad::QuadOptions;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseName {
    Free,
    Box,
    Oscillator,
}

impl From<BaseName> for BaseModel {
    fn from(b: BaseName) -> Self {
        match b {
            BaseName::Free => BaseModel::FreeLine,
            BaseName::Box => BaseModel::Box,
            BaseName::Oscillator => BaseModel::Oscillator,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub base: BaseName,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    TrigBox { n: u32 },
    Cosh { a: f64, #[serde(default)] b: f64 },
    Sinh { a: f64, #[serde(default)] b: f64 },
    HermiteGaussian { k: u32 },
    PlaneExp { sign: i8, a: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionName {
    Remove,
    Create,
    Isospectral,
}

impl From<ActionName> for Action {
    fn from(a: ActionName) -> Self {
        match a {
            ActionName::Remove => Action::RemoveLevel,
            ActionName::Create => Action::CreateLevel,
            ActionName::Isospectral => Action::Isospectral,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct ChainEntry {
    #[serde(flatten)]
    pub family: Family,
    pub action: ActionName,
    /// Optional cross-check of the family's energy.
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub x: [f64; 2],
    pub nx: usize,
    pub y: Option<[f64; 2]>,
    pub ny: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(default)]
    pub real: f64,
    #[serde(default)]
    pub wick: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Closed,
    Theorem,
    Oracle,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Closed => "closed",
            Route::Theorem => "theorem",
            Route::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSection {
    #[serde(default = "default_route")]
    pub route: Route,
    /// A second route evaluated on the same grid; its maximum relative deviation is
    /// recorded in the table metadata.
    pub compare: Option<Route>,
}

fn default_route() -> Route {
    Route::Closed
}

impl Default for MethodSection {
    fn default() -> Self {
        Self { route: Route::Closed, compare: None }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "d_abs")]
    pub quad_abs: f64,
    #[serde(default = "d_rel")]
    pub quad_rel: f64,
    #[serde(default = "d_max")]
    pub max_intervals: usize,
}

fn d_abs() -> f64 {
    1e-13
}
fn d_rel() -> f64 {
    1e-13
}
fn d_max() -> usize {
    6000
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { quad_abs: d_abs(), quad_rel: d_rel(), max_intervals: d_max() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub interval: Option<[f64; 2]>,
    #[serde(default = "d_h")]
    pub h: f64,
    pub states: Option<usize>,
    #[serde(default = "d_true")]
    pub richardson: bool,
}

fn d_h() -> f64 {
    0.01
}
fn d_true() -> bool {
    true
}

impl Default for OracleSection {
    fn default() -> Self {
        Self { interval: None, h: d_h(), states: None, richardson: true }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenSection {
    #[serde(default)]
    pub energy: f64,
    #[serde(default)]
    pub energy_im: f64,
    /// 0-based level whose pole is subtracted.
    pub regularized_level: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub chain: Vec<ChainEntry>,
    pub window: Window,
    pub time: Option<TimeSection>,
    #[serde(default)]
    pub method: MethodSection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub oracle: OracleSection,
    pub green: Option<GreenSection>,
    #[serde(default)]
    pub output: OutputSection,
}

/// A parsed configuration together with the hash of its source text.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ModelConfig,
    pub hash: String,
    pub chain: Option<DarbouxChain>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl LoadedConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    /// Parses, validates the schema and builds the chain, running the admissibility
    /// checks.
    pub fn from_str(text: &str) -> Result<Self, CliError> {
        let config: ModelConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        let chain = config.build_chain()?;
        Ok(Self { hash: sha256_hex(text.as_bytes()), config, chain })
    }
}

impl ModelConfig {
    pub fn base_model(&self) -> BaseModel {
        self.model.base.into()
    }

    fn validate(&self) -> Result<(), CliError> {
        let model = self.base_model();
        let w = &self.window;
        let ranges: Vec<([f64; 2], usize)> = match (w.y, w.ny) {
            (Some(y), Some(ny)) => vec![(w.x, w.nx), (y, ny)],
            (None, None) => vec![(w.x, w.nx)],
            _ => return Err(CliError::Config("window.y and window.ny go together".into())),
        };
        for (r, n) in ranges {
            if n == 0 || !(r[0].is_finite() && r[1].is_finite()) || r[1] < r[0] || (n > 1 && r[1] == r[0]) {
                return Err(CliError::Config(format!("bad window range {r:?} with {n} points")));
            }
            if !(model.contains(r[0]) && model.contains(r[1])) {
                return Err(CliError::Config(format!("window {r:?} leaves the open domain of {model:?}")));
            }
        }
        if let Some(t) = self.time {
            if !(t.real.is_finite() && t.wick.is_finite()) || t.wick < 0.0 || (t.real == 0.0 && t.wick == 0.0) {
                return Err(CliError::Config("time needs wick ≥ 0 and t ≠ 0".into()));
            }
        }
        let tol = self.tolerances;
        if !(tol.quad_abs > 0.0 && tol.quad_rel > 0.0 && tol.max_intervals > 0) {
            return Err(CliError::Config("tolerances must be positive".into()));
        }
        if !(self.oracle.h > 0.0) {
            return Err(CliError::Config("oracle.h must be positive".into()));
        }
        for (i, e) in self.chain.iter().enumerate() {
            let ok = matches!(
                (model, &e.family),
                (BaseModel::Box, Family::TrigBox { .. })
                    | (BaseModel::Oscillator, Family::HermiteGaussian { .. })
                    | (BaseModel::FreeLine, Family::Cosh { .. } | Family::Sinh { .. } | Family::PlaneExp { .. })
            );
            if !ok {
                return Err(CliError::Config(format!("chain[{i}]: family {:?} does not solve the {model:?} equation", e.family)));
            }
        }
        Ok(())
    }

    fn build_chain(&self) -> Result<Option<DarbouxChain>, CliError> {
        if self.chain.is_empty() {
            return Ok(None);
        }
        let mut functions = Vec::with_capacity(self.chain.len());
        let mut actions = Vec::with_capacity(self.chain.len());
        for (i, e) in self.chain.iter().enumerate() {
            let f = match e.family {
                Family::TrigBox { n } => BasisFunction::trig_box(n),
                Family::Cosh { a, b } => BasisFunction::cosh(a, b),
                Family::Sinh { a, b } => BasisFunction::sinh(a, b),
                Family::HermiteGaussian { k } => Ok(BasisFunction::hermite_gaussian(k)),
                Family::PlaneExp { sign, a } => BasisFunction::plane_exp(sign, a),
            }
            .map_err(|err| CliError::Config(format!("chain[{i}]: {err}")))?;
            if let Some(energy) = e.energy {
                if (energy - f.energy()).abs() > 1e-9 * f.energy().abs().max(1.0) {
                    return Err(CliError::Config(format!(
                        "chain[{i}]: stated energy {energy} but the function has {}",
                        f.energy()
                    )));
                }
            }
            functions.push(f);
            actions.push(e.action.into());
        }
        DarbouxChain::new(self.base_model(), functions, actions).map(Some).map_err(CliError::from_core)
    }

    pub fn time(&self) -> Result<ComplexTime, CliError> {
        let t = self.time.ok_or_else(|| CliError::Config("missing [time] section".into()))?;
        ComplexTime::new(t.real, t.wick).map_err(CliError::from_core)
    }

    pub fn theorem_options(&self) -> TheoremOptions {
        let t = self.tolerances;
        TheoremOptions { quad: QuadOptions { abs_tol: t.quad_abs, rel_tol: t.quad_rel, max_intervals: t.max_intervals } }
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.window.x, self.window.nx)
    }

    pub fn ys(&self) -> Result<Vec<f64>, CliError> {
        match (self.window.y, self.window.ny) {
            (Some(y), Some(n)) => Ok(linspace(y, n)),
            _ => Err(CliError::Config("this command needs window.y and window.ny".into())),
        }
    }
}

pub fn linspace(r: [f64; 2], n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![r[0]];
    }
    (0..n).map(|i| r[0] + (r[1] - r[0]) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOX: &str = r#"
[model]
base = "box"

[[chain]]
family = "trig_box"
n = 1
action = "remove"

[window]
x = [0.1, 0.9]
nx = 3
y = [0.2, 0.8]
ny = 2

[time]
wick = 0.05
"#;

    #[test]
    fn parses_and_builds_chain() {
        let c = LoadedConfig::from_str(BOX).unwrap();
        assert_eq!(c.chain.as_ref().unwrap().len(), 1);
        assert_eq!(c.config.xs(), vec![0.1, 0.5, 0.9]);
        assert_eq!(c.hash.len(), 64);
        assert_eq!(c.config.method.route, Route::Closed);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_windows() {
        let bad = BOX.replace("[time]", "[time]\nspeed = 3");
        assert!(matches!(LoadedConfig::from_str(&bad), Err(CliError::Config(_))));
        let bad = BOX.replace("x = [0.1, 0.9]", "x = [0.0, 0.9]");
        assert!(matches!(LoadedConfig::from_str(&bad), Err(CliError::Config(_))));
        let bad = BOX.replace("family = \"trig_box\"\nn = 1", "family = \"cosh\"\na = 1.0");
        assert!(matches!(LoadedConfig::from_str(&bad), Err(CliError::Config(_))));
    }

    #[test]
    fn inadmissible_chain_is_its_own_error() {
        // removing the second level alone breaks the spectral sign condition
        let bad = BOX.replace("n = 1", "n = 2");
        assert!(matches!(LoadedConfig::from_str(&bad), Err(CliError::Admissibility(_))));
    }

    #[test]
    fn energy_cross_check() {
        let bad = BOX.replace("action = \"remove\"", "action = \"remove\"\nenergy = 9.0");
        assert!(matches!(LoadedConfig::from_str(&bad), Err(CliError::Config(_))));
        let good = BOX.replace("action = \"remove\"", "action = \"remove\"\nenergy = 9.869604401089358");
        assert!(LoadedConfig::from_str(&good).is_ok());
    }
}
