//! Experiment configuration: a TOML document with typed blocks (grid,
//! growth, kernel, menu, corpus, task, output), command-line overrides,
//! and a provenance hash carried into every report row.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus;
use crate::error::{Error, Result};
use crate::grid::{standard_radii, BallMenu, Grid};
use crate::growth::GrowthFunction;
use crate::semigroup::{Backend, KernelOp};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub grid: GridConfig,
    pub growth: GrowthConfig,
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default)]
    pub menu: MenuConfig,
    #[serde(default)]
    pub corpus: CorpusConfig,
    #[serde(default)]
    pub task: TaskConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub side_length: f64,
    pub points_per_side: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    /// power | weighted_power | log_type | ky_log
    pub family: String,
    #[serde(default = "default_one")]
    pub p: f64,
    #[serde(default = "default_one")]
    pub s: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub gamma: f64,
    /// Exponent of the `|x|^a` weight for the weighted family.
    #[serde(default = "default_half")]
    pub weight_exponent: f64,
    /// Declared exponents; family defaults when absent.
    pub lower_type: Option<f64>,
    pub upper_type: Option<f64>,
    pub ap_exponent: Option<f64>,
}

fn default_one() -> f64 {
    1.0
}

fn default_half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    /// poisson | heat | box
    pub kind: String,
    /// Scaling exponent for the box kernel (poisson and heat are fixed).
    pub m: Option<f64>,
    /// spectral | direct
    #[serde(default = "default_backend")]
    pub backend: String,
}

fn default_backend() -> String {
    "spectral".to_string()
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            kind: "poisson".to_string(),
            m: None,
            backend: default_backend(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MenuConfig {
    /// Stride of the center sublattice; default keeps about 32 centers
    /// per side.
    pub center_stride: Option<usize>,
    /// Radius ladder; default is the standard geometric ladder.
    pub radii: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Member subset; the full corpus when absent.
    pub members: Option<Vec<String>>,
}

fn default_seed() -> u64 {
    7
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { seed: default_seed(), members: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    /// norm | norms | weights | bmo | jn | carleson | equiv | kernel-check
    #[serde(default = "default_task")]
    pub kind: String,
    /// Function selector for single-function tasks (corpus member name or
    /// `file:<path>` to a CSV/binary grid function).
    pub function: Option<String>,
    /// Stride of the x sublattice for pointwise conditions.
    pub x_stride: Option<usize>,
    /// Muckenhoupt exponent ladder for the weights task.
    pub ap_exponents: Option<Vec<f64>>,
    /// Reverse Holder exponent ladder for the weights task.
    pub rh_exponents: Option<Vec<f64>>,
    /// `p` ladder for the p-variant seminorms.
    pub p_tildes: Option<Vec<f64>>,
    /// Number of points in the tent/time grid.
    pub t_points: Option<usize>,
    /// Number of lambda points per distribution curve.
    pub lambda_points: Option<usize>,
    /// Bisection tolerance for Luxembourg norms.
    pub norm_tol: Option<f64>,
    /// Dilation ladder for drift checks.
    pub k_ladder: Option<Vec<f64>>,
}

fn default_task() -> String {
    "equiv".to_string()
}

impl Default for TaskConfig {
    fn default() -> Self {
        TaskConfig {
            kind: default_task(),
            function: None,
            x_stride: None,
            ap_exponents: None,
            rh_exponents: None,
            p_tildes: None,
            t_points: None,
            lambda_points: None,
            norm_tol: None,
            k_ladder: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_formats() -> Vec<String> {
    vec!["csv".to_string(), "json".to_string()]
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
        let mut doc: toml::Value =
            toml::from_str(text).map_err(|e| Error::Config(format!("TOML parse: {e}")))?;
        for (key, value) in overrides {
            apply_override(&mut doc, key, value)?;
        }
        let config: ExperimentConfig = doc
            .try_into()
            .map_err(|e| Error::Config(format!("config shape: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        ExperimentConfig::from_toml_str(&text, overrides)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "config version {} unsupported (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        let known_tasks = [
            "norm", "norms", "weights", "bmo", "jn", "carleson", "equiv", "kernel-check",
        ];
        if !known_tasks.contains(&self.task.kind.as_str()) {
            return Err(Error::Config(format!(
                "task.kind {} not one of {known_tasks:?}",
                self.task.kind
            )));
        }
        let known_growth = ["power", "weighted_power", "log_type", "ky_log"];
        if !known_growth.contains(&self.growth.family.as_str()) {
            return Err(Error::Config(format!(
                "growth.family {} not one of {known_growth:?}",
                self.growth.family
            )));
        }
        let known_kernels = ["poisson", "heat", "box"];
        if !known_kernels.contains(&self.kernel.kind.as_str()) {
            return Err(Error::Config(format!(
                "kernel.kind {} not one of {known_kernels:?}",
                self.kernel.kind
            )));
        }
        if let Some(members) = &self.corpus.members {
            for m in members {
                if !corpus::MEMBER_NAMES.contains(&m.as_str()) {
                    return Err(Error::Config(format!("unknown corpus member {m}")));
                }
            }
        }
        Ok(())
    }

    /// Provenance hash: SHA-256 of the canonical serialized config,
    /// truncated to 16 hex digits.
    pub fn hash(&self) -> String {
        let canonical = toml::to_string(self).unwrap_or_default();
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn build_grid(&self) -> Result<Arc<Grid>> {
        Grid::new(self.grid.dim, self.grid.side_length, self.grid.points_per_side)
    }

    pub fn build_growth(&self, grid: &Arc<Grid>) -> Result<GrowthFunction> {
        let g = &self.growth;
        let mut phi = match g.family.as_str() {
            "power" => GrowthFunction::power(g.p)?,
            "weighted_power" => {
                let w = corpus::abs_power_weight(grid, g.weight_exponent)?;
                GrowthFunction::weighted_power(w, g.p, g.ap_exponent.unwrap_or(2.0))?
            }
            "log_type" => GrowthFunction::log_type(g.s, g.beta, g.gamma, [0.0, 0.0])?,
            "ky_log" => GrowthFunction::ky_log([0.0, 0.0])?,
            other => return Err(Error::Config(format!("unknown growth family {other}"))),
        };
        let lower = g.lower_type.unwrap_or(phi.lower_type());
        let upper = g.upper_type.unwrap_or(phi.upper_type());
        let ap = g.ap_exponent.unwrap_or(phi.ap_exponent());
        phi = phi.with_declared(lower, upper, ap);
        Ok(phi)
    }

    pub fn build_kernel(&self) -> Result<KernelOp> {
        let op = match self.kernel.kind.as_str() {
            "poisson" => KernelOp::poisson(),
            "heat" => KernelOp::heat(),
            "box" => KernelOp::box_kernel(self.kernel.m.unwrap_or(1.0))?,
            other => return Err(Error::Config(format!("unknown kernel kind {other}"))),
        };
        let backend = match self.kernel.backend.as_str() {
            "spectral" => Backend::Spectral,
            "direct" => Backend::Direct,
            other => return Err(Error::Config(format!("unknown backend {other}"))),
        };
        Ok(op.with_backend(backend))
    }

    pub fn build_menu(&self, grid: &Arc<Grid>) -> Result<BallMenu> {
        let stride = self
            .menu
            .center_stride
            .unwrap_or_else(|| (grid.points_per_side() / 32).max(1));
        match &self.menu.radii {
            Some(radii) => BallMenu::new(grid, stride, radii),
            None => BallMenu::new(grid, stride, &standard_radii(grid)),
        }
    }

    pub fn corpus_members(&self) -> Vec<String> {
        match &self.corpus.members {
            Some(m) => m.clone(),
            None => corpus::MEMBER_NAMES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Apply a `--set path.key=value` override onto the parsed document.
fn apply_override(doc: &mut toml::Value, key: &str, value: &str) -> Result<()> {
    let parsed: toml::Value = {
        let fragment = format!("v = {value}");
        match toml::from_str::<toml::Table>(&fragment) {
            Ok(t) => t["v"].clone(),
            // bare strings may come unquoted on the command line
            Err(_) => toml::Value::String(value.to_string()),
        }
    };
    let parts: Vec<&str> = key.split('.').collect();
    if parts.is_empty() {
        return Err(Error::Config("empty override key".into()));
    }
    let mut cursor = doc;
    for part in &parts[..parts.len() - 1] {
        let table = cursor
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override path {key} crosses a non-table")))?;
        cursor = table
            .entry(part.to_string())
            .or_insert(toml::Value::Table(Default::default()));
    }
    let table = cursor
        .as_table_mut()
        .ok_or_else(|| Error::Config(format!("override path {key} crosses a non-table")))?;
    table.insert(parts[parts.len() - 1].to_string(), parsed);
    Ok(())
}

pub fn example_config() -> &'static str {
    r#"version = 1

[grid]
dim = 1
side_length = 2.0
points_per_side = 4096

[growth]
family = "power"
p = 1.0

[kernel]
kind = "poisson"
backend = "spectral"

[menu]
center_stride = 128

[corpus]
seed = 7

[task]
kind = "equiv"

[output]
directory = "out"
formats = ["csv", "json"]
"#
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_parses_and_hashes_stably() {
        let c = ExperimentConfig::from_toml_str(example_config(), &[]).unwrap();
        assert_eq!(c.task.kind, "equiv");
        let h1 = c.hash();
        let h2 = ExperimentConfig::from_toml_str(example_config(), &[]).unwrap().hash();
        assert_eq!(h1, h2);
        assert_eq!(h1.len(), 16);
    }

    #[test]
    fn overrides_apply() {
        let c = ExperimentConfig::from_toml_str(
            example_config(),
            &[
                ("grid.points_per_side".to_string(), "1024".to_string()),
                ("task.kind".to_string(), "\"norms\"".to_string()),
                ("kernel.kind".to_string(), "heat".to_string()),
            ],
        )
        .unwrap();
        assert_eq!(c.grid.points_per_side, 1024);
        assert_eq!(c.task.kind, "norms");
        assert_eq!(c.kernel.kind, "heat");
        // hash moves with the config
        let base = ExperimentConfig::from_toml_str(example_config(), &[]).unwrap();
        assert_ne!(c.hash(), base.hash());
    }

    #[test]
    fn malformed_config_is_a_config_error() {
        let broken = example_config().replace("points_per_side = 4096", "");
        let err = ExperimentConfig::from_toml_str(&broken, &[]).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("points_per_side"), "diagnostic: {msg}");
        let unknown = example_config().replace("kind = \"equiv\"", "kind = \"frobnicate\"");
        assert!(ExperimentConfig::from_toml_str(&unknown, &[]).is_err());
    }

    #[test]
    fn builders_produce_consistent_objects() {
        let c = ExperimentConfig::from_toml_str(example_config(), &[]).unwrap();
        let grid = c.build_grid().unwrap();
        let phi = c.build_growth(&grid).unwrap();
        assert_eq!(phi.family_name(), "power");
        let menu = c.build_menu(&grid).unwrap();
        assert!(!menu.is_empty());
        let op = c.build_kernel().unwrap();
        assert_eq!(op.kind_name(), "poisson");
    }
}
