//! Run configuration: one JSON file plus `--set key=value` overrides.

use semiwave::algebra::{nonlinearity_from_json, preset, GCoefficients, QuadraticNonlinearity};
use semiwave::radiation::{DataSpec, InitialData};
use semiwave::solver::GridConfig;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum ConfigError {
    /// Malformed or inconsistent configuration (exit code 2).
    Invalid(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Invalid(m) => write!(f, "config error: {m}"),
        }
    }
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_l")]
    pub l: f64,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
}

fn default_l() -> f64 {
    32.0
}
fn default_h() -> f64 {
    0.25
}
fn default_dt() -> f64 {
    0.0625
}
fn default_t_max() -> f64 {
    24.0
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { l: default_l(), h: default_h(), dt: default_dt(), t_max: default_t_max() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceSpec {
    #[serde(default = "default_tau_end")]
    pub tau_end: f64,
    #[serde(default = "default_dtau")]
    pub dtau: f64,
    /// Sphere rule for the reduced-system integration.
    #[serde(default = "default_reduce_polar")]
    pub n_polar: usize,
    #[serde(default = "default_reduce_azimuth")]
    pub n_azimuth: usize,
}

fn default_tau_end() -> f64 {
    1.0
}
fn default_dtau() -> f64 {
    1e-3
}
fn default_reduce_polar() -> usize {
    4
}
fn default_reduce_azimuth() -> usize {
    8
}

impl Default for ReduceSpec {
    fn default() -> Self {
        ReduceSpec {
            tau_end: default_tau_end(),
            dtau: default_dtau(),
            n_polar: default_reduce_polar(),
            n_azimuth: default_reduce_azimuth(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// Preset name, inline sparse spec object, or {"file": path}.
    pub nonlinearity: serde_json::Value,
    #[serde(default)]
    pub data: Vec<DataSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Rays as [sigma, theta, phi] triples; must form a σ × direction
    /// product for profile extraction.
    #[serde(default)]
    pub rays: Vec<[f64; 3]>,
    #[serde(default)]
    pub outputs: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub reduce: ReduceSpec,
    #[serde(default = "default_classify_samples")]
    pub classify_samples: usize,
    #[serde(default = "default_alinhac_samples")]
    pub alinhac_samples: usize,
    /// Energy-sampling cadence in steps.
    #[serde(default = "default_energy_every")]
    pub energy_every: usize,
    /// Snapshot times for the derivative-field dumps.
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default = "default_snapshot_stride")]
    pub snapshot_stride: usize,
}

fn default_eps() -> f64 {
    0.05
}
fn default_classify_samples() -> usize {
    2000
}
fn default_alinhac_samples() -> usize {
    10_000
}
fn default_energy_every() -> usize {
    8
}
fn default_snapshot_stride() -> usize {
    2
}

/// Fully resolved configuration.
pub struct RunConfig {
    pub raw: RawConfig,
    pub preset_name: Option<String>,
    pub nonlinearity: QuadraticNonlinearity,
    pub g_coeffs: Option<GCoefficients>,
    pub alinhac: Option<semiwave::algebra::AlinhacData>,
    pub data: Vec<InitialData>,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn grid_config(&self) -> GridConfig {
        GridConfig { l: self.raw.grid.l, h: self.raw.grid.h, dt: self.raw.grid.dt }
    }

    /// Rays as (σ, unit direction) pairs.
    pub fn ray_list(&self) -> Vec<(f64, [f64; 3])> {
        self.raw
            .rays
            .iter()
            .map(|[sigma, theta, phi]| {
                let st = theta.sin();
                (*sigma, [st * phi.cos(), st * phi.sin(), theta.cos()])
            })
            .collect()
    }
}

/// Apply one `--set key=value` override onto the JSON tree. Dotted keys
/// descend into objects; values parse as JSON when possible and fall back
/// to strings.
pub fn apply_override(tree: &mut serde_json::Value, assignment: &str) -> Result<(), ConfigError> {
    let Some((key, value)) = assignment.split_once('=') else {
        return Err(invalid(format!("--set expects key=value, got {assignment:?}")));
    };
    let parsed: serde_json::Value = serde_json::from_str(value)
        .unwrap_or_else(|_| serde_json::Value::String(value.to_string()));
    let mut node = tree;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if !node.is_object() {
            return Err(invalid(format!("field `{}` is not an object", parts[..i].join("."))));
        }
        let map = node.as_object_mut().unwrap();
        if i + 1 == parts.len() {
            map.insert(part.to_string(), parsed);
            return Ok(());
        }
        node = map.entry(part.to_string()).or_insert(serde_json::json!({}));
    }
    Ok(())
}

/// Load, override, and fully validate a configuration.
pub fn load_config(
    path: &Path,
    out_override: Option<&Path>,
    sets: &[String],
) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
    let mut tree: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| invalid(format!("config is not valid JSON: {e}")))?;
    for s in sets {
        apply_override(&mut tree, s)?;
    }
    let raw: RawConfig = serde_json::from_value(tree)
        .map_err(|e| invalid(format!("bad config field: {e}")))?;

    // Resolve the nonlinearity.
    let (preset_name, nonlinearity, g_coeffs, alinhac) = match &raw.nonlinearity {
        serde_json::Value::String(name) => {
            let p = preset(name).map_err(|e| invalid(format!("field `nonlinearity`: {e}")))?;
            (Some(name.clone()), p.nonlinearity, p.g_coeffs, p.alinhac)
        }
        serde_json::Value::Object(map) if map.contains_key("file") => {
            let file = map["file"]
                .as_str()
                .ok_or_else(|| invalid("field `nonlinearity.file` must be a string"))?;
            let text = std::fs::read_to_string(file)
                .map_err(|e| invalid(format!("field `nonlinearity.file`: cannot read {file}: {e}")))?;
            let f = nonlinearity_from_json(&text)
                .map_err(|e| invalid(format!("field `nonlinearity.file`: {e}")))?;
            (None, f, None, None)
        }
        inline @ serde_json::Value::Object(_) => {
            let f = nonlinearity_from_json(&inline.to_string())
                .map_err(|e| invalid(format!("field `nonlinearity`: {e}")))?;
            (None, f, None, None)
        }
        other => {
            return Err(invalid(format!(
                "field `nonlinearity`: expected preset name, spec object, or {{\"file\": ...}}, got {other}"
            )))
        }
    };

    if raw.eps <= 0.0 {
        return Err(invalid("field `eps`: must be positive"));
    }
    if !raw.data.is_empty() && raw.data.len() != nonlinearity.n_total() {
        return Err(invalid(format!(
            "field `data`: {} components for an {}-component system",
            raw.data.len(),
            nonlinearity.n_total()
        )));
    }
    let mut data = Vec::with_capacity(nonlinearity.n_total());
    for (i, spec) in raw.data.iter().enumerate() {
        let mut d = spec
            .build()
            .map_err(|e| invalid(format!("field `data[{i}]`: {e}")))?;
        d.eps *= raw.eps;
        data.push(d);
    }
    while data.len() < nonlinearity.n_total() {
        data.push(InitialData::zero());
    }

    // Grid feasibility: CFL and containment over the whole run.
    let g = &raw.grid;
    if g.dt > 0.5 * g.h / 3.0f64.sqrt() + 1e-12 {
        return Err(invalid(format!(
            "field `grid.dt`: {} violates the CFL bound 0.5·h/√3 = {}",
            g.dt,
            0.5 * g.h / 3.0f64.sqrt()
        )));
    }
    let r: f64 = data.iter().map(|d| d.support_radius).fold(0.0, f64::max);
    if g.t_max + r + 10.0 * g.h >= g.l {
        return Err(invalid(format!(
            "field `grid`: waves reach the boundary (t_max + R + pad = {} ≥ L = {})",
            g.t_max + r + 10.0 * g.h,
            g.l
        )));
    }
    for (i, [sigma, theta, _phi]) in raw.rays.iter().enumerate() {
        let r_end = g.t_max + sigma;
        if r_end <= 0.0 {
            return Err(invalid(format!("field `rays[{i}]`: r = t_max + σ must stay positive")));
        }
        if r_end >= g.l - 2.0 * g.h {
            return Err(invalid(format!("field `rays[{i}]`: leaves the cube before t_max")));
        }
        if !(0.0..=std::f64::consts::PI).contains(theta) {
            return Err(invalid(format!("field `rays[{i}]`: θ must lie in [0, π]")));
        }
    }
    for (i, t) in raw.snapshots.iter().enumerate() {
        if *t < 0.0 || *t > g.t_max {
            return Err(invalid(format!("field `snapshots[{i}]`: outside [0, t_max]")));
        }
    }

    let out_dir = match out_override {
        Some(p) => p.to_path_buf(),
        None => PathBuf::from(raw.outputs.clone().unwrap_or_else(|| "out".to_string())),
    };
    Ok(RunConfig { raw, preset_name, nonlinearity, g_coeffs, alinhac, data, out_dir })
}
