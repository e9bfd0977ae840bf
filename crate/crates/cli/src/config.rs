//! Versioned TOML run configuration.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use pwf_core::flow::{DtPolicy, FlowConfig, RPolicy};
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Printed on usage errors.
pub const SCHEMA: &str = r#"schema_version = 1
n = 64                          # even grid size >= 8

[initial]                       # kind = clifford | clifford_perturbed | revolution | product_torus | from_file
kind = "clifford_perturbed"
seed = 1                        # clifford_perturbed
amplitude = 0.01                # clifford_perturbed, below 0.2
# c_over_r = 1.4142135623730951 # revolution, > 1
# r1 = 1.0                      # product_torus
# r2 = 1.3
# path = "state.pwfl"           # from_file

[flow]
dt = { policy = "fixed", dt = 1e-3 }   # or { policy = "cfl", lambda = 0.5 }
t_end = 0.1
reproject_every = 0             # 0 = never
beta = 8.37758040957278         # concentration threshold, at most 8 pi / 3
radius = { policy = "off" }     # or { policy = "fixed", r = 0.2 } or { policy = "auto" }
tangential = true
tol_energy = 1e-8
max_retries = 20
defect_guard = 0.1
modulus_eps = 1e-6
guard_every = 10
concentration_stride = 4
radii = []                      # extra radii logged as E_sup columns

[output]
dir = "out"
record_every = 1
snapshot_every = 0              # 0 = initial and final state only
"#;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Clifford,
    CliffordPerturbed { seed: u64, amplitude: f64 },
    Revolution { c_over_r: f64 },
    ProductTorus { r1: f64, r2: f64 },
    FromFile { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum DtSpec {
    Fixed { dt: f64 },
    Cfl { lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiusSpec {
    Off,
    Fixed { r: f64 },
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    pub dt: DtSpec,
    pub t_end: f64,
    #[serde(default)]
    pub reproject_every: usize,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_radius")]
    pub radius: RadiusSpec,
    #[serde(default = "yes")]
    pub tangential: bool,
    #[serde(default = "default_tol")]
    pub tol_energy: f64,
    #[serde(default = "default_retries")]
    pub max_retries: usize,
    #[serde(default = "default_defect_guard")]
    pub defect_guard: f64,
    #[serde(default = "default_modulus_eps")]
    pub modulus_eps: f64,
    #[serde(default = "default_guard_every")]
    pub guard_every: usize,
    #[serde(default = "default_stride")]
    pub concentration_stride: usize,
    #[serde(default)]
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default)]
    pub snapshot_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub n: usize,
    pub initial: InitialSpec,
    pub flow: FlowSection,
    pub output: OutputSection,
}

fn default_beta() -> f64 {
    8.0 * PI / 3.0
}
fn default_radius() -> RadiusSpec {
    RadiusSpec::Off
}
fn yes() -> bool {
    true
}
fn one() -> usize {
    1
}
fn default_tol() -> f64 {
    1e-8
}
fn default_retries() -> usize {
    20
}
fn default_defect_guard() -> f64 {
    0.1
}
fn default_modulus_eps() -> f64 {
    1e-6
}
fn default_guard_every() -> usize {
    10
}
fn default_stride() -> usize {
    4
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        cfg.flow_config().validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        // Relative input paths are taken relative to the config file.
        if let InitialSpec::FromFile { path: p } = &mut cfg.initial {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn flow_config(&self) -> FlowConfig {
        let f = &self.flow;
        FlowConfig {
            dt_policy: match f.dt {
                DtSpec::Fixed { dt } => DtPolicy::Fixed(dt),
                DtSpec::Cfl { lambda } => DtPolicy::Cfl(lambda),
            },
            t_end: f.t_end,
            reproject_every: f.reproject_every,
            beta: f.beta,
            r_policy: match f.radius {
                RadiusSpec::Off => RPolicy::Off,
                RadiusSpec::Fixed { r } => RPolicy::Fixed(r),
                RadiusSpec::Auto => RPolicy::Auto,
            },
            tangential: f.tangential,
            tol_energy: f.tol_energy,
            max_retries: f.max_retries,
            defect_guard: f.defect_guard,
            modulus_eps: f.modulus_eps,
            record_every: self.output.record_every,
            snapshot_every: self.output.snapshot_every,
            guard_every: f.guard_every,
            concentration_stride: f.concentration_stride,
            radii: f.radii.clone(),
        }
    }
}
