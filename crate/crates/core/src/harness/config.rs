//! Versioned JSON documents: scenarios for runs and probes, and the static
//! problem config. Relative file paths inside a document resolve against the
//! directory the document was loaded from.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constitutive::{PressureLawSpec, Viscosity};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridSpec};
use crate::solver::{Envelope, FluidParams, Forcing, SchemeConfig};
use crate::state::{validate_initial_data, InitialData, State};

use super::profiles::{DensitySpec, PotentialSpec, VectorProfile};

/// The only schema version understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidSpec {
    pub law: PressureLawSpec,
    pub viscosity: Viscosity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub density: DensitySpec,
    #[serde(default)]
    pub velocity: VectorProfile,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingSpec {
    #[default]
    None,
    Constant {
        field: VectorProfile,
    },
    Periodic {
        field: VectorProfile,
        omega: f64,
        #[serde(default)]
        envelope: Envelope,
    },
    Gradient {
        potential: PotentialSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteadySettings {
    /// Required `e_rho(t_end) / e_rho(0)`.
    pub decay_factor: f64,
    /// Required `e_q(t_end)` relative to the momentum scale.
    pub q_rel_tol: f64,
    pub statics_tol: f64,
    pub levels: usize,
    /// Runs starting this close to the static profile are judged by
    /// `max_t e_rho(t) <= well_prepared_tol` instead of by decay.
    pub well_prepared_tol: f64,
}

impl Default for SteadySettings {
    fn default() -> Self {
        SteadySettings {
            decay_factor: 1e-2,
            q_rel_tol: 1e-4,
            statics_tol: 1e-12,
            levels: 64,
            well_prepared_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DissipativitySettings {
    /// Initial energies as multiples of the base scenario's initial energy.
    pub energy_scales: Vec<f64>,
    /// The band is `[0, (1 + margin) * E_tail]`.
    pub margin: f64,
    /// `E_tail` is the largest energy of the lowest run over the final
    /// `tail_fraction` of `[0, t_end]`.
    pub tail_fraction: f64,
}

impl Default for DissipativitySettings {
    fn default() -> Self {
        DissipativitySettings { energy_scales: vec![1.0, 10.0, 100.0], margin: 0.2, tail_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeriodicSettings {
    pub transient: f64,
    pub periods: usize,
    pub rel_tol: f64,
    /// Allowed relative growth between consecutive residuals.
    pub slack: f64,
    /// Residuals below `noise_floor * ||rho||_1` count as converged noise.
    pub noise_floor: f64,
}

impl Default for PeriodicSettings {
    fn default() -> Self {
        PeriodicSettings { transient: 50.0, periods: 5, rel_tol: 1e-3, slack: 0.05, noise_floor: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShiftSettings {
    pub shift_times: Vec<f64>,
    pub window: f64,
    /// Trapezoid nodes per window (intervals).
    pub window_samples: usize,
    pub slack: f64,
    /// Required `Delta_last / Delta_first`.
    pub final_fraction: f64,
    pub noise_floor: f64,
}

impl Default for ShiftSettings {
    fn default() -> Self {
        ShiftSettings {
            shift_times: Vec::new(),
            window: 1.0,
            window_samples: 20,
            slack: 0.05,
            final_fraction: 0.1,
            noise_floor: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSettings {
    pub steady_convergence: SteadySettings,
    pub dissipativity: DissipativitySettings,
    pub periodic: PeriodicSettings,
    pub shift_compactness: ShiftSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    #[serde(default = "default_name")]
    pub name: String,
    pub grid: GridSpec,
    pub initial: InitialSpec,
    pub fluid: FluidSpec,
    #[serde(default)]
    pub forcing: ForcingSpec,
    #[serde(default)]
    pub scheme: SchemeConfig,
    pub t_end: f64,
    pub sample_every: f64,
    #[serde(default)]
    pub snapshot_every: Option<f64>,
    #[serde(default)]
    pub probes: ProbeSettings,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_name() -> String {
    "scenario".into()
}

/// Everything needed to integrate a scenario.
#[derive(Debug, Clone)]
pub struct Setup {
    pub grid: Grid,
    pub params: FluidParams,
    pub forcing: Forcing,
    pub scheme: SchemeConfig,
    pub initial: State,
}

pub(crate) fn read_document(path: &Path) -> Result<(serde_json::Value, Option<PathBuf>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    check_version(&value)?;
    Ok((value, path.parent().map(Path::to_path_buf)))
}

fn check_version(value: &serde_json::Value) -> Result<()> {
    match value.get("version") {
        None => Err(Error::Config("missing mandatory field `version`".into())),
        Some(v) if v.as_u64() == Some(SCHEMA_VERSION as u64) => Ok(()),
        Some(v) => Err(Error::Config(format!("unsupported schema version {v}, expected {SCHEMA_VERSION}"))),
    }
}

fn parse<T: serde::de::DeserializeOwned>(value: serde_json::Value, what: &str) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::Config(format!("{what}: {e}")))
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let (value, base_dir) = read_document(path)?;
        let mut sc: Scenario = parse(value, &path.display().to_string())?;
        sc.base_dir = base_dir;
        Ok(sc)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        check_version(&value)?;
        parse(value, "scenario")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    fn validate_times(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::Config(format!("t_end = {} must be finite and >= 0", self.t_end)));
        }
        if !(self.sample_every.is_finite() && self.sample_every > 0.0) {
            return Err(Error::Config(format!("sample_every = {} must be positive", self.sample_every)));
        }
        if let Some(s) = self.snapshot_every {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Config(format!("snapshot_every = {s} must be positive")));
            }
        }
        Ok(())
    }

    pub fn build_forcing(&self, grid: Grid) -> Result<Forcing> {
        let base = self.base_dir.as_deref();
        match &self.forcing {
            ForcingSpec::None => Ok(Forcing::zero(grid)),
            ForcingSpec::Constant { field } => Ok(Forcing::constant(field.build(grid)?)),
            ForcingSpec::Periodic { field, omega, envelope } => {
                Forcing::periodic(field.build(grid)?, *omega, *envelope)
            }
            ForcingSpec::Gradient { potential } => potential.build_forcing(grid, base),
        }
    }

    /// Validates every component and assembles the initial state.
    pub fn build(&self) -> Result<Setup> {
        self.validate_times()?;
        let grid = self.grid.build()?;
        let law = self.fluid.law.build(self.base_dir.as_deref())?;
        let params = FluidParams { viscosity: self.fluid.viscosity, law };
        self.scheme.validate()?;
        let forcing = self.build_forcing(grid)?;
        let rho = self.initial.density.build(grid, &params.law, &forcing)?;
        let u = self.initial.velocity.build(grid)?;
        let comps = (0..grid.dim())
            .map(|k| rho.values().iter().zip(u.component(k)).map(|(r, v)| r * v).collect())
            .collect();
        let mom = crate::field::VectorField::from_components(grid, comps)?;
        let initial = validate_initial_data(InitialData { rho, mom }, self.scheme.vacuum_floor)?;
        Ok(Setup { grid, params, forcing, scheme: self.scheme, initial })
    }
}

/// Config of the `static` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticConfig {
    pub version: u32,
    pub grid: GridSpec,
    pub potential: PotentialSpec,
    pub mass: f64,
    pub a: f64,
    pub gamma: f64,
    #[serde(default = "default_static_tol")]
    pub tol: f64,
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_static_tol() -> f64 {
    1e-12
}

fn default_levels() -> usize {
    crate::statics::DEFAULT_LEVELS
}

impl StaticConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let (value, base_dir) = read_document(path)?;
        let mut cfg: StaticConfig = parse(value, &path.display().to_string())?;
        cfg.base_dir = base_dir;
        Ok(cfg)
    }
}
