use serde::{Deserialize, Serialize};

use crate::constitutive::{PressureLaw, Viscosity};
use crate::error::{Error, Result};
use crate::state::DEFAULT_VACUUM_FLOOR;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    ForwardEuler,
    #[default]
    SspRk2,
}

/// The only convective flux offered: Rusanov (local Lax-Friedrichs) with
/// wave speed `|u| + c_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxKind {
    #[default]
    Rusanov,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchemeConfig {
    pub cfl: f64,
    pub vacuum_floor: f64,
    pub flux: FluxKind,
    pub integrator: Integrator,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            cfl: 0.4,
            vacuum_floor: DEFAULT_VACUUM_FLOOR,
            flux: FluxKind::Rusanov,
            integrator: Integrator::SspRk2,
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Param(format!("cfl = {} must lie in (0, 1]", self.cfl)));
        }
        if !(self.vacuum_floor > 0.0 && self.vacuum_floor.is_finite()) {
            return Err(Error::Param(format!("vacuum floor {} must be positive", self.vacuum_floor)));
        }
        Ok(())
    }
}

/// Material parameters of the fluid.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidParams {
    pub viscosity: Viscosity,
    pub law: PressureLaw,
}
