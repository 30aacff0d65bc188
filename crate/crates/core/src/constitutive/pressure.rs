use serde::{Deserialize, Serialize};

use super::tabulated::TabulatedLaw;
use crate::error::{Error, Result};

/// Barotropic pressure-density law `p = p(rho)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PressureLaw {
    /// `p = a rho^gamma`; `gamma = 1` is the isothermal case.
    Isentropic {
        a: f64,
        gamma: f64,
    },
    Tabulated(TabulatedLaw),
}

/// Config form of a pressure law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PressureLawSpec {
    Isentropic {
        a: f64,
        gamma: f64,
    },
    Tabulated {
        path: String,
        #[serde(default)]
        monotone: bool,
    },
}

impl PressureLawSpec {
    pub fn build(&self, base_dir: Option<&std::path::Path>) -> Result<PressureLaw> {
        match self {
            PressureLawSpec::Isentropic { a, gamma } => PressureLaw::isentropic(*a, *gamma),
            PressureLawSpec::Tabulated { path, monotone } => {
                let p = std::path::Path::new(path);
                let p = match base_dir {
                    Some(dir) if p.is_relative() => dir.join(p),
                    _ => p.to_path_buf(),
                };
                Ok(PressureLaw::Tabulated(TabulatedLaw::from_csv(p, *monotone)?))
            }
        }
    }
}

impl PressureLaw {
    pub fn isentropic(a: f64, gamma: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::Param(format!("pressure constant a = {a} must be positive")));
        }
        if !(gamma.is_finite() && gamma >= 1.0) {
            return Err(Error::Param(format!("adiabatic exponent gamma = {gamma} must be >= 1")));
        }
        Ok(PressureLaw::Isentropic { a, gamma })
    }

    /// `(a, gamma)` for isentropic laws.
    pub fn isentropic_params(&self) -> Option<(f64, f64)> {
        match self {
            PressureLaw::Isentropic { a, gamma } => Some((*a, *gamma)),
            PressureLaw::Tabulated(_) => None,
        }
    }

    /// Pressure for `rho >= 0`; negative input is treated as vacuum.
    #[inline]
    pub fn p(&self, rho: f64) -> f64 {
        let rho = rho.max(0.0);
        match self {
            PressureLaw::Isentropic { a, gamma } => {
                if *gamma == 2.0 {
                    a * rho * rho
                } else if *gamma == 1.0 {
                    a * rho
                } else {
                    a * rho.powf(*gamma)
                }
            }
            PressureLaw::Tabulated(t) => t.pressure(rho),
        }
    }

    /// `p'(rho)`, evaluated at `max(rho, 0)`.
    #[inline]
    pub fn dp(&self, rho: f64) -> f64 {
        let rho = rho.max(0.0);
        match self {
            PressureLaw::Isentropic { a, gamma } => {
                if *gamma == 2.0 {
                    2.0 * a * rho
                } else if *gamma == 1.0 {
                    *a
                } else {
                    a * gamma * rho.powf(gamma - 1.0)
                }
            }
            PressureLaw::Tabulated(t) => t.dpressure(rho),
        }
    }

    #[inline]
    pub fn sound_speed(&self, rho: f64) -> f64 {
        self.dp(rho).max(0.0).sqrt()
    }

    /// Pressure potential `P` solving `P' rho - P = p` with `P(0) = 0`.
    pub fn potential(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        match self {
            PressureLaw::Isentropic { a, gamma } => {
                if *gamma == 1.0 {
                    a * rho * rho.ln()
                } else {
                    self.p(rho) / (gamma - 1.0)
                }
            }
            PressureLaw::Tabulated(t) => t.potential(rho),
        }
    }

    /// Density after moving the specific enthalpy `h(rho) = int p'(s)/s ds`
    /// by `dh <= 0`, clipped at vacuum. Used by the hydrostatic
    /// reconstruction in the flux.
    #[inline]
    pub(crate) fn lower_enthalpy(&self, rho: f64, dh: f64) -> f64 {
        if dh >= 0.0 || rho <= 0.0 {
            return rho;
        }
        match self {
            PressureLaw::Isentropic { a, gamma } => {
                if *gamma == 1.0 {
                    rho * (dh / a).exp()
                } else {
                    let h = a * gamma / (gamma - 1.0) * rho.powf(gamma - 1.0);
                    let ratio = (1.0 + dh / h).max(0.0);
                    if *gamma == 2.0 {
                        rho * ratio
                    } else {
                        rho * ratio.powf(1.0 / (gamma - 1.0))
                    }
                }
            }
            PressureLaw::Tabulated(t) => {
                // linearised: d rho = rho dh / p'
                let c2 = t.dpressure(rho);
                if c2 > 0.0 {
                    (rho + rho * dh / c2).max(0.0)
                } else {
                    rho
                }
            }
        }
    }
}

/// `p(rho)`; rejects negative density.
pub fn pressure(rho: f64, law: &PressureLaw) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::Param(format!("pressure of negative density {rho}")));
    }
    Ok(law.p(rho))
}

/// `p'(rho)` for `rho > 0`.
pub fn dpressure(rho: f64, law: &PressureLaw) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Param(format!("pressure derivative needs rho > 0, got {rho}")));
    }
    Ok(law.dp(rho))
}

/// `sqrt(max(p'(rho), 0))`; non-monotone laws are clamped to zero.
pub fn sound_speed(rho: f64, law: &PressureLaw) -> f64 {
    law.sound_speed(rho)
}

pub fn pressure_potential(rho: f64, law: &PressureLaw) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::Param(format!("pressure potential of negative density {rho}")));
    }
    Ok(law.potential(rho))
}
