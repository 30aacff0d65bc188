use serde::{Deserialize, Serialize};

use crate::constitutive::{PressureLaw, Viscosity};
use crate::error::{Error, Result};
use crate::solver::{fill_ghosts, Forcing};
use crate::state::State;

/// Energy budget of one state. `total = kinetic + potential`, with kinetic
/// energy `1/2 |q|^2 / rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub time: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub total: f64,
    /// `int mu |grad u|^2 + (lambda + mu) |div u|^2`
    pub dissipation: f64,
    /// `int rho f . u`
    pub power: f64,
}

/// Kinetic and potential energy; dissipation and power are left at zero.
pub fn total_energy(state: &State, law: &PressureLaw, floor: f64) -> EnergyRecord {
    let grid = state.grid();
    let mut kinetic = 0.0;
    let mut potential = 0.0;
    for idx in grid.interior() {
        let r = state.rho.get(idx);
        kinetic += 0.5 * state.mom.norm_sq_at(idx) / r.max(floor);
        potential += law.potential(r);
    }
    let vol = grid.cell_volume();
    let (kinetic, potential) = (kinetic * vol, potential * vol);
    EnergyRecord {
        time: state.time,
        kinetic,
        potential,
        total: kinetic + potential,
        dissipation: 0.0,
        power: 0.0,
    }
}

/// `mu ||grad u||^2 + (lambda + mu) ||div u||^2` with central differences on
/// `u = q / max(rho, floor)`. Wall neighbours come from the odd ghost
/// reflection, which places `u = 0` on the wall.
pub fn dissipation_rate(state: &State, visc: &Viscosity, floor: f64) -> f64 {
    let mut s = state.clone();
    fill_ghosts(&mut s);
    let u = s.velocity(floor);
    let grid = *state.grid();
    let dim = grid.dim();
    let mut grad_sq = 0.0;
    let mut div_sq = 0.0;
    for idx in grid.interior() {
        let mut div = 0.0;
        for e in 0..dim {
            let se = grid.stride(e);
            let h = 2.0 * grid.dx()[e];
            for k in 0..dim {
                let uk = u.component(k);
                let d = (uk[idx + se] - uk[idx - se]) / h;
                grad_sq += d * d;
                if k == e {
                    div += d;
                }
            }
        }
        div_sq += div * div;
    }
    let vol = grid.cell_volume();
    (visc.mu() * grad_sq + (visc.lambda() + visc.mu()) * div_sq) * vol
}

/// `int rho f(t) . u = int f(t) . q`.
pub fn forcing_power(state: &State, forcing: &Forcing) -> f64 {
    let grid = state.grid();
    let dim = grid.dim();
    let mut w = 0.0;
    for idx in grid.interior() {
        let f = forcing.at(state.time, idx);
        let q = state.mom.at(idx);
        for k in 0..dim {
            w += f[k] * q[k];
        }
    }
    w * grid.cell_volume()
}

/// Full budget: energy, dissipation rate and forcing power.
pub fn energy_record(
    state: &State,
    law: &PressureLaw,
    visc: &Viscosity,
    forcing: &Forcing,
    floor: f64,
) -> EnergyRecord {
    let mut rec = total_energy(state, law, floor);
    rec.dissipation = dissipation_rate(state, visc, floor);
    rec.power = forcing_power(state, forcing);
    rec
}

/// Per-interval residuals of the energy inequality
/// `dE/dt + D - W <= 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualSeries {
    pub residuals: Vec<f64>,
    /// Largest signed residual.
    pub max: f64,
    /// Largest residual magnitude.
    pub max_abs: f64,
}

/// `r_k = (E_{k+1} - E_k)/(t_{k+1} - t_k) + (D_k + D_{k+1})/2 - (W_k + W_{k+1})/2`.
pub fn energy_inequality_residual(records: &[EnergyRecord]) -> Result<ResidualSeries> {
    if records.len() < 2 {
        return Err(Error::Param("energy residual needs at least two records".into()));
    }
    let mut residuals = Vec::with_capacity(records.len() - 1);
    for w in records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dt = b.time - a.time;
        if !(dt > 0.0) {
            return Err(Error::Param(format!(
                "energy records must have increasing times ({} then {})",
                a.time, b.time
            )));
        }
        let r = (b.total - a.total) / dt + 0.5 * (a.dissipation + b.dissipation) - 0.5 * (a.power + b.power);
        residuals.push(r);
    }
    let max = residuals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_abs = residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
    Ok(ResidualSeries { residuals, max, max_abs })
}
