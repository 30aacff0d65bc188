use crate::error::{Error, Result};
use crate::solver::{fill_ghosts, FaceFlux};
use crate::state::State;

/// Admissible renormalization `b`: identity up to `M`, a cubic Hermite ramp
/// on `[M, 2M]` ending at `b(2M) = 3M/2` with zero slope, constant beyond.
/// On the ramp `b'(rho) = 2 - rho/M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormFunction {
    level: f64,
}

impl RenormFunction {
    pub fn new(level: f64) -> Result<Self> {
        if !(level > 0.0 && level.is_finite()) {
            return Err(Error::Param(format!("truncation level {level} must be positive")));
        }
        Ok(RenormFunction { level })
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn b(&self, rho: f64) -> f64 {
        let m = self.level;
        if rho <= m {
            rho
        } else if rho >= 2.0 * m {
            1.5 * m
        } else {
            let t = (rho - m) / m;
            m + m * (t - 0.5 * t * t)
        }
    }

    pub fn db(&self, rho: f64) -> f64 {
        let m = self.level;
        if rho <= m {
            1.0
        } else if rho >= 2.0 * m {
            0.0
        } else {
            1.0 - (rho - m) / m
        }
    }

    /// `b(rho) / rho`, continuous to 1 at vacuum.
    fn ratio(&self, rho: f64) -> f64 {
        if rho <= self.level {
            1.0
        } else {
            self.b(rho) / rho
        }
    }
}

/// L1 norm of the discrete residual of
/// `d_t b(rho) + div(b(rho) u) + (b'(rho) rho - b(rho)) div u = 0`
/// between two consecutive states.
///
/// `transport` is the face mass flux that carried `prev` into `next`
/// (see [`crate::solver::Stepper::last_mass_flux`]). The flux of `b(rho) u`
/// is that mass flux times the upwind value of `b(rho)/rho`, so wherever
/// `b` is the identity the residual reduces to the discrete continuity
/// equation. `div u` uses face-averaged velocities of the mean state.
pub fn renorm_residual(
    prev: &State,
    next: &State,
    transport: &FaceFlux,
    bfun: &RenormFunction,
    floor: f64,
) -> Result<f64> {
    let grid = *prev.grid();
    if !grid.compatible(next.grid()) || !grid.compatible(transport.grid()) {
        return Err(Error::FieldShape("renormalization inputs on different grids".into()));
    }
    let dt = next.time - prev.time;
    if !(dt > 0.0) {
        return Err(Error::Param(format!("states must be ordered in time (dt = {dt})")));
    }
    let dim = grid.dim();
    let mut a = prev.clone();
    let mut b = next.clone();
    fill_ghosts(&mut a);
    fill_ghosts(&mut b);
    let ua = a.velocity(floor);
    let ub = b.velocity(floor);
    let rho = a.rho.values();

    let b_flux = |d: usize, l: usize| -> f64 {
        let g = transport.axis(d)[l];
        let upwind = if g >= 0.0 { l } else { l + grid.stride(d) };
        bfun.ratio(rho[upwind]) * g
    };

    let mut total = 0.0;
    for idx in grid.interior() {
        let r0 = a.rho.get(idx);
        let r1 = b.rho.get(idx);
        let mut res = (bfun.b(r1) - bfun.b(r0)) / dt;
        let mut div_u = 0.0;
        for d in 0..dim {
            let s = grid.stride(d);
            let dx = grid.dx()[d];
            res += (b_flux(d, idx) - b_flux(d, idx - s)) / dx;
            let um = |i: usize| 0.5 * (ua.component(d)[i] + ub.component(d)[i]);
            let right = 0.5 * (um(idx) + um(idx + s));
            let left = 0.5 * (um(idx - s) + um(idx));
            div_u += (right - left) / dx;
        }
        let rm = 0.5 * (r0 + r1);
        res += (bfun.db(rm) * rm - bfun.b(rm)) * div_u;
        total += res.abs();
    }
    Ok(total * grid.cell_volume())
}
