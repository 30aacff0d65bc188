//! One explicit conservative update.
//!
//! Fluxes are assembled face by face. The hyperbolic part `(q, q (x) u + p I)`
//! uses a Rusanov flux on hydrostatically reconstructed densities: across a
//! face the force supplies an enthalpy increment `dh`, and the side lying
//! higher in enthalpy is lowered by it, so that in a discrete equilibrium of
//! `grad p = rho f` the two reconstructed densities agree.
//!
//! Under potential forcing `f = grad F` the increment is `F_R - F_L` and the
//! whole flux uses the reconstructed states, with the force entering only
//! through the pressure corrections `p(rho_i) - p(rho_i*)` at each face of
//! cell `i`. The static profiles `h(rho) = F - c` are then exact discrete
//! equilibria. For other forcing `dh = dx (f_L + f_R)/2` enters the
//! numerical diffusion only, and the force is a centered source `rho_i f_i`.
//! With `f = 0` both reduce to the plain Rusanov flux.
//!
//! The viscous term is `div S` with `S` from [`viscous_stress`], using compact
//! normal derivatives and averaged central tangential derivatives at faces.
//! No-slip walls are imposed by ghost cells: density is reflected evenly and
//! momentum oddly, so the wall mass flux vanishes identically.

use crate::constitutive::{viscous_stress, Tensor};
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::grid::Grid;
use crate::state::State;

use super::forcing::Forcing;
use super::scheme::{FluidParams, Integrator, SchemeConfig};

/// Counters accumulated over the steps taken by one [`Stepper`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub steps: u64,
    /// Cells whose density was raised to the vacuum floor.
    pub clamps: u64,
    /// Cell evaluations where `p'(rho) < 0` forced a zero sound speed.
    pub negative_dp: u64,
    pub last_dt: f64,
}

/// Fluxes on the faces of a grid. `axes[d][l]` is the flux through the face
/// between stored cell `l` and its neighbour `l + stride(d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceFlux {
    grid: Grid,
    axes: Vec<Vec<f64>>,
}

impl FaceFlux {
    pub fn zeros(grid: Grid) -> Self {
        FaceFlux { grid, axes: vec![vec![0.0; grid.len()]; grid.dim()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn axis(&self, d: usize) -> &[f64] {
        &self.axes[d]
    }

    /// Discrete divergence at a stored interior cell.
    pub fn divergence(&self, idx: usize) -> f64 {
        (0..self.grid.dim())
            .map(|d| {
                let s = self.grid.stride(d);
                (self.axes[d][idx] - self.axes[d][idx - s]) / self.grid.dx()[d]
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Terms {
    pub convective: bool,
    pub viscous: bool,
    pub source: bool,
}

impl Terms {
    const ALL: Terms = Terms { convective: true, viscous: true, source: true };
}

/// Scratch space for stepping states on one grid.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid,
    u: Vec<Vec<f64>>,
    p: Vec<f64>,
    c: Vec<f64>,
    force: Vec<Vec<f64>>,
    face_rho: Vec<Vec<f64>>,
    face_mom: Vec<Vec<Vec<f64>>>,
    rhs_rho: Vec<f64>,
    rhs_mom: Vec<Vec<f64>>,
    stage: Option<State>,
    mass_flux: FaceFlux,
    stats: StepStats,
}

/// Even reflection of density and odd reflection of momentum into every
/// ghost layer. Axis 0 is filled first so that axis 1 also fills corners.
pub fn fill_ghosts(state: &mut State) {
    let grid = *state.grid();
    let dim = grid.dim();
    let g = grid.ghost();
    let rho = state.rho.values_mut();
    for axis in 0..dim {
        let n = grid.cells()[axis];
        let s = grid.stride(axis);
        let lines = if dim == 2 { grid.padded(1 - axis) } else { 1 };
        for o in 0..lines {
            let base = if axis == 0 { grid.index(0, o) } else { grid.index(o, 0) };
            for l in 0..g {
                let (gl, il) = (base + (g - 1 - l) * s, base + (g + l) * s);
                let (gr, ir) = (base + (g + n + l) * s, base + (g + n - 1 - l) * s);
                rho[gl] = rho[il];
                rho[gr] = rho[ir];
            }
        }
    }
    for k in 0..dim {
        let q = state.mom.component_mut(k);
        for axis in 0..dim {
            let n = grid.cells()[axis];
            let s = grid.stride(axis);
            let lines = if dim == 2 { grid.padded(1 - axis) } else { 1 };
            for o in 0..lines {
                let base = if axis == 0 { grid.index(0, o) } else { grid.index(o, 0) };
                for l in 0..g {
                    let (gl, il) = (base + (g - 1 - l) * s, base + (g + l) * s);
                    let (gr, ir) = (base + (g + n + l) * s, base + (g + n - 1 - l) * s);
                    q[gl] = -q[il];
                    q[gr] = -q[ir];
                }
            }
        }
    }
}

/// Largest stable step: `cfl * min(dx/(|u| + c_s), dx^2 rho / (2 d (2 mu + lambda)))`
/// over interior cells, `dx` the smallest spacing and `rho` floored.
pub fn stable_dt(state: &State, params: &FluidParams, scheme: &SchemeConfig) -> f64 {
    let grid = state.grid();
    let dx = grid.min_dx();
    let d = grid.dim() as f64;
    let nu = params.viscosity.longitudinal();
    let floor = scheme.vacuum_floor;
    let mut dt = f64::INFINITY;
    for idx in grid.interior() {
        let r = state.rho.get(idx).max(floor);
        let u = state.mom.norm_sq_at(idx).sqrt() / r;
        let c = params.law.sound_speed(r);
        let adv = dx / (u + c);
        let visc = dx * dx * r / (2.0 * d * nu);
        dt = dt.min(adv).min(visc);
    }
    scheme.cfl * dt
}

impl Stepper {
    pub fn new(grid: Grid) -> Self {
        let n = grid.len();
        let dim = grid.dim();
        Stepper {
            grid,
            u: vec![vec![0.0; n]; dim],
            p: vec![0.0; n],
            c: vec![0.0; n],
            force: vec![vec![0.0; n]; dim],
            face_rho: vec![vec![0.0; n]; dim],
            face_mom: vec![vec![vec![0.0; n]; dim]; dim],
            rhs_rho: vec![0.0; n],
            rhs_mom: vec![vec![0.0; n]; dim],
            stage: None,
            mass_flux: FaceFlux::zeros(grid),
            stats: StepStats::default(),
        }
    }

    pub fn stats(&self) -> StepStats {
        self.stats
    }

    /// Time-averaged face mass flux of the last step:
    /// `rho_new = rho_old - dt * div(flux)` on interior cells.
    pub fn last_mass_flux(&self) -> &FaceFlux {
        &self.mass_flux
    }

    /// Spatial operator `L(U, t)` into `rhs_*`; ghosts of `st` must be filled.
    pub(crate) fn evaluate(
        &mut self,
        st: &State,
        t: f64,
        params: &FluidParams,
        forcing: &Forcing,
        floor: f64,
        terms: Terms,
    ) {
        let grid = self.grid;
        let dim = grid.dim();
        let rho = st.rho.values();
        let law = &params.law;

        for idx in 0..grid.len() {
            let r = rho[idx];
            let rf = r.max(floor);
            for k in 0..dim {
                self.u[k][idx] = st.mom.component(k)[idx] / rf;
            }
            self.p[idx] = law.p(r);
            let dp = law.dp(rf);
            if dp < 0.0 && grid.is_interior(idx) {
                self.stats.negative_dp += 1;
            }
            self.c[idx] = dp.max(0.0).sqrt();
        }
        forcing.fill(t, &mut self.force);
        let potential = forcing.potential().map(|f| f.values());

        self.rhs_rho.iter_mut().for_each(|v| *v = 0.0);
        for r in self.rhs_mom.iter_mut() {
            r.iter_mut().for_each(|v| *v = 0.0);
        }

        let g = grid.ghost();
        for d in 0..dim {
            let s = grid.stride(d);
            let dx = grid.dx()[d];
            let n = grid.cells()[d];
            let other = if dim == 2 { grid.interior_range(1 - d) } else { 0..1 };
            for o in other {
                for i in g - 1..g + n {
                    let l = if d == 0 { grid.index(i, o) } else { grid.index(o, i) };
                    let r = l + s;
                    let wall = i == g - 1 || i == g + n - 1;
                    let mut fr = 0.0;
                    let mut fm = [0.0; 2];
                    if terms.convective {
                        match potential {
                            Some(pot) if terms.source => {
                                let (cl, cr) =
                                    self.balanced_flux(st, law, pot, d, l, r, wall, &mut fr, &mut fm);
                                self.rhs_mom[d][l] -= cl / dx;
                                self.rhs_mom[d][r] += cr / dx;
                            }
                            _ => self.convective_flux(st, law, d, l, r, dx, wall, &mut fr, &mut fm),
                        }
                    }
                    if terms.viscous {
                        let stress = self.face_stress(d, l, r, params);
                        for k in 0..dim {
                            fm[k] -= stress.m[d][k];
                        }
                    }
                    self.face_rho[d][l] = fr;
                    for k in 0..dim {
                        self.face_mom[d][k][l] = fm[k];
                    }
                }
            }
            for idx in grid.interior() {
                self.rhs_rho[idx] += (self.face_rho[d][idx - s] - self.face_rho[d][idx]) / dx;
                for k in 0..dim {
                    self.rhs_mom[k][idx] += (self.face_mom[d][k][idx - s] - self.face_mom[d][k][idx]) / dx;
                }
            }
        }

        if terms.source && potential.is_none() {
            for idx in grid.interior() {
                for k in 0..dim {
                    self.rhs_mom[k][idx] += rho[idx] * self.force[k][idx];
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    #[inline]
    fn convective_flux(
        &self,
        st: &State,
        law: &crate::constitutive::PressureLaw,
        d: usize,
        l: usize,
        r: usize,
        dx: f64,
        wall: bool,
        fr: &mut f64,
        fm: &mut [f64; 2],
    ) {
        let rho = st.rho.values();
        let (rl, rr) = (rho[l], rho[r]);
        let (ul, ur) = (self.u[d][l], self.u[d][r]);
        let speed = (ul.abs() + self.c[l]).max(ur.abs() + self.c[r]);
        let dh = if wall { 0.0 } else { 0.5 * (self.force[d][l] + self.force[d][r]) * dx };
        let (rls, rrs) =
            if dh > 0.0 { (rl, law.lower_enthalpy(rr, -dh)) } else { (law.lower_enthalpy(rl, dh), rr) };
        let ql = st.mom.component(d)[l];
        let qr = st.mom.component(d)[r];
        *fr = 0.5 * (ql + qr) - 0.5 * speed * (rrs - rls);
        for (k, out) in fm.iter_mut().enumerate().take(self.u.len()) {
            let qkl = st.mom.component(k)[l];
            let qkr = st.mom.component(k)[r];
            let mut flux = 0.5 * (qkl * ul + qkr * ur);
            if k == d {
                flux += 0.5 * (self.p[l] + self.p[r]);
            }
            *out = flux - 0.5 * speed * (rrs * self.u[k][r] - rls * self.u[k][l]);
        }
    }

    /// Rusanov flux on the states reconstructed from the potential, and the
    /// pressure corrections `p - p*` it implies for the cells on the left and
    /// right of the face.
    #[allow(clippy::too_many_arguments)]
    #[inline]
    fn balanced_flux(
        &self,
        st: &State,
        law: &crate::constitutive::PressureLaw,
        potential: &[f64],
        d: usize,
        l: usize,
        r: usize,
        wall: bool,
        fr: &mut f64,
        fm: &mut [f64; 2],
    ) -> (f64, f64) {
        let rho = st.rho.values();
        let (rl, rr) = (rho[l], rho[r]);
        let dh = if wall { 0.0 } else { potential[r] - potential[l] };
        let (rls, rrs) =
            if dh > 0.0 { (rl, law.lower_enthalpy(rr, -dh)) } else { (law.lower_enthalpy(rl, dh), rr) };
        let (pls, prs) = if dh > 0.0 { (self.p[l], law.p(rrs)) } else { (law.p(rls), self.p[r]) };
        let (ul, ur) = (self.u[d][l], self.u[d][r]);
        let speed = (ul.abs() + self.c[l]).max(ur.abs() + self.c[r]);
        *fr = 0.5 * (rls * ul + rrs * ur) - 0.5 * speed * (rrs - rls);
        for (k, out) in fm.iter_mut().enumerate().take(self.u.len()) {
            let (ukl, ukr) = (self.u[k][l], self.u[k][r]);
            let mut flux = 0.5 * (rls * ukl * ul + rrs * ukr * ur);
            if k == d {
                flux += 0.5 * (pls + prs);
            }
            *out = flux - 0.5 * speed * (rrs * ukr - rls * ukl);
        }
        (self.p[l] - pls, self.p[r] - prs)
    }

    /// Stress tensor on the face between `l` and `r = l + stride(d)`.
    #[inline]
    fn face_stress(&self, d: usize, l: usize, r: usize, params: &FluidParams) -> Tensor {
        let grid = &self.grid;
        let dim = grid.dim();
        // grad[k][e] = d u_k / d x_e
        let mut grad = [[0.0; 2]; 2];
        for k in 0..dim {
            let u = &self.u[k];
            for e in 0..dim {
                grad[k][e] = if e == d {
                    (u[r] - u[l]) / grid.dx()[d]
                } else {
                    let se = grid.stride(e);
                    (u[l + se] - u[l - se] + u[r + se] - u[r - se]) / (4.0 * grid.dx()[e])
                };
            }
        }
        viscous_stress(&Tensor::new(dim, grad), &params.viscosity)
    }

    /// Raises sub-floor densities, zeroes momentum on vacuum cells, and
    /// returns the first interior cell holding a non-finite value.
    fn finalize(&mut self, st: &mut State, floor: f64) -> Option<usize> {
        let grid = self.grid;
        let dim = grid.dim();
        let mut bad = None;
        for idx in grid.interior() {
            let r = st.rho.get(idx);
            let finite = r.is_finite() && (0..dim).all(|k| st.mom.component(k)[idx].is_finite());
            if !finite {
                bad.get_or_insert(idx);
                continue;
            }
            if r < floor {
                st.rho.values_mut()[idx] = floor;
                self.stats.clamps += 1;
            }
            if st.rho.get(idx) <= floor {
                for k in 0..dim {
                    st.mom.component_mut(k)[idx] = 0.0;
                }
            }
        }
        bad
    }

    fn nonfinite_error(
        &mut self,
        pre: &State,
        t: f64,
        params: &FluidParams,
        forcing: &Forcing,
        floor: f64,
        cell: usize,
    ) -> Error {
        let candidates = [
            ("convective flux", Terms { convective: true, viscous: false, source: false }),
            ("viscous stress", Terms { convective: false, viscous: true, source: false }),
            ("forcing source", Terms { convective: false, viscous: false, source: true }),
        ];
        let mut term = "state update";
        if !(pre.rho.get(cell).is_finite()
            && (0..pre.mom.dim()).all(|k| pre.mom.component(k)[cell].is_finite()))
        {
            term = "input state";
        } else {
            for (name, terms) in candidates {
                self.evaluate(pre, t, params, forcing, floor, terms);
                let ok = self.rhs_rho[cell].is_finite() && self.rhs_mom.iter().all(|m| m[cell].is_finite());
                if !ok {
                    term = name;
                    break;
                }
            }
        }
        Error::NonFinite { time: t, cell: self.grid.interior_number(cell).unwrap_or(cell), term }
    }

    /// Advances `state` by `dt` in place.
    pub fn advance(
        &mut self,
        state: &mut State,
        params: &FluidParams,
        forcing: &Forcing,
        scheme: &SchemeConfig,
        dt: f64,
    ) -> Result<()> {
        if !state.grid().compatible(&self.grid) || !forcing.grid().compatible(&self.grid) {
            return Err(Error::FieldShape("state, forcing and stepper grids differ".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Param(format!("time step {dt} must be positive")));
        }
        let floor = scheme.vacuum_floor;
        let t = state.time;
        let grid = self.grid;
        let dim = grid.dim();
        let half = match scheme.integrator {
            Integrator::ForwardEuler => 1.0,
            Integrator::SspRk2 => 0.5,
        };

        fill_ghosts(state);
        self.evaluate(state, t, params, forcing, floor, Terms::ALL);
        for d in 0..dim {
            for (avg, f) in self.mass_flux.axes[d].iter_mut().zip(&self.face_rho[d]) {
                *avg = half * f;
            }
        }

        let mut stage = match self.stage.take() {
            Some(s) => s,
            None => state.clone(),
        };
        {
            let src = state.rho.values();
            let dst = stage.rho.values_mut();
            for idx in grid.interior() {
                dst[idx] = src[idx] + dt * self.rhs_rho[idx];
            }
            for k in 0..dim {
                let src = state.mom.component(k);
                let dst = stage.mom.component_mut(k);
                for idx in grid.interior() {
                    dst[idx] = src[idx] + dt * self.rhs_mom[k][idx];
                }
            }
        }
        stage.time = t + dt;
        if let Some(cell) = self.finalize(&mut stage, floor) {
            let err = self.nonfinite_error(state, t, params, forcing, floor, cell);
            self.stage = Some(stage);
            return Err(err);
        }

        match scheme.integrator {
            Integrator::ForwardEuler => {
                std::mem::swap(state, &mut stage);
            }
            Integrator::SspRk2 => {
                fill_ghosts(&mut stage);
                self.evaluate(&stage, t + dt, params, forcing, floor, Terms::ALL);
                for d in 0..dim {
                    for (avg, f) in self.mass_flux.axes[d].iter_mut().zip(&self.face_rho[d]) {
                        *avg += 0.5 * f;
                    }
                }
                {
                    let st = stage.rho.values();
                    let dst = state.rho.values_mut();
                    for idx in grid.interior() {
                        dst[idx] = 0.5 * dst[idx] + 0.5 * (st[idx] + dt * self.rhs_rho[idx]);
                    }
                    for k in 0..dim {
                        let st = stage.mom.component(k);
                        let dst = state.mom.component_mut(k);
                        for idx in grid.interior() {
                            dst[idx] = 0.5 * dst[idx] + 0.5 * (st[idx] + dt * self.rhs_mom[k][idx]);
                        }
                    }
                }
                state.time = t + dt;
                if let Some(cell) = self.finalize(state, floor) {
                    let err = self.nonfinite_error(&stage, t + dt, params, forcing, floor, cell);
                    self.stage = Some(stage);
                    return Err(err);
                }
            }
        }
        self.stage = Some(stage);
        self.stats.steps += 1;
        self.stats.last_dt = dt;
        Ok(())
    }
}

/// One step of size `dt` from `state`, returning the new state.
pub fn step(
    state: &State,
    params: &FluidParams,
    forcing: &Forcing,
    scheme: &SchemeConfig,
    dt: f64,
) -> Result<State> {
    scheme.validate()?;
    let mut next = state.clone();
    Stepper::new(*state.grid()).advance(&mut next, params, forcing, scheme, dt)?;
    Ok(next)
}

/// Velocity `u = q / max(rho, floor)` including ghost cells.
pub fn velocity_with_ghosts(state: &State, floor: f64) -> VectorField {
    let mut s = state.clone();
    fill_ghosts(&mut s);
    s.velocity(floor)
}
