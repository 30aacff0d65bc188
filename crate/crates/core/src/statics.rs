//! Static density profiles under potential forcing `f = grad F`.
//!
//! On its support a static profile solves `a grad rho^gamma = rho grad F`, whose
//! first integral is `a gamma/(gamma-1) rho^(gamma-1) = F - c`. Hence
//! `rho_s = [(gamma-1)/(a gamma) (F - c)_+]^(1/(gamma-1))`, and the constant `c`
//! is fixed by prescribing the total mass.

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid;

pub const MAX_BISECTION_ITERATIONS: usize = 200;
pub const DEFAULT_LEVELS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct StaticSolution {
    pub rho: ScalarField,
    pub c: f64,
    /// `int rho_s dx - m`
    pub mass_error: f64,
    pub support_connected: bool,
}

/// Static profile for a given constant `c`.
pub fn static_profile(potential: &ScalarField, c: f64, a: f64, gamma: f64) -> ScalarField {
    let scale = (gamma - 1.0) / (a * gamma);
    let expo = 1.0 / (gamma - 1.0);
    let vals = potential
        .values()
        .iter()
        .map(|f| {
            let base = scale * (f - c).max(0.0);
            if expo == 1.0 {
                base
            } else {
                base.powf(expo)
            }
        })
        .collect();
    ScalarField::from_values(*potential.grid(), vals).expect("profile of a finite potential")
}

fn profile_mass(potential: &ScalarField, c: f64, a: f64, gamma: f64) -> f64 {
    let grid = potential.grid();
    let scale = (gamma - 1.0) / (a * gamma);
    let expo = 1.0 / (gamma - 1.0);
    let sum: f64 = grid
        .interior()
        .map(|i| {
            let base = scale * (potential.get(i) - c).max(0.0);
            if expo == 1.0 {
                base
            } else {
                base.powf(expo)
            }
        })
        .sum();
    sum * grid.cell_volume()
}

/// Mass-constrained static profile. The mass map `c -> int rho_s(c)` is
/// continuous and non-increasing, so `c` is found by bisection on
/// `[min F - K, max F]` where `K = a gamma/(gamma-1) (m/|Omega|)^(gamma-1)`
/// guarantees enough mass at the lower end.
pub fn solve_static(
    potential: &ScalarField,
    mass: f64,
    a: f64,
    gamma: f64,
    tol: f64,
) -> Result<StaticSolution> {
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::Param(format!("static problem needs gamma > 1, got {gamma}")));
    }
    if !(a > 0.0 && mass > 0.0 && tol > 0.0) {
        return Err(Error::Param(format!(
            "static problem needs a > 0, m > 0, tol > 0 (a = {a}, m = {mass}, tol = {tol})"
        )));
    }
    let (fmin, fmax) = (potential.min_interior(), potential.max_interior());
    let grid = potential.grid();
    let k = a * gamma / (gamma - 1.0) * (mass / grid.volume()).powf(gamma - 1.0);
    let mut lo = fmin - k;
    let mut hi = fmax;
    let mut converged = false;
    for _ in 0..MAX_BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            converged = true;
            break;
        }
        if profile_mass(potential, mid, a, gamma) >= mass {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (m_lo, m_hi) = (profile_mass(potential, lo, a, gamma), profile_mass(potential, hi, a, gamma));
    let c = if (m_lo - mass).abs() <= (m_hi - mass).abs() { lo } else { hi };
    let rho = static_profile(potential, c, a, gamma);
    let mass_error = rho.integral() - mass;
    if !converged && mass_error.abs() > tol * mass {
        return Err(Error::NoConvergence { iterations: MAX_BISECTION_ITERATIONS });
    }
    if mass_error.abs() > tol * mass {
        return Err(Error::Param(format!(
            "mass cannot be matched to relative tolerance {tol} (error {mass_error})"
        )));
    }
    let support_connected = check_level_sets(potential, DEFAULT_LEVELS).connected_all;
    Ok(StaticSolution { rho, c, mass_error, support_connected })
}

/// Number of face-connected components of `{F > k}` among interior cells.
pub fn superlevel_components(potential: &ScalarField, k: f64) -> usize {
    let grid = *potential.grid();
    let inside = |idx: usize| grid.is_interior(idx) && potential.get(idx) > k;
    let mut uf = UnionFind::<usize>::new(grid.len());
    for idx in grid.interior() {
        if !inside(idx) {
            continue;
        }
        for d in 0..grid.dim() {
            let nb = idx + grid.stride(d);
            if inside(nb) {
                uf.union(idx, nb);
            }
        }
    }
    let mut roots: Vec<usize> = grid.interior().filter(|&i| inside(i)).map(|i| uf.find(i)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSetReport {
    pub levels: usize,
    pub connected_all: bool,
    /// Smallest sampled `k` whose superlevel set has several components.
    pub first_disconnected_level: Option<f64>,
    pub max_components: usize,
}

/// Samples `levels` thresholds strictly between `min F` and `max F`,
/// `k_j = min + (j + 1)/(levels + 1) (max - min)`, and checks that each
/// superlevel set `{F > k_j}` is connected.
pub fn check_level_sets(potential: &ScalarField, levels: usize) -> LevelSetReport {
    let levels = levels.max(1);
    let (fmin, fmax) = (potential.min_interior(), potential.max_interior());
    let mut first = None;
    let mut max_components = 0;
    for j in 0..levels {
        let k = fmin + (j as f64 + 1.0) / (levels as f64 + 1.0) * (fmax - fmin);
        let n = superlevel_components(potential, k);
        max_components = max_components.max(n);
        if n > 1 && first.is_none() {
            first = Some(k);
        }
    }
    LevelSetReport { levels, connected_all: first.is_none(), first_disconnected_level: first, max_components }
}

/// L1 norm of `a grad(rho^gamma) - rho grad F` with central differences,
/// over interior cells whose stencil lies inside the grid and inside the
/// support of `rho`. Cells next to the support boundary are skipped.
pub fn static_residual(sol: &StaticSolution, potential: &ScalarField, a: f64, gamma: f64) -> f64 {
    let grid = *potential.grid();
    let rho = sol.rho.values();
    let f = potential.values();
    let mut total = 0.0;
    for idx in grid.interior() {
        if !stencil_in_support(&grid, rho, idx) {
            continue;
        }
        let mut sq = 0.0;
        for d in 0..grid.dim() {
            let s = grid.stride(d);
            let h = 2.0 * grid.dx()[d];
            let lhs = a * (rho[idx + s].powf(gamma) - rho[idx - s].powf(gamma)) / h;
            let rhs = rho[idx] * (f[idx + s] - f[idx - s]) / h;
            sq += (lhs - rhs).powi(2);
        }
        total += sq.sqrt();
    }
    total * grid.cell_volume()
}

fn stencil_in_support(grid: &Grid, rho: &[f64], idx: usize) -> bool {
    if rho[idx] <= 0.0 {
        return false;
    }
    (0..grid.dim()).all(|d| {
        let s = grid.stride(d);
        let (lo, hi) = (idx - s, idx + s);
        grid.is_interior(lo) && grid.is_interior(hi) && rho[lo] > 0.0 && rho[hi] > 0.0
    })
}
