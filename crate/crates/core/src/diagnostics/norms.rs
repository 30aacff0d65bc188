use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;

/// Identifier written into probe outputs next to weak-pairing values.
pub const TEST_FAMILY_VERSION: &str = "trig4-v1";

/// `(int |a - b|^alpha dx)^(1/alpha)` by the midpoint rule.
pub fn lp_distance(a: &ScalarField, b: &ScalarField, alpha: f64) -> Result<f64> {
    Ok(lp_distance_pow(a, b, alpha)?.powf(1.0 / alpha))
}

/// `int |a - b|^alpha dx` without the final root.
pub fn lp_distance_pow(a: &ScalarField, b: &ScalarField, alpha: f64) -> Result<f64> {
    let grid = a.grid();
    if !grid.compatible(b.grid()) {
        return Err(Error::FieldShape("L^p distance between fields on different grids".into()));
    }
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::Param(format!("L^p exponent {alpha} must be >= 1")));
    }
    let (av, bv) = (a.values(), b.values());
    let sum: f64 = if alpha == 1.0 {
        grid.interior().map(|i| (av[i] - bv[i]).abs()).sum()
    } else if alpha == 2.0 {
        grid.interior().map(|i| (av[i] - bv[i]).powi(2)).sum()
    } else {
        grid.interior().map(|i| (av[i] - bv[i]).abs().powf(alpha)).sum()
    };
    Ok(sum * grid.cell_volume())
}

/// `int |a - b| dx` with the pointwise Euclidean magnitude.
pub fn l1_distance_vec(a: &VectorField, b: &VectorField) -> Result<f64> {
    let grid = a.grid();
    if !grid.compatible(b.grid()) {
        return Err(Error::FieldShape("L1 distance between fields on different grids".into()));
    }
    let sum: f64 = grid
        .interior()
        .map(|i| (0..grid.dim()).map(|k| (a.component(k)[i] - b.component(k)[i]).powi(2)).sum::<f64>().sqrt())
        .sum();
    Ok(sum * grid.cell_volume())
}

/// `int (a - b) . phi dx` by the midpoint rule.
pub fn weak_pairing(a: &VectorField, b: &VectorField, phi: &VectorField) -> Result<f64> {
    let grid = a.grid();
    if !grid.compatible(b.grid()) || !grid.compatible(phi.grid()) {
        return Err(Error::FieldShape("weak pairing of fields on different grids".into()));
    }
    let mut sum = 0.0;
    for idx in grid.interior() {
        for k in 0..grid.dim() {
            sum += (a.component(k)[idx] - b.component(k)[idx]) * phi.component(k)[idx];
        }
    }
    Ok(sum * grid.cell_volume())
}

/// Fixed test functions for weak pairings: for each component `k`, axis `e`
/// and mode `m = 1..=4`, the field `e_k sin(m pi x_e / L_e)`.
pub fn trig_test_family(grid: &Grid) -> Vec<VectorField> {
    let mut out = Vec::new();
    for k in 0..grid.dim() {
        for e in 0..grid.dim() {
            let len = grid.extents()[e];
            for m in 1..=4 {
                let field = VectorField::from_fn(*grid, |x| {
                    let mut v = [0.0; 2];
                    v[k] = (m as f64 * PI * x[e] / len).sin();
                    v
                })
                .expect("trigonometric test functions are finite");
                out.push(field);
            }
        }
    }
    out
}

/// Largest `|int (a - b) . phi|` over the test family.
pub fn max_weak_distance(a: &VectorField, b: &VectorField, family: &[VectorField]) -> Result<f64> {
    family
        .iter()
        .map(|phi| weak_pairing(a, b, phi).map(f64::abs))
        .try_fold(0.0_f64, |acc, v| v.map(|v| acc.max(v)))
}
