//! Cell-centered scalar and vector fields on a [`Grid`], ghost cells included.

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::FieldShape(format!("{what}: non-finite value at index {i}")));
    }
    Ok(())
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        let value = if value.is_finite() { value } else { 0.0 };
        ScalarField { grid, values: vec![value; grid.len()] }
    }

    /// Evaluates `f` at every cell center, ghosts included.
    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 2]) -> f64) -> Result<Self> {
        let values: Vec<f64> = (0..grid.len()).map(|i| f(grid.center(i))).collect();
        check_finite(&values, "scalar field")?;
        Ok(ScalarField { grid, values })
    }

    /// Full storage including ghosts.
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::FieldShape(format!(
                "expected {} stored values, got {}",
                grid.len(),
                values.len()
            )));
        }
        check_finite(&values, "scalar field")?;
        Ok(ScalarField { grid, values })
    }

    /// Interior values in storage order; ghosts are zero-initialised.
    pub fn from_interior(grid: Grid, interior: &[f64]) -> Result<Self> {
        if interior.len() != grid.interior_len() {
            return Err(Error::FieldShape(format!(
                "expected {} interior values, got {}",
                grid.interior_len(),
                interior.len()
            )));
        }
        check_finite(interior, "scalar field")?;
        let mut values = vec![0.0; grid.len()];
        for (idx, v) in grid.interior().zip(interior) {
            values[idx] = *v;
        }
        Ok(ScalarField { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn interior_values(&self) -> Vec<f64> {
        self.grid.interior().map(|i| self.values[i]).collect()
    }

    pub fn min_interior(&self) -> f64 {
        self.grid.interior().map(|i| self.values[i]).fold(f64::INFINITY, f64::min)
    }

    pub fn max_interior(&self) -> f64 {
        self.grid.interior().map(|i| self.values[i]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Midpoint-rule integral over the interior.
    pub fn integral(&self) -> f64 {
        self.grid.cell_volume() * self.grid.interior().map(|i| self.values[i]).sum::<f64>()
    }
}

/// `dim` components per cell, stored component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    comps: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        VectorField { grid, comps: vec![vec![0.0; grid.len()]; grid.dim()] }
    }

    pub fn constant(grid: Grid, value: &[f64]) -> Result<Self> {
        if value.len() != grid.dim() {
            return Err(Error::FieldShape(format!(
                "expected {} components, got {}",
                grid.dim(),
                value.len()
            )));
        }
        check_finite(value, "vector field")?;
        Ok(VectorField { grid, comps: value.iter().map(|v| vec![*v; grid.len()]).collect() })
    }

    /// Evaluates `f` at every cell center; only the first `dim` entries of the
    /// returned array are used.
    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 2]) -> [f64; 2]) -> Result<Self> {
        let mut comps = vec![vec![0.0; grid.len()]; grid.dim()];
        for i in 0..grid.len() {
            let v = f(grid.center(i));
            for (k, comp) in comps.iter_mut().enumerate() {
                comp[i] = v[k];
            }
        }
        for c in &comps {
            check_finite(c, "vector field")?;
        }
        Ok(VectorField { grid, comps })
    }

    pub fn from_components(grid: Grid, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.len() != grid.dim() || comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::FieldShape(format!(
                "expected {} components of {} values",
                grid.dim(),
                grid.len()
            )));
        }
        for c in &comps {
            check_finite(c, "vector field")?;
        }
        Ok(VectorField { grid, comps })
    }

    /// Interior values per component, each in storage order.
    pub fn from_interior(grid: Grid, interior: &[Vec<f64>]) -> Result<Self> {
        if interior.len() != grid.dim() {
            return Err(Error::FieldShape(format!(
                "expected {} components, got {}",
                grid.dim(),
                interior.len()
            )));
        }
        let comps = interior
            .iter()
            .map(|c| ScalarField::from_interior(grid, c).map(|s| s.values))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField { grid, comps })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, k: usize) -> &[f64] {
        &self.comps[k]
    }

    pub(crate) fn component_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.comps[k]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn at(&self, idx: usize) -> [f64; 2] {
        let mut v = [0.0; 2];
        for (k, c) in self.comps.iter().enumerate() {
            v[k] = c[idx];
        }
        v
    }

    pub fn norm_sq_at(&self, idx: usize) -> f64 {
        self.comps.iter().map(|c| c[idx] * c[idx]).sum()
    }

    pub fn interior_components(&self) -> Vec<Vec<f64>> {
        self.comps.iter().map(|c| self.grid.interior().map(|i| c[i]).collect()).collect()
    }

    /// Largest pointwise Euclidean magnitude over the interior.
    pub fn max_magnitude(&self) -> f64 {
        self.grid.interior().map(|i| self.norm_sq_at(i).sqrt()).fold(0.0, f64::max)
    }

    /// L1 norm of the pointwise magnitude.
    pub fn l1_norm(&self) -> f64 {
        self.grid.cell_volume() * self.grid.interior().map(|i| self.norm_sq_at(i).sqrt()).sum::<f64>()
    }
}
