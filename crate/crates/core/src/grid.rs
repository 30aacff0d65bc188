//! Uniform rectilinear grids over a box `[0, L0] x [0, L1]` with ghost layers.
//!
//! Storage is row-major with axis 0 fastest: the padded cell `(i, j)` lives at
//! linear index `i + j * padded(0)`. In 1D the second axis has a single layer
//! and no ghosts. Ghost layers surround the interior on every active axis, so
//! interior cells along axis `a` run over `ghost..ghost + cells[a]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_CELLS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    extents: [f64; 2],
    cells: [usize; 2],
    dx: [f64; 2],
    ghost: usize,
}

/// Serializable description of a grid, as it appears in configs and snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub extents: Vec<f64>,
    pub cells: Vec<usize>,
    #[serde(default = "default_ghost")]
    pub ghost: usize,
}

fn default_ghost() -> usize {
    1
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.dim, &self.extents, &self.cells, self.ghost)
    }
}

impl Grid {
    pub fn new(dim: usize, extents: &[f64], cells: &[usize], ghost: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Grid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if extents.len() != dim || cells.len() != dim {
            return Err(Error::Grid(format!(
                "expected {dim} extents and cell counts, got {} and {}",
                extents.len(),
                cells.len()
            )));
        }
        if ghost < 1 {
            return Err(Error::Grid("ghost width must be at least 1".into()));
        }
        let mut ext = [1.0; 2];
        let mut n = [1usize; 2];
        let mut dx = [1.0; 2];
        for axis in 0..dim {
            if !(extents[axis].is_finite() && extents[axis] > 0.0) {
                return Err(Error::Grid(format!("non-positive extent {} on axis {axis}", extents[axis])));
            }
            if cells[axis] < MIN_CELLS {
                return Err(Error::Grid(format!(
                    "axis {axis} has {} cells, need at least {MIN_CELLS}",
                    cells[axis]
                )));
            }
            ext[axis] = extents[axis];
            n[axis] = cells[axis];
            dx[axis] = extents[axis] / cells[axis] as f64;
        }
        Ok(Grid { dim, extents: ext, cells: n, dx, ghost })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents[..self.dim]
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells[..self.dim]
    }

    pub fn dx(&self) -> &[f64] {
        &self.dx[..self.dim]
    }

    pub fn ghost(&self) -> usize {
        self.ghost
    }

    pub fn min_dx(&self) -> f64 {
        self.dx().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().iter().product()
    }

    pub fn volume(&self) -> f64 {
        self.extents().iter().product()
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            dim: self.dim,
            extents: self.extents().to_vec(),
            cells: self.cells().to_vec(),
            ghost: self.ghost,
        }
    }

    /// Padded length of `axis` (interior plus both ghost layers); 1 for an
    /// inactive axis.
    pub fn padded(&self, axis: usize) -> usize {
        if axis < self.dim {
            self.cells[axis] + 2 * self.ghost
        } else {
            1
        }
    }

    /// Total number of stored cells, ghosts included.
    pub fn len(&self) -> usize {
        self.padded(0) * self.padded(1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn interior_len(&self) -> usize {
        self.cells[0] * if self.dim == 2 { self.cells[1] } else { 1 }
    }

    /// Linear offset between neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        if axis == 0 {
            1
        } else {
            self.padded(0)
        }
    }

    /// Linear index of padded coordinates.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i + j * self.padded(0)
    }

    /// Padded coordinates of a linear index.
    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        let nx = self.padded(0);
        (idx % nx, idx / nx)
    }

    /// Range of padded interior coordinates along `axis`.
    pub fn interior_range(&self, axis: usize) -> std::ops::Range<usize> {
        if axis < self.dim {
            self.ghost..self.ghost + self.cells[axis]
        } else {
            0..1
        }
    }

    /// Linear indices of every interior cell, in storage order.
    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        let xr = self.interior_range(0);
        self.interior_range(1).flat_map(move |j| xr.clone().map(move |i| self.index(i, j)))
    }

    /// Interior position of a linear index (0-based, storage order), or
    /// `None` for ghost cells.
    pub fn interior_number(&self, idx: usize) -> Option<usize> {
        let (i, j) = self.coords(idx);
        let ir = self.interior_range(0);
        let jr = self.interior_range(1);
        if ir.contains(&i) && jr.contains(&j) {
            Some((i - ir.start) + (j - jr.start) * self.cells[0])
        } else {
            None
        }
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        self.interior_number(idx).is_some()
    }

    /// Physical coordinates of the center of a stored cell. Ghost cells get
    /// coordinates outside the box.
    pub fn center(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.coords(idx);
        let mut x = [0.0; 2];
        x[0] = (i as f64 - self.ghost as f64 + 0.5) * self.dx[0];
        if self.dim == 2 {
            x[1] = (j as f64 - self.ghost as f64 + 0.5) * self.dx[1];
        }
        x
    }

    /// Same cell count and spacing.
    pub fn compatible(&self, other: &Grid) -> bool {
        self.dim == other.dim && self.cells == other.cells && self.dx == other.dx
    }
}
