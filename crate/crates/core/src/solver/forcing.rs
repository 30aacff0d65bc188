use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;

/// Periodic scalar modulation `offset + amplitude * sin(2 pi t / omega + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    #[serde(default)]
    pub offset: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for Envelope {
    fn default() -> Self {
        Envelope { offset: 0.0, amplitude: 1.0, phase: 0.0 }
    }
}

impl Envelope {
    /// The phase argument only sees `t / omega` modulo one, so shifting `t`
    /// by a whole period changes the value by at most rounding in the
    /// reduction.
    pub fn eval(&self, t: f64, omega: f64) -> f64 {
        let cycles = (t / omega).rem_euclid(1.0);
        self.offset + self.amplitude * (2.0 * PI * cycles + self.phase).sin()
    }

    pub fn bound(&self) -> f64 {
        self.offset.abs() + self.amplitude.abs()
    }
}

pub type ForceFn = dyn Fn(f64, [f64; 2]) -> [f64; 2] + Send + Sync;

#[derive(Clone)]
pub enum ForcingKind {
    Constant {
        f: VectorField,
    },
    TimePeriodic {
        f0: VectorField,
        omega: f64,
        envelope: Envelope,
    },
    /// `f = grad F`; the gradient is stored alongside the potential.
    Gradient {
        potential: ScalarField,
        grad: VectorField,
    },
    /// Arbitrary `f(t, x)` evaluated at cell centers; used for manufactured
    /// solutions. Not serializable.
    Function(Arc<ForceFn>),
}

impl fmt::Debug for ForcingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForcingKind::Constant { .. } => write!(f, "Constant"),
            ForcingKind::TimePeriodic { omega, envelope, .. } => {
                write!(f, "TimePeriodic {{ omega: {omega}, envelope: {envelope:?} }}")
            }
            ForcingKind::Gradient { .. } => write!(f, "Gradient"),
            ForcingKind::Function(_) => write!(f, "Function"),
        }
    }
}

/// External body force `f(t, x)` with a precomputed sup-norm bound.
#[derive(Debug, Clone)]
pub struct Forcing {
    kind: ForcingKind,
    grid: Grid,
    bound: f64,
}

impl Forcing {
    pub fn zero(grid: Grid) -> Self {
        Forcing { kind: ForcingKind::Constant { f: VectorField::zeros(grid) }, grid, bound: 0.0 }
    }

    pub fn constant(f: VectorField) -> Self {
        let grid = *f.grid();
        let bound = f.max_magnitude();
        Forcing { kind: ForcingKind::Constant { f }, grid, bound }
    }

    pub fn periodic(f0: VectorField, omega: f64, envelope: Envelope) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Param(format!("forcing period {omega} must be positive")));
        }
        let grid = *f0.grid();
        let bound = f0.max_magnitude() * envelope.bound();
        Ok(Forcing { kind: ForcingKind::TimePeriodic { f0, omega, envelope }, grid, bound })
    }

    /// Potential forcing with the gradient taken by second-order differences
    /// (central inside, one-sided on the first and last interior cells).
    pub fn gradient(potential: ScalarField) -> Self {
        let grad = discrete_gradient(&potential);
        Self::gradient_with(potential, grad).expect("gradient shares the potential's grid")
    }

    /// Potential forcing with a caller-supplied exact gradient.
    pub fn gradient_with(potential: ScalarField, grad: VectorField) -> Result<Self> {
        let grid = *potential.grid();
        if !grid.compatible(grad.grid()) {
            return Err(Error::FieldShape("potential and gradient grids differ".into()));
        }
        let bound = grad.max_magnitude();
        Ok(Forcing { kind: ForcingKind::Gradient { potential, grad }, grid, bound })
    }

    /// `bound` must dominate `|f(t, x)|`; it is reported, not checked.
    pub fn function(
        grid: Grid,
        bound: f64,
        f: impl Fn(f64, [f64; 2]) -> [f64; 2] + Send + Sync + 'static,
    ) -> Self {
        Forcing { kind: ForcingKind::Function(Arc::new(f)), grid, bound }
    }

    pub fn kind(&self) -> &ForcingKind {
        &self.kind
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Upper bound on `|f(t, x)|` over all times and interior cells.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn period(&self) -> Option<f64> {
        match &self.kind {
            ForcingKind::TimePeriodic { omega, .. } => Some(*omega),
            _ => None,
        }
    }

    pub fn potential(&self) -> Option<&ScalarField> {
        match &self.kind {
            ForcingKind::Gradient { potential, .. } => Some(potential),
            _ => None,
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(self.kind, ForcingKind::TimePeriodic { .. } | ForcingKind::Function(_))
    }

    /// Force at stored cell `idx`.
    pub fn at(&self, t: f64, idx: usize) -> [f64; 2] {
        match &self.kind {
            ForcingKind::Constant { f } => f.at(idx),
            ForcingKind::TimePeriodic { f0, omega, envelope } => {
                let e = envelope.eval(t, *omega);
                let v = f0.at(idx);
                [v[0] * e, v[1] * e]
            }
            ForcingKind::Gradient { grad, .. } => grad.at(idx),
            ForcingKind::Function(func) => func(t, self.grid.center(idx)),
        }
    }

    /// Writes the force on every stored cell into `out` (one vector per
    /// component).
    pub(crate) fn fill(&self, t: f64, out: &mut [Vec<f64>]) {
        match &self.kind {
            ForcingKind::Constant { f } | ForcingKind::Gradient { grad: f, .. } => {
                for (k, o) in out.iter_mut().enumerate() {
                    o.copy_from_slice(f.component(k));
                }
            }
            ForcingKind::TimePeriodic { f0, omega, envelope } => {
                let e = envelope.eval(t, *omega);
                for (k, o) in out.iter_mut().enumerate() {
                    for (dst, src) in o.iter_mut().zip(f0.component(k)) {
                        *dst = src * e;
                    }
                }
            }
            ForcingKind::Function(func) => {
                for idx in 0..self.grid.len() {
                    let v = func(t, self.grid.center(idx));
                    for (k, o) in out.iter_mut().enumerate() {
                        o[idx] = v[k];
                    }
                }
            }
        }
    }
}

/// Second-order gradient of a cell-centered scalar over the interior;
/// ghost entries are left at zero.
pub fn discrete_gradient(f: &ScalarField) -> VectorField {
    let grid = *f.grid();
    let v = f.values();
    let mut comps = vec![vec![0.0; grid.len()]; grid.dim()];
    for axis in 0..grid.dim() {
        let s = grid.stride(axis);
        let dx = grid.dx()[axis];
        let range = grid.interior_range(axis);
        for idx in grid.interior() {
            let (i, j) = grid.coords(idx);
            let pos = if axis == 0 { i } else { j };
            comps[axis][idx] = if pos == range.start {
                (-3.0 * v[idx] + 4.0 * v[idx + s] - v[idx + 2 * s]) / (2.0 * dx)
            } else if pos + 1 == range.end {
                (3.0 * v[idx] - 4.0 * v[idx - s] + v[idx - 2 * s]) / (2.0 * dx)
            } else {
                (v[idx + s] - v[idx - s]) / (2.0 * dx)
            };
        }
    }
    VectorField::from_components(grid, comps).expect("finite differences of a finite field")
}
