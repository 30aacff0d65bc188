use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Newtonian viscosity pair `(mu, lambda)` with `mu > 0`, `lambda + mu >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ViscositySpec", into = "ViscositySpec")]
pub struct Viscosity {
    mu: f64,
    lambda: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct ViscositySpec {
    mu: f64,
    lambda: f64,
}

impl TryFrom<ViscositySpec> for Viscosity {
    type Error = Error;
    fn try_from(s: ViscositySpec) -> Result<Self> {
        Viscosity::new(s.mu, s.lambda)
    }
}

impl From<Viscosity> for ViscositySpec {
    fn from(v: Viscosity) -> Self {
        ViscositySpec { mu: v.mu, lambda: v.lambda }
    }
}

impl Viscosity {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::Param(format!("shear viscosity mu = {mu} must be positive")));
        }
        if !(lambda.is_finite() && lambda + mu >= 0.0) {
            return Err(Error::Param(format!("bulk viscosity lambda = {lambda} violates lambda + mu >= 0")));
        }
        Ok(Viscosity { mu, lambda })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `2 mu + lambda`, the coefficient of the normal-normal component.
    pub fn longitudinal(&self) -> f64 {
        2.0 * self.mu + self.lambda
    }
}

/// A `dim x dim` tensor, `dim` in {1, 2}. Unused entries are zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tensor {
    pub dim: usize,
    pub m: [[f64; 2]; 2],
}

impl Tensor {
    pub fn new(dim: usize, m: [[f64; 2]; 2]) -> Self {
        let mut t = Tensor { dim, m };
        if dim == 1 {
            t.m[0][1] = 0.0;
            t.m[1][0] = 0.0;
            t.m[1][1] = 0.0;
        }
        t
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.m[i][i]).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut m = self.m;
        m[0][1] = self.m[1][0];
        m[1][0] = self.m[0][1];
        Tensor { dim: self.dim, m }
    }
}

impl std::ops::Add for Tensor {
    type Output = Tensor;
    fn add(self, rhs: Tensor) -> Tensor {
        let mut m = self.m;
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += rhs.m[i][j];
            }
        }
        Tensor { dim: self.dim, m }
    }
}

/// Newtonian stress `mu (G + G^T) + lambda tr(G) I` for a velocity gradient `G`.
pub fn viscous_stress(grad_u: &Tensor, visc: &Viscosity) -> Tensor {
    let div = grad_u.trace();
    let mut s = [[0.0; 2]; 2];
    for i in 0..grad_u.dim {
        for j in 0..grad_u.dim {
            s[i][j] = visc.mu * (grad_u.m[i][j] + grad_u.m[j][i]);
        }
        s[i][i] += visc.lambda * div;
    }
    Tensor { dim: grad_u.dim, m: s }
}
