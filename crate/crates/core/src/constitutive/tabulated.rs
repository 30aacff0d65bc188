//! Tabulated pressure-density laws: piecewise cubic Hermite interpolation of
//! `(rho_k, p_k)` nodes, C1 on `(0, rho_max)` and extended linearly beyond the
//! last node.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedLaw {
    rho: Vec<f64>,
    p: Vec<f64>,
    slope: Vec<f64>,
    monotone: bool,
    /// `int_{rho_1}^{rho_k} p(s)/s^2 ds` at every node, `rho_1` being the first
    /// positive node. The entry for the `rho = 0` node is unused.
    cumulative: Vec<f64>,
}

const QUAD_REL_TOL: f64 = 1e-10;

impl TabulatedLaw {
    /// `monotone` selects Fritsch-Carlson limited slopes, which keep the
    /// interpolant monotone wherever the data are; otherwise slopes are the
    /// weighted three-point estimates.
    pub fn new(nodes: Vec<(f64, f64)>, monotone: bool) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::Param("tabulated law needs at least 3 nodes".into()));
        }
        if nodes.iter().any(|(r, p)| !r.is_finite() || !p.is_finite()) {
            return Err(Error::Param("tabulated law has non-finite nodes".into()));
        }
        if nodes[0] != (0.0, 0.0) {
            return Err(Error::Param(format!("tabulated law must start at (0, 0), got {:?}", nodes[0])));
        }
        if nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Param("tabulated densities must be strictly increasing".into()));
        }
        let (rho, p): (Vec<f64>, Vec<f64>) = nodes.into_iter().unzip();
        let slope = if monotone { limited_slopes(&rho, &p) } else { centered_slopes(&rho, &p) };
        let mut law = TabulatedLaw { rho, p, slope, monotone, cumulative: Vec::new() };
        law.cumulative = law.build_cumulative();
        Ok(law)
    }

    /// Two-column CSV `(rho, p)`; a non-numeric first row is taken as a header.
    pub fn from_csv(path: impl AsRef<Path>, monotone: bool) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
        let mut nodes = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::Config(format!(
                    "{}: line {} has {} columns, expected 2",
                    path.display(),
                    line + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(r), Ok(p)) => nodes.push((r, p)),
                _ if line == 0 => continue,
                _ => {
                    return Err(Error::Config(format!(
                        "{}: line {} is not numeric",
                        path.display(),
                        line + 1
                    )))
                }
            }
        }
        Self::new(nodes, monotone)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.rho.iter().copied().zip(self.p.iter().copied())
    }

    pub fn monotone(&self) -> bool {
        self.monotone
    }

    pub fn rho_max(&self) -> f64 {
        *self.rho.last().unwrap()
    }

    fn segment(&self, rho: f64) -> usize {
        let k = self.rho.partition_point(|r| *r <= rho);
        k.saturating_sub(1).min(self.rho.len() - 2)
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        let n = self.rho.len() - 1;
        if rho >= self.rho[n] {
            return self.p[n] + self.slope[n] * (rho - self.rho[n]);
        }
        let k = self.segment(rho);
        let h = self.rho[k + 1] - self.rho[k];
        let t = (rho - self.rho[k]) / h;
        let (h00, h10, h01, h11) = hermite_basis(t);
        h00 * self.p[k] + h10 * h * self.slope[k] + h01 * self.p[k + 1] + h11 * h * self.slope[k + 1]
    }

    pub fn dpressure(&self, rho: f64) -> f64 {
        let n = self.rho.len() - 1;
        if rho >= self.rho[n] {
            return self.slope[n];
        }
        let k = self.segment(rho);
        let h = self.rho[k + 1] - self.rho[k];
        let t = (rho - self.rho[k]) / h;
        let d00 = 6.0 * t * t - 6.0 * t;
        let d10 = 3.0 * t * t - 4.0 * t + 1.0;
        let d01 = -d00;
        let d11 = 3.0 * t * t - 2.0 * t;
        (d00 * self.p[k] + d01 * self.p[k + 1]) / h + d10 * self.slope[k] + d11 * self.slope[k + 1]
    }

    fn integrand(&self, s: f64) -> f64 {
        self.pressure(s) / (s * s)
    }

    fn build_cumulative(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.rho.len()];
        for k in 2..self.rho.len() {
            out[k] = out[k - 1]
                + adaptive_simpson(|s| self.integrand(s), self.rho[k - 1], self.rho[k], QUAD_REL_TOL);
        }
        out
    }

    /// `P(rho) = rho * int_{rho_1}^{rho} p(s)/s^2 ds`, `P(0) = 0`.
    pub fn potential(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        let first = self.rho[1];
        let integral = if rho <= first {
            -adaptive_simpson(|s| self.integrand(s), rho, first, QUAD_REL_TOL)
        } else {
            let k = self.segment(rho).max(1);
            self.cumulative[k] + adaptive_simpson(|s| self.integrand(s), self.rho[k], rho, QUAD_REL_TOL)
        };
        rho * integral
    }
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + t, -2.0 * t3 + 3.0 * t2, t3 - t2)
}

fn secants(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.windows(2).zip(y.windows(2)).map(|(xw, yw)| (yw[1] - yw[0]) / (xw[1] - xw[0])).collect()
}

fn centered_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let d = secants(x, y);
    let n = x.len();
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for k in 1..n - 1 {
        let h0 = x[k] - x[k - 1];
        let h1 = x[k + 1] - x[k];
        m[k] = (d[k - 1] * h1 + d[k] * h0) / (h0 + h1);
    }
    m
}

fn limited_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let d = secants(x, y);
    let n = x.len();
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for k in 1..n - 1 {
        if d[k - 1] * d[k] <= 0.0 {
            m[k] = 0.0;
            continue;
        }
        let h0 = x[k] - x[k - 1];
        let h1 = x[k + 1] - x[k];
        let w1 = 2.0 * h1 + h0;
        let w2 = h1 + 2.0 * h0;
        m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
    }
    m
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = rel_tol * whole.abs().max(f64::MIN_POSITIVE);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
