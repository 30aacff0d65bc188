//! Named analytic families for initial data, force fields and potentials.
//!
//! Mode numbers count half-wavelengths across the box: mode `m` on axis `e`
//! is `cos(m pi x_e / L_e)` or `sin(m pi x_e / L_e)`. Cosines have zero slope
//! on the walls, sines vanish there.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constitutive::PressureLaw;
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::solver::{Forcing, ForcingKind};
use crate::statics::solve_static;

fn mode(modes: &[u32], e: usize, missing: u32) -> f64 {
    modes.get(e).copied().unwrap_or(missing) as f64
}

fn cos_product(grid: &Grid, modes: &[u32], x: [f64; 2]) -> f64 {
    (0..grid.dim()).map(|e| (mode(modes, e, 0) * PI * x[e] / grid.extents()[e]).cos()).product()
}

fn sin_product(grid: &Grid, modes: &[u32], x: [f64; 2]) -> f64 {
    (0..grid.dim()).map(|e| (mode(modes, e, 1) * PI * x[e] / grid.extents()[e]).sin()).product()
}

fn check_len(name: &str, v: &[f64], grid: &Grid) -> Result<()> {
    if v.len() != grid.dim() {
        return Err(Error::Config(format!(
            "`{name}` has {} entries, grid dimension is {}",
            v.len(),
            grid.dim()
        )));
    }
    Ok(())
}

/// Initial density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Uniform {
        value: f64,
    },
    /// `mean + amplitude * prod_e cos(m_e pi x_e / L_e)`; missing modes are 0.
    SinePerturbation {
        mean: f64,
        amplitude: f64,
        #[serde(default = "default_modes")]
        modes: Vec<u32>,
    },
    /// `background + height * sum_c exp(-|x - c|^2 / width^2)` over two centers.
    TwoBump {
        background: f64,
        height: f64,
        width: f64,
        centers: Vec<Vec<f64>>,
    },
    /// `mean + amplitude * sum_k w_k phi_k / sum_k |w_k|` over cosine modes
    /// `phi_k` with `1 <= |k|_inf <= modes`; weights uniform in `[-1, 1]`
    /// from a seeded ChaCha8 stream. The perturbation never exceeds
    /// `amplitude` in magnitude.
    RandomSmooth {
        mean: f64,
        amplitude: f64,
        #[serde(default = "default_random_modes")]
        modes: u32,
        seed: u64,
    },
    /// Static profile of the scenario's gradient forcing with the given mass.
    Static {
        mass: f64,
        #[serde(default = "default_static_tol")]
        tol: f64,
    },
}

fn default_modes() -> Vec<u32> {
    vec![1]
}

fn default_random_modes() -> u32 {
    4
}

fn default_static_tol() -> f64 {
    1e-12
}

impl DensitySpec {
    pub fn build(&self, grid: Grid, law: &PressureLaw, forcing: &Forcing) -> Result<ScalarField> {
        match self {
            DensitySpec::Uniform { value } => ScalarField::from_fn(grid, |_| *value),
            DensitySpec::SinePerturbation { mean, amplitude, modes } => {
                ScalarField::from_fn(grid, |x| mean + amplitude * cos_product(&grid, modes, x))
            }
            DensitySpec::TwoBump { background, height, width, centers } => {
                if centers.len() != 2 {
                    return Err(Error::Config(format!(
                        "two_bump needs exactly 2 centers, got {}",
                        centers.len()
                    )));
                }
                for c in centers {
                    check_len("centers", c, &grid)?;
                }
                if !(*width > 0.0) {
                    return Err(Error::Config(format!("bump width {width} must be positive")));
                }
                ScalarField::from_fn(grid, |x| {
                    let bumps: f64 = centers
                        .iter()
                        .map(|c| {
                            let r2: f64 = (0..grid.dim()).map(|e| (x[e] - c[e]).powi(2)).sum();
                            (-r2 / (width * width)).exp()
                        })
                        .sum();
                    background + height * bumps
                })
            }
            DensitySpec::RandomSmooth { mean, amplitude, modes, seed } => {
                let terms = random_modes(grid.dim(), *modes, *seed);
                let norm: f64 = terms.iter().map(|(w, _)| w.abs()).sum();
                ScalarField::from_fn(grid, |x| {
                    let s: f64 = terms.iter().map(|(w, m)| w * cos_product(&grid, m, x)).sum();
                    mean + amplitude * s / norm
                })
            }
            DensitySpec::Static { mass, tol } => {
                let (a, gamma) = law
                    .isentropic_params()
                    .ok_or_else(|| Error::Config("static initial density needs an isentropic law".into()))?;
                let potential = forcing
                    .potential()
                    .ok_or_else(|| Error::Config("static initial density needs gradient forcing".into()))?;
                Ok(solve_static(potential, *mass, a, gamma, *tol)?.rho)
            }
        }
    }
}

fn random_modes(dim: usize, modes: u32, seed: u64) -> Vec<(f64, Vec<u32>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let m = modes.max(1);
    let ny = if dim == 2 { m } else { 0 };
    for j in 0..=ny {
        for i in 0..=m {
            if i.max(j) == 0 {
                continue;
            }
            let w: f64 = rng.random_range(-1.0..=1.0);
            out.push((w, vec![i, j]));
        }
    }
    out
}

/// Vector-valued profile, used for initial velocities and force fields.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorProfile {
    #[default]
    Zero,
    Uniform {
        value: Vec<f64>,
    },
    /// Component `k` is `amplitude[k] * prod_e sin(m_e pi x_e / L_e)`;
    /// missing modes are 1, so the profile vanishes on every wall.
    Sine {
        amplitude: Vec<f64>,
        #[serde(default = "default_modes")]
        modes: Vec<u32>,
    },
}

impl VectorProfile {
    pub fn build(&self, grid: Grid) -> Result<VectorField> {
        match self {
            VectorProfile::Zero => Ok(VectorField::zeros(grid)),
            VectorProfile::Uniform { value } => {
                check_len("value", value, &grid)?;
                VectorField::constant(grid, value)
            }
            VectorProfile::Sine { amplitude, modes } => {
                check_len("amplitude", amplitude, &grid)?;
                VectorField::from_fn(grid, |x| {
                    let s = sin_product(&grid, modes, x);
                    let mut v = [0.0; 2];
                    for (k, a) in amplitude.iter().enumerate() {
                        v[k] = a * s;
                    }
                    v
                })
            }
        }
    }

    /// The same profile with every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            VectorProfile::Zero => VectorProfile::Zero,
            VectorProfile::Uniform { value } => {
                VectorProfile::Uniform { value: value.iter().map(|v| v * factor).collect() }
            }
            VectorProfile::Sine { amplitude, modes } => VectorProfile::Sine {
                amplitude: amplitude.iter().map(|v| v * factor).collect(),
                modes: modes.clone(),
            },
        }
    }
}

/// Scalar potential `F` of a gradient forcing `f = grad F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `offset + slope . x`
    Linear {
        slope: Vec<f64>,
        #[serde(default)]
        offset: f64,
    },
    /// `amplitude * prod_e cos(m_e pi x_e / L_e)`; missing modes are 0.
    Cosine {
        amplitude: f64,
        #[serde(default = "default_modes")]
        modes: Vec<u32>,
    },
    /// `height * exp(-|x - center|^2 / width^2)`
    RadialBump { center: Vec<f64>, height: f64, width: f64 },
    /// Grid dump: one value per interior cell in storage order (axis 0
    /// fastest), any arrangement of rows and columns. The gradient is taken
    /// by second-order differences.
    Csv { path: String },
}

impl PotentialSpec {
    /// Potential sampled at cell centers, with its exact gradient when the
    /// family is analytic.
    pub fn build(&self, grid: Grid, base_dir: Option<&Path>) -> Result<(ScalarField, Option<VectorField>)> {
        match self {
            PotentialSpec::Linear { slope, offset } => {
                check_len("slope", slope, &grid)?;
                let f = ScalarField::from_fn(grid, |x| {
                    offset + (0..grid.dim()).map(|e| slope[e] * x[e]).sum::<f64>()
                })?;
                let g = VectorField::constant(grid, slope)?;
                Ok((f, Some(g)))
            }
            PotentialSpec::Cosine { amplitude, modes } => {
                let f = ScalarField::from_fn(grid, |x| amplitude * cos_product(&grid, modes, x))?;
                let g = VectorField::from_fn(grid, |x| {
                    let mut v = [0.0; 2];
                    for (d, out) in v.iter_mut().enumerate().take(grid.dim()) {
                        let mut term = *amplitude;
                        for e in 0..grid.dim() {
                            let k = mode(modes, e, 0) * PI / grid.extents()[e];
                            term *= if e == d { -k * (k * x[e]).sin() } else { (k * x[e]).cos() };
                        }
                        *out = term;
                    }
                    v
                })?;
                Ok((f, Some(g)))
            }
            PotentialSpec::RadialBump { center, height, width } => {
                check_len("center", center, &grid)?;
                if !(*width > 0.0) {
                    return Err(Error::Config(format!("bump width {width} must be positive")));
                }
                let w2 = width * width;
                let value = |x: [f64; 2]| {
                    let r2: f64 = (0..grid.dim()).map(|e| (x[e] - center[e]).powi(2)).sum();
                    height * (-r2 / w2).exp()
                };
                let f = ScalarField::from_fn(grid, value)?;
                let g = VectorField::from_fn(grid, |x| {
                    let v0 = value(x);
                    let mut v = [0.0; 2];
                    for e in 0..grid.dim() {
                        v[e] = -2.0 * (x[e] - center[e]) / w2 * v0;
                    }
                    v
                })?;
                Ok((f, Some(g)))
            }
            PotentialSpec::Csv { path } => {
                let p = Path::new(path);
                let p = match base_dir {
                    Some(dir) if p.is_relative() => dir.join(p),
                    _ => p.to_path_buf(),
                };
                Ok((read_grid_dump(&p, grid)?, None))
            }
        }
    }

    pub fn build_forcing(&self, grid: Grid, base_dir: Option<&Path>) -> Result<Forcing> {
        match self.build(grid, base_dir)? {
            (f, Some(g)) => Forcing::gradient_with(f, g),
            (f, None) => Ok(Forcing::gradient(f)),
        }
    }
}

fn read_grid_dump(path: &Path, grid: Grid) -> Result<ScalarField> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_path(path)?;
    let mut values = Vec::with_capacity(grid.interior_len());
    for record in reader.records() {
        for cell in record?.iter().filter(|c| !c.is_empty()) {
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::Config(format!("{}: `{cell}` is not a number", path.display())))?;
            values.push(v);
        }
    }
    if values.len() != grid.interior_len() {
        return Err(Error::Config(format!(
            "{}: {} values for a grid of {} cells",
            path.display(),
            values.len(),
            grid.interior_len()
        )));
    }
    ScalarField::from_interior(grid, &values)
}

/// True when `forcing` is time-periodic; returns its period.
pub fn forcing_period(forcing: &Forcing) -> Option<f64> {
    match forcing.kind() {
        ForcingKind::TimePeriodic { omega, .. } => Some(*omega),
        _ => None,
    }
}
