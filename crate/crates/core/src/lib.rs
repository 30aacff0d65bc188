//! Finite-volume laboratory for the compressible barotropic Navier-Stokes
//! equations
//!
//! ```text
//! d_t rho + div(rho u) = 0
//! d_t (rho u) + div(rho u (x) u) + grad p(rho) = div S + rho f
//! S = mu (grad u + grad u^T) + lambda div u I,   u = 0 on the boundary
//! ```
//!
//! on boxes in one and two dimensions, together with the diagnostics needed
//! to study long-time behaviour: energy and its dissipation, the energy
//! inequality residual, the renormalized continuity residual, distances
//! between trajectories, and the static density profile under potential
//! forcing.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod constitutive;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod grid;
pub mod harness;
pub mod solver;
pub mod state;
pub mod statics;

pub use error::{Error, Result};
pub use field::{ScalarField, VectorField};
pub use grid::{Grid, GridSpec};
pub use state::{total_mass, validate_initial_data, InitialData, State, DEFAULT_VACUUM_FLOOR};
