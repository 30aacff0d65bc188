//! Explicit finite-volume integration of the barotropic Navier-Stokes system
//! with no-slip walls.

mod forcing;
mod scheme;
mod simulate;
mod step;

pub use forcing::{discrete_gradient, Envelope, ForceFn, Forcing, ForcingKind};
pub use scheme::{FluidParams, FluxKind, Integrator, SchemeConfig};
pub use simulate::{next_multiple, simulate, Cadence, NoObserver, Observer, Outcome};
pub use step::{fill_ghosts, stable_dt, step, velocity_with_ghosts, FaceFlux, StepStats, Stepper};
