//! C ABI over the barolab library.
//!
//! Every fallible function returns a [`BlStatus`]; on failure the message is
//! available from [`bl_last_error`] on the same thread. Simulations are opaque
//! handles created by [`bl_simulation_new`] and released with
//! [`bl_simulation_free`]. No function unwinds across the boundary: panics
//! are caught and reported as [`BlStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use barolab::constitutive::{pressure, pressure_potential, PressureLaw};
use barolab::diagnostics::total_energy;
use barolab::harness::{Scenario, Setup};
use barolab::solver::{simulate, NoObserver};
use barolab::statics::solve_static;
use barolab::{total_mass, Error, Grid, ScalarField, State};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Invalid configuration, grid or parameter.
    Config = 3,
    /// The computation failed (non-finite state, no convergence).
    Solver = 4,
    /// An output buffer is too small; the required length was reported.
    BufferTooSmall = 5,
    /// An internal panic was caught.
    Panic = 6,
}

/// Energy split at the current time.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BlEnergy {
    pub kinetic: f64,
    pub potential: f64,
    pub total: f64,
}

/// Opaque simulation handle.
pub struct BlSimulation {
    setup: Setup,
    state: State,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: BlStatus, msg: impl Into<String>) -> BlStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> BlStatus {
    let status = if e.is_config() { BlStatus::Config } else { BlStatus::Solver };
    fail(status, e.to_string())
}

/// Runs `f` with the error slot cleared, converting panics into a status.
fn guard(f: impl FnOnce() -> BlStatus) -> BlStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(BlStatus::Panic, format!("panic: {msg}"))
        }
    }
}

/// # Safety
/// `ptr` is null or a valid nul-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, BlStatus> {
    if ptr.is_null() {
        return Err(fail(BlStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(BlStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

macro_rules! non_null {
    ($p:expr, $what:literal) => {
        if $p.is_null() {
            return fail(BlStatus::NullPointer, concat!($what, " is null"));
        }
    };
}

/// Message of the last failure on this thread, or null if the last call
/// succeeded. Valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn bl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn bl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a simulation from a scenario JSON document. Relative data paths in
/// the scenario resolve against `base_dir`, which may be null.
///
/// # Safety
/// `scenario_json` and a non-null `base_dir` are nul-terminated strings;
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bl_simulation_new(
    scenario_json: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut BlSimulation,
) -> BlStatus {
    guard(|| {
        non_null!(out, "out");
        *out = std::ptr::null_mut();
        let text = match read_str(scenario_json, "scenario_json") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let mut sc = match Scenario::from_json(text) {
            Ok(sc) => sc,
            Err(e) => return from_error(e),
        };
        if !base_dir.is_null() {
            match read_str(base_dir, "base_dir") {
                Ok(d) => sc.base_dir = Some(PathBuf::from(d)),
                Err(s) => return s,
            }
        }
        match sc.build() {
            Ok(setup) => {
                let state = setup.initial.clone();
                *out = Box::into_raw(Box::new(BlSimulation { setup, state }));
                BlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a simulation. Null is ignored.
///
/// # Safety
/// `sim` is null or came from [`bl_simulation_new`] and was not freed.
#[no_mangle]
pub unsafe extern "C" fn bl_simulation_free(sim: *mut BlSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Integrates forward until time `t_target`. A target before the current
/// time is a config error; on a solver failure the state is left unchanged.
///
/// # Safety
/// `sim` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn bl_simulation_advance(sim: *mut BlSimulation, t_target: f64) -> BlStatus {
    guard(|| {
        non_null!(sim, "sim");
        let sim = &mut *sim;
        let s = &sim.setup;
        match simulate(sim.state.clone(), &s.params, &s.forcing, &s.scheme, t_target, &mut NoObserver) {
            Ok(outcome) => {
                sim.state = outcome.state;
                BlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Current simulation time.
///
/// # Safety
/// `sim` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bl_simulation_time(sim: *const BlSimulation, out: *mut f64) -> BlStatus {
    guard(|| {
        non_null!(sim, "sim");
        non_null!(out, "out");
        *out = (*sim).state.time;
        BlStatus::Ok
    })
}

/// Kinetic, potential and total energy of the current state.
///
/// # Safety
/// `sim` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bl_simulation_energy(sim: *const BlSimulation, out: *mut BlEnergy) -> BlStatus {
    guard(|| {
        non_null!(sim, "sim");
        non_null!(out, "out");
        let sim = &*sim;
        let e = total_energy(&sim.state, &sim.setup.params.law, sim.setup.scheme.vacuum_floor);
        *out = BlEnergy { kinetic: e.kinetic, potential: e.potential, total: e.total };
        BlStatus::Ok
    })
}

/// Total mass of the current state.
///
/// # Safety
/// `sim` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bl_simulation_mass(sim: *const BlSimulation, out: *mut f64) -> BlStatus {
    guard(|| {
        non_null!(sim, "sim");
        non_null!(out, "out");
        *out = total_mass(&(*sim).state);
        BlStatus::Ok
    })
}

/// Number of interior cells.
///
/// # Safety
/// `sim` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bl_simulation_cell_count(sim: *const BlSimulation, out: *mut usize) -> BlStatus {
    guard(|| {
        non_null!(sim, "sim");
        non_null!(out, "out");
        *out = (*sim).setup.grid.interior_len();
        BlStatus::Ok
    })
}

/// Copies the interior densities, axis 0 fastest, into `buf`. `written`
/// (may be null) receives the cell count; if `len` is smaller the call
/// returns [`BlStatus::BufferTooSmall`] and copies nothing.
///
/// # Safety
/// `sim` is a live handle and `buf` holds `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bl_simulation_copy_density(
    sim: *const BlSimulation,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> BlStatus {
    guard(|| {
        non_null!(sim, "sim");
        let values = (*sim).state.rho.interior_values();
        if !written.is_null() {
            *written = values.len();
        }
        if len < values.len() {
            return fail(
                BlStatus::BufferTooSmall,
                format!("buffer holds {len} values, {} needed", values.len()),
            );
        }
        non_null!(buf, "buf");
        std::slice::from_raw_parts_mut(buf, values.len()).copy_from_slice(&values);
        BlStatus::Ok
    })
}

/// Pressure `a rho^gamma` and pressure potential of the isentropic law.
/// Either output may be null.
///
/// # Safety
/// Non-null outputs are writable.
#[no_mangle]
pub unsafe extern "C" fn bl_isentropic_pressure(
    rho: f64,
    a: f64,
    gamma: f64,
    p_out: *mut f64,
    potential_out: *mut f64,
) -> BlStatus {
    guard(|| {
        let law = match PressureLaw::isentropic(a, gamma) {
            Ok(l) => l,
            Err(e) => return from_error(e),
        };
        let p = match pressure(rho, &law) {
            Ok(p) => p,
            Err(e) => return from_error(e),
        };
        let pot = match pressure_potential(rho, &law) {
            Ok(v) => v,
            Err(e) => return from_error(e),
        };
        if !p_out.is_null() {
            *p_out = p;
        }
        if !potential_out.is_null() {
            *potential_out = pot;
        }
        BlStatus::Ok
    })
}

/// Static density on `n` uniform cells of `[0, length]` for the potential
/// given at cell centers, with total mass `mass` and law `a rho^gamma`.
/// Writes `n` densities to `rho_out` and the constant to `c_out` (may be
/// null).
///
/// # Safety
/// `potential` holds `n` doubles and `rho_out` has room for `n`.
#[no_mangle]
pub unsafe extern "C" fn bl_static_solve_1d(
    potential: *const f64,
    n: usize,
    length: f64,
    mass: f64,
    a: f64,
    gamma: f64,
    rho_out: *mut f64,
    c_out: *mut f64,
) -> BlStatus {
    guard(|| {
        non_null!(potential, "potential");
        non_null!(rho_out, "rho_out");
        let grid = match Grid::new(1, &[length], &[n], 1) {
            Ok(g) => g,
            Err(e) => return from_error(e),
        };
        let values = std::slice::from_raw_parts(potential, n);
        let field = match ScalarField::from_interior(grid, values) {
            Ok(f) => f,
            Err(e) => return from_error(e),
        };
        match solve_static(&field, mass, a, gamma, 1e-13) {
            Ok(sol) => {
                std::slice::from_raw_parts_mut(rho_out, n).copy_from_slice(&sol.rho.interior_values());
                if !c_out.is_null() {
                    *c_out = sol.c;
                }
                BlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
