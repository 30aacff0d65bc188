use crate::error::{Error, Result};
use crate::state::State;

use super::forcing::Forcing;
use super::scheme::{FluidParams, SchemeConfig};
use super::step::{stable_dt, StepStats, Stepper};

/// Callbacks driven by [`simulate`]. The loop shortens steps so that the
/// state lands exactly on every requested deadline.
pub trait Observer {
    /// Next time strictly after `t` at which the observer wants the state,
    /// or `None` if it needs nothing more.
    fn next_deadline(&self, t: f64) -> Option<f64>;

    /// Called once with the initial state and then at each deadline reached.
    fn observe(&mut self, state: &State, stepper: &Stepper) -> Result<()>;
}

/// Observer that wants nothing.
pub struct NoObserver;

impl Observer for NoObserver {
    fn next_deadline(&self, _t: f64) -> Option<f64> {
        None
    }

    fn observe(&mut self, _state: &State, _stepper: &Stepper) -> Result<()> {
        Ok(())
    }
}

/// Observer firing at `t0 + k * every`.
pub struct Cadence<F> {
    pub t0: f64,
    pub every: f64,
    pub callback: F,
}

impl<F: FnMut(&State, &Stepper) -> Result<()>> Observer for Cadence<F> {
    fn next_deadline(&self, t: f64) -> Option<f64> {
        Some(next_multiple(self.t0, self.every, t))
    }

    fn observe(&mut self, state: &State, stepper: &Stepper) -> Result<()> {
        (self.callback)(state, stepper)
    }
}

/// Smallest `t0 + k * every` (integer `k >= 0`) strictly after `t`, computed
/// by multiplication so that deadlines do not drift.
pub fn next_multiple(t0: f64, every: f64, t: f64) -> f64 {
    let k = ((t - t0) / every).floor().max(-1.0) + 1.0;
    let mut next = t0 + k * every;
    while next <= t + deadline_tolerance(t) {
        next += every;
        let k2 = ((next - t0) / every).round();
        next = t0 + k2 * every;
    }
    next
}

fn deadline_tolerance(t: f64) -> f64 {
    8.0 * f64::EPSILON * t.abs().max(1.0)
}

/// Result of a completed integration.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub state: State,
    pub stats: StepStats,
}

/// Integrates from `initial.time` to `t_end`. Each step is
/// `min(stable_dt, next deadline - t, t_end - t)`; when a deadline is reached
/// the state's time is set to it exactly before the observer runs.
pub fn simulate(
    initial: State,
    params: &FluidParams,
    forcing: &Forcing,
    scheme: &SchemeConfig,
    t_end: f64,
    observer: &mut dyn Observer,
) -> Result<Outcome> {
    scheme.validate()?;
    if !(t_end >= initial.time) {
        return Err(Error::Param(format!("end time {t_end} precedes start time {}", initial.time)));
    }
    let mut state = initial;
    let mut stepper = Stepper::new(*state.grid());
    observer.observe(&state, &stepper)?;
    while state.time < t_end {
        let t = state.time;
        let target = observer.next_deadline(t).map_or(t_end, |d| d.min(t_end));
        let remaining = target - t;
        let dt_stable = stable_dt(&state, params, scheme);
        let hits = dt_stable >= remaining;
        let dt = if hits { remaining } else { dt_stable };
        stepper
            .advance(&mut state, params, forcing, scheme, dt)
            .map_err(|e| Error::AtTime { time: t, source: Box::new(e) })?;
        if hits || target - state.time <= deadline_tolerance(target) {
            state.time = target;
            let wanted = observer.next_deadline(t).is_some_and(|d| d <= target);
            if wanted {
                observer.observe(&state, &stepper)?;
            }
        }
    }
    Ok(Outcome { state, stats: stepper.stats() })
}
