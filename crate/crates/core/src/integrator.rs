//! Explicit time stepping of `Ẏ = 𝒥(Y) DH(Y)`.

use crate::error::{Error, Result};
use crate::hamiltonian::{Model, State};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub dt: f64,
    pub t_final: f64,
    pub observe_every: usize,
    pub reproject_gauge: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt != 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be finite and nonzero, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::InvalidParameter(format!("T must be >= 0, got {}", self.t_final)));
        }
        if self.observe_every == 0 {
            return Err(Error::InvalidParameter("observe_every must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_final` with `|dt|`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt.abs() - 1e-9).ceil().max(0.0) as usize
    }
}

/// Largest stable step for the spectral wave operator under RK4.
pub fn stability_bound(model: &Model) -> f64 {
    0.2 * model.grid().spacing() / std::f64::consts::PI
}

/// Default step `0.1 h`.
pub fn default_dt(model: &Model) -> f64 {
    0.1 * model.grid().spacing()
}

/// One classical Runge–Kutta step. `dt` may be negative.
pub fn step_rk4(model: &Model, y: &State, dt: f64, reproject_gauge: bool) -> Result<State> {
    let k1 = model.rhs(y)?;
    let k2 = model.rhs(&y.add_scaled(&k1, 0.5 * dt)?)?;
    let k3 = model.rhs(&y.add_scaled(&k2, 0.5 * dt)?)?;
    let k4 = model.rhs(&y.add_scaled(&k3, dt)?)?;
    let mut next =
        y.add_scaled(&k1, dt / 6.0)?.add_scaled(&k2, dt / 3.0)?.add_scaled(&k3, dt / 3.0)?.add_scaled(&k4, dt / 6.0)?;
    if reproject_gauge {
        next = next.reproject();
    }
    if !next.is_finite() {
        return Err(Error::BlowUp { t: f64::NAN });
    }
    Ok(next)
}

/// Integrate from `y0` and call `observe(t, state)` at `t = 0`, after every
/// `observe_every` steps, and at the final time. Records come back in time
/// order.
pub fn evolve<R>(
    model: &Model,
    y0: &State,
    cfg: &RunConfig,
    mut observe: impl FnMut(f64, &State) -> Result<R>,
) -> Result<Vec<R>> {
    cfg.validate()?;
    let steps = cfg.steps();
    let mut records = vec![observe(0.0, y0)?];
    let mut y = y0.clone();
    for n in 1..=steps {
        let t = n as f64 * cfg.dt;
        y = step_rk4(model, &y, cfg.dt, cfg.reproject_gauge).map_err(|e| match e {
            Error::BlowUp { .. } => Error::BlowUp { t },
            other => other,
        })?;
        if n % cfg.observe_every == 0 || n == steps {
            records.push(observe(t, &y)?);
        }
    }
    Ok(records)
}
