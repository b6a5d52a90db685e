//! Time integration of the assembled coefficient system with per-step
//! energy accounting.
//!
//! The scheme treats the stiff diagonal part exactly through an
//! exponential integrating factor and the quadratic term with a
//! two-stage explicit (Heun) update on the transformed variable:
//!
//! ```text
//! E    = exp(-nu * S * dt)            (componentwise)
//! k1   = N(a, t)
//! k2   = N(E o (a + dt k1), t + dt)
//! a+   = E o (a + dt/2 k1) + dt/2 k2
//! ```
//!
//! where `N(a, t) = -H(a, a) + f(t)` is everything except diffusion.
//! Pure diffusion is integrated exactly; the overall order is two.

use crate::assembly::GalerkinSystem;
use crate::basis::BasisKind;
use crate::field::max_abs;
use crate::{Error, Result};

/// Fixed-step integration parameters.
///
/// `t_end` must be an integer multiple of `dt` (to one part in 1e6); the
/// step count is fixed up front so runs are bitwise reproducible.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub initial: Vec<f64>,
    pub forcing: Forcing,
}

/// Right-hand-side forcing in coefficient space.
#[derive(Debug, Clone, PartialEq)]
pub enum Forcing {
    None,
    /// Time-independent projected coefficients.
    Steady(Vec<f64>),
}

impl Forcing {
    fn coefficients(&self) -> Option<&[f64]> {
        match self {
            Forcing::None => None,
            Forcing::Steady(f) => Some(f),
        }
    }
}

impl SimConfig {
    fn validate(&self, n_modes: usize) -> Result<usize> {
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(Error::OutOfRange(format!(
                "viscosity must be positive and finite, got {}",
                self.nu
            )));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::OutOfRange(format!(
                "dt must be positive and finite, got {}",
                self.dt
            )));
        }
        if !(self.t_end > 0.0) || self.dt > self.t_end {
            return Err(Error::OutOfRange(format!(
                "t_end must satisfy 0 < dt <= t_end, got dt = {}, t_end = {}",
                self.dt, self.t_end
            )));
        }
        let steps = (self.t_end / self.dt).round();
        if steps < 1.0 || (steps * self.dt - self.t_end).abs() > 1e-6 * self.t_end {
            return Err(Error::OutOfRange(format!(
                "t_end = {} is not an integer multiple of dt = {}",
                self.t_end, self.dt
            )));
        }
        if self.initial.len() != n_modes {
            return Err(Error::InvalidCoefficients {
                expected: n_modes,
                got: self.initial.len(),
            });
        }
        if self.initial.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidField(
                "initial coefficients must be finite".to_string(),
            ));
        }
        if let Some(f) = self.forcing.coefficients() {
            if f.len() != n_modes {
                return Err(Error::InvalidCoefficients {
                    expected: n_modes,
                    got: f.len(),
                });
            }
        }
        Ok(steps as usize)
    }
}

/// Scalar diagnostics of one stored time level.
#[derive(Debug, Clone, Copy)]
pub struct EnergyDiagnostics {
    pub t: f64,
    /// `0.5 |u|_2^2`.
    pub energy: f64,
    /// `nu <elliptic u, u>`.
    pub dirichlet: f64,
    /// `<f, u>`.
    pub work: f64,
    /// Centered-difference residual of `d/dt energy + dirichlet - work`
    /// (zero at the endpoints).
    pub balance_residual: f64,
    /// Max constraint violation of the synthesized field.
    pub div_max: f64,
}

impl EnergyDiagnostics {
    /// CSV row in schema order.
    pub fn row(&self) -> Vec<f64> {
        vec![
            self.t,
            self.energy,
            self.dirichlet,
            self.work,
            self.balance_residual,
            self.div_max,
        ]
    }
}

/// Column names matching [`EnergyDiagnostics::row`].
pub const TIMESERIES_COLUMNS: [&str; 6] =
    ["t", "energy", "dirichlet", "work", "balance_residual", "div_max"];

/// Complete trajectory: every time level is kept.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    /// Coefficient state at every time level (`steps + 1` entries).
    pub states: Vec<Vec<f64>>,
    pub diagnostics: Vec<EnergyDiagnostics>,
    /// `sqrt(dt * sum |da/dt|^2)`, a discrete `L^2(0,T)` derivative norm.
    pub deriv_l2: f64,
    /// Steps where `dt * max|u| * kappa_max` exceeded 0.5.
    pub cfl_warnings: usize,
}

impl TrajectoryRecord {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("non-empty trajectory")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("non-empty trajectory")
    }

    pub fn n_levels(&self) -> usize {
        self.times.len()
    }
}

fn check_finite(state: &[f64], step: usize, time: f64) -> Result<()> {
    if state.iter().any(|v| !v.is_finite()) {
        return Err(Error::Diverged { step, time });
    }
    Ok(())
}

/// Advance one step from `t`; `step_index` only labels divergence errors.
pub fn step(
    state: &[f64],
    system: &GalerkinSystem,
    config: &SimConfig,
    t: f64,
    step_index: usize,
) -> Result<Vec<f64>> {
    let dt = config.dt;
    let nu = config.nu;
    let n = state.len();
    let forcing = config.forcing.coefficients();
    let rhs = |a: &[f64]| -> Result<Vec<f64>> {
        let mut out = system.nonlinear(a)?;
        for (i, v) in out.iter_mut().enumerate() {
            *v = -*v + forcing.map_or(0.0, |f| f[i]);
        }
        Ok(out)
    };

    let k1 = rhs(state)?;
    let mut predictor = vec![0.0; n];
    let mut factors = vec![0.0; n];
    for i in 0..n {
        factors[i] = (-nu * system.stiffness()[i] * dt).exp();
        predictor[i] = factors[i] * (state[i] + dt * k1[i]);
    }
    let k2 = rhs(&predictor)?;
    let mut next = vec![0.0; n];
    for i in 0..n {
        next[i] = factors[i] * (state[i] + 0.5 * dt * k1[i]) + 0.5 * dt * k2[i];
    }
    check_finite(&next, step_index, t + dt)?;
    Ok(next)
}

fn max_constraint_violation(
    system: &GalerkinSystem,
    field: &crate::field::PhysicalField,
) -> Result<f64> {
    let values = match system.basis().kind() {
        BasisKind::Standard => field.divergence()?,
        BasisKind::Restricted(plane) => crate::restrict::restricted_divergence(field, plane)?,
    };
    Ok(max_abs(&values))
}

/// Integrate the full horizon, recording diagnostics at every level.
pub fn run(config: &SimConfig, system: &GalerkinSystem) -> Result<TrajectoryRecord> {
    let steps = config.validate(system.n_modes())?;
    let dt = config.dt;
    let forcing = config.forcing.coefficients();
    let kappa_max =
        std::f64::consts::TAU / system.basis().period() * system.basis().k_max() as f64;

    let mut states = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    states.push(config.initial.clone());
    times.push(0.0);
    let mut cfl_warnings = 0;

    for m in 0..steps {
        let t = m as f64 * dt;
        let next = step(&states[m], system, config, t, m)?;
        times.push((m + 1) as f64 * dt);
        states.push(next);
    }

    let mut diagnostics = Vec::with_capacity(steps + 1);
    for (state, &t) in states.iter().zip(&times) {
        let energy = 0.5 * state.iter().map(|a| a * a).sum::<f64>();
        let dirichlet = config.nu
            * state
                .iter()
                .zip(system.stiffness())
                .map(|(a, s)| s * a * a)
                .sum::<f64>();
        let work = forcing.map_or(0.0, |f| f.iter().zip(state).map(|(fi, a)| fi * a).sum());
        let field = system
            .basis()
            .synthesize(state, system.quadrature_grid())?;
        if dt * field.max_magnitude() * kappa_max > 0.5 {
            cfl_warnings += 1;
        }
        let div_max = max_constraint_violation(system, &field)?;
        diagnostics.push(EnergyDiagnostics {
            t,
            energy,
            dirichlet,
            work,
            balance_residual: 0.0,
            div_max,
        });
    }

    let residuals = residual_series(&times, &diagnostics);
    for (d, r) in diagnostics.iter_mut().zip(&residuals) {
        d.balance_residual = *r;
    }

    let mut deriv_sq = 0.0;
    for pair in states.windows(2) {
        let norm_sq: f64 = pair[0]
            .iter()
            .zip(&pair[1])
            .map(|(a, b)| (b - a) * (b - a))
            .sum();
        deriv_sq += norm_sq / dt;
    }

    Ok(TrajectoryRecord {
        times,
        states,
        diagnostics,
        deriv_l2: deriv_sq.sqrt(),
        cfl_warnings,
    })
}

fn residual_series(times: &[f64], diagnostics: &[EnergyDiagnostics]) -> Vec<f64> {
    let n = times.len();
    let mut out = vec![0.0; n];
    for m in 1..n.saturating_sub(1) {
        let dt2 = times[m + 1] - times[m - 1];
        let rate = (diagnostics[m + 1].energy - diagnostics[m - 1].energy) / dt2;
        out[m] = rate + diagnostics[m].dirichlet - diagnostics[m].work;
    }
    out
}

/// Residual of the energy balance from a stored trajectory (centered
/// differences; endpoints zero). Needs at least three levels.
pub fn energy_balance_residual(record: &TrajectoryRecord) -> Result<Vec<f64>> {
    if record.times.len() < 3 {
        return Err(Error::Unsupported(
            "energy balance residual needs at least three time levels".to_string(),
        ));
    }
    Ok(residual_series(&record.times, &record.diagnostics))
}
