//! Difference dynamics between two trajectories: the energy identity for
//! w = u − v, the exponential comparison bound, and perturbation
//! experiments that exercise both.
//!
//! For solutions u, v of the same system with identical forcing, the
//! difference satisfies
//!
//! ```text
//! d/dt (1/2 |w|^2) + nu <S w, w> + b(w, u, w) = 0,
//! ```
//!
//! which with `|b(w, u, w)| <= c |w|_4^2 |grad u|_2` and Young's
//! inequality closes to `y' <= 2C |grad u|_2^2 y` for `y = |w|^2`,
//! `C = c^2 / (4 nu)`. The comparison solution is the envelope checked
//! here.

use crate::assembly::GalerkinSystem;
use crate::integrate::{run, SimConfig, TrajectoryRecord};
use crate::{Error, Result};

/// Relative slack in the pointwise envelope comparison.
pub const ENVELOPE_TOLERANCE: f64 = 1e-8;

/// Coefficient-wise difference of two aligned trajectories.
#[derive(Debug, Clone)]
pub struct DifferenceTrajectory {
    pub times: Vec<f64>,
    /// `w(t) = u(t) - v(t)` per stored level.
    pub states: Vec<Vec<f64>>,
    /// `|w(t)|_2^2`, exact by orthonormality.
    pub w_energy: Vec<f64>,
}

impl DifferenceTrajectory {
    pub fn n_levels(&self) -> usize {
        self.times.len()
    }

    /// `|w(t)|_2` series.
    pub fn l2_series(&self) -> Vec<f64> {
        self.w_energy.iter().map(|e| e.sqrt()).collect()
    }
}

fn check_aligned(run_a: &TrajectoryRecord, run_b: &TrajectoryRecord) -> Result<()> {
    if run_a.times.len() != run_b.times.len() {
        return Err(Error::IncompatibleRuns(format!(
            "level counts differ: {} vs {}",
            run_a.times.len(),
            run_b.times.len()
        )));
    }
    if run_a
        .times
        .iter()
        .zip(&run_b.times)
        .any(|(a, b)| a.to_bits() != b.to_bits())
    {
        return Err(Error::IncompatibleRuns(
            "time grids differ".to_string(),
        ));
    }
    if run_a.states[0].len() != run_b.states[0].len() {
        return Err(Error::IncompatibleRuns(format!(
            "state dimensions differ: {} vs {}",
            run_a.states[0].len(),
            run_b.states[0].len()
        )));
    }
    Ok(())
}

/// `w = u - v` with its squared-norm series.
pub fn difference_trajectory(
    run_a: &TrajectoryRecord,
    run_b: &TrajectoryRecord,
) -> Result<DifferenceTrajectory> {
    check_aligned(run_a, run_b)?;
    let states: Vec<Vec<f64>> = run_a
        .states
        .iter()
        .zip(&run_b.states)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
        .collect();
    let w_energy = states
        .iter()
        .map(|w| w.iter().map(|x| x * x).sum())
        .collect();
    Ok(DifferenceTrajectory {
        times: run_a.times.clone(),
        states,
        w_energy,
    })
}

/// Residual of the difference energy identity per stored level.
///
/// Interior levels use centered differences of `1/2 |w|^2`; endpoints are
/// reported as zero. The dissipation term uses the system's stiffness
/// symbols and the transport term is `b(w, u, w)` with `u` from `run_a`,
/// both evaluated on dealiased quadrature. Second order in dt.
pub fn w_energy_identity_residual(
    run_a: &TrajectoryRecord,
    run_b: &TrajectoryRecord,
    system: &GalerkinSystem,
    nu: f64,
) -> Result<Vec<f64>> {
    check_aligned(run_a, run_b)?;
    if run_a.states[0].len() != system.n_modes() {
        return Err(Error::IncompatibleRuns(format!(
            "runs carry {} coefficients, system has {} modes",
            run_a.states[0].len(),
            system.n_modes()
        )));
    }
    if !(nu > 0.0) {
        return Err(Error::OutOfRange(format!(
            "viscosity must be positive, got {nu}"
        )));
    }
    let diff = difference_trajectory(run_a, run_b)?;
    let n = diff.n_levels();
    let mut residual = vec![0.0; n];
    let stiffness = system.stiffness();
    for i in 1..n.saturating_sub(1) {
        let dt_span = diff.times[i + 1] - diff.times[i - 1];
        let rate = 0.5 * (diff.w_energy[i + 1] - diff.w_energy[i - 1]) / dt_span;
        let w = &diff.states[i];
        let dissipation: f64 = stiffness
            .iter()
            .zip(w)
            .map(|(s, wi)| s * wi * wi)
            .sum();
        let transport = system.trilinear_value(w, &run_a.states[i], w)?;
        residual[i] = rate + nu * dissipation + transport;
    }
    Ok(residual)
}

/// `C = c^2 / (4 nu)`, the growth constant of the comparison problem.
pub fn gronwall_constant(c_estimate: f64, nu: f64) -> Result<f64> {
    if !(c_estimate > 0.0) || !c_estimate.is_finite() {
        return Err(Error::OutOfRange(format!(
            "constant estimate must be positive, got {c_estimate}"
        )));
    }
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::OutOfRange(format!(
            "viscosity must be positive, got {nu}"
        )));
    }
    Ok(c_estimate * c_estimate / (4.0 * nu))
}

/// Pointwise comparison of `|w|^2` with its exponential envelope.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GronwallCertificate {
    /// `|w(0)|_2` unless overridden by an experiment's requested value.
    pub epsilon: f64,
    pub c_used: f64,
    /// `max_t w_energy / envelope` (0/0 counts as 0).
    pub max_ratio: f64,
    pub holds: bool,
    #[serde(skip)]
    pub times: Vec<f64>,
    #[serde(skip)]
    pub w_energy: Vec<f64>,
    #[serde(skip)]
    pub envelope: Vec<f64>,
}

impl GronwallCertificate {
    /// Rows `(t, w_energy, envelope)` for tabular output.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.times
            .iter()
            .zip(&self.w_energy)
            .zip(&self.envelope)
            .map(|((t, w), e)| vec![*t, *w, *e])
            .collect()
    }
}

/// Column names matching [`GronwallCertificate::rows`].
pub const CERTIFICATE_COLUMNS: [&str; 3] = ["t", "w_energy", "envelope"];

/// Gradient energy `|grad u|_2^2` of a coefficient vector, by the
/// eigenvalue sum.
fn gradient_energy(system: &GalerkinSystem, state: &[f64]) -> f64 {
    let basis = system.basis();
    state
        .iter()
        .enumerate()
        .map(|(i, a)| basis.stokes_eigenvalue(i) * a * a)
        .sum()
}

/// Check `|w(t)|^2 <= |w(0)|^2 exp(2C int_0^t |grad u|^2 ds)` with the
/// integral accumulated by the trapezoid rule on the stored levels.
pub fn gronwall_bound_check(
    run_u: &TrajectoryRecord,
    diff: &DifferenceTrajectory,
    system: &GalerkinSystem,
    big_c: f64,
) -> Result<GronwallCertificate> {
    if run_u.times.len() != diff.times.len()
        || run_u
            .times
            .iter()
            .zip(&diff.times)
            .any(|(a, b)| a.to_bits() != b.to_bits())
    {
        return Err(Error::IncompatibleRuns(
            "difference series is not aligned with the reference run".to_string(),
        ));
    }
    if !(big_c >= 0.0) || !big_c.is_finite() {
        return Err(Error::OutOfRange(format!(
            "growth constant must be nonnegative, got {big_c}"
        )));
    }
    let n = diff.n_levels();
    let w0 = diff.w_energy[0];
    let mut envelope = Vec::with_capacity(n);
    let mut integral = 0.0;
    let mut prev = gradient_energy(system, &run_u.states[0]);
    envelope.push(w0);
    for i in 1..n {
        let g = gradient_energy(system, &run_u.states[i]);
        integral += 0.5 * (run_u.times[i] - run_u.times[i - 1]) * (prev + g);
        prev = g;
        envelope.push(w0 * (2.0 * big_c * integral).exp());
    }
    let mut max_ratio: f64 = 0.0;
    let mut holds = true;
    for (w, e) in diff.w_energy.iter().zip(&envelope) {
        let ratio = if *e > 0.0 {
            w / e
        } else if *w == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        max_ratio = max_ratio.max(ratio);
        if !(*w <= e * (1.0 + ENVELOPE_TOLERANCE)) {
            holds = false;
        }
    }
    Ok(GronwallCertificate {
        epsilon: w0.sqrt(),
        c_used: big_c,
        max_ratio,
        holds,
        times: diff.times.clone(),
        w_energy: diff.w_energy.clone(),
        envelope,
    })
}

/// Run a base and a single-coefficient-perturbed trajectory and certify
/// the difference against the envelope with constant `big_c`.
pub fn perturbation_experiment(
    config: &SimConfig,
    system: &GalerkinSystem,
    epsilon: f64,
    mode_index: usize,
    big_c: f64,
) -> Result<(TrajectoryRecord, TrajectoryRecord, GronwallCertificate)> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::OutOfRange(format!(
            "perturbation size must be nonnegative, got {epsilon}"
        )));
    }
    if mode_index >= config.initial.len() {
        return Err(Error::OutOfRange(format!(
            "mode index {mode_index} out of range for {} coefficients",
            config.initial.len()
        )));
    }
    let run_a = run(config, system)?;
    let mut perturbed = config.clone();
    perturbed.initial[mode_index] += epsilon;
    let run_b = run(&perturbed, system)?;
    let diff = difference_trajectory(&run_b, &run_a)?;
    let mut certificate = gronwall_bound_check(&run_a, &diff, system, big_c)?;
    certificate.epsilon = epsilon;
    Ok((run_a, run_b, certificate))
}
