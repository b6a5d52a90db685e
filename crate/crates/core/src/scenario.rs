//! Scenario execution: turn a validated [`RunConfig`] into artifact files
//! and a machine-readable summary.
//!
//! Every scenario is a pure function of (config text, effective seed):
//! artifacts are written with fixed float formatting and no timestamps,
//! so identical inputs produce byte-identical files. Exit semantics:
//! 0 success, 2 when a certificate verdict is false, errors propagate to
//! the caller (which maps them to exit 1).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::assembly::{coercivity_check, GalerkinSystem};
use crate::basis::{BasisKind, BasisSet};
use crate::config::{ForcingSpec, InitialCondition, RunConfig, Scenario};
use crate::field::taylor_green;
use crate::gns::{estimate_constant, validate_params, Exclusion, GNSParams};
use crate::grid::Grid;
use crate::integrate::{run, Forcing, SimConfig, TrajectoryRecord, TIMESERIES_COLUMNS};
use crate::io::{write_csv, write_json, write_snapshot};
use crate::quadform::criterion_theorem31;
use crate::restrict::{restrict_field, substitute_d3};
use crate::uniqueness::{gronwall_constant, perturbation_experiment, CERTIFICATE_COLUMNS};
use crate::{Error, Result};

/// Exit code for a certificate whose verdict is false.
pub const EXIT_CERTIFICATE_FAILED: i32 = 2;

/// Outcome of a scenario run.
#[derive(Debug)]
pub struct ScenarioReport {
    /// 0 on success, 2 when a certificate failed.
    pub exit_code: i32,
    /// Contents of the summary written to `summary.json`.
    pub summary: serde_json::Value,
    /// Files written, relative to the output directory, sorted.
    pub artifacts: Vec<String>,
}

struct ArtifactSink {
    dir: PathBuf,
    written: Vec<String>,
}

impl ArtifactSink {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn writer(&mut self, name: &str) -> Result<BufWriter<File>> {
        self.written.push(name.to_string());
        let file = File::create(self.dir.join(name))?;
        Ok(BufWriter::new(file))
    }

    fn csv(&mut self, name: &str, columns: &[&str], rows: Vec<Vec<f64>>) -> Result<()> {
        let mut out = self.writer(name)?;
        write_csv(&mut out, columns, rows)?;
        out.flush()?;
        Ok(())
    }

    fn json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut out = self.writer(name)?;
        write_json(&mut out, value)?;
        out.flush()?;
        Ok(())
    }

    fn finish(mut self, summary: &serde_json::Value) -> Result<Vec<String>> {
        let mut out = self.writer("summary.json")?;
        write_json(&mut out, summary)?;
        out.flush()?;
        self.written.sort();
        Ok(self.written)
    }
}

/// Initial coefficient vector for the configured preset.
///
/// Taylor-Green is the basis projection of the vortex (restricted bases
/// project the 3D vortex sampled on the section); single-mode puts the
/// amplitude on one sorted index; seeded-random draws uniform
/// coefficients damped by `(1 + lambda)^(-decay/2)` from the preset's
/// own seed.
pub fn initial_coefficients(config: &RunConfig, system: &GalerkinSystem) -> Result<Vec<f64>> {
    let basis = system.basis();
    let quad = system.quadrature_grid();
    let amp = config.ic_amplitude;
    match config.ic {
        InitialCondition::TaylorGreen => {
            let field = match basis.kind() {
                BasisKind::Restricted(plane) => {
                    let source = Grid::new(3, 16, basis.period())?;
                    restrict_field(&taylor_green(&source)?, plane, quad)?
                }
                BasisKind::Standard => taylor_green(quad)?,
            };
            Ok(basis.analyze(&field)?.iter().map(|a| a * amp).collect())
        }
        InitialCondition::SingleMode { index } => {
            if index >= basis.len() {
                return Err(Error::OutOfRange(format!(
                    "single_mode index {index} out of range for {} modes",
                    basis.len()
                )));
            }
            let mut coeffs = vec![0.0; basis.len()];
            coeffs[index] = amp;
            Ok(coeffs)
        }
        InitialCondition::SeededRandom {
            seed,
            spectrum_decay,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..basis.len())
                .map(|i| {
                    let damp = (1.0 + basis.stokes_eigenvalue(i)).powf(-spectrum_decay / 2.0);
                    amp * damp * rng.gen_range(-1.0..1.0)
                })
                .collect())
        }
    }
}

fn forcing_coefficients(config: &RunConfig, basis: &BasisSet) -> Result<Forcing> {
    match config.forcing {
        ForcingSpec::None => Ok(Forcing::None),
        ForcingSpec::SteadyMode { index, amplitude } => {
            if index >= basis.len() {
                return Err(Error::OutOfRange(format!(
                    "forcing mode index {index} out of range for {} modes",
                    basis.len()
                )));
            }
            let mut coeffs = vec![0.0; basis.len()];
            coeffs[index] = amplitude;
            Ok(Forcing::Steady(coeffs))
        }
    }
}

fn sim_config(config: &RunConfig, system: &GalerkinSystem) -> Result<SimConfig> {
    let sim = config.sim.as_ref().expect("validated by parse_config");
    Ok(SimConfig {
        nu: sim.nu,
        dt: sim.dt,
        t_end: sim.t_end,
        initial: initial_coefficients(config, system)?,
        forcing: forcing_coefficients(config, system.basis())?,
    })
}

fn output_grid(config: &RunConfig, basis: &BasisSet) -> Result<Grid> {
    let grid = Grid::new(basis.dimension(), config.grid.n, basis.period())?;
    basis.check_grid(&grid)?;
    Ok(grid)
}

fn write_trajectory(
    sink: &mut ArtifactSink,
    record: &TrajectoryRecord,
    system: &GalerkinSystem,
    grid: &Grid,
    snapshot_every: usize,
) -> Result<()> {
    sink.csv(
        "timeseries.csv",
        &TIMESERIES_COLUMNS,
        record.diagnostics.iter().map(|d| d.row()).collect(),
    )?;
    let last = record.n_levels() - 1;
    for level in 0..record.n_levels() {
        if level % snapshot_every != 0 && level != last {
            continue;
        }
        let field = system.basis().synthesize(&record.states[level], grid)?;
        let name = format!("snapshot_{level:06}.nsf");
        let mut out = sink.writer(&name)?;
        write_snapshot(&mut out, &field)?;
        out.flush()?;
    }
    Ok(())
}

fn write_manifest(sink: &mut ArtifactSink, basis: &BasisSet) -> Result<()> {
    let mut out = sink.writer("basis.txt")?;
    basis.write_manifest(&mut out)?;
    out.flush()?;
    Ok(())
}

fn exclusion_name(e: Exclusion) -> &'static str {
    match e {
        Exclusion::None => "none",
        Exclusion::ExclusionA => "exclusion_a",
        Exclusion::ExclusionB => "exclusion_b",
    }
}

/// Execute the configured scenario, writing artifacts into `out_dir`.
///
/// `seed_override` replaces the config's master seed when given.
pub fn run_scenario(
    config: &RunConfig,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<ScenarioReport> {
    let seed = seed_override.unwrap_or(config.seed);
    let mut sink = ArtifactSink::new(out_dir)?;
    let (exit_code, mut summary) = match config.scenario {
        Scenario::Simulate => scenario_simulate(config, &mut sink)?,
        Scenario::Restrict => scenario_restrict(config, &mut sink, seed)?,
        Scenario::Certify => scenario_certify(config, &mut sink)?,
        Scenario::Gns => scenario_gns(config, &mut sink, seed)?,
        Scenario::Uniqueness => scenario_uniqueness(config, &mut sink, seed)?,
    };
    let map = summary.as_object_mut().expect("summary is an object");
    map.insert("scenario".to_string(), json!(config.scenario.name()));
    map.insert("config_hash".to_string(), json!(config.config_hash));
    map.insert("seed".to_string(), json!(seed));
    map.insert("exit_code".to_string(), json!(exit_code));
    let artifacts = sink.finish(&summary)?;
    Ok(ScenarioReport {
        exit_code,
        summary,
        artifacts,
    })
}

fn scenario_simulate(
    config: &RunConfig,
    sink: &mut ArtifactSink,
) -> Result<(i32, serde_json::Value)> {
    let system =
        GalerkinSystem::standard(config.grid.dimension, config.k_max, config.grid.period)?;
    let grid = output_grid(config, system.basis())?;
    let sim = sim_config(config, &system)?;
    let record = run(&sim, &system)?;
    write_manifest(sink, system.basis())?;
    write_trajectory(sink, &record, &system, &grid, config.outputs.snapshot_every)?;
    let final_energy = record
        .diagnostics
        .last()
        .map(|d| d.energy)
        .unwrap_or(0.0);
    let summary = json!({
        "n_modes": system.n_modes(),
        "n_levels": record.n_levels(),
        "final_time": record.final_time(),
        "final_energy": final_energy,
        "deriv_l2": record.deriv_l2,
        "cfl_warnings": record.cfl_warnings,
    });
    Ok((0, summary))
}

fn scenario_restrict(
    config: &RunConfig,
    sink: &mut ArtifactSink,
    seed: u64,
) -> Result<(i32, serde_json::Value)> {
    let plane = config.plane.expect("validated by parse_config");
    let system = GalerkinSystem::restricted(config.k_max, config.grid.period, &plane)?;
    let basis = system.basis();
    write_manifest(sink, basis)?;

    // Coercivity probe: a seeded admissible field (any coefficient
    // vector synthesizes to one).
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = (0..basis.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let probe = basis.synthesize(&coeffs, system.quadrature_grid())?;
    let coercivity = coercivity_check(&probe, &plane)?;

    let substitution = substitute_d3(&plane);
    let report = json!({
        "plane": plane,
        "elliptic": system.elliptic(),
        "advection_factor": plane.advection_factor(),
        "substitution_first_order": substitution.first_order,
        "substitution_second_order": substitution.second_order,
        "n_modes": system.n_modes(),
        "lambda_min": basis.min_eigenvalue(),
        "coercivity": coercivity,
    });
    sink.json("restricted.json", &report)?;
    let exit = if coercivity.holds { 0 } else { EXIT_CERTIFICATE_FAILED };
    Ok((exit, report))
}

fn scenario_certify(
    config: &RunConfig,
    sink: &mut ArtifactSink,
) -> Result<(i32, serde_json::Value)> {
    let system =
        GalerkinSystem::standard(config.grid.dimension, config.k_max, config.grid.period)?;
    let grid = output_grid(config, system.basis())?;
    let sim = sim_config(config, &system)?;
    let record = run(&sim, &system)?;
    write_manifest(sink, system.basis())?;
    write_trajectory(sink, &record, &system, &grid, config.outputs.snapshot_every)?;

    let lambda1 = config
        .certify
        .lambda1
        .unwrap_or_else(|| system.basis().min_eigenvalue());
    let certificates = criterion_theorem31(&record, &system, config.certify.c, sim.nu, lambda1)?;
    let all_hold = certificates.iter().all(|c| c.holds);
    let report = json!({
        "c_used": config.certify.c,
        "nu": sim.nu,
        "lambda1": lambda1,
        "n_certificates": certificates.len(),
        "all_hold": all_hold,
        "certificates": certificates,
    });
    sink.json("certificates.json", &report)?;
    let summary = json!({
        "c_used": config.certify.c,
        "lambda1": lambda1,
        "all_hold": all_hold,
        "n_certificates": certificates.len(),
    });
    let exit = if all_hold { 0 } else { EXIT_CERTIFICATE_FAILED };
    Ok((exit, summary))
}

fn scenario_gns(
    config: &RunConfig,
    sink: &mut ArtifactSink,
    seed: u64,
) -> Result<(i32, serde_json::Value)> {
    let g = &config.gns;
    let params = GNSParams::new(g.d, g.p0, g.p1, g.p2, g.s, g.m)?;
    let exclusion = validate_params(&params);

    let estimate = if g.s == 0 && g.m == 1 {
        let grid = Grid::new(g.d, config.grid.n, config.grid.period)?;
        Some(estimate_constant(&params, &grid, g.samples, seed)?)
    } else {
        None
    };
    let report = json!({
        "sigma": params.sigma,
        "exclusion": exclusion_name(exclusion),
        "d": g.d,
        "s": g.s,
        "m": g.m,
        "c_lower": estimate.as_ref().map(|e| e.c_lower),
        "sample_count": estimate.as_ref().map(|e| e.sample_count),
    });
    sink.json("gns.json", &report)?;
    Ok((0, report))
}

fn scenario_uniqueness(
    config: &RunConfig,
    sink: &mut ArtifactSink,
    seed: u64,
) -> Result<(i32, serde_json::Value)> {
    let plane = config.plane.expect("validated by parse_config");
    let system = GalerkinSystem::restricted(config.k_max, config.grid.period, &plane)?;
    let grid = output_grid(config, system.basis())?;
    let sim = sim_config(config, &system)?;

    let c_estimate = match config.uniqueness.c {
        Some(c) => c,
        None => {
            // Ladyzhenskaya constant on the 2D section, amplified by the
            // section advection factor.
            let params = GNSParams::new(
                2,
                crate::gns::Exponent::Finite(4.0),
                crate::gns::Exponent::Finite(2.0),
                crate::gns::Exponent::Finite(2.0),
                0,
                1,
            )?;
            let section = Grid::new(2, config.grid.n, config.grid.period)?;
            let estimate = estimate_constant(&params, &section, config.gns.samples, seed)?;
            plane.advection_factor() * estimate.c_lower
        }
    };
    let big_c = gronwall_constant(c_estimate, sim.nu)?;
    let (run_a, _perturbed, certificate) = perturbation_experiment(
        &sim,
        &system,
        config.uniqueness.epsilon,
        config.uniqueness.mode_index,
        big_c,
    )?;

    write_manifest(sink, system.basis())?;
    write_trajectory(sink, &run_a, &system, &grid, config.outputs.snapshot_every)?;
    sink.csv("gronwall.csv", &CERTIFICATE_COLUMNS, certificate.rows())?;
    let report = json!({
        "epsilon": certificate.epsilon,
        "c_estimate": c_estimate,
        "C_used": certificate.c_used,
        "nu": sim.nu,
        "max_ratio": certificate.max_ratio,
        "holds": certificate.holds,
        "advection_factor": plane.advection_factor(),
    });
    sink.json("certificate.json", &report)?;
    let exit = if certificate.holds { 0 } else { EXIT_CERTIFICATE_FAILED };
    Ok((exit, report))
}
