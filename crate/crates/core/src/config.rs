//! Line-oriented run configuration: `section.key = value` pairs with
//! `#` comments, parsed into a fully validated [`RunConfig`].
//!
//! Every key is checked against the schema below; unknown keys, bad
//! values, and scenario-specific omissions are reported with the
//! offending line or key. The sha256 of the exact input text rides along
//! so emitted certificates can name their configuration.

use crate::error::ConfigError;
use crate::gns::Exponent;
use crate::io::config_hash;
use crate::restrict::{make_hyperplane, Hyperplane};
use crate::{Error, Result};

/// What the run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Simulate,
    Restrict,
    Certify,
    Gns,
    Uniqueness,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Simulate => "simulate",
            Scenario::Restrict => "restrict",
            Scenario::Certify => "certify",
            Scenario::Gns => "gns",
            Scenario::Uniqueness => "uniqueness",
        }
    }

    fn parse(value: &str) -> Option<Self> {
        match value {
            "simulate" => Some(Scenario::Simulate),
            "restrict" => Some(Scenario::Restrict),
            "certify" => Some(Scenario::Certify),
            "gns" => Some(Scenario::Gns),
            "uniqueness" => Some(Scenario::Uniqueness),
            _ => None,
        }
    }

    /// Scenarios that integrate a trajectory need the sim section.
    fn needs_sim(&self) -> bool {
        matches!(
            self,
            Scenario::Simulate | Scenario::Certify | Scenario::Uniqueness
        )
    }

    fn needs_plane(&self) -> bool {
        matches!(self, Scenario::Restrict | Scenario::Uniqueness)
    }
}

/// Named initial-condition presets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    TaylorGreen,
    /// Unit coefficient on one basis mode (by sorted index).
    SingleMode { index: usize },
    /// Band-limited random coefficients with power-law decay.
    SeededRandom { seed: u64, spectrum_decay: f64 },
}

/// Forcing presets mirroring the integrator's options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForcingSpec {
    None,
    /// Steady forcing concentrated on one basis mode.
    SteadyMode { index: usize, amplitude: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSection {
    pub dimension: usize,
    pub n: usize,
    pub period: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSection {
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifySection {
    /// Advection bound constant fed into the criterion.
    pub c: f64,
    /// Smallest Stokes eigenvalue; defaults to the basis minimum.
    pub lambda1: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnsSection {
    pub d: usize,
    pub p0: Exponent,
    pub p1: Exponent,
    pub p2: Exponent,
    pub s: u32,
    pub m: u32,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniquenessSection {
    pub epsilon: f64,
    pub mode_index: usize,
    /// Advection bound constant; estimated when absent.
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputsSection {
    pub directory: String,
    /// Keep every k-th snapshot (the final one is always kept).
    pub snapshot_every: usize,
}

/// Fully validated configuration for one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub grid: GridSection,
    pub k_max: i64,
    pub sim: Option<SimSection>,
    pub ic: InitialCondition,
    pub ic_amplitude: f64,
    pub forcing: ForcingSpec,
    pub plane: Option<Hyperplane>,
    pub certify: CertifySection,
    pub gns: GnsSection,
    pub uniqueness: UniquenessSection,
    pub outputs: OutputsSection,
    pub seed: u64,
    /// sha256 of the exact config text.
    pub config_hash: String,
}

fn type_error(key: &str, line: usize, reason: impl Into<String>) -> Error {
    Error::Config(ConfigError::TypeError {
        key: key.to_string(),
        line,
        reason: reason.into(),
    })
}

fn set<T>(slot: &mut Option<(T, usize)>, value: T, key: &str, line: usize) -> Result<()> {
    if let Some((_, first)) = slot {
        return Err(type_error(
            key,
            line,
            format!("duplicate key (first set at line {first})"),
        ));
    }
    *slot = Some((value, line));
    Ok(())
}

fn parse_f64(key: &str, line: usize, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| type_error(key, line, format!("expected a number, got `{value}`")))
}

fn parse_positive(key: &str, line: usize, value: &str) -> Result<f64> {
    let v = parse_f64(key, line, value)?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(type_error(key, line, format!("must be positive, got {v}")));
    }
    Ok(v)
}

fn parse_usize(key: &str, line: usize, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| type_error(key, line, format!("expected a nonnegative integer, got `{value}`")))
}

fn parse_u64(key: &str, line: usize, value: &str) -> Result<u64> {
    value
        .parse::<u64>()
        .map_err(|_| type_error(key, line, format!("expected a nonnegative integer, got `{value}`")))
}

fn parse_u32(key: &str, line: usize, value: &str) -> Result<u32> {
    value
        .parse::<u32>()
        .map_err(|_| type_error(key, line, format!("expected a nonnegative integer, got `{value}`")))
}

fn parse_exponent(key: &str, line: usize, value: &str) -> Result<Exponent> {
    if value == "inf" {
        return Ok(Exponent::Infinity);
    }
    let v = parse_f64(key, line, value)?;
    if !(v >= 1.0) {
        return Err(type_error(key, line, format!("exponent must be >= 1, got {v}")));
    }
    Ok(Exponent::Finite(v))
}

/// `name(arg1, arg2, ...)` -> (name, args). A bare word has no args.
fn split_call(value: &str) -> Option<(&str, Vec<&str>)> {
    match value.find('(') {
        None => Some((value, Vec::new())),
        Some(open) => {
            let name = value[..open].trim_end();
            let rest = value[open + 1..].trim_end();
            let inner = rest.strip_suffix(')')?;
            Some((name, inner.split(',').map(str::trim).collect()))
        }
    }
}

fn parse_ic(key: &str, line: usize, value: &str) -> Result<InitialCondition> {
    let (name, args) = split_call(value)
        .ok_or_else(|| type_error(key, line, format!("unbalanced parentheses in `{value}`")))?;
    match (name, args.len()) {
        ("taylor_green", 0) => Ok(InitialCondition::TaylorGreen),
        ("single_mode", 1) => Ok(InitialCondition::SingleMode {
            index: parse_usize(key, line, args[0])?,
        }),
        ("seeded_random", 2) => Ok(InitialCondition::SeededRandom {
            seed: parse_u64(key, line, args[0])?,
            spectrum_decay: parse_f64(key, line, args[1])?,
        }),
        _ => Err(type_error(
            key,
            line,
            format!(
                "expected taylor_green, single_mode(index), or seeded_random(seed, decay), got `{value}`"
            ),
        )),
    }
}

fn parse_forcing(key: &str, line: usize, value: &str) -> Result<ForcingSpec> {
    let (name, args) = split_call(value)
        .ok_or_else(|| type_error(key, line, format!("unbalanced parentheses in `{value}`")))?;
    match (name, args.len()) {
        ("none", 0) => Ok(ForcingSpec::None),
        ("steady_mode", 2) => Ok(ForcingSpec::SteadyMode {
            index: parse_usize(key, line, args[0])?,
            amplitude: parse_f64(key, line, args[1])?,
        }),
        _ => Err(type_error(
            key,
            line,
            format!("expected none or steady_mode(index, amplitude), got `{value}`"),
        )),
    }
}

fn parse_plane(key: &str, line: usize, value: &str) -> Result<Hyperplane> {
    let parts: Vec<f64> = value
        .split(',')
        .map(|p| parse_f64(key, line, p.trim()))
        .collect::<Result<_>>()?;
    match parts.len() {
        3 => Hyperplane::new(parts[0], parts[1], parts[2]),
        4 => make_hyperplane(parts[0], parts[1], parts[2], parts[3]),
        n => Err(type_error(
            key,
            line,
            format!("expected `a1,a2,b` or `a1,a2,a3,b`, got {n} values"),
        )),
    }
}

/// Parse and validate for the scenario the text itself declares.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_for(text, None)
}

/// Parse and validate, forcing `requested` as the scenario.
///
/// A `scenario` key in the text must agree with the request.
pub fn parse_config_for(text: &str, requested: Option<Scenario>) -> Result<RunConfig> {
    let mut scenario: Option<(Scenario, usize)> = None;
    let mut grid_dimension: Option<(usize, usize)> = None;
    let mut grid_n: Option<(usize, usize)> = None;
    let mut grid_period: Option<(f64, usize)> = None;
    let mut k_max: Option<(i64, usize)> = None;
    let mut nu: Option<(f64, usize)> = None;
    let mut dt: Option<(f64, usize)> = None;
    let mut t_end: Option<(f64, usize)> = None;
    let mut ic: Option<(InitialCondition, usize)> = None;
    let mut ic_amplitude: Option<(f64, usize)> = None;
    let mut forcing: Option<(ForcingSpec, usize)> = None;
    let mut plane: Option<(Hyperplane, usize)> = None;
    let mut certify_c: Option<(f64, usize)> = None;
    let mut certify_lambda1: Option<(f64, usize)> = None;
    let mut gns_d: Option<(usize, usize)> = None;
    let mut gns_p0: Option<(Exponent, usize)> = None;
    let mut gns_p1: Option<(Exponent, usize)> = None;
    let mut gns_p2: Option<(Exponent, usize)> = None;
    let mut gns_s: Option<(u32, usize)> = None;
    let mut gns_m: Option<(u32, usize)> = None;
    let mut gns_samples: Option<(usize, usize)> = None;
    let mut uniq_epsilon: Option<(f64, usize)> = None;
    let mut uniq_mode: Option<(usize, usize)> = None;
    let mut uniq_c: Option<(f64, usize)> = None;
    let mut out_dir: Option<(String, usize)> = None;
    let mut snapshot_every: Option<(usize, usize)> = None;
    let mut seed: Option<(u64, usize)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or(Error::Config(ConfigError::Malformed { line }))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Config(ConfigError::Malformed { line }));
        }
        match key {
            "scenario" => {
                let s = Scenario::parse(value).ok_or_else(|| {
                    type_error(key, line, format!("unknown scenario `{value}`"))
                })?;
                set(&mut scenario, s, key, line)?;
            }
            "grid.dimension" => {
                let d = parse_usize(key, line, value)?;
                if !(2..=3).contains(&d) {
                    return Err(type_error(key, line, format!("must be 2 or 3, got {d}")));
                }
                set(&mut grid_dimension, d, key, line)?;
            }
            "grid.n" => {
                let n = parse_usize(key, line, value)?;
                if n < 4 {
                    return Err(type_error(key, line, format!("must be at least 4, got {n}")));
                }
                set(&mut grid_n, n, key, line)?;
            }
            "grid.period" => set(&mut grid_period, parse_positive(key, line, value)?, key, line)?,
            "basis.k_max" => {
                let k = value.parse::<i64>().map_err(|_| {
                    type_error(key, line, format!("expected an integer, got `{value}`"))
                })?;
                if k < 1 {
                    return Err(type_error(key, line, format!("must be at least 1, got {k}")));
                }
                set(&mut k_max, k, key, line)?;
            }
            "sim.nu" => set(&mut nu, parse_positive(key, line, value)?, key, line)?,
            "sim.dt" => set(&mut dt, parse_positive(key, line, value)?, key, line)?,
            "sim.t_end" => set(&mut t_end, parse_positive(key, line, value)?, key, line)?,
            "ic" => set(&mut ic, parse_ic(key, line, value)?, key, line)?,
            "ic.amplitude" => {
                let a = parse_f64(key, line, value)?;
                if !a.is_finite() {
                    return Err(type_error(key, line, "must be finite"));
                }
                set(&mut ic_amplitude, a, key, line)?;
            }
            "forcing" => set(&mut forcing, parse_forcing(key, line, value)?, key, line)?,
            "plane" => set(&mut plane, parse_plane(key, line, value)?, key, line)?,
            "certify.c" => set(&mut certify_c, parse_positive(key, line, value)?, key, line)?,
            "certify.lambda1" => {
                set(&mut certify_lambda1, parse_positive(key, line, value)?, key, line)?
            }
            "gns.d" => {
                let d = parse_usize(key, line, value)?;
                if d == 0 {
                    return Err(type_error(key, line, "must be positive"));
                }
                set(&mut gns_d, d, key, line)?;
            }
            "gns.p0" => set(&mut gns_p0, parse_exponent(key, line, value)?, key, line)?,
            "gns.p1" => set(&mut gns_p1, parse_exponent(key, line, value)?, key, line)?,
            "gns.p2" => set(&mut gns_p2, parse_exponent(key, line, value)?, key, line)?,
            "gns.s" => set(&mut gns_s, parse_u32(key, line, value)?, key, line)?,
            "gns.m" => {
                let m = parse_u32(key, line, value)?;
                if m == 0 {
                    return Err(type_error(key, line, "must be positive"));
                }
                set(&mut gns_m, m, key, line)?;
            }
            "gns.samples" => set(&mut gns_samples, parse_usize(key, line, value)?, key, line)?,
            "uniqueness.epsilon" => {
                let e = parse_f64(key, line, value)?;
                if !(e >= 0.0) || !e.is_finite() {
                    return Err(type_error(key, line, format!("must be nonnegative, got {e}")));
                }
                set(&mut uniq_epsilon, e, key, line)?;
            }
            "uniqueness.mode_index" => {
                set(&mut uniq_mode, parse_usize(key, line, value)?, key, line)?
            }
            "uniqueness.c" => set(&mut uniq_c, parse_positive(key, line, value)?, key, line)?,
            "outputs.directory" => set(&mut out_dir, value.to_string(), key, line)?,
            "outputs.snapshot_every" => {
                let k = parse_usize(key, line, value)?;
                if k == 0 {
                    return Err(type_error(key, line, "must be at least 1"));
                }
                set(&mut snapshot_every, k, key, line)?;
            }
            "seed" => set(&mut seed, parse_u64(key, line, value)?, key, line)?,
            _ => {
                return Err(Error::Config(ConfigError::UnknownKey {
                    key: key.to_string(),
                    line,
                }));
            }
        }
    }

    let scenario = match (requested, scenario) {
        (Some(r), Some((s, line))) if r != s => {
            return Err(type_error(
                "scenario",
                line,
                format!("config declares `{}` but `{}` was requested", s.name(), r.name()),
            ));
        }
        (Some(r), _) => r,
        (None, Some((s, _))) => s,
        (None, None) => Scenario::Simulate,
    };

    let missing = |key: &'static str| {
        Error::Config(ConfigError::MissingRequired {
            key,
            scenario: scenario.name(),
        })
    };
    let sim = match (nu, dt, t_end) {
        (Some((nu, _)), Some((dt, _)), Some((t_end, _))) => Some(SimSection { nu, dt, t_end }),
        (None, _, _) if scenario.needs_sim() => return Err(missing("sim.nu")),
        (_, None, _) if scenario.needs_sim() => return Err(missing("sim.dt")),
        (_, _, None) if scenario.needs_sim() => return Err(missing("sim.t_end")),
        _ => None,
    };
    if scenario.needs_plane() && plane.is_none() {
        return Err(missing("plane"));
    }

    let value = |opt: Option<(f64, usize)>| opt.map(|(v, _)| v);
    Ok(RunConfig {
        scenario,
        grid: GridSection {
            dimension: grid_dimension.map_or(2, |(v, _)| v),
            n: grid_n.map_or(16, |(v, _)| v),
            period: grid_period.map_or(std::f64::consts::TAU, |(v, _)| v),
        },
        k_max: k_max.map_or(2, |(v, _)| v),
        sim,
        ic: ic.map_or(InitialCondition::TaylorGreen, |(v, _)| v),
        ic_amplitude: ic_amplitude.map_or(1.0, |(v, _)| v),
        forcing: forcing.map_or(ForcingSpec::None, |(v, _)| v),
        plane: plane.map(|(v, _)| v),
        certify: CertifySection {
            c: certify_c.map_or(0.5, |(v, _)| v),
            lambda1: value(certify_lambda1),
        },
        gns: GnsSection {
            d: gns_d.map_or(2, |(v, _)| v),
            p0: gns_p0.map_or(Exponent::Finite(4.0), |(v, _)| v),
            p1: gns_p1.map_or(Exponent::Finite(2.0), |(v, _)| v),
            p2: gns_p2.map_or(Exponent::Finite(2.0), |(v, _)| v),
            s: gns_s.map_or(0, |(v, _)| v),
            m: gns_m.map_or(1, |(v, _)| v),
            samples: gns_samples.map_or(8, |(v, _)| v),
        },
        uniqueness: UniquenessSection {
            epsilon: uniq_epsilon.map_or(1e-3, |(v, _)| v),
            mode_index: uniq_mode.map_or(0, |(v, _)| v),
            c: value(uniq_c),
        },
        outputs: OutputsSection {
            directory: out_dir.map_or_else(|| "out".to_string(), |(v, _)| v),
            snapshot_every: snapshot_every.map_or(1, |(v, _)| v),
        },
        seed: seed.map_or(0, |(v, _)| v),
        config_hash: config_hash(text),
    })
}
