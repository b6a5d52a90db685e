//! Acceptance suite: one test per criterion, each printing a PASS line
//! once every assertion in it has held. Tolerances are pinned here.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nslab::assembly::{coercivity_check, GalerkinSystem};
use nslab::basis::{leray_project, BasisSet};
use nslab::config::parse_config;
use nslab::field::{max_abs, taylor_green, PhysicalField};
use nslab::gns::{
    check_inequality, solve_sigma, validate_params, Exclusion, Exponent, GNSParams,
};
use nslab::grid::Grid;
use nslab::integrate::{energy_balance_residual, run, Forcing, SimConfig, TrajectoryRecord};
use nslab::quadform::{classify, criterion_theorem31, ldl_coefficients, Definiteness, SymMatrix};
use nslab::restrict::{
    restrict_field, restricted_divergence, solenoidal_from_stream, substitute_d3, Hyperplane,
};
use nslab::scenario::run_scenario;
use nslab::uniqueness::{difference_trajectory, gronwall_constant, perturbation_experiment};

const TG_ENERGY_RTOL: f64 = 1e-6;
const TG_BUDGET_SECS: f64 = 10.0;
const STOKES_ATOL: f64 = 1e-9;
const STOKES_BUDGET_SECS: f64 = 1.0;
const BALANCE_ORDER_FACTOR: f64 = 3.5;
const TRILINEAR_ATOL: f64 = 1e-12;
const LERAY_IDEMPOTENCE_ATOL: f64 = 1e-14;
const LERAY_GRADIENT_ATOL: f64 = 1e-12;
const LERAY_FIXED_ATOL: f64 = 1e-14;
const LDL_RTOL: f64 = 1e-12;
const CRITERION_LHS_RTOL: f64 = 1e-10;
const GNS_PROBE_TARGET: f64 = 0.19497;
const GNS_PROBE_ATOL: f64 = 1e-4;
const STREAM_DIVERGENCE_ATOL: f64 = 1e-12;
const GRONWALL_ORACLE_RTOL: f64 = 1e-6;
const GRONWALL_BUDGET_SECS: f64 = 60.0;

fn pass(number: u32, name: &str) {
    println!("acceptance {number:02} {name}: PASS");
}

fn seeded_unit_coefficients(n: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in &mut v {
            *x /= norm;
        }
    }
    v
}

#[test]
fn acceptance_01_taylor_green_decay() {
    let start = Instant::now();
    let system = GalerkinSystem::standard(2, 2, TAU).unwrap();
    let grid = Grid::new(2, 16, TAU).unwrap();
    let initial = system.basis().analyze(&taylor_green(&grid).unwrap()).unwrap();
    let config = SimConfig {
        nu: 0.1,
        dt: 1e-3,
        t_end: 1.0,
        initial,
        forcing: Forcing::None,
    };
    let record = run(&config, &system).unwrap();
    let norm_sq: f64 = record.final_state().iter().map(|a| a * a).sum();
    let expected = 2.0 * PI * PI * (-0.4f64).exp();
    let rel = (norm_sq - expected).abs() / expected;
    assert!(
        rel <= TG_ENERGY_RTOL,
        "|u|^2 = {norm_sq}, expected {expected}, rel err {rel:e}"
    );
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < TG_BUDGET_SECS, "took {elapsed:.2} s");
    pass(1, "taylor_green_decay");
}

#[test]
fn acceptance_02_stokes_single_mode_decay() {
    let start = Instant::now();
    let system = GalerkinSystem::standard(2, 1, TAU).unwrap();
    let basis = system.basis();
    assert_eq!(basis.stokes_eigenvalue(0), 1.0);
    let mut initial = vec![0.0; system.n_modes()];
    initial[0] = 1.0;
    let nu = 0.3;
    let config = SimConfig {
        nu,
        dt: 1e-3,
        t_end: 1.0,
        initial,
        forcing: Forcing::None,
    };
    let record = run(&config, &system).unwrap();
    let amplitude = record.final_state()[0];
    let expected = (-nu * 1.0f64).exp();
    assert!(
        (amplitude - expected).abs() <= STOKES_ATOL,
        "amplitude {amplitude} vs {expected}"
    );
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < STOKES_BUDGET_SECS, "took {elapsed:.2} s");
    pass(2, "stokes_single_mode_decay");
}

#[test]
fn acceptance_03_energy_balance_second_order() {
    let system = GalerkinSystem::standard(2, 2, TAU).unwrap();
    let n = system.n_modes();
    let initial: Vec<f64> = {
        let raw = seeded_unit_coefficients(n, 31, 0);
        raw.iter()
            .enumerate()
            .map(|(i, a)| a / (1.0 + system.basis().stokes_eigenvalue(i)))
            .collect()
    };
    let forcing: Vec<f64> = seeded_unit_coefficients(n, 31, 1)
        .iter()
        .map(|a| 0.2 * a)
        .collect();
    let max_residual = |dt: f64| -> f64 {
        let config = SimConfig {
            nu: 0.05,
            dt,
            t_end: 0.2,
            initial: initial.clone(),
            forcing: Forcing::Steady(forcing.clone()),
        };
        let record = run(&config, &system).unwrap();
        energy_balance_residual(&record)
            .unwrap()
            .iter()
            .map(|r| r.abs())
            .fold(0.0, f64::max)
    };
    let r_coarse = max_residual(2e-3);
    let r_mid = max_residual(1e-3);
    let r_fine = max_residual(5e-4);
    assert!(
        r_coarse / r_mid >= BALANCE_ORDER_FACTOR,
        "2e-3 -> 1e-3 reduced only {}x",
        r_coarse / r_mid
    );
    assert!(
        r_mid / r_fine >= BALANCE_ORDER_FACTOR,
        "1e-3 -> 5e-4 reduced only {}x",
        r_mid / r_fine
    );
    pass(3, "energy_balance_second_order");
}

#[test]
fn acceptance_04_trilinear_identities() {
    let plane = Hyperplane::new(1.0, 1.0, 0.0).unwrap();
    let systems = [
        GalerkinSystem::standard(2, 2, TAU).unwrap(),
        GalerkinSystem::standard(3, 1, TAU).unwrap(),
        GalerkinSystem::restricted(2, TAU, &plane).unwrap(),
    ];
    for (family, system) in systems.iter().enumerate() {
        let n = system.n_modes();
        for i in 0..100u64 {
            let u = seeded_unit_coefficients(n, 40 + family as u64, 2 * i);
            let v = seeded_unit_coefficients(n, 40 + family as u64, 2 * i + 1);
            let uvv = system.trilinear_value(&u, &v, &v).unwrap();
            let uuu = system.trilinear_value(&u, &u, &u).unwrap();
            assert!(
                uvv.abs() <= TRILINEAR_ATOL,
                "family {family} pair {i}: |b(u,v,v)| = {uvv:e}"
            );
            assert!(
                uuu.abs() <= TRILINEAR_ATOL,
                "family {family} pair {i}: |b(u,u,u)| = {uuu:e}"
            );
        }
    }
    pass(4, "trilinear_identities");
}

/// Band-limited trig field with seeded amplitudes on |k_i| <= 2.
fn seeded_trig_field(grid: &Grid, n_components: usize, seed: u64) -> PhysicalField {
    let dim = grid.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = Vec::new();
    for _ in 0..n_components {
        let mut ks = Vec::new();
        let mut cos_amps = Vec::new();
        let mut sin_amps = Vec::new();
        for _ in 0..6 {
            let k: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2..3) as f64).collect();
            ks.extend_from_slice(&k);
            cos_amps.push(rng.gen_range(-1.0..1.0));
            sin_amps.push(rng.gen_range(-1.0..1.0));
        }
        terms.push((ks, cos_amps, sin_amps));
    }
    PhysicalField::from_fn(grid.clone(), n_components, |c, x| {
        let (ks, cos_amps, sin_amps) = &terms[c];
        let mut value = 0.0;
        for t in 0..cos_amps.len() {
            let phase: f64 = (0..dim).map(|a| ks[t * dim + a] * x[a]).sum();
            value += cos_amps[t] * phase.cos() + sin_amps[t] * phase.sin();
        }
        value
    })
    .unwrap()
}

fn field_max_abs_diff(a: &PhysicalField, b: &PhysicalField) -> f64 {
    (0..a.n_components())
        .map(|c| max_abs(&(a.component(c) - b.component(c))))
        .fold(0.0, f64::max)
}

#[test]
fn acceptance_05_leray_projection() {
    for (dim, points) in [(2usize, 16usize), (3, 12)] {
        let grid = Grid::new(dim, points, TAU).unwrap();
        for trial in 0..10u64 {
            // Idempotence on arbitrary band-limited fields.
            let field = seeded_trig_field(&grid, dim, 50 + 10 * dim as u64 + trial);
            let once = leray_project(&field).unwrap();
            let twice = leray_project(&once).unwrap();
            let idem = field_max_abs_diff(&twice, &once);
            assert!(
                idem <= LERAY_IDEMPOTENCE_ATOL,
                "{dim}D trial {trial}: idempotence residual {idem:e}"
            );

            // Gradients are annihilated. Only component 0 of the carrier
            // field is used as the potential.
            let potential = seeded_trig_field(&grid, dim, 90 + 10 * dim as u64 + trial);
            let grad = potential.gradient();
            let grad_field = PhysicalField::new(
                grid.clone(),
                (0..dim).map(|axis| grad.entry(axis, 0).clone()).collect(),
            )
            .unwrap();
            let projected = leray_project(&grad_field).unwrap();
            let zero = PhysicalField::zeros(grid.clone(), dim).unwrap();
            let killed = field_max_abs_diff(&projected, &zero);
            assert!(
                killed <= LERAY_GRADIENT_ATOL,
                "{dim}D trial {trial}: projected gradient {killed:e}"
            );

            // Solenoidal fields are fixed points.
            let basis = BasisSet::standard(dim, 2, TAU).unwrap();
            let coeffs = seeded_unit_coefficients(basis.len(), 130 + dim as u64, trial);
            let solenoidal = basis.synthesize(&coeffs, &grid).unwrap();
            let fixed = leray_project(&solenoidal).unwrap();
            let moved = field_max_abs_diff(&fixed, &solenoidal);
            assert!(
                moved <= LERAY_FIXED_ATOL,
                "{dim}D trial {trial}: solenoidal field moved {moved:e}"
            );
        }
    }
    pass(5, "leray_projection");
}

fn seeded_symmetric(rng: &mut ChaCha8Rng) -> SymMatrix {
    SymMatrix {
        m11: rng.gen_range(-1.0..1.0),
        m22: rng.gen_range(-1.0..1.0),
        m33: rng.gen_range(-1.0..1.0),
        m12: rng.gen_range(-1.0..1.0),
        m13: rng.gen_range(-1.0..1.0),
        m23: rng.gen_range(-1.0..1.0),
    }
}

#[test]
fn acceptance_06_ldl_against_direct_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let mut checked = 0;
    while checked < 100 {
        let m = seeded_symmetric(&mut rng);
        let factors = ldl_coefficients(&m);
        if factors.degenerate {
            continue;
        }
        checked += 1;
        for _ in 0..10 {
            let w = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let direct = m.apply(w);
            let via_ldl = factors.apply(w);
            let scale = direct.abs().max(1.0);
            assert!(
                (via_ldl - direct).abs() <= LDL_RTOL * scale,
                "matrix {checked}: {via_ldl} vs {direct}"
            );
        }
    }

    let diag = SymMatrix::diagonal(1.0, 1.0, -2.0);
    let factors = ldl_coefficients(&diag);
    assert_eq!(
        (factors.a1, factors.a2, factors.a3),
        (1.0, 1.0, -2.0),
        "diagonal pivots"
    );
    assert_eq!(factors.class, Definiteness::Indefinite);

    for _ in 0..100 {
        let mut m = seeded_symmetric(&mut rng);
        m.m33 = -(m.m11 + m.m22);
        assert_eq!(m.trace(), 0.0);
        let class = classify(&m);
        assert!(
            matches!(class, Definiteness::Indefinite | Definiteness::Zero),
            "trace-free matrix classified {class:?}"
        );
        if m.max_abs_entry() > 0.0 {
            assert_eq!(class, Definiteness::Indefinite);
        }
    }
    pass(6, "ldl_against_direct_form");
}

fn single_level_record(states: Vec<f64>) -> TrajectoryRecord {
    TrajectoryRecord {
        times: vec![0.0],
        states: vec![states],
        diagnostics: vec![],
        deriv_l2: 0.0,
        cfl_warnings: 0,
    }
}

#[test]
fn acceptance_07_quadform_criterion() {
    let system = GalerkinSystem::standard(2, 2, TAU).unwrap();
    let grid = Grid::new(2, 16, TAU).unwrap();
    let tg_coeffs = system.basis().analyze(&taylor_green(&grid).unwrap()).unwrap();

    let zero = single_level_record(vec![0.0; system.n_modes()]);
    let zero_cert = &criterion_theorem31(&zero, &system, 0.5, 1.0, 1.0).unwrap()[0];
    assert!(zero_cert.holds, "zero field must satisfy the criterion");

    let tg = single_level_record(tg_coeffs.clone());
    let cert = &criterion_theorem31(&tg, &system, 0.5, 1.0, 1.0).unwrap()[0];
    assert!(
        (cert.lhs - PI).abs() <= CRITERION_LHS_RTOL * PI,
        "lhs {} vs pi",
        cert.lhs
    );
    assert!(!cert.holds, "unit Taylor-Green must fail at nu = 1, c = 0.5");

    // Verdict is monotone in amplitude with a single flip at 1/pi.
    let amplitudes: Vec<f64> = [0.2, 0.5, 0.9, 0.999, 1.001, 1.1, 2.0, 5.0]
        .iter()
        .map(|q| q / PI)
        .collect();
    let verdicts: Vec<bool> = amplitudes
        .iter()
        .map(|alpha| {
            let scaled: Vec<f64> = tg_coeffs.iter().map(|a| a * alpha).collect();
            criterion_theorem31(&single_level_record(scaled), &system, 0.5, 1.0, 1.0).unwrap()[0]
                .holds
        })
        .collect();
    let flips = verdicts.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(flips, 1, "verdicts {verdicts:?} should flip exactly once");
    assert!(verdicts[0] && !verdicts[verdicts.len() - 1]);
    pass(7, "quadform_criterion");
}

#[test]
fn acceptance_08_interpolation_exponents() {
    let two = Exponent::Finite(2.0);
    let four = Exponent::Finite(4.0);
    assert_eq!(solve_sigma(3, four, two, two, 0, 1).unwrap(), 0.75);
    assert_eq!(solve_sigma(2, four, two, two, 0, 1).unwrap(), 0.5);

    let case_a = GNSParams::new(3, Exponent::Finite(3.0), Exponent::Finite(1.0), Exponent::Infinity, 0, 1)
        .unwrap();
    assert_eq!(validate_params(&case_a), Exclusion::ExclusionA);
    let case_b = GNSParams::new(2, Exponent::Infinity, two, two, 0, 1).unwrap();
    assert_eq!(case_b.sigma, 1.0);
    assert_eq!(validate_params(&case_b), Exclusion::ExclusionB);
    let interior = GNSParams::new(2, four, two, two, 0, 1).unwrap();
    assert_eq!(validate_params(&interior), Exclusion::None);
    pass(8, "interpolation_exponents");
}

#[test]
fn acceptance_09_interpolation_probe_constant() {
    let grid = Grid::new(2, 32, TAU).unwrap();
    let field = PhysicalField::from_fn(grid, 2, |c, x| if c == 0 { x[1].sin() } else { 0.0 })
        .unwrap();
    let params = GNSParams::new(
        2,
        Exponent::Finite(4.0),
        Exponent::Finite(2.0),
        Exponent::Finite(2.0),
        0,
        1,
    )
    .unwrap();
    let report = check_inequality(&field, &params, 1.0).unwrap();
    assert!(
        (report.ratio - GNS_PROBE_TARGET).abs() <= GNS_PROBE_ATOL,
        "probe ratio {} vs {GNS_PROBE_TARGET}",
        report.ratio
    );
    pass(9, "interpolation_probe_constant");
}

fn seeded_plane(rng: &mut ChaCha8Rng) -> Hyperplane {
    let draw = |rng: &mut ChaCha8Rng| -> f64 {
        let magnitude = rng.gen_range(0.5..2.0);
        if rng.gen_bool(0.5) {
            magnitude
        } else {
            -magnitude
        }
    };
    let a1 = draw(rng);
    let a2 = draw(rng);
    let b = rng.gen_range(-1.0..1.0);
    Hyperplane::new(a1, a2, b).unwrap()
}

#[test]
fn acceptance_10_hyperplane_restriction() {
    let plane = Hyperplane::new(1.0, 1.0, 0.0).unwrap();
    let elliptic = plane.elliptic_params();
    assert_eq!((elliptic.c11, elliptic.c22, elliptic.c12), (2.0, 2.0, 2.0));

    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let grid = Grid::new(2, 16, TAU).unwrap();
    for trial in 0..20u64 {
        let plane = seeded_plane(&mut rng);
        let system = GalerkinSystem::restricted(2, TAU, &plane).unwrap();
        assert!(
            system.stiffness().iter().all(|s| *s > 0.0),
            "trial {trial}: nonpositive symbol"
        );

        // Stream-function fields satisfy the section constraint. The
        // carrier fields only lend their first component.
        let psi = seeded_trig_field(&grid, 2, 200 + trial);
        let u3 = seeded_trig_field(&grid, 2, 300 + trial);
        let field =
            solenoidal_from_stream(psi.component(0), u3.component(0), &plane, &grid).unwrap();
        let divergence = restricted_divergence(&field, &plane).unwrap();
        let max_div = max_abs(&divergence);
        assert!(
            max_div <= STREAM_DIVERGENCE_ATOL,
            "trial {trial}: divergence {max_div:e}"
        );

        // Applying the first-order substitution twice reproduces the
        // second-order coefficients exactly.
        let sub = substitute_d3(&plane);
        assert_eq!(sub.second_order[0], sub.first_order[0] * sub.first_order[0]);
        assert_eq!(sub.second_order[1], sub.first_order[1] * sub.first_order[1]);
        assert_eq!(
            sub.second_order[2],
            2.0 * (sub.first_order[0] * sub.first_order[1])
        );
    }
    pass(10, "hyperplane_restriction");
}

#[test]
fn acceptance_11_section_coercivity() {
    let planes = [
        Hyperplane::new(1.0, 1.0, 0.0).unwrap(),
        Hyperplane::new(2.0, -1.0, 0.3).unwrap(),
    ];
    for (p, plane) in planes.iter().enumerate() {
        let system = GalerkinSystem::restricted(2, TAU, plane).unwrap();
        let basis = system.basis();
        for trial in 0..25u64 {
            let coeffs = seeded_unit_coefficients(basis.len(), 110 + p as u64, trial);
            let field = basis.synthesize(&coeffs, system.quadrature_grid()).unwrap();
            let report = coercivity_check(&field, plane).unwrap();
            assert!(
                report.holds,
                "plane {p} trial {trial}: elliptic {} + advection {} < dirichlet {}",
                report.elliptic_energy, report.advection_term, report.dirichlet_energy
            );
        }
    }
    pass(11, "section_coercivity");
}

#[test]
fn acceptance_12_discrete_uniqueness() {
    let plane = Hyperplane::new(1.0, 1.0, 0.0).unwrap();
    let system = GalerkinSystem::restricted(2, TAU, &plane).unwrap();
    let tg = taylor_green(&Grid::new(3, 16, TAU).unwrap()).unwrap();
    let section = restrict_field(&tg, &plane, system.quadrature_grid()).unwrap();
    let config = SimConfig {
        nu: 0.1,
        dt: 1e-3,
        t_end: 0.1,
        initial: system.basis().analyze(&section).unwrap(),
        forcing: Forcing::None,
    };
    let a = run(&config, &system).unwrap();
    let b = run(&config, &system).unwrap();
    for (level, (sa, sb)) in a.states.iter().zip(&b.states).enumerate() {
        for (x, y) in sa.iter().zip(sb) {
            assert_eq!(x.to_bits(), y.to_bits(), "level {level} differs");
        }
    }
    let diff = difference_trajectory(&a, &b).unwrap();
    assert!(diff.w_energy.iter().all(|e| *e == 0.0));
    assert!(diff.states.iter().flatten().all(|x| *x == 0.0));
    pass(12, "discrete_uniqueness");
}

#[test]
fn acceptance_13_gronwall_certificate() {
    let start = Instant::now();
    let plane = Hyperplane::new(1.0, 1.0, 0.0).unwrap();
    let system = GalerkinSystem::restricted(2, TAU, &plane).unwrap();
    let tg = taylor_green(&Grid::new(3, 16, TAU).unwrap()).unwrap();
    let section = restrict_field(&tg, &plane, system.quadrature_grid()).unwrap();
    let nu = 0.1;
    let config = SimConfig {
        nu,
        dt: 1e-3,
        t_end: 0.5,
        initial: system.basis().analyze(&section).unwrap(),
        forcing: Forcing::None,
    };

    // c = advection factor times an estimated Ladyzhenskaya constant.
    let params = GNSParams::new(
        2,
        Exponent::Finite(4.0),
        Exponent::Finite(2.0),
        Exponent::Finite(2.0),
        0,
        1,
    )
    .unwrap();
    let section_grid = Grid::new(2, 16, TAU).unwrap();
    let estimate = nslab::gns::estimate_constant(&params, &section_grid, 8, 0).unwrap();
    let c_eff = plane.advection_factor() * estimate.c_lower;
    let big_c = gronwall_constant(c_eff, nu).unwrap();

    let fine = Grid::new(2, 64, TAU).unwrap();
    for epsilon in [1e-3, 1e-6] {
        let (run_u, _, cert) =
            perturbation_experiment(&config, &system, epsilon, 0, big_c).unwrap();
        assert!(
            cert.holds,
            "epsilon {epsilon}: certificate fails, max ratio {}",
            cert.max_ratio
        );
        assert_eq!(cert.c_used, big_c);

        // Independent envelope: gradient energies from synthesis on a
        // refined grid with physical-space quadrature, same trapezoid.
        let g: Vec<f64> = run_u
            .states
            .iter()
            .map(|state| {
                let field = system.basis().synthesize(state, &fine).unwrap();
                let grad = field.gradient();
                let mut total = 0.0;
                for axis in 0..2 {
                    for c in 0..field.n_components() {
                        total += grad.entry_l2(axis, c).powi(2);
                    }
                }
                total
            })
            .collect();
        let w0 = cert.w_energy[0];
        let mut integral = 0.0;
        let mut oracle = vec![w0];
        for i in 1..g.len() {
            integral += 0.5 * (run_u.times[i] - run_u.times[i - 1]) * (g[i - 1] + g[i]);
            oracle.push(w0 * (2.0 * big_c * integral).exp());
        }
        for (i, (have, want)) in cert.envelope.iter().zip(&oracle).enumerate() {
            if *want == 0.0 {
                assert_eq!(*have, 0.0);
                continue;
            }
            let rel = (have - want).abs() / want;
            assert!(
                rel <= GRONWALL_ORACLE_RTOL,
                "epsilon {epsilon} level {i}: envelope {have} vs oracle {want} (rel {rel:e})"
            );
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < GRONWALL_BUDGET_SECS, "took {elapsed:.2} s");
    pass(13, "gronwall_certificate");
}

fn artifact_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|entry| {
            let entry = entry.unwrap();
            (
                entry.file_name().into_string().unwrap(),
                std::fs::read(entry.path()).unwrap(),
            )
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[test]
fn acceptance_14_artifact_determinism() {
    let configs = [
        "scenario = simulate\ngrid.n = 16\nbasis.k_max = 2\nsim.nu = 0.1\nsim.dt = 1e-2\n\
         sim.t_end = 0.2\nic = seeded_random(17, 1.0)\nseed = 4\noutputs.snapshot_every = 5\n",
        "scenario = uniqueness\nplane = 1,1,0\ngrid.n = 16\nbasis.k_max = 2\nsim.nu = 0.1\n\
         sim.dt = 1e-2\nsim.t_end = 0.1\nic = taylor_green\nuniqueness.epsilon = 1e-3\n\
         outputs.snapshot_every = 5\n",
        "scenario = gns\ngrid.n = 16\ngns.samples = 6\nseed = 9\n",
    ];
    for (i, text) in configs.iter().enumerate() {
        let config = parse_config(text).unwrap();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let report_a = run_scenario(&config, dir_a.path(), None).unwrap();
        let report_b = run_scenario(&config, dir_b.path(), None).unwrap();
        assert_eq!(report_a.exit_code, report_b.exit_code);
        let bytes_a = artifact_bytes(dir_a.path());
        let bytes_b = artifact_bytes(dir_b.path());
        assert_eq!(
            bytes_a.len(),
            bytes_b.len(),
            "config {i}: artifact sets differ"
        );
        for ((name_a, data_a), (name_b, data_b)) in bytes_a.iter().zip(&bytes_b) {
            assert_eq!(name_a, name_b, "config {i}: artifact names differ");
            assert_eq!(data_a, data_b, "config {i}: artifact {name_a} differs");
        }
    }
    pass(14, "artifact_determinism");
}
