//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantity. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines.

mod common;

use std::time::Instant;

use cdeuler::diagnostics::diagnostics;
use cdeuler::eos::PhaseTag;
use cdeuler::field::Field;
use cdeuler::geometry::{build_grids, InterfaceCurve, MappedGrid};
use cdeuler::interface::{matched_speed, robin_datum};
use cdeuler::output::{read_key_values, read_solution, write_solution};
use cdeuler::profiles::EntranceProfiles;
use cdeuler::solver::{
    sigma_scaling_study, solve_length_sweep, solve_truncated, study_ratios, SolverConfig,
};
use cdeuler::transport::{
    build_stream_function, extend_field, transport_fields, EXTENSION_COEFFS,
};
use common::*;

fn base_config() -> SolverConfig {
    SolverConfig {
        n_x: 64,
        n_s: 64,
        length: 10.0,
        ..Default::default()
    }
}

#[test]
fn criterion_01_background_fixed_point() {
    let consts = acceptance_constants();
    let profiles = EntranceProfiles::background(&consts);
    let config = base_config();
    let start = Instant::now();
    let sol = solve_truncated(&consts, &profiles, &config).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let outer = sol.history.outer_changes.len();
    assert!(outer <= 2, "outer iterations {outer} > 2");
    let f_dev = sol.f.f.iter().fold(0.0_f64, |m, v| m.max((v - 0.5).abs()));
    assert!(f_dev <= 1e-12, "interface deviation {f_dev:.3e}");
    let report = diagnostics(&sol, &profiles);
    let max_res = report.max_residual();
    assert!(max_res <= 1e-11, "max residual {max_res:.3e}");
    assert!(elapsed <= 10.0, "runtime {elapsed:.2}s exceeds 10s");
    println!(
        "PASS criterion 1: background fixed point (outer = {outer}, |f - 1/2| = {f_dev:.2e}, \
         max residual = {max_res:.2e}, {elapsed:.2}s)"
    );
}

#[test]
fn criterion_02_linearization_identity() {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let consts = acceptance_constants();
    let mut rng = StdRng::seed_from_u64(2024);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let phase = if rng.random::<bool>() { PhaseTag::Plus } else { PhaseTag::Minus };
        let s0 = consts.s0(phase);
        let q0 = consts.q0(phase);
        let zeta = s0 * rng.random_range(-0.05..0.05);
        let mut a = [0.0_f64; 3];
        let mut b = [0.0_f64; 3];
        for k in 0..3 {
            a[k] = rng.random_range(-0.05..0.05);
            b[k] = rng.random_range(-0.05..0.05);
        }
        let f = consts.remainder_flux(phase, zeta, a, b).unwrap();
        let (a11, a22, a33) = consts.linearization_coeffs(phase);
        let alpha = [a11, a22, a33];
        let a_full = consts
            .momentum_flux(phase, s0 + zeta, cdeuler::field::add3(q0, a), b)
            .unwrap();
        let a_base = consts.momentum_flux(phase, s0, q0, [0.0; 3]).unwrap();
        let rho = consts
            .density(phase, s0 + zeta, cdeuler::field::add3(q0, cdeuler::field::add3(a, b)))
            .unwrap();
        let scale = consts.rho0(phase) * consts.u0(phase);
        for i in 0..3 {
            let lhs = alpha[i] * a[i] - f[i];
            let rhs = a_full[i] - a_base[i] + rho * b[i];
            let rel = (lhs - rhs).abs() / scale.max(lhs.abs()).max(rhs.abs());
            worst = worst.max(rel);
        }
    }
    assert!(worst <= 1e-12, "identity deviation {worst:.3e}");
    println!("PASS criterion 2: linearization identity over 100 random states (max {worst:.2e})");
}

#[test]
fn criterion_03_linearization_coefficients() {
    let consts = acceptance_constants();
    let h = 1e-5;
    let mut worst = 0.0_f64;
    for phase in PhaseTag::BOTH {
        let (a11, a22, a33) = consts.linearization_coeffs(phase);
        let rho0 = consts.rho0(phase);
        let m0 = consts.mach0(phase);
        assert!((a11 - rho0 * (1.0 - m0 * m0)).abs() < 1e-14);
        assert!(a22 == rho0 && a33 == rho0);
        let s0 = consts.s0(phase);
        let q0 = consts.q0(phase);
        for (j, expect) in [(0usize, a11), (1, a22), (2, a33)] {
            for i in 0..3 {
                let mut ap = q0;
                let mut am = q0;
                ap[j] += h;
                am[j] -= h;
                let fp = consts.momentum_flux(phase, s0, ap, [0.0; 3]).unwrap();
                let fm = consts.momentum_flux(phase, s0, am, [0.0; 3]).unwrap();
                let d = (fp[i] - fm[i]) / (2.0 * h);
                let target = if i == j { expect } else { 0.0 };
                worst = worst.max((d - target).abs());
            }
        }
    }
    assert!(worst <= 1e-6, "finite-difference deviation {worst:.3e}");
    println!("PASS criterion 3: linearization coefficients match central differences ({worst:.2e})");
}

#[test]
fn criterion_04_elliptic_convergence_order() {
    let consts = acceptance_constants();
    let grids = [16usize, 32, 64, 128];
    for phase in PhaseTag::BOTH {
        let phi_errors: Vec<f64> = grids
            .iter()
            .map(|&n| phi_mms_error(&consts, phase, 2.0, n))
            .collect();
        let psi_errors: Vec<f64> = grids
            .iter()
            .map(|&n| psi_mms_error(phase, 2.0, n))
            .collect();
        for (name, errors) in [("phi", &phi_errors), ("psi", &psi_errors)] {
            let ratios = refinement_ratios(errors);
            assert_eq!(ratios.len(), 3);
            for r in &ratios {
                assert!(
                    (3.5..=4.5).contains(r),
                    "{name} {phase}: ratios {ratios:?} outside [3.5, 4.5] (errors {errors:?})"
                );
            }
            println!(
                "PASS criterion 4: {name} solver {phase} phase L2 ratios {:?}",
                ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>()
            );
        }
    }
}

#[test]
fn criterion_05_transport_exactness_at_background() {
    let consts = acceptance_constants();
    let profiles = EntranceProfiles::preset(&consts, 0.05, 1e-3).unwrap();
    let curve = InterfaceCurve::background(10.0, 64);
    let (plus, minus) = build_grids(&curve, 64, 64).unwrap();
    let mut worst_trace = 0.0_f64;
    let mut worst_s = 0.0_f64;
    for (phase, grid) in [(PhaseTag::Plus, &plus), (PhaseTag::Minus, &minus)] {
        let flux = Field::constant(64, 64, consts.rho0(phase) * consts.u0(phase));
        let sf = build_stream_function(phase, grid, &flux, 1e-4).unwrap();
        let tf = transport_fields(phase, &sf, &profiles).unwrap();
        for i in 0..=64 {
            for j in 0..=64 {
                let r = grid.r_at(i, j);
                let r0 = sf.trace_to_entrance(i, j).unwrap();
                worst_trace = worst_trace.max((r0 - r).abs());
                let expect = profiles.s_en(phase, r);
                worst_s = worst_s.max((tf.s.at(i, j) - expect).abs() / expect.abs());
            }
        }
    }
    assert!(worst_trace <= 1e-12, "trace deviation {worst_trace:.3e}");
    assert!(worst_s <= 1e-12, "entropy deviation {worst_s:.3e}");
    println!(
        "PASS criterion 5: background transport exact (trace {worst_trace:.2e}, S {worst_s:.2e})"
    );
}

#[test]
fn criterion_06_extension_coefficients() {
    // Moment conditions hold exactly for (6, -32, 27).
    for m in 0..3 {
        let sum: f64 = EXTENSION_COEFFS
            .iter()
            .enumerate()
            .map(|(k, c)| c * (-1.0 / (k + 1) as f64).powi(m))
            .sum();
        assert_eq!(sum, 1.0, "moment {m}");
    }
    // The extension continues an arbitrary quadratic in the mapped coordinate.
    let (nx, ns) = (12usize, 48usize);
    let curve = InterfaceCurve::background(3.0, nx);
    let (plus, minus) = build_grids(&curve, nx, ns).unwrap();
    let mut worst = 0.0_f64;
    for (grid, phase) in [(&minus, PhaseTag::Minus), (&plus, PhaseTag::Plus)] {
        let enlarged = MappedGrid::enlarged(phase, 3.0, nx, ns);
        let q = |s: f64| -1.3 + 2.4 * s + 0.9 * s * s;
        let field = Field::from_fn(nx, ns, |_, j| q(j as f64 / ns as f64));
        let ext = extend_field(grid, &field, &enlarged);
        for i in 0..=nx {
            for j in 0..=ns {
                let s_nat = grid.s_of(i, enlarged.r_at(i, j));
                worst = worst.max((ext.at(i, j) - q(s_nat)).abs());
            }
        }
    }
    assert!(worst <= 1e-12, "quadratic reproduction error {worst:.3e}");
    println!("PASS criterion 6: extension coefficients (6, -32, 27); quadratic error {worst:.2e}");
}

#[test]
fn criterion_07_pressure_match_background() {
    let consts = acceptance_constants();
    let y = matched_speed(&consts, consts.s0(PhaseTag::Minus), consts.p0).unwrap();
    let dev_y = (y - consts.u0_minus * consts.u0_minus).abs();
    assert!(dev_y <= 1e-13, "matched speed deviation {dev_y:.3e}");
    let curve = InterfaceCurve::background(10.0, 64);
    let ys = vec![consts.u0_minus * consts.u0_minus; 65];
    let a = robin_datum(&consts, &curve, &ys, 0.0).unwrap();
    let dev_a = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    assert!(dev_a <= 1e-13, "Robin datum deviation {dev_a:.3e}");
    println!("PASS criterion 7: background pressure matching (Y {dev_y:.2e}, A {dev_a:.2e})");
}

#[test]
fn criterion_08_two_phase_coupling_at_convergence() {
    let consts = acceptance_constants();
    let profiles = EntranceProfiles::preset(&consts, 0.05, 1e-3).unwrap();
    let config = SolverConfig {
        n_x: 128,
        n_s: 128,
        length: 10.0,
        ..Default::default()
    };
    let sol = solve_truncated(&consts, &profiles, &config).unwrap();
    let report = diagnostics(&sol, &profiles);
    let p_jump = report.get("interface_pressure_jump");
    let un = report
        .get("interface_normal_velocity_minus")
        .max(report.get("interface_normal_velocity_plus"));
    assert!(
        p_jump <= 1e-4 * consts.p0,
        "pressure jump {p_jump:.3e} above 1e-4 p0"
    );
    assert!(
        un <= 1e-4 * consts.u0_minus,
        "normal velocity {un:.3e} above 1e-4 u0m"
    );
    let factor = sol
        .history
        .middle_contraction_factor()
        .expect("free-boundary sweep long enough to measure decay");
    assert!(factor < 1.0, "contraction factor {factor}");
    // Geometric decay: every recorded sweep of at least 3 iterations must
    // shrink monotonically in the large.
    for sweep in &sol.history.middle_changes {
        if sweep.len() >= 3 {
            assert!(
                sweep.last().unwrap() < &sweep[0],
                "no decay in sweep {sweep:?}"
            );
        }
    }
    println!(
        "PASS criterion 8: coupling at sigma 1e-3, 128x128 ([p] = {p_jump:.2e}, \
         u.n = {un:.2e}, contraction = {factor:.2e})"
    );
}

#[test]
fn criterion_09_linear_sigma_scaling() {
    let consts = acceptance_constants();
    let base = EntranceProfiles::preset(&consts, 0.05, 1e-3).unwrap();
    let config = base_config();
    let rows = sigma_scaling_study(&consts, &base, &config, &[2.5e-4, 5e-4, 1e-3]).unwrap();
    let ratios = study_ratios(&rows);
    let mut worst: (String, f64) = (String::new(), 2.0);
    for pair in &ratios {
        for (k, r) in pair {
            assert!(
                (1.6..=2.4).contains(r),
                "ledger `{k}` ratio {r} outside [1.6, 2.4]; all ratios {ratios:?}"
            );
            if (r - 2.0).abs() > (worst.1 - 2.0).abs() {
                worst = (k.clone(), *r);
            }
        }
    }
    println!(
        "PASS criterion 9: sigma doubling scales every ledger norm in [1.6, 2.4] \
         (worst `{}` = {:.3})",
        worst.0, worst.1
    );
}

#[test]
fn criterion_10_length_uniformity() {
    let consts = acceptance_constants();
    let profiles = EntranceProfiles::preset(&consts, 0.05, 1e-3).unwrap();
    let config = SolverConfig {
        n_x: 64,
        n_s: 64,
        length: 10.0,
        ..Default::default()
    };
    let (solutions, agreements) =
        solve_length_sweep(&consts, &profiles, &config, &[10.0, 15.0, 20.0]).unwrap();
    assert_eq!(solutions.len(), 3);
    // L = 10 vs 15 on [0, 5]: every ledger field within 1e-3 relative.
    let first = &agreements[0];
    assert_eq!(first.window, 5.0);
    let mut worst: (String, f64) = (String::new(), 0.0);
    for (k, v) in &first.discrepancies {
        assert!(
            *v <= 1e-3,
            "field `{k}` disagrees by {v:.3e} between L = 10 and L = 15"
        );
        if *v > worst.1 {
            worst = (k.clone(), *v);
        }
    }
    // The discrepancy must not grow with L on the shared window [0, 5].
    let later = cdeuler::solver::compare_on_window(&solutions[1], &solutions[2], 5.0);
    for (k, v) in &later.discrepancies {
        let earlier = first.discrepancies[k];
        assert!(
            *v <= earlier.max(1e-9) * 1.5,
            "field `{k}` discrepancy grew with L: {earlier:.3e} -> {v:.3e}"
        );
    }
    println!(
        "PASS criterion 10: L-sweep agreement on [0, 5] (worst field `{}` = {:.2e}), \
         no growth at larger L",
        worst.0, worst.1
    );
}

#[test]
fn criterion_11_physical_admissibility() {
    let consts = acceptance_constants();
    for sigma in [0.0, 1e-3] {
        let profiles = if sigma == 0.0 {
            EntranceProfiles::background(&consts)
        } else {
            EntranceProfiles::preset(&consts, 0.05, sigma).unwrap()
        };
        let config = base_config();
        let sol = solve_truncated(&consts, &profiles, &config).unwrap();
        let report = diagnostics(&sol, &profiles);
        for phase in PhaseTag::BOTH {
            assert!(report.get(&format!("density_min_{phase}")) > 0.0);
            assert!(report.get(&format!("subsonic_margin_{phase}")) > 0.0);
            let bern = report.get(&format!("bernoulli_deviation_{phase}"));
            assert!(bern <= 1e-10, "Bernoulli deviation {bern:.3e} at sigma {sigma}");
        }
    }
    println!("PASS criterion 11: density positive, subsonic, Bernoulli exact to 1e-10");
}

#[test]
fn criterion_12_determinism_and_round_trips() {
    let consts = acceptance_constants();
    let profiles = EntranceProfiles::preset(&consts, 0.05, 1e-3).unwrap();
    let config = SolverConfig {
        n_x: 24,
        n_s: 24,
        length: 10.0,
        ..Default::default()
    };
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let sol = solve_truncated(&consts, &profiles, &config).unwrap();
        let report = diagnostics(&sol, &profiles);
        write_solution(&sol, &report, dir.path()).unwrap();
    }
    for name in ["interface.txt", "fields_plus.txt", "fields_minus.txt", "summary.txt"] {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    // Recomputing diagnostics from the saved files reproduces the summary.
    let back = read_solution(&consts, profiles.sigma, dir_a.path()).unwrap();
    let recomputed = diagnostics(&back, &profiles);
    let stored = read_key_values(&dir_a.path().join("summary.txt")).unwrap();
    let mut worst = 0.0_f64;
    for (k, v) in &recomputed.entries {
        if let Some(sv) = stored.get(k) {
            worst = worst.max((sv - v).abs() / v.abs().max(1.0));
        }
    }
    assert!(worst <= 1e-12, "recomputation deviates by {worst:.3e}");
    println!(
        "PASS criterion 12: bit-identical outputs; residual recomputation deviation {worst:.2e}"
    );
}
