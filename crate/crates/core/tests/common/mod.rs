//! Shared helpers for the integration and acceptance suites: manufactured
//! solutions for both elliptic solvers and the standard test background.

#![allow(dead_code)]

use cdeuler::elliptic::{EllipticOperator, EllipticProblem, SideCondition};
use cdeuler::eos::{FlowConstants, PhaseTag};
use cdeuler::field::Field;
use cdeuler::geometry::{build_grids, InterfaceCurve, MappedGrid};

pub const PI: f64 = std::f64::consts::PI;

/// Background of the acceptance criteria.
pub fn acceptance_constants() -> FlowConstants {
    FlowConstants::new(1.4, 0.8, 1.0, 0.05, 0.5, 1.0).unwrap()
}

/// Smooth admissible interface curve with `f(0) = 1/2`, `f'(0) = f'(L) = 0`.
pub fn mms_curve(length: f64, nx: usize, amp: f64) -> InterfaceCurve {
    let x: Vec<f64> = (0..=nx).map(|i| length * i as f64 / nx as f64).collect();
    let mut f: Vec<f64> = x
        .iter()
        .map(|&xi| 0.5 + amp * ((2.0 * PI * xi / length).cos() - 1.0))
        .collect();
    f[0] = 0.5;
    InterfaceCurve { length, x, f }
}

/// L2 norm of the nodal error against an exact solution.
pub fn l2_error(grid: &MappedGrid, field: &Field, exact: impl Fn(f64, f64) -> f64) -> f64 {
    let mut sum = 0.0;
    for i in 0..=grid.nx {
        for j in 0..=grid.ns {
            let d = field.at(i, j) - exact(grid.x[i], grid.r_at(i, j));
            sum += d * d;
        }
    }
    (sum / grid.n_nodes() as f64).sqrt()
}

/// Manufactured solution of the potential operator
/// `a11 d_xx u + a22 (d_rr + 1/r d_r) u = rhs` on one phase grid, with the
/// standard boundary-condition kinds of the potential problem. Returns the
/// L2 error of the discrete solution.
pub fn phi_mms_error(consts: &FlowConstants, phase: PhaseTag, length: f64, n: usize) -> f64 {
    let curve = mms_curve(length, n, 0.02);
    let (plus, minus) = build_grids(&curve, n, n).unwrap();
    let grid = match phase {
        PhaseTag::Plus => &plus,
        PhaseTag::Minus => &minus,
    };
    let (a11, a22, _) = consts.linearization_coeffs(phase);

    let u = |x: f64, r: f64| (PI * x / length).cos() * (PI * r).cos();
    let ux = |x: f64, r: f64| -(PI / length) * (PI * x / length).sin() * (PI * r).cos();
    let ur = |x: f64, r: f64| -PI * (PI * x / length).cos() * (PI * r).sin();
    let uxx = |x: f64, r: f64| -(PI / length) * (PI / length) * u(x, r);
    let urr = |x: f64, r: f64| -PI * PI * u(x, r);

    // Interior forcing; at the axis the radial part doubles.
    let rhs = Field::from_fn(grid.nx, grid.ns, |i, j| {
        let (x, r) = (grid.x[i], grid.r_at(i, j));
        if r == 0.0 {
            a11 * uxx(x, r) + 2.0 * a22 * urr(x, r)
        } else {
            a11 * uxx(x, r) + a22 * (urr(x, r) + ur(x, r) / r)
        }
    });

    let fp = curve.derivative();
    let entrance = SideCondition::Dirichlet {
        values: (0..=grid.ns).map(|j| u(0.0, grid.r_at(0, j))).collect(),
    };
    let exit = SideCondition::Dirichlet {
        values: (0..=grid.ns).map(|j| u(length, grid.r_at(grid.nx, j))).collect(),
    };
    let (lower, upper) = match phase {
        PhaseTag::Plus => {
            // Oblique interface datum grad(u).n+ and homogeneous wall Neumann
            // (d_r u vanishes at r = 1 for this solution).
            let vals: Vec<f64> = (0..=grid.nx)
                .map(|i| {
                    let (x, r) = (grid.x[i], grid.f[i]);
                    let w = (1.0 + fp[i] * fp[i]).sqrt();
                    (fp[i] * ux(x, r) - ur(x, r)) / w
                })
                .collect();
            (
                SideCondition::NormalGradient { values: vals },
                SideCondition::neumann0(grid.nx + 1),
            )
        }
        PhaseTag::Minus => {
            let vals: Vec<f64> = (0..=grid.nx)
                .map(|i| u(grid.x[i], grid.f[i]))
                .collect();
            (
                SideCondition::neumann0(grid.nx + 1),
                SideCondition::Dirichlet { values: vals },
            )
        }
    };
    let problem = EllipticProblem {
        phase,
        grid,
        operator: EllipticOperator {
            coeff_xx: a11,
            coeff_rad: a22,
            swirl_term: false,
        },
        entrance,
        exit,
        lower,
        upper,
    };
    let factored = problem.factor(1e-11).unwrap();
    let (sol, _res) = factored.solve(&rhs).unwrap();
    l2_error(grid, &sol, u)
}

/// Manufactured solution of the azimuthal stream operator
/// `-(d_xx + d_rr + 1/r d_r - 1/r^2) psi = G` with the standard side kinds:
/// entrance/exit reflection-Neumann, Dirichlet wall/interface (plus) and
/// axis Dirichlet + interface Robin (minus).
pub fn psi_mms_error(phase: PhaseTag, length: f64, n: usize) -> f64 {
    let curve = mms_curve(length, n, 0.02);
    let (plus, minus) = build_grids(&curve, n, n).unwrap();
    let grid = match phase {
        PhaseTag::Plus => &plus,
        PhaseTag::Minus => &minus,
    };

    let u = |x: f64, r: f64| (2.0 * PI * x / length).cos() * (PI * r).sin();
    let ux = |x: f64, r: f64| {
        -(2.0 * PI / length) * (2.0 * PI * x / length).sin() * (PI * r).sin()
    };
    let ur = |x: f64, r: f64| PI * (2.0 * PI * x / length).cos() * (PI * r).cos();
    let uxx = |x: f64, r: f64| -(2.0 * PI / length) * (2.0 * PI / length) * u(x, r);
    let urr = |x: f64, r: f64| -PI * PI * u(x, r);

    let rhs = Field::from_fn(grid.nx, grid.ns, |i, j| {
        let (x, r) = (grid.x[i], grid.r_at(i, j));
        if r == 0.0 {
            0.0 // axis row is Dirichlet
        } else {
            -(uxx(x, r) + urr(x, r) + ur(x, r) / r - u(x, r) / (r * r))
        }
    });

    let fp = curve.derivative();
    let entrance = SideCondition::neumann0(grid.ns + 1);
    let exit = SideCondition::neumann0(grid.ns + 1);
    let (lower, upper) = match phase {
        PhaseTag::Plus => (
            SideCondition::Dirichlet {
                values: (0..=grid.nx).map(|i| u(grid.x[i], grid.f[i])).collect(),
            },
            SideCondition::Dirichlet {
                values: (0..=grid.nx).map(|i| u(grid.x[i], 1.0)).collect(),
            },
        ),
        PhaseTag::Minus => {
            let mu: Vec<f64> = (0..=grid.nx)
                .map(|i| -1.0 / (grid.f[i] * (1.0 + fp[i] * fp[i]).sqrt()))
                .collect();
            let values: Vec<f64> = (0..=grid.nx)
                .map(|i| {
                    let (x, r) = (grid.x[i], grid.f[i]);
                    let w = (1.0 + fp[i] * fp[i]).sqrt();
                    let grad_n = (-fp[i] * ux(x, r) + ur(x, r)) / w;
                    grad_n - mu[i] * u(x, r)
                })
                .collect();
            (
                SideCondition::Dirichlet {
                    values: vec![0.0; grid.nx + 1],
                },
                SideCondition::Robin { mu, values },
            )
        }
    };
    let problem = EllipticProblem {
        phase,
        grid,
        operator: EllipticOperator::azimuthal_stream(),
        entrance,
        exit,
        lower,
        upper,
    };
    let factored = problem.factor(1e-11).unwrap();
    let (sol, _res) = factored.solve(&rhs).unwrap();
    l2_error(grid, &sol, u)
}

/// Error ratios between successive grid refinements.
pub fn refinement_ratios(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| w[0] / w[1]).collect()
}
