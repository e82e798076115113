//! The coupled solver: an outer transport loop around a free-boundary loop
//! around the per-phase elliptic solves, followed by reconstruction of the
//! physical fields. Also the truncation-length sweep and the
//! perturbation-scaling study built on top of single solves.

use std::collections::BTreeMap;

use crate::elliptic::{curl_azimuthal, solve_phi, solve_psi, EllipticParams};
use crate::eos::{FlowConstants, PhaseTag};
use crate::error::{Error, LoopLevel};
use crate::field::Field;
use crate::geometry::{
    build_grids, interp_cubic_1d, interp_field_cubic, InterfaceCurve, MappedGrid,
};
use crate::interface::{interface_data, plus_trace, update_interface};
use crate::profiles::EntranceProfiles;
use crate::transport::{build_stream_function, extend_field, transport_fields};
use crate::Result;

/// Grid sizes, tolerances, damping factors and iteration caps of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub n_x: usize,
    pub n_s: usize,
    pub length: f64,
    pub tol_outer: f64,
    pub tol_fb: f64,
    pub tol_picard: f64,
    pub tol_linear: f64,
    pub omega: f64,
    pub omega_f: f64,
    pub max_outer: usize,
    pub max_middle: usize,
    pub max_inner: usize,
    /// Axial mass-flux floor; `None` takes a tenth of the smaller background
    /// flux.
    pub axial_floor: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n_x: 64,
            n_s: 64,
            length: 10.0,
            tol_outer: 1e-9,
            tol_fb: 1e-10,
            tol_picard: 1e-10,
            tol_linear: 1e-11,
            omega: 1.0,
            omega_f: 1.0,
            max_outer: 100,
            max_middle: 200,
            max_inner: 100,
            axial_floor: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, path: &str| -> Result<()> {
            if v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(path, format!("must be positive, got {v}")))
            }
        };
        positive(self.length, "solver.length")?;
        positive(self.tol_outer, "solver.tol_outer")?;
        positive(self.tol_fb, "solver.tol_fb")?;
        positive(self.tol_picard, "solver.tol_picard")?;
        positive(self.tol_linear, "solver.tol_linear")?;
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(Error::config("solver.omega", "must lie in (0, 1]"));
        }
        if !(self.omega_f > 0.0 && self.omega_f <= 1.0) {
            return Err(Error::config("solver.omega_f", "must lie in (0, 1]"));
        }
        for (v, path) in [
            (self.max_outer, "solver.max_outer"),
            (self.max_middle, "solver.max_middle"),
            (self.max_inner, "solver.max_inner"),
        ] {
            if v < 1 {
                return Err(Error::config(path, "iteration cap must be at least 1"));
            }
        }
        if self.n_x < 4 || self.n_s < 4 {
            return Err(Error::config("solver.n_x/n_s", "need at least 4 cells"));
        }
        Ok(())
    }

    fn elliptic_params(&self, axial_floor: f64) -> EllipticParams {
        EllipticParams {
            tol_picard: self.tol_picard,
            tol_linear: self.tol_linear,
            omega: self.omega,
            max_inner: self.max_inner,
            axial_floor,
        }
    }
}

/// Discrete fields of one phase on its boundary-fitted grid.
#[derive(Debug, Clone)]
pub struct PhaseState {
    pub grid: MappedGrid,
    pub s: Field,
    pub lambda: Field,
    /// Swirl speed `Lambda / r` (finite on the axis).
    pub w: Field,
    pub phi_hat: Field,
    pub psi: Field,
    pub rho: Field,
    pub u_x: Field,
    pub u_r: Field,
    pub u_theta: Field,
    pub p: Field,
}

/// Convergence trace of one solve.
#[derive(Debug, Clone, Default)]
pub struct IterationHistory {
    /// Max-norm change of the transported fields per outer sweep.
    pub outer_changes: Vec<f64>,
    /// Interface changes per free-boundary sweep, grouped by outer sweep.
    pub middle_changes: Vec<Vec<f64>>,
    pub total_middle_iterations: usize,
    pub total_picard_iterations: usize,
}

impl IterationHistory {
    /// Geometric-mean contraction factor of the longest free-boundary sweep.
    pub fn middle_contraction_factor(&self) -> Option<f64> {
        self.middle_changes
            .iter()
            .filter(|h| h.len() >= 3 && h[0] > 0.0)
            .map(|h| {
                let first = h[0];
                let last = *h.last().unwrap();
                (last / first).powf(1.0 / (h.len() - 1) as f64)
            })
            .reduce(f64::max)
    }
}

/// A converged solve: interface, per-phase Helmholtz and physical fields,
/// and the iteration history.
#[derive(Debug, Clone)]
pub struct Solution {
    pub constants: FlowConstants,
    pub sigma: f64,
    pub f: InterfaceCurve,
    pub plus: PhaseState,
    pub minus: PhaseState,
    pub history: IterationHistory,
}

impl Solution {
    pub fn phase(&self, phase: PhaseTag) -> &PhaseState {
        match phase {
            PhaseTag::Plus => &self.plus,
            PhaseTag::Minus => &self.minus,
        }
    }

    /// Max-norm sizes of the solution's deviation from the background: the
    /// quantities controlled linearly by the entrance perturbation.
    pub fn ledger_norms(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        out.insert("f".into(), self.f.c2_norm());
        for phase in PhaseTag::BOTH {
            let st = self.phase(phase);
            let s0 = self.constants.s0(phase);
            let dev = st
                .s
                .data
                .iter()
                .fold(0.0_f64, |m, v| m.max((v - s0).abs()));
            out.insert(format!("s_{phase}"), dev);
            out.insert(format!("w_{phase}"), st.w.max_abs());
            out.insert(format!("phi_{phase}"), st.phi_hat.max_abs());
            out.insert(format!("psi_{phase}"), st.psi.max_abs());
        }
        out
    }
}

/// Axial mass flux `rho(S, q) q . e_x` of one phase state.
fn axial_mass_flux(
    consts: &FlowConstants,
    phase: PhaseTag,
    grid: &MappedGrid,
    s: &Field,
    phi_hat: &Field,
    psi: &Field,
    w: &Field,
) -> Result<Field> {
    let (t_x, t_r) = curl_azimuthal(grid, psi);
    let u0 = consts.u0(phase);
    let mut flux = Field::zeros(grid.nx, grid.ns);
    for i in 0..=grid.nx {
        for j in 0..=grid.ns {
            let q = [
                u0 + grid.ddx(phi_hat, i, j) + t_x.at(i, j),
                grid.ddr(phi_hat, i, j) + t_r.at(i, j),
                w.at(i, j),
            ];
            let rho = consts.density(phase, s.at(i, j), q)?;
            flux.set(i, j, rho * q[0]);
        }
    }
    Ok(flux)
}

/// Interpolate a field from one grid onto another sharing the same axial
/// nodes (per-column cubic in the source's mapped coordinate).
fn regrid_columns(src: &MappedGrid, field: &Field, dst: &MappedGrid) -> Field {
    debug_assert_eq!(src.nx, dst.nx);
    Field::from_fn(dst.nx, dst.ns, |i, j| {
        let s = src.s_of(i, dst.r_at(i, j)).clamp(0.0, 1.0);
        crate::geometry::column_value(src, field, i, s)
    })
}

/// Vorticity source field for the stream problem of one phase; zero on the
/// axis row (owned by a Dirichlet condition there).
#[allow(clippy::too_many_arguments)]
fn vorticity_field(
    consts: &FlowConstants,
    phase: PhaseTag,
    grid: &MappedGrid,
    s_star: &Field,
    w_star: &Field,
    phi_hat: &Field,
    psi_star: &Field,
    axial_floor: f64,
) -> Result<Field> {
    let (t_x, t_r) = curl_azimuthal(grid, psi_star);
    let u0 = consts.u0(phase);
    let mut g = Field::zeros(grid.nx, grid.ns);
    for i in 0..=grid.nx {
        for j in 0..=grid.ns {
            let r = grid.r_at(i, j);
            if r == 0.0 {
                continue;
            }
            let grad_phi = [
                u0 + grid.ddx(phi_hat, i, j),
                grid.ddr(phi_hat, i, j),
                0.0,
            ];
            let t = [t_x.at(i, j), t_r.at(i, j), w_star.at(i, j)];
            let lambda = r * w_star.at(i, j);
            let dw_dr = grid.ddr(w_star, i, j);
            let dlambda_dr = w_star.at(i, j) + r * dw_dr;
            let ds_dr = grid.ddr(s_star, i, j);
            let val = consts.vorticity_source(
                phase,
                s_star.at(i, j),
                lambda,
                ds_dr,
                dlambda_dr,
                grad_phi,
                t,
                r,
                axial_floor,
            )?;
            g.set(i, j, val);
        }
    }
    Ok(g)
}

/// State carried across free-boundary sweeps.
struct MiddleState {
    curve: InterfaceCurve,
    grid_plus: MappedGrid,
    grid_minus: MappedGrid,
    s_plus: Field,
    s_minus: Field,
    w_plus: Field,
    w_minus: Field,
    phi_plus: Field,
    phi_minus: Field,
    psi_plus: Field,
    psi_minus: Field,
}

/// Solve the truncated problem on the cylinder of length `config.length`.
///
/// Nesting: the outer loop updates the transported entropy/swirl via
/// streamline transport and extension; the middle loop re-fits the grids to
/// the current interface, solves the four elliptic problems with the
/// pressure-matching data, and updates the interface from the minus-phase
/// mass flux; the inner Picard loops live inside the potential solves.
pub fn solve_truncated(
    consts: &FlowConstants,
    profiles: &EntranceProfiles,
    config: &SolverConfig,
) -> Result<Solution> {
    config.validate()?;
    profiles.validate_support()?;
    let axial_floor = config
        .axial_floor
        .unwrap_or_else(|| consts.default_axial_floor());
    let params = config.elliptic_params(axial_floor);
    let (nx, ns) = (config.n_x, config.n_s);
    let length = config.length;

    // Transported quantities live on fixed enlarged-domain grids covering
    // every admissible interface position.
    let enlarged_plus = MappedGrid::enlarged(PhaseTag::Plus, length, nx, ns);
    let enlarged_minus = MappedGrid::enlarged(PhaseTag::Minus, length, nx, ns);
    let mut s_star_plus = Field::constant(nx, ns, consts.s0(PhaseTag::Plus));
    let mut s_star_minus = Field::constant(nx, ns, consts.s0(PhaseTag::Minus));
    let mut w_star_plus = Field::zeros(nx, ns);
    let mut w_star_minus = Field::zeros(nx, ns);

    let mut curve = InterfaceCurve::background(length, nx);
    let (mut grid_plus, mut grid_minus) = build_grids(&curve, nx, ns)?;
    let mut psi_plus = Field::zeros(nx, ns);
    let mut psi_minus = Field::zeros(nx, ns);
    let mut history = IterationHistory::default();
    let w_seed = profiles.w_seed();

    let mut last_middle: Option<MiddleState> = None;
    let mut converged = false;

    for outer in 1..=config.max_outer {
        // ---- middle loop: free boundary + elliptic solves -----------------
        let mut omega_f = config.omega_f;
        let mut middle_history: Vec<f64> = Vec::new();
        let mut fb_converged = false;
        let mut growth_streak = 0usize;
        let mut halvings = 0usize;

        for sweep in 1..=config.max_middle {
            let wrap = |e: Error, phase: Option<PhaseTag>| {
                e.in_loop(LoopLevel::FreeBoundary, phase, sweep)
            };
            let sweep_curve = curve.clone();
            let (gp, gm) = build_grids(&sweep_curve, nx, ns).map_err(|e| wrap(e, None))?;

            // Frozen transported fields on the current grids.
            let s_plus = regrid_columns(&enlarged_plus, &s_star_plus, &gp);
            let s_minus = regrid_columns(&enlarged_minus, &s_star_minus, &gm);
            let w_plus = regrid_columns(&enlarged_plus, &w_star_plus, &gp);
            let w_minus = regrid_columns(&enlarged_minus, &w_star_minus, &gm);
            // Previous stream iterates re-fitted to the new grids.
            let psi_p_star = regrid_columns(&grid_plus, &psi_plus, &gp);
            let psi_m_star = regrid_columns(&grid_minus, &psi_minus, &gm);

            // Plus phase first: its trace feeds the interface data.
            let (phi_p, rep_p) = solve_phi(
                consts, PhaseTag::Plus, &gp, &s_plus, &w_plus, &psi_p_star, profiles, &params,
            )
            .map_err(|e| wrap(e, Some(PhaseTag::Plus)))?;
            history.total_picard_iterations += rep_p.iterations;
            let g_plus = vorticity_field(
                consts, PhaseTag::Plus, &gp, &s_plus, &w_plus, &phi_p, &psi_p_star, axial_floor,
            )
            .map_err(|e| wrap(e, Some(PhaseTag::Plus)))?;
            let (psi_p, _) = solve_psi(PhaseTag::Plus, &gp, &g_plus, None, &params)
                .map_err(|e| wrap(e, Some(PhaseTag::Plus)))?;

            // Pressure trace of the plus phase, extrapolated to the interface.
            let (tpx, tpr) = curl_azimuthal(&gp, &psi_p);
            let mut p_field = Field::zeros(nx, ns);
            for i in 0..=nx {
                for j in 0..=3.min(ns) {
                    let q = [
                        consts.u0_plus + gp.ddx(&phi_p, i, j) + tpx.at(i, j),
                        gp.ddr(&phi_p, i, j) + tpr.at(i, j),
                        w_plus.at(i, j),
                    ];
                    let pv = consts
                        .pressure(PhaseTag::Plus, s_plus.at(i, j), q)
                        .map_err(|e| wrap(e, Some(PhaseTag::Plus)))?;
                    p_field.set(i, j, pv);
                }
            }
            let p_plus = plus_trace(&gp, &p_field);

            // Matched speed and Robin datum per interface node.
            let s_trace: Vec<f64> = (0..=nx).map(|i| s_minus.at(i, ns)).collect();
            let idata = interface_data(consts, &sweep_curve, &s_trace, p_plus, w_seed)
                .map_err(|e| wrap(e, None))?;
            // The stream row imposes grad(psi).n - mu psi = g. The identity
            // -(1/r) grad(r psi).n_minus = -(curl(psi e_theta)).tau turns the
            // tangential-speed matching (curl(psi e_theta)).tau =
            // sqrt(Y - w^2) - u0.tau into g = -A.
            let a_data: Vec<f64> = idata.a.iter().map(|v| -v).collect();

            // Minus phase with the pressure-matching data.
            let (phi_m, rep_m) = solve_phi(
                consts, PhaseTag::Minus, &gm, &s_minus, &w_minus, &psi_m_star, profiles, &params,
            )
            .map_err(|e| wrap(e, Some(PhaseTag::Minus)))?;
            history.total_picard_iterations += rep_m.iterations;
            let g_minus = vorticity_field(
                consts, PhaseTag::Minus, &gm, &s_minus, &w_minus, &phi_m, &psi_m_star, axial_floor,
            )
            .map_err(|e| wrap(e, Some(PhaseTag::Minus)))?;
            let (psi_m, _) = solve_psi(PhaseTag::Minus, &gm, &g_minus, Some(&a_data), &params)
                .map_err(|e| wrap(e, Some(PhaseTag::Minus)))?;

            // Interface update from the minus-phase mass flux.
            let flux = axial_mass_flux(
                consts, PhaseTag::Minus, &gm, &s_minus, &phi_m, &psi_m, &w_minus,
            )
            .map_err(|e| wrap(e, Some(PhaseTag::Minus)))?;
            let updated = match update_interface(consts, &curve, &gm, &flux, omega_f) {
                Ok(c) => c,
                Err(e @ (Error::NegativeRadicand { .. } | Error::InterfaceEscape { .. })) => {
                    if halvings >= 6 {
                        return Err(wrap(e, Some(PhaseTag::Minus)));
                    }
                    omega_f *= 0.5;
                    halvings += 1;
                    continue;
                }
                Err(e) => return Err(wrap(e, Some(PhaseTag::Minus))),
            };

            let delta: f64 = updated
                .f
                .iter()
                .zip(&curve.f)
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            if let Some(&prev) = middle_history.last() {
                if delta > prev {
                    growth_streak += 1;
                    if growth_streak >= 3 && halvings < 6 {
                        omega_f *= 0.5;
                        halvings += 1;
                        growth_streak = 0;
                    }
                } else {
                    growth_streak = 0;
                }
            }
            middle_history.push(delta);
            history.total_middle_iterations += 1;

            grid_plus = gp.clone();
            grid_minus = gm.clone();
            psi_plus = psi_p.clone();
            psi_minus = psi_m.clone();
            curve = updated;
            // The recorded state stays on the curve its grids/fields were
            // solved on; the post-update curve differs by less than tol_fb
            // once the sweep converges.
            last_middle = Some(MiddleState {
                curve: sweep_curve,
                grid_plus: gp,
                grid_minus: gm,
                s_plus,
                s_minus,
                w_plus,
                w_minus,
                phi_plus: phi_p,
                phi_minus: phi_m,
                psi_plus: psi_p,
                psi_minus: psi_m,
            });

            if delta < config.tol_fb {
                fb_converged = true;
                break;
            }
        }
        if !fb_converged {
            return Err(Error::FreeBoundaryDiverged {
                iterations: config.max_middle,
                history: middle_history,
            });
        }
        history.middle_changes.push(middle_history);

        // ---- transport update on the converged middle state ----------------
        let state = last_middle.as_ref().expect("middle loop ran");
        let mut outer_change = 0.0_f64;
        let mut new_star: Vec<(Field, Field)> = Vec::with_capacity(2);
        for phase in [PhaseTag::Plus, PhaseTag::Minus] {
            let (grid, s_g, w_g, phi, psi, enlarged, s_star, w_star) = match phase {
                PhaseTag::Plus => (
                    &state.grid_plus,
                    &state.s_plus,
                    &state.w_plus,
                    &state.phi_plus,
                    &state.psi_plus,
                    &enlarged_plus,
                    &s_star_plus,
                    &w_star_plus,
                ),
                PhaseTag::Minus => (
                    &state.grid_minus,
                    &state.s_minus,
                    &state.w_minus,
                    &state.phi_minus,
                    &state.psi_minus,
                    &enlarged_minus,
                    &s_star_minus,
                    &w_star_minus,
                ),
            };
            let flux = axial_mass_flux(consts, phase, grid, s_g, phi, psi, w_g)
                .map_err(|e| e.in_loop(LoopLevel::Outer, Some(phase), outer))?;
            let sf = build_stream_function(phase, grid, &flux, axial_floor)
                .map_err(|e| e.in_loop(LoopLevel::Outer, Some(phase), outer))?;
            let tf = transport_fields(phase, &sf, profiles)
                .map_err(|e| e.in_loop(LoopLevel::Outer, Some(phase), outer))?;
            let s_ext = extend_field(grid, &tf.s, enlarged);
            let w_ext = extend_field(grid, &tf.w, enlarged);
            outer_change = outer_change
                .max(s_ext.max_diff(s_star))
                .max(w_ext.max_diff(w_star));
            new_star.push((s_ext, w_ext));
        }
        let (s_p, w_p) = new_star.remove(0);
        let (s_m, w_m) = new_star.remove(0);
        s_star_plus = s_p;
        w_star_plus = w_p;
        s_star_minus = s_m;
        w_star_minus = w_m;
        history.outer_changes.push(outer_change);

        if outer_change < config.tol_outer {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::OuterDiverged {
            iterations: config.max_outer,
            history: history.outer_changes.clone(),
        });
    }

    // ---- reconstruction -----------------------------------------------------
    let state = last_middle.expect("converged solve has a middle state");
    let mut phases: Vec<PhaseState> = Vec::with_capacity(2);
    for phase in [PhaseTag::Plus, PhaseTag::Minus] {
        let (grid, s_g, phi, psi) = match phase {
            PhaseTag::Plus => (&state.grid_plus, &state.s_plus, &state.phi_plus, &state.psi_plus),
            PhaseTag::Minus => (
                &state.grid_minus,
                &state.s_minus,
                &state.phi_minus,
                &state.psi_minus,
            ),
        };
        // Final transported fields on the final grids.
        let w_g = match phase {
            PhaseTag::Plus => &state.w_plus,
            PhaseTag::Minus => &state.w_minus,
        };
        let flux = axial_mass_flux(consts, phase, grid, s_g, phi, psi, w_g)?;
        let sf = build_stream_function(phase, grid, &flux, axial_floor)?;
        let tf = transport_fields(phase, &sf, profiles)?;

        let (t_x, t_r) = curl_azimuthal(grid, psi);
        let u0 = consts.u0(phase);
        let mut rho = Field::zeros(grid.nx, grid.ns);
        let mut u_x = Field::zeros(grid.nx, grid.ns);
        let mut u_r = Field::zeros(grid.nx, grid.ns);
        let mut p = Field::zeros(grid.nx, grid.ns);
        for i in 0..=grid.nx {
            for j in 0..=grid.ns {
                let q = [
                    u0 + grid.ddx(phi, i, j) + t_x.at(i, j),
                    grid.ddr(phi, i, j) + t_r.at(i, j),
                    tf.w.at(i, j),
                ];
                let s_val = tf.s.at(i, j);
                let rho_v = consts.density(phase, s_val, q)?;
                rho.set(i, j, rho_v);
                u_x.set(i, j, q[0]);
                u_r.set(i, j, q[1]);
                p.set(i, j, s_val * rho_v.powf(consts.gamma));
            }
        }
        phases.push(PhaseState {
            grid: grid.clone(),
            s: tf.s,
            lambda: tf.lambda,
            u_theta: tf.w.clone(),
            w: tf.w,
            phi_hat: phi.clone(),
            psi: psi.clone(),
            rho,
            u_x,
            u_r,
            p,
        });
    }
    let minus = phases.pop().expect("two phases");
    let plus = phases.pop().expect("two phases");
    Ok(Solution {
        constants: *consts,
        sigma: profiles.sigma,
        f: state.curve,
        plus,
        minus,
        history,
    })
}

/// Field-by-field agreement between two solutions on a shared axial window,
/// in mapped coordinates, relative to the perturbation magnitude sigma.
#[derive(Debug, Clone)]
pub struct PairAgreement {
    pub length_a: f64,
    pub length_b: f64,
    pub window: f64,
    /// Max discrepancies keyed like the estimate ledger, divided by sigma.
    pub discrepancies: BTreeMap<String, f64>,
}

/// Compare two solutions on `[0, window]`. Every ledger field is bounded by
/// a constant times sigma, so sigma is the common scale of the
/// discrepancies; a tiny floor keeps the background case finite.
pub fn compare_on_window(a: &Solution, b: &Solution, window: f64) -> PairAgreement {
    let mut out = BTreeMap::new();
    let scale = a.sigma.max(b.sigma).max(1e-14);

    // Interface curve.
    let mut df = 0.0_f64;
    for (i, &x) in a.f.x.iter().enumerate() {
        if x > window {
            break;
        }
        let fb = interp_cubic_1d(&b.f.f, b.f.dx(), 0.0, x);
        df = df.max((a.f.f[i] - fb).abs());
    }
    out.insert("f".into(), df / scale);

    for phase in PhaseTag::BOTH {
        let sa = a.phase(phase);
        let sb = b.phase(phase);
        let fields: [(&str, &Field, &Field); 4] = [
            ("s", &sa.s, &sb.s),
            ("w", &sa.w, &sb.w),
            ("phi", &sa.phi_hat, &sb.phi_hat),
            ("psi", &sa.psi, &sb.psi),
        ];
        for (name, fa, fb) in fields {
            let mut diff = 0.0_f64;
            for i in 0..=sa.grid.nx {
                let x = sa.grid.x[i];
                if x > window {
                    break;
                }
                for j in 0..=sa.grid.ns {
                    let s_coord = sa.grid.s_at(j);
                    let vb = interp_field_cubic(&sb.grid, fb, x, s_coord);
                    diff = diff.max((fa.at(i, j) - vb).abs());
                }
            }
            out.insert(format!("{name}_{phase}"), diff / scale);
        }
    }
    PairAgreement {
        length_a: a.f.length,
        length_b: b.f.length,
        window,
        discrepancies: out,
    }
}

/// Solve at each truncation length and compare consecutive solutions on the
/// shared sub-cylinder `[0, min(L)/2]`. The axial resolution (cell size) of
/// the first entry is kept for all lengths.
pub fn solve_length_sweep(
    consts: &FlowConstants,
    profiles: &EntranceProfiles,
    config: &SolverConfig,
    lengths: &[f64],
) -> Result<(Vec<Solution>, Vec<PairAgreement>)> {
    if lengths.len() < 2 {
        return Err(Error::config(
            "solver.lengths",
            "length sweep needs at least two lengths",
        ));
    }
    for pair in lengths.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::config("solver.lengths", "lengths must increase"));
        }
    }
    let dx = config.length_step(lengths[0]);
    let mut solutions = Vec::with_capacity(lengths.len());
    for &l in lengths {
        let mut c = config.clone();
        c.length = l;
        c.n_x = (l / dx).round() as usize;
        solutions.push(solve_truncated(consts, profiles, &c)?);
    }
    let mut agreements = Vec::new();
    for k in 0..solutions.len() - 1 {
        let window = 0.5 * lengths[k].min(lengths[k + 1]);
        agreements.push(compare_on_window(&solutions[k], &solutions[k + 1], window));
    }
    Ok((solutions, agreements))
}

impl SolverConfig {
    fn length_step(&self, first_length: f64) -> f64 {
        first_length / self.n_x as f64
    }
}

/// One row of the perturbation-scaling study.
#[derive(Debug, Clone)]
pub struct SigmaStudyRow {
    pub sigma: f64,
    pub ledger: BTreeMap<String, f64>,
}

/// Solve for each perturbation magnitude and record the estimate-ledger
/// norms; consumers check that the norms scale linearly in sigma.
pub fn sigma_scaling_study(
    consts: &FlowConstants,
    base_profiles: &EntranceProfiles,
    config: &SolverConfig,
    sigmas: &[f64],
) -> Result<Vec<SigmaStudyRow>> {
    let mut rows = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let profiles = if sigma == 0.0 {
            EntranceProfiles::background(consts)
        } else {
            base_profiles.scaled_to(sigma)
        };
        let sol = solve_truncated(consts, &profiles, config)?;
        rows.push(SigmaStudyRow {
            sigma,
            ledger: sol.ledger_norms(),
        });
    }
    Ok(rows)
}

/// Ratios `norm(sigma_{k+1}) / norm(sigma_k)` per ledger entry, for rows with
/// nonzero perturbation.
pub fn study_ratios(rows: &[SigmaStudyRow]) -> Vec<BTreeMap<String, f64>> {
    rows.windows(2)
        .map(|pair| {
            let mut out = BTreeMap::new();
            for (key, hi) in &pair[1].ledger {
                if let Some(lo) = pair[0].ledger.get(key) {
                    if *lo > 0.0 {
                        out.insert(key.clone(), hi / lo);
                    }
                }
            }
            out
        })
        .collect()
}
