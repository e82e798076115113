//! Residual diagnostics of a solution: interior Euler residuals, interface
//! jump conditions, boundary-data residuals, physical admissibility margins,
//! and the estimate-ledger norms.

use std::collections::BTreeMap;

use crate::eos::PhaseTag;
use crate::field::Field;
use crate::interface::column_mass_flux;
use crate::profiles::EntranceProfiles;
use crate::solver::{PhaseState, Solution};

/// Ordered key/value report; keys prefixed `residual_`, `interface_`,
/// `wall_`, `entrance_` and `bernoulli_` measure equation and boundary
/// residuals, `ledger_` keys are the perturbation-size norms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub entries: BTreeMap<String, f64>,
}

impl DiagnosticsReport {
    /// Largest entry among the equation/boundary residual groups.
    pub fn max_residual(&self) -> f64 {
        self.entries
            .iter()
            .filter(|(k, _)| {
                k.starts_with("residual_")
                    || k.starts_with("interface_")
                    || k.starts_with("wall_")
                    || k.starts_with("entrance_")
                    || k.starts_with("bernoulli_")
            })
            .fold(0.0_f64, |m, (_, v)| m.max(v.abs()))
    }

    pub fn get(&self, key: &str) -> f64 {
        self.entries[key]
    }
}

fn interior_max(grid: &crate::geometry::MappedGrid, f: &Field) -> f64 {
    let mut m = 0.0_f64;
    for i in 1..grid.nx {
        for j in 1..grid.ns {
            m = m.max(f.at(i, j).abs());
        }
    }
    m
}

fn phase_residuals(
    entries: &mut BTreeMap<String, f64>,
    consts: &crate::eos::FlowConstants,
    phase: PhaseTag,
    st: &PhaseState,
) {
    let g = &st.grid;
    let (nx, ns) = (g.nx, g.ns);
    let b0 = consts.b0(phase);
    let gamma = consts.gamma;

    // Products entering the conservative Euler residuals.
    let field = |f: &dyn Fn(usize, usize) -> f64| Field::from_fn(nx, ns, f);
    let rho_ux = field(&|i, j| st.rho.at(i, j) * st.u_x.at(i, j));
    let rho_ur = field(&|i, j| st.rho.at(i, j) * st.u_r.at(i, j));
    let rho_uxux_p = field(&|i, j| st.rho.at(i, j) * st.u_x.at(i, j) * st.u_x.at(i, j) + st.p.at(i, j));
    let rho_uxur = field(&|i, j| st.rho.at(i, j) * st.u_x.at(i, j) * st.u_r.at(i, j));
    let rho_urur_p = field(&|i, j| st.rho.at(i, j) * st.u_r.at(i, j) * st.u_r.at(i, j) + st.p.at(i, j));
    let rho_uxut = field(&|i, j| st.rho.at(i, j) * st.u_x.at(i, j) * st.u_theta.at(i, j));
    let rho_urut = field(&|i, j| st.rho.at(i, j) * st.u_r.at(i, j) * st.u_theta.at(i, j));
    let bern = field(&|i, j| {
        let speed2 = st.u_x.at(i, j) * st.u_x.at(i, j)
            + st.u_r.at(i, j) * st.u_r.at(i, j)
            + st.u_theta.at(i, j) * st.u_theta.at(i, j);
        speed2 / 2.0 + gamma * st.p.at(i, j) / ((gamma - 1.0) * st.rho.at(i, j))
    });
    let rho_ux_b = field(&|i, j| rho_ux.at(i, j) * bern.at(i, j));
    let rho_ur_b = field(&|i, j| rho_ur.at(i, j) * bern.at(i, j));

    let mut cont = Field::zeros(nx, ns);
    let mut mom_x = Field::zeros(nx, ns);
    let mut mom_r = Field::zeros(nx, ns);
    let mut mom_t = Field::zeros(nx, ns);
    let mut energy = Field::zeros(nx, ns);
    for i in 1..nx {
        for j in 1..ns {
            let r = g.r_at(i, j);
            cont.set(
                i,
                j,
                g.ddx(&rho_ux, i, j) + g.ddr(&rho_ur, i, j) + rho_ur.at(i, j) / r,
            );
            mom_x.set(
                i,
                j,
                g.ddx(&rho_uxux_p, i, j) + g.ddr(&rho_uxur, i, j) + rho_uxur.at(i, j) / r,
            );
            mom_r.set(
                i,
                j,
                g.ddx(&rho_uxur, i, j)
                    + g.ddr(&rho_urur_p, i, j)
                    + (st.rho.at(i, j) * st.u_r.at(i, j) * st.u_r.at(i, j)
                        - st.rho.at(i, j) * st.u_theta.at(i, j) * st.u_theta.at(i, j))
                        / r,
            );
            mom_t.set(
                i,
                j,
                g.ddx(&rho_uxut, i, j) + g.ddr(&rho_urut, i, j) + 2.0 * rho_urut.at(i, j) / r,
            );
            energy.set(
                i,
                j,
                g.ddx(&rho_ux_b, i, j) + g.ddr(&rho_ur_b, i, j) + rho_ur_b.at(i, j) / r,
            );
        }
    }
    entries.insert(format!("residual_continuity_{phase}"), interior_max(g, &cont));
    entries.insert(format!("residual_momentum_x_{phase}"), interior_max(g, &mom_x));
    entries.insert(format!("residual_momentum_r_{phase}"), interior_max(g, &mom_r));
    entries.insert(format!("residual_momentum_theta_{phase}"), interior_max(g, &mom_t));
    entries.insert(format!("residual_energy_{phase}"), interior_max(g, &energy));

    // Bernoulli deviation and admissibility margins over all nodes.
    let mut bern_dev = 0.0_f64;
    let mut min_rho = f64::INFINITY;
    let mut min_margin = f64::INFINITY;
    for i in 0..=nx {
        for j in 0..=ns {
            bern_dev = bern_dev.max((bern.at(i, j) - b0).abs());
            min_rho = min_rho.min(st.rho.at(i, j));
            let speed2 = st.u_x.at(i, j) * st.u_x.at(i, j)
                + st.u_r.at(i, j) * st.u_r.at(i, j)
                + st.u_theta.at(i, j) * st.u_theta.at(i, j);
            let c2 = gamma * st.p.at(i, j) / st.rho.at(i, j);
            min_margin = min_margin.min(1.0 - (speed2 / c2).sqrt());
        }
    }
    entries.insert(format!("bernoulli_deviation_{phase}"), bern_dev);
    entries.insert(format!("density_min_{phase}"), min_rho);
    entries.insert(format!("subsonic_margin_{phase}"), min_margin);
}

/// Full residual report of a solution. Entrance-data residuals are measured
/// against the given profiles.
pub fn diagnostics(sol: &Solution, profiles: &EntranceProfiles) -> DiagnosticsReport {
    let mut entries = BTreeMap::new();
    let consts = &sol.constants;

    for phase in PhaseTag::BOTH {
        phase_residuals(&mut entries, consts, phase, sol.phase(phase));
    }

    // Interface jump conditions.
    let nx = sol.f.nx();
    let ns_m = sol.minus.grid.ns;
    let fp = sol.f.derivative();
    let mut p_jump = 0.0_f64;
    let mut un_minus = 0.0_f64;
    let mut un_plus = 0.0_f64;
    for i in 0..=nx {
        let w = (1.0 + fp[i] * fp[i]).sqrt();
        let pm = sol.minus.p.at(i, ns_m);
        let pp = sol.plus.p.at(i, 0);
        p_jump = p_jump.max((pm - pp).abs());
        let um = (-fp[i] * sol.minus.u_x.at(i, ns_m) + sol.minus.u_r.at(i, ns_m)) / w;
        let up = (fp[i] * sol.plus.u_x.at(i, 0) - sol.plus.u_r.at(i, 0)) / w;
        un_minus = un_minus.max(um.abs());
        un_plus = un_plus.max(up.abs());
    }
    entries.insert("interface_pressure_jump".into(), p_jump);
    entries.insert("interface_normal_velocity_minus".into(), un_minus);
    entries.insert("interface_normal_velocity_plus".into(), un_plus);

    // Mass-flux balance of the minus phase: every section carries the
    // entrance flux once the interface is a streamline.
    let entrance_flux = column_mass_flux(&sol.minus.grid, &minus_flux(sol), 0);
    let mut mass_defect = 0.0_f64;
    let flux = minus_flux(sol);
    for i in 0..=nx {
        mass_defect = mass_defect.max((column_mass_flux(&sol.minus.grid, &flux, i) - entrance_flux).abs());
    }
    entries.insert("interface_mass_defect".into(), mass_defect);

    // Wall slip.
    let ns_p = sol.plus.grid.ns;
    let mut slip = 0.0_f64;
    for i in 0..=nx {
        slip = slip.max(sol.plus.u_r.at(i, ns_p).abs());
    }
    entries.insert("wall_slip".into(), slip);

    // Entrance data residuals; the radial-speed one measures the
    // Neumann/Dirichlet discrepancy of the potential formulation.
    for phase in PhaseTag::BOTH {
        let st = sol.phase(phase);
        let g = &st.grid;
        let mut v_res = 0.0_f64;
        let mut w_res = 0.0_f64;
        let mut s_res = 0.0_f64;
        let mut dxs_res = 0.0_f64;
        for j in 0..=g.ns {
            let r = g.r_at(0, j);
            v_res = v_res.max((-st.u_r.at(0, j) - profiles.v(phase, r)).abs());
            w_res = w_res.max((st.u_theta.at(0, j) - profiles.w(phase, r)).abs());
            s_res = s_res.max((st.s.at(0, j) - profiles.s_en(phase, r)).abs());
            // Transport compatibility: d_x S vanishes at the exit column and,
            // where the radial entrance speed vanishes, at the entrance too.
            if profiles.v(phase, r) == 0.0 {
                dxs_res = dxs_res.max(g.ddx(&st.s, 0, j).abs());
            }
            dxs_res = dxs_res.max(g.ddx(&st.s, g.nx, j).abs());
        }
        entries.insert(format!("entrance_v_residual_{phase}"), v_res);
        entries.insert(format!("entrance_w_residual_{phase}"), w_res);
        entries.insert(format!("entrance_s_residual_{phase}"), s_res);
        entries.insert(format!("compat_dx_s_{phase}"), dxs_res);
    }

    // Interface geometry compatibility at the ends.
    let (slope0, slope_l) = sol.f.end_slopes();
    entries.insert("compat_f_slope_entrance".into(), slope0.abs());
    entries.insert("compat_f_slope_exit".into(), slope_l.abs());

    // Estimate ledger.
    for (k, v) in sol.ledger_norms() {
        entries.insert(format!("ledger_{k}"), v);
    }
    entries.insert("sigma".into(), sol.sigma);

    DiagnosticsReport { entries }
}

fn minus_flux(sol: &Solution) -> Field {
    Field::from_fn(sol.minus.grid.nx, sol.minus.grid.ns, |i, j| {
        sol.minus.rho.at(i, j) * sol.minus.u_x.at(i, j)
    })
}
