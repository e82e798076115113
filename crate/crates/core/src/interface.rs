//! Two-phase coupling across the contact interface: the pressure-matched
//! tangential speed, the Robin datum fed to the minus-phase stream problem,
//! and the mass-flux update of the interface curve.

use crate::eos::FlowConstants;
use crate::error::Error;
use crate::field::Field;
use crate::geometry::{InterfaceCurve, MappedGrid};
use crate::Result;

/// Per-node interface data assembled during one free-boundary sweep.
#[derive(Debug, Clone)]
pub struct InterfaceData {
    /// Plus-phase pressure trace.
    pub p_plus: Vec<f64>,
    /// Matched squared meridional+swirl speed of the minus phase.
    pub y: Vec<f64>,
    /// Robin datum for the minus-phase stream problem.
    pub a: Vec<f64>,
    /// Swirl carried along the interface streamline.
    pub swirl_at_seed: f64,
}

/// Assemble the pressure-matching data of one sweep: the matched squared
/// speed and the Robin datum per interface node.
pub fn interface_data(
    consts: &FlowConstants,
    curve: &InterfaceCurve,
    s_minus_trace: &[f64],
    p_plus: Vec<f64>,
    swirl_at_seed: f64,
) -> Result<InterfaceData> {
    assert_eq!(s_minus_trace.len(), p_plus.len());
    let mut y = Vec::with_capacity(p_plus.len());
    for (s, p) in s_minus_trace.iter().zip(&p_plus) {
        y.push(matched_speed(consts, *s, *p)?);
    }
    let a = robin_datum(consts, curve, &y, swirl_at_seed)?;
    Ok(InterfaceData {
        p_plus,
        y,
        a,
        swirl_at_seed,
    })
}

/// Squared minus-phase speed forced by pressure continuity:
/// `Y = 2 (B0m - gamma/(gamma-1) p_plus^{1-1/gamma} S_minus^{1/gamma})`.
/// Decreasing in both arguments.
pub fn matched_speed(consts: &FlowConstants, s_minus_trace: f64, p_plus_trace: f64) -> Result<f64> {
    if s_minus_trace <= 0.0 {
        return Err(Error::NonPositiveEntropy(s_minus_trace));
    }
    if p_plus_trace <= 0.0 {
        return Err(Error::config(
            "interface.p_plus",
            format!("plus-phase pressure trace must be positive, got {p_plus_trace}"),
        ));
    }
    let g = consts.gamma;
    let y = 2.0
        * (consts.b0(crate::eos::PhaseTag::Minus)
            - g / (g - 1.0) * p_plus_trace.powf(1.0 - 1.0 / g) * s_minus_trace.powf(1.0 / g));
    if y <= 0.0 {
        return Err(Error::NegativeMatchedSpeed(y));
    }
    Ok(y)
}

/// Robin datum of the minus-phase stream problem:
/// `A = -sqrt(Y - w_seed^2) + u0_minus / sqrt(1 + f'^2)`.
pub fn robin_datum(
    consts: &FlowConstants,
    curve: &InterfaceCurve,
    y: &[f64],
    swirl_at_seed: f64,
) -> Result<Vec<f64>> {
    let fp = curve.derivative();
    assert_eq!(y.len(), fp.len());
    let mut out = Vec::with_capacity(y.len());
    for (k, (&yv, &d)) in y.iter().zip(&fp).enumerate() {
        let rad = yv - swirl_at_seed * swirl_at_seed;
        if rad < 0.0 {
            return Err(Error::NegativeMatchedSpeed(rad)).map_err(|e| {
                e.in_loop(crate::error::LoopLevel::FreeBoundary, None, k)
            });
        }
        out.push(-rad.sqrt() + consts.u0_minus / (1.0 + d * d).sqrt());
    }
    Ok(out)
}

/// Interface trace of a plus-phase node field by one-sided second-order
/// extrapolation from the first three interior rows.
pub fn plus_trace(grid: &MappedGrid, field: &Field) -> Vec<f64> {
    debug_assert_eq!(grid.phase, crate::eos::PhaseTag::Plus);
    (0..=grid.nx)
        .map(|i| 3.0 * field.at(i, 1) - 3.0 * field.at(i, 2) + field.at(i, 3))
        .collect()
}

/// Mass-flux update of the interface: per column,
/// `defect(x) = int_0^{1/2} t flux(0,t) dt - int_0^{f*(x)} t flux(x,t) dt`
/// and `f_new = sqrt(f*^2 + 2 defect / (rho0m u0m))`. Under-relaxation acts
/// on the squared radius, `f_new^2 = f*^2 + omega_f * 2 defect / scale`, so
/// halving `omega_f` can always pull the radicand back into range; the fixed
/// points do not depend on `omega_f`. The entrance value stays exactly 1/2.
pub fn update_interface(
    consts: &FlowConstants,
    f_star: &InterfaceCurve,
    grid_minus: &MappedGrid,
    flux: &Field,
    omega_f: f64,
) -> Result<InterfaceCurve> {
    debug_assert_eq!(grid_minus.phase, crate::eos::PhaseTag::Minus);
    let nx = f_star.nx();
    assert_eq!(grid_minus.nx, nx);
    let scale = consts.rho0_minus * consts.u0_minus;
    let entrance = column_mass_flux(grid_minus, flux, 0);
    let mut f_new = Vec::with_capacity(nx + 1);
    for i in 0..=nx {
        let section = column_mass_flux(grid_minus, flux, i);
        let defect = entrance - section;
        let fs = f_star.f[i];
        let radicand = fs * fs + omega_f * 2.0 * defect / scale;
        if radicand <= 0.0 {
            return Err(Error::NegativeRadicand {
                x: f_star.x[i],
                radicand,
            });
        }
        f_new.push(radicand.sqrt());
    }
    // The entrance defect vanishes identically (both integrals run over the
    // same column); anything else is a quadrature bug.
    debug_assert!(
        (f_new[0] - 0.5).abs() < 1e-12,
        "entrance defect {:.3e}",
        f_new[0] - 0.5
    );
    f_new[0] = 0.5;
    for (i, &v) in f_new.iter().enumerate() {
        if !(v > 0.25 && v < 0.75) || !v.is_finite() {
            return Err(Error::InterfaceEscape {
                x: f_star.x[i],
                f: v,
            });
        }
    }
    Ok(InterfaceCurve {
        length: f_star.length,
        x: f_star.x.clone(),
        f: f_new,
    })
}

/// Trapezoidal `int_0^{f(x_i)} t flux(x_i, t) dt` over one minus-grid column.
pub fn column_mass_flux(grid: &MappedGrid, flux: &Field, i: usize) -> f64 {
    let mut total = 0.0;
    for j in 1..=grid.ns {
        let (r0, r1) = (grid.r_at(i, j - 1), grid.r_at(i, j));
        total += 0.5 * (r1 - r0) * (r0 * flux.at(i, j - 1) + r1 * flux.at(i, j));
    }
    total
}
