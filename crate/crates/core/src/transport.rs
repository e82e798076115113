//! Streamline transport of entropy and angular momentum density via
//! stream-function level sets, and the three-point reflection extension of
//! the transported fields across the interface.

use crate::eos::PhaseTag;
use crate::error::Error;
use crate::field::Field;
use crate::geometry::{column_value, MappedGrid};
use crate::profiles::EntranceProfiles;
use crate::Result;

/// Cumulative axial mass flux at fixed `x`: upward from the axis for the
/// minus phase, downward from the wall for the plus phase. Level sets are
/// streamlines.
pub struct StreamFunction<'g> {
    pub phase: PhaseTag,
    pub grid: &'g MappedGrid,
    pub values: Field,
    /// Axial mass flux at the nodes (the integrand).
    flux: Field,
    /// Relative slack on the entrance-range check.
    range_slack: f64,
}

/// Trapezoidal cumulative integral of `t * flux(t)` along one column.
fn column_cumulative(grid: &MappedGrid, flux: &Field, i: usize, downward: bool) -> Vec<f64> {
    let ns = grid.ns;
    let mut out = vec![0.0; ns + 1];
    if !downward {
        for j in 1..=ns {
            let (r0, r1) = (grid.r_at(i, j - 1), grid.r_at(i, j));
            let seg = 0.5 * (r1 - r0) * (r0 * flux.at(i, j - 1) + r1 * flux.at(i, j));
            out[j] = out[j - 1] + seg;
        }
    } else {
        for j in (0..ns).rev() {
            let (r0, r1) = (grid.r_at(i, j), grid.r_at(i, j + 1));
            let seg = 0.5 * (r1 - r0) * (r0 * flux.at(i, j) + r1 * flux.at(i, j + 1));
            out[j] = out[j + 1] + seg;
        }
    }
    out
}

/// Build the stream function from the axial mass-flux field; the flux must
/// stay above the positive floor everywhere.
pub fn build_stream_function<'g>(
    phase: PhaseTag,
    grid: &'g MappedGrid,
    flux: &Field,
    axial_floor: f64,
) -> Result<StreamFunction<'g>> {
    debug_assert_eq!(phase, grid.phase);
    for i in 0..=grid.nx {
        for j in 0..=grid.ns {
            let v = flux.at(i, j);
            if v < axial_floor {
                return Err(Error::DegenerateAxialFlow {
                    value: v,
                    floor: axial_floor,
                });
            }
        }
    }
    let mut values = Field::zeros(grid.nx, grid.ns);
    for i in 0..=grid.nx {
        let col = column_cumulative(grid, flux, i, phase == PhaseTag::Plus);
        for j in 0..=grid.ns {
            values.set(i, j, col[j]);
        }
    }
    Ok(StreamFunction {
        phase,
        grid,
        values,
        flux: flux.clone(),
        // Streamlines next to the interface can seed across it by the
        // discrete normal-flux residual, O(h^2) of the perturbation; genuine
        // divergence overshoots by orders of magnitude more.
        range_slack: 1e-3,
    })
}

impl<'g> StreamFunction<'g> {
    /// Continuous stream-function value along the entrance column, consistent
    /// with the trapezoidal node values (piecewise-linear integrand).
    fn entrance_value(&self, r: f64) -> f64 {
        let g = self.grid;
        let ns = g.ns;
        let dr = g.r_s(0) * g.ds;
        let k = ((r / dr).floor() as isize).clamp(0, ns as isize - 1) as usize;
        let (r0, r1) = (g.r_at(0, k), g.r_at(0, k + 1));
        let (g0, g1) = (self.flux.at(0, k), self.flux.at(0, k + 1));
        let slope = (g1 - g0) / (r1 - r0);
        // int_{r0}^{r} t (g0 + slope (t - r0)) dt
        let seg = |t: f64| -> f64 {
            let a = t - r0;
            g0 * (t * t - r0 * r0) / 2.0 + slope * (a * a / 2.0 * r0 + a * a * a / 3.0)
        };
        match self.phase {
            PhaseTag::Minus => self.values.at(0, k) + seg(r),
            PhaseTag::Plus => self.values.at(0, k) - seg(r),
        }
    }

    fn entrance_derivative(&self, r: f64) -> f64 {
        let g = self.grid;
        let ns = g.ns;
        let dr = g.r_s(0) * g.ds;
        let k = ((r / dr).floor() as isize).clamp(0, ns as isize - 1) as usize;
        let (r0, r1) = (g.r_at(0, k), g.r_at(0, k + 1));
        let (g0, g1) = (self.flux.at(0, k), self.flux.at(0, k + 1));
        let lin = g0 + (g1 - g0) * (r - r0) / (r1 - r0);
        match self.phase {
            PhaseTag::Minus => r * lin,
            PhaseTag::Plus => -r * lin,
        }
    }

    /// Entrance radius on the same streamline as node `(i, j)`: solves
    /// `Psi(0, r0) = Psi(x_i, r_j)` by bisection to a 1e-10 bracket plus one
    /// Newton polish.
    pub fn trace_to_entrance(&self, i: usize, j: usize) -> Result<f64> {
        let g = self.grid;
        if i == 0 {
            return Ok(g.r_at(0, j));
        }
        let target = self.values.at(i, j);
        let lo_r = g.r_at(0, 0);
        let hi_r = g.r_at(0, g.ns);
        let (v_lo, v_hi) = (self.values.at(0, 0), self.values.at(0, g.ns));
        let (min_v, max_v) = if v_lo <= v_hi { (v_lo, v_hi) } else { (v_hi, v_lo) };
        let span = max_v - min_v;
        if target < min_v - self.range_slack * span || target > max_v + self.range_slack * span {
            return Err(Error::FluxOutOfRange {
                value: target,
                lo: min_v,
                hi: max_v,
            });
        }
        let increasing = v_hi >= v_lo;
        // Clamped ends: the extreme value always sits at the matching column
        // end for either orientation.
        if (increasing && target <= min_v) || (!increasing && target >= max_v) {
            return Ok(lo_r);
        }
        if (increasing && target >= max_v) || (!increasing && target <= min_v) {
            return Ok(hi_r);
        }
        let (mut a, mut b) = (lo_r, hi_r);
        let sign = if increasing { 1.0 } else { -1.0 };
        let fa = |r: f64| sign * (self.entrance_value(r) - target);
        while b - a > 1e-10 {
            let mid = 0.5 * (a + b);
            if fa(mid) >= 0.0 {
                b = mid;
            } else {
                a = mid;
            }
        }
        let mut r0 = 0.5 * (a + b);
        let d = self.entrance_derivative(r0);
        if d.abs() > 1e-300 {
            r0 -= (self.entrance_value(r0) - target) / d;
            r0 = r0.clamp(lo_r, hi_r);
        }
        Ok(r0)
    }
}

/// Transported fields: entropy, angular momentum density, and the swirl
/// speed `W = Lambda / r` (carried separately so the axis needs no division).
pub struct TransportedFields {
    pub s: Field,
    pub lambda: Field,
    pub w: Field,
}

/// Pull entrance data along the streamlines: `S = S_en(T)`, `W = w_en(T)`,
/// `Lambda = r W`.
pub fn transport_fields(
    phase: PhaseTag,
    sf: &StreamFunction,
    profiles: &EntranceProfiles,
) -> Result<TransportedFields> {
    let g = sf.grid;
    let mut s = Field::zeros(g.nx, g.ns);
    let mut lambda = Field::zeros(g.nx, g.ns);
    let mut w = Field::zeros(g.nx, g.ns);
    for i in 0..=g.nx {
        for j in 0..=g.ns {
            let r0 = sf.trace_to_entrance(i, j)?;
            let sv = profiles.s_en(phase, r0);
            let wv = profiles.w(phase, r0);
            s.set(i, j, sv);
            w.set(i, j, wv);
            lambda.set(i, j, g.r_at(i, j) * wv);
        }
    }
    Ok(TransportedFields { s, lambda, w })
}

/// Reflection coefficients of the three-point extension; they satisfy
/// `sum c_k (-1/k)^m = 1` for `m = 0, 1, 2`, so the extension preserves
/// second-order smoothness across the seam.
pub const EXTENSION_COEFFS: [f64; 3] = [6.0, -32.0, 27.0];

/// Extend a field from its phase grid across the interface onto the fixed
/// enlarged grid (`r < 3/4` for minus, `r > 1/4` for plus). On the native
/// side the extension interpolates the field; beyond the interface it is the
/// three-point reflection in the mapped coordinate.
pub fn extend_field(native: &MappedGrid, field: &Field, enlarged: &MappedGrid) -> Field {
    debug_assert_eq!(native.phase, enlarged.phase);
    debug_assert_eq!(native.nx, enlarged.nx, "grids must share axial nodes");
    let mut out = Field::zeros(enlarged.nx, enlarged.ns);
    for i in 0..=enlarged.nx {
        for j in 0..=enlarged.ns {
            let r = enlarged.r_at(i, j);
            let s = native.s_of(i, r);
            let v = match native.phase {
                PhaseTag::Minus => {
                    if s <= 1.0 {
                        column_value(native, field, i, s)
                    } else {
                        let mut acc = 0.0;
                        for (k, c) in EXTENSION_COEFFS.iter().enumerate() {
                            let sk = (1.0 - (s - 1.0) / (k + 1) as f64).clamp(0.0, 1.0);
                            acc += c * column_value(native, field, i, sk);
                        }
                        acc
                    }
                }
                PhaseTag::Plus => {
                    if s >= 0.0 {
                        column_value(native, field, i, s)
                    } else {
                        let mut acc = 0.0;
                        for (k, c) in EXTENSION_COEFFS.iter().enumerate() {
                            let sk = (-s / (k + 1) as f64).clamp(0.0, 1.0);
                            acc += c * column_value(native, field, i, sk);
                        }
                        acc
                    }
                }
            };
            out.set(i, j, v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::FlowConstants;
    use crate::geometry::{build_grids, InterfaceCurve};

    fn consts() -> FlowConstants {
        FlowConstants::new(1.4, 0.8, 1.0, 0.05, 0.5, 1.0).unwrap()
    }

    fn background_grids(l: f64, nx: usize, ns: usize) -> (MappedGrid, MappedGrid) {
        let curve = InterfaceCurve::background(l, nx);
        build_grids(&curve, nx, ns).unwrap()
    }

    #[test]
    fn background_stream_function_closed_form() {
        let c = consts();
        let (plus, minus) = background_grids(4.0, 16, 32);
        let flux_m = Field::constant(16, 32, c.rho0_minus * c.u0_minus);
        let sf = build_stream_function(PhaseTag::Minus, &minus, &flux_m, 1e-3).unwrap();
        for i in [0, 7, 16] {
            for j in 0..=32 {
                let r = minus.r_at(i, j);
                let expect = c.rho0_minus * c.u0_minus * r * r / 2.0;
                assert!((sf.values.at(i, j) - expect).abs() < 1e-14);
            }
        }
        let flux_p = Field::constant(16, 32, c.rho0_plus * c.u0_plus);
        let sf = build_stream_function(PhaseTag::Plus, &plus, &flux_p, 1e-3).unwrap();
        for i in [0, 16] {
            for j in 0..=32 {
                let r = plus.r_at(i, j);
                let expect = c.rho0_plus * c.u0_plus * (1.0 - r * r) / 2.0;
                assert!((sf.values.at(i, j) - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn stream_function_linear_flux_quadrature_error() {
        // Flux linear in r has a cubic antiderivative; the trapezoid rule on
        // t*flux(t) converges at second order.
        let lin = |r: f64| 0.4 + 0.3 * r;
        let exact = |r: f64| 0.4 * r * r / 2.0 + 0.3 * r * r * r / 3.0;
        let mut errs = Vec::new();
        for ns in [16usize, 32, 64] {
            let (_, minus) = background_grids(2.0, 4, ns);
            let flux = Field::from_fn(4, ns, |i, j| lin(minus.r_at(i, j)));
            let sf = build_stream_function(PhaseTag::Minus, &minus, &flux, 1e-3).unwrap();
            let mut e = 0.0_f64;
            for j in 0..=ns {
                e = e.max((sf.values.at(2, j) - exact(minus.r_at(2, j))).abs());
            }
            errs.push(e);
        }
        assert!(errs[1] < errs[0] / 3.0 && errs[2] < errs[1] / 3.0, "{errs:?}");
    }

    #[test]
    fn degenerate_flux_rejected() {
        let (_, minus) = background_grids(2.0, 4, 8);
        let mut flux = Field::constant(4, 8, 0.5);
        flux.set(2, 3, 1e-9);
        assert!(matches!(
            build_stream_function(PhaseTag::Minus, &minus, &flux, 1e-3),
            Err(Error::DegenerateAxialFlow { .. })
        ));
    }

    #[test]
    fn trace_identity_at_entrance_and_background() {
        let c = consts();
        let (_, minus) = background_grids(4.0, 8, 16);
        let flux = Field::constant(8, 16, c.rho0_minus * c.u0_minus);
        let sf = build_stream_function(PhaseTag::Minus, &minus, &flux, 1e-3).unwrap();
        for j in 0..=16 {
            assert_eq!(sf.trace_to_entrance(0, j).unwrap(), minus.r_at(0, j));
        }
        for i in 1..=8 {
            for j in 0..=16 {
                let r0 = sf.trace_to_entrance(i, j).unwrap();
                assert!(
                    (r0 - minus.r_at(i, j)).abs() < 1e-12,
                    "background trace must be the identity: {r0} vs {}",
                    minus.r_at(i, j)
                );
            }
        }
    }

    #[test]
    fn trace_residual_perturbed_flux() {
        let c = consts();
        let (plus, _) = background_grids(4.0, 8, 24);
        let flux = Field::from_fn(8, 24, |i, j| {
            let x = plus.x[i];
            let r = plus.r_at(i, j);
            c.rho0_plus * c.u0_plus * (1.0 + 0.05 * (x * 0.7).sin() * (3.0 * r).cos())
        });
        let sf = build_stream_function(PhaseTag::Plus, &plus, &flux, 1e-4).unwrap();
        let scale = sf.values.max_abs();
        for i in [3, 8] {
            for j in [0, 5, 12, 24] {
                let r0 = sf.trace_to_entrance(i, j).unwrap();
                let resid = (sf.entrance_value(r0) - sf.values.at(i, j)).abs();
                assert!(resid <= 1e-12 * scale.max(1e-30), "residual {resid:.3e}");
            }
        }
    }

    #[test]
    fn flux_out_of_range_detected() {
        let c = consts();
        let (_, minus) = background_grids(4.0, 4, 8);
        // Section columns carry 10% more flux than the entrance: the interface
        // node's level set exceeds the entrance range.
        let flux = Field::from_fn(4, 8, |i, _| {
            if i == 0 {
                c.rho0_minus * c.u0_minus
            } else {
                1.1 * c.rho0_minus * c.u0_minus
            }
        });
        let sf = build_stream_function(PhaseTag::Minus, &minus, &flux, 1e-3).unwrap();
        assert!(matches!(
            sf.trace_to_entrance(2, 8),
            Err(Error::FluxOutOfRange { .. })
        ));
    }

    #[test]
    fn transport_constant_and_zero_swirl() {
        let c = consts();
        let profiles = EntranceProfiles::background(&c);
        let (_, minus) = background_grids(4.0, 8, 16);
        let flux = Field::constant(8, 16, c.rho0_minus * c.u0_minus);
        let sf = build_stream_function(PhaseTag::Minus, &minus, &flux, 1e-3).unwrap();
        let tf = transport_fields(PhaseTag::Minus, &sf, &profiles).unwrap();
        for v in &tf.s.data {
            assert_eq!(*v, c.s0(PhaseTag::Minus));
        }
        for v in &tf.lambda.data {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn transport_background_velocity_preserves_profile() {
        // At the background velocity the trace is the identity, so
        // S(x, r) = S_en(r) for all x.
        let c = consts();
        let profiles = EntranceProfiles::preset(&c, 0.05, 1e-3).unwrap();
        let (_, minus) = background_grids(4.0, 8, 16);
        let flux = Field::constant(8, 16, c.rho0_minus * c.u0_minus);
        let sf = build_stream_function(PhaseTag::Minus, &minus, &flux, 1e-3).unwrap();
        let tf = transport_fields(PhaseTag::Minus, &sf, &profiles).unwrap();
        for i in 0..=8 {
            for j in 0..=16 {
                let expect = profiles.s_en(PhaseTag::Minus, minus.r_at(i, j));
                assert!(
                    (tf.s.at(i, j) - expect).abs() < 1e-12 * expect.abs(),
                    "S({i},{j})"
                );
            }
        }
    }

    #[test]
    fn extension_coefficients_solve_moment_system() {
        // Independent oracle: solve the 3x3 Vandermonde system
        // sum c_k (-1/k)^m = 1, m = 0, 1, 2 by Gaussian elimination.
        let mut a = [[0.0_f64; 4]; 3];
        for (m, row) in a.iter_mut().enumerate() {
            for k in 0..3 {
                row[k] = (-1.0 / (k + 1) as f64).powi(m as i32);
            }
            row[3] = 1.0;
        }
        for col in 0..3 {
            let piv = (col..3).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs())).unwrap();
            a.swap(col, piv);
            for row in 0..3 {
                if row != col {
                    let m = a[row][col] / a[col][col];
                    for k in col..4 {
                        a[row][k] -= m * a[col][k];
                    }
                }
            }
        }
        let solved: Vec<f64> = (0..3).map(|k| a[k][3] / a[k][k]).collect();
        for (s, e) in solved.iter().zip(EXTENSION_COEFFS.iter()) {
            assert!((s - e).abs() < 1e-10, "{solved:?}");
        }
        // Moment conditions hold exactly for the stored integers.
        for m in 0..3 {
            let sum: f64 = EXTENSION_COEFFS
                .iter()
                .enumerate()
                .map(|(k, c)| c * (-1.0 / (k + 1) as f64).powi(m))
                .sum();
            assert_eq!(sum, 1.0);
        }
    }

    #[test]
    fn extension_reproduces_constants_and_quadratics() {
        let nx = 8;
        let ns = 32;
        let curve = InterfaceCurve::background(2.0, nx);
        let (_, minus) = build_grids(&curve, nx, ns).unwrap();
        let enlarged = MappedGrid::enlarged(PhaseTag::Minus, 2.0, nx, ns);

        let konst = Field::constant(nx, ns, 2.5);
        let ext = extend_field(&minus, &konst, &enlarged);
        for v in &ext.data {
            assert!((v - 2.5).abs() < 1e-12);
        }

        // Quadratic in the mapped coordinate continues exactly.
        let q = |s: f64| 2.0 - 3.0 * (s - 1.0) + 1.7 * (s - 1.0) * (s - 1.0);
        let quad = Field::from_fn(nx, ns, |_, j| q(j as f64 / ns as f64));
        let ext = extend_field(&minus, &quad, &enlarged);
        for i in 0..=nx {
            for j in 0..=ns {
                let s_nat = minus.s_of(i, enlarged.r_at(i, j));
                let expect = q(s_nat);
                assert!(
                    (ext.at(i, j) - expect).abs() < 1e-12,
                    "s = {s_nat}: {} vs {expect}",
                    ext.at(i, j)
                );
            }
        }
    }
}
