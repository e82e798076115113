//! Interface curve, boundary-fitted grids for the two phases, interface
//! frames, and field transfer between grids.
//!
//! Both phases are mapped onto the unit rectangle in `(x, s)`:
//! minus phase `r = s f(x)` (axis at `s = 0`, interface at `s = 1`),
//! plus phase `r = f(x) + s (1 - f(x))` (interface at `s = 0`, wall at `s = 1`).

use crate::eos::PhaseTag;
use crate::error::Error;
use crate::field::{Field, Vec3};
use crate::Result;

/// Discretized interface radius `r = f(x)` on a uniform axial grid over `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceCurve {
    pub length: f64,
    pub x: Vec<f64>,
    pub f: Vec<f64>,
}

impl InterfaceCurve {
    /// Constant curve `f = 1/2`, the background interface.
    pub fn background(length: f64, nx: usize) -> Self {
        let x = uniform(0.0, length, nx);
        InterfaceCurve {
            length,
            f: vec![0.5; x.len()],
            x,
        }
    }

    /// Build from samples; enforces `f(0) = 1/2` and the range `(1/4, 3/4)`.
    pub fn new(length: f64, f: Vec<f64>) -> Result<Self> {
        let x = uniform(0.0, length, f.len() - 1);
        let curve = InterfaceCurve { length, x, f };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        if self.f.len() < 3 {
            return Err(Error::InvalidInterface("need at least 3 nodes".into()));
        }
        if self.f[0] != 0.5 {
            return Err(Error::InvalidInterface(format!(
                "f(0) must be exactly 1/2, got {}",
                self.f[0]
            )));
        }
        for (i, &fi) in self.f.iter().enumerate() {
            if !(fi > 0.25 && fi < 0.75) || !fi.is_finite() {
                return Err(Error::DegenerateInterface { x: self.x[i], f: fi });
            }
        }
        Ok(())
    }

    pub fn nx(&self) -> usize {
        self.f.len() - 1
    }

    pub fn dx(&self) -> f64 {
        self.length / self.nx() as f64
    }

    /// First derivative at the nodes: central differences, one-sided
    /// second-order at the ends.
    pub fn derivative(&self) -> Vec<f64> {
        second_order_derivative(&self.f, self.dx())
    }

    /// Second derivative at the nodes.
    pub fn second_derivative(&self) -> Vec<f64> {
        let n = self.f.len();
        let h = self.dx();
        let f = &self.f;
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            d[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) / (h * h);
        }
        d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
        d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h);
        d
    }

    /// One-sided second-order slopes at `x = 0` and `x = L`; both should
    /// vanish for an admissible curve.
    pub fn end_slopes(&self) -> (f64, f64) {
        let d = self.derivative();
        (d[0], *d.last().unwrap())
    }

    /// Max of `|f - 1/2|`, `|f'|`, `|f''|` over the nodes: the discrete
    /// stand-in for the C^2 norm of the perturbation.
    pub fn c2_norm(&self) -> f64 {
        let dev = self.f.iter().fold(0.0_f64, |m, v| m.max((v - 0.5).abs()));
        let d1 = self.derivative().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let d2 = self
            .second_derivative()
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        dev.max(d1).max(d2)
    }
}

fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn second_order_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d
}

/// Boundary-fitted rectangular grid for one phase, with the metric terms of
/// the mapping `(x, s) -> (x, r)` at every node.
#[derive(Debug, Clone)]
pub struct MappedGrid {
    pub phase: PhaseTag,
    pub nx: usize,
    pub ns: usize,
    pub length: f64,
    pub dx: f64,
    pub ds: f64,
    pub x: Vec<f64>,
    /// Interface samples and derivatives shared by all columns.
    pub f: Vec<f64>,
    pub fp: Vec<f64>,
    pub fpp: Vec<f64>,
    /// Node radii, x-major.
    pub r: Vec<f64>,
}

impl MappedGrid {
    fn from_curve(phase: PhaseTag, curve: &InterfaceCurve, ns: usize) -> Self {
        let nx = curve.nx();
        let fp = curve.derivative();
        let fpp = curve.second_derivative();
        let ds = 1.0 / ns as f64;
        let mut r = Vec::with_capacity((nx + 1) * (ns + 1));
        for i in 0..=nx {
            let fi = curve.f[i];
            for j in 0..=ns {
                let s = j as f64 * ds;
                r.push(match phase {
                    PhaseTag::Minus => s * fi,
                    PhaseTag::Plus => fi + s * (1.0 - fi),
                });
            }
        }
        MappedGrid {
            phase,
            nx,
            ns,
            length: curve.length,
            dx: curve.dx(),
            ds,
            x: curve.x.clone(),
            f: curve.f.clone(),
            fp,
            fpp,
            r,
        }
    }

    /// The fixed enlarged-domain grid covering every admissible interface
    /// position: `r < 3/4` for the minus phase, `r > 1/4` for the plus phase.
    pub fn enlarged(phase: PhaseTag, length: f64, nx: usize, ns: usize) -> Self {
        let value = match phase {
            PhaseTag::Minus => 0.75,
            PhaseTag::Plus => 0.25,
        };
        let f = vec![value; nx + 1];
        let x = uniform(0.0, length, nx);
        let curve = InterfaceCurve { length, x, f };
        let mut grid = MappedGrid::from_curve(phase, &curve, ns);
        // The enlarged curve is flat by construction.
        grid.fp.iter_mut().for_each(|v| *v = 0.0);
        grid.fpp.iter_mut().for_each(|v| *v = 0.0);
        grid
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.ns + 1) + j
    }

    #[inline]
    pub fn r_at(&self, i: usize, j: usize) -> f64 {
        self.r[self.idx(i, j)]
    }

    #[inline]
    pub fn s_at(&self, j: usize) -> f64 {
        j as f64 * self.ds
    }

    pub fn n_nodes(&self) -> usize {
        (self.nx + 1) * (self.ns + 1)
    }

    /// Physical radius of the mapping at arbitrary `(x-index, s)`.
    pub fn r_of(&self, i: usize, s: f64) -> f64 {
        match self.phase {
            PhaseTag::Minus => s * self.f[i],
            PhaseTag::Plus => self.f[i] + s * (1.0 - self.f[i]),
        }
    }

    /// Mapped coordinate of a physical radius in column `i`.
    pub fn s_of(&self, i: usize, r: f64) -> f64 {
        match self.phase {
            PhaseTag::Minus => r / self.f[i],
            PhaseTag::Plus => (r - self.f[i]) / (1.0 - self.f[i]),
        }
    }

    /// dr/dx at fixed s.
    pub fn r_x(&self, i: usize, j: usize) -> f64 {
        let s = self.s_at(j);
        match self.phase {
            PhaseTag::Minus => s * self.fp[i],
            PhaseTag::Plus => (1.0 - s) * self.fp[i],
        }
    }

    /// dr/ds at fixed x (independent of s for these mappings).
    pub fn r_s(&self, i: usize) -> f64 {
        match self.phase {
            PhaseTag::Minus => self.f[i],
            PhaseTag::Plus => 1.0 - self.f[i],
        }
    }

    /// d2r/dx2 at fixed s.
    pub fn r_xx(&self, i: usize, j: usize) -> f64 {
        let s = self.s_at(j);
        match self.phase {
            PhaseTag::Minus => s * self.fpp[i],
            PhaseTag::Plus => (1.0 - s) * self.fpp[i],
        }
    }

    /// d2r/dxds.
    pub fn r_xs(&self, i: usize) -> f64 {
        match self.phase {
            PhaseTag::Minus => self.fp[i],
            PhaseTag::Plus => -self.fp[i],
        }
    }

    /// ds/dr of the inverse map.
    pub fn s_r(&self, i: usize) -> f64 {
        1.0 / self.r_s(i)
    }

    /// ds/dx of the inverse map at node `(i, j)`.
    pub fn s_x(&self, i: usize, j: usize) -> f64 {
        let s = self.s_at(j);
        match self.phase {
            PhaseTag::Minus => -s * self.fp[i] / self.f[i],
            PhaseTag::Plus => -(1.0 - s) * self.fp[i] / (1.0 - self.f[i]),
        }
    }

    /// d2s/dx2 of the inverse map at node `(i, j)`.
    pub fn s_xx(&self, i: usize, j: usize) -> f64 {
        let s = self.s_at(j);
        let fp = self.fp[i];
        let fpp = self.fpp[i];
        match self.phase {
            PhaseTag::Minus => {
                let f = self.f[i];
                -s * (fpp * f - 2.0 * fp * fp) / (f * f)
            }
            PhaseTag::Plus => {
                let g = 1.0 - self.f[i];
                -(1.0 - s) * (fpp * g + 2.0 * fp * fp) / (g * g)
            }
        }
    }

    /// Physical x-derivative of a field at node `(i, j)`: centered in the
    /// interior, one-sided second-order at the entrance/exit.
    pub fn ddx(&self, field: &Field, i: usize, j: usize) -> f64 {
        let us = self.dds_mapped(field, i, j);
        self.ddx_mapped(field, i, j) + self.s_x(i, j) * us
    }

    /// Physical r-derivative of a field at node `(i, j)`.
    pub fn ddr(&self, field: &Field, i: usize, j: usize) -> f64 {
        self.s_r(i) * self.dds_mapped(field, i, j)
    }

    /// d/dx at fixed s.
    pub fn ddx_mapped(&self, field: &Field, i: usize, j: usize) -> f64 {
        let h = self.dx;
        if i == 0 {
            (-3.0 * field.at(0, j) + 4.0 * field.at(1, j) - field.at(2, j)) / (2.0 * h)
        } else if i == self.nx {
            (3.0 * field.at(i, j) - 4.0 * field.at(i - 1, j) + field.at(i - 2, j)) / (2.0 * h)
        } else {
            (field.at(i + 1, j) - field.at(i - 1, j)) / (2.0 * h)
        }
    }

    /// d/ds at fixed x.
    pub fn dds_mapped(&self, field: &Field, i: usize, j: usize) -> f64 {
        let h = self.ds;
        if j == 0 {
            (-3.0 * field.at(i, 0) + 4.0 * field.at(i, 1) - field.at(i, 2)) / (2.0 * h)
        } else if j == self.ns {
            (3.0 * field.at(i, j) - 4.0 * field.at(i, j - 1) + field.at(i, j - 2)) / (2.0 * h)
        } else {
            (field.at(i, j + 1) - field.at(i, j - 1)) / (2.0 * h)
        }
    }
}

/// Build the two boundary-fitted grids sharing the interface nodes.
pub fn build_grids(
    curve: &InterfaceCurve,
    nx: usize,
    ns: usize,
) -> Result<(MappedGrid, MappedGrid)> {
    curve.validate()?;
    assert_eq!(curve.nx(), nx, "interface curve and grid must share x nodes");
    Ok((
        MappedGrid::from_curve(PhaseTag::Plus, curve, ns),
        MappedGrid::from_curve(PhaseTag::Minus, curve, ns),
    ))
}

/// Per-node interface frame: outward unit normals of both phases and the
/// tangent along increasing x.
#[derive(Debug, Clone)]
pub struct InterfaceFrame {
    pub n_plus: Vec<Vec3>,
    pub n_minus: Vec<Vec3>,
    pub tau: Vec<Vec3>,
}

/// Normals `n_pm = (+-f' e_x -+ e_r)/sqrt(1+f'^2)` and tangent
/// `tau = (e_x + f' e_r)/sqrt(1+f'^2)`.
pub fn interface_frame(curve: &InterfaceCurve) -> InterfaceFrame {
    let fp = curve.derivative();
    let mut n_plus = Vec::with_capacity(fp.len());
    let mut n_minus = Vec::with_capacity(fp.len());
    let mut tau = Vec::with_capacity(fp.len());
    for &d in &fp {
        let w = 1.0 / (1.0 + d * d).sqrt();
        n_plus.push([d * w, -w, 0.0]);
        n_minus.push([-d * w, w, 0.0]);
        tau.push([w, d * w, 0.0]);
    }
    InterfaceFrame { n_plus, n_minus, tau }
}

/// Cubic Lagrange interpolation through 4 consecutive samples; the stencil is
/// clamped at the ends, so polynomials of degree <= 3 are reproduced exactly
/// everywhere in the sample range.
pub fn interp_cubic_1d(values: &[f64], h: f64, lo: f64, x: f64) -> f64 {
    let n = values.len();
    debug_assert!(n >= 2);
    if n < 4 {
        // Fall back to linear on tiny columns.
        let t = ((x - lo) / h).clamp(0.0, (n - 1) as f64);
        let k = (t.floor() as usize).min(n - 2);
        let a = t - k as f64;
        return (1.0 - a) * values[k] + a * values[k + 1];
    }
    let t = (x - lo) / h;
    let cell = (t.floor() as isize).clamp(0, n as isize - 2) as usize;
    let m = cell.saturating_sub(1).min(n - 4);
    let u = t - m as f64;
    lagrange4(&values[m..m + 4], u)
}

/// Lagrange cubic through points at u = 0, 1, 2, 3 evaluated at `u`.
fn lagrange4(v: &[f64], u: f64) -> f64 {
    let c0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    let c1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    let c2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    let c3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    c0 * v[0] + c1 * v[1] + c2 * v[2] + c3 * v[3]
}

/// Interpolate a grid field at mapped coordinates `(x, s)` of its own grid
/// using clamped-stencil cubic Lagrange in both directions.
pub fn interp_field_cubic(grid: &MappedGrid, field: &Field, x: f64, s: f64) -> f64 {
    let tn = x / grid.dx;
    let cell = (tn.floor() as isize).clamp(0, grid.nx as isize - 1) as usize;
    let m = if grid.nx >= 3 {
        cell.saturating_sub(1).min(grid.nx - 3)
    } else {
        0
    };
    if grid.nx < 3 {
        // Degenerate in x; interpolate columns linearly.
        let a = (tn - cell as f64).clamp(0.0, 1.0);
        let v0 = column_value(grid, field, cell, s);
        let v1 = column_value(grid, field, cell + 1, s);
        return (1.0 - a) * v0 + a * v1;
    }
    let u = tn - m as f64;
    let cols = [
        column_value(grid, field, m, s),
        column_value(grid, field, m + 1, s),
        column_value(grid, field, m + 2, s),
        column_value(grid, field, m + 3, s),
    ];
    lagrange4(&cols, u)
}

/// Cubic interpolation of one grid column at mapped coordinate `s`.
pub fn column_value(grid: &MappedGrid, field: &Field, i: usize, s: f64) -> f64 {
    let start = grid.idx(i, 0);
    let col = &field.data[start..start + grid.ns + 1];
    interp_cubic_1d(col, grid.ds, 0.0, s)
}

/// Bilinear interpolation at mapped `(x, s)`.
fn interp_field_bilinear(grid: &MappedGrid, field: &Field, x: f64, s: f64) -> f64 {
    let tx = (x / grid.dx).clamp(0.0, grid.nx as f64);
    let ts = (s / grid.ds).clamp(0.0, grid.ns as f64);
    let i = (tx.floor() as usize).min(grid.nx - 1);
    let j = (ts.floor() as usize).min(grid.ns - 1);
    let ax = tx - i as f64;
    let as_ = ts - j as f64;
    (1.0 - ax) * (1.0 - as_) * field.at(i, j)
        + ax * (1.0 - as_) * field.at(i + 1, j)
        + (1.0 - ax) * as_ * field.at(i, j + 1)
        + ax * as_ * field.at(i + 1, j + 1)
}

/// Source-grid mapped coordinate of a physical radius at arbitrary axial
/// position, using cubic interpolation of the source interface curve.
pub fn s_of_continuous(src: &MappedGrid, x: f64, r: f64) -> f64 {
    let f = interp_cubic_1d(&src.f, src.dx, 0.0, x);
    match src.phase {
        PhaseTag::Minus => r / f,
        PhaseTag::Plus => (r - f) / (1.0 - f),
    }
}

/// Transfer a field between two grids of the same phase: bicubic in the
/// interior, bilinear within one cell of the source boundary. Exact for
/// fields linear in `(x, s)`.
pub fn transfer_field(src: &MappedGrid, dst: &MappedGrid, field: &Field) -> Result<Field> {
    assert_eq!(src.phase, dst.phase, "transfer requires matching phases");
    if dst.x[0] > src.length || src.x[0] > dst.length {
        return Err(Error::ExtentMismatch {
            src: src.length,
            dst: dst.length,
        });
    }
    let mut out = Field::zeros(dst.nx, dst.ns);
    for i in 0..=dst.nx {
        let x = dst.x[i].min(src.length);
        let xi = x / src.dx;
        for j in 0..=dst.ns {
            let r = dst.r_at(i, j);
            let s = s_of_continuous(src, x, r).clamp(0.0, 1.0);
            let interior_x = xi >= 1.0 && xi <= (src.nx - 1) as f64;
            let interior_s = s >= src.ds && s <= 1.0 - src.ds;
            let v = if interior_x && interior_s {
                interp_field_cubic(src, field, x, s)
            } else {
                interp_field_bilinear(src, field, x, s)
            };
            out.set(i, j, v);
        }
    }
    Ok(out)
}
