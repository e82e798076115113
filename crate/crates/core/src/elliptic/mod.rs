//! Per-phase elliptic boundary value problems: the scalar potential
//! perturbation `phi_hat = phi - phi0` and the azimuthal stream component
//! `psi`, discretized with second-order centered differences in the mapped
//! `(x, s)` coordinates and solved by banded direct factorization.

pub mod band;

use std::time::Instant;

use crate::eos::{FlowConstants, PhaseTag};
use crate::error::Error;
use crate::field::Field;
use crate::geometry::MappedGrid;
use crate::profiles::EntranceProfiles;
use crate::Result;
use band::{BandLu, BandMatrix};

/// Physical-space operator `c_xx d_xx + c_rad (d_rr + (1/r) d_r) [+ c_rad u/r^2]`.
#[derive(Debug, Clone, Copy)]
pub struct EllipticOperator {
    pub coeff_xx: f64,
    pub coeff_rad: f64,
    /// Adds the azimuthal vector-Laplacian zeroth-order term `-c_rad u / r^2`.
    pub swirl_term: bool,
}

impl EllipticOperator {
    /// Linearized potential operator with the diagonal background coefficients.
    pub fn potential(consts: &FlowConstants, phase: PhaseTag) -> Self {
        let (a11, a22, _) = consts.linearization_coeffs(phase);
        EllipticOperator {
            coeff_xx: a11,
            coeff_rad: a22,
            swirl_term: false,
        }
    }

    /// Azimuthal stream operator `-(d_xx + d_rr + (1/r) d_r - 1/r^2)`.
    pub fn azimuthal_stream() -> Self {
        EllipticOperator {
            coeff_xx: -1.0,
            coeff_rad: -1.0,
            swirl_term: true,
        }
    }
}

/// Boundary condition on one side of the mapped rectangle. Values are given
/// per node along the side.
#[derive(Debug, Clone)]
pub enum SideCondition {
    Dirichlet { values: Vec<f64> },
    /// `grad(u) . n_outward = g`. On the axis and on the entrance/exit sides
    /// only homogeneous data are supported (imposed by reflection rows).
    NormalGradient { values: Vec<f64> },
    /// `grad(u) . n_outward - mu u = g` on the interface side.
    Robin { mu: Vec<f64>, values: Vec<f64> },
}

impl SideCondition {
    pub fn dirichlet0(n: usize) -> Self {
        SideCondition::Dirichlet { values: vec![0.0; n] }
    }

    pub fn neumann0(n: usize) -> Self {
        SideCondition::NormalGradient { values: vec![0.0; n] }
    }
}

/// Which side of the mapped rectangle: `Lower` is `s = 0` (axis for the minus
/// phase, interface for the plus phase), `Upper` is `s = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Entrance,
    Exit,
    Lower,
    Upper,
}

/// One per-phase boundary value problem on a mapped grid.
pub struct EllipticProblem<'g> {
    pub phase: PhaseTag,
    pub grid: &'g MappedGrid,
    pub operator: EllipticOperator,
    pub entrance: SideCondition,
    pub exit: SideCondition,
    pub lower: SideCondition,
    pub upper: SideCondition,
}

/// Solve statistics attached to every elliptic solve.
#[derive(Debug, Clone, Copy)]
pub struct LinearSolveReport {
    pub iterations: usize,
    pub final_residual: f64,
    pub elapsed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RowKind {
    Interior,
    /// Boundary row whose right-hand side is fixed by the boundary data.
    Boundary,
    /// PDE row at a reflection boundary (axis or entrance/exit Neumann); the
    /// right-hand side comes from the interior forcing field.
    ReflectedPde,
}

/// Assembled and factored problem; the factorization is reused across Picard
/// sweeps with changing right-hand sides.
pub struct FactoredProblem {
    nx: usize,
    ns: usize,
    lu: BandLu,
    matrix: BandMatrix,
    a_norm: f64,
    kinds: Vec<RowKind>,
    boundary_rhs: Vec<f64>,
    tol_linear: f64,
}

impl<'g> EllipticProblem<'g> {
    /// Assemble the band system and factor it.
    pub fn factor(&self, tol_linear: f64) -> Result<FactoredProblem> {
        let g = self.grid;
        let (nx, ns) = (g.nx, g.ns);
        let n = (nx + 1) * (ns + 1);
        let band = ns + 2;
        let mut a = BandMatrix::zeros(n, band, band);
        let mut kinds = vec![RowKind::Interior; n];
        let mut boundary_rhs = vec![0.0; n];

        // Interior nodes must stay off the axis.
        for i in 1..nx {
            for j in 1..ns {
                if g.r_at(i, j) == 0.0 {
                    return Err(Error::AxisSingularity);
                }
            }
        }

        // Row assignment with corner precedence: Dirichlet sides first, then
        // the s-sides, then reflected entrance/exit rows.
        #[derive(Clone, Copy, PartialEq)]
        enum Owner {
            None,
            Done,
        }
        let mut owner = vec![Owner::None; n];
        let idx = |i: usize, j: usize| i * (ns + 1) + j;

        let dirichlet =
            |side: Side, values: &[f64], a: &mut BandMatrix, kinds: &mut Vec<RowKind>,
             boundary_rhs: &mut Vec<f64>, owner: &mut Vec<Owner>| {
                for (k, &v) in values.iter().enumerate() {
                    let (i, j) = match side {
                        Side::Entrance => (0, k),
                        Side::Exit => (nx, k),
                        Side::Lower => (k, 0),
                        Side::Upper => (k, ns),
                    };
                    let p = idx(i, j);
                    if owner[p] == Owner::None {
                        a.add(p, p, 1.0);
                        kinds[p] = RowKind::Boundary;
                        boundary_rhs[p] = v;
                        owner[p] = Owner::Done;
                    }
                }
            };

        // Pass 1: Dirichlet sides in order entrance, exit, lower, upper.
        for (side, cond) in [
            (Side::Entrance, &self.entrance),
            (Side::Exit, &self.exit),
            (Side::Lower, &self.lower),
            (Side::Upper, &self.upper),
        ] {
            if let SideCondition::Dirichlet { values } = cond {
                assert_eq!(values.len(), side_len(side, nx, ns));
                dirichlet(side, values, &mut a, &mut kinds, &mut boundary_rhs, &mut owner);
            }
        }

        // Pass 2: s-sides (Robin / NormalGradient).
        for (side, cond) in [(Side::Lower, &self.lower), (Side::Upper, &self.upper)] {
            match cond {
                SideCondition::Dirichlet { .. } => {}
                SideCondition::Robin { mu, values } => {
                    assert_eq!(values.len(), nx + 1);
                    for i in 0..=nx {
                        let j = if side == Side::Lower { 0 } else { ns };
                        let p = idx(i, j);
                        if owner[p] != Owner::None {
                            continue;
                        }
                        self.assemble_robin_row(&mut a, p, i, side, mu[i], &mut boundary_rhs, values[i]);
                        kinds[p] = RowKind::Boundary;
                        owner[p] = Owner::Done;
                    }
                }
                SideCondition::NormalGradient { values } => {
                    assert_eq!(values.len(), nx + 1);
                    let is_axis = self.phase == PhaseTag::Minus && side == Side::Lower;
                    for i in 0..=nx {
                        let j = if side == Side::Lower { 0 } else { ns };
                        let p = idx(i, j);
                        if owner[p] != Owner::None {
                            continue;
                        }
                        if is_axis {
                            assert_eq!(values[i], 0.0, "axis data must be homogeneous");
                            self.assemble_axis_row(&mut a, p, i);
                            kinds[p] = RowKind::ReflectedPde;
                        } else {
                            self.assemble_neumann_row(&mut a, p, i, side, &mut boundary_rhs, values[i]);
                            kinds[p] = RowKind::Boundary;
                        }
                        owner[p] = Owner::Done;
                    }
                }
            }
        }

        // Pass 3: entrance/exit NormalGradient via even reflection.
        for (side, cond) in [(Side::Entrance, &self.entrance), (Side::Exit, &self.exit)] {
            if let SideCondition::NormalGradient { values } = cond {
                assert_eq!(values.len(), ns + 1);
                let i = if side == Side::Entrance { 0 } else { nx };
                for (j, &v) in values.iter().enumerate() {
                    assert_eq!(v, 0.0, "entrance/exit Neumann data must be homogeneous");
                    let p = idx(i, j);
                    if owner[p] != Owner::None {
                        continue;
                    }
                    self.assemble_reflected_x_row(&mut a, p, i, j);
                    kinds[p] = RowKind::ReflectedPde;
                    owner[p] = Owner::Done;
                }
            }
            if let SideCondition::Robin { .. } = cond {
                panic!("Robin conditions are only supported on the interface side");
            }
        }

        // Pass 4: interior PDE rows.
        for i in 1..nx {
            for j in 1..ns {
                let p = idx(i, j);
                if owner[p] == Owner::None {
                    self.assemble_interior_row(&mut a, p, i, j);
                    owner[p] = Owner::Done;
                }
            }
        }

        let matrix = a;
        let a_norm = matrix.inf_norm();
        let lu = matrix.clone().factor()?;
        Ok(FactoredProblem {
            nx,
            ns,
            lu,
            matrix,
            a_norm,
            kinds,
            boundary_rhs,
            tol_linear,
        })
    }

    fn stencil(&self, i: usize, j: usize) -> (f64, f64, f64, f64, f64) {
        let g = self.grid;
        let op = self.operator;
        let s_x = g.s_x(i, j);
        let s_r = g.s_r(i);
        let s_xx = g.s_xx(i, j);
        let r = g.r_at(i, j);
        let cxx = op.coeff_xx;
        let cxs = 2.0 * op.coeff_xx * s_x;
        let css = op.coeff_xx * s_x * s_x + op.coeff_rad * s_r * s_r;
        let cs = op.coeff_xx * s_xx + op.coeff_rad * s_r / r;
        let c0 = if op.swirl_term { -op.coeff_rad / (r * r) } else { 0.0 };
        (cxx, cxs, css, cs, c0)
    }

    fn assemble_interior_row(&self, a: &mut BandMatrix, p: usize, i: usize, j: usize) {
        let g = self.grid;
        let (dx, ds) = (g.dx, g.ds);
        let (cxx, cxs, css, cs, c0) = self.stencil(i, j);
        let row = p;
        let at = |ii: usize, jj: usize| ii * (g.ns + 1) + jj;
        // d_xx
        a.add(row, at(i - 1, j), cxx / (dx * dx));
        a.add(row, at(i, j), -2.0 * cxx / (dx * dx));
        a.add(row, at(i + 1, j), cxx / (dx * dx));
        // d_ss
        a.add(row, at(i, j - 1), css / (ds * ds));
        a.add(row, at(i, j), -2.0 * css / (ds * ds));
        a.add(row, at(i, j + 1), css / (ds * ds));
        // d_xs
        let w = cxs / (4.0 * dx * ds);
        a.add(row, at(i + 1, j + 1), w);
        a.add(row, at(i - 1, j - 1), w);
        a.add(row, at(i + 1, j - 1), -w);
        a.add(row, at(i - 1, j + 1), -w);
        // d_s
        a.add(row, at(i, j + 1), cs / (2.0 * ds));
        a.add(row, at(i, j - 1), -cs / (2.0 * ds));
        // zeroth order
        if c0 != 0.0 {
            a.add(row, at(i, j), c0);
        }
    }

    /// Axis row for the minus phase at `r = 0`: even reflection gives
    /// `c_xx u_xx + 2 c_rad u_rr = rhs` with `u_s = 0`.
    fn assemble_axis_row(&self, a: &mut BandMatrix, p: usize, i: usize) {
        let g = self.grid;
        let (dx, ds) = (g.dx, g.ds);
        let s_r = g.s_r(i);
        let cxx = self.operator.coeff_xx;
        let crad = 2.0 * self.operator.coeff_rad * s_r * s_r;
        let at = |ii: usize, jj: usize| ii * (g.ns + 1) + jj;
        // u_xx along the axis; one-sided never needed because corners are
        // owned by the entrance/exit conditions.
        a.add(p, at(i - 1, 0), cxx / (dx * dx));
        a.add(p, at(i, 0), -2.0 * cxx / (dx * dx));
        a.add(p, at(i + 1, 0), cxx / (dx * dx));
        // 2 c_rad u_rr with ghost u(-ds) = u(ds).
        a.add(p, at(i, 1), 2.0 * crad / (ds * ds));
        a.add(p, at(i, 0), -2.0 * crad / (ds * ds));
    }

    /// PDE row at the entrance/exit with even reflection across the side.
    fn assemble_reflected_x_row(&self, a: &mut BandMatrix, p: usize, i: usize, j: usize) {
        let g = self.grid;
        let (dx, ds) = (g.dx, g.ds);
        let (cxx, _cxs, css, cs, c0) = self.stencil(i, j);
        let at = |ii: usize, jj: usize| ii * (g.ns + 1) + jj;
        let inner = if i == 0 { 1 } else { g.nx - 1 };
        // u_xx -> 2 (u_inner - u_i) / dx^2; the cross term vanishes by the
        // reflection.
        a.add(p, at(inner, j), 2.0 * cxx / (dx * dx));
        a.add(p, at(i, j), -2.0 * cxx / (dx * dx));
        a.add(p, at(i, j - 1), css / (ds * ds));
        a.add(p, at(i, j), -2.0 * css / (ds * ds));
        a.add(p, at(i, j + 1), css / (ds * ds));
        a.add(p, at(i, j + 1), cs / (2.0 * ds));
        a.add(p, at(i, j - 1), -cs / (2.0 * ds));
        if c0 != 0.0 {
            a.add(p, at(i, j), c0);
        }
    }

    /// Robin row on the interface side: `grad(u).n - mu u = g`.
    fn assemble_robin_row(
        &self,
        a: &mut BandMatrix,
        p: usize,
        i: usize,
        side: Side,
        mu: f64,
        boundary_rhs: &mut [f64],
        data: f64,
    ) {
        let g = self.grid;
        let ns = g.ns;
        let fp = g.fp[i];
        let w = (1.0 + fp * fp).sqrt();
        let at = |ii: usize, jj: usize| ii * (ns + 1) + jj;
        let j = if side == Side::Lower { 0 } else { ns };
        // Outward normal of the phase on its interface side.
        // minus phase, upper side: n = (-f' e_x + e_r)/w;
        // plus phase, lower side:  n = ( f' e_x - e_r)/w.
        let (cx, cr) = match (self.phase, side) {
            (PhaseTag::Minus, Side::Upper) => (-fp / w, 1.0 / w),
            (PhaseTag::Plus, Side::Lower) => (fp / w, -1.0 / w),
            _ => panic!("Robin condition must sit on the interface side"),
        };
        let s_x = g.s_x(i, j);
        let s_r = g.s_r(i);
        // grad(u).n = cx (u_x + s_x u_s) + cr s_r u_s.
        let cs_total = cx * s_x + cr * s_r;
        // One-sided second-order u_s into the domain.
        let (sgn, j0, j1, j2) = if j == 0 {
            (1.0, 0, 1, 2)
        } else {
            (-1.0, ns, ns - 1, ns - 2)
        };
        let ds = g.ds;
        a.add(p, at(i, j0), sgn * -3.0 * cs_total / (2.0 * ds));
        a.add(p, at(i, j1), sgn * 4.0 * cs_total / (2.0 * ds));
        a.add(p, at(i, j2), sgn * -1.0 * cs_total / (2.0 * ds));
        // Centered u_x where possible; at the entrance/exit corners the
        // even-reflection compatibility kills the x-derivative.
        if i > 0 && i < g.nx && cx != 0.0 {
            let dx = g.dx;
            a.add(p, at(i + 1, j), cx / (2.0 * dx));
            a.add(p, at(i - 1, j), -cx / (2.0 * dx));
        }
        a.add(p, at(i, j), -mu);
        boundary_rhs[p] = data;
    }

    /// Neumann row `grad(u).n = g` on a non-axis s-side.
    fn assemble_neumann_row(
        &self,
        a: &mut BandMatrix,
        p: usize,
        i: usize,
        side: Side,
        boundary_rhs: &mut [f64],
        data: f64,
    ) {
        let g = self.grid;
        let ns = g.ns;
        let at = |ii: usize, jj: usize| ii * (ns + 1) + jj;
        let j = if side == Side::Lower { 0 } else { ns };
        let fp = g.fp[i];
        let w = (1.0 + fp * fp).sqrt();
        let (cx, cr) = match (self.phase, side) {
            // Wall of the plus phase: n = +e_r (flat).
            (PhaseTag::Plus, Side::Upper) => (0.0, 1.0),
            // Interface sides.
            (PhaseTag::Plus, Side::Lower) => (fp / w, -1.0 / w),
            (PhaseTag::Minus, Side::Upper) => (-fp / w, 1.0 / w),
            _ => unreachable!("axis and x-sides are handled separately"),
        };
        let s_x = g.s_x(i, j);
        let s_r = g.s_r(i);
        let cs_total = cx * s_x + cr * s_r;
        let (sgn, j0, j1, j2) = if j == 0 {
            (1.0, 0, 1, 2)
        } else {
            (-1.0, ns, ns - 1, ns - 2)
        };
        let ds = g.ds;
        a.add(p, at(i, j0), sgn * -3.0 * cs_total / (2.0 * ds));
        a.add(p, at(i, j1), sgn * 4.0 * cs_total / (2.0 * ds));
        a.add(p, at(i, j2), sgn * -1.0 * cs_total / (2.0 * ds));
        if i > 0 && i < g.nx && cx != 0.0 {
            let dx = g.dx;
            a.add(p, at(i + 1, j), cx / (2.0 * dx));
            a.add(p, at(i - 1, j), -cx / (2.0 * dx));
        }
        boundary_rhs[p] = data;
    }
}

fn side_len(side: Side, nx: usize, ns: usize) -> usize {
    match side {
        Side::Entrance | Side::Exit => ns + 1,
        Side::Lower | Side::Upper => nx + 1,
    }
}

impl FactoredProblem {
    /// Normwise backward error `|Ax - b| / (|A| |x| + |b|)` in max norms.
    fn backward_error(&self, x: &[f64], rhs: &[f64]) -> f64 {
        let ax = self.matrix.matvec(x);
        let mut res = 0.0_f64;
        let mut b_norm = 0.0_f64;
        let mut x_norm = 0.0_f64;
        for p in 0..x.len() {
            res = res.max((ax[p] - rhs[p]).abs());
            b_norm = b_norm.max(rhs[p].abs());
            x_norm = x_norm.max(x[p].abs());
        }
        let denom = self.a_norm * x_norm + b_norm;
        if denom > 0.0 {
            res / denom
        } else {
            res
        }
    }

    /// Solve with the given interior forcing; boundary rows take their stored
    /// data. Returns the solution and the relative algebraic residual
    /// (normwise backward error).
    pub fn solve(&self, forcing: &Field) -> Result<(Field, f64)> {
        assert_eq!(forcing.nx, self.nx);
        assert_eq!(forcing.ns, self.ns);
        let n = (self.nx + 1) * (self.ns + 1);
        let mut rhs = vec![0.0; n];
        for p in 0..n {
            rhs[p] = match self.kinds[p] {
                RowKind::Interior | RowKind::ReflectedPde => forcing.data[p],
                RowKind::Boundary => self.boundary_rhs[p],
            };
        }
        let mut x = self.lu.solve(rhs.clone());
        let mut rel = self.backward_error(&x, &rhs);
        if rel > self.tol_linear {
            // One step of iterative refinement.
            let ax = self.matrix.matvec(&x);
            let mut defect = vec![0.0; n];
            for p in 0..n {
                defect[p] = rhs[p] - ax[p];
            }
            let dx = self.lu.solve(defect);
            for p in 0..n {
                x[p] += dx[p];
            }
            rel = self.backward_error(&x, &rhs);
            if rel > self.tol_linear {
                return Err(Error::LinearSolveFailed(format!(
                    "algebraic residual {rel:.3e} above tolerance {:.3e}",
                    self.tol_linear
                )));
            }
        }
        Ok((
            Field {
                nx: self.nx,
                ns: self.ns,
                data: x,
            },
            rel,
        ))
    }
}

/// Solver knobs shared by the elliptic solves.
#[derive(Debug, Clone, Copy)]
pub struct EllipticParams {
    pub tol_picard: f64,
    pub tol_linear: f64,
    pub omega: f64,
    pub max_inner: usize,
    pub axial_floor: f64,
}

impl Default for EllipticParams {
    fn default() -> Self {
        EllipticParams {
            tol_picard: 1e-10,
            tol_linear: 1e-11,
            omega: 1.0,
            max_inner: 100,
            axial_floor: 0.0,
        }
    }
}

/// Meridional components `(t_x, t_r)` of `curl(psi e_theta)`:
/// `t_x = d_r psi + psi / r`, `t_r = -d_x psi`, with the axis limit
/// `t_x = 2 d_r psi`.
pub fn curl_azimuthal(grid: &MappedGrid, psi: &Field) -> (Field, Field) {
    let mut tx = Field::zeros(grid.nx, grid.ns);
    let mut tr = Field::zeros(grid.nx, grid.ns);
    for i in 0..=grid.nx {
        for j in 0..=grid.ns {
            let r = grid.r_at(i, j);
            let dpsi_dr = grid.ddr(psi, i, j);
            let v = if r == 0.0 {
                2.0 * dpsi_dr
            } else {
                dpsi_dr + psi.at(i, j) / r
            };
            tx.set(i, j, v);
            tr.set(i, j, -grid.ddx(psi, i, j));
        }
    }
    (tx, tr)
}

/// Divergence of an axisymmetric vector field given by its `(x, r)` node
/// components: `div F = d_x F_x + d_r F_r + F_r / r`, with the axis limit
/// `d_x F_x + 2 d_r F_r`.
pub fn divergence(grid: &MappedGrid, fx: &Field, fr: &Field) -> Field {
    let mut div = Field::zeros(grid.nx, grid.ns);
    for i in 0..=grid.nx {
        for j in 0..=grid.ns {
            let r = grid.r_at(i, j);
            let dfx = grid.ddx(fx, i, j);
            let dfr = grid.ddr(fr, i, j);
            let v = if r == 0.0 {
                dfx + 2.0 * dfr
            } else {
                dfx + dfr + fr.at(i, j) / r
            };
            div.set(i, j, v);
        }
    }
    div
}

/// Inputs frozen during one potential solve: the transported fields and the
/// rotational part of the velocity.
pub struct PotentialContext<'a> {
    pub consts: &'a FlowConstants,
    pub phase: PhaseTag,
    pub grid: &'a MappedGrid,
    pub s_star: &'a Field,
    /// Meridional curl components of the frozen stream field.
    pub t_x: &'a Field,
    pub t_r: &'a Field,
    /// Swirl speed `Lambda / r` per node.
    pub w_star: &'a Field,
}

impl<'a> PotentialContext<'a> {
    /// Remainder-flux components at every node for the current potential
    /// perturbation iterate.
    fn flux_fields(&self, phi_hat: &Field) -> Result<(Field, Field)> {
        let g = self.grid;
        let mut fx = Field::zeros(g.nx, g.ns);
        let mut fr = Field::zeros(g.nx, g.ns);
        let s0 = self.consts.s0(self.phase);
        for i in 0..=g.nx {
            for j in 0..=g.ns {
                let zeta = self.s_star.at(i, j) - s0;
                let a = [g.ddx(phi_hat, i, j), g.ddr(phi_hat, i, j), 0.0];
                let b = [self.t_x.at(i, j), self.t_r.at(i, j), self.w_star.at(i, j)];
                let f = self.consts.remainder_flux(self.phase, zeta, a, b)?;
                fx.set(i, j, f[0]);
                fr.set(i, j, f[1]);
            }
        }
        Ok((fx, fr))
    }
}

/// Standard boundary conditions of the potential problem for one phase:
/// entrance Dirichlet from the integrated radial entrance speed, exit
/// Dirichlet zero, wall/axis Neumann zero, interface Dirichlet zero (minus)
/// or the curvature-driven Neumann datum (plus).
pub fn potential_problem<'g>(
    consts: &FlowConstants,
    phase: PhaseTag,
    grid: &'g MappedGrid,
    profiles: &EntranceProfiles,
) -> EllipticProblem<'g> {
    let ns = grid.ns;
    let nx = grid.nx;
    let entrance_values: Vec<f64> = (0..=ns)
        .map(|j| -profiles.integral_v(phase, 0.5, grid.r_at(0, j)))
        .collect();
    let (lower, upper) = match phase {
        PhaseTag::Plus => {
            let vals: Vec<f64> = (0..=nx)
                .map(|i| {
                    let fp = grid.fp[i];
                    consts.u0_plus * fp / (1.0 + fp * fp).sqrt()
                })
                .collect();
            (
                SideCondition::NormalGradient { values: vals },
                SideCondition::neumann0(nx + 1),
            )
        }
        PhaseTag::Minus => (
            SideCondition::neumann0(nx + 1),
            SideCondition::dirichlet0(nx + 1),
        ),
    };
    EllipticProblem {
        phase,
        grid,
        operator: EllipticOperator::potential(consts, phase),
        entrance: SideCondition::Dirichlet { values: entrance_values },
        exit: SideCondition::dirichlet0(ns + 1),
        lower,
        upper,
    }
}

/// Solve the potential perturbation problem by inner Picard iteration:
/// freeze the remainder flux at the current iterate, solve the linear
/// constant-coefficient problem, and repeat until the max-norm change drops
/// below `tol_picard`. The damping factor is halved when the change grows
/// for five consecutive sweeps.
pub fn solve_phi(
    consts: &FlowConstants,
    phase: PhaseTag,
    grid: &MappedGrid,
    s_star: &Field,
    w_star: &Field,
    psi_star: &Field,
    profiles: &EntranceProfiles,
    params: &EllipticParams,
) -> Result<(Field, LinearSolveReport)> {
    let start = Instant::now();
    let problem = potential_problem(consts, phase, grid, profiles);
    let factored = problem.factor(params.tol_linear)?;
    let (t_x, t_r) = curl_azimuthal(grid, psi_star);
    let ctx = PotentialContext {
        consts,
        phase,
        grid,
        s_star,
        t_x: &t_x,
        t_r: &t_r,
        w_star,
    };

    let mut phi_hat = Field::zeros(grid.nx, grid.ns);
    let mut omega = params.omega;
    let mut last_change = f64::INFINITY;
    let mut growth_streak = 0usize;
    let mut halvings = 0usize;
    for sweep in 1..=params.max_inner {
        let (fx, fr) = ctx
            .flux_fields(&phi_hat)
            .map_err(|e| e.in_loop(crate::error::LoopLevel::Picard, Some(phase), sweep))?;
        let forcing = divergence(grid, &fx, &fr);
        let (solution, residual) = factored.solve(&forcing)?;
        let mut next = phi_hat.clone();
        next.relax_from(&solution, omega);
        let change = next.max_diff(&phi_hat);
        phi_hat = next;
        if change < params.tol_picard {
            return Ok((
                phi_hat,
                LinearSolveReport {
                    iterations: sweep,
                    final_residual: residual,
                    elapsed: start.elapsed().as_secs_f64(),
                },
            ));
        }
        if change > last_change {
            growth_streak += 1;
            if growth_streak >= 5 {
                if halvings >= 4 {
                    return Err(Error::PicardDiverged {
                        iterations: sweep,
                        last_change: change,
                    });
                }
                omega *= 0.5;
                halvings += 1;
                growth_streak = 0;
            }
        } else {
            growth_streak = 0;
        }
        last_change = change;
    }
    Err(Error::PicardDiverged {
        iterations: params.max_inner,
        last_change,
    })
}

/// Solve the azimuthal stream problem for one phase. The minus phase takes
/// the pressure-matching Robin datum on the interface; the plus phase is
/// pinned to zero on both the wall and the interface.
pub fn solve_psi(
    phase: PhaseTag,
    grid: &MappedGrid,
    forcing: &Field,
    robin_data: Option<&[f64]>,
    params: &EllipticParams,
) -> Result<(Field, LinearSolveReport)> {
    let start = Instant::now();
    let nx = grid.nx;
    let ns = grid.ns;
    let (lower, upper) = match phase {
        PhaseTag::Plus => (
            SideCondition::dirichlet0(nx + 1),
            SideCondition::dirichlet0(nx + 1),
        ),
        PhaseTag::Minus => {
            let data = robin_data.expect("minus-phase psi needs the interface datum");
            assert_eq!(data.len(), nx + 1);
            let mu: Vec<f64> = (0..=nx)
                .map(|i| {
                    let fp = grid.fp[i];
                    -1.0 / (grid.f[i] * (1.0 + fp * fp).sqrt())
                })
                .collect();
            (
                SideCondition::dirichlet0(nx + 1),
                SideCondition::Robin {
                    mu,
                    values: data.to_vec(),
                },
            )
        }
    };
    let problem = EllipticProblem {
        phase,
        grid,
        operator: EllipticOperator::azimuthal_stream(),
        entrance: SideCondition::neumann0(ns + 1),
        exit: SideCondition::neumann0(ns + 1),
        lower,
        upper,
    };
    let factored = problem.factor(params.tol_linear)?;
    // The operator is -(laplacian - 1/r^2), so the forcing enters as given.
    let (psi, residual) = factored.solve(forcing)?;
    Ok((
        psi,
        LinearSolveReport {
            iterations: 1,
            final_residual: residual,
            elapsed: start.elapsed().as_secs_f64(),
        },
    ))
}
