//! Thermodynamic closures for the ideal polytropic gas, the piecewise-constant
//! background state, the swirl/entropy vorticity source, and the linearization
//! of the momentum flux around the background.
//!
//! Everything here is a pure function of its inputs.

use crate::error::Error;
use crate::field::{norm_sq, Vec3};
use crate::Result;

/// Selects one of the two flow phases: `Plus` is the outer region between the
/// interface and the cylinder wall, `Minus` the inner region around the axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseTag {
    Plus,
    Minus,
}

impl PhaseTag {
    pub const BOTH: [PhaseTag; 2] = [PhaseTag::Plus, PhaseTag::Minus];

    pub fn name(self) -> &'static str {
        match self {
            PhaseTag::Plus => "plus",
            PhaseTag::Minus => "minus",
        }
    }
}

impl std::fmt::Display for PhaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Relative admissibility margin: states with `B0 - |q|^2/2 < MARGIN * B0`
/// are rejected to keep the fractional powers well-conditioned.
pub const ADMISSIBILITY_MARGIN: f64 = 1e-6;

/// Physical background: adiabatic exponent, per-phase densities and axial
/// speeds, and the shared pressure. The derived entropies `S0` and Bernoulli
/// constants `B0` are fixed at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConstants {
    pub gamma: f64,
    pub rho0_plus: f64,
    pub rho0_minus: f64,
    pub u0_plus: f64,
    pub u0_minus: f64,
    pub p0: f64,
    s0_plus: f64,
    s0_minus: f64,
    b0_plus: f64,
    b0_minus: f64,
}

impl FlowConstants {
    /// Validates the background invariants: positivity, a strict tangential
    /// velocity jump `0 < u0_plus < u0_minus`, and subsonic speeds.
    pub fn new(
        gamma: f64,
        rho0_plus: f64,
        rho0_minus: f64,
        u0_plus: f64,
        u0_minus: f64,
        p0: f64,
    ) -> Result<Self> {
        let check = |cond: bool, path: &str, reason: String| -> Result<()> {
            if cond {
                Ok(())
            } else {
                Err(Error::config(path, reason))
            }
        };
        check(gamma > 1.0, "constants.gamma", format!("must be > 1, got {gamma}"))?;
        check(p0 > 0.0, "constants.p0", format!("must be > 0, got {p0}"))?;
        check(
            rho0_plus > 0.0,
            "constants.rho0_plus",
            format!("must be > 0, got {rho0_plus}"),
        )?;
        check(
            rho0_minus > 0.0,
            "constants.rho0_minus",
            format!("must be > 0, got {rho0_minus}"),
        )?;
        check(
            u0_plus > 0.0,
            "constants.u0_plus",
            format!("must be > 0, got {u0_plus}"),
        )?;
        check(
            u0_plus < u0_minus,
            "constants.u0_plus",
            format!("tangential jump requires u0_plus < u0_minus, got {u0_plus} >= {u0_minus}"),
        )?;
        for (u0, rho0, name) in [
            (u0_plus, rho0_plus, "constants.u0_plus"),
            (u0_minus, rho0_minus, "constants.u0_minus"),
        ] {
            let c0 = (gamma * p0 / rho0).sqrt();
            check(
                u0 < c0,
                name,
                format!("background must be subsonic: {u0} >= sound speed {c0:.6}"),
            )?;
        }
        let s0_plus = p0 / rho0_plus.powf(gamma);
        let s0_minus = p0 / rho0_minus.powf(gamma);
        let b0_plus = u0_plus * u0_plus / 2.0 + gamma * p0 / ((gamma - 1.0) * rho0_plus);
        let b0_minus = u0_minus * u0_minus / 2.0 + gamma * p0 / ((gamma - 1.0) * rho0_minus);
        Ok(FlowConstants {
            gamma,
            rho0_plus,
            rho0_minus,
            u0_plus,
            u0_minus,
            p0,
            s0_plus,
            s0_minus,
            b0_plus,
            b0_minus,
        })
    }

    pub fn rho0(&self, phase: PhaseTag) -> f64 {
        match phase {
            PhaseTag::Plus => self.rho0_plus,
            PhaseTag::Minus => self.rho0_minus,
        }
    }

    pub fn u0(&self, phase: PhaseTag) -> f64 {
        match phase {
            PhaseTag::Plus => self.u0_plus,
            PhaseTag::Minus => self.u0_minus,
        }
    }

    /// Background entropy `S0 = p0 / rho0^gamma`.
    pub fn s0(&self, phase: PhaseTag) -> f64 {
        match phase {
            PhaseTag::Plus => self.s0_plus,
            PhaseTag::Minus => self.s0_minus,
        }
    }

    /// Background Bernoulli constant `B0 = |u0|^2/2 + gamma p0 / ((gamma-1) rho0)`.
    pub fn b0(&self, phase: PhaseTag) -> f64 {
        match phase {
            PhaseTag::Plus => self.b0_plus,
            PhaseTag::Minus => self.b0_minus,
        }
    }

    /// Background Mach number `u0 / sqrt(gamma p0 / rho0)`.
    pub fn mach0(&self, phase: PhaseTag) -> f64 {
        self.u0(phase) / (self.gamma * self.p0 / self.rho0(phase)).sqrt()
    }

    /// Background uniform velocity vector.
    pub fn q0(&self, phase: PhaseTag) -> Vec3 {
        [self.u0(phase), 0.0, 0.0]
    }

    /// Default axial mass-flux floor: a tenth of the smaller background flux.
    pub fn default_axial_floor(&self) -> f64 {
        0.1 * (self.rho0_plus * self.u0_plus).min(self.rho0_minus * self.u0_minus)
    }

    /// Density from entropy and velocity:
    /// `rho = ((gamma-1)(B0 - |q|^2/2) / (gamma S))^(1/(gamma-1))`.
    ///
    /// Strictly decreasing in `|q|` and in `S`. Fails with
    /// [`Error::NonPositiveEntropy`] or [`Error::CavitatedState`] when the
    /// state has left the subsonic perturbation regime.
    pub fn density(&self, phase: PhaseTag, s: f64, q: Vec3) -> Result<f64> {
        if s <= 0.0 {
            return Err(Error::NonPositiveEntropy(s));
        }
        let b0 = self.b0(phase);
        let head = b0 - 0.5 * norm_sq(q);
        let floor = ADMISSIBILITY_MARGIN * b0;
        if head < floor {
            return Err(Error::CavitatedState { margin: head, floor });
        }
        let g = self.gamma;
        Ok(((g - 1.0) * head / (g * s)).powf(1.0 / (g - 1.0)))
    }

    /// Pressure `p = S rho^gamma`.
    pub fn pressure(&self, phase: PhaseTag, s: f64, q: Vec3) -> Result<f64> {
        let rho = self.density(phase, s, q)?;
        Ok(s * rho.powf(self.gamma))
    }

    /// Sound speed and Mach number of the state `(S, q)`.
    pub fn sound_speed_and_mach(&self, phase: PhaseTag, s: f64, q: Vec3) -> Result<(f64, f64)> {
        let rho = self.density(phase, s, q)?;
        let p = s * rho.powf(self.gamma);
        let c = (self.gamma * p / rho).sqrt();
        Ok((c, norm_sq(q).sqrt() / c))
    }

    /// Source term of the azimuthal stream equation:
    /// `G = (dS_dr rho^{gamma-1}/(gamma-1) + Lambda dLambda_dr / r^2) / q_x`
    /// with `rho = density(S, grad_phi + t)` and `q_x` the axial speed.
    ///
    /// `axial_floor` guards the transport direction; at or below it the
    /// streamline formulation is lost and the iterate is rejected.
    #[allow(clippy::too_many_arguments)]
    pub fn vorticity_source(
        &self,
        phase: PhaseTag,
        s: f64,
        lambda: f64,
        ds_dr: f64,
        dlambda_dr: f64,
        grad_phi: Vec3,
        t: Vec3,
        r: f64,
        axial_floor: f64,
    ) -> Result<f64> {
        let q = crate::field::add3(grad_phi, t);
        let axial = q[0];
        if axial <= axial_floor {
            return Err(Error::DegenerateAxialFlow {
                value: axial,
                floor: axial_floor,
            });
        }
        let rho = self.density(phase, s, q)?;
        let g = self.gamma;
        let entropy_term = ds_dr * rho.powf(g - 1.0) / (g - 1.0);
        let swirl_term = lambda * dlambda_dr / (r * r);
        Ok((entropy_term + swirl_term) / axial)
    }

    /// Diagonal coefficients of the momentum-flux linearization at the
    /// background: `alpha_11 = rho0 (1 - M0^2)`, `alpha_22 = alpha_33 = rho0`.
    pub fn linearization_coeffs(&self, phase: PhaseTag) -> (f64, f64, f64) {
        let rho0 = self.rho0(phase);
        let m0 = self.mach0(phase);
        (rho0 * (1.0 - m0 * m0), rho0, rho0)
    }

    /// Momentum flux component `A_i(zeta, a, b) = density(zeta, a+b) * a_i`.
    pub fn momentum_flux(&self, phase: PhaseTag, zeta: f64, a: Vec3, b: Vec3) -> Result<Vec3> {
        let rho = self.density(phase, zeta, crate::field::add3(a, b))?;
        Ok([rho * a[0], rho * a[1], rho * a[2]])
    }

    /// Remainder flux `F(Q)` of the linearized continuity equation, for the
    /// perturbation `Q = (zeta, a, b)` around the background state
    /// `V0 = (S0, grad(phi0), 0)`.
    ///
    /// Computed from the closed-form identity
    /// `F_i(Q) = alpha_ii a_i - [A_i(V0+Q) - A_i(V0)] - density(V0+Q) b_i`,
    /// which is the integral definition collapsed by the fundamental theorem
    /// of calculus.
    pub fn remainder_flux(&self, phase: PhaseTag, zeta: f64, a: Vec3, b: Vec3) -> Result<Vec3> {
        let s0 = self.s0(phase);
        let q0 = self.q0(phase);
        let (a11, a22, a33) = self.linearization_coeffs(phase);
        let alpha = [a11, a22, a33];
        let a_full = self.momentum_flux(phase, s0 + zeta, crate::field::add3(q0, a), b)?;
        let a_base = [self.rho0(phase) * self.u0(phase), 0.0, 0.0];
        let rho = self.density(phase, s0 + zeta, crate::field::add3(q0, crate::field::add3(a, b)))?;
        let mut f = [0.0; 3];
        for i in 0..3 {
            f[i] = alpha[i] * a[i] - (a_full[i] - a_base[i]) - rho * b[i];
        }
        Ok(f)
    }
}
