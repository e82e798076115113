//! Entrance data: radial profiles of the transverse speed `v_en`, swirl
//! `w_en`, and entropy `S_en` for both phases, with the compact-support
//! constraints on `v_en` and the perturbation magnitude `sigma`.

use crate::eos::{FlowConstants, PhaseTag};
use crate::error::Error;
use crate::spline::CubicSpline;
use crate::Result;

/// Radial profile stored as dense uniform samples with cubic-spline
/// evaluation. Profiles hold perturbations (zero at the background).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub lo: f64,
    pub hi: f64,
    pub samples: Vec<f64>,
    spline: CubicSpline,
}

impl RadialProfile {
    pub fn from_samples(lo: f64, hi: f64, samples: Vec<f64>) -> Self {
        let spline = CubicSpline::new(lo, hi, samples.clone());
        RadialProfile { lo, hi, samples, spline }
    }

    pub fn zero(lo: f64, hi: f64) -> Self {
        Self::from_samples(lo, hi, vec![0.0; 65])
    }

    pub fn value(&self, r: f64) -> f64 {
        self.spline.eval(r.clamp(self.lo, self.hi))
    }

    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.spline.integral(a, b)
    }

    /// Sum of the sup norms of the value and first `orders` derivatives,
    /// evaluated densely between the knots.
    pub fn cn_norm(&self, orders: usize) -> f64 {
        let n = 4 * (self.samples.len() - 1);
        let mut sup = vec![0.0_f64; orders + 1];
        for k in 0..=n {
            let r = self.lo + (self.hi - self.lo) * k as f64 / n as f64;
            sup[0] = sup[0].max(self.spline.eval(r).abs());
            if orders >= 1 {
                sup[1] = sup[1].max(self.spline.deriv(r).abs());
            }
            if orders >= 2 {
                sup[2] = sup[2].max(self.spline.second_deriv(r).abs());
            }
        }
        sup.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn scaled(&self, factor: f64) -> Self {
        Self::from_samples(
            self.lo,
            self.hi,
            self.samples.iter().map(|v| v * factor).collect(),
        )
    }
}

/// Per-phase entrance perturbations.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfiles {
    pub v: RadialProfile,
    pub w: RadialProfile,
    /// Entropy perturbation `S_en - S0`.
    pub ds: RadialProfile,
}

/// Entrance data for both phases together with the support margin `epsilon`
/// and the computed perturbation magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct EntranceProfiles {
    pub epsilon: f64,
    pub minus: PhaseProfiles,
    pub plus: PhaseProfiles,
    pub sigma: f64,
    s0_plus: f64,
    s0_minus: f64,
}

/// Polynomial mollifier bump `(1 - t^2)^3` on `|t| < 1`; vanishes with two
/// derivatives at the support boundary.
pub fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        let w = 1.0 - t * t;
        w * w * w
    }
}

const PRESET_SAMPLES: usize = 801;

fn sampled(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> RadialProfile {
    let n = PRESET_SAMPLES;
    let samples: Vec<f64> = (0..n)
        .map(|k| f(lo + (hi - lo) * k as f64 / (n - 1) as f64))
        .collect();
    RadialProfile::from_samples(lo, hi, samples)
}

impl EntranceProfiles {
    /// The unperturbed background: sigma is exactly zero.
    pub fn background(consts: &FlowConstants) -> Self {
        EntranceProfiles {
            epsilon: 0.05,
            minus: PhaseProfiles {
                v: RadialProfile::zero(0.0, 0.5),
                w: RadialProfile::zero(0.0, 0.5),
                ds: RadialProfile::zero(0.0, 0.5),
            },
            plus: PhaseProfiles {
                v: RadialProfile::zero(0.5, 1.0),
                w: RadialProfile::zero(0.5, 1.0),
                ds: RadialProfile::zero(0.5, 1.0),
            },
            sigma: 0.0,
            s0_plus: consts.s0(PhaseTag::Plus),
            s0_minus: consts.s0(PhaseTag::Minus),
        }
    }

    /// Smooth compact-support preset family scaled so the computed
    /// perturbation magnitude equals `sigma_target`. The support conditions
    /// on `v_en` hold exactly by construction.
    pub fn preset(consts: &FlowConstants, epsilon: f64, sigma_target: f64) -> Result<Self> {
        if sigma_target == 0.0 {
            return Ok(Self::background(consts));
        }
        if !(epsilon > 0.0 && epsilon < 0.1) {
            return Err(Error::config(
                "entrance.epsilon",
                format!("support margin must lie in (0, 1/10), got {epsilon}"),
            ));
        }
        let s0m = consts.s0(PhaseTag::Minus);
        let s0p = consts.s0(PhaseTag::Plus);
        // Unit-amplitude family; everything scales linearly below.
        let v_minus_hi = 0.5 - epsilon;
        let minus = PhaseProfiles {
            // Supported inside [0.1, 1/2 - epsilon], away from the axis.
            v: sampled(0.0, 0.5, |r| {
                bump((r - 0.5 * (0.1 + v_minus_hi)) / (0.5 * (v_minus_hi - 0.1)))
            }),
            // Swirl bump peaking at the interface seed, vanishing near the axis.
            w: sampled(0.0, 0.5, |r| bump((r - 0.5) / 0.35)),
            ds: sampled(0.0, 0.5, |r| s0m * bump((r - 0.25) / 0.2)),
        };
        let v_plus_lo = 0.5 + epsilon;
        let v_plus_hi = 1.0 - epsilon;
        let plus = PhaseProfiles {
            v: sampled(0.5, 1.0, |r| {
                bump((r - 0.5 * (v_plus_lo + v_plus_hi)) / (0.5 * (v_plus_hi - v_plus_lo)))
            }),
            w: sampled(0.5, 1.0, |r| bump((r - 0.75) / 0.15)),
            ds: sampled(0.5, 1.0, |r| s0p * bump((r - 0.75) / 0.2)),
        };
        let mut profiles = EntranceProfiles {
            epsilon,
            minus,
            plus,
            sigma: 0.0,
            s0_plus: s0p,
            s0_minus: s0m,
        };
        let unit_sigma = profiles.compute_sigma();
        profiles.rescale(sigma_target / unit_sigma);
        profiles.sigma = profiles.compute_sigma();
        profiles.validate_support()?;
        Ok(profiles)
    }

    /// Build from sampled perturbation profiles (validated numerically).
    pub fn from_sampled(
        consts: &FlowConstants,
        epsilon: f64,
        minus: PhaseProfiles,
        plus: PhaseProfiles,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.1) {
            return Err(Error::config(
                "entrance.epsilon",
                format!("support margin must lie in (0, 1/10), got {epsilon}"),
            ));
        }
        let mut profiles = EntranceProfiles {
            epsilon,
            minus,
            plus,
            sigma: 0.0,
            s0_plus: consts.s0(PhaseTag::Plus),
            s0_minus: consts.s0(PhaseTag::Minus),
        };
        profiles.sigma = profiles.compute_sigma();
        profiles.validate_support()?;
        Ok(profiles)
    }

    fn phase(&self, phase: PhaseTag) -> &PhaseProfiles {
        match phase {
            PhaseTag::Plus => &self.plus,
            PhaseTag::Minus => &self.minus,
        }
    }

    pub fn s0(&self, phase: PhaseTag) -> f64 {
        match phase {
            PhaseTag::Plus => self.s0_plus,
            PhaseTag::Minus => self.s0_minus,
        }
    }

    /// Radial entrance speed (the datum of `u . (-e_r)`).
    pub fn v(&self, phase: PhaseTag, r: f64) -> f64 {
        self.phase(phase).v.value(r)
    }

    /// Swirl entrance speed `u . e_theta`.
    pub fn w(&self, phase: PhaseTag, r: f64) -> f64 {
        self.phase(phase).w.value(r)
    }

    /// Absolute entrance entropy.
    pub fn s_en(&self, phase: PhaseTag, r: f64) -> f64 {
        self.s0(phase) + self.phase(phase).ds.value(r)
    }

    /// `int_from^to v_en(t) dt` along the entrance.
    pub fn integral_v(&self, phase: PhaseTag, from: f64, to: f64) -> f64 {
        self.phase(phase).v.integral(from, to)
    }

    /// Swirl seed of the interface streamline: `w_en_minus(1/2)`.
    pub fn w_seed(&self) -> f64 {
        self.minus.w.value(0.5)
    }

    /// Sum over phases of the discrete `C^2`-type norms of the entropy and
    /// swirl perturbations plus the `C^1` norm of the transverse speed.
    pub fn compute_sigma(&self) -> f64 {
        let part = |p: &PhaseProfiles| p.ds.cn_norm(2) + p.w.cn_norm(2) + p.v.cn_norm(1);
        part(&self.minus) + part(&self.plus)
    }

    fn rescale(&mut self, factor: f64) {
        for p in [&mut self.minus, &mut self.plus] {
            p.v = p.v.scaled(factor);
            p.w = p.w.scaled(factor);
            p.ds = p.ds.scaled(factor);
        }
    }

    /// Same perturbation shapes rescaled to a new magnitude.
    pub fn scaled_to(&self, sigma_target: f64) -> Self {
        let mut out = self.clone();
        if self.sigma == 0.0 {
            return out;
        }
        out.rescale(sigma_target / self.sigma);
        out.sigma = out.compute_sigma();
        out
    }

    /// Numeric check of the compact-support conditions on `v_en`.
    pub fn validate_support(&self) -> Result<()> {
        let tol = 1e-12
            * self
                .minus
                .v
                .max_abs()
                .max(self.plus.v.max_abs())
                .max(1.0);
        let n = 400;
        for k in 0..=n {
            let r = 0.5 * k as f64 / n as f64;
            if r > 0.5 - self.epsilon && self.v(PhaseTag::Minus, r).abs() > tol {
                return Err(Error::config(
                    "entrance.v_minus",
                    format!(
                        "support condition violated: v_en_minus({r:.4}) = {:.3e} but must vanish for r > 1/2 - epsilon = {:.4}",
                        self.v(PhaseTag::Minus, r),
                        0.5 - self.epsilon
                    ),
                ));
            }
            let rp = 0.5 + 0.5 * k as f64 / n as f64;
            let inside = rp >= 0.5 + self.epsilon && rp <= 1.0 - self.epsilon;
            if !inside && self.v(PhaseTag::Plus, rp).abs() > tol {
                return Err(Error::config(
                    "entrance.v_plus",
                    format!(
                        "support condition violated: v_en_plus({rp:.4}) = {:.3e} but must vanish outside [1/2 + epsilon, 1 - epsilon]",
                        self.v(PhaseTag::Plus, rp)
                    ),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consts() -> FlowConstants {
        FlowConstants::new(1.4, 0.8, 1.0, 0.05, 0.5, 1.0).unwrap()
    }

    #[test]
    fn background_has_zero_sigma() {
        let p = EntranceProfiles::background(&consts());
        assert_eq!(p.sigma, 0.0);
        assert_eq!(p.v(PhaseTag::Minus, 0.3), 0.0);
        assert_eq!(p.s_en(PhaseTag::Plus, 0.7), consts().s0(PhaseTag::Plus));
    }

    #[test]
    fn preset_hits_sigma_target() {
        let p = EntranceProfiles::preset(&consts(), 0.05, 1e-3).unwrap();
        assert!((p.sigma - 1e-3).abs() < 1e-12);
        assert!(p.s_en(PhaseTag::Minus, 0.25) != consts().s0(PhaseTag::Minus));
        assert!(p.s_en(PhaseTag::Plus, 0.75) != consts().s0(PhaseTag::Plus));
    }

    #[test]
    fn preset_scaling_is_linear() {
        let p1 = EntranceProfiles::preset(&consts(), 0.05, 1e-3).unwrap();
        let p2 = p1.scaled_to(2e-3);
        assert!((p2.sigma - 2e-3).abs() < 1e-12);
        let r = 0.27;
        assert!(
            (p2.v(PhaseTag::Minus, r) - 2.0 * p1.v(PhaseTag::Minus, r)).abs() < 1e-15
        );
    }

    #[test]
    fn preset_satisfies_support_conditions() {
        let p = EntranceProfiles::preset(&consts(), 0.05, 1e-3).unwrap();
        // Spline evaluation leaves only an exponentially decayed tail.
        assert!(p.v(PhaseTag::Minus, 0.47).abs() < 1e-30);
        assert!(p.v(PhaseTag::Plus, 0.52).abs() < 1e-30);
        assert!(p.v(PhaseTag::Plus, 0.97).abs() < 1e-30);
        assert!(p.w_seed() != 0.0, "swirl seed should be exercised");
    }

    #[test]
    fn support_violation_is_rejected() {
        let c = consts();
        let bad = PhaseProfiles {
            v: sampled(0.0, 0.5, |r| bump((r - 0.49) / 0.05)),
            w: RadialProfile::zero(0.0, 0.5),
            ds: RadialProfile::zero(0.0, 0.5),
        };
        let plus = PhaseProfiles {
            v: RadialProfile::zero(0.5, 1.0),
            w: RadialProfile::zero(0.5, 1.0),
            ds: RadialProfile::zero(0.5, 1.0),
        };
        let res = EntranceProfiles::from_sampled(&c, 0.05, bad, plus);
        assert!(matches!(res, Err(Error::Config { .. })));
    }

    #[test]
    fn integral_matches_closed_form() {
        // The bump integrates to 32/35 of its half-width over full support.
        let prof = sampled(0.0, 0.5, |r| bump((r - 0.25) / 0.2));
        let exact = 0.2 * 32.0 / 35.0;
        assert!((prof.integral(0.05, 0.45) - exact).abs() < 1e-10);
    }
}
