//! Natural cubic spline on a uniform grid, with derivatives and the exact
//! integral of the piecewise cubic. Used for entrance profiles.

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    lo: f64,
    hi: f64,
    h: f64,
    values: Vec<f64>,
    /// Second derivatives at the knots (natural: zero at both ends).
    m: Vec<f64>,
}

impl CubicSpline {
    /// Build from uniform samples of `values` on `[lo, hi]`; needs >= 3 samples.
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> Self {
        let n = values.len();
        assert!(n >= 3, "spline needs at least 3 samples");
        assert!(hi > lo);
        let h = (hi - lo) / (n - 1) as f64;
        // Tridiagonal system for the interior second derivatives:
        // m[i-1] + 4 m[i] + m[i+1] = 6 (v[i-1] - 2 v[i] + v[i+1]) / h^2.
        let mut diag = vec![4.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            rhs[i] = 6.0 * (values[i - 1] - 2.0 * values[i] + values[i + 1]) / (h * h);
        }
        let mut m = vec![0.0; n];
        // Thomas algorithm on rows 1..n-1 (rows 0 and n-1 are m = 0).
        for i in 2..n - 1 {
            let w = 1.0 / diag[i - 1];
            diag[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        if n >= 3 {
            m[n - 2] = rhs[n - 2] / diag[n - 2];
            for i in (1..n - 2).rev() {
                m[i] = (rhs[i] - m[i + 1]) / diag[i];
            }
        }
        CubicSpline { lo, hi, h, values, m }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.values.len();
        let t = (x - self.lo) / self.h;
        let k = (t.floor() as isize).clamp(0, n as isize - 2) as usize;
        (k, x - (self.lo + k as f64 * self.h))
    }

    /// Spline value; clamped extrapolation outside `[lo, hi]` is the end cubic.
    pub fn eval(&self, x: f64) -> f64 {
        let (k, d) = self.locate(x);
        let h = self.h;
        let (v0, v1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.m[k], self.m[k + 1]);
        let a = d / h;
        let b = 1.0 - a;
        b * v0 + a * v1 + h * h / 6.0 * ((b * b * b - b) * m0 + (a * a * a - a) * m1)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let (k, d) = self.locate(x);
        let h = self.h;
        let (v0, v1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.m[k], self.m[k + 1]);
        let a = d / h;
        let b = 1.0 - a;
        (v1 - v0) / h + h / 6.0 * ((3.0 * a * a - 1.0) * m1 - (3.0 * b * b - 1.0) * m0)
    }

    pub fn second_deriv(&self, x: f64) -> f64 {
        let (k, d) = self.locate(x);
        let a = d / self.h;
        (1.0 - a) * self.m[k] + a * self.m[k + 1]
    }

    /// Exact integral of the piecewise cubic over `[a, b]` (both clamped to
    /// the knot range).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if a > b {
            return -self.integral(b, a);
        }
        let a = a.clamp(self.lo, self.hi);
        let b = b.clamp(self.lo, self.hi);
        let (ka, _) = self.locate(a);
        let (kb, _) = self.locate(b);
        let mut total = 0.0;
        for k in ka..=kb {
            let x0 = (self.lo + k as f64 * self.h).max(a);
            let x1 = (self.lo + (k + 1) as f64 * self.h).min(b);
            if x1 > x0 {
                total += self.segment_integral(k, x0, x1);
            }
        }
        total
    }

    fn segment_integral(&self, k: usize, x0: f64, x1: f64) -> f64 {
        let h = self.h;
        let xk = self.lo + k as f64 * self.h;
        let (v0, v1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.m[k], self.m[k + 1]);
        // Antiderivative in the local variable a = (x - xk)/h, b = 1 - a:
        // d/da of the primitive below reproduces eval(); scaled by h.
        let prim = |x: f64| -> f64 {
            let a = (x - xk) / h;
            let b = 1.0 - a;
            h * (-b * b / 2.0 * v0 + a * a / 2.0 * v1
                + h * h / 6.0
                    * (-(b * b * b * b / 4.0 - b * b / 2.0) * m0
                        + (a * a * a * a / 4.0 - a * a / 2.0) * m1))
        };
        prim(x1) - prim(x0)
    }
}
