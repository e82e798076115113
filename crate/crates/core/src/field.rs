//! Dense node fields on an `(x, s)` grid and small vector helpers.

/// Velocity-like quantity in the cylindrical basis `(e_x, e_r, e_theta)`.
pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm_sq(a: Vec3) -> f64 {
    dot(a, a)
}

pub fn add3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Scalar field sampled at the `(nx+1) x (ns+1)` nodes of a mapped grid,
/// stored x-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub nx: usize,
    pub ns: usize,
    pub data: Vec<f64>,
}

impl Field {
    pub fn zeros(nx: usize, ns: usize) -> Self {
        Field {
            nx,
            ns,
            data: vec![0.0; (nx + 1) * (ns + 1)],
        }
    }

    pub fn constant(nx: usize, ns: usize, value: f64) -> Self {
        Field {
            nx,
            ns,
            data: vec![value; (nx + 1) * (ns + 1)],
        }
    }

    pub fn from_fn(nx: usize, ns: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity((nx + 1) * (ns + 1));
        for i in 0..=nx {
            for j in 0..=ns {
                data.push(f(i, j));
            }
        }
        Field { nx, ns, data }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.ns + 1) + j
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Max-norm of the difference with `other` (same shape).
    pub fn max_diff(&self, other: &Field) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `self = (1 - w) * self + w * other`.
    pub fn relax_from(&mut self, other: &Field, w: f64) {
        assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = (1.0 - w) * *a + w * *b;
        }
    }
}
