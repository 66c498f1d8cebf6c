//! 2×2 real matrices and max-norm helpers.

use serde::{Deserialize, Serialize};

pub type Vec2 = [f64; 2];

/// Row-major 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Mat2 {
            a: self.d / det,
            b: -self.b / det,
            c: -self.c / det,
            d: self.a / det,
        })
    }

    /// Operator norm induced by the max norm (largest absolute row sum).
    pub fn norm_max(&self) -> f64 {
        (self.a.abs() + self.b.abs()).max(self.c.abs() + self.d.abs())
    }

    /// Co-norm m(A) = min over max-norm unit u of ‖Au‖_max = 1/‖A⁻¹‖.
    pub fn conorm_max(&self) -> f64 {
        match self.inverse() {
            Some(inv) => 1.0 / inv.norm_max(),
            None => 0.0,
        }
    }

    /// Singular values (σ₁ ≥ σ₂) for the euclidean norm.
    pub fn singular_values(&self) -> (f64, f64) {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let s = a * a + b * b + c * c + d * d;
        let det = (a * d - b * c).abs();
        let root = ((s * s - 4.0 * det * det).max(0.0)).sqrt();
        let s1 = ((s + root) / 2.0).sqrt();
        let s2 = if s1 > 0.0 { det / s1 } else { 0.0 };
        (s1, s2)
    }

    /// Left singular vector for σ₁: the most expanded image direction.
    pub fn top_left_singular(&self) -> Vec2 {
        // Eigenvector of A Aᵀ for its largest eigenvalue.
        let p = self.a * self.a + self.b * self.b;
        let q = self.a * self.c + self.b * self.d;
        let r = self.c * self.c + self.d * self.d;
        let theta = 0.5 * (2.0 * q).atan2(p - r);
        [theta.cos(), theta.sin()]
    }
}

pub fn norm_max(v: Vec2) -> f64 {
    v[0].abs().max(v[1].abs())
}

pub fn norm_euclid(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

/// Rescale to max-norm one. Returns `None` for the zero vector.
pub fn normalize_max(v: Vec2) -> Option<Vec2> {
    let n = norm_max(v);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some([v[0] / n, v[1] / n])
}
