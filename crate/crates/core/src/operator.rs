//! General 2×2 operators, used for density matrices and the one-sided
//! projections that appear in quasi-probabilities.

use num_complex::Complex64;

/// A 2×2 operator stored as (x00, x01, x10) plus its trace.
///
/// Keeping the trace instead of x11 makes trace preservation exact under any
/// of the propagators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator2 {
    pub x00: Complex64,
    pub x01: Complex64,
    pub x10: Complex64,
    pub trace: Complex64,
}

impl Operator2 {
    pub fn from_matrix(m: [[Complex64; 2]; 2]) -> Self {
        Self { x00: m[0][0], x01: m[0][1], x10: m[1][0], trace: m[0][0] + m[1][1] }
    }

    pub fn x11(&self) -> Complex64 {
        self.trace - self.x00
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.x00, self.x01], [self.x10, self.x11()]]
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        let a = self.matrix();
        let b = other.matrix();
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self::from_matrix(m)
    }

    /// Tr[self · other].
    pub fn trace_with(&self, other: &Self) -> Complex64 {
        self.x00 * other.x00 + self.x01 * other.x10 + self.x10 * other.x01 + self.x11() * other.x11()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.x00.im.abs() <= tol && self.trace.im.abs() <= tol && (self.x01 - self.x10.conj()).norm() <= tol
    }

    pub(crate) fn axpy(&self, h: f64, d: &Self) -> Self {
        Self {
            x00: self.x00 + d.x00 * h,
            x01: self.x01 + d.x01 * h,
            x10: self.x10 + d.x10 * h,
            trace: self.trace + d.trace * h,
        }
    }
}
