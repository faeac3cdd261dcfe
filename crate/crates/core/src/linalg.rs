//! 4×4 complex matrix helpers backed by nalgebra.

use nalgebra::{Matrix4, Schur, Vector4};
use num_complex::Complex64;

pub type Matrix4c = Matrix4<Complex64>;
pub type Vector4c = Vector4<Complex64>;

const SCHUR_EPS: f64 = 1.0e-15;
const SCHUR_MAX_ITER: usize = 10_000;

/// Dense LU inverse; `None` when the matrix is numerically singular.
pub fn invert(m: &Matrix4c) -> Option<Matrix4c> {
    m.try_inverse()
}

/// Eigenvalues from the complex Schur form (diagonal of the triangular factor).
pub fn eigenvalues(m: &Matrix4c) -> Option<Vector4c> {
    let schur = Schur::try_new(*m, SCHUR_EPS, SCHUR_MAX_ITER)?;
    let (_, t) = schur.unpack();
    Some(t.diagonal())
}
