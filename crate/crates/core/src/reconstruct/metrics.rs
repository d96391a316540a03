use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::states::Operator;

fn same_space<A: Operator + ?Sized, B: Operator + ?Sized>(a: &A, b: &B) -> Result<()> {
    if a.j() != b.j() || a.matrix().shape() != b.matrix().shape() {
        return Err(Error::domain(format!("operators act on different spaces (j = {} vs j = {})", a.j(), b.j())));
    }
    Ok(())
}

/// Eigenvalues at rounding level of `scale` are treated as zero so that
/// square roots of rank-deficient matrices stay accurate.
fn clip(v: f64, scale: f64, dim: usize) -> f64 {
    if v <= 64.0 * f64::EPSILON * dim as f64 * scale {
        0.0
    } else {
        v
    }
}

fn clipped_sqrt(a: &ComplexMatrix) -> ComplexMatrix {
    let (values, vectors) = linalg::hermitian_eigen(&linalg::hermitian_part(a));
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diag = DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex64::new(clip(v, scale, values.len()).sqrt(), 0.0)),
    );
    &vectors * ComplexMatrix::from_diagonal(&diag) * vectors.adjoint()
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(a) b sqrt(a)))²`, clamped to `[0, 1]`.
pub fn fidelity<A: Operator + ?Sized, B: Operator + ?Sized>(a: &A, b: &B) -> Result<f64> {
    same_space(a, b)?;
    let sa = clipped_sqrt(a.matrix());
    let inner = linalg::hermitian_part(&(&sa * b.matrix() * &sa));
    let values = linalg::hermitian_eigenvalues(&inner);
    let scale = linalg::max_abs(a.matrix()).max(f64::MIN_POSITIVE) * linalg::max_abs(b.matrix());
    let root: f64 = values.iter().map(|&v| clip(v, scale, values.len()).sqrt()).sum();
    Ok((root * root).clamp(0.0, 1.0))
}

/// `½ Tr |a - b|`.
pub fn trace_distance<A: Operator + ?Sized, B: Operator + ?Sized>(a: &A, b: &B) -> Result<f64> {
    same_space(a, b)?;
    let diff = linalg::hermitian_part(&(a.matrix() - b.matrix()));
    Ok(0.5 * linalg::hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>())
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff<A: Operator + ?Sized, B: Operator + ?Sized>(a: &A, b: &B) -> Result<f64> {
    same_space(a, b)?;
    Ok(linalg::max_abs_diff(a.matrix(), b.matrix()))
}
