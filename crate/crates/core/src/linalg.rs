//! Dense complex matrix helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Square complex matrix. Rows and columns follow the basis order
/// `μ = j, j-1, …, -j`.
pub type ComplexMatrix = DMatrix<Complex64>;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Largest entry of `a - a†`.
pub fn hermiticity_defect(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in r..n {
            worst = worst.max((a[(r, c)] - a[(c, r)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()).scale(0.5)
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are returned in
/// ascending order with matching eigenvector columns.
pub fn hermitian_eigen(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), ComplexMatrix::zeros(0, 0));
    }
    let eig = hermitian_part(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    hermitian_eigen(a).0
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_function(a: &ComplexMatrix, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
    let (values, vectors) = hermitian_eigen(a);
    let diag = DVector::from_iterator(values.len(), values.iter().map(|&v| f(v)));
    &vectors * ComplexMatrix::from_diagonal(&diag) * vectors.adjoint()
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn unitary_from_hamiltonian(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    hermitian_function(h, |e| Complex64::from_polar(1.0, -e * t))
}

/// Principal square root of a positive semidefinite matrix; negative
/// eigenvalues from rounding are clipped to zero.
pub fn psd_sqrt(a: &ComplexMatrix) -> ComplexMatrix {
    hermitian_function(a, |e| Complex64::new(e.max(0.0).sqrt(), 0.0))
}

pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &ComplexMatrix::identity(n, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_sorted_and_reconstruct() {
        let a = ComplexMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0), Complex64::new(2.0, 0.0)],
        );
        let (vals, vecs) = hermitian_eigen(&a);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        let diag = ComplexMatrix::from_diagonal(&DVector::from_iterator(2, vals.iter().map(|&v| Complex64::new(v, 0.0))));
        assert!(max_abs_diff(&(&vecs * diag * vecs.adjoint()), &a) < 1e-14);
    }

    #[test]
    fn sqrt_squares_back() {
        let a = ComplexMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(0.7, 0.0), Complex64::new(0.1, 0.2), Complex64::new(0.1, -0.2), Complex64::new(0.3, 0.0)],
        );
        let s = psd_sqrt(&a);
        assert!(max_abs_diff(&(&s * &s), &a) < 1e-14);
    }
}
