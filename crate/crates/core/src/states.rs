//! Spin-j states: normalized vectors and density matrices on `H_j`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::linalg::{self, ComplexMatrix};
use crate::sphere::SpherePoint;
use crate::su2::ln_binomial;

pub const NORM_TOLERANCE: f64 = 1e-12;
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
/// Smallest admissible eigenvalue; solvers return tiny negatives for
/// rank-deficient states.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Anything that carries a square matrix on some `H_j`.
pub trait Operator {
    fn j(&self) -> HalfInteger;
    fn matrix(&self) -> &ComplexMatrix;
}

/// Unit vector in `H_j`, amplitudes ordered `μ = j, …, -j`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    j: HalfInteger,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(j: HalfInteger, amplitudes: Vec<Complex64>) -> Result<Self> {
        j.check_label()?;
        if amplitudes.len() != j.dim() {
            return Err(Error::domain(format!(
                "expected {} amplitudes for j = {j}, got {}",
                j.dim(),
                amplitudes.len()
            )));
        }
        let norm2: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::domain(format!("state norm^2 = {norm2} is not 1")));
        }
        Ok(StateVector { j, amplitudes })
    }

    pub fn j(&self) -> HalfInteger {
        self.j
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, mu: HalfInteger) -> Complex64 {
        self.amplitudes[self.j.index_of(mu)]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.j, other.j, "inner product across different j");
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn to_column(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.amplitudes)
    }

    pub fn projector(&self) -> ComplexMatrix {
        let v = self.to_column();
        &v * v.adjoint()
    }

    pub fn apply(&self, u: &ComplexMatrix) -> StateVector {
        let v = u * self.to_column();
        StateVector { j: self.j, amplitudes: v.iter().copied().collect() }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix on `H_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    j: HalfInteger,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(j: HalfInteger, matrix: ComplexMatrix) -> Result<Self> {
        j.check_label()?;
        let n = j.dim();
        if matrix.shape() != (n, n) {
            return Err(Error::domain(format!("density matrix for j = {j} must be {n}x{n}, got {:?}", matrix.shape())));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("density matrix has non-finite entries"));
        }
        let herm = linalg::hermiticity_defect(&matrix);
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::domain(format!("density matrix not Hermitian (defect {herm:e})")));
        }
        let tr = linalg::trace(&matrix);
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
            return Err(Error::domain(format!("density matrix trace {tr} is not 1")));
        }
        let min_eig = linalg::hermitian_eigenvalues(&matrix).first().copied().unwrap_or(0.0);
        if min_eig < -PSD_TOLERANCE {
            return Err(Error::domain(format!("density matrix has negative eigenvalue {min_eig:e}")));
        }
        Ok(DensityMatrix { j, matrix })
    }

    /// Wraps a matrix the caller has already validated, e.g. a unitary image
    /// of a density matrix.
    pub(crate) fn from_trusted(j: HalfInteger, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), j.dim());
        DensityMatrix { j, matrix }
    }

    pub fn pure(state: &StateVector) -> Self {
        DensityMatrix { j: state.j, matrix: state.projector() }
    }

    pub fn maximally_mixed(j: HalfInteger) -> Self {
        let n = j.dim();
        DensityMatrix { j, matrix: ComplexMatrix::identity(n, n) / Complex64::new(n as f64, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&(&self.matrix * &self.matrix)).re
    }

    pub fn to_json(&self) -> DensityJson {
        DensityJson::from_matrix(self.j, &self.matrix)
    }

    pub fn from_json(doc: &DensityJson) -> Result<Self> {
        let (j, m) = doc.to_matrix()?;
        DensityMatrix::new(j, m)
    }
}

impl Operator for DensityMatrix {
    fn j(&self) -> HalfInteger {
        self.j
    }
    fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

impl From<&StateVector> for DensityMatrix {
    fn from(s: &StateVector) -> Self {
        DensityMatrix::pure(s)
    }
}

impl From<StateVector> for DensityMatrix {
    fn from(s: StateVector) -> Self {
        DensityMatrix::pure(&s)
    }
}

/// JSON interchange form `{"two_j": int, "re": [[...]], "im": [[...]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityJson {
    pub two_j: i32,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl DensityJson {
    pub fn from_matrix(j: HalfInteger, m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect()
        };
        DensityJson { two_j: j.twice(), re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    pub fn to_matrix(&self) -> Result<(HalfInteger, ComplexMatrix)> {
        let j = HalfInteger::from_twice(self.two_j).check_label()?;
        let n = j.dim();
        let square = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !square(&self.re) || !square(&self.im) {
            return Err(Error::domain(format!("density JSON arrays must be {n}x{n} for two_j = {}", self.two_j)));
        }
        Ok((j, ComplexMatrix::from_fn(n, n, |r, c| Complex64::new(self.re[r][c], self.im[r][c]))))
    }
}

/// Basis ket `|j,μ⟩`.
pub fn make_dicke(j: HalfInteger, mu: HalfInteger) -> Result<StateVector> {
    j.check_projection(mu)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); j.dim()];
    amps[j.index_of(mu)] = Complex64::new(1.0, 0.0);
    Ok(StateVector { j, amplitudes: amps })
}

/// Coherent state `|j;n⟩ = g(n)|j,j⟩`, amplitudes
/// `binom(2j, j+μ)^{1/2} cos^{j+μ}(θ/2) sin^{j-μ}(θ/2) e^{-iμφ}`.
pub fn make_coherent(j: HalfInteger, n: SpherePoint) -> Result<StateVector> {
    j.check_label()?;
    let (s, c) = (n.theta() / 2.0).sin_cos();
    let tj = i64::from(j.twice());
    let amps = j
        .projections()
        .map(|mu| {
            let up = (tj + i64::from(mu.twice())) / 2;
            let down = tj - up;
            let mag = (0.5 * ln_binomial(tj, up)).exp() * c.powi(up as i32) * s.powi(down as i32);
            Complex64::from_polar(1.0, -mu.value() * n.phi()) * mag
        })
        .collect();
    Ok(StateVector { j, amplitudes: amps })
}

/// Normalized copy of arbitrary coefficients.
pub fn make_superposition(j: HalfInteger, coeffs: &[Complex64]) -> Result<StateVector> {
    j.check_label()?;
    if coeffs.len() != j.dim() {
        return Err(Error::domain(format!("expected {} coefficients for j = {j}, got {}", j.dim(), coeffs.len())));
    }
    let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::domain("superposition coefficients are all zero"));
    }
    if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
        return Ok(StateVector { j, amplitudes: coeffs.to_vec() });
    }
    Ok(StateVector { j, amplitudes: coeffs.iter().map(|c| c / norm).collect() })
}

/// Convex combination `Σ wᵢρᵢ / Σ wᵢ`.
pub fn make_mixture<I, C>(components: I) -> Result<DensityMatrix>
where
    I: IntoIterator<Item = (f64, C)>,
    C: Into<DensityMatrix>,
{
    let mut acc: Option<(HalfInteger, ComplexMatrix)> = None;
    let mut total = 0.0;
    for (w, comp) in components {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::domain(format!("mixture weight {w} must be finite and nonnegative")));
        }
        let rho: DensityMatrix = comp.into();
        match &mut acc {
            None => acc = Some((rho.j, rho.matrix.scale(w))),
            Some((j, m)) => {
                if *j != rho.j {
                    return Err(Error::domain(format!("mixture mixes j = {j} and j = {}", rho.j)));
                }
                *m += rho.matrix.scale(w);
            }
        }
        total += w;
    }
    let (j, m) = acc.ok_or_else(|| Error::domain("mixture has no components"))?;
    if total <= 0.0 {
        return Err(Error::domain("mixture weights are all zero"));
    }
    let m = linalg::hermitian_part(&m.unscale(total));
    DensityMatrix::new(j, m)
}

/// Random test states.
pub mod random {
    use super::*;

    fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }

    /// Haar-random pure state.
    pub fn pure<R: Rng + ?Sized>(j: HalfInteger, rng: &mut R) -> StateVector {
        let coeffs: Vec<Complex64> = (0..j.dim()).map(|_| gaussian_complex(rng)).collect();
        make_superposition(j, &coeffs).expect("gaussian vector is nonzero")
    }

    /// Ginibre-ensemble mixed state of the given rank (clamped to `2j+1`).
    pub fn mixed<R: Rng + ?Sized>(j: HalfInteger, rank: usize, rng: &mut R) -> DensityMatrix {
        let n = j.dim();
        let k = rank.clamp(1, n);
        let g = ComplexMatrix::from_fn(n, k, |_, _| gaussian_complex(rng));
        let m = &g * g.adjoint();
        let tr = linalg::trace(&m).re;
        let m = linalg::hermitian_part(&m.unscale(tr));
        DensityMatrix::from_trusted(j, m)
    }

    /// Random point, uniform on the sphere.
    pub fn sphere_point<R: Rng + ?Sized>(rng: &mut R) -> SpherePoint {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        SpherePoint::canonical(z.acos(), phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::su2::rotation_operator;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn h(t: i32) -> HalfInteger {
        HalfInteger::from_twice(t)
    }

    #[test]
    fn dicke_basis_vectors() {
        let s = make_dicke(h(2), h(2)).unwrap();
        assert_eq!(s.amplitudes(), &[1.0.into(), 0.0.into(), 0.0.into()]);
        let s = make_dicke(h(1), h(-1)).unwrap();
        assert_eq!(s.amplitudes(), &[0.0.into(), 1.0.into()]);
        assert!(make_dicke(h(2), h(4)).is_err());
        assert!(make_dicke(h(2), h(1)).is_err());
    }

    #[test]
    fn coherent_at_poles() {
        for tj in 0..=8 {
            let j = h(tj);
            let north = make_coherent(j, SpherePoint::NORTH).unwrap();
            assert!((north.inner(&make_dicke(j, j).unwrap()).norm() - 1.0).abs() < 1e-15);
            let south = make_coherent(j, SpherePoint::new(PI, 0.0).unwrap()).unwrap();
            assert!((south.inner(&make_dicke(j, -j).unwrap()).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn coherent_overlap_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for tj in 0..=10 {
            let j = h(tj);
            for _ in 0..20 {
                let a = random::sphere_point(&mut rng);
                let b = random::sphere_point(&mut rng);
                let brute = make_coherent(j, a).unwrap().inner(&make_coherent(j, b).unwrap()).norm_sqr();
                let closed = ((1.0 + a.dot(b)) / 2.0).powi(tj);
                assert!((brute - closed).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn coherent_is_rotated_highest_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for tj in 0..=10 {
            let j = h(tj);
            let top = make_dicke(j, j).unwrap();
            for _ in 0..10 {
                let n = random::sphere_point(&mut rng);
                let via_g = top.apply(&rotation_operator(j, n));
                let direct = make_coherent(j, n).unwrap();
                for (x, y) in via_g.amplitudes().iter().zip(direct.amplitudes()) {
                    assert!((x - y).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn superposition_normalizes() {
        let s = make_superposition(h(1), &[1.0.into(), 1.0.into()]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0].re - r).abs() < 1e-15 && (s.amplitudes()[1].re - r).abs() < 1e-15);
        let again = make_superposition(h(1), s.amplitudes()).unwrap();
        assert_eq!(again, s);
        assert!(make_superposition(h(1), &[0.0.into(), 0.0.into()]).is_err());
        assert!(make_superposition(h(2), &[1.0.into()]).is_err());
    }

    #[test]
    fn mixtures() {
        let j = h(3);
        let all: Vec<(f64, StateVector)> = j.projections().map(|mu| (1.0, make_dicke(j, mu).unwrap())).collect();
        let rho = make_mixture(all).unwrap();
        assert!(max_abs_diff(rho.matrix(), DensityMatrix::maximally_mixed(j).matrix()) < 1e-15);

        let psi = make_coherent(j, SpherePoint::new(1.0, 2.0).unwrap()).unwrap();
        let single = make_mixture([(0.3, &psi)]).unwrap();
        assert!(max_abs_diff(single.matrix(), &psi.projector()) < 1e-15);

        let mixed_j = make_mixture([(1.0, make_dicke(h(1), h(1)).unwrap()), (1.0, make_dicke(h(2), h(2)).unwrap())]);
        assert!(mixed_j.is_err());
        assert!(make_mixture([(0.0, psi.clone())]).is_err());
        assert!(make_mixture([(-1.0, psi)]).is_err());
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let j = h(1);
        let bad_trace = ComplexMatrix::identity(2, 2);
        assert!(DensityMatrix::new(j, bad_trace).is_err());
        let non_psd = ComplexMatrix::from_row_slice(2, 2, &[1.5.into(), 0.0.into(), 0.0.into(), (-0.5).into()]);
        assert!(DensityMatrix::new(j, non_psd).is_err());
        let non_herm = ComplexMatrix::from_row_slice(2, 2, &[0.5.into(), 0.1.into(), 0.0.into(), 0.5.into()]);
        assert!(DensityMatrix::new(j, non_herm).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random::mixed(h(3), 2, &mut rng);
        let text = serde_json::to_string(&rho.to_json()).unwrap();
        assert!(text.contains("\"two_j\":3") && text.contains("\"re\"") && text.contains("\"im\""));
        let back = DensityMatrix::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for tj in 0..=10 {
            let rho = random::mixed(h(tj), 3, &mut rng);
            assert!(DensityMatrix::new(rho.j(), rho.matrix().clone()).is_ok());
        }
    }
}
