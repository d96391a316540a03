use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::checked_denominators;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::halfint::HalfInteger;
use crate::linalg::{self, ComplexMatrix};
use crate::measure::ProbabilityGrid;
use crate::states::{DensityMatrix, Operator};
use crate::su2::tensor::lm_index;
use crate::su2::{SphericalHarmonics, TensorBasis};

/// Readout coefficients `|⟨j,μ;l,0|j,μ⟩|` below this are treated as zero.
pub const DENOMINATOR_TOLERANCE: f64 = 1e-12;

/// Multipole expansion `ρ = Σ R_lm D_lm`, `0 ≤ l ≤ 2j`, `|m| ≤ l`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipoleCoefficients {
    j: HalfInteger,
    values: Vec<Complex64>,
}

impl MultipoleCoefficients {
    pub fn new(j: HalfInteger, values: Vec<Complex64>) -> Result<Self> {
        j.check_label()?;
        let n = j.dim() * j.dim();
        if values.len() != n {
            return Err(Error::domain(format!("j = {j} needs {n} multipole coefficients, got {}", values.len())));
        }
        Ok(MultipoleCoefficients { j, values })
    }

    pub fn zeros(j: HalfInteger) -> Result<Self> {
        Self::new(j, vec![Complex64::new(0.0, 0.0); j.dim() * j.dim()])
    }

    pub fn j(&self) -> HalfInteger {
        self.j
    }

    pub fn max_l(&self) -> u32 {
        self.j.twice() as u32
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, l: u32, m: i32) -> Complex64 {
        assert!(l <= self.max_l() && m.unsigned_abs() <= l, "(l, m) = ({l}, {m}) out of range");
        self.values[lm_index(l, m)]
    }

    pub fn set(&mut self, l: u32, m: i32, value: Complex64) {
        assert!(l <= self.max_l() && m.unsigned_abs() <= l, "(l, m) = ({l}, {m}) out of range");
        self.values[lm_index(l, m)] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, i32, Complex64)> + '_ {
        (0..=self.max_l())
            .flat_map(|l| (-(l as i32)..=(l as i32)).map(move |m| (l, m)))
            .zip(self.values.iter())
            .map(|((l, m), v)| (l, m, *v))
    }

    /// Largest violation of `R_{l,-m} = (-1)^m R*_{lm}`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.iter()
            .filter(|&(_, m, _)| m > 0)
            .map(|(l, m, v)| {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                (self.get(l, -m) - v.conj() * sign).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> MultipoleJson {
        MultipoleJson {
            two_j: self.j.twice(),
            coeffs: self.iter().map(|(l, m, v)| CoefficientJson { l, m, re: v.re, im: v.im }).collect(),
        }
    }

    /// Coefficients missing from the document are zero; duplicates and
    /// out-of-range `(l, m)` are rejected.
    pub fn from_json(doc: &MultipoleJson) -> Result<Self> {
        let j = HalfInteger::from_twice(doc.two_j).check_label()?;
        let mut out = Self::zeros(j)?;
        let mut seen = vec![false; out.values.len()];
        for c in &doc.coeffs {
            if c.l > out.max_l() || c.m.unsigned_abs() > c.l {
                return Err(Error::domain(format!("coefficient (l, m) = ({}, {}) out of range for j = {j}", c.l, c.m)));
            }
            let k = lm_index(c.l, c.m);
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::domain(format!("duplicate coefficient (l, m) = ({}, {})", c.l, c.m)));
            }
            out.values[k] = Complex64::new(c.re, c.im);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultipoleJson {
    pub two_j: i32,
    pub coeffs: Vec<CoefficientJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientJson {
    pub l: u32,
    pub m: i32,
    pub re: f64,
    pub im: f64,
}

/// Matrix assembled from multipole coefficients. Not yet checked to be a
/// state: finite-shot data can give small negative eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructedDensity {
    j: HalfInteger,
    matrix: ComplexMatrix,
}

impl ReconstructedDensity {
    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&linalg::hermitian_part(&self.matrix))
    }

    /// Strict validation as a [`DensityMatrix`].
    pub fn validate(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.j, self.matrix.clone())
    }

    /// Nearest-state post-processing: Hermitian part, negative eigenvalues
    /// clipped to zero, trace renormalized to one.
    pub fn project_to_state(&self) -> Result<DensityMatrix> {
        let (values, vectors) = linalg::hermitian_eigen(&linalg::hermitian_part(&self.matrix));
        let clipped: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::domain("estimate has no positive spectral weight to project"));
        }
        let diag = DVector::from_iterator(clipped.len(), clipped.iter().map(|v| Complex64::new(v / total, 0.0)));
        let m = &vectors * ComplexMatrix::from_diagonal(&diag) * vectors.adjoint();
        Ok(DensityMatrix::from_trusted(self.j, linalg::hermitian_part(&m)))
    }
}

impl Operator for ReconstructedDensity {
    fn j(&self) -> HalfInteger {
        self.j
    }
    fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// `R_lm = Tr(ρ D†_lm)`.
pub fn multipoles_from_density<O: Operator + ?Sized>(rho: &O) -> MultipoleCoefficients {
    let j = rho.j();
    let basis = TensorBasis::new(j).expect("operator carries a valid label");
    let m = rho.matrix();
    let values = basis.iter().map(|(_, _, d)| m.iter().zip(d.iter()).map(|(a, b)| a * b.conj()).sum()).collect();
    MultipoleCoefficients { j, values }
}

/// `Σ R_lm D_lm`.
pub fn density_from_multipoles(r: &MultipoleCoefficients) -> ReconstructedDensity {
    let basis = TensorBasis::new(r.j).expect("coefficients carry a valid label");
    let n = r.j.dim();
    let mut matrix = ComplexMatrix::zeros(n, n);
    for ((_, _, d), v) in basis.iter().zip(&r.values) {
        if *v != Complex64::new(0.0, 0.0) {
            matrix += d * *v;
        }
    }
    ReconstructedDensity { j: r.j, matrix }
}

pub fn multipoles_from_probabilities(p: &ProbabilityGrid) -> Result<MultipoleCoefficients> {
    multipoles_from_probabilities_with(p, Execution::default())
}

/// Quadrature inversion
/// `R_lm = sqrt((2j+1)/4π) / ⟨j,μ;l,0|j,μ⟩ · Σ_i w_i p(n_i) Y*_lm(n_i)`.
///
/// Requires a grid exact through degree `4j`.
pub fn multipoles_from_probabilities_with(p: &ProbabilityGrid, exec: Execution) -> Result<MultipoleCoefficients> {
    let j = p.j();
    let denominators = checked_denominators(j, p.mu())?;
    p.grid().require_degree(2 * j.twice() as u32)?;
    let lmax = j.twice() as u32;
    let grid = p.grid();
    let harmonics = exec.map_slice(grid.points(), |n| SphericalHarmonics::new(lmax, *n));
    let prefactor = (j.dim() as f64 / (4.0 * PI)).sqrt();
    let lms: Vec<(u32, i32)> = (0..=lmax).flat_map(|l| (-(l as i32)..=(l as i32)).map(move |m| (l, m))).collect();
    let values = exec.map_slice(&lms, |&(l, m)| {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((y, w), v) in harmonics.iter().zip(grid.weights()).zip(p.values()) {
            acc += y.get(l, m).conj() * (w * v);
        }
        acc * (prefactor / denominators[l as usize])
    });
    Ok(MultipoleCoefficients { j, values })
}

/// Probabilities to density estimate in one step.
pub fn reconstruct_density(p: &ProbabilityGrid) -> Result<ReconstructedDensity> {
    Ok(density_from_multipoles(&multipoles_from_probabilities(p)?))
}
