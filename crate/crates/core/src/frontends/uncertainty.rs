use super::ramsey::ramsey_unitary;
use crate::error::{Error, Result};
use crate::linalg::{self, unitary_from_hamiltonian, I};
use crate::states::{DensityMatrix, Operator};
use crate::su2::{jy, jz};

/// Derivatives below this make the error propagation formula meaningless.
const STATIONARY_TOLERANCE: f64 = 1e-12;

/// Output moments of `J_z` after `ρ → U†ρU`,
/// `U = exp(iϑ₁J_y) exp(iφJ_z) exp(iϑ₂J_y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseMoments {
    pub mean: f64,
    pub variance: f64,
    /// `∂⟨J_z,out⟩/∂φ`, from the commutator `i Tr(ρ [K, O])` with
    /// `O = U J_z U†` and `K = A J_z A†`, `A = exp(iϑ₁J_y)`.
    pub derivative: f64,
}

pub fn phase_uncertainty_moments(rho: &DensityMatrix, theta1: f64, theta2: f64, phi: f64) -> PhaseMoments {
    let j = rho.j();
    let z = jz(j);
    let u = ramsey_unitary(j, theta1, phi, theta2).expect("density matrix carries a valid label");
    let a = unitary_from_hamiltonian(&jy(j), -theta1);
    let o = &u * &z * u.adjoint();
    let k = &a * &z * a.adjoint();
    let r = rho.matrix();
    let mean = linalg::trace(&(r * &o)).re;
    let second = linalg::trace(&(r * &o * &o)).re;
    let commutator = &k * &o - &o * &k;
    let derivative = (I * linalg::trace(&(r * commutator))).re;
    PhaseMoments { mean, variance: (second - mean * mean).max(0.0), derivative }
}

/// `Δφ = ΔJ_z,out / |∂⟨J_z,out⟩/∂φ|`.
pub fn phase_uncertainty(rho: &DensityMatrix, theta1: f64, theta2: f64, phi: f64) -> Result<f64> {
    let m = phase_uncertainty_moments(rho, theta1, theta2, phi);
    if m.derivative.abs() <= STATIONARY_TOLERANCE {
        return Err(Error::StationaryPoint { derivative: m.derivative.abs() });
    }
    Ok(m.variance.sqrt() / m.derivative.abs())
}
