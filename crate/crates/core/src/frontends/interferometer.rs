use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fock::{check_photon_label, fock_mode_unitary};
use super::{check_finite, mirrored_settings, Frontend};
use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::linalg::ComplexMatrix;
use crate::sphere::SpherePoint;

/// Mach-Zehnder settings: splitter transmittances `T = cos²(ϑ/2)` and arm
/// phases `φ₁`, `φ₂` in radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterferometerParams {
    pub transmittance1: f64,
    pub transmittance2: f64,
    pub phase1: f64,
    pub phase2: f64,
    #[serde(default)]
    pub first_splitter_present: bool,
}

fn splitter(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [[Complex64::new(c, 0.0), Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), Complex64::new(c, 0.0)]]
}

fn matmul(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

impl InterferometerParams {
    pub fn validate(&self) -> Result<()> {
        for (name, t) in [("transmittance1", self.transmittance1), ("transmittance2", self.transmittance2)] {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::domain(format!("{name} = {t} must lie in [0, 1]")));
            }
        }
        check_finite("phase1", self.phase1)?;
        check_finite("phase2", self.phase2)?;
        if self.first_splitter_present {
            return Err(Error::Protocol(
                "state reconstruction needs the interferometer without its first beam splitter".into(),
            ));
        }
        Ok(())
    }

    /// `ϑ₂ = 2 arccos(√T₂) ∈ [0, π]`.
    pub fn splitter_angle(&self) -> f64 {
        2.0 * self.transmittance2.sqrt().acos()
    }

    /// `ϕ = φ₂ - φ₁`.
    pub fn phase_difference(&self) -> f64 {
        self.phase2 - self.phase1
    }

    /// Heisenberg-picture mode matrix `B(ϑ₂) P` of the phase shifters
    /// followed by the second splitter.
    pub fn mode_matrix(&self) -> [[Complex64; 2]; 2] {
        let zero = Complex64::new(0.0, 0.0);
        let p = [[Complex64::from_polar(1.0, self.phase1), zero], [zero, Complex64::from_polar(1.0, self.phase2)]];
        matmul(splitter(self.splitter_angle()), p)
    }
}

impl Frontend for InterferometerParams {
    fn raw_angles(&self) -> Result<(f64, f64)> {
        self.validate()?;
        Ok((-self.splitter_angle(), -self.phase_difference()))
    }

    fn physical_unitary(&self, j: HalfInteger) -> Result<ComplexMatrix> {
        self.validate()?;
        check_photon_label(j)?;
        let u = fock_mode_unitary(j, self.mode_matrix())?;
        let global = Complex64::from_polar(1.0, -(self.phase1 + self.phase2) * j.value());
        Ok(u * global)
    }

    fn controls_for(&self, n: SpherePoint) -> Result<Self> {
        let (theta2, phase) = mirrored_settings(n);
        Ok(InterferometerParams {
            transmittance2: (theta2 / 2.0).cos().powi(2),
            phase1: 0.0,
            phase2: phase,
            first_splitter_present: false,
            ..self.clone()
        })
    }

    fn control_columns(&self) -> Vec<(&'static str, f64)> {
        vec![("transmittance2", self.transmittance2), ("phase1", self.phase1), ("phase2", self.phase2)]
    }
}
