use serde::{Deserialize, Serialize};

use super::{check_finite, check_nonnegative, duration_for, mirrored_settings, Frontend};
use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::linalg::{unitary_from_hamiltonian, ComplexMatrix};
use crate::sphere::SpherePoint;
use crate::su2::{jy, jz};

/// Ramsey sequence: optional first pulse, free precession for `t_free` at
/// detuning `omega0 - omega`, second pulse of Rabi frequency `omega2` for
/// `t_theta`. Frequencies in rad/s, times in s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamseyParams {
    pub omega0: f64,
    pub omega: f64,
    #[serde(rename = "T")]
    pub t_free: f64,
    pub omega2: f64,
    pub t_theta: f64,
    #[serde(default)]
    pub first_pulse_on: bool,
}

impl RamseyParams {
    pub fn validate(&self) -> Result<()> {
        check_finite("omega0", self.omega0)?;
        check_finite("omega", self.omega)?;
        check_finite("omega2", self.omega2)?;
        check_nonnegative("T", self.t_free)?;
        check_nonnegative("t_theta", self.t_theta)?;
        if self.first_pulse_on {
            return Err(Error::Protocol(
                "state reconstruction needs the first Ramsey pulse switched off (first_pulse_on = false)".into(),
            ));
        }
        Ok(())
    }

    /// Second-pulse area `ϑ₂ = ω₂ t_ϑ`.
    pub fn pulse_area(&self) -> f64 {
        self.omega2 * self.t_theta
    }

    /// Accumulated precession phase `ϕ = (ω₀ - ω) T`.
    pub fn precession_phase(&self) -> f64 {
        (self.omega0 - self.omega) * self.t_free
    }
}

/// `U = exp(iϑ₁J_y) exp(iϕJ_z) exp(iϑ₂J_y)`; the state evolves as
/// `ρ → U† ρ U`.
pub fn ramsey_unitary(j: HalfInteger, theta1: f64, phi: f64, theta2: f64) -> Result<ComplexMatrix> {
    j.check_label()?;
    let y = jy(j);
    Ok(unitary_from_hamiltonian(&y, -theta1) * unitary_from_hamiltonian(&jz(j), -phi) * unitary_from_hamiltonian(&y, -theta2))
}

impl Frontend for RamseyParams {
    fn raw_angles(&self) -> Result<(f64, f64)> {
        self.validate()?;
        Ok((-self.pulse_area(), -self.precession_phase()))
    }

    fn physical_unitary(&self, j: HalfInteger) -> Result<ComplexMatrix> {
        self.validate()?;
        Ok(ramsey_unitary(j, 0.0, self.precession_phase(), self.pulse_area())?.adjoint())
    }

    fn controls_for(&self, n: SpherePoint) -> Result<Self> {
        let (area, phase) = mirrored_settings(n);
        Ok(RamseyParams {
            t_theta: duration_for(area, self.omega2, "second-pulse Rabi")?,
            t_free: duration_for(phase, self.omega0 - self.omega, "detuning")?,
            first_pulse_on: false,
            ..self.clone()
        })
    }

    fn control_columns(&self) -> Vec<(&'static str, f64)> {
        vec![("t_theta", self.t_theta), ("T", self.t_free)]
    }
}
