use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fock::check_photon_label;
use super::{check_finite, check_nonnegative, duration_for, Frontend};
use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::linalg::{unitary_from_hamiltonian, ComplexMatrix};
use crate::sphere::SpherePoint;

/// Lamb-Dicke parameters above this trigger a warning.
pub const LAMB_DICKE_WARNING: f64 = 0.3;

const PHASE_TOLERANCE: f64 = 1e-12;

/// Two motional modes of a trapped ion coupled by a Raman beam-splitter
/// interaction. Frequencies in rad/s, times in s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IonParams {
    pub kappa: f64,
    pub eta1: f64,
    pub eta2: f64,
    #[serde(rename = "Omega1")]
    pub omega1: f64,
    #[serde(rename = "Omega2")]
    pub omega2: f64,
    #[serde(rename = "t_theta")]
    pub t_theta: f64,
    #[serde(rename = "T_free")]
    pub t_free: f64,
    #[serde(rename = "Phi", default = "half_pi")]
    pub raman_phase: f64,
}

fn half_pi() -> f64 {
    FRAC_PI_2
}

impl IonParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("kappa", self.kappa),
            ("eta1", self.eta1),
            ("eta2", self.eta2),
            ("Omega1", self.omega1),
            ("Omega2", self.omega2),
            ("Phi", self.raman_phase),
        ];
        for (name, v) in fields {
            check_finite(name, v)?;
        }
        check_nonnegative("t_theta", self.t_theta)?;
        check_nonnegative("T_free", self.t_free)?;
        if self.omega1 == self.omega2 {
            return Err(Error::domain("trap frequencies Omega1 and Omega2 must differ"));
        }
        Ok(())
    }

    fn check_phase(&self) -> Result<()> {
        if (self.raman_phase - FRAC_PI_2).abs() > PHASE_TOLERANCE {
            return Err(Error::Unsupported(format!(
                "Raman phase Phi = {} gives a J_Phi rotation; only Phi = pi/2 (a J_y rotation) is supported",
                self.raman_phase
            )));
        }
        Ok(())
    }

    /// Advisory messages about the validity of the effective model.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, eta) in [("eta1", self.eta1), ("eta2", self.eta2)] {
            if eta.abs() > LAMB_DICKE_WARNING {
                out.push(format!("{name} = {eta} is outside the Lamb-Dicke regime (> {LAMB_DICKE_WARNING})"));
            }
        }
        if (2.0 * self.coupling()).abs() <= 10.0 * (self.omega2 - self.omega1).abs() {
            out.push("beam-splitter coupling 2*kappa*eta1*eta2 is not large compared with |Omega2 - Omega1|".into());
        }
        out
    }

    /// `κ η₁ η₂`.
    pub fn coupling(&self) -> f64 {
        self.kappa * self.eta1 * self.eta2
    }

    /// `θ = 2κη₁η₂ t_θ`.
    pub fn mixing_angle(&self) -> f64 {
        2.0 * self.coupling() * self.t_theta
    }

    /// `φ = (Ω₂ - Ω₁) T`.
    pub fn free_phase(&self) -> f64 {
        (self.omega2 - self.omega1) * self.t_free
    }

    /// Beam-splitter Hamiltonian `-κη₁η₂ (e^{iΦ} a₁a₂† + e^{-iΦ} a₁†a₂)` on
    /// the `N = 2j` block, basis `|N-k⟩₁|k⟩₂` for `k = 0..=N`.
    pub fn beam_splitter_hamiltonian(&self, j: HalfInteger) -> ComplexMatrix {
        let total = j.twice() as usize;
        let mut h = ComplexMatrix::zeros(total + 1, total + 1);
        for k in 0..total {
            let (n1, n2) = ((total - k) as f64, k as f64);
            let amp = -self.coupling() * (n1 * (n2 + 1.0)).sqrt();
            let v = Complex64::from_polar(amp, self.raman_phase);
            h[(k + 1, k)] = v;
            h[(k, k + 1)] = v.conj();
        }
        h
    }

    /// Free Hamiltonian `Ω₁ n₁ + Ω₂ n₂` on the same block.
    pub fn free_hamiltonian(&self, j: HalfInteger) -> ComplexMatrix {
        let total = j.twice() as usize;
        let mut h = ComplexMatrix::zeros(total + 1, total + 1);
        for k in 0..=total {
            h[(k, k)] = Complex64::new(self.omega1 * (total - k) as f64 + self.omega2 * k as f64, 0.0);
        }
        h
    }
}

impl Frontend for IonParams {
    fn raw_angles(&self) -> Result<(f64, f64)> {
        self.validate()?;
        self.check_phase()?;
        Ok((self.mixing_angle(), self.free_phase()))
    }

    /// Free evolution for `T_free`, then the beam-splitter pulse for
    /// `t_theta`; the global phase `exp(-i(Ω₁+Ω₂)N T/2)` is removed.
    fn physical_unitary(&self, j: HalfInteger) -> Result<ComplexMatrix> {
        self.validate()?;
        self.check_phase()?;
        check_photon_label(j)?;
        let free = unitary_from_hamiltonian(&self.free_hamiltonian(j), self.t_free);
        let mix = unitary_from_hamiltonian(&self.beam_splitter_hamiltonian(j), self.t_theta);
        let global = Complex64::from_polar(1.0, (self.omega1 + self.omega2) * j.value() * self.t_free);
        Ok(mix * free * global)
    }

    fn controls_for(&self, n: SpherePoint) -> Result<Self> {
        self.check_phase()?;
        let c = 2.0 * self.coupling();
        if c == 0.0 && n.theta() != 0.0 {
            return Err(Error::domain("beam-splitter coupling is zero, cannot realize theta > 0"));
        }
        let t_theta = if n.theta() == 0.0 { 0.0 } else { n.theta() / c.abs() };
        // A negative coupling realizes (-θ, φ + π), the same point.
        let phi = if c < 0.0 { n.phi() + std::f64::consts::PI } else { n.phi() };
        Ok(IonParams {
            t_theta,
            t_free: duration_for(phi, self.omega2 - self.omega1, "trap detuning")?,
            ..self.clone()
        })
    }

    fn control_columns(&self) -> Vec<(&'static str, f64)> {
        vec![("t_theta", self.t_theta), ("T_free", self.t_free)]
    }
}
