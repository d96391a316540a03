//! Physical control parameters of spectroscopy, interferometry and
//! trapped-ion experiments mapped onto the displacement `g†(n)`, plus the
//! two-mode block bookkeeping and the Jaynes-Cummings population readout.

mod fock;
mod interferometer;
mod ion;
mod jc;
mod ramsey;
mod two_mode;
mod uncertainty;

pub use fock::{fock_mode_unitary, fock_to_su2, su2_to_fock};
pub use interferometer::InterferometerParams;
pub use ion::{IonParams, LAMB_DICKE_WARNING};
pub use jc::{jc_invert, jc_invert_with, jc_sample, jc_signal, JcFit, JcReadoutParams, JcSolver, MAX_CONDITION};
pub use ramsey::{ramsey_unitary, RamseyParams};
pub use two_mode::{
    blockwise_reconstruct, blockwise_reconstruct_with, decompose_two_mode, simulate_blocks, simulate_blocks_with,
    BlockData, BlockMetrics, BlockOutcome, BlockReport, TwoModeBlock, TwoModeState,
};
pub use uncertainty::{phase_uncertainty, phase_uncertainty_moments, PhaseMoments};

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::linalg::ComplexMatrix;
use crate::measure::SphereGrid;
use crate::sphere::SpherePoint;
use crate::su2::rotation_operator_angles;

/// An apparatus whose settings implement a displacement `g†(n)`.
pub trait Frontend {
    /// Spherical angles `(θ, φ)` as read off the settings, before
    /// canonicalization; `θ` may be negative.
    fn raw_angles(&self) -> Result<(f64, f64)>;

    /// Canonical point with `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    fn displacement(&self) -> Result<SpherePoint> {
        let (theta, phi) = self.raw_angles()?;
        Ok(SpherePoint::canonical(theta, phi))
    }

    /// Unitary the apparatus applies to a state on `H_j`, built from the
    /// physical model with the global phase removed.
    fn physical_unitary(&self, j: HalfInteger) -> Result<ComplexMatrix>;

    /// Settings of the same apparatus that realize the point `n`, keeping
    /// the fixed parameters (rates, couplings) of `self`.
    fn controls_for(&self, n: SpherePoint) -> Result<Self>
    where
        Self: Sized;

    /// Names and values of the scanned settings, for control tables.
    fn control_columns(&self) -> Vec<(&'static str, f64)>;
}

/// `g†` for raw angles, `exp(iθJ_y) exp(iφJ_z)`.
pub fn g_dagger(j: HalfInteger, theta: f64, phi: f64) -> ComplexMatrix {
    rotation_operator_angles(j, theta, phi).adjoint()
}

/// How far `v` is from `D·g†(n)` for some diagonal unitary `D`.
///
/// Displacements differing by a left diagonal phase give the same displaced
/// projector populations, so this is the equivalence relevant to the
/// measured probabilities.
pub fn displacement_defect(v: &ComplexMatrix, n: SpherePoint) -> f64 {
    let j = HalfInteger::from_twice(v.nrows() as i32 - 1);
    let m = v * rotation_operator_angles(j, n.theta(), n.phi());
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)].norm();
            worst = worst.max(if r == c { (z - 1.0).abs() } else { z });
        }
    }
    worst
}

/// Control settings for every point of `grid`, in grid order.
pub fn control_schedule<F: Frontend>(frontend: &F, grid: &SphereGrid) -> Result<Vec<F>> {
    grid.points().iter().map(|n| frontend.controls_for(*n)).collect()
}

/// Raw angle pair `(-θ, φ + π)` realizing the canonical point `n`, i.e. the
/// `(ϑ₂, ϕ)` a y-rotation-then-phase apparatus must produce with
/// `ϑ₂ = θ ≥ 0` and `ϕ = -(φ + π)`.
pub(crate) fn mirrored_settings(n: SpherePoint) -> (f64, f64) {
    (n.theta(), (-(n.phi() + std::f64::consts::PI)).rem_euclid(TAU))
}

/// Smallest nonnegative duration `t` with `rate·t ≡ angle (mod 2π)`.
pub(crate) fn duration_for(angle: f64, rate: f64, what: &str) -> Result<f64> {
    let a = angle.rem_euclid(TAU);
    let a = if a >= TAU { 0.0 } else { a };
    if a == 0.0 {
        return Ok(0.0);
    }
    if rate == 0.0 || !rate.is_finite() {
        return Err(Error::domain(format!("{what} rate is zero, cannot realize angle {angle}")));
    }
    Ok(if rate > 0.0 { a / rate } else { (TAU - a).rem_euclid(TAU) / -rate })
}

pub(crate) fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {v} must be finite")))
    }
}

pub(crate) fn check_nonnegative(name: &str, v: f64) -> Result<()> {
    check_finite(name, v)?;
    if v < 0.0 {
        return Err(Error::domain(format!("{name} = {v} must be nonnegative")));
    }
    Ok(())
}
