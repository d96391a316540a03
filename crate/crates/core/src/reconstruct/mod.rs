//! Inversion of displaced-projector data into multipole coefficients,
//! density matrices and s-parametrized quasiprobability distributions.

mod metrics;
mod multipoles;
mod qpd;

pub use metrics::{fidelity, max_abs_diff, trace_distance};
pub use multipoles::{
    density_from_multipoles, multipoles_from_density, multipoles_from_probabilities,
    multipoles_from_probabilities_with, reconstruct_density, CoefficientJson, MultipoleCoefficients, MultipoleJson,
    ReconstructedDensity, DENOMINATOR_TOLERANCE,
};
pub use qpd::{
    glauber_p_check, q_function, qpd_from_multipoles, qpd_from_multipoles_with, qpd_from_probabilities,
    qpd_from_probabilities_with, read_qpd_csv, write_qpd_csv, QpdGrid, IMAGINARY_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::su2::clebsch_gordan;

/// `⟨j,μ; l,0 | j,μ⟩` for `l = 0..=2j`.
pub(crate) fn readout_denominators(j: HalfInteger, mu: HalfInteger) -> Result<Vec<f64>> {
    j.check_projection(mu)?;
    (0..=j.twice() as u32)
        .map(|l| clebsch_gordan(j, mu, HalfInteger::from_int(l as i32), HalfInteger::ZERO, j, mu))
        .collect()
}

/// Readout denominators, or the vanishing-denominator error listing every
/// offending `l`.
pub(crate) fn checked_denominators(j: HalfInteger, mu: HalfInteger) -> Result<Vec<f64>> {
    let c = readout_denominators(j, mu)?;
    let ls: Vec<u32> =
        c.iter().enumerate().filter(|(_, v)| v.abs() < DENOMINATOR_TOLERANCE).map(|(l, _)| l as u32).collect();
    if ls.is_empty() {
        Ok(c)
    } else {
        Err(Error::VanishingDenominator { two_j: j.twice(), two_mu: mu.twice(), ls })
    }
}

pub(crate) fn check_s(s: f64) -> Result<()> {
    if s == -1.0 || s == 0.0 || s == 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("s = {s} must be one of -1, 0, 1")))
    }
}

/// `⟨j,j; l,0 | j,j⟩^{-s}`, the QPD order weights.
pub(crate) fn order_weights(j: HalfInteger, s: f64) -> Result<Vec<f64>> {
    check_s(s)?;
    Ok(readout_denominators(j, j)?.into_iter().map(|c| c.powf(-s)).collect())
}
