//! Representation-theory special functions for SU(2).
//!
//! Conventions: basis order `μ = j, j-1, …, -j`; Condon-Shortley phases for
//! Clebsch-Gordan coefficients and spherical harmonics;
//! `d^j_{m'm}(β) = ⟨j,m'| exp(-iβJ_y) |j,m⟩`; the displacement is
//! `g(n) = exp(-iφJ_z) exp(-iθJ_y)`.

mod clebsch;
mod factorial;
mod generators;
mod harmonics;
pub(crate) mod tensor;
mod wigner;

pub use clebsch::clebsch_gordan;
pub use factorial::{ln_binomial, ln_factorial, MAX_FACTORIAL};
pub use generators::{j_minus, j_plus, jx, jy, jz};
pub use harmonics::{legendre_p, legendre_series, spherical_harmonic, SphericalHarmonics};
pub use tensor::{tensor_operator, TensorBasis};
pub use wigner::{
    euler_rotation, rotation_operator, rotation_operator_angles, wigner_d, wigner_d_element,
};
