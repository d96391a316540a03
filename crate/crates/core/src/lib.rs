//! Reconstruction of spin-j quantum states from rotated-projector measurements.
//!
//! A state on the irreducible space `H_j` is rotated over the unit sphere,
//! the population of one `|j,μ⟩` level is recorded at every rotation, and the
//! resulting phase-space function is inverted for the multipole expansion of
//! the density matrix. The same data yield the s-parametrized family of
//! quasiprobability distributions (Husimi, Wigner, Glauber-Sudarshan).
//!
//! Modules are layered bottom-up:
//!
//! * [`su2`] – Clebsch-Gordan coefficients, Wigner d-matrices, rotation and
//!   tensor operators, spherical harmonics.
//! * [`states`] – state vectors and density matrices on `H_j`.
//! * [`measure`] – sphere quadrature grids, displaced-projector probabilities
//!   and finite-shot sampling.
//! * [`reconstruct`] – multipole inversion, quasiprobability distributions and
//!   error metrics.
//! * [`frontends`] – Ramsey, Mach-Zehnder and trapped-ion control parameters,
//!   two-mode block bookkeeping, Jaynes-Cummings readout.
//! * [`sweep`] – shot-noise scaling studies.
//!
//! Data-parallel loops go through [`exec::Execution`]; with the `parallel`
//! feature disabled every path runs sequentially and produces bitwise
//! identical results.

pub mod error;
pub mod exec;
pub mod frontends;
pub mod halfint;
pub mod linalg;
pub mod measure;
pub mod reconstruct;
pub mod rng;
pub mod sphere;
pub mod states;
pub mod su2;
pub mod sweep;

pub use error::{Error, Result};
pub use exec::Execution;
pub use halfint::HalfInteger;
pub use linalg::ComplexMatrix;
pub use sphere::SpherePoint;

pub use num_complex::Complex64;
