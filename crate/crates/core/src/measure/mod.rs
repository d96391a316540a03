//! Phase-space displacement, displaced-projector probabilities and
//! finite-shot measurement simulation.

mod grid;
pub mod io;
mod probability;
mod sampling;

pub use grid::{build_grid, gauss_legendre, ProductLayout, SphereGrid};
pub use probability::{
    displace, displaced_probabilities, displaced_probabilities_via_projectors, displaced_projector,
    exact_probability_grid, exact_probability_grid_with, exact_probability_table,
    exact_probability_table_with, ProbabilityGrid,
};
pub use sampling::{
    record_to_probability_grid, sample_measurements, sample_measurements_with, MeasurementRecord,
};
pub(crate) use sampling::multinomial;
