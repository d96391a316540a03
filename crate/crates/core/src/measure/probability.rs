use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::halfint::HalfInteger;
use crate::linalg::ComplexMatrix;
use crate::measure::grid::SphereGrid;
use crate::sphere::SpherePoint;
use crate::states::{DensityMatrix, Operator};
use crate::su2::rotation_operator;

const RANGE_SLACK: f64 = 1e-12;

/// Phase-space displacement `ρ(n) = g⁻¹(n) ρ g(n)`.
pub fn displace(rho: &DensityMatrix, n: SpherePoint) -> DensityMatrix {
    let g = rotation_operator(rho.j(), n);
    DensityMatrix::from_trusted(rho.j(), g.adjoint() * rho.matrix() * g)
}

/// Displaced projector `Γ_μ(n) = g(n) |j,μ⟩⟨j,μ| g⁻¹(n)`.
pub fn displaced_projector(j: HalfInteger, n: SpherePoint, mu: HalfInteger) -> Result<ComplexMatrix> {
    j.check_projection(mu)?;
    let g = rotation_operator(j, n);
    let col = g.column(j.index_of(mu)).into_owned();
    Ok(&col * col.adjoint())
}

/// `p_μ(n) = ⟨j,μ| ρ(n) |j,μ⟩` for every `μ` in basis order.
pub fn displaced_probabilities(rho: &DensityMatrix, n: SpherePoint) -> Vec<f64> {
    let g = rotation_operator(rho.j(), n);
    let rg = rho.matrix() * &g;
    (0..rho.dim())
        .map(|mu| {
            let p: f64 = g.column(mu).iter().zip(rg.column(mu).iter()).map(|(a, b)| (a.conj() * b).re).sum();
            p.clamp(0.0, 1.0)
        })
        .collect()
}

/// Same quantity through `Tr[ρ Γ_μ(n)]`; kept as an independent route for
/// cross-checks.
pub fn displaced_probabilities_via_projectors(rho: &DensityMatrix, n: SpherePoint) -> Vec<f64> {
    let j = rho.j();
    j.projections()
        .map(|mu| {
            let gamma = displaced_projector(j, n, mu).expect("valid projection");
            crate::linalg::trace(&(rho.matrix() * gamma)).re
        })
        .collect()
}

/// Exact `p_μ(n_i)` for every grid point (outer) and outcome (inner).
pub fn exact_probability_table(rho: &DensityMatrix, grid: &SphereGrid) -> Vec<Vec<f64>> {
    exact_probability_table_with(rho, grid, Execution::default())
}

pub fn exact_probability_table_with(rho: &DensityMatrix, grid: &SphereGrid, exec: Execution) -> Vec<Vec<f64>> {
    exec.map_slice(grid.points(), |n| displaced_probabilities(rho, *n))
}

pub fn exact_probability_grid(rho: &DensityMatrix, grid: &SphereGrid, mu: HalfInteger) -> Result<ProbabilityGrid> {
    exact_probability_grid_with(rho, grid, mu, Execution::default())
}

pub fn exact_probability_grid_with(
    rho: &DensityMatrix,
    grid: &SphereGrid,
    mu: HalfInteger,
    exec: Execution,
) -> Result<ProbabilityGrid> {
    let j = rho.j();
    j.check_projection(mu)?;
    let k = j.index_of(mu);
    let values = exec.map_slice(grid.points(), |n| displaced_probabilities(rho, *n)[k]);
    ProbabilityGrid::new(grid.clone(), j, mu, values, vec![0; grid.len()])
}

/// Values of `p_μ` on a grid, exact or estimated from shots.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityGrid {
    grid: SphereGrid,
    j: HalfInteger,
    mu: HalfInteger,
    values: Vec<f64>,
    /// Shots behind each value; all zeros for exact data.
    shots: Vec<u64>,
}

impl ProbabilityGrid {
    pub fn new(grid: SphereGrid, j: HalfInteger, mu: HalfInteger, mut values: Vec<f64>, shots: Vec<u64>) -> Result<Self> {
        j.check_projection(mu)?;
        if values.len() != grid.len() || shots.len() != grid.len() {
            return Err(Error::domain(format!(
                "probability grid has {} values and {} shot counts for {} points",
                values.len(),
                shots.len(),
                grid.len()
            )));
        }
        for (i, v) in values.iter_mut().enumerate() {
            if !(v.is_finite() && *v >= -RANGE_SLACK && *v <= 1.0 + RANGE_SLACK) {
                return Err(Error::domain(format!("probability {v} at point {i} outside [0, 1]")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(ProbabilityGrid { grid, j, mu, values, shots })
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn j(&self) -> HalfInteger {
        self.j
    }

    pub fn mu(&self) -> HalfInteger {
        self.mu
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn shots(&self) -> &[u64] {
        &self.shots
    }

    pub fn is_exact(&self) -> bool {
        self.shots.iter().all(|&s| s == 0)
    }

    /// Common shot count when every point used the same number of shots
    /// (`Some(0)` for exact data).
    pub fn shots_per_point(&self) -> Option<u64> {
        let first = *self.shots.first()?;
        self.shots.iter().all(|&s| s == first).then_some(first)
    }
}
