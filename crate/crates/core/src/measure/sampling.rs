use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::halfint::HalfInteger;
use crate::measure::grid::SphereGrid;
use crate::measure::probability::{displaced_probabilities, ProbabilityGrid};
use crate::rng;
use crate::states::{DensityMatrix, Operator};

/// Raw simulated counts: for every grid point, how many of `shots[i]`
/// repetitions ended in each `|j,μ⟩` (basis order).
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    grid: SphereGrid,
    j: HalfInteger,
    counts: Vec<Vec<u64>>,
    shots: Vec<u64>,
    seed: u64,
}

impl MeasurementRecord {
    pub fn new(grid: SphereGrid, j: HalfInteger, counts: Vec<Vec<u64>>, seed: u64) -> Result<Self> {
        j.check_label()?;
        if counts.len() != grid.len() {
            return Err(Error::domain(format!("{} count rows for {} grid points", counts.len(), grid.len())));
        }
        if let Some(row) = counts.iter().find(|r| r.len() != j.dim()) {
            return Err(Error::domain(format!("count row has {} outcomes, expected {}", row.len(), j.dim())));
        }
        let shots = counts.iter().map(|r| r.iter().sum()).collect();
        Ok(MeasurementRecord { grid, j, counts, shots, seed })
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn j(&self) -> HalfInteger {
        self.j
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn shots(&self) -> &[u64] {
        &self.shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn total_shots(&self) -> u64 {
        self.shots.iter().sum()
    }
}

/// Multinomial draw by sequential conditional binomials, outcomes in the
/// order of `probs`.
pub(crate) fn multinomial<R: Rng + ?Sized>(rng: &mut R, n: u64, probs: &[f64]) -> Vec<u64> {
    let mut out = vec![0; probs.len()];
    let mut remaining = n;
    let mut mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    for (k, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let p = p.max(0.0);
        if k + 1 == probs.len() {
            out[k] = remaining;
            break;
        }
        let cond = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(remaining, cond).expect("probability in [0,1]").sample(rng);
        out[k] = draw;
        remaining -= draw;
        mass -= p;
    }
    out
}

/// Simulates `shots` projective measurements after each displacement.
///
/// Point `i` draws from its own stream keyed by `(seed, 2j, i)`, so the
/// record is independent of evaluation order and thread count.
pub fn sample_measurements(rho: &DensityMatrix, grid: &SphereGrid, shots: u64, seed: u64) -> Result<MeasurementRecord> {
    sample_measurements_with(rho, grid, shots, seed, Execution::default())
}

pub fn sample_measurements_with(
    rho: &DensityMatrix,
    grid: &SphereGrid,
    shots: u64,
    seed: u64,
    exec: Execution,
) -> Result<MeasurementRecord> {
    if shots == 0 {
        return Err(Error::domain("shots must be at least 1"));
    }
    let domain = rng::block_domain(rho.j().twice());
    let counts = exec.map_indexed(grid.len(), |i| {
        let p = displaced_probabilities(rho, grid.points()[i]);
        let mut r = rng::stream(seed, domain, i as u64);
        multinomial(&mut r, shots, &p)
    });
    MeasurementRecord::new(grid.clone(), rho.j(), counts, seed)
}

/// Empirical frequencies of outcome `μ`.
pub fn record_to_probability_grid(rec: &MeasurementRecord, mu: HalfInteger) -> Result<ProbabilityGrid> {
    rec.j.check_projection(mu)?;
    let k = rec.j.index_of(mu);
    let mut values = Vec::with_capacity(rec.grid.len());
    for (i, (row, &s)) in rec.counts.iter().zip(&rec.shots).enumerate() {
        if s == 0 {
            return Err(Error::domain(format!("grid point {i} has no recorded shots")));
        }
        values.push(row[k] as f64 / s as f64);
    }
    ProbabilityGrid::new(rec.grid.clone(), rec.j, mu, values, rec.shots.clone())
}
