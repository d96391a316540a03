//! Shot-noise scaling studies: reconstruction error against shots per point.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::halfint::HalfInteger;
use crate::measure::io::{fmt_f64, write_metadata};
use crate::measure::{
    exact_probability_grid_with, record_to_probability_grid, sample_measurements_with, SphereGrid,
};
use crate::reconstruct::{density_from_multipoles, max_abs_diff, multipoles_from_probabilities_with};
use crate::rng::splitmix64;
use crate::states::{DensityMatrix, Operator};

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub state: DensityMatrix,
    pub grid: SphereGrid,
    pub readout: HalfInteger,
    /// Shots per grid point for each sampled level.
    pub shot_levels: Vec<u64>,
    pub seeds: usize,
    pub base_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepLevel {
    pub shots: u64,
    /// `max_abs_diff` per seed, in seed order.
    pub errors: Vec<f64>,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

impl SweepLevel {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub two_j: i32,
    pub two_mu: i32,
    pub grid_points: usize,
    pub seeds: usize,
    pub base_seed: u64,
    /// Error of the exact-probability reconstruction (shots = 0 row).
    pub exact_error: f64,
    pub levels: Vec<SweepLevel>,
    /// Least-squares slope of `log10(median)` against `log10(shots)`.
    pub slope: f64,
    pub intercept: f64,
}

/// Seed used for replicate `k`; the same `k` is used at every level.
pub fn replicate_seed(base_seed: u64, k: usize) -> u64 {
    splitmix64(base_seed ^ (k as u64).wrapping_mul(0xA24B_AED4_963E_E407))
}

/// Quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Ordinary least-squares line `y = a + b x`, returned as `(b, a)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    run_sweep_with(spec, Execution::default())
}

/// Runs every `(level, seed)` replicate, in parallel across replicates.
pub fn run_sweep_with(spec: &SweepSpec, exec: Execution) -> Result<SweepReport> {
    if spec.shot_levels.len() < 2 {
        return Err(Error::domain("a sweep needs at least two shot levels"));
    }
    if spec.shot_levels.contains(&0) {
        return Err(Error::domain("shot levels must be positive; the exact baseline is always included"));
    }
    if spec.seeds == 0 {
        return Err(Error::domain("a sweep needs at least one seed"));
    }
    let j = spec.state.j();
    let reconstruct_error = |pg| -> Result<f64> {
        let est = density_from_multipoles(&multipoles_from_probabilities_with(&pg, Execution::Sequential)?);
        max_abs_diff(&spec.state, &est)
    };
    let exact_error = reconstruct_error(exact_probability_grid_with(&spec.state, &spec.grid, spec.readout, exec)?)?;

    let jobs = spec.shot_levels.len() * spec.seeds;
    let errors = exec.try_map_indexed(jobs, |idx| -> Result<f64> {
        let (level, k) = (idx / spec.seeds, idx % spec.seeds);
        let seed = replicate_seed(spec.base_seed, k);
        let rec = sample_measurements_with(&spec.state, &spec.grid, spec.shot_levels[level], seed, Execution::Sequential)?;
        reconstruct_error(record_to_probability_grid(&rec, spec.readout)?)
    })?;

    let levels: Vec<SweepLevel> = spec
        .shot_levels
        .iter()
        .enumerate()
        .map(|(level, &shots)| {
            let errs = errors[level * spec.seeds..(level + 1) * spec.seeds].to_vec();
            let mut sorted = errs.clone();
            sorted.sort_by(f64::total_cmp);
            SweepLevel {
                shots,
                median: quantile(&sorted, 0.5),
                q1: quantile(&sorted, 0.25),
                q3: quantile(&sorted, 0.75),
                errors: errs,
            }
        })
        .collect();
    let xs: Vec<f64> = levels.iter().map(|l| (l.shots as f64).log10()).collect();
    let ys: Vec<f64> = levels.iter().map(|l| l.median.log10()).collect();
    let (slope, intercept) = fit_line(&xs, &ys);
    Ok(SweepReport {
        two_j: j.twice(),
        two_mu: spec.readout.twice(),
        grid_points: spec.grid.len(),
        seeds: spec.seeds,
        base_seed: spec.base_seed,
        exact_error,
        levels,
        slope,
        intercept,
    })
}

/// CSV `shots,median,q1,q3,iqr` with the exact baseline as the `shots = 0`
/// row.
pub fn write_sweep_csv<W: Write>(report: &SweepReport, mut w: W) -> Result<()> {
    write_metadata(
        &mut w,
        &[("two_j", report.two_j.to_string()), ("seeds", report.seeds.to_string()), ("slope", fmt_f64(report.slope))],
    )?;
    let mut out = csv::Writer::from_writer(&mut w);
    out.write_record(["shots", "median", "q1", "q3", "iqr"])?;
    let e = fmt_f64(report.exact_error);
    out.write_record(["0", &e, &e, &e, &fmt_f64(0.0)])?;
    for l in &report.levels {
        out.write_record([l.shots.to_string(), fmt_f64(l.median), fmt_f64(l.q1), fmt_f64(l.q3), fmt_f64(l.iqr())])?;
    }
    out.flush()?;
    Ok(())
}
