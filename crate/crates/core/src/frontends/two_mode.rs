use std::collections::BTreeMap;

use num_complex::Complex64;

use super::fock::fock_to_su2;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::halfint::HalfInteger;
use crate::measure::{
    displaced_probabilities, exact_probability_grid_with, multinomial, record_to_probability_grid,
    MeasurementRecord, ProbabilityGrid, SphereGrid,
};
use crate::reconstruct::{
    density_from_multipoles, fidelity, max_abs_diff, multipoles_from_probabilities_with, trace_distance,
    ReconstructedDensity,
};
use crate::rng;
use crate::states::{DensityMatrix, StateVector, NORM_TOLERANCE};

/// One fixed-photon-number component `ρ_j` with its weight `Tr P_j ρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeBlock {
    pub j: HalfInteger,
    pub weight: f64,
    /// Normalized block state.
    pub state: DensityMatrix,
    /// Normalized block vector when the input was pure.
    pub vector: Option<StateVector>,
}

/// Block-diagonal two-mode state `ρ = ⊕_j w_j ρ_j`, blocks sorted by `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeState {
    blocks: Vec<TwoModeBlock>,
    coherences_discarded: bool,
}

impl TwoModeState {
    /// Weighted blocks on distinct `H_j`; weights must be nonnegative and sum
    /// to one. Zero-weight blocks are dropped.
    pub fn from_blocks(blocks: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        use crate::states::Operator;
        let total: f64 = blocks.iter().map(|(w, _)| *w).sum();
        if let Some((w, _)) = blocks.iter().find(|(w, _)| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::domain(format!("block weight {w} must be nonnegative")));
        }
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::domain(format!("block weights sum to {total}, expected 1")));
        }
        let mut out: Vec<TwoModeBlock> = blocks
            .into_iter()
            .filter(|(w, _)| *w > 0.0)
            .map(|(weight, state)| TwoModeBlock { j: state.j(), weight, state, vector: None })
            .collect();
        out.sort_by_key(|b| b.j);
        if out.windows(2).any(|w| w[0].j == w[1].j) {
            return Err(Error::domain("two blocks share the same j"));
        }
        if out.is_empty() {
            return Err(Error::domain("two-mode state needs at least one block"));
        }
        Ok(TwoModeState { blocks: out, coherences_discarded: false })
    }

    pub fn blocks(&self) -> &[TwoModeBlock] {
        &self.blocks
    }

    pub fn block(&self, j: HalfInteger) -> Option<&TwoModeBlock> {
        self.blocks.iter().find(|b| b.j == j)
    }

    pub fn max_j(&self) -> HalfInteger {
        self.blocks.last().expect("at least one block").j
    }

    /// True when the source had coherences between different photon
    /// numbers. Those relative phases do not survive the block decomposition
    /// and cannot be reconstructed.
    pub fn coherences_discarded(&self) -> bool {
        self.coherences_discarded
    }
}

/// Groups Fock amplitudes `(n₁, n₂) → c` by photon sum `N = 2j`.
pub fn decompose_two_mode(amplitudes: &BTreeMap<(u32, u32), Complex64>) -> Result<TwoModeState> {
    let norm: f64 = amplitudes.values().map(|c| c.norm_sqr()).sum();
    if amplitudes.values().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::domain("two-mode amplitudes must be finite"));
    }
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::domain(format!("two-mode state has squared norm {norm}, expected 1")));
    }
    let mut grouped: BTreeMap<HalfInteger, Vec<Complex64>> = BTreeMap::new();
    for (&(n1, n2), &c) in amplitudes {
        let (j, mu) = fock_to_su2(n1, n2);
        let block = grouped.entry(j).or_insert_with(|| vec![Complex64::new(0.0, 0.0); j.dim()]);
        block[j.index_of(mu)] += c;
    }
    let mut blocks = Vec::new();
    for (j, amps) in grouped {
        let weight: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if weight == 0.0 {
            continue;
        }
        let scale = 1.0 / weight.sqrt();
        let vector = StateVector::new(j, amps.iter().map(|c| c * scale).collect())?;
        blocks.push(TwoModeBlock { j, weight, state: DensityMatrix::pure(&vector), vector: Some(vector) });
    }
    let coherences_discarded = blocks.len() > 1;
    Ok(TwoModeState { blocks, coherences_discarded })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockMetrics {
    /// Against the nearest physical state; zero if none exists.
    pub fidelity: f64,
    pub trace_distance: f64,
    pub max_abs_diff: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BlockOutcome {
    Reconstructed { estimate: ReconstructedDensity, metrics: BlockMetrics },
    /// Some grid point saw no event in this block.
    Unreconstructed { reason: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockReport {
    pub j: HalfInteger,
    pub weight: f64,
    /// Fraction of all shots that landed in this block.
    pub estimated_weight: f64,
    /// Binomial standard error of `estimated_weight`.
    pub weight_sigma: f64,
    /// Shots per grid point that landed in this block.
    pub effective_shots: Vec<u64>,
    pub outcome: BlockOutcome,
}

impl BlockReport {
    pub fn total_effective_shots(&self) -> u64 {
        self.effective_shots.iter().sum()
    }
}

/// Simulated data of one block: per-point shot counts and the readout
/// `μ = j` probability grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockData {
    pub j: HalfInteger,
    pub weight: f64,
    pub estimated_weight: f64,
    pub weight_sigma: f64,
    /// Shots per grid point that landed in this block.
    pub effective_shots: Vec<u64>,
    /// `Err(reason)` when some grid point saw no event in this block.
    pub probabilities: std::result::Result<ProbabilityGrid, String>,
}

pub fn simulate_blocks(state: &TwoModeState, grid: &SphereGrid, shots: u64, seed: u64) -> Result<Vec<BlockData>> {
    simulate_blocks_with(state, grid, shots, seed, Execution::default())
}

/// Simulates joint photon-sum and photon-difference detection after each
/// displacement. `shots = 0` gives exact probabilities.
///
/// Block membership at point `i` is drawn from the stream
/// `(seed, THINNING_DOMAIN, i)` and the in-block outcome from
/// `(seed, 2j, i)`, so a single-block state reproduces
/// [`sample_measurements`](crate::measure::sample_measurements) exactly.
pub fn simulate_blocks_with(
    state: &TwoModeState,
    grid: &SphereGrid,
    shots: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<BlockData>> {
    grid.require_degree(2 * state.max_j().twice() as u32)?;
    let weights: Vec<f64> = state.blocks.iter().map(|b| b.weight).collect();
    let thinned: Vec<Vec<u64>> = if shots == 0 {
        vec![vec![0; weights.len()]; grid.len()]
    } else {
        exec.map_indexed(grid.len(), |i| {
            let mut r = rng::stream(seed, rng::THINNING_DOMAIN, i as u64);
            multinomial(&mut r, shots, &weights)
        })
    };
    let trials = (shots as f64) * grid.len() as f64;
    let data = exec.map_indexed(state.blocks.len(), |b| -> Result<BlockData> {
        let block = &state.blocks[b];
        let j = block.j;
        let effective: Vec<u64> = thinned.iter().map(|row| row[b]).collect();
        let (estimated_weight, weight_sigma) = if shots == 0 {
            (block.weight, 0.0)
        } else {
            let w = effective.iter().sum::<u64>() as f64 / trials;
            (w, (w * (1.0 - w) / trials).sqrt())
        };
        let probabilities = if shots == 0 {
            Ok(exact_probability_grid_with(&block.state, grid, j, exec)?)
        } else if let Some(i) = effective.iter().position(|&n| n == 0) {
            Err(format!("grid point {i} received no counts for j = {j}"))
        } else {
            let domain = rng::block_domain(j.twice());
            let counts = exec.map_indexed(grid.len(), |i| {
                let p = displaced_probabilities(&block.state, grid.points()[i]);
                let mut r = rng::stream(seed, domain, i as u64);
                multinomial(&mut r, effective[i], &p)
            });
            Ok(record_to_probability_grid(&MeasurementRecord::new(grid.clone(), j, counts, seed)?, j)?)
        };
        Ok(BlockData { j, weight: block.weight, estimated_weight, weight_sigma, effective_shots: effective, probabilities })
    });
    data.into_iter().collect()
}

pub fn blockwise_reconstruct(state: &TwoModeState, grid: &SphereGrid, shots: u64, seed: u64) -> Result<Vec<BlockReport>> {
    blockwise_reconstruct_with(state, grid, shots, seed, Execution::default())
}

/// [`simulate_blocks_with`] followed by an independent reconstruction of
/// every block that received data at all grid points.
pub fn blockwise_reconstruct_with(
    state: &TwoModeState,
    grid: &SphereGrid,
    shots: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<BlockReport>> {
    let data = simulate_blocks_with(state, grid, shots, seed, exec)?;
    state
        .blocks
        .iter()
        .zip(data)
        .map(|(block, d)| {
            let outcome = match &d.probabilities {
                Err(reason) => BlockOutcome::Unreconstructed { reason: reason.clone() },
                Ok(pg) => {
                    let estimate = density_from_multipoles(&multipoles_from_probabilities_with(pg, exec)?);
                    let metrics = BlockMetrics {
                        fidelity: match estimate.project_to_state() {
                            Ok(physical) => fidelity(&block.state, &physical)?,
                            Err(_) => 0.0,
                        },
                        trace_distance: trace_distance(&block.state, &estimate)?,
                        max_abs_diff: max_abs_diff(&block.state, &estimate)?,
                    };
                    BlockOutcome::Reconstructed { estimate, metrics }
                }
            };
            Ok(BlockReport {
                j: d.j,
                weight: d.weight,
                estimated_weight: d.estimated_weight,
                weight_sigma: d.weight_sigma,
                effective_shots: d.effective_shots,
                outcome,
            })
        })
        .collect()
}
