use nalgebra::{DMatrix, DVector};
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rng;

/// Design matrices with a larger condition number are rejected.
pub const MAX_CONDITION: f64 = 1e10;

const POPULATION_SLACK: f64 = 1e-12;

/// Jaynes-Cummings readout of one motional mode: the lower internal level
/// population `P₋(t) = ½[1 + Σ_n P_n cos(2Ω_{n,n+1} t) e^{-γ_n t}]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JcReadoutParams {
    /// Base Rabi frequency `Ω₀` (rad/s).
    pub omega0: f64,
    /// Decay constants `γ_0 … γ_{n_max}` (1/s).
    pub gammas: Vec<f64>,
    /// Sample times (s), strictly increasing and nonnegative.
    pub times: Vec<f64>,
    pub n_max: usize,
    /// Optional table `Ω_{n,n+1}` replacing `Ω₀ sqrt(n+1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JcSolver {
    /// Nonnegative least squares (Lawson-Hanson).
    #[default]
    Nnls,
    /// Unconstrained least squares, for diagnostics.
    LeastSquares,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JcFit {
    pub populations: Vec<f64>,
    /// `‖M P - (2s - 1)‖₂`.
    pub residual_norm: f64,
    pub condition: f64,
}

impl JcReadoutParams {
    /// Default decay model `γ_n = γ₀ (n+1)^0.7`.
    pub fn new(omega0: f64, gamma0: f64, times: Vec<f64>, n_max: usize) -> Result<Self> {
        let gammas = (0..=n_max).map(|n| gamma0 * ((n + 1) as f64).powf(0.7)).collect();
        let p = JcReadoutParams { omega0, gammas, times, n_max, rabi: None };
        p.validate()?;
        Ok(p)
    }

    /// `n` equally spaced times on `[0, t_max]`.
    pub fn uniform_times(t_max: f64, n: usize) -> Vec<f64> {
        if n <= 1 {
            return vec![0.0; n];
        }
        (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::domain(format!("omega0 = {} must be positive", self.omega0)));
        }
        if self.gammas.len() != self.n_max + 1 {
            return Err(Error::domain(format!("need {} decay constants, got {}", self.n_max + 1, self.gammas.len())));
        }
        if let Some(g) = self.gammas.iter().find(|g| !(**g >= 0.0 && g.is_finite())) {
            return Err(Error::domain(format!("decay constant {g} must be nonnegative")));
        }
        if let Some(r) = &self.rabi {
            if r.len() != self.n_max + 1 || r.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::domain(format!("Rabi table needs {} positive entries", self.n_max + 1)));
            }
        }
        if self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::domain("sample times must be finite and nonnegative"));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("sample times must be strictly increasing"));
        }
        Ok(())
    }

    /// `Ω_{n,n+1}`.
    pub fn rabi_frequency(&self, n: usize) -> f64 {
        match &self.rabi {
            Some(table) => table[n],
            None => self.omega0 * ((n + 1) as f64).sqrt(),
        }
    }

    /// `M_{in} = cos(2Ω_{n,n+1} t_i) e^{-γ_n t_i}`.
    pub fn design_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.times.len(), self.n_max + 1, |i, n| {
            let t = self.times[i];
            (2.0 * self.rabi_frequency(n) * t).cos() * (-self.gammas[n] * t).exp()
        })
    }
}

pub fn jc_signal(populations: &[f64], p: &JcReadoutParams) -> Result<Vec<f64>> {
    p.validate()?;
    if populations.len() != p.n_max + 1 {
        return Err(Error::domain(format!("need {} populations, got {}", p.n_max + 1, populations.len())));
    }
    if let Some(v) = populations.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(Error::domain(format!("population {v} must be nonnegative")));
    }
    let total: f64 = populations.iter().sum();
    if total > 1.0 + POPULATION_SLACK {
        return Err(Error::domain(format!("populations sum to {total} > 1")));
    }
    let y = p.design_matrix() * DVector::from_column_slice(populations);
    Ok(y.iter().map(|v| 0.5 * (1.0 + v)).collect())
}

/// Bernoulli readout: fraction of `shots` trials at each time that end in
/// the lower level, with stream `(seed, READOUT_DOMAIN, i)` per time sample.
pub fn jc_sample(signal: &[f64], shots: u64, seed: u64, exec: Execution) -> Result<Vec<f64>> {
    if shots == 0 {
        return Err(Error::domain("shots must be at least 1"));
    }
    if let Some(s) = signal.iter().find(|s| !(-POPULATION_SLACK..=1.0 + POPULATION_SLACK).contains(*s)) {
        return Err(Error::domain(format!("signal value {s} is not a probability")));
    }
    Ok(exec.map_indexed(signal.len(), |i| {
        let mut r = rng::stream(seed, rng::READOUT_DOMAIN, i as u64);
        let k = Binomial::new(shots, signal[i].clamp(0.0, 1.0)).expect("probability in [0,1]").sample(&mut r);
        k as f64 / shots as f64
    }))
}

pub fn jc_invert(signal: &[f64], p: &JcReadoutParams) -> Result<JcFit> {
    jc_invert_with(signal, p, JcSolver::Nnls)
}

/// Fits populations to `2 s(t_i) - 1 = Σ_n M_{in} P_n`.
pub fn jc_invert_with(signal: &[f64], p: &JcReadoutParams, solver: JcSolver) -> Result<JcFit> {
    p.validate()?;
    if signal.len() != p.times.len() {
        return Err(Error::domain(format!("{} signal values for {} times", signal.len(), p.times.len())));
    }
    if signal.len() < p.n_max + 1 {
        return Err(Error::domain(format!("need at least {} time samples for n_max = {}", p.n_max + 1, p.n_max)));
    }
    let m = p.design_matrix();
    let sv = m.clone().svd(false, false).singular_values;
    let (smax, smin) = sv.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let y = DVector::from_iterator(signal.len(), signal.iter().map(|s| 2.0 * s - 1.0));
    let x = match solver {
        JcSolver::Nnls => nnls(&m, &y),
        JcSolver::LeastSquares => least_squares(&m, &y),
    };
    let residual_norm = (&m * &x - &y).norm();
    Ok(JcFit { populations: x.iter().copied().collect(), residual_norm, condition })
}

fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    a.clone().svd(true, true).solve(b, f64::EPSILON * a.norm()).expect("SVD computed with both factors")
}

/// Lawson-Hanson active-set nonnegative least squares.
fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let tol = 10.0 * f64::EPSILON * a.norm() * b.norm().max(1.0) * a.nrows().max(n) as f64;
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let solve_passive = |passive: &[bool]| -> DVector<f64> {
        let cols: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
        let sub = a.select_columns(&cols);
        let zs = least_squares(&sub, b);
        let mut z = DVector::zeros(n);
        for (k, &c) in cols.iter().enumerate() {
            z[c] = zs[k];
        }
        z
    };
    for _ in 0..3 * n + 10 {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n).filter(|&k| !passive[k] && w[k] > tol).max_by(|&p, &q| w[p].total_cmp(&w[q]));
        let Some(t) = candidate else { break };
        passive[t] = true;
        loop {
            let z = solve_passive(&passive);
            if (0..n).filter(|&k| passive[k]).all(|k| z[k] > 0.0) {
                x = z;
                break;
            }
            let alpha = (0..n)
                .filter(|&k| passive[k] && z[k] <= 0.0)
                .map(|k| x[k] / (x[k] - z[k]))
                .fold(f64::INFINITY, f64::min);
            x += (&z - &x) * alpha;
            for k in 0..n {
                if passive[k] && x[k] <= tol {
                    passive[k] = false;
                    x[k] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(n_max: usize) -> JcReadoutParams {
        JcReadoutParams::new(1.0, 0.02, JcReadoutParams::uniform_times(20.0, 400), n_max).unwrap()
    }

    fn random_populations(rng: &mut impl Rng, n: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        raw.iter().map(|v| v / total).collect()
    }

    #[test]
    fn ground_state_signal() {
        let p = JcReadoutParams { gammas: vec![0.0], ..params(0) };
        let s = jc_signal(&[1.0], &p).unwrap();
        assert_eq!(s[0], 1.0);
        for (t, v) in p.times.iter().zip(&s) {
            assert!((v - 0.5 * (1.0 + (2.0 * t).cos())).abs() < 1e-15);
        }
        assert!(jc_signal(&[-0.1], &p).is_err());
    }

    #[test]
    fn long_times_decay_to_half() {
        let p = JcReadoutParams::new(1.0, 0.5, vec![0.0, 200.0], 2).unwrap();
        let s = jc_signal(&[0.3, 0.3, 0.4], &p).unwrap();
        assert!((s[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn noiseless_inversion() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for n_max in 0..=8 {
            let p = params(n_max);
            let pops = random_populations(&mut rng, n_max + 1);
            let fit = jc_invert(&jc_signal(&pops, &p).unwrap(), &p).unwrap();
            for (a, b) in fit.populations.iter().zip(&pops) {
                assert!((a - b).abs() < 1e-6, "n_max = {n_max}");
            }
            let ls = jc_invert_with(&jc_signal(&pops, &p).unwrap(), &p, JcSolver::LeastSquares).unwrap();
            assert!(ls.populations.iter().zip(&pops).all(|(a, b)| (a - b).abs() < 1e-6));
        }
    }

    #[test]
    fn trivial_signals() {
        let p = params(5);
        let fit = jc_invert(&vec![0.5; 400], &p).unwrap();
        assert!(fit.populations.iter().all(|v| v.abs() < 1e-12));
        let mut one = vec![0.0; 6];
        one[1] = 1.0;
        let fit = jc_invert(&jc_signal(&one, &p).unwrap(), &p).unwrap();
        assert!((fit.populations[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn nnls_keeps_populations_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let p = params(6);
        let mut pops = random_populations(&mut rng, 7);
        pops[3] = 0.0;
        let noisy = jc_sample(&jc_signal(&pops, &p).unwrap(), 200, 5, Execution::Sequential).unwrap();
        let fit = jc_invert(&noisy, &p).unwrap();
        assert!(fit.populations.iter().all(|v| *v >= 0.0));
        assert!(fit.populations.iter().zip(&pops).all(|(a, b)| (a - b).abs() < 0.1));
    }

    #[test]
    fn nnls_satisfies_optimality_conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..20 {
            let (rows, cols) = (12 + trial % 5, 6);
            let a = DMatrix::from_fn(rows, cols, |_, _| rng.random::<f64>() - 0.3);
            let b = DVector::from_fn(rows, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let x = nnls(&a, &b);
            let grad = a.transpose() * (&b - &a * &x);
            for k in 0..cols {
                assert!(x[k] >= 0.0);
                assert!(grad[k] <= 1e-10, "trial {trial}: gradient {} at {k}", grad[k]);
                if x[k] > 0.0 {
                    assert!(grad[k].abs() <= 1e-10, "trial {trial}: free gradient {}", grad[k]);
                }
            }
        }
        let a = DMatrix::from_fn(10, 4, |_, _| rng.random::<f64>());
        let want = DVector::from_vec(vec![0.3, 1.2, 0.5, 2.0]);
        let x = nnls(&a, &(&a * &want));
        assert!((x - want).amax() < 1e-10);
    }

    #[test]
    fn short_window_is_ill_conditioned() {
        let p = JcReadoutParams::new(1.0, 0.0, JcReadoutParams::uniform_times(0.01, 50), 8).unwrap();
        let s = jc_signal(&[0.0; 9], &p).unwrap();
        assert!(matches!(jc_invert(&s, &p), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn sampling_is_reproducible() {
        let p = params(3);
        let s = jc_signal(&[0.1, 0.2, 0.3, 0.4], &p).unwrap();
        let a = jc_sample(&s, 1000, 7, Execution::Sequential).unwrap();
        let b = jc_sample(&s, 1000, 7, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
