use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use su2_tomography::frontends::{
    decompose_two_mode, InterferometerParams, IonParams, JcReadoutParams, JcSolver, RamseyParams, TwoModeState,
};
use su2_tomography::measure::{build_grid, SphereGrid};
use su2_tomography::states::{make_coherent, make_dicke, make_mixture, make_superposition, DensityJson, DensityMatrix};
use su2_tomography::{HalfInteger, SpherePoint};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontendKind {
    #[default]
    Abstract,
    Ramsey,
    MachZehnder,
    TrappedIon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Dicke {
        two_mu: i32,
    },
    Coherent {
        theta: f64,
        phi: f64,
    },
    /// Amplitudes in basis order `μ = j, …, -j`; normalized on load.
    Superposition {
        re: Vec<f64>,
        #[serde(default)]
        im: Option<Vec<f64>>,
    },
    Mixture {
        components: Vec<MixtureComponent>,
    },
    Density {
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
    },
    TwoMode {
        amplitudes: Vec<FockAmplitude>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub state: StateSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockAmplitude {
    pub n1: u32,
    pub n2: u32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_levels")]
    pub levels: Vec<u64>,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
}

fn default_levels() -> Vec<u64> {
    vec![100, 1_000, 10_000, 100_000, 1_000_000]
}

fn default_seeds() -> usize {
    20
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { levels: default_levels(), seeds: default_seeds() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JcConfig {
    pub omega0: f64,
    #[serde(default)]
    pub gamma0: f64,
    /// Per-level decay constants; replaces the `gamma0` model when given.
    #[serde(default)]
    pub gammas: Option<Vec<f64>>,
    #[serde(default)]
    pub rabi: Option<Vec<f64>>,
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub n_times: Option<usize>,
    pub n_max: usize,
    #[serde(default)]
    pub populations: Option<Vec<f64>>,
    #[serde(default)]
    pub solver: JcSolver,
}

impl JcConfig {
    pub fn params(&self) -> CliResult<JcReadoutParams> {
        let times = match (&self.times, self.t_max, self.n_times) {
            (Some(t), None, None) => t.clone(),
            (None, Some(t_max), Some(n)) => JcReadoutParams::uniform_times(t_max, n),
            _ => return Err(CliError::config("jc.times", "give either `times` or both `t_max` and `n_times`")),
        };
        let mut p = JcReadoutParams::new(self.omega0, self.gamma0, times, self.n_max)
            .map_err(|e| CliError::config("jc", e))?;
        if let Some(g) = &self.gammas {
            p.gammas = g.clone();
        }
        p.rabi = self.rabi.clone();
        p.validate().map_err(|e| CliError::config("jc", e))?;
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub frontend: FrontendKind,
    pub two_j: i32,
    pub state: StateSpec,
    #[serde(default)]
    pub readout_two_mu: Option<i32>,
    #[serde(default = "default_oversample")]
    pub oversample: f64,
    /// Shots per grid point; 0 means exact probabilities.
    #[serde(default)]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_s_values")]
    pub s_values: Vec<f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub ramsey: Option<RamseyParams>,
    #[serde(default)]
    pub mach_zehnder: Option<InterferometerParams>,
    #[serde(default)]
    pub trapped_ion: Option<IonParams>,
    #[serde(default)]
    pub jc: Option<JcConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

fn default_oversample() -> f64 {
    1.0
}

fn default_s_values() -> Vec<f64> {
    vec![-1.0, 0.0, 1.0]
}

/// Target of a simulation: a state on one `H_j` or a two-mode state.
#[derive(Clone, Debug)]
pub enum Target {
    Single(DensityMatrix),
    TwoMode(TwoModeState),
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            let field = if field == "." { String::new() } else { field };
            CliError::config(field, format!("{} ({})", e.inner(), path.display()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn j(&self) -> HalfInteger {
        HalfInteger::from_twice(self.two_j)
    }

    pub fn readout(&self) -> HalfInteger {
        HalfInteger::from_twice(self.readout_two_mu.unwrap_or(self.two_j))
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.two_j < 0 {
            return Err(CliError::config("two_j", format!("{} must be nonnegative", self.two_j)));
        }
        if self.two_j > 200 {
            return Err(CliError::config("two_j", format!("{} is larger than supported (200)", self.two_j)));
        }
        let mu = self.readout();
        if mu.twice().abs() > self.two_j || (mu.twice() - self.two_j) % 2 != 0 {
            return Err(CliError::config("readout_two_mu", format!("{} is not a projection of two_j = {}", mu.twice(), self.two_j)));
        }
        if !(self.oversample >= 1.0 && self.oversample.is_finite()) {
            return Err(CliError::config("oversample", format!("{} must be >= 1", self.oversample)));
        }
        if let Some(s) = self.s_values.iter().find(|s| ![-1.0, 0.0, 1.0].contains(*s)) {
            return Err(CliError::config("s_values", format!("{s} is not one of -1, 0, 1")));
        }
        let two_mode = matches!(self.state, StateSpec::TwoMode { .. });
        if two_mode && !matches!(self.frontend, FrontendKind::MachZehnder | FrontendKind::TrappedIon) {
            return Err(CliError::config("state", "two_mode states need the mach_zehnder or trapped_ion frontend"));
        }
        match self.frontend {
            FrontendKind::Abstract => {}
            FrontendKind::Ramsey if self.ramsey.is_none() => return Err(CliError::config("ramsey", "missing for frontend ramsey")),
            FrontendKind::MachZehnder if self.mach_zehnder.is_none() => {
                return Err(CliError::config("mach_zehnder", "missing for frontend mach_zehnder"))
            }
            FrontendKind::TrappedIon if self.trapped_ion.is_none() => {
                return Err(CliError::config("trapped_ion", "missing for frontend trapped_ion"))
            }
            _ => {}
        }
        if let Some(sw) = &self.sweep {
            if sw.levels.len() < 2 || sw.levels.contains(&0) {
                return Err(CliError::config("sweep.levels", "need at least two positive shot levels"));
            }
            if sw.seeds < 5 {
                return Err(CliError::config("sweep.seeds", "need at least 5 seeds"));
            }
        }
        if let Some(jc) = &self.jc {
            jc.params()?;
        }
        self.target().map(|_| ())
    }

    pub fn grid(&self) -> CliResult<SphereGrid> {
        build_grid(self.j(), self.oversample).map_err(|e| CliError::config("oversample", e))
    }

    pub fn target(&self) -> CliResult<Target> {
        let j = self.j();
        if let StateSpec::TwoMode { amplitudes } = &self.state {
            let mut map = BTreeMap::new();
            for (k, a) in amplitudes.iter().enumerate() {
                if a.n1 + a.n2 > self.two_j as u32 {
                    return Err(CliError::config(
                        format!("state.amplitudes[{k}]"),
                        format!("photon number {} exceeds two_j = {}", a.n1 + a.n2, self.two_j),
                    ));
                }
                if map.insert((a.n1, a.n2), Complex64::new(a.re, a.im)).is_some() {
                    return Err(CliError::config(format!("state.amplitudes[{k}]"), "duplicate Fock pair"));
                }
            }
            return decompose_two_mode(&map).map(Target::TwoMode).map_err(|e| CliError::config("state.amplitudes", e));
        }
        single_state(j, &self.state, "state").map(Target::Single)
    }
}

fn single_state(j: HalfInteger, spec: &StateSpec, path: &str) -> CliResult<DensityMatrix> {
    let err = |e: su2_tomography::Error| CliError::config(path, e);
    Ok(match spec {
        StateSpec::Dicke { two_mu } => DensityMatrix::pure(&make_dicke(j, HalfInteger::from_twice(*two_mu)).map_err(err)?),
        StateSpec::Coherent { theta, phi } => {
            let n = SpherePoint::new(*theta, *phi).map_err(err)?;
            DensityMatrix::pure(&make_coherent(j, n).map_err(err)?)
        }
        StateSpec::Superposition { re, im } => {
            let im = im.clone().unwrap_or_else(|| vec![0.0; re.len()]);
            if im.len() != re.len() {
                return Err(CliError::config(format!("{path}.im"), "must have the same length as re"));
            }
            let coeffs: Vec<Complex64> = re.iter().zip(&im).map(|(a, b)| Complex64::new(*a, *b)).collect();
            DensityMatrix::pure(&make_superposition(j, &coeffs).map_err(err)?)
        }
        StateSpec::Mixture { components } => {
            let parts = components
                .iter()
                .enumerate()
                .map(|(k, c)| Ok((c.weight, single_state(j, &c.state, &format!("{path}.components[{k}].state"))?)))
                .collect::<CliResult<Vec<_>>>()?;
            make_mixture(parts).map_err(err)?
        }
        StateSpec::Density { re, im } => {
            DensityMatrix::from_json(&DensityJson { two_j: j.twice(), re: re.clone(), im: im.clone() }).map_err(err)?
        }
        StateSpec::TwoMode { .. } => return Err(CliError::config(path, "two_mode is not allowed here")),
    })
}
