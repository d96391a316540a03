use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use su2_tomography::frontends::{
    blockwise_reconstruct_with, control_schedule, displacement_defect, jc_invert_with, jc_sample, jc_signal,
    simulate_blocks_with, BlockOutcome, Frontend, JcSolver, TwoModeState,
};
use su2_tomography::measure::io::{read_probability_csv, read_record_csv, write_probability_csv, write_record_csv};
use su2_tomography::measure::{
    build_grid, exact_probability_grid_with, record_to_probability_grid, sample_measurements_with, ProbabilityGrid,
    SphereGrid,
};
use su2_tomography::reconstruct::{
    density_from_multipoles, fidelity, max_abs_diff, multipoles_from_density, multipoles_from_probabilities_with,
    qpd_from_multipoles_with, qpd_from_probabilities_with, trace_distance, write_qpd_csv, MultipoleJson, ReconstructedDensity,
};
use su2_tomography::states::{DensityJson, DensityMatrix, Operator};
use su2_tomography::sweep::{run_sweep_with, write_sweep_csv, SweepSpec};
use su2_tomography::{linalg, Execution, HalfInteger};

use crate::config::{ExperimentConfig, FrontendKind, SweepConfig, Target};
use crate::error::{CliError, CliResult, FileContext};
use crate::output::{read_json, OutDir};
use crate::{Cli, Command, Route};

struct Context<'a> {
    cli: &'a Cli,
    config: Option<ExperimentConfig>,
    exec: Execution,
}

impl Context<'_> {
    fn config(&self) -> CliResult<&ExperimentConfig> {
        self.config.as_ref().ok_or_else(|| CliError::config("", "this command needs --config"))
    }

    fn seed(&self) -> u64 {
        self.cli.seed.or(self.config.as_ref().map(|c| c.seed)).unwrap_or(0)
    }

    fn shots(&self) -> u64 {
        self.cli.shots.or(self.config.as_ref().map(|c| c.shots)).unwrap_or(0)
    }

    fn out(&self) -> CliResult<OutDir> {
        let dir = self
            .cli
            .out
            .clone()
            .or_else(|| self.config.as_ref().and_then(|c| c.output_dir.clone()))
            .unwrap_or_else(|| PathBuf::from("out"));
        OutDir::new(dir)
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let config = cli.config.as_deref().map(ExperimentConfig::load).transpose()?;
    if let Some(ion) = config.as_ref().and_then(|c| c.trapped_ion.as_ref()) {
        for w in ion.warnings() {
            eprintln!("warning: {w}");
        }
    }
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    let ctx = Context { cli, config, exec };
    match &cli.command {
        Command::Simulate => simulate(&ctx),
        Command::Reconstruct { input, project } => reconstruct(&ctx, input.as_deref(), *project),
        Command::Qpd { input, s, route, oversample } => qpd(&ctx, input.as_deref(), s, *route, *oversample),
        Command::Sweep { levels, seeds } => sweep(&ctx, levels, *seeds),
        Command::Jc { populations, solver } => jc(&ctx, populations, solver.map(JcSolver::from)),
    }
}

fn single_probabilities(ctx: &Context, cfg: &ExperimentConfig, rho: &DensityMatrix, grid: &SphereGrid, out: Option<&OutDir>) -> CliResult<ProbabilityGrid> {
    let shots = ctx.shots();
    if shots == 0 {
        return Ok(exact_probability_grid_with(rho, grid, cfg.readout(), ctx.exec)?);
    }
    let rec = sample_measurements_with(rho, grid, shots, ctx.seed(), ctx.exec)?;
    if let Some(out) = out {
        out.write("measurements.csv", |w| write_record_csv(&rec, w))?;
    }
    Ok(record_to_probability_grid(&rec, cfg.readout())?)
}

fn simulate(ctx: &Context) -> CliResult<()> {
    let cfg = ctx.config()?;
    let grid = cfg.grid()?;
    let out = ctx.out()?;
    write_controls(cfg, &grid, &out)?;
    match cfg.target()? {
        Target::Single(rho) => {
            out.write_json("state.json", &rho.to_json())?;
            let pg = single_probabilities(ctx, cfg, &rho, &grid, Some(&out))?;
            out.write("probabilities.csv", |w| write_probability_csv(&pg, w))?;
        }
        Target::TwoMode(state) => {
            let data = simulate_blocks_with(&state, &grid, ctx.shots(), ctx.seed(), ctx.exec)?;
            let mut summary = Vec::new();
            for (block, d) in state.blocks().iter().zip(&data) {
                let file = match &d.probabilities {
                    Ok(pg) => {
                        let name = format!("probabilities_j{}.csv", d.j.twice());
                        out.write(&name, |w| write_probability_csv(pg, w))?;
                        Some(name)
                    }
                    Err(_) => None,
                };
                summary.push(BlockSummary {
                    two_j: d.j.twice(),
                    weight: d.weight,
                    estimated_weight: d.estimated_weight,
                    weight_sigma: d.weight_sigma,
                    effective_shots: d.effective_shots.iter().sum(),
                    probabilities: file,
                    unreconstructable: d.probabilities.as_ref().err().cloned(),
                    state: block.state.to_json(),
                });
            }
            if state.coherences_discarded() {
                eprintln!("note: coherences between photon-number blocks are not measured and were discarded");
            }
            out.write_json("blocks.json", &summary)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct BlockSummary {
    two_j: i32,
    weight: f64,
    estimated_weight: f64,
    weight_sigma: f64,
    effective_shots: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    probabilities: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unreconstructable: Option<String>,
    state: DensityJson,
}

fn write_controls(cfg: &ExperimentConfig, grid: &SphereGrid, out: &OutDir) -> CliResult<()> {
    let j = cfg.j();
    match cfg.frontend {
        FrontendKind::Abstract => Ok(()),
        FrontendKind::Ramsey => {
            let p = cfg.ramsey.as_ref().expect("validated");
            p.validate()?;
            controls_table(p, j, grid, out)
        }
        FrontendKind::MachZehnder => {
            let p = cfg.mach_zehnder.as_ref().expect("validated");
            p.validate()?;
            controls_table(p, j, grid, out)
        }
        FrontendKind::TrappedIon => {
            let p = cfg.trapped_ion.as_ref().expect("validated");
            p.validate()?;
            controls_table(p, j, grid, out)
        }
    }
}

fn controls_table<F: Frontend>(frontend: &F, j: HalfInteger, grid: &SphereGrid, out: &OutDir) -> CliResult<()> {
    let schedule = control_schedule(frontend, grid)?;
    let rows = schedule
        .iter()
        .zip(grid.points())
        .map(|(f, n)| Ok((f.control_columns(), displacement_defect(&f.physical_unitary(j)?, *n))))
        .collect::<su2_tomography::Result<Vec<_>>>()?;
    out.write("controls.csv", |w| {
        let names: Vec<&str> = rows.first().map(|(c, _)| c.iter().map(|(n, _)| *n).collect()).unwrap_or_default();
        writeln!(w, "theta,phi,{},defect", names.join(","))?;
        for ((cols, defect), n) in rows.iter().zip(grid.points()) {
            let vals: Vec<String> = cols.iter().map(|(_, v)| format!("{v:.16e}")).collect();
            writeln!(w, "{:.16e},{:.16e},{},{defect:.3e}", n.theta(), n.phi(), vals.join(","))?;
        }
        Ok(())
    })?;
    Ok(())
}

/// First non-comment line of a CSV file.
fn csv_header(path: &Path) -> CliResult<String> {
    let text = std::fs::read_to_string(path).for_file(path)?;
    Ok(text.lines().find(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty()).unwrap_or("").to_string())
}

fn load_probabilities(ctx: &Context, path: &Path) -> CliResult<ProbabilityGrid> {
    let header = csv_header(path)?;
    let file = std::fs::File::open(path).for_file(path)?;
    let fallback = ctx.config.as_ref().map(|c| (c.j(), c.readout()));
    if header.split(',').any(|h| h.trim() == "p") {
        return read_probability_csv(file, fallback).for_file(path);
    }
    let rec = read_record_csv(file).for_file(path)?;
    let mu = match fallback {
        Some((j, mu)) if j == rec.j() => mu,
        _ => rec.j(),
    };
    Ok(record_to_probability_grid(&rec, mu)?)
}

#[derive(Serialize)]
struct Metrics {
    /// Against the nearest physical state; the raw estimate need not be one.
    fidelity: f64,
    trace_distance: f64,
    max_abs_diff: f64,
}

#[derive(Serialize)]
struct ReconstructionReport<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<&'a ExperimentConfig>,
    two_j: i32,
    two_mu: i32,
    grid_points: usize,
    total_shots: u64,
    trace_re: f64,
    trace_im: f64,
    hermiticity_defect: f64,
    min_eigenvalue: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<Metrics>,
    multipoles: MultipoleJson,
}

fn metrics(truth: &DensityMatrix, est: &ReconstructedDensity) -> CliResult<Metrics> {
    Ok(Metrics {
        fidelity: match est.project_to_state() {
            Ok(physical) => fidelity(truth, &physical)?,
            Err(_) => 0.0,
        },
        trace_distance: trace_distance(truth, est)?,
        max_abs_diff: max_abs_diff(truth, est)?,
    })
}

fn reconstruct(ctx: &Context, input: Option<&Path>, project: bool) -> CliResult<()> {
    let truth = match &ctx.config {
        Some(cfg) => Some(cfg.target()?),
        None => None,
    };
    let pg = match (input, &truth) {
        (Some(path), _) => load_probabilities(ctx, path)?,
        (None, Some(Target::Single(rho))) => {
            let cfg = ctx.config()?;
            single_probabilities(ctx, cfg, rho, &cfg.grid()?, None)?
        }
        (None, Some(Target::TwoMode(state))) => return reconstruct_blocks(ctx, state, project),
        (None, None) => return Err(CliError::config("", "reconstruct needs --input or --config")),
    };
    let out = ctx.out()?;
    let r = multipoles_from_probabilities_with(&pg, ctx.exec)?;
    let est = density_from_multipoles(&r);
    out.write_json("multipoles.json", &r.to_json())?;
    out.write_json("density.json", &DensityJson::from_matrix(est.j(), est.matrix()))?;
    if project {
        out.write_json("density_projected.json", &est.project_to_state()?.to_json())?;
    }
    let m = match truth {
        Some(Target::Single(rho)) if rho.j() == est.j() => Some(metrics(&rho, &est)?),
        _ => None,
    };
    let trace = est.trace();
    let report = ReconstructionReport {
        config: ctx.config.as_ref(),
        two_j: pg.j().twice(),
        two_mu: pg.mu().twice(),
        grid_points: pg.grid().len(),
        total_shots: pg.shots().iter().sum(),
        trace_re: trace.re,
        trace_im: trace.im,
        hermiticity_defect: linalg::hermiticity_defect(est.matrix()),
        min_eigenvalue: est.eigenvalues().into_iter().fold(f64::INFINITY, f64::min),
        metrics: m,
        multipoles: r.to_json(),
    };
    out.write_json("report.json", &report)?;
    Ok(())
}

#[derive(Serialize)]
struct BlockResult {
    two_j: i32,
    weight: f64,
    estimated_weight: f64,
    weight_sigma: f64,
    effective_shots: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<Metrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unreconstructed: Option<String>,
}

#[derive(Serialize)]
struct BlockwiseReport<'a> {
    config: &'a ExperimentConfig,
    blocks: Vec<BlockResult>,
}

fn reconstruct_blocks(ctx: &Context, state: &TwoModeState, project: bool) -> CliResult<()> {
    let cfg = ctx.config()?;
    let reports = blockwise_reconstruct_with(state, &cfg.grid()?, ctx.shots(), ctx.seed(), ctx.exec)?;
    let out = ctx.out()?;
    let mut results = Vec::new();
    for rep in &reports {
        let tj = rep.j.twice();
        let (m, reason) = match &rep.outcome {
            BlockOutcome::Reconstructed { estimate, metrics } => {
                out.write_json(&format!("density_j{tj}.json"), &DensityJson::from_matrix(rep.j, estimate.matrix()))?;
                if project {
                    out.write_json(&format!("density_projected_j{tj}.json"), &estimate.project_to_state()?.to_json())?;
                }
                let m = Metrics { fidelity: metrics.fidelity, trace_distance: metrics.trace_distance, max_abs_diff: metrics.max_abs_diff };
                (Some(m), None)
            }
            BlockOutcome::Unreconstructed { reason } => (None, Some(reason.clone())),
        };
        results.push(BlockResult {
            two_j: tj,
            weight: rep.weight,
            estimated_weight: rep.estimated_weight,
            weight_sigma: rep.weight_sigma,
            effective_shots: rep.total_effective_shots(),
            metrics: m,
            unreconstructed: reason,
        });
    }
    out.write_json("report.json", &BlockwiseReport { config: cfg, blocks: results })?;
    Ok(())
}

#[derive(Serialize)]
struct QpdEntry {
    s: f64,
    route: &'static str,
    file: String,
    normalization: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    route_discrepancy: Option<f64>,
}

fn qpd(ctx: &Context, input: Option<&Path>, s_arg: &[f64], route: Route, oversample: Option<f64>) -> CliResult<()> {
    let s_values: Vec<f64> = if !s_arg.is_empty() {
        s_arg.to_vec()
    } else {
        ctx.config.as_ref().map(|c| c.s_values.clone()).unwrap_or_else(|| vec![-1.0, 0.0, 1.0])
    };
    let oversample = oversample.or(ctx.config.as_ref().map(|c| c.oversample)).unwrap_or(1.0);
    enum Source {
        Density(DensityMatrix),
        Probabilities(ProbabilityGrid),
    }
    let source = match input {
        Some(path) if path.extension().is_some_and(|e| e == "json") => {
            let doc: DensityJson = read_json(path)?;
            let (j, m) = doc.to_matrix().for_file(path)?;
            Source::Density(DensityMatrix::new(j, m)?)
        }
        Some(path) => Source::Probabilities(load_probabilities(ctx, path)?),
        None => {
            let cfg = ctx.config()?;
            match cfg.target()? {
                Target::Single(rho) => Source::Probabilities(single_probabilities(ctx, cfg, &rho, &cfg.grid()?, None)?),
                Target::TwoMode(_) => return Err(CliError::config("state", "qpd works on a single-j state")),
            }
        }
    };
    let j = match &source {
        Source::Density(rho) => rho.j(),
        Source::Probabilities(pg) => pg.j(),
    };
    let grid = build_grid(j, oversample).map_err(|e| CliError::config("oversample", e))?;
    let out = ctx.out()?;
    let mut entries = Vec::new();
    for &s in &s_values {
        let (q, discrepancy, route_name) = match (&source, route) {
            (Source::Density(rho), _) => (qpd_from_multipoles_with(&multipoles_from_density(rho), s, &grid, ctx.exec)?, None, "density"),
            (Source::Probabilities(pg), route) => {
                let via_r = qpd_from_multipoles_with(&multipoles_from_probabilities_with(pg, ctx.exec)?, s, &grid, ctx.exec)?;
                let kernel = qpd_from_probabilities_with(pg, s, &grid, ctx.exec)?;
                let d = via_r.values().iter().zip(kernel.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                match route {
                    Route::Multipole => (via_r, Some(d), "multipole"),
                    Route::Kernel => (kernel, Some(d), "kernel"),
                }
            }
        };
        let file = format!("qpd_s{}.csv", s_label(s));
        out.write(&file, |w| write_qpd_csv(&q, w))?;
        entries.push(QpdEntry { s, route: route_name, normalization: q.normalization(), file, route_discrepancy: discrepancy });
    }
    out.write_json("qpd_report.json", &entries)?;
    Ok(())
}

fn s_label(s: f64) -> String {
    if s < 0.0 {
        format!("m{}", -s)
    } else {
        format!("{s}")
    }
}

fn sweep(ctx: &Context, levels: &[u64], seeds: Option<usize>) -> CliResult<()> {
    let cfg = ctx.config()?;
    let Target::Single(state) = cfg.target()? else {
        return Err(CliError::config("state", "sweep works on a single-j state"));
    };
    let defaults = cfg.sweep.clone().unwrap_or_default();
    let sweep = SweepConfig {
        levels: if levels.is_empty() { defaults.levels } else { levels.to_vec() },
        seeds: seeds.unwrap_or(defaults.seeds),
    };
    if sweep.levels.len() < 2 || sweep.levels.contains(&0) {
        return Err(CliError::config("--levels", "need at least two positive shot levels"));
    }
    if sweep.seeds < 5 {
        return Err(CliError::config("--seeds", "need at least 5 seeds"));
    }
    let spec = SweepSpec {
        state,
        grid: cfg.grid()?,
        readout: cfg.readout(),
        shot_levels: sweep.levels,
        seeds: sweep.seeds,
        base_seed: ctx.seed(),
    };
    let report = run_sweep_with(&spec, ctx.exec)?;
    let out = ctx.out()?;
    out.write_json("sweep.json", &report)?;
    out.write("sweep.csv", |w| write_sweep_csv(&report, w))?;
    println!("slope {:.4} (log10 median error vs log10 shots)", report.slope);
    Ok(())
}

#[derive(Serialize)]
struct JcReport {
    solver: JcSolver,
    shots: u64,
    populations: Vec<f64>,
    estimated: Vec<f64>,
    residual_norm: f64,
    condition: f64,
    max_population_error: f64,
}

fn jc(ctx: &Context, populations: &[f64], solver: Option<JcSolver>) -> CliResult<()> {
    let cfg = ctx.config()?;
    let jc = cfg.jc.as_ref().ok_or_else(|| CliError::config("jc", "missing"))?;
    let params = jc.params()?;
    let pops = if !populations.is_empty() {
        populations.to_vec()
    } else {
        jc.populations.clone().ok_or_else(|| CliError::config("jc.populations", "give populations in the config or with --populations"))?
    };
    let solver = solver.unwrap_or(jc.solver);
    let signal = jc_signal(&pops, &params)?;
    let shots = ctx.shots();
    let measured = if shots == 0 { signal.clone() } else { jc_sample(&signal, shots, ctx.seed(), ctx.exec)? };
    let fit = jc_invert_with(&measured, &params, solver)?;
    let out = ctx.out()?;
    out.write("jc_signal.csv", |w| {
        writeln!(w, "t,signal,measured")?;
        for ((t, s), m) in params.times.iter().zip(&signal).zip(&measured) {
            writeln!(w, "{t:.16e},{s:.16e},{m:.16e}")?;
        }
        Ok(())
    })?;
    let max_population_error = pops
        .iter()
        .chain(std::iter::repeat(&0.0))
        .zip(&fit.populations)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    out.write_json(
        "jc_populations.json",
        &JcReport {
            solver,
            shots,
            populations: pops,
            estimated: fit.populations,
            residual_norm: fit.residual_norm,
            condition: fit.condition,
            max_population_error,
        },
    )?;
    Ok(())
}
