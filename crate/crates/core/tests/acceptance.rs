//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails or exceeds its time budget.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use su2_tomography::frontends::{
    blockwise_reconstruct, decompose_two_mode, displacement_defect, g_dagger, jc_invert, jc_sample, jc_signal,
    phase_uncertainty, phase_uncertainty_moments, BlockOutcome, Frontend, InterferometerParams, IonParams,
    JcReadoutParams, RamseyParams,
};
use su2_tomography::linalg::max_abs_diff as matrix_diff;
use su2_tomography::measure::{build_grid, displaced_probabilities, exact_probability_grid};
use su2_tomography::reconstruct::{
    fidelity, glauber_p_check, max_abs_diff, multipoles_from_density, multipoles_from_probabilities, q_function,
    qpd_from_multipoles, qpd_from_probabilities, reconstruct_density,
};
use su2_tomography::states::{random, DensityMatrix, Operator};
use su2_tomography::su2::rotation_operator;
use su2_tomography::sweep::{run_sweep, SweepSpec};
use su2_tomography::{Complex64, ComplexMatrix, Error, Execution, HalfInteger, SpherePoint};

type Outcome = Result<String, String>;

fn h(two: i32) -> HalfInteger {
    HalfInteger::from_twice(two)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_state(j: HalfInteger, k: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    if k.is_multiple_of(2) {
        random::mixed(j, 1 + k % j.dim(), rng)
    } else {
        DensityMatrix::pure(&random::pure(j, rng))
    }
}

/// `sqrt(C(2j, j+μ)) cos^{j+μ}(θ/2) sin^{j-μ}(θ/2) e^{-iμφ}` with the
/// binomial built from an explicit product.
fn coherent_amplitude(two_j: i32, two_mu: i32, theta: f64, phi: f64) -> Complex64 {
    let up = ((two_j + two_mu) / 2) as u32;
    let down = ((two_j - two_mu) / 2) as u32;
    let mut binom = 1.0f64;
    for i in 0..down {
        binom = binom * f64::from(two_j as u32 - i) / f64::from(i + 1);
    }
    let (s, c) = (theta / 2.0).sin_cos();
    Complex64::from_polar(binom.sqrt() * c.powi(up as i32) * s.powi(down as i32), -0.5 * f64::from(two_mu) * phi)
}

fn c1_convention_lock() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for two_j in 1..=10 {
        let j = h(two_j);
        for _ in 0..100 {
            let n = random::sphere_point(&mut rng);
            let g = rotation_operator(j, n);
            for (row, mu) in j.projections().enumerate() {
                let want = coherent_amplitude(two_j, mu.twice(), n.theta(), n.phi());
                worst = worst.max((g[(row, 0)] - want).norm());
            }
        }
    }
    check(worst <= 1e-12, format!("max column error {worst:.2e}"))
}

fn c2_exact_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let (mut worst_diff, mut worst_fid) = (0.0f64, 1.0f64);
    for two_j in 1..=10 {
        let j = h(two_j);
        let grid = build_grid(j, 1.0).map_err(|e| e.to_string())?;
        for k in 0..50 {
            let rho = random_state(j, k, &mut rng);
            let pg = exact_probability_grid(&rho, &grid, j).map_err(|e| e.to_string())?;
            let est = reconstruct_density(&pg).map_err(|e| e.to_string())?;
            worst_diff = worst_diff.max(max_abs_diff(&rho, &est).map_err(|e| e.to_string())?);
            worst_fid = worst_fid.min(fidelity(&rho, &est).map_err(|e| e.to_string())?);
        }
    }
    check(
        worst_diff <= 1e-9 && worst_fid >= 1.0 - 1e-9,
        format!("max_abs_diff {worst_diff:.2e}, min fidelity 1-{:.2e}", 1.0 - worst_fid),
    )
}

fn c3_husimi_and_antipode() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let (mut q_err, mut anti_err) = (0.0f64, 0.0f64);
    for two_j in 1..=10 {
        let j = h(two_j);
        for k in 0..10 {
            let rho = random_state(j, k, &mut rng);
            for _ in 0..20 {
                let n = random::sphere_point(&mut rng);
                let p = displaced_probabilities(&rho, n);
                q_err = q_err.max((q_function(&rho, n) - p[0]).abs());
                anti_err = anti_err.max((q_function(&rho, n.antipode()) - p[j.dim() - 1]).abs());
            }
        }
    }
    check(q_err <= 1e-12 && anti_err <= 1e-12, format!("Q vs p_j {q_err:.2e}, antipode {anti_err:.2e}"))
}

fn c4_kernel_vs_multipole() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let (mut route, mut identity) = (0.0f64, 0.0f64);
    for two_j in 1..=10 {
        let j = h(two_j);
        let grid = build_grid(j, 1.0).map_err(|e| e.to_string())?;
        for k in 0..3 {
            let rho = random_state(j, k, &mut rng);
            let pg = exact_probability_grid(&rho, &grid, j).map_err(|e| e.to_string())?;
            let r = multipoles_from_probabilities(&pg).map_err(|e| e.to_string())?;
            for s in [-1.0, 0.0, 1.0] {
                let a = qpd_from_multipoles(&r, s, &grid).map_err(|e| e.to_string())?;
                let b = qpd_from_probabilities(&pg, s, &grid).map_err(|e| e.to_string())?;
                for (x, y) in a.values().iter().zip(b.values()) {
                    route = route.max((x - y).abs());
                }
                if s == -1.0 {
                    for (x, y) in b.values().iter().zip(pg.values()) {
                        identity = identity.max((x - y).abs());
                    }
                }
            }
        }
    }
    check(route <= 1e-9 && identity <= 1e-10, format!("route discrepancy {route:.2e}, kernel identity {identity:.2e}"))
}

fn c5_normalization_overlap_glauber() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let (mut norm, mut overlap, mut glauber) = (0.0f64, 0.0f64, 0.0f64);
    for two_j in 1..=10 {
        let j = h(two_j);
        let grid = build_grid(j, 1.0).map_err(|e| e.to_string())?;
        for k in 0..4 {
            let a = random_state(j, k, &mut rng);
            let b = random_state(j, k + 1, &mut rng);
            let wa = qpd_from_multipoles(&multipoles_from_density(&a), 0.0, &grid).map_err(|e| e.to_string())?;
            let wb = qpd_from_multipoles(&multipoles_from_density(&b), 0.0, &grid).map_err(|e| e.to_string())?;
            norm = norm.max((wa.normalization() - 1.0).abs());
            let integral: f64 =
                wa.values().iter().zip(wb.values()).zip(grid.weights()).map(|((x, y), w)| x * y * w).sum();
            let tr = (a.matrix() * b.matrix()).trace().re;
            overlap = overlap.max((integral * j.dim() as f64 / (4.0 * PI) - tr).abs());
            let p = qpd_from_multipoles(&multipoles_from_density(&a), 1.0, &grid).map_err(|e| e.to_string())?;
            glauber = glauber.max(glauber_p_check(&a, &p).map_err(|e| e.to_string())?);
        }
    }
    check(
        norm <= 1e-10 && overlap <= 1e-9 && glauber <= 1e-9,
        format!("normalization {norm:.2e}, overlap {overlap:.2e}, Glauber reassembly {glauber:.2e}"),
    )
}

fn c6_resolution_of_identity() -> Outcome {
    let mut worst = 0.0f64;
    for two_j in 0..=10 {
        let j = h(two_j);
        let grid = build_grid(j, 1.0).map_err(|e| e.to_string())?;
        let dim = j.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (n, w) in grid.points().iter().zip(grid.weights()) {
            let col: Vec<Complex64> =
                j.projections().map(|mu| coherent_amplitude(two_j, mu.twice(), n.theta(), n.phi())).collect();
            for r in 0..dim {
                for c in 0..dim {
                    acc[(r, c)] += col[r] * col[c].conj() * *w;
                }
            }
        }
        acc *= Complex64::new(dim as f64 / (4.0 * PI), 0.0);
        worst = worst.max(matrix_diff(&acc, &ComplexMatrix::identity(dim, dim)));
    }
    check(worst <= 1e-10, format!("max deviation from identity {worst:.2e}"))
}

fn c7_shot_noise_scaling() -> Outcome {
    let j = HalfInteger::ONE;
    let n = SpherePoint::new(1.1, 0.7).map_err(|e| e.to_string())?;
    let spec = SweepSpec {
        state: DensityMatrix::pure(&su2_tomography::states::make_coherent(j, n).map_err(|e| e.to_string())?),
        grid: build_grid(j, 1.0).map_err(|e| e.to_string())?,
        readout: j,
        shot_levels: vec![100, 1_000, 10_000, 100_000, 1_000_000],
        seeds: 20,
        base_seed: 107,
    };
    let report = run_sweep(&spec).map_err(|e| e.to_string())?;
    let medians: Vec<String> = report.levels.iter().map(|l| format!("{:.1e}", l.median)).collect();
    check(
        (-0.6..=-0.4).contains(&report.slope),
        format!("slope {:.3}, medians [{}]", report.slope, medians.join(", ")),
    )
}

fn c8_frontend_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let mut worst = [0.0f64; 3];
    let mut record = |k: usize, v: ComplexMatrix, raw: (f64, f64), n: SpherePoint, j: HalfInteger| {
        let exact = matrix_diff(&v, &g_dagger(j, raw.0, raw.1));
        worst[k] = worst[k].max(exact).max(displacement_defect(&v, n));
    };
    for _ in 0..100 {
        let j = h(rng.random_range(1..=10));
        let p = RamseyParams {
            omega0: rng.random_range(-5.0..5.0),
            omega: rng.random_range(-5.0..5.0),
            t_free: rng.random_range(0.0..3.0),
            omega2: rng.random_range(-4.0..4.0),
            t_theta: rng.random_range(0.0..2.0),
            first_pulse_on: false,
        };
        let v = p.physical_unitary(j).map_err(|e| e.to_string())?;
        record(0, v, p.raw_angles().map_err(|e| e.to_string())?, p.displacement().map_err(|e| e.to_string())?, j);

        let p = InterferometerParams {
            transmittance1: rng.random(),
            transmittance2: rng.random(),
            phase1: rng.random_range(-PI..PI),
            phase2: rng.random_range(-PI..PI),
            first_splitter_present: false,
        };
        let v = p.physical_unitary(j).map_err(|e| e.to_string())?;
        record(1, v, p.raw_angles().map_err(|e| e.to_string())?, p.displacement().map_err(|e| e.to_string())?, j);

        let p = IonParams {
            kappa: rng.random_range(100.0..1000.0),
            eta1: rng.random_range(0.01..0.3),
            eta2: rng.random_range(0.01..0.3),
            omega1: rng.random_range(1.0..2.0),
            omega2: rng.random_range(2.5..3.5),
            t_theta: rng.random_range(0.0..1.0),
            t_free: rng.random_range(0.0..10.0),
            raman_phase: FRAC_PI_2,
        };
        let v = p.physical_unitary(j).map_err(|e| e.to_string())?;
        record(2, v, p.raw_angles().map_err(|e| e.to_string())?, p.displacement().map_err(|e| e.to_string())?, j);
    }
    let rejected = matches!(
        RamseyParams { omega0: 1.0, omega: 1.0, t_free: 1.0, omega2: 1.0, t_theta: 1.0, first_pulse_on: true }
            .displacement(),
        Err(Error::Protocol(_))
    );
    check(
        worst.iter().all(|w| *w <= 1e-12) && rejected,
        format!(
            "Ramsey {:.2e}, Mach-Zehnder {:.2e}, ion {:.2e}, first pulse rejected: {rejected}",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn c9_two_mode_blocks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let mut amps = BTreeMap::new();
    for total in 0..=4u32 {
        for n1 in 0..=total {
            amps.insert((n1, total - n1), Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        }
    }
    let norm = amps.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    amps.values_mut().for_each(|c| *c /= norm);
    let state = decompose_two_mode(&amps).map_err(|e| e.to_string())?;
    let grid = build_grid(state.max_j(), 1.0).map_err(|e| e.to_string())?;

    let mut exact_worst = 0.0f64;
    for r in blockwise_reconstruct(&state, &grid, 0, 0).map_err(|e| e.to_string())? {
        match r.outcome {
            BlockOutcome::Reconstructed { metrics, .. } => exact_worst = exact_worst.max(metrics.max_abs_diff),
            BlockOutcome::Unreconstructed { reason } => return Err(reason),
        }
    }
    let mut worst_sigma = 0.0f64;
    for r in blockwise_reconstruct(&state, &grid, 100_000, 9).map_err(|e| e.to_string())? {
        let trials = 100_000.0 * grid.len() as f64;
        let sigma = (r.weight * (1.0 - r.weight) / trials).sqrt();
        worst_sigma = worst_sigma.max((r.estimated_weight - r.weight).abs() / sigma);
    }
    let blocks = state.blocks().len();
    check(
        blocks == 5 && exact_worst <= 1e-9 && worst_sigma <= 3.0,
        format!("{blocks} blocks, exact max_abs_diff {exact_worst:.2e}, worst weight deviation {worst_sigma:.2} sigma"),
    )
}

fn c10_jc_readout() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let times = JcReadoutParams::uniform_times(20.0, 400);
    let mut noiseless = 0.0f64;
    for n_max in 0..=8 {
        let p = JcReadoutParams::new(1.0, 0.02, times.clone(), n_max).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let raw: Vec<f64> = (0..=n_max).map(|_| rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            let pops: Vec<f64> = raw.iter().map(|v| v / total).collect();
            let fit = jc_invert(&jc_signal(&pops, &p).map_err(|e| e.to_string())?, &p).map_err(|e| e.to_string())?;
            for (a, b) in fit.populations.iter().zip(&pops) {
                noiseless = noiseless.max((a - b).abs());
            }
        }
    }
    let p = JcReadoutParams::new(1.0, 0.02, times, 8).map_err(|e| e.to_string())?;
    let raw: Vec<f64> = (0..=8).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let pops: Vec<f64> = raw.iter().map(|v| v / total).collect();
    let signal = jc_signal(&pops, &p).map_err(|e| e.to_string())?;
    let mut errors = Vec::new();
    for seed in 0..20 {
        let noisy = jc_sample(&signal, 10_000, seed, Execution::default()).map_err(|e| e.to_string())?;
        let fit = jc_invert(&noisy, &p).map_err(|e| e.to_string())?;
        errors.push(fit.populations.iter().zip(&pops).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    errors.sort_by(f64::total_cmp);
    let median = 0.5 * (errors[9] + errors[10]);
    check(noiseless <= 1e-6 && median <= 1e-2, format!("noiseless {noiseless:.2e}, noisy median {median:.2e}"))
}

fn c11_phase_uncertainty() -> Outcome {
    let mut shot_noise = 0.0f64;
    for j in 1..=10 {
        let jj = h(2 * j);
        let rho = DensityMatrix::pure(&su2_tomography::states::make_dicke(jj, jj).map_err(|e| e.to_string())?);
        let d = phase_uncertainty(&rho, FRAC_PI_2, -FRAC_PI_2, FRAC_PI_2).map_err(|e| e.to_string())?;
        shot_noise = shot_noise.max((d - 1.0 / (2.0 * j as f64).sqrt()).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let mut fd_rel = 0.0f64;
    for two_j in 1..=10 {
        let rho = random::mixed(h(two_j), 2, &mut rng);
        let (t1, t2, phi) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI), rng.random_range(-PI..PI));
        let m = phase_uncertainty_moments(&rho, t1, t2, phi);
        let step = 1e-5;
        let fd = (phase_uncertainty_moments(&rho, t1, t2, phi + step).mean
            - phase_uncertainty_moments(&rho, t1, t2, phi - step).mean)
            / (2.0 * step);
        fd_rel = fd_rel.max((m.derivative - fd).abs() / m.derivative.abs());
    }
    check(
        shot_noise <= 1e-10 && fd_rel <= 1e-6,
        format!("shot-noise deviation {shot_noise:.2e}, derivative vs finite difference {fd_rel:.2e} relative"),
    )
}

type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "convention lock", 5, c1_convention_lock),
        (2, "exact tomography round trip", 30, c2_exact_round_trip),
        (3, "Husimi identity and antipode law", 5, c3_husimi_and_antipode),
        (4, "kernel vs multipole route", 10, c4_kernel_vs_multipole),
        (5, "Wigner normalization, overlap, Glauber reassembly", 10, c5_normalization_overlap_glauber),
        (6, "resolution of identity", 5, c6_resolution_of_identity),
        (7, "shot-noise scaling", 180, c7_shot_noise_scaling),
        (8, "frontend equivalence", 10, c8_frontend_equivalence),
        (9, "two-mode block reconstruction", 60, c9_two_mode_blocks),
        (10, "Jaynes-Cummings readout inversion", 30, c10_jc_readout),
        (11, "phase uncertainty", 5, c11_phase_uncertainty),
    ];
    let mut failures = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (status, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over time budget")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("criterion {id:>2} {status} {name}: {detail} [{:.2}s / {budget}s]", elapsed.as_secs_f64());
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
