use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;

use super::{check_s, checked_denominators, order_weights, MultipoleCoefficients};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::halfint::HalfInteger;
use crate::linalg::{self, ComplexMatrix};
use crate::measure::io::{fmt_f64, parse_field, read_table, write_metadata};
use crate::measure::{ProbabilityGrid, SphereGrid};
use crate::sphere::SpherePoint;
use crate::states::{make_coherent, DensityMatrix, Operator};
use crate::su2::{legendre_series, SphericalHarmonics};

/// Imaginary parts above this mark the coefficients as inconsistent.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// Values of `P(n; s)` on a grid, `s ∈ {-1, 0, 1}` for the Husimi, Wigner
/// and Glauber-Sudarshan functions.
#[derive(Clone, Debug, PartialEq)]
pub struct QpdGrid {
    grid: SphereGrid,
    j: HalfInteger,
    s: f64,
    values: Vec<f64>,
}

impl QpdGrid {
    pub fn new(grid: SphereGrid, j: HalfInteger, s: f64, values: Vec<f64>) -> Result<Self> {
        j.check_label()?;
        check_s(s)?;
        if values.len() != grid.len() {
            return Err(Error::domain(format!("{} values for a grid of {} points", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("quasiprobability values must be finite"));
        }
        Ok(QpdGrid { grid, j, s, values })
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn j(&self) -> HalfInteger {
        self.j
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(2j+1)/4π · Σ w_i P(n_i)`, equal to `Tr ρ` for band-limited data on
    /// an exact grid.
    pub fn normalization(&self) -> f64 {
        let sum: f64 = self.values.iter().zip(self.grid.weights()).map(|(v, w)| v * w).sum();
        self.j.dim() as f64 / (4.0 * PI) * sum
    }
}

pub fn qpd_from_multipoles(r: &MultipoleCoefficients, s: f64, grid: &SphereGrid) -> Result<QpdGrid> {
    qpd_from_multipoles_with(r, s, grid, Execution::default())
}

/// `P(n; s) = Σ sqrt(4π/(2j+1)) ⟨j,j;l,0|j,j⟩^{-s} R_lm Y_lm(n)`.
pub fn qpd_from_multipoles_with(r: &MultipoleCoefficients, s: f64, grid: &SphereGrid, exec: Execution) -> Result<QpdGrid> {
    let j = r.j();
    let weights = order_weights(j, s)?;
    let scale = (4.0 * PI / j.dim() as f64).sqrt();
    let lmax = r.max_l();
    let complex = exec.map_slice(grid.points(), |n| {
        let y = SphericalHarmonics::new(lmax, *n);
        r.iter().map(|(l, m, v)| v * y.get(l, m) * (scale * weights[l as usize])).sum::<Complex64>()
    });
    let residue = complex.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residue > IMAGINARY_TOLERANCE {
        return Err(Error::InconsistentCoefficients { residue, tolerance: IMAGINARY_TOLERANCE });
    }
    QpdGrid::new(grid.clone(), j, s, complex.iter().map(|z| z.re).collect())
}

pub fn qpd_from_probabilities(p: &ProbabilityGrid, s: f64, out_grid: &SphereGrid) -> Result<QpdGrid> {
    qpd_from_probabilities_with(p, s, out_grid, Execution::default())
}

/// Kernel route: `P(n; s) = (2j+1)/4π · Σ_i w_i K(n, n_i) p(n_i)` with
/// `K(n, n') = Σ_l (2l+1)/(2j+1) · ⟨j,j;l,0|j,j⟩^{-s} / ⟨j,μ;l,0|j,μ⟩ · P_l(n·n')`.
///
/// The input grid must be exact through degree `4j`.
pub fn qpd_from_probabilities_with(
    p: &ProbabilityGrid,
    s: f64,
    out_grid: &SphereGrid,
    exec: Execution,
) -> Result<QpdGrid> {
    let j = p.j();
    let denominators = checked_denominators(j, p.mu())?;
    let orders = order_weights(j, s)?;
    p.grid().require_degree(2 * j.twice() as u32)?;
    let lmax = j.twice() as u32;
    let coeff: Vec<f64> = (0..=lmax as usize)
        .map(|l| (2 * l + 1) as f64 / (4.0 * PI) * orders[l] / denominators[l])
        .collect();
    let source: Vec<(SpherePoint, f64)> =
        p.grid().points().iter().zip(p.grid().weights()).zip(p.values()).map(|((n, w), v)| (*n, w * v)).collect();
    let values = exec.map_slice(out_grid.points(), |n| {
        let mut acc = 0.0;
        for (m, wp) in &source {
            let legendre = legendre_series(lmax, n.dot(*m));
            let k: f64 = coeff.iter().zip(&legendre).map(|(c, pl)| c * pl).sum();
            acc += k * wp;
        }
        acc
    });
    QpdGrid::new(out_grid.clone(), j, s, values)
}

/// Husimi function `⟨j;n|ρ|j;n⟩`.
pub fn q_function<O: Operator + ?Sized>(rho: &O, n: SpherePoint) -> f64 {
    let psi = make_coherent(rho.j(), n).expect("operator carries a valid label").to_column();
    (psi.adjoint() * rho.matrix() * &psi)[(0, 0)].re
}

/// Reassembles `ρ' = (2j+1)/4π Σ_i w_i P(n_i) |j;n_i⟩⟨j;n_i|` from an `s = 1`
/// grid and returns `max |ρ' - ρ|`.
pub fn glauber_p_check(rho: &DensityMatrix, p: &QpdGrid) -> Result<f64> {
    if p.s() != 1.0 {
        return Err(Error::domain(format!("Glauber-Sudarshan check needs s = 1, got s = {}", p.s())));
    }
    if p.j() != rho.j() {
        return Err(Error::domain(format!("grid is for j = {}, state for j = {}", p.j(), rho.j())));
    }
    let j = rho.j();
    p.grid().require_degree(2 * j.twice() as u32)?;
    let n = j.dim();
    let mut assembled = ComplexMatrix::zeros(n, n);
    for ((point, w), v) in p.grid().points().iter().zip(p.grid().weights()).zip(p.values()) {
        let proj = make_coherent(j, *point)?.projector();
        assembled += proj * Complex64::new(w * v, 0.0);
    }
    assembled *= Complex64::new(n as f64 / (4.0 * PI), 0.0);
    Ok(linalg::max_abs_diff(&assembled, rho.matrix()))
}

pub fn write_qpd_csv<W: Write>(q: &QpdGrid, mut w: W) -> Result<()> {
    write_metadata(&mut w, &[("two_j", q.j.twice().to_string()), ("s", format!("{}", q.s))])?;
    let mut out = csv::Writer::from_writer(&mut w);
    out.write_record(["theta", "phi", "weight", "value"])?;
    for ((p, wt), v) in q.grid.points().iter().zip(q.grid.weights()).zip(&q.values) {
        out.write_record([fmt_f64(p.theta()), fmt_f64(p.phi()), fmt_f64(*wt), fmt_f64(*v)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_qpd_csv<R: Read>(r: R) -> Result<QpdGrid> {
    let table = read_table(r)?;
    let meta = |key: &str| -> Result<&String> {
        table.metadata.get(key).ok_or_else(|| Error::Parse { line: 1, message: format!("missing metadata {key}") })
    };
    let two_j: i32 = parse_field(1, "two_j", meta("two_j")?)?;
    let s: f64 = parse_field(1, "s", meta("s")?)?;
    if table.header != ["theta", "phi", "weight", "value"] {
        return Err(Error::Parse { line: 2, message: format!("unexpected header {:?}", table.header) });
    }
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut values = Vec::new();
    for (line, row) in &table.rows {
        let theta = parse_field(*line, "theta", &row[0])?;
        let phi = parse_field(*line, "phi", &row[1])?;
        points.push(SpherePoint::new(theta, phi).map_err(|e| Error::Parse { line: *line, message: e.to_string() })?);
        weights.push(parse_field(*line, "weight", &row[2])?);
        values.push(parse_field(*line, "value", &row[3])?);
    }
    QpdGrid::new(SphereGrid::from_nodes(points, weights)?, HalfInteger::from_twice(two_j), s, values)
}
