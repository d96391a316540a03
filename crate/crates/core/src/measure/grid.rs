use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::sphere::SpherePoint;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-10;
const NODE_MATCH_TOLERANCE: f64 = 1e-12;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes in descending
/// order (so that `θ = acos x` ascends).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shape of a Gauss-Legendre (in `cos θ`) × equispaced (in `φ`) product grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductLayout {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl ProductLayout {
    /// Highest spherical-harmonic degree integrated exactly.
    pub fn exactness_degree(self) -> u32 {
        let gl = 2 * self.n_theta as u32 - 1;
        let trap = self.n_phi as u32 - 1;
        gl.min(trap)
    }
}

/// Quadrature nodes and steradian weights on the unit sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    points: Vec<SpherePoint>,
    weights: Vec<f64>,
    layout: Option<ProductLayout>,
}

impl SphereGrid {
    /// Product rule with `n_theta` Gauss-Legendre nodes in `cos θ` and
    /// `n_phi` equispaced azimuths starting at `φ = 0`. Points are ordered
    /// θ-major.
    pub fn product(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::domain("product grid needs at least one node per axis"));
        }
        let (xs, ws) = gauss_legendre(n_theta);
        let dphi = TAU / n_phi as f64;
        let mut points = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (x, w) in xs.iter().zip(&ws) {
            let theta = x.clamp(-1.0, 1.0).acos();
            for k in 0..n_phi {
                points.push(SpherePoint::new(theta, k as f64 * dphi)?);
                weights.push(w * dphi);
            }
        }
        Ok(SphereGrid { points, weights, layout: Some(ProductLayout { n_theta, n_phi }) })
    }

    /// Arbitrary nodes and weights. The product layout is recognized when the
    /// nodes coincide with [`SphereGrid::product`] output, which is how grids
    /// read back from CSV regain their exactness guarantee.
    pub fn from_nodes(points: Vec<SpherePoint>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::domain("grid needs matching, non-empty point and weight arrays"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::domain(format!("grid weight {w} must be positive")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 4.0 * PI).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::domain(format!("grid weights sum to {total}, expected 4pi")));
        }
        let layout = detect_layout(&points, &weights);
        Ok(SphereGrid { points, weights, layout })
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn layout(&self) -> Option<ProductLayout> {
        self.layout
    }

    /// Degree through which products of spherical harmonics are integrated
    /// exactly, or `None` for grids without a recognized product layout.
    pub fn exactness_degree(&self) -> Option<u32> {
        self.layout.map(ProductLayout::exactness_degree)
    }

    pub fn require_degree(&self, needed: u32) -> Result<()> {
        match self.exactness_degree() {
            Some(d) if d >= needed => Ok(()),
            available => Err(Error::GridTooCoarse { needed, available }),
        }
    }

    /// `Σ w_i f(n_i)` in point order.
    pub fn integrate(&self, f: impl Fn(SpherePoint) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(*p)).sum()
    }
}

fn detect_layout(points: &[SpherePoint], weights: &[f64]) -> Option<ProductLayout> {
    let first = points[0].theta();
    let n_phi = points.iter().take_while(|p| (p.theta() - first).abs() < NODE_MATCH_TOLERANCE).count();
    if !points.len().is_multiple_of(n_phi) {
        return None;
    }
    let reference = SphereGrid::product(points.len() / n_phi, n_phi).ok()?;
    let close = |a: f64, b: f64| (a - b).abs() <= NODE_MATCH_TOLERANCE * (1.0 + b.abs());
    let same = reference.points.iter().zip(points).all(|(r, p)| close(p.theta(), r.theta()) && close(p.phi(), r.phi()))
        && reference.weights.iter().zip(weights).all(|(r, w)| close(*w, *r));
    same.then_some(reference.layout?)
}

/// Minimal exact grid for `H_j`, optionally oversampled:
/// `ceil(s·(2j+1))` polar × `ceil(s·(4j+1))` azimuthal nodes. With `s = 1`
/// the rule is exact through degree `4j`, the band limit of
/// `p_μ(n) Y*_lm(n)`.
pub fn build_grid(j: HalfInteger, oversample: f64) -> Result<SphereGrid> {
    j.check_label()?;
    if !(oversample >= 1.0 && oversample.is_finite()) {
        return Err(Error::domain(format!("oversample = {oversample} must be a finite value >= 1")));
    }
    let tj = j.twice() as f64;
    let n_theta = (oversample * (tj + 1.0) - 1e-9).ceil().max(1.0) as usize;
    let n_phi = (oversample * (2.0 * tj + 1.0) - 1e-9).ceil().max(1.0) as usize;
    SphereGrid::product(n_theta, n_phi)
}
