use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A direction `n = (sinθ cosφ, sinθ sinφ, cosθ)` on the unit sphere with
/// `θ ∈ [0, π]` and `φ ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    theta: f64,
    phi: f64,
}

impl SpherePoint {
    pub const NORTH: SpherePoint = SpherePoint { theta: 0.0, phi: 0.0 };

    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::domain("sphere angles must be finite"));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::domain(format!("theta = {theta} outside [0, pi]")));
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::domain(format!("phi = {phi} outside [0, 2pi)")));
        }
        Ok(SpherePoint { theta, phi })
    }

    /// Maps arbitrary real angles to the canonical pair describing the same
    /// unit vector. A negative polar angle flips to `(-θ, φ+π)`; polar angles
    /// beyond `π` are folded through the south pole. At the poles the wrapped
    /// azimuth is kept so that the rotation `g(n)` stays continuous.
    pub fn canonical(theta: f64, phi: f64) -> Self {
        let mut t = theta.rem_euclid(TAU);
        let mut p = phi;
        if t > PI {
            t = TAU - t;
            p += PI;
        }
        SpherePoint { theta: t, phi: wrap_azimuth(p) }
    }

    pub fn from_unit_vector(v: [f64; 3]) -> Self {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let z = (v[2] / norm).clamp(-1.0, 1.0);
        let theta = z.acos();
        let phi = if v[0] == 0.0 && v[1] == 0.0 { 0.0 } else { wrap_azimuth(v[1].atan2(v[0])) };
        SpherePoint { theta, phi }
    }

    pub fn theta(self) -> f64 {
        self.theta
    }

    pub fn phi(self) -> f64 {
        self.phi
    }

    pub fn unit_vector(self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn dot(self, other: SpherePoint) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0)
    }

    /// The antipodal point `-n`, i.e. `(π-θ, φ+π mod 2π)`.
    pub fn antipode(self) -> Self {
        SpherePoint { theta: PI - self.theta, phi: wrap_azimuth(self.phi + PI) }
    }
}

fn wrap_azimuth(phi: f64) -> f64 {
    let p = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if p >= TAU {
        0.0
    } else {
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn same_vector(a: SpherePoint, b: [f64; 3]) -> bool {
        let v = a.unit_vector();
        (0..3).all(|k| (v[k] - b[k]).abs() < 1e-14)
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(SpherePoint::new(-0.1, 0.0).is_err());
        assert!(SpherePoint::new(0.0, TAU).is_err());
        assert!(SpherePoint::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn canonical_preserves_unit_vector() {
        for &(t, p) in &[(-0.4, 1.0), (4.0, -2.0), (7.5, 13.0), (-PI / 2.0, -PI / 3.0), (0.3, 0.2)] {
            let raw = [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
            let c = SpherePoint::canonical(t, p);
            assert!((0.0..=PI).contains(&c.theta()) && (0.0..TAU).contains(&c.phi()));
            assert!(same_vector(c, raw), "{t} {p} -> {c:?}");
        }
    }

    #[test]
    fn antipode_negates_vector() {
        let n = SpherePoint::new(0.7, 5.9).unwrap();
        let v = n.unit_vector();
        assert!(same_vector(n.antipode(), [-v[0], -v[1], -v[2]]));
        assert!((n.dot(n.antipode()) + 1.0).abs() < 1e-14);
    }
}
