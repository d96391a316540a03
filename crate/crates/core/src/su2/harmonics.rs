use std::f64::consts::PI;

use num_complex::Complex64;

use super::tensor::lm_index;
use crate::error::{Error, Result};
use crate::sphere::SpherePoint;

/// All `Y_lm(n)` for `l ≤ lmax`, stored in `(l, m) -> l*l + l + m` order.
///
/// Orthonormal on the sphere with the Condon-Shortley phase. Built from the
/// fully normalized associated Legendre recurrence in `l` at fixed `m`.
#[derive(Clone, Debug)]
pub struct SphericalHarmonics {
    lmax: u32,
    values: Vec<Complex64>,
}

impl SphericalHarmonics {
    pub fn new(lmax: u32, n: SpherePoint) -> Self {
        let size = ((lmax + 1) * (lmax + 1)) as usize;
        let mut values = vec![Complex64::new(0.0, 0.0); size];
        let (s, x) = n.theta().sin_cos();
        let lm = lmax as usize;

        let mut pmm = (1.0 / (4.0 * PI)).sqrt();
        for m in 0..=lm {
            if m > 0 {
                let mf = m as f64;
                pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
            }
            let phase = Complex64::from_polar(1.0, m as f64 * n.phi());
            let mut store = |l: usize, p: f64| {
                let y = phase * p;
                values[lm_index(l as u32, m as i32)] = y;
                if m > 0 {
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    values[lm_index(l as u32, -(m as i32))] = y.conj() * sign;
                }
            };
            store(m, pmm);
            if m == lm {
                break;
            }
            let mf = m as f64;
            let mut p_prev = pmm;
            let mut p_cur = x * (2.0 * mf + 3.0).sqrt() * pmm;
            store(m + 1, p_cur);
            for l in (m + 2)..=lm {
                let lf = l as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
                let p_next = a * (x * p_cur - b * p_prev);
                p_prev = p_cur;
                p_cur = p_next;
                store(l, p_cur);
            }
        }
        SphericalHarmonics { lmax, values }
    }

    pub fn lmax(&self) -> u32 {
        self.lmax
    }

    pub fn get(&self, l: u32, m: i32) -> Complex64 {
        assert!(l <= self.lmax && m.unsigned_abs() <= l);
        self.values[lm_index(l, m)]
    }
}

/// Single spherical harmonic `Y_lm(n)`.
pub fn spherical_harmonic(l: u32, m: i32, n: SpherePoint) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return Err(Error::domain(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    Ok(SphericalHarmonics::new(l, n).get(l, m))
}

/// Legendre polynomial `P_l(x)` by Bonnet's recurrence.
pub fn legendre_p(l: u32, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("Legendre argument {x} outside [-1, 1]")));
    }
    Ok(*legendre_series(l, x).last().expect("non-empty"))
}

/// `[P_0(x), …, P_lmax(x)]`; the caller guarantees `|x| ≤ 1`.
pub fn legendre_series(lmax: u32, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(lmax as usize + 1);
    out.push(1.0);
    if lmax >= 1 {
        out.push(x);
    }
    for n in 1..lmax as usize {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0) * x * out[n] - nf * out[n - 1]) / (nf + 1.0);
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(t: f64, p: f64) -> SpherePoint {
        SpherePoint::new(t, p).unwrap()
    }

    #[test]
    fn low_order_closed_forms() {
        let y00 = spherical_harmonic(0, 0, pt(1.0, 2.0)).unwrap();
        assert!((y00.re - 0.28209479177387814).abs() < 1e-15 && y00.im == 0.0);
        let y10 = spherical_harmonic(1, 0, pt(0.0, 0.0)).unwrap();
        assert!((y10.re - 0.4886025119029199).abs() < 1e-15);
        let y11 = spherical_harmonic(1, 1, pt(PI / 2.0, 0.0)).unwrap();
        assert!((y11.re + 0.3454941494713355).abs() < 1e-15);
        // Y_2,-1 = sqrt(15/8pi) sin cos e^{-i phi}
        let (t, p) = (0.7, 1.9);
        let y = spherical_harmonic(2, -1, pt(t, p)).unwrap();
        let want = Complex64::from_polar((15.0 / (8.0 * PI)).sqrt() * t.sin() * t.cos(), -p);
        assert!((y - want).norm() < 1e-14);
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre_p(0, 0.3).unwrap(), 1.0);
        assert_eq!(legendre_p(1, 0.3).unwrap(), 0.3);
        assert!((legendre_p(2, 0.5).unwrap() + 0.125).abs() < 1e-15);
        assert!((legendre_p(5, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(legendre_p(2, 1.0 + 1e-9).is_err());
    }

    #[test]
    fn invalid_m_errors() {
        assert!(spherical_harmonic(1, 2, pt(0.1, 0.1)).is_err());
    }
}
