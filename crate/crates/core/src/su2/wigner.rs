use num_complex::Complex64;

use super::factorial::ln_binomial;
use crate::halfint::HalfInteger;
use crate::linalg::ComplexMatrix;
use crate::sphere::SpherePoint;

/// Jacobi polynomial `P_n^{(a,b)}(x)` by the standard three-term recurrence.
fn jacobi(n: i64, a: i64, b: i64, x: f64) -> f64 {
    let (af, bf) = (a as f64, b as f64);
    let mut p0 = 1.0;
    if n == 0 {
        return p0;
    }
    let mut p1 = (af + 1.0) + (af + bf + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let kf = k as f64;
        let c = 2.0 * kf + af + bf;
        let a1 = 2.0 * kf * (kf + af + bf) * (c - 2.0);
        let a2 = (c - 1.0) * (af * af - bf * bf);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (kf + af - 1.0) * (kf + bf - 1.0) * c;
        let p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Single element `d^j_{m'm}(β) = ⟨j,m'| exp(-iβJ_y) |j,m⟩`.
///
/// Evaluated through the Jacobi-polynomial form, which avoids the
/// alternating sum of the explicit Wigner formula and stays accurate for
/// large `j`.
pub fn wigner_d_element(j: HalfInteger, mp: HalfInteger, m: HalfInteger, beta: f64) -> f64 {
    let tj = i64::from(j.twice());
    let tmp = i64::from(mp.twice());
    let tm = i64::from(m.twice());
    let jpm = (tj + tm) / 2;
    let jmm = (tj - tm) / 2;
    let jpmp = (tj + tmp) / 2;
    let jmmp = (tj - tmp) / 2;
    let k = jpm.min(jmm).min(jpmp).min(jmmp);
    let dm = (tmp - tm) / 2;
    let (a, lambda) = if k == jpm {
        (dm, dm)
    } else if k == jmm || k == jpmp {
        (-dm, 0)
    } else {
        (dm, dm)
    };
    let b = tj - 2 * k - a;
    let ln_norm = 0.5 * (ln_binomial(tj - k, k + a) - ln_binomial(k + b, b));
    let (s, c) = (beta / 2.0).sin_cos();
    let sign = if lambda.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * ln_norm.exp() * s.powi(a as i32) * c.powi(b as i32) * jacobi(k, a, b, beta.cos())
}

/// The real orthogonal matrix `d^j(β)`.
pub fn wigner_d(j: HalfInteger, beta: f64) -> ComplexMatrix {
    let n = j.dim();
    ComplexMatrix::from_fn(n, n, |r, c| {
        Complex64::new(wigner_d_element(j, j.projection_at(r), j.projection_at(c), beta), 0.0)
    })
}

/// `g(n) = exp(-iφJ_z) exp(-iθJ_y)`, the displacement taking `|j,j⟩` to the
/// coherent state `|j;n⟩`.
pub fn rotation_operator(j: HalfInteger, n: SpherePoint) -> ComplexMatrix {
    rotation_operator_angles(j, n.theta(), n.phi())
}

/// [`rotation_operator`] for arbitrary real angles, without canonicalization.
pub fn rotation_operator_angles(j: HalfInteger, theta: f64, phi: f64) -> ComplexMatrix {
    let d = wigner_d(j, theta);
    let n = j.dim();
    ComplexMatrix::from_fn(n, n, |r, c| {
        let mp = j.projection_at(r).value();
        Complex64::from_polar(1.0, -mp * phi) * d[(r, c)]
    })
}

/// Euler-angle element `exp(iαJ_z) exp(iβJ_y) exp(iγJ_z)` (positive-exponent
/// parametrization of the group).
pub fn euler_rotation(j: HalfInteger, alpha: f64, beta: f64, gamma: f64) -> ComplexMatrix {
    let d = wigner_d(j, -beta);
    let n = j.dim();
    ComplexMatrix::from_fn(n, n, |r, c| {
        let mp = j.projection_at(r).value();
        let m = j.projection_at(c).value();
        Complex64::from_polar(1.0, alpha * mp + gamma * m) * d[(r, c)]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, unitarity_defect, unitary_from_hamiltonian};
    use crate::su2::{jy, jz};

    fn h(t: i32) -> HalfInteger {
        HalfInteger::from_twice(t)
    }

    #[test]
    fn identity_at_zero() {
        for tj in 0..=10 {
            let j = h(tj);
            let n = j.dim();
            assert!(max_abs_diff(&wigner_d(j, 0.0), &ComplexMatrix::identity(n, n)) < 1e-15);
        }
    }

    #[test]
    fn spin_half_closed_form() {
        let beta = 0.83;
        let d = wigner_d(h(1), beta);
        let (s, c) = (beta / 2.0).sin_cos();
        let want = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c.into(), (-s).into(), s.into(), c.into()],
        );
        assert!(max_abs_diff(&d, &want) < 1e-15);
    }

    #[test]
    fn highest_weight_element() {
        for tj in 0..=12 {
            let j = h(tj);
            for &beta in &[0.1, 1.3, 2.9, 4.0] {
                let v = wigner_d_element(j, j, j, beta);
                assert!((v - (beta / 2.0).cos().powi(tj)).abs() < 1e-13);
            }
        }
    }

    // Independent oracle: exponentiate the generator by eigendecomposition.
    #[test]
    fn matches_generator_exponential() {
        for tj in 0..=20 {
            let j = h(tj);
            for &beta in &[0.37, 1.9, -2.4, 5.1] {
                let want = unitary_from_hamiltonian(&jy(j), beta);
                let got = wigner_d(j, beta);
                assert!(max_abs_diff(&got, &want) < 1e-11, "j={j} beta={beta}: {}", max_abs_diff(&got, &want));
            }
        }
    }

    #[test]
    fn euler_rotation_matches_exponentials() {
        let j = h(3);
        let (a, b, g) = (0.4, 1.1, -0.7);
        let want = unitary_from_hamiltonian(&jz(j), -a)
            * unitary_from_hamiltonian(&jy(j), -b)
            * unitary_from_hamiltonian(&jz(j), -g);
        assert!(max_abs_diff(&euler_rotation(j, a, b, g), &want) < 1e-13);
    }

    #[test]
    fn rotation_is_unitary() {
        let j = h(9);
        let u = rotation_operator_angles(j, 1.2, 4.4);
        assert!(unitarity_defect(&u) < 1e-13);
    }
}
