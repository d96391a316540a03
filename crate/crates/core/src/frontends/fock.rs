use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::linalg::ComplexMatrix;
use crate::su2::ln_factorial;

/// `|n₁⟩|n₂⟩ = |j, μ⟩` with `j = (n₁+n₂)/2`, `μ = (n₁-n₂)/2`.
pub fn fock_to_su2(n1: u32, n2: u32) -> (HalfInteger, HalfInteger) {
    (HalfInteger::from_twice((n1 + n2) as i32), HalfInteger::from_twice(n1 as i32 - n2 as i32))
}

pub fn su2_to_fock(j: HalfInteger, mu: HalfInteger) -> Result<(u32, u32)> {
    j.check_projection(mu)?;
    Ok((((j.twice() + mu.twice()) / 2) as u32, ((j.twice() - mu.twice()) / 2) as u32))
}

/// Action on the `N = 2j` photon subspace of the linear two-mode map
/// `a_k → Σ_i S_ik a_i` (Heisenberg picture `b = S a`), in the `|j, μ⟩`
/// basis. Creation operators transform as `a_k† → Σ_i S_ik a_i†`, so
/// `|n₁, n₂⟩` is mapped to the expanded polynomial
/// `(S₁₁a₁† + S₂₁a₂†)^{n₁} (S₁₂a₁† + S₂₂a₂†)^{n₂} |0⟩ / sqrt(n₁! n₂!)`.
pub fn fock_mode_unitary(j: HalfInteger, s: [[Complex64; 2]; 2]) -> Result<ComplexMatrix> {
    j.check_label()?;
    let total = j.twice() as usize;
    let dim = total + 1;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let (n1, n2) = (total - col, col);
        // poly[p] is the coefficient of (a₁†)^p (a₂†)^(deg - p)
        let mut poly = vec![Complex64::new(1.0, 0.0)];
        let factors = std::iter::repeat_n((s[0][0], s[1][0]), n1).chain(std::iter::repeat_n((s[0][1], s[1][1]), n2));
        for (x, y) in factors {
            let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
            for (p, c) in poly.iter().enumerate() {
                next[p + 1] += x * c;
                next[p] += y * c;
            }
            poly = next;
        }
        let ln_in = ln_factorial(n1 as i64) + ln_factorial(n2 as i64);
        for (p, c) in poly.iter().enumerate() {
            let ln_out = ln_factorial(p as i64) + ln_factorial((total - p) as i64);
            out[(total - p, col)] = c * (0.5 * (ln_out - ln_in)).exp();
        }
    }
    Ok(out)
}

pub(crate) fn check_photon_label(j: HalfInteger) -> Result<()> {
    j.check_label()?;
    if j.twice() > 400 {
        return Err(Error::domain(format!("photon number {} too large", j.twice())));
    }
    Ok(())
}
