//! Angular-momentum generators in the `|j,μ⟩` basis, row 0 being `μ = j`.

use num_complex::Complex64;

use crate::halfint::HalfInteger;
use crate::linalg::{ComplexMatrix, I};

pub fn jz(j: HalfInteger) -> ComplexMatrix {
    let n = j.dim();
    ComplexMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::new(j.projection_at(r).value(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `J_+ |j,m⟩ = sqrt(j(j+1) - m(m+1)) |j,m+1⟩`.
pub fn j_plus(j: HalfInteger) -> ComplexMatrix {
    let n = j.dim();
    let jv = j.value();
    let mut out = ComplexMatrix::zeros(n, n);
    for c in 1..n {
        let m = j.projection_at(c).value();
        out[(c - 1, c)] = Complex64::new((jv * (jv + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    out
}

pub fn j_minus(j: HalfInteger) -> ComplexMatrix {
    j_plus(j).adjoint()
}

pub fn jx(j: HalfInteger) -> ComplexMatrix {
    (j_plus(j) + j_minus(j)).scale(0.5)
}

pub fn jy(j: HalfInteger) -> ComplexMatrix {
    (j_plus(j) - j_minus(j)) / (I * 2.0)
}
