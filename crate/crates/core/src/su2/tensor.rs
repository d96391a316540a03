use num_complex::Complex64;

use super::clebsch::clebsch_gordan;
use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::linalg::ComplexMatrix;

/// Fano multipole operator `D_lm` on `H_j`, with matrix element
/// `⟨j,q| D_lm |j,k⟩ = sqrt((2l+1)/(2j+1)) ⟨j,k; l,m | j,q⟩`.
pub fn tensor_operator(j: HalfInteger, l: u32, m: i32) -> Result<ComplexMatrix> {
    j.check_label()?;
    if i64::from(l) > i64::from(j.twice()) {
        return Err(Error::domain(format!("multipole order l = {l} exceeds 2j = {}", j.twice())));
    }
    if m.unsigned_abs() > l {
        return Err(Error::domain(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    let n = j.dim();
    let scale = ((2 * l + 1) as f64 / n as f64).sqrt();
    let lh = HalfInteger::from_int(l as i32);
    let mh = HalfInteger::from_int(m);
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let mk = j.projection_at(k);
        let mq = mk + mh;
        if mq.twice().abs() > j.twice() {
            continue;
        }
        let q = j.index_of(mq);
        out[(q, k)] = Complex64::new(scale * clebsch_gordan(j, mk, lh, mh, j, mq)?, 0.0);
    }
    Ok(out)
}

/// All tensor operators of one `H_j`, indexed `(l, m) -> l*l + l + m`.
#[derive(Clone, Debug)]
pub struct TensorBasis {
    j: HalfInteger,
    ops: Vec<ComplexMatrix>,
}

impl TensorBasis {
    pub fn new(j: HalfInteger) -> Result<Self> {
        j.check_label()?;
        let lmax = j.twice() as u32;
        let mut ops = Vec::with_capacity(((lmax + 1) * (lmax + 1)) as usize);
        for l in 0..=lmax {
            for m in -(l as i32)..=(l as i32) {
                ops.push(tensor_operator(j, l, m)?);
            }
        }
        Ok(TensorBasis { j, ops })
    }

    pub fn j(&self) -> HalfInteger {
        self.j
    }

    pub fn max_l(&self) -> u32 {
        self.j.twice() as u32
    }

    pub fn get(&self, l: u32, m: i32) -> &ComplexMatrix {
        &self.ops[lm_index(l, m)]
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, i32, &ComplexMatrix)> {
        (0..=self.max_l())
            .flat_map(|l| (-(l as i32)..=(l as i32)).map(move |m| (l, m)))
            .zip(self.ops.iter())
            .map(|((l, m), op)| (l, m, op))
    }
}

pub(crate) fn lm_index(l: u32, m: i32) -> usize {
    (l * l) as usize + (l as i32 + m) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, trace};

    #[test]
    fn d00_is_scaled_identity() {
        for tj in 0..=8 {
            let j = HalfInteger::from_twice(tj);
            let n = j.dim();
            let want = ComplexMatrix::identity(n, n) / Complex64::new((n as f64).sqrt(), 0.0);
            assert!(max_abs_diff(&tensor_operator(j, 0, 0).unwrap(), &want) < 1e-15);
        }
    }

    #[test]
    fn orthonormal_under_trace() {
        for tj in 0..=6 {
            let basis = TensorBasis::new(HalfInteger::from_twice(tj)).unwrap();
            for (l1, m1, a) in basis.iter() {
                for (l2, m2, b) in basis.iter() {
                    let ip = trace(&(a * b.adjoint()));
                    let want = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
                    assert!((ip - Complex64::new(want, 0.0)).norm() < 1e-12, "j2={tj} ({l1},{m1}) ({l2},{m2})");
                }
            }
        }
    }

    #[test]
    fn selection_rule_q_equals_k_plus_m() {
        let j = HalfInteger::from_twice(5);
        for l in 0..=5u32 {
            for m in -(l as i32)..=(l as i32) {
                let d = tensor_operator(j, l, m).unwrap();
                for q in 0..j.dim() {
                    for k in 0..j.dim() {
                        let mq = j.projection_at(q).twice();
                        let mk = j.projection_at(k).twice();
                        if mq != mk + 2 * m {
                            assert_eq!(d[(q, k)], Complex64::new(0.0, 0.0));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn out_of_range_orders_error() {
        let j = HalfInteger::ONE;
        assert!(tensor_operator(j, 3, 0).is_err());
        assert!(tensor_operator(j, 1, 2).is_err());
    }
}
