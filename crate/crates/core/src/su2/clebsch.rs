use super::factorial::ln_factorial;
use crate::error::{Error, Result};
use crate::halfint::HalfInteger;

const MAX_TWICE: i32 = 400;

/// `⟨j1,m1; j2,m2 | j,m⟩` in the Condon-Shortley convention, via the Racah
/// single-sum formula with log-factorial accumulation.
///
/// Returns `0` whenever the selection rules (`m = m1 + m2`, triangle
/// inequality, integer `j1 + j2 + j`) fail. Invalid quantum numbers (parity
/// mismatch, `|m| > j`) are a domain error.
pub fn clebsch_gordan(
    j1: HalfInteger,
    m1: HalfInteger,
    j2: HalfInteger,
    m2: HalfInteger,
    j: HalfInteger,
    m: HalfInteger,
) -> Result<f64> {
    j1.check_projection(m1)?;
    j2.check_projection(m2)?;
    j.check_projection(m)?;
    for x in [j1, j2, j] {
        if x.twice() > MAX_TWICE {
            return Err(Error::domain(format!("angular momentum {x} beyond supported range")));
        }
    }
    let (tj1, tm1, tj2, tm2, tj, tm) = (j1.twice(), m1.twice(), j2.twice(), m2.twice(), j.twice(), m.twice());
    if tm != tm1 + tm2 {
        return Ok(0.0);
    }
    if tj < (tj1 - tj2).abs() || tj > tj1 + tj2 || (tj1 + tj2 + tj) % 2 != 0 {
        return Ok(0.0);
    }

    // every bracket below is an integer by the parity checks above
    let half = |x: i32| -> i64 { i64::from(x / 2) };
    let a = half(tj1 + tj2 - tj);
    let b = half(tj1 - tj2 + tj);
    let c = half(-tj1 + tj2 + tj);
    let d = half(tj1 + tj2 + tj) + 1;

    let ln_pref = 0.5
        * (f64::from(tj + 1).ln() + ln_factorial(a) + ln_factorial(b) + ln_factorial(c) - ln_factorial(d)
            + ln_factorial(half(tj1 + tm1))
            + ln_factorial(half(tj1 - tm1))
            + ln_factorial(half(tj2 + tm2))
            + ln_factorial(half(tj2 - tm2))
            + ln_factorial(half(tj + tm))
            + ln_factorial(half(tj - tm)));

    let e1 = half(tj1 - tm1);
    let e2 = half(tj2 + tm2);
    let f1 = half(tj - tj2 + tm1);
    let f2 = half(tj - tj1 - tm2);
    let k_min = 0.max(-f1).max(-f2);
    let k_max = a.min(e1).min(e2);

    let mut sum = 0.0;
    for k in k_min..=k_max {
        let ln_den = ln_factorial(k)
            + ln_factorial(a - k)
            + ln_factorial(e1 - k)
            + ln_factorial(e2 - k)
            + ln_factorial(f1 + k)
            + ln_factorial(f2 + k);
        let term = (ln_pref - ln_den).exp();
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum)
}
