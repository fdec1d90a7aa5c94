use super::{pdf, sf};
use crate::error::{Error, Result};

/// Upper tail P(X > x) of a chi-squared variable with integer degrees of
/// freedom, by the closed-form finite series (normal tail for odd df,
/// Poisson sum for even df).
pub fn chi_squared_sf(x: f64, df: u32) -> Result<f64> {
    if df == 0 {
        return Err(Error::domain("chi-squared needs at least one degree of freedom"));
    }
    if x.is_nan() {
        return Err(Error::domain("chi-squared statistic is NaN"));
    }
    if x <= 0.0 {
        return Ok(1.0);
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    let p = if df.is_multiple_of(2) {
        let half = 0.5 * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..df / 2 {
            term *= half / k as f64;
            sum += term;
        }
        (-half).exp() * sum
    } else {
        let root = x.sqrt();
        let mut term = root;
        let mut sum = 0.0;
        for k in 1..=(df - 1) / 2 {
            if k > 1 {
                term *= x / (2 * k - 1) as f64;
            }
            sum += term;
        }
        2.0 * sf(root) + 2.0 * pdf(root) * sum
    };
    Ok(p.clamp(0.0, 1.0))
}
