//! Nakagami-m metrics written as functions of (mean SNR, m), for use with
//! [`GammaMixture::nakagami_transfer`](crate::model::GammaMixture::nakagami_transfer).

use super::ber::ModulationSpec;
use crate::error::{Error, Result};
use crate::specfun::{reg_lower_gamma, scaled_upper_gamma_neg_int};
use std::f64::consts::LN_2;

fn integer_m(func: &'static str, m: f64) -> Result<u32> {
    if m >= 1.0 && m.fract() == 0.0 && m <= u32::MAX as f64 {
        Ok(m as u32)
    } else {
        Err(Error::domain(func, format!("m = {m} must be a positive integer")))
    }
}

/// Ergodic capacity e^{m/γ̄} Σ_{k<m} (m/γ̄)^k Γ(−k, m/γ̄) / ln 2 for integer m.
pub fn capacity(mean: f64, m: f64) -> Result<f64> {
    let mi = integer_m("nakagami::capacity", m)?;
    let x = m / mean;
    let mut sum = 0.0;
    for k in 0..mi {
        sum += scaled_upper_gamma_neg_int(k, x)?;
    }
    Ok(sum / LN_2)
}

/// Average error rate for integer m:
/// Σ_r (α_r/2)[1 − μ_r Σ_{k<m} C(2k,k)((1 − μ_r²)/4)^k], μ_r² = β_rγ̄/(2m + β_rγ̄).
pub fn ber(mean: f64, m: f64, modulation: &ModulationSpec) -> Result<f64> {
    let mi = integer_m("nakagami::ber", m)?;
    let mut total = 0.0;
    for &(alpha, beta) in modulation.terms() {
        let mu2 = beta * mean / (2.0 * m + beta * mean);
        let mu = mu2.sqrt();
        let quarter = (1.0 - mu2) / 4.0;
        let mut central = 1.0f64;
        let mut sum = 0.0;
        for k in 0..mi as u64 {
            sum += central * quarter.powi(k as i32);
            central *= (2 * (2 * k + 1)) as f64 / (k + 1) as f64;
        }
        total += alpha / 2.0 * (1.0 - mu * sum);
    }
    Ok(total)
}

/// P(γ < γ_th) = P(m, m γ_th/γ̄) for any m > 0.
pub fn outage(mean: f64, m: f64, gamma_th: f64) -> Result<f64> {
    reg_lower_gamma(m, m * gamma_th / mean)
}
