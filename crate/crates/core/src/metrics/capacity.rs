use crate::error::Result;
use crate::model::{build_mixture, GammaMixture, IftrParams};
use crate::specfun::scaled_upper_gamma_neg_int;
use std::f64::consts::LN_2;

/// Ergodic capacity E[log₂(1 + γ)] in bits/s/Hz from `terms` mixture weights.
pub fn avg_capacity(p: &IftrParams, terms: usize) -> Result<f64> {
    capacity_from_mixture(&build_mixture(p, terms)?)
}

/// Σ_j A_j Σ_{k≤j} x^k e^x Γ(−k, x) / ln 2 with x = 1/scale.
///
/// Each inner term is evaluated as the bounded product e^x E_{k+1}(x), so
/// neither e^x nor Γ(−k, x) is formed on its own.
pub fn capacity_from_mixture(mix: &GammaMixture) -> Result<f64> {
    let x = 1.0 / mix.scale();
    let mut inner = 0.0;
    let mut total = 0.0;
    for (k, &a) in mix.weights().iter().enumerate() {
        inner += scaled_upper_gamma_neg_int(k as u32, x)?;
        total += a * inner;
    }
    Ok(total / LN_2)
}
