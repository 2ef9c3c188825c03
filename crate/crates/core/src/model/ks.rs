//! Kolmogorov–Smirnov distance between a truncated series and a deep reference.

use super::mixture::{build_mixture, GammaMixture};
use super::params::IftrParams;
use crate::error::{Error, Result};

/// Default depth of the reference series.
pub const REFERENCE_TERMS: usize = 400;

/// max_x |F_J(x) − F_ref(x)| over `grid`.
///
/// The truncated series keeps the indices 0..=j_last (j_last + 1 weights);
/// the reference keeps 0..=j_ref.
pub fn ks_truncation(p: &IftrParams, j_last: usize, j_ref: usize, grid: &[f64]) -> Result<f64> {
    if j_last >= j_ref {
        return Err(Error::Argument(format!(
            "reference depth {j_ref} must exceed the truncation index {j_last}"
        )));
    }
    if grid.is_empty() {
        return Err(Error::Argument("KS grid is empty".into()));
    }
    let reference = build_mixture(p, j_ref + 1)?;
    let short = GammaMixture::new(reference.weights()[..=j_last].to_vec(), reference.scale())?;
    Ok(grid
        .iter()
        .map(|&x| (short.cdf(x) - reference.cdf(x)).abs())
        .fold(0.0, f64::max))
}

/// Evenly spaced grid on [0, x_max] where the reference CDF exceeds
/// 0.999 of its total mass at x_max.
pub fn default_grid(p: &IftrParams, j_ref: usize, points: usize) -> Result<Vec<f64>> {
    let reference = build_mixture(p, j_ref + 1)?;
    let target = 0.999 * reference.total_mass();
    let mut x_max = p.gamma_bar();
    while reference.cdf(x_max) <= target {
        x_max *= 1.5;
    }
    let n = points.max(2);
    Ok((0..n).map(|i| x_max * i as f64 / (n - 1) as f64).collect())
}
