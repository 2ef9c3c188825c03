use super::coefficients::coefficients;
use super::params::IftrParams;
use crate::error::{Error, Result};
use crate::specfun::log_gamma;
use crate::specfun::quadrature::{integrate, integrate_to_infinity};
use serde::Serialize;

/// Truncated Gamma-mixture representation of the IFTR SNR distribution.
///
/// Weight `weights[j]` multiplies the Gamma law with shape j + 1 and the
/// common `scale` γ̄/(1 + K).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaMixture {
    weights: Vec<f64>,
    scale: f64,
    residual_mass: f64,
}

/// Weights below this are rounding noise around zero.
const NEGATIVE_WEIGHT_LIMIT: f64 = -1e-9;

/// Build the mixture with `terms` weights A_0 … A_{terms−1}.
pub fn build_mixture(p: &IftrParams, terms: usize) -> Result<GammaMixture> {
    let weights = coefficients(p, terms)?;
    GammaMixture::new(weights, p.scale())
}

/// A metric h(γ) averaged over a ≤ γ ≤ b.
pub struct MetricKernel<'a> {
    pub a: f64,
    pub b: f64,
    pub h: &'a dyn Fn(f64) -> f64,
}

impl GammaMixture {
    pub fn new(weights: Vec<f64>, scale: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Argument("mixture needs at least one weight".into()));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "scale",
                value: scale,
                constraint: "0 < scale < inf",
            });
        }
        if let Some((j, &w)) = weights
            .iter()
            .enumerate()
            .find(|(_, &w)| !(w >= NEGATIVE_WEIGHT_LIMIT))
        {
            return Err(Error::Consistency(format!("weight A_{j} = {w} is negative")));
        }
        let weights: Vec<f64> = weights.into_iter().map(|w| w.max(0.0)).collect();
        let total: f64 = weights.iter().sum();
        Ok(GammaMixture {
            weights,
            scale,
            residual_mass: (1.0 - total).max(0.0),
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn terms(&self) -> usize {
        self.weights.len()
    }

    /// 1 − Σ A_j, clamped at zero.
    pub fn residual_mass(&self) -> f64 {
        self.residual_mass
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// The same weights at another scale (weights do not depend on γ̄).
    pub fn rescaled(&self, scale: f64) -> Result<Self> {
        GammaMixture::new(self.weights.clone(), scale)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !(x >= 0.0) {
            return 0.0;
        }
        let y = x / self.scale;
        if y == 0.0 {
            return self.weights[0] / self.scale;
        }
        // Σ A_j y^j e^{−y}/j!, walking out from the Poisson mode
        let n = self.weights.len();
        let ln_y = y.ln();
        let start = (y.floor() as usize).min(n - 1);
        let ln_t = -y + start as f64 * ln_y - ln_factorial(start);
        let t0 = ln_t.exp();
        let mut acc = self.weights[start] * t0;
        let mut t = t0;
        for j in (0..start).rev() {
            t *= (j + 1) as f64 / y;
            acc += self.weights[j] * t;
            if t < 1e-300 || (acc > 0.0 && t < 1e-18 * acc) {
                break;
            }
        }
        let mut t = t0;
        for j in start + 1..n {
            t *= y / j as f64;
            acc += self.weights[j] * t;
            if t < 1e-300 || (acc > 0.0 && t < 1e-18 * acc) {
                break;
            }
        }
        acc / self.scale
    }

    /// Σ A_j P(j + 1, x/scale), summed as Σ_{i≥1} Poisson(i; y) · Σ_{j<min(i,J)} A_j
    /// so every term is positive.
    pub fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        if x.is_infinite() {
            return self.total_mass();
        }
        let y = x / self.scale;
        if self.weights[1..].iter().all(|&w| w == 0.0) {
            return -self.weights[0] * (-y).exp_m1();
        }
        let n = self.weights.len();
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(0.0);
        let mut s = 0.0;
        for &w in &self.weights {
            s += w;
            prefix.push(s);
        }
        let cum = |i: usize| prefix[i.min(n)];
        let ln_y = y.ln();
        let start = (y.floor() as usize).max(1);
        let ln_t = -y + start as f64 * ln_y - ln_factorial(start);
        let t0 = ln_t.exp();
        let mut acc = t0 * cum(start);
        let mut t = t0;
        for i in (1..start).rev() {
            t *= (i + 1) as f64 / y;
            acc += t * cum(i);
            if t < 1e-300 || (acc > 0.0 && t < 1e-18 * acc) {
                break;
            }
        }
        let mut t = t0;
        let mut i = start;
        loop {
            i += 1;
            t *= y / i as f64;
            acc += t * cum(i);
            if t < 1e-300 || (acc > 0.0 && t < 1e-18 * acc && i as f64 > y) {
                break;
            }
        }
        acc.min(self.total_mass())
    }

    /// E[γⁿ e^{sγ}] for real n ≥ 0 and s < 1/scale.
    pub fn gmgf_real(&self, n: f64, s: f64) -> Result<f64> {
        if !(n >= 0.0) {
            return Err(Error::domain("gmgf_real", format!("order n = {n} must be >= 0")));
        }
        let nu = self.scale;
        if !(s * nu < 1.0) {
            return Err(Error::Divergence {
                func: "gmgf_real",
                detail: format!("s = {s} must be below 1/scale = {}", 1.0 / nu),
            });
        }
        // A_j Γ(n+j+1)/Γ(j+1) ν^n (1 − νs)^{−(n+j+1)}
        let ln_shift = -(-s * nu).ln_1p();
        let ln_nu = nu.ln();
        let mut total = 0.0;
        for (j, &w) in self.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let jf = j as f64;
            let ln = log_gamma(n + jf + 1.0)? - ln_factorial(j) + n * ln_nu + (n + jf + 1.0) * ln_shift;
            total += w * ln.exp();
        }
        Ok(total)
    }

    /// E[γⁿ] for real n ≥ 0.
    pub fn moment_real(&self, n: f64) -> Result<f64> {
        self.gmgf_real(n, 0.0)
    }

    /// Σ_j A_j X(scale·(j + 1), j + 1) for a metric X known under Nakagami-m fading.
    pub fn nakagami_transfer<F: FnMut(f64, f64) -> f64>(&self, mut metric: F) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(j, &w)| {
                let m = (j + 1) as f64;
                w * metric(self.scale * m, m)
            })
            .sum()
    }

    /// ∫_a^b h(x) f(x) dx by adaptive quadrature of the mixture density.
    pub fn average(&self, kernel: &MetricKernel<'_>, rel_tol: f64) -> Result<f64> {
        if !(kernel.a >= 0.0 && kernel.b >= kernel.a) {
            return Err(Error::Argument(format!(
                "kernel limits must satisfy 0 <= a <= b, got [{}, {}]",
                kernel.a, kernel.b
            )));
        }
        let f = |x: f64| (kernel.h)(x) * self.pdf(x);
        if kernel.b.is_infinite() {
            integrate_to_infinity(f, kernel.a, 1e-300, rel_tol)
        } else {
            integrate(f, kernel.a, kernel.b, 1e-300, rel_tol)
        }
    }
}

fn ln_factorial(n: usize) -> f64 {
    log_gamma(n as f64 + 1.0).unwrap_or(0.0)
}

/// Mixture density at x with `terms` weights.
pub fn pdf(p: &IftrParams, x: f64, terms: usize) -> Result<f64> {
    Ok(build_mixture(p, terms)?.pdf(x))
}

/// Mixture CDF at x with `terms` weights.
pub fn cdf(p: &IftrParams, x: f64, terms: usize) -> Result<f64> {
    Ok(build_mixture(p, terms)?.cdf(x))
}

/// High-SNR density: the j = 0 term A₀ (1+K)/γ̄ e^{−x(1+K)/γ̄}.
pub fn asymptotic_pdf(p: &IftrParams, x: f64) -> Result<f64> {
    let a0 = super::coefficients::a0_closed_form(p)?;
    let rate = 1.0 / p.scale();
    Ok(if x < 0.0 { 0.0 } else { a0 * rate * (-x * rate).exp() })
}

/// High-SNR CDF: A₀ (1 − e^{−x(1+K)/γ̄}).
pub fn asymptotic_cdf(p: &IftrParams, x: f64) -> Result<f64> {
    let a0 = super::coefficients::a0_closed_form(p)?;
    Ok(if x <= 0.0 { 0.0 } else { -a0 * (-x / p.scale()).exp_m1() })
}

pub fn gmgf_real(p: &IftrParams, n: f64, s: f64, terms: usize) -> Result<f64> {
    build_mixture(p, terms)?.gmgf_real(n, s)
}

pub fn moment_real(p: &IftrParams, n: f64, terms: usize) -> Result<f64> {
    build_mixture(p, terms)?.moment_real(n)
}

pub fn nakagami_transfer<F: FnMut(f64, f64) -> f64>(
    p: &IftrParams,
    metric: F,
    terms: usize,
) -> Result<f64> {
    Ok(build_mixture(p, terms)?.nakagami_transfer(metric))
}
