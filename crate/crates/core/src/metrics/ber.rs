use crate::error::{Error, Result};
use crate::model::{a0_closed_form, build_mixture, GammaMixture, IftrParams};
use serde::{Deserialize, Serialize};

/// Conditional error rate Σ_r α_r Q(√(β_r x)) in AWGN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationSpec {
    terms: Vec<(f64, f64)>,
}

impl ModulationSpec {
    pub fn new(terms: Vec<(f64, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Argument("modulation needs at least one term".into()));
        }
        for &(alpha, beta) in &terms {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "alpha",
                    value: alpha,
                    constraint: "alpha > 0",
                });
            }
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "beta",
                    value: beta,
                    constraint: "beta > 0",
                });
            }
        }
        Ok(ModulationSpec { terms })
    }

    pub fn bpsk() -> Self {
        ModulationSpec {
            terms: vec![(1.0, 2.0)],
        }
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    /// Σ_r α_r Q(√(β_r x)).
    pub fn conditional(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(a, b)| a * q_function((b * x.max(0.0)).sqrt()))
            .sum()
    }

    /// Error rate at zero SNR, Σ_r α_r / 2.
    pub fn ceiling(&self) -> f64 {
        self.terms.iter().map(|t| t.0).sum::<f64>() / 2.0
    }
}

pub(crate) fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// (d, μ) with μ² = βγ̄/(2(1+K) + βγ̄) and d = 1 − μ² formed without cancellation.
/// `rate` is (1+K)/γ̄.
fn split(rate: f64, beta: f64) -> (f64, f64) {
    let d = 2.0 * rate / (2.0 * rate + beta);
    let mu = (beta / (2.0 * rate + beta)).sqrt();
    (d, mu)
}

/// Brackets b_j = 1 − μ Σ_{k≤j} C(2k,k)(d/4)^k for j < count.
///
/// The full series Σ_k C(2k,k)(d/4)^k equals 1/μ, so b_j is μ times the tail
/// beyond j. For d ≤ 1/2 the tail converges fast and is summed directly, which
/// keeps every b_j relatively accurate at high SNR.
fn brackets(d: f64, mu: f64, count: usize) -> Vec<f64> {
    let mut terms = Vec::with_capacity(count);
    let mut t = 1.0f64;
    for k in 0..count {
        terms.push(t);
        t *= (2 * k + 1) as f64 / (2 * (k + 1)) as f64 * d;
    }
    let mut out = vec![0.0; count];
    if d <= 0.5 {
        let mut tail = 0.0;
        let mut k = count;
        while t > 0.0 && t > 1e-18 * tail {
            tail += t;
            t *= (2 * k + 1) as f64 / (2 * (k + 1)) as f64 * d;
            k += 1;
        }
        for j in (0..count).rev() {
            out[j] = mu * tail;
            tail += terms[j];
        }
    } else {
        let mut b = 1.0;
        for j in 0..count {
            b -= mu * terms[j];
            out[j] = b.max(0.0);
        }
    }
    out
}

/// Average error rate Σ_r (α_r/2) Σ_j A_j b_j from `terms` mixture weights.
pub fn avg_ber(p: &IftrParams, modulation: &ModulationSpec, terms: usize) -> Result<f64> {
    Ok(ber_from_mixture(&build_mixture(p, terms)?, modulation))
}

pub fn ber_from_mixture(mix: &GammaMixture, modulation: &ModulationSpec) -> f64 {
    let rate = 1.0 / mix.scale();
    let mut total = 0.0;
    for &(alpha, beta) in modulation.terms() {
        let (d, mu) = split(rate, beta);
        let b = brackets(d, mu, mix.terms());
        let avg: f64 = mix.weights().iter().zip(&b).map(|(a, b)| a * b).sum();
        total += alpha / 2.0 * avg;
    }
    total
}

/// High-SNR approximation keeping only the A_0 term.
pub fn avg_ber_asymptotic(p: &IftrParams, modulation: &ModulationSpec) -> Result<f64> {
    let a0 = a0_closed_form(p)?;
    let rate = 1.0 / p.scale();
    Ok(modulation
        .terms()
        .iter()
        .map(|&(alpha, beta)| {
            let (d, mu) = split(rate, beta);
            alpha / 2.0 * a0 * d / (1.0 + mu)
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rayleigh;

    #[test]
    fn rayleigh_bpsk() {
        for &gb in &[0.01f64, 1.0, 10.0, 1e3, 1e5] {
            let p = rayleigh(gb).unwrap();
            let expected = 0.5 / (1.0 + gb) / (1.0 + (gb / (1.0 + gb)).sqrt());
            let got = avg_ber(&p, &ModulationSpec::bpsk(), 10).unwrap();
            assert!(((got - expected) / expected).abs() < 1e-9, "gb={gb}");
            let asym = avg_ber_asymptotic(&p, &ModulationSpec::bpsk()).unwrap();
            assert!(((asym - expected) / expected).abs() < 1e-12);
        }
    }

    #[test]
    fn brackets_agree_across_branches() {
        let mu_of = |d: f64| (1.0 - d).sqrt();
        for &d in &[0.49f64, 0.5, 0.51] {
            let direct = {
                let mut b = 1.0;
                let mut t = 1.0;
                let mut out = Vec::new();
                for k in 0..30 {
                    b -= mu_of(d) * t;
                    out.push(b);
                    t *= (2 * k + 1) as f64 / (2 * (k + 1)) as f64 * d;
                }
                out
            };
            let b = brackets(d, mu_of(d), 30);
            for j in 0..30 {
                assert!((b[j] - direct[j]).abs() < 1e-13, "d={d} j={j}");
            }
        }
    }

    #[test]
    fn high_snr_brackets_stay_positive() {
        let b = brackets(1e-6, (1.0f64 - 1e-6).sqrt(), 40);
        assert!(b.iter().all(|&v| v > 0.0));
        assert!((b[0] / 5e-7 - 1.0).abs() < 1e-5);
        assert!(b.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn rejects_bad_modulation() {
        assert!(ModulationSpec::new(vec![]).is_err());
        assert!(ModulationSpec::new(vec![(1.0, 0.0)]).is_err());
        assert!(ModulationSpec::new(vec![(-1.0, 2.0)]).is_err());
        let qpsk = ModulationSpec::new(vec![(1.0, 2.0), (0.5, 1.0)]).unwrap();
        assert_eq!(qpsk.ceiling(), 0.75);
        assert!((qpsk.conditional(0.0) - 0.75).abs() < 1e-15);
    }
}
