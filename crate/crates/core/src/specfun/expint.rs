//! Exponential integrals and Γ(−n, x).

use super::EULER_GAMMA;
use crate::error::{Error, Result};

const MAX_ITER: usize = 10_000;
const TINY: f64 = 1e-300;

/// E₁(x) for x > 0.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain("exp_integral_e1", format!("x = {x} must be >= 0")));
    }
    if x == 0.0 {
        return Err(Error::Pole {
            func: "exp_integral_e1",
            at: 0.0,
        });
    }
    if x <= 1.0 {
        Ok(e1_series(x))
    } else {
        Ok(scaled_en_cf(1, x)? * (-x).exp())
    }
}

fn e1_series(x: f64) -> f64 {
    // E₁(x) = −γ − ln x − Σ (−x)^k / (k · k!)
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..200 {
        term *= -x / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.abs() < f64::EPSILON * 1e-2 * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

/// e^x E_n(x) by continued fraction; valid for x > 1 (converges for x > 0).
fn scaled_en_cf(n: u32, x: f64) -> Result<f64> {
    let nf = n as f64;
    let mut b = x + nf;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let a = -(i as f64) * (nf - 1.0 + i as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            return Ok(h);
        }
    }
    Err(Error::Truncation {
        func: "scaled_exp_integral_en",
        terms: MAX_ITER,
    })
}

/// e^x E_n(x) for x ≥ 0. Finite at x = 0 only when n ≥ 2.
pub fn scaled_exp_integral_en(n: u32, x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(
            "scaled_exp_integral_en",
            format!("x = {x} must be >= 0"),
        ));
    }
    if x == 0.0 {
        return if n >= 2 {
            Ok(1.0 / (n as f64 - 1.0))
        } else {
            Err(Error::Pole {
                func: "scaled_exp_integral_en",
                at: 0.0,
            })
        };
    }
    if n == 0 {
        return Ok(1.0 / x);
    }
    if x > 1.0 {
        return scaled_en_cf(n, x);
    }
    // upward recurrence E_{k+1} = (e^{−x} − x E_k)/k is stable for x ≤ 1
    let mut s = x.exp() * e1_series(x);
    for k in 1..n {
        s = (1.0 - x * s) / k as f64;
    }
    Ok(s)
}

/// Exponential integral Ei(x) (principal value), x ≠ 0.
pub fn exp_integral_ei(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("exp_integral_ei", "x is NaN"));
    }
    if x == 0.0 {
        return Err(Error::Pole {
            func: "exp_integral_ei",
            at: 0.0,
        });
    }
    if x < 0.0 {
        return Ok(-exp_integral_e1(-x)?);
    }
    if x <= 40.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..MAX_ITER {
            term *= x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add < f64::EPSILON * 0.25 * sum {
                return Ok(EULER_GAMMA + x.ln() + sum);
            }
        }
        return Err(Error::Truncation {
            func: "exp_integral_ei",
            terms: MAX_ITER,
        });
    }
    // asymptotic: e^x/x Σ k!/x^k, cut at the smallest term
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_ITER {
        let next = term * k as f64 / x;
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term < f64::EPSILON * 0.25 * sum {
            break;
        }
    }
    Ok(x.exp() / x * sum)
}

/// Γ(−n, x) = x^{−n} E_{n+1}(x) for x > 0.
pub fn upper_gamma_neg_int(n: u32, x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(
            "upper_gamma_neg_int",
            format!("x = {x} must be > 0"),
        ));
    }
    if x == 0.0 {
        return Err(Error::Pole {
            func: "upper_gamma_neg_int",
            at: 0.0,
        });
    }
    let s = scaled_exp_integral_en(n + 1, x)?;
    Ok((s.ln() - x - n as f64 * x.ln()).exp())
}

/// x^n e^x Γ(−n, x) = e^x E_{n+1}(x), bounded for all x > 0.
pub fn scaled_upper_gamma_neg_int(n: u32, x: f64) -> Result<f64> {
    if x == 0.0 && n == 0 {
        return Err(Error::Pole {
            func: "scaled_upper_gamma_neg_int",
            at: 0.0,
        });
    }
    scaled_exp_integral_en(n + 1, x)
}
