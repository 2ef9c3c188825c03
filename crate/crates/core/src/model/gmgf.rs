//! Closed forms for integer order: GMGF E[γⁿ e^{sγ}], moments and amount of fading.

use super::params::IftrParams;
use crate::error::{Error, Result};
use crate::specfun::{log_binomial, log_gamma, reg_gauss_2f1_log, SignedLog};

fn ln_fact(n: u64) -> f64 {
    log_gamma(n as f64 + 1.0).unwrap_or(0.0)
}

fn ln_binom(n: u64, k: u64) -> f64 {
    log_binomial(n, k).unwrap_or(f64::NEG_INFINITY)
}

/// Integer-order GMGF in closed form (finite sums of ₂F̃₁ values).
///
/// `s = 0` is delegated to [`moment_int`], where the ₂F̃₁ factors collapse to
/// a Kronecker delta that floating point cannot reproduce.
pub fn gmgf_int(p: &IftrParams, n: u32, s: f64) -> Result<f64> {
    if s.is_nan() {
        return Err(Error::domain("gmgf_int", "s is NaN"));
    }
    if s == 0.0 {
        return Ok(moment_int(p, n));
    }
    let a = p.ancillary();
    let (gb, m1, m2, k) = (p.gamma_bar(), p.m1(), p.m2(), p.k());
    let gs = gb * s;
    let lead = 1.0 + k - gs;
    let d1 = m1 * (1.0 + k) - (m1 + a.k1) * gs;
    let d2 = m2 * (1.0 + k) - (m2 + a.k2) * gs;
    if !(lead > 0.0 && d1 > 0.0 && d2 > 0.0) {
        return Err(Error::Divergence {
            func: "gmgf_int",
            detail: format!("s = {s} lies outside the region of convergence"),
        });
    }
    let kd = k * p.delta();
    let z = (kd * gs).powi(2) / (4.0 * d1 * d2);
    if !(z < 1.0) {
        return Err(Error::Divergence {
            func: "gmgf_int",
            detail: format!("hypergeometric argument {z} reaches 1"),
        });
    }
    let (ln_d1, ln_d2) = (d1.ln(), d2.ln());
    let ln_gs = gs.abs().ln();
    let ln_kd_sq = if kd > 0.0 { 2.0 * (kd / 2.0).ln() } else { f64::NEG_INFINITY };
    let ln_1k = (1.0 + k).ln();
    let nn = n as u64;

    let mut terms: Vec<SignedLog> = Vec::new();
    for q in 0..=nn {
        let outer_q = ln_binom(nn, q) + (q + 1) as f64 * ln_1k - ln_fact(q);
        for r in 0..=q {
            for pp in 0..=(q - r) {
                let rest = q - r - pp;
                if (a.k1 == 0.0 && pp > 0) || (a.k2 == 0.0 && rest > 0) {
                    continue;
                }
                let pow = if pp > 0 { pp as f64 * a.k1.ln() } else { 0.0 }
                    + if rest > 0 { rest as f64 * a.k2.ln() } else { 0.0 };
                let outer = outer_q + ln_binom(q, r) + ln_binom(q - r, pp) + pow;
                for l in 0..=r {
                    if kd == 0.0 && l > 0 {
                        continue;
                    }
                    let e1 = m1 + (l + pp) as f64;
                    let e2 = m2 + (l + rest) as f64;
                    let f = reg_gauss_2f1_log(e1, e2, (2 * l) as f64 - r as f64 + 1.0, z)?;
                    if f.is_zero() {
                        continue;
                    }
                    let power = (2 * l) as f64 - r as f64;
                    let ln = outer
                        + ln_binom(r, l)
                        + if l > 0 { l as f64 * ln_kd_sq } else { 0.0 }
                        + log_gamma(e1)?
                        - e1 * ln_d1
                        + log_gamma(e2)?
                        - e2 * ln_d2
                        + power * ln_gs
                        + f.ln_abs;
                    // (γ̄s)^{2l−r} carries the sign (−1)^r when s < 0
                    let sign = if gs < 0.0 && r % 2 == 1 { -f.sign } else { f.sign };
                    terms.push(SignedLog { sign, ln_abs: ln });
                }
            }
        }
    }
    let ln_pre = n as f64 * gb.ln() + ln_fact(nn) - (n as f64 + 1.0 - m1 - m2) * lead.ln()
        + m1 * m1.ln()
        - log_gamma(m1)?
        + m2 * m2.ln()
        - log_gamma(m2)?;
    Ok(signed_sum(&terms, ln_pre))
}

fn signed_sum(terms: &[SignedLog], ln_pre: f64) -> f64 {
    let peak = terms
        .iter()
        .map(|t| t.ln_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return 0.0;
    }
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for t in terms {
        let v = t.sign * (t.ln_abs - peak).exp();
        let s = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - s) + v;
        } else {
            comp += (v - s) + sum;
        }
        sum = s;
    }
    (sum + comp) * (peak + ln_pre).exp()
}

/// E[γⁿ] for integer n as a finite positive sum.
pub fn moment_int(p: &IftrParams, n: u32) -> f64 {
    let a = p.ancillary();
    let (m1, m2) = (p.m1(), p.m2());
    let kd_sq = (p.k() * p.delta() / 2.0).powi(2);
    let nn = n as u64;
    let mut total = 0.0;
    for q in 0..=nn {
        let outer_q = ln_binom(nn, q) + ln_fact(nn) - ln_fact(q);
        // only r = 2l survives
        for l in 0..=q / 2 {
            let r = 2 * l;
            for pp in 0..=(q - r) {
                let rest = q - r - pp;
                let w1 = a.k1.powi(pp as i32) * a.k2.powi(rest as i32) * kd_sq.powi(l as i32);
                if w1 == 0.0 {
                    continue;
                }
                let i1 = l + pp;
                let i2 = q - l - pp;
                // Γ(m+i)/(Γ(m) m^i) as a product keeps m → ∞ exact
                let g1: f64 = (0..i1).map(|i| (m1 + i as f64) / m1).product();
                let g2: f64 = (0..i2).map(|i| (m2 + i as f64) / m2).product();
                let ln = outer_q + ln_binom(q, r) + ln_binom(q - r, pp) + ln_binom(r, l);
                total += ln.exp() * w1 * g1 * g2;
            }
        }
    }
    p.scale().powi(n as i32) * total
}

/// Amount of fading Var[γ]/γ̄².
pub fn aof(p: &IftrParams) -> f64 {
    let a = p.ancillary();
    let k = p.k();
    let kd = k * p.delta();
    (1.0 + 2.0 * k + kd * kd / 2.0 + a.k1 * a.k1 / p.m1() + a.k2 * a.k2 / p.m2())
        / ((1.0 + k) * (1.0 + k))
}
