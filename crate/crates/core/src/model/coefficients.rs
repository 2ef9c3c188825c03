//! Mixture weights A_j.
//!
//! Two independent routes are provided:
//!
//! * [`series_coefficient`] evaluates the closed-form triple sum with the
//!   regularized ₂F̃₁. Its terms alternate in sign and their magnitudes grow
//!   roughly like ₂F₁(m₁, m₂; 1; (KΔ)²/(m₁m₂)), so for large K with small m
//!   the sum cancels catastrophically in double precision.
//! * [`quadrature_coefficients`] uses A_j = E[Poisson(j; Λ)] where Λ is the
//!   specular power |√(ζ₁K₁)e^{iφ₁} + √(ζ₂K₂)e^{iφ₂}|² with ζᵢ ~ Gamma(mᵢ, 1/mᵢ).
//!   Every contribution is positive, so this route cannot cancel. The ζᵢ
//!   nodes follow the tilted laws Gamma(mᵢ, 1/(mᵢ+Kᵢ)) with the density ratio
//!   folded into the weights, which absorbs the e^{−Kᵢζᵢ} decay of the
//!   Poisson factor and keeps small-m, large-K cases accurate.
//!
//! [`coefficients`] takes the series while its own error estimate stays
//! below 1e-10 relative, then hands over to the quadrature.

use super::params::IftrParams;
use crate::error::{Error, Result};
use crate::specfun::quadrature::gauss_laguerre_ln;
use crate::specfun::{log_gamma, reg_gauss_2f1_log, reg_gauss_2f1, SignedLog};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Highest index evaluated through the series before switching routes.
const SERIES_MAX_INDEX: usize = 40;
/// Accepted relative error estimate for a series-evaluated weight.
const SERIES_REL_TOL: f64 = 1e-10;
/// Relative rounding error assumed per series term.
const TERM_ROUNDING: f64 = 5e-14;

/// A series-evaluated weight with the sum of |terms| that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub abs_sum: f64,
}

impl SeriesValue {
    /// Rounding-error estimate relative to `value`.
    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.abs_sum == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            TERM_ROUNDING * self.abs_sum / self.value.abs()
        }
    }
}

struct SeriesTables {
    k1: f64,
    k2: f64,
    z: f64,
    ln_k1: f64,
    ln_k2: f64,
    ln_kd_sq: f64,
    m1: f64,
    m2: f64,
    // ln[m^m Γ(m+n) / (Γ(m) (K+m)^{m+n})] for n = 0, 1, ...
    g1: Vec<f64>,
    g2: Vec<f64>,
    ln_fact: Vec<f64>,
}

fn shape_table(m: f64, k: f64, len: usize) -> Vec<f64> {
    let base = -m * (k / m).ln_1p();
    let ln_km = (k + m).ln();
    let mut out = Vec::with_capacity(len);
    let mut ln_poch = 0.0;
    for n in 0..len {
        out.push(base + ln_poch - n as f64 * ln_km);
        ln_poch += (m + n as f64).ln();
    }
    out
}

impl SeriesTables {
    fn new(p: &IftrParams, max_j: usize) -> Self {
        let a = p.ancillary();
        let (m1, m2, k) = (p.m1(), p.m2(), p.k());
        let kd = k * p.delta();
        let z = kd * kd / (4.0 * (a.k1 + m1) * (a.k2 + m2));
        let len = 2 * max_j + 2;
        let mut ln_fact = vec![0.0; len];
        for n in 2..len {
            ln_fact[n] = ln_fact[n - 1] + (n as f64).ln();
        }
        SeriesTables {
            k1: a.k1,
            k2: a.k2,
            z,
            ln_k1: a.k1.ln(),
            ln_k2: a.k2.ln(),
            ln_kd_sq: 2.0 * (kd / 2.0).ln(),
            m1,
            m2,
            g1: shape_table(m1, a.k1, len),
            g2: shape_table(m2, a.k2, len),
            ln_fact,
        }
    }

    fn ln_binom(&self, n: usize, k: usize) -> f64 {
        self.ln_fact[n] - self.ln_fact[k] - self.ln_fact[n - k]
    }

    fn eval(&self, j: usize) -> Result<SeriesValue> {
        let mut terms: Vec<SignedLog> = Vec::new();
        let kd_zero = self.z == 0.0;
        for k in 0..=j {
            let q_range = if self.k2 == 0.0 { (j - k)..=(j - k) } else { 0..=(j - k) };
            for q in q_range {
                if self.k1 == 0.0 && q > 0 {
                    continue;
                }
                let r = j - k - q;
                let pow1 = if q == 0 { 0.0 } else { q as f64 * self.ln_k1 };
                let pow2 = if r == 0 { 0.0 } else { r as f64 * self.ln_k2 };
                let outer = self.ln_binom(j, k) + self.ln_binom(j - k, q) + pow1 + pow2
                    - self.ln_fact[j];
                let l_max = if kd_zero { 0 } else { k };
                for l in 0..=l_max {
                    let c = 2.0 * l as f64 - k as f64 + 1.0;
                    let a = self.m1 + (q + l) as f64;
                    let b = self.m2 + (r + l) as f64;
                    let f = reg_gauss_2f1_log(a, b, c, self.z)?;
                    if f.is_zero() {
                        continue;
                    }
                    let pow_kd = if l == 0 { 0.0 } else { l as f64 * self.ln_kd_sq };
                    let ln = outer
                        + self.ln_binom(k, l)
                        + self.g1[q + l]
                        + self.g2[r + l]
                        + pow_kd
                        + f.ln_abs;
                    let sign = if k % 2 == 0 { f.sign } else { -f.sign };
                    terms.push(SignedLog { sign, ln_abs: ln });
                }
            }
        }
        Ok(sum_signed(&terms))
    }
}

/// Compensated sum of signed-log terms; also returns Σ|t|.
fn sum_signed(terms: &[SignedLog]) -> SeriesValue {
    let peak = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.ln_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return SeriesValue {
            value: 0.0,
            abs_sum: 0.0,
        };
    }
    let (mut sum, mut comp, mut abs) = (0.0f64, 0.0f64, 0.0f64);
    for t in terms.iter().filter(|t| !t.is_zero()) {
        let v = t.sign * (t.ln_abs - peak).exp();
        abs += v.abs();
        let s = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - s) + v;
        } else {
            comp += (v - s) + sum;
        }
        sum = s;
    }
    let scale = peak.exp();
    SeriesValue {
        value: (sum + comp) * scale,
        abs_sum: abs * scale,
    }
}

/// A_j from the closed-form triple sum, with its cancellation diagnostics.
pub fn series_coefficient(p: &IftrParams, j: usize) -> Result<SeriesValue> {
    SeriesTables::new(p, j).eval(j)
}

/// A_0 = m₁^{m₁}m₂^{m₂}/((K₁+m₁)^{m₁}(K₂+m₂)^{m₂}) · ₂F₁(m₁, m₂; 1; z).
pub fn a0_closed_form(p: &IftrParams) -> Result<f64> {
    let a = p.ancillary();
    let (m1, m2) = (p.m1(), p.m2());
    let kd = p.k() * p.delta();
    let z = kd * kd / (4.0 * (a.k1 + m1) * (a.k2 + m2));
    let ln_base = -m1 * (a.k1 / m1).ln_1p() - m2 * (a.k2 / m2).ln_1p();
    // Γ(1) = 1, so the regularized and plain functions coincide
    let f = reg_gauss_2f1(m1, m2, 1.0, z)?;
    Ok(ln_base.exp() * f)
}

/// Node counts for the positive quadrature route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureRule {
    /// Gauss–Laguerre nodes per specular amplitude.
    pub laguerre_nodes: usize,
    /// Phase-difference midpoints: `min_angles + angles_per_root * (ζ₁K₁ζ₂K₂)^{1/4}`.
    pub min_angles: usize,
    pub angles_per_root: f64,
    /// Node pairs with product weight below this are skipped.
    pub weight_floor: f64,
    /// Place the nodes under the tilted laws Gamma(mᵢ, 1/(mᵢ+Kᵢ)).
    pub tilted: bool,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            laguerre_nodes: 120,
            min_angles: 16,
            angles_per_root: 12.0,
            weight_floor: 1e-22,
            tilted: true,
        }
    }
}

/// Relative size below which Poisson probabilities are dropped.
const POISSON_CUTOFF: f64 = 1e-30;

/// Adds e^{ln_weight} · Poisson(j; λ) for j < out.len().
///
/// Values are generated outward from the mode, so the entries for a given j
/// do not depend on `out.len()`.
fn add_poisson(lambda: f64, ln_weight: f64, out: &mut [f64]) {
    if lambda <= 0.0 {
        out[0] += ln_weight.exp();
        return;
    }
    let n = out.len();
    let mode = lambda.floor();
    let ln_peak = ln_weight - lambda + mode * lambda.ln() - log_gamma(mode + 1.0).unwrap_or(0.0);
    if ln_peak < -745.0 {
        return;
    }
    let peak = ln_peak.exp();
    let mode = mode as usize;
    let floor = POISSON_CUTOFF * peak;
    // downward: p_{i-1} = p_i · i/λ
    let mut v = peak;
    let mut i = mode;
    loop {
        if i < n {
            out[i] += v;
        }
        if i == 0 {
            break;
        }
        v *= i as f64 / lambda;
        i -= 1;
        if v < floor {
            break;
        }
    }
    // upward: p_{i+1} = p_i · λ/(i+1)
    let mut v = peak;
    let mut i = mode;
    while i + 1 < n {
        v *= lambda / (i + 1) as f64;
        i += 1;
        if v < floor {
            break;
        }
        out[i] += v;
    }
}

/// Normalized generalized Gauss–Laguerre rule for ζ ~ Gamma(m, 1/m).
///
/// With `tilt` = K the nodes follow Gamma(m, 1/(m+K)) instead and the returned
/// log-weights carry the ratio of densities m^m e^{Kζ}/(m+K)^m, which cancels
/// the e^{−Kζ} decay of the Poisson factor.
fn gamma_nodes(m: f64, tilt: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (x, ln_w) = gauss_laguerre_ln(n, m - 1.0)?;
    let rate = m + tilt;
    let ln_ratio = -m * (tilt / m).ln_1p();
    Ok(x.iter()
        .zip(&ln_w)
        .map(|(&xi, &lw)| {
            let z = xi / rate;
            (z, lw + ln_ratio + tilt * z)
        })
        .unzip())
}

/// A_0 … A_{count−1} by averaging Poisson probabilities over the specular powers.
pub fn quadrature_coefficients(
    p: &IftrParams,
    count: usize,
    rule: &QuadratureRule,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Argument("coefficient count must be at least 1".into()));
    }
    let a = p.ancillary();
    if a.k1 == 0.0 {
        let mut out = vec![0.0; count];
        out[0] = 1.0;
        return Ok(out);
    }
    let (t1, t2) = if rule.tilted { (a.k1, a.k2) } else { (0.0, 0.0) };
    let (z1, w1) = gamma_nodes(p.m1(), t1, rule.laguerre_nodes)?;
    let (z2, w2) = if a.k2 == 0.0 {
        (vec![0.0], vec![0.0])
    } else {
        gamma_nodes(p.m2(), t2, rule.laguerre_nodes)?
    };
    let ln_floor = rule.weight_floor.ln();
    let partials: Vec<Vec<f64>> = z1
        .par_iter()
        .zip(w1.par_iter())
        .map(|(&za, &wa)| {
            let mut acc = vec![0.0; count];
            let aa = za * a.k1;
            for (&zb, &wb) in z2.iter().zip(&w2) {
                let w = wa + wb;
                let bb = zb * a.k2;
                // e^w is this node pair's share of Σ_j A_j
                if w < ln_floor {
                    continue;
                }
                let c = (aa * bb).sqrt();
                if c == 0.0 {
                    add_poisson(aa + bb, w, &mut acc);
                    continue;
                }
                let angles = rule.min_angles + (rule.angles_per_root * c.sqrt()) as usize;
                let wt = w - (angles as f64).ln();
                for t in 0..angles {
                    let theta = std::f64::consts::PI * (t as f64 + 0.5) / angles as f64;
                    // clamp guards the (√a − √b)² end against rounding below zero
                    let lambda = (aa + bb + 2.0 * c * theta.cos()).max(0.0);
                    add_poisson(lambda, wt, &mut acc);
                }
            }
            acc
        })
        .collect();
    let mut out = vec![0.0; count];
    for part in &partials {
        for (o, v) in out.iter_mut().zip(part) {
            *o += v;
        }
    }
    Ok(out)
}

/// Negative-binomial weights of the single-specular case (K₂ = 0).
fn single_specular(m: f64, k: f64, count: usize) -> Vec<f64> {
    // A_j = (m)_j/j! · (m/(m+K))^m · (K/(m+K))^j
    let ln_base = -m * (k / m).ln_1p();
    let ln_ratio = (k / (m + k)).ln();
    let mut out = Vec::with_capacity(count);
    let mut ln_term = ln_base;
    for j in 0..count {
        out.push(ln_term.exp());
        ln_term += ((m + j as f64) / (j as f64 + 1.0)).ln() + ln_ratio;
    }
    out
}

fn compute(p: &IftrParams, count: usize) -> Result<Vec<f64>> {
    let a = p.ancillary();
    if a.k1 == 0.0 {
        let mut out = vec![0.0; count];
        out[0] = 1.0;
        return Ok(out);
    }
    if a.k2 == 0.0 {
        return Ok(single_specular(p.m1(), a.k1, count));
    }
    let tables = SeriesTables::new(p, SERIES_MAX_INDEX.min(count));
    let mut out = Vec::with_capacity(count);
    for j in 0..count.min(SERIES_MAX_INDEX) {
        match tables.eval(j) {
            Ok(v) if v.value > 0.0 && v.rel_error() <= SERIES_REL_TOL => out.push(v.value),
            Ok(_) | Err(Error::Truncation { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    if out.len() < count {
        let tail = quadrature_coefficients(p, count, &QuadratureRule::default())?;
        let start = out.len();
        out.extend_from_slice(&tail[start..]);
    }
    Ok(out)
}

type CacheKey = [u64; 4];

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<Vec<f64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Vec<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

const CACHE_CAPACITY: usize = 512;

/// A_0 … A_{count−1}. Weights do not depend on γ̄; results are memoized.
pub fn coefficients(p: &IftrParams, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Argument("coefficient count must be at least 1".into()));
    }
    let key = [
        p.m1().to_bits(),
        p.m2().to_bits(),
        p.k().to_bits(),
        p.delta().to_bits(),
    ];
    if let Some(hit) = cache().lock().ok().and_then(|c| c.get(&key).cloned()) {
        if hit.len() >= count {
            return Ok(hit[..count].to_vec());
        }
    }
    let fresh = compute(p, count)?;
    if let Ok(mut c) = cache().lock() {
        if c.len() >= CACHE_CAPACITY {
            c.clear();
        }
        let longer = c.get(&key).is_none_or(|v| v.len() < fresh.len());
        if longer {
            c.insert(key, Arc::new(fresh.clone()));
        }
    }
    Ok(fresh)
}

/// A single weight A_j.
pub fn coefficient(p: &IftrParams, j: usize) -> Result<f64> {
    coefficients(p, j + 1).map(|v| v[j])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: f64, m1: f64, m2: f64, delta: f64) -> IftrParams {
        IftrParams::new(1.0, m1, m2, k, delta).unwrap()
    }

    #[test]
    fn rayleigh_weights() {
        let p = params(0.0, 3.0, 2.0, 0.4);
        assert_eq!(coefficients(&p, 5).unwrap(), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let s = series_coefficient(&p, 0).unwrap();
        assert!((s.value - 1.0).abs() < 1e-15);
        assert_eq!(series_coefficient(&p, 3).unwrap().value, 0.0);
    }

    #[test]
    fn a0_forms_agree() {
        for &(k, m1, m2, d) in &[(10.0, 8.0, 5.0, 0.5), (3.0, 2.5, 1.3, 0.2), (5.0, 1.0, 1.0, 1.0)] {
            let p = params(k, m1, m2, d);
            let s = series_coefficient(&p, 0).unwrap().value;
            let c = a0_closed_form(&p).unwrap();
            assert!(((s - c) / c).abs() < 1e-10, "{s} vs {c}");
        }
    }

    #[test]
    fn single_specular_matches_series() {
        let p = params(6.0, 2.5, 4.0, 0.0);
        let nb = coefficients(&p, 12).unwrap();
        for (j, &w) in nb.iter().enumerate() {
            let s = series_coefficient(&p, j).unwrap().value;
            assert!(((s - w) / w).abs() < 1e-11, "j={j}: {s} vs {w}");
        }
    }

    #[test]
    fn poisson_prefix_is_length_independent() {
        let mut short = vec![0.0; 7];
        let mut long = vec![0.0; 70];
        add_poisson(23.7, 0.0, &mut short);
        add_poisson(23.7, 0.0, &mut long);
        assert_eq!(&short[..], &long[..7]);
        assert!((long.iter().sum::<f64>() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn routes_agree_where_series_is_stable() {
        let p = params(10.0, 8.0, 5.0, 0.5);
        let q = quadrature_coefficients(&p, 30, &QuadratureRule::default()).unwrap();
        let mut checked = 0;
        for (j, &qj) in q.iter().enumerate() {
            let s = series_coefficient(&p, j).unwrap();
            if s.rel_error() > 1e-10 {
                continue;
            }
            checked += 1;
            assert!(((s.value - qj) / s.value).abs() < 1e-9, "j={j}: {} vs {qj}", s.value);
        }
        assert!(checked >= 8);
    }

    #[test]
    fn cache_is_transparent() {
        let p = params(7.0, 2.0, 3.0, 0.9);
        let long = coefficients(&p, 60).unwrap();
        let short = coefficients(&p, 10).unwrap();
        assert_eq!(&long[..10], &short[..]);
        let fresh = compute(&p, 10).unwrap();
        assert_eq!(fresh, short);
    }
}
