//! Monte Carlo oracle built from the physical channel model.
//!
//! A draw is V = √ζ₁ V₁ e^{jφ₁} + √ζ₂ V₂ e^{jφ₂} + X + jY with
//! ζᵢ ~ Gamma(mᵢ, 1/mᵢ), φᵢ uniform on [0, 2π), X, Y ~ N(0, σ²),
//! σ² = γ̄/(2(1+K)) and Vᵢ = √(2σ²Kᵢ); the SNR is |V|² (E_s/N_0 = 1).
//!
//! Samples are produced in fixed-size blocks. Block b uses a ChaCha8 stream
//! seeded with the master seed and stream number b, so the output does not
//! depend on how many worker threads rayon runs.

use crate::error::{Error, Result};
use crate::metrics::{CciScenario, ModulationSpec};
use crate::model::{build_mixture, GammaMixture, IftrParams};
use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

const BLOCK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub num_samples: usize,
    pub seed: u64,
    pub histogram_bins: usize,
    pub x_max: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            num_samples: 1_000_000,
            seed: 0x1f7e_2024,
            histogram_bins: 100,
            x_max: 10.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_samples == 0 {
            return Err(Error::InvalidParameter {
                name: "num_samples",
                value: 0.0,
                constraint: "num_samples >= 1",
            });
        }
        if self.histogram_bins < 10 {
            return Err(Error::InvalidParameter {
                name: "histogram_bins",
                value: self.histogram_bins as f64,
                constraint: "histogram_bins >= 10",
            });
        }
        if !(self.x_max > 0.0 && self.x_max.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "x_max",
                value: self.x_max,
                constraint: "x_max > 0",
            });
        }
        Ok(())
    }
}

/// One channel realization with its latent variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelDraw {
    pub snr: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub x: f64,
    pub y: f64,
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl Estimate {
    /// |mean − value| in standard errors.
    pub fn z_score(&self, value: f64) -> f64 {
        if self.std_error == 0.0 {
            return if self.mean == value { 0.0 } else { f64::INFINITY };
        }
        (self.mean - value).abs() / self.std_error
    }
}

/// Fixed specular powers (ζ₁, ζ₂) instead of Gamma draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shadowing {
    Gamma,
    Fixed(f64, f64),
}

struct Sampler {
    v1: f64,
    v2: f64,
    zeta1: Option<Gamma<f64>>,
    zeta2: Option<Gamma<f64>>,
    fixed: (f64, f64),
    noise: Normal<f64>,
}

impl Sampler {
    fn new(p: &IftrParams, shadowing: Shadowing) -> Result<Self> {
        let sigma2 = p.gamma_bar() / (2.0 * (1.0 + p.k()));
        let a = p.ancillary();
        let gamma = |m: f64| {
            Gamma::new(m, 1.0 / m).map_err(|e| Error::domain("sampler", e.to_string()))
        };
        let (zeta1, zeta2, fixed) = match shadowing {
            Shadowing::Gamma => (Some(gamma(p.m1())?), Some(gamma(p.m2())?), (1.0, 1.0)),
            Shadowing::Fixed(z1, z2) => {
                if !(z1 >= 0.0 && z2 >= 0.0) {
                    return Err(Error::domain("sampler", "fixed ζ must be nonnegative"));
                }
                (None, None, (z1, z2))
            }
        };
        Ok(Sampler {
            v1: (2.0 * sigma2 * a.k1).sqrt(),
            v2: (2.0 * sigma2 * a.k2).sqrt(),
            zeta1,
            zeta2,
            fixed,
            noise: Normal::new(0.0, sigma2.sqrt())
                .map_err(|e| Error::domain("sampler", e.to_string()))?,
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> ChannelDraw {
        let zeta1 = self.zeta1.map_or(self.fixed.0, |g| g.sample(rng));
        let zeta2 = self.zeta2.map_or(self.fixed.1, |g| g.sample(rng));
        let phi1 = rng.random::<f64>() * TAU;
        let phi2 = rng.random::<f64>() * TAU;
        let x = self.noise.sample(rng);
        let y = self.noise.sample(rng);
        let snr = snr_of(self.v1, self.v2, zeta1, zeta2, phi1, phi2, x, y);
        ChannelDraw {
            snr,
            zeta1,
            zeta2,
            phi1,
            phi2,
            x,
            y,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn snr_of(v1: f64, v2: f64, z1: f64, z2: f64, phi1: f64, phi2: f64, x: f64, y: f64) -> f64 {
    let (a1, a2) = (z1.sqrt() * v1, z2.sqrt() * v2);
    let re = a1 * phi1.cos() + a2 * phi2.cos() + x;
    let im = a1 * phi1.sin() + a2 * phi2.sin() + y;
    re * re + im * im
}

impl ChannelDraw {
    /// |V|² recomputed from the latent variables.
    pub fn reconstruct_snr(&self, p: &IftrParams) -> f64 {
        let sigma2 = p.gamma_bar() / (2.0 * (1.0 + p.k()));
        let a = p.ancillary();
        snr_of(
            (2.0 * sigma2 * a.k1).sqrt(),
            (2.0 * sigma2 * a.k2).sqrt(),
            self.zeta1,
            self.zeta2,
            self.phi1,
            self.phi2,
            self.x,
            self.y,
        )
    }
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// Runs `f(rng, len)` on each block in parallel and returns the results in block order.
fn blocks<T: Send, F>(count: usize, seed: u64, f: F) -> Vec<T>
where
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let n_blocks = count.div_ceil(BLOCK);
    (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK.min(count - b * BLOCK);
            f(&mut block_rng(seed, b), len)
        })
        .collect()
}

/// Full channel draws, for inspection of the latent variables.
pub fn draw_channels(p: &IftrParams, count: usize, seed: u64) -> Result<Vec<ChannelDraw>> {
    let sampler = Sampler::new(p, Shadowing::Gamma)?;
    Ok(blocks(count, seed, |rng, len| {
        (0..len).map(|_| sampler.draw(rng)).collect::<Vec<_>>()
    })
    .concat())
}

/// `count` SNR samples.
pub fn sample_snr(p: &IftrParams, count: usize, seed: u64) -> Result<Vec<f64>> {
    sample_snr_with(p, Shadowing::Gamma, count, seed)
}

pub fn sample_snr_with(
    p: &IftrParams,
    shadowing: Shadowing,
    count: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let sampler = Sampler::new(p, shadowing)?;
    Ok(blocks(count, seed, |rng, len| {
        (0..len).map(|_| sampler.draw(rng).snr).collect::<Vec<_>>()
    })
    .concat())
}

/// Samples drawn from a Gamma mixture by picking a component, then a Gamma variate.
pub fn sample_mixture(mix: &GammaMixture, count: usize, seed: u64) -> Result<Vec<f64>> {
    let pick = WeightedIndex::new(mix.weights())
        .map_err(|e| Error::Argument(format!("mixture weights: {e}")))?;
    let shapes = (0..mix.terms())
        .map(|j| Gamma::new((j + 1) as f64, mix.scale()))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::domain("sample_mixture", e.to_string()))?;
    Ok(blocks(count, seed, |rng, len| {
        (0..len)
            .map(|_| shapes[pick.sample(rng)].sample(rng))
            .collect::<Vec<_>>()
    })
    .concat())
}

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::Argument("no samples".into()));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::Argument("samples contain NaN".into()));
    }
    let mut s = samples.to_vec();
    s.par_sort_unstable_by(f64::total_cmp);
    Ok(s)
}

/// Right-continuous step CDF of `samples` evaluated on `grid`.
pub fn empirical_cdf(samples: &[f64], grid: &[f64]) -> Result<Vec<f64>> {
    let s = sorted(samples)?;
    let n = s.len() as f64;
    Ok(grid
        .iter()
        .map(|&x| s.partition_point(|&v| v <= x) as f64 / n)
        .collect())
}

/// Histogram on [0, x_max] normalized to unit mass over the samples it covers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
    /// Fraction of all samples that fell inside [0, x_max].
    pub coverage: f64,
}

impl Histogram {
    pub fn centres(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

pub fn empirical_pdf(samples: &[f64], bins: usize, x_max: f64) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(Error::Argument("no samples".into()));
    }
    if bins == 0 || !(x_max > 0.0) {
        return Err(Error::Argument("histogram needs bins > 0 and x_max > 0".into()));
    }
    let width = x_max / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut inside = 0u64;
    for &v in samples {
        if (0.0..=x_max).contains(&v) {
            let i = ((v / width) as usize).min(bins - 1);
            counts[i] += 1;
            inside += 1;
        }
    }
    if inside == 0 {
        return Err(Error::Argument(format!("no samples inside [0, {x_max}]")));
    }
    let edges = (0..=bins).map(|i| i as f64 * width).collect();
    let density = counts
        .iter()
        .map(|&c| c as f64 / (inside as f64 * width))
        .collect();
    Ok(Histogram {
        edges,
        density,
        coverage: inside as f64 / samples.len() as f64,
    })
}

/// sup_x |F_n(x) − F(x)| for a continuous reference CDF.
pub fn ks_statistic<F: Fn(f64) -> f64 + Sync>(samples: &[f64], cdf: F) -> Result<f64> {
    let s = sorted(samples)?;
    let n = s.len() as f64;
    Ok(s.par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .reduce(|| 0.0, f64::max))
}

/// KS distance between `samples` and the `terms`-weight mixture CDF.
pub fn ks_empirical(samples: &[f64], p: &IftrParams, terms: usize) -> Result<f64> {
    let mix = build_mixture(p, terms)?;
    ks_statistic(samples, |x| mix.cdf(x))
}

/// Mean of h(γ) over `cfg.num_samples` channel draws.
pub fn simulate_mean<H: Fn(f64) -> f64 + Sync>(
    p: &IftrParams,
    cfg: &SimConfig,
    h: H,
) -> Result<Estimate> {
    cfg.validate()?;
    let sampler = Sampler::new(p, Shadowing::Gamma)?;
    let partials = blocks(cfg.num_samples, cfg.seed, |rng, len| {
        let (mut s, mut s2) = (0.0f64, 0.0f64);
        for _ in 0..len {
            let v = h(sampler.draw(rng).snr);
            s += v;
            s2 += v * v;
        }
        (s, s2)
    });
    Ok(estimate(&partials, cfg.num_samples))
}

fn estimate(partials: &[(f64, f64)], n: usize) -> Estimate {
    let (s, s2) = partials
        .iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let nf = n as f64;
    let mean = s / nf;
    let var = if n > 1 {
        ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Estimate {
        mean,
        std_error: (var / nf).sqrt(),
        samples: n,
    }
}

pub fn simulate_moment(p: &IftrParams, n: f64, cfg: &SimConfig) -> Result<Estimate> {
    simulate_mean(p, cfg, |g| g.powf(n))
}

pub fn simulate_capacity(p: &IftrParams, cfg: &SimConfig) -> Result<Estimate> {
    simulate_mean(p, cfg, |g| g.ln_1p() / std::f64::consts::LN_2)
}

pub fn simulate_ber(p: &IftrParams, modulation: &ModulationSpec, cfg: &SimConfig) -> Result<Estimate> {
    simulate_mean(p, cfg, |g| modulation.conditional(g))
}

pub fn simulate_outage(p: &IftrParams, gamma_th: f64, cfg: &SimConfig) -> Result<Estimate> {
    simulate_mean(p, cfg, |g| if g < gamma_th { 1.0 } else { 0.0 })
}

/// Empirical P(Σ_{i≤N} W_i / Σ_{l≤L} I_l < R_th) with W_i i.i.d. IFTR powers
/// (mean `gamma_bar`) and I_l i.i.d. exponential with mean P_I.
pub fn simulate_outage_cci(p: &IftrParams, sc: &CciScenario, cfg: &SimConfig) -> Result<Estimate> {
    cfg.validate()?;
    sc.validate()?;
    let sampler = Sampler::new(p, Shadowing::Gamma)?;
    let interference = Exp::new(1.0 / sc.interference_power)
        .map_err(|e| Error::domain("simulate_outage_cci", e.to_string()))?;
    let partials = blocks(cfg.num_samples, cfg.seed, |rng, len| {
        let mut hits = 0.0f64;
        for _ in 0..len {
            let w: f64 = (0..sc.antennas).map(|_| sampler.draw(rng).snr).sum();
            let i: f64 = (0..sc.interferers).map(|_| interference.sample(rng)).sum();
            if w < sc.sir_threshold * i {
                hits += 1.0;
            }
        }
        (hits, hits)
    });
    Ok(estimate(&partials, cfg.num_samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{moment_int, rayleigh};

    #[test]
    fn reproducible_and_thread_count_independent() {
        let p = IftrParams::new(1.0, 3.0, 2.0, 5.0, 0.5).unwrap();
        let a = sample_snr(&p, 3 * BLOCK + 17, 9).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sample_snr(&p, 3 * BLOCK + 17, 9).unwrap());
        assert_eq!(a, b);
        let c = sample_snr(&p, BLOCK + 5, 9).unwrap();
        assert_eq!(&a[..BLOCK + 5], &c[..]);
        assert_ne!(a, sample_snr(&p, 3 * BLOCK + 17, 10).unwrap());
    }

    #[test]
    fn draws_reconstruct() {
        let p = IftrParams::new(2.0, 0.7, 4.0, 8.0, 0.9).unwrap();
        for d in draw_channels(&p, 1000, 1).unwrap() {
            assert!(d.snr >= 0.0);
            assert!((d.reconstruct_snr(&p) - d.snr).abs() <= 1e-12 * d.snr.max(1e-300));
        }
    }

    #[test]
    fn rayleigh_samples_are_exponential() {
        let n = 200_000;
        let s = sample_snr(&rayleigh(2.0).unwrap(), n, 3).unwrap();
        let ks = ks_statistic(&s, |x| -(-x / 2.0f64).exp_m1()).unwrap();
        assert!(ks <= 1.63 / (n as f64).sqrt(), "ks={ks}");
    }

    #[test]
    fn mean_within_three_standard_errors() {
        let p = IftrParams::new(3.0, 2.0, 6.0, 10.0, 0.4).unwrap();
        let cfg = SimConfig {
            num_samples: 200_000,
            ..SimConfig::default()
        };
        let m1 = simulate_moment(&p, 1.0, &cfg).unwrap();
        assert!(m1.z_score(moment_int(&p, 1)) < 3.0);
        let m2 = simulate_moment(&p, 2.0, &cfg).unwrap();
        assert!(m2.z_score(moment_int(&p, 2)) < 3.0);
    }

    #[test]
    fn step_cdf_and_histogram() {
        let c = empirical_cdf(&[2.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(c, vec![0.0, 1.0, 1.0]);
        assert!(empirical_cdf(&[], &[1.0]).is_err());
        let s: Vec<f64> = (0..1000).map(|i| i as f64 / 100.0).collect();
        let h = empirical_pdf(&s, 20, 5.0).unwrap();
        let mass: f64 = h.density.iter().map(|d| d * 0.25).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        assert!((h.coverage - 0.501).abs() < 1e-12);
        assert!(empirical_pdf(&[], 20, 1.0).is_err());
    }

    #[test]
    fn cci_with_vanishing_threshold() {
        let p = IftrParams::new(1.0, 3.0, 30.0, 5.0, 0.5).unwrap();
        let sc = CciScenario::new(2, 1, 1.0, 1e-12).unwrap();
        let cfg = SimConfig {
            num_samples: 10_000,
            ..SimConfig::default()
        };
        assert_eq!(simulate_outage_cci(&p, &sc, &cfg).unwrap().mean, 0.0);
    }

    #[test]
    fn rejects_bad_config() {
        let p = rayleigh(1.0).unwrap();
        let bad = SimConfig {
            num_samples: 0,
            ..SimConfig::default()
        };
        assert!(simulate_capacity(&p, &bad).is_err());
        let bad = SimConfig {
            histogram_bins: 5,
            ..SimConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
