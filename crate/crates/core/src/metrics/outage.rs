use crate::error::{Error, Result};
use crate::model::{build_mixture, gmgf_int, GammaMixture, IftrParams};
use serde::{Deserialize, Serialize};

/// Upper bound on the antenna count N and the interferer count L.
pub const MAX_CCI_ORDER: usize = 64;

/// P(γ < γ_th) from `terms` mixture weights.
pub fn outage(p: &IftrParams, gamma_th: f64, terms: usize) -> Result<f64> {
    if !(gamma_th >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma_th",
            value: gamma_th,
            constraint: "gamma_th >= 0",
        });
    }
    Ok(build_mixture(p, terms)?.cdf(gamma_th))
}

/// MRC over N i.i.d. IFTR branches against L i.i.d. Rayleigh interferers,
/// with no background noise.
///
/// The desired power per branch has mean `IftrParams::gamma_bar`; any common
/// E_s/N_0 factor cancels in the ratio W/I as long as W̄ and P_I share units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CciScenario {
    pub antennas: usize,
    pub interferers: usize,
    pub interference_power: f64,
    pub sir_threshold: f64,
}

impl CciScenario {
    pub fn new(
        antennas: usize,
        interferers: usize,
        interference_power: f64,
        sir_threshold: f64,
    ) -> Result<Self> {
        let sc = CciScenario {
            antennas,
            interferers,
            interference_power,
            sir_threshold,
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_CCI_ORDER).contains(&self.antennas) {
            return Err(Error::InvalidParameter {
                name: "antennas",
                value: self.antennas as f64,
                constraint: "1 <= N <= 64",
            });
        }
        if !(1..=MAX_CCI_ORDER).contains(&self.interferers) {
            return Err(Error::InvalidParameter {
                name: "interferers",
                value: self.interferers as f64,
                constraint: "1 <= L <= 64",
            });
        }
        if !(self.interference_power > 0.0 && self.interference_power.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "interference_power",
                value: self.interference_power,
                constraint: "P_I > 0",
            });
        }
        if !(self.sir_threshold > 0.0 && self.sir_threshold.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sir_threshold",
                value: self.sir_threshold,
                constraint: "R_th > 0",
            });
        }
        Ok(())
    }

    fn rate(&self) -> f64 {
        1.0 / (self.sir_threshold * self.interference_power)
    }
}

/// Σ_{k<L} Σ_{u₁+…+u_N=k} Π_i (1/(R_th P_I))^{u_i} φ_W^{(u_i)}(−1/(R_th P_I))/u_i!.
///
/// With i.i.d. branches the inner sum over compositions of k is the
/// coefficient of t^k in (Σ_u c_u t^u)^N, c_u = φ^{(u)}(s)|s|^u/u!, which is
/// built by N truncated polynomial products instead of enumerating tuples.
pub fn outage_cci(p: &IftrParams, sc: &CciScenario) -> Result<f64> {
    sc.validate()?;
    let rate = sc.rate();
    let mut ln_fact = 0.0f64;
    let mut c = Vec::with_capacity(sc.interferers);
    for u in 0..sc.interferers {
        if u > 0 {
            ln_fact += (u as f64).ln();
        }
        let phi = gmgf_int(p, u as u32, -rate)?;
        c.push(phi * (u as f64 * rate.ln() - ln_fact).exp());
    }
    Ok(combine(&c, sc.antennas))
}

/// As [`outage_cci`] with c_u taken from the Gamma mixture: under the j-th
/// component c_u is the negative-binomial probability C(j+u, u) a^u (1−a)^{j+1},
/// a = ν/(ν + R_th P_I).
pub fn outage_cci_from_mixture(mix: &GammaMixture, sc: &CciScenario) -> Result<f64> {
    sc.validate()?;
    let nu_rate = mix.scale() * sc.rate();
    let a = nu_rate / (1.0 + nu_rate);
    let (ln_a, ln_1a) = (a.ln(), (-a).ln_1p());
    let mut c = vec![0.0; sc.interferers];
    for (j, &w) in mix.weights().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let mut ln_binom = 0.0f64;
        for (u, cu) in c.iter_mut().enumerate() {
            if u > 0 {
                ln_binom += ((j + u) as f64 / u as f64).ln();
            }
            *cu += w * (ln_binom + u as f64 * ln_a + (j + 1) as f64 * ln_1a).exp();
        }
    }
    Ok(combine(&c, sc.antennas))
}

fn combine(c: &[f64], antennas: usize) -> f64 {
    let deg = c.len();
    let mut acc = vec![0.0; deg];
    acc[0] = 1.0;
    for _ in 0..antennas {
        let mut next = vec![0.0; deg];
        for (i, &x) in acc.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (u, &y) in c.iter().enumerate().take(deg - i) {
                next[i + u] += x * y;
            }
        }
        acc = next;
    }
    acc.iter().sum::<f64>().clamp(0.0, 1.0)
}
