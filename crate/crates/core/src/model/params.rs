use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The five parameters of the IFTR fading model.
///
/// `gamma_bar` is the mean SNR (linear), `m1`, `m2` the Nakagami severities of
/// the two specular rays, `k` the specular-to-diffuse power ratio and `delta`
/// the similarity of the two specular amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IftrParams {
    gamma_bar: f64,
    m1: f64,
    m2: f64,
    k: f64,
    delta: f64,
}

/// K₁ ≥ K₂ ≥ 0 with K₁ + K₂ = K and K₁K₂ = (KΔ/2)².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AncillaryParams {
    pub k1: f64,
    pub k2: f64,
}

fn check(name: &'static str, value: f64, ok: bool, constraint: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            constraint,
        })
    }
}

impl IftrParams {
    pub fn new(gamma_bar: f64, m1: f64, m2: f64, k: f64, delta: f64) -> Result<Self> {
        check("gamma_bar", gamma_bar, gamma_bar > 0.0 && gamma_bar.is_finite(), "0 < gamma_bar < inf")?;
        check("m1", m1, m1 > 0.0 && m1.is_finite(), "0 < m1 < inf")?;
        check("m2", m2, m2 > 0.0 && m2.is_finite(), "0 < m2 < inf")?;
        check("K", k, k >= 0.0 && k.is_finite(), "0 <= K < inf")?;
        check("delta", delta, (0.0..=1.0).contains(&delta), "0 <= delta <= 1")?;
        Ok(IftrParams {
            gamma_bar,
            m1,
            m2,
            k,
            delta,
        })
    }

    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }
    pub fn m1(&self) -> f64 {
        self.m1
    }
    pub fn m2(&self) -> f64 {
        self.m2
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Same channel at a different mean SNR.
    pub fn with_gamma_bar(&self, gamma_bar: f64) -> Result<Self> {
        IftrParams::new(gamma_bar, self.m1, self.m2, self.k, self.delta)
    }

    /// Common scale γ̄/(1 + K) of the Gamma components.
    pub fn scale(&self) -> f64 {
        self.gamma_bar / (1.0 + self.k)
    }

    pub fn ancillary(&self) -> AncillaryParams {
        ancillary(self)
    }
}

/// K₁ = K(1 + √(1−Δ²))/2 and K₂ = K(1 − √(1−Δ²))/2.
pub fn ancillary(p: &IftrParams) -> AncillaryParams {
    let root = (1.0 - p.delta * p.delta).sqrt();
    let k1 = p.k * (1.0 + root) / 2.0;
    // written without the subtraction so small Δ keeps full precision
    let k2 = p.k * p.delta * p.delta / (2.0 * (1.0 + root));
    AncillaryParams { k1, k2 }
}

/// Large finite stand-ins for m → ∞ and K → ∞ in the limiting special cases.
///
/// The bias of each limit is O(1/m_big) or O(1/k_big).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub m_big: f64,
    pub k_big: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            m_big: 1e7,
            k_big: 1e7,
        }
    }
}

impl Limits {
    pub fn rice(&self, gamma_bar: f64, k: f64) -> Result<IftrParams> {
        IftrParams::new(gamma_bar, self.m_big, 1.0, k, 0.0)
    }

    pub fn nakagami(&self, gamma_bar: f64, m: f64) -> Result<IftrParams> {
        IftrParams::new(gamma_bar, m, 1.0, self.k_big, 0.0)
    }

    pub fn twdp(&self, gamma_bar: f64, k: f64, delta: f64) -> Result<IftrParams> {
        IftrParams::new(gamma_bar, self.m_big, self.m_big, k, delta)
    }
}

pub fn rayleigh(gamma_bar: f64) -> Result<IftrParams> {
    IftrParams::new(gamma_bar, 1.0, 1.0, 0.0, 0.0)
}

pub fn rice(gamma_bar: f64, k: f64) -> Result<IftrParams> {
    Limits::default().rice(gamma_bar, k)
}

/// Hoyt (Nakagami-q) as Rician shadowed with m = 1/2 and K = (1/q² − 1)/2.
pub fn hoyt(gamma_bar: f64, q: f64) -> Result<IftrParams> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::domain("hoyt", format!("q = {q} must lie in (0, 1]")));
    }
    let k = (1.0 / (q * q) - 1.0) / 2.0;
    IftrParams::new(gamma_bar, 0.5, 1.0, k, 0.0)
}

pub fn rician_shadowed(gamma_bar: f64, k: f64, m: f64) -> Result<IftrParams> {
    IftrParams::new(gamma_bar, m, 1.0, k, 0.0)
}

pub fn nakagami_limit(gamma_bar: f64, m: f64) -> Result<IftrParams> {
    Limits::default().nakagami(gamma_bar, m)
}

pub fn twdp_limit(gamma_bar: f64, k: f64, delta: f64) -> Result<IftrParams> {
    Limits::default().twdp(gamma_bar, k, delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(IftrParams::new(0.0, 1.0, 1.0, 1.0, 0.5).is_err());
        assert!(IftrParams::new(1.0, -1.0, 1.0, 1.0, 0.5).is_err());
        assert!(IftrParams::new(1.0, 1.0, 0.0, 1.0, 0.5).is_err());
        assert!(IftrParams::new(1.0, 1.0, 1.0, -0.1, 0.5).is_err());
        assert!(IftrParams::new(1.0, 1.0, 1.0, 1.0, 1.01).is_err());
        assert!(IftrParams::new(1.0, 1.0, 1.0, f64::NAN, 0.5).is_err());
        assert!(IftrParams::new(1.0, 1.0, 1.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn ancillary_values() {
        let a = IftrParams::new(1.0, 2.0, 2.0, 10.0, 1.0).unwrap().ancillary();
        assert_eq!((a.k1, a.k2), (5.0, 5.0));
        let a = IftrParams::new(1.0, 2.0, 2.0, 10.0, 0.0).unwrap().ancillary();
        assert_eq!((a.k1, a.k2), (10.0, 0.0));
        let a = IftrParams::new(1.0, 2.0, 2.0, 10.0, 0.5).unwrap().ancillary();
        assert!((a.k1 - 9.330_127_018_922_193).abs() < 1e-13);
        assert!((a.k2 - 0.669_872_981_077_806_8).abs() < 1e-13);
        assert!((a.k1 * a.k2 - 6.25).abs() < 1e-12);
    }

    #[test]
    fn ancillary_small_delta_keeps_product() {
        let a = IftrParams::new(1.0, 2.0, 2.0, 7.0, 1e-9).unwrap().ancillary();
        let target = (7.0 * 1e-9 / 2.0f64).powi(2);
        assert!(((a.k1 * a.k2 - target) / target).abs() < 1e-12);
    }

    #[test]
    fn special_cases() {
        let h = hoyt(2.0, 1.0).unwrap();
        assert_eq!(h.k(), 0.0);
        assert!(hoyt(1.0, 0.0).is_err());
        assert!(hoyt(1.0, 1.5).is_err());
        // q = (1 + 2K)^{-1/2}
        let h = hoyt(1.0, 0.5).unwrap();
        assert!((1.0 / (1.0 + 2.0 * h.k()).sqrt() - 0.5).abs() < 1e-15);
        assert_eq!(rice(1.0, 3.0).unwrap().m1(), 1e7);
        assert_eq!(nakagami_limit(1.0, 3.0).unwrap().k(), 1e7);
        let t = twdp_limit(1.0, 3.0, 0.4).unwrap();
        assert_eq!((t.m1(), t.m2()), (1e7, 1e7));
        let r = rayleigh(1.0).unwrap();
        assert_eq!(r.k(), 0.0);
    }
}
