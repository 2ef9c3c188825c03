//! Special-function kernel.
//!
//! Everything the mixture representation needs and nothing more:
//!
//! | Function | Description |
//! |----------|-------------|
//! | [`log_gamma`] | ln Γ(x), x > 0 |
//! | [`log_binomial`] | ln C(n, k) |
//! | [`reg_lower_gamma`] | P(a, x) = γ(a, x)/Γ(a) |
//! | [`exp_integral_ei`] | Ei(x), principal value |
//! | [`upper_gamma_neg_int`] | Γ(−n, x) |
//! | [`reg_gauss_2f1`] | ₂F̃₁(a, b; c; z) for 0 ≤ z < 1, any real c |
//!
//! All functions are pure. Quantities that overflow `f64` in intermediate
//! steps are carried as [`SignedLog`] values.

mod expint;
mod gamma;
mod hyper;
pub mod quadrature;

pub use expint::{
    exp_integral_e1, exp_integral_ei, scaled_exp_integral_en, scaled_upper_gamma_neg_int,
    upper_gamma_neg_int,
};
pub use gamma::{
    log_binomial, log_gamma, log_pochhammer, reg_lower_gamma, reg_upper_gamma, signed_log_gamma,
};
pub use hyper::{reg_gauss_2f1, reg_gauss_2f1_log, reg_gauss_2f1_with};

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Stopping rule for infinite series.
///
/// A series stops once `|term| < rel_tol * |partial sum|` holds for three
/// consecutive terms (or `|term| < abs_tol` while the sum is still zero).
/// Hitting `max_terms` first is reported as [`Error::Truncation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            max_terms: 10_000,
            rel_tol: 1e-16,
            abs_tol: 1e-300,
        }
    }
}

impl SeriesControl {
    pub fn new(max_terms: usize, rel_tol: f64, abs_tol: f64) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::Argument("max_terms must be at least 1".into()));
        }
        if !(rel_tol > 0.0) || !(abs_tol > 0.0) {
            return Err(Error::Argument("series tolerances must be positive".into()));
        }
        Ok(SeriesControl {
            max_terms,
            rel_tol,
            abs_tol,
        })
    }
}

/// A real number stored as `sign * exp(ln_abs)`.
///
/// `sign` is one of −1, 0, +1; a zero value has `ln_abs = -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0.0,
        ln_abs: f64::NEG_INFINITY,
    };
    pub const ONE: SignedLog = SignedLog {
        sign: 1.0,
        ln_abs: 0.0,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            SignedLog::ZERO
        } else {
            SignedLog {
                sign: x.signum(),
                ln_abs: x.abs().ln(),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn mul(self, other: SignedLog) -> SignedLog {
        if self.is_zero() || other.is_zero() {
            SignedLog::ZERO
        } else {
            SignedLog {
                sign: self.sign * other.sign,
                ln_abs: self.ln_abs + other.ln_abs,
            }
        }
    }

    pub fn scale_ln(self, ln_factor: f64) -> SignedLog {
        if self.is_zero() {
            self
        } else {
            SignedLog {
                sign: self.sign,
                ln_abs: self.ln_abs + ln_factor,
            }
        }
    }
}
