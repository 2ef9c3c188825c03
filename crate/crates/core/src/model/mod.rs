//! The IFTR fading model as a countable mixture of Gamma laws.

mod coefficients;
mod gmgf;
mod ks;
mod mixture;
mod params;

pub use coefficients::{
    a0_closed_form, coefficient, coefficients, quadrature_coefficients, series_coefficient,
    QuadratureRule, SeriesValue,
};
pub use gmgf::{aof, gmgf_int, moment_int};
pub use ks::{default_grid, ks_truncation, REFERENCE_TERMS};
pub use mixture::{
    asymptotic_cdf, asymptotic_pdf, build_mixture, cdf, gmgf_real, moment_real, nakagami_transfer,
    pdf, GammaMixture, MetricKernel,
};
pub use params::{
    ancillary, hoyt, nakagami_limit, rayleigh, rice, rician_shadowed, twdp_limit, AncillaryParams,
    IftrParams, Limits,
};

/// Default number of mixture weights.
pub const DEFAULT_TERMS: usize = 40;
