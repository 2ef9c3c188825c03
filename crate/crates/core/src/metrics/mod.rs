//! Link-level performance metrics under IFTR fading.

mod ber;
mod capacity;
pub mod nakagami;
mod outage;

pub use ber::{avg_ber, avg_ber_asymptotic, ber_from_mixture, ModulationSpec};
pub use capacity::{avg_capacity, capacity_from_mixture};
pub use outage::{outage, outage_cci, outage_cci_from_mixture, CciScenario, MAX_CCI_ORDER};
