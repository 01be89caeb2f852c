//! Effective channel, capacity and surrogate objectives, active beamforming and
//! the received-power measurement oracle.

mod capacity;
pub mod io;
mod oracle;
mod phase;
mod surrogate;
mod waterfill;

pub use capacity::{
    capacity, capacity_bounds, capacity_from_eigenvalues, effective_channel, sum_power, CapacityBounds,
    EffectiveChannel,
};
pub use oracle::{MeasurementMode, MeasurementOracle, PowerMeter};
pub use phase::{unit_phasor, PhaseConfig};
pub use surrogate::{surrogate_fb, Surrogate};
pub use waterfill::{active_beamforming, water_fill, ActiveBeamforming, Precoder};
