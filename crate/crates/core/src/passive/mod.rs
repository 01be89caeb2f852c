//! Passive beamforming: choosing the discrete phase array of the surface.
//!
//! CSI-based methods ([`linear_search_csi`], [`exhaustive`]) take channel
//! matrices. Blind methods ([`blind_csm`], [`beam_training`], [`rank_csm`],
//! [`rank_beam_training`]) only see a [`PowerMeter`](crate::mimo::PowerMeter)
//! and, for the rank variants, a [`RankProbe`].

mod alternating;
mod blind;
mod csi;
mod diagnostics;
mod exhaustive;
mod rank;
mod samples;

pub use alternating::{
    alternating_optimize, Algorithm, AlternatingOutcome, PassiveMethod, PassiveSettings, Step, TraceEntry,
};
pub use blind::{beam_training, blind_csm, blind_csm_with_table, rank_beam_training, rank_csm};
pub use csi::{linear_search_csi, zps};
pub use diagnostics::{bound_diagnostics, BoundDiagnostics, BoundParams, NOTATION};
pub use exhaustive::{exhaustive, EXHAUSTIVE_BUDGET};
pub use rank::{channel_rank, ChannelRankProbe, RankProbe, DEFAULT_RANK_THRESHOLD};
pub use samples::{analytic_csm, collect_samples, csm_table, decide_levels, draw_configs, CsmTable, SampleBatch};
