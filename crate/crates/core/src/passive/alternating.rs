use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    beam_training, blind_csm, exhaustive, linear_search_csi, rank_beam_training, rank_csm, zps, ChannelRankProbe,
    DEFAULT_RANK_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::mimo::{
    active_beamforming, capacity, effective_channel, MeasurementMode, MeasurementOracle, PhaseConfig, Precoder,
    Surrogate,
};
use crate::rng::Stream;
use crate::scenario::{ChannelSet, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// All phases zero.
    Zps,
    /// Per-element argmax of the surrogate, using CSI.
    LinearSearch,
    /// Conditional sample means of the summed power (no CSI).
    BlindCsm,
    /// Best random sample by summed power.
    BeamTraining,
    /// Best random sample by channel rank.
    RankBeamTraining,
    /// Conditional sample means of the channel rank.
    RankCsm,
    /// Brute-force capacity maximization for the fixed precoder (small N only).
    Exhaustive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Zps,
        Algorithm::LinearSearch,
        Algorithm::BlindCsm,
        Algorithm::BeamTraining,
        Algorithm::RankBeamTraining,
        Algorithm::RankCsm,
        Algorithm::Exhaustive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Zps => "zps",
            Algorithm::LinearSearch => "linear_search",
            Algorithm::BlindCsm => "blind_csm",
            Algorithm::BeamTraining => "beam_training",
            Algorithm::RankBeamTraining => "rank_beam_training",
            Algorithm::RankCsm => "rank_csm",
            Algorithm::Exhaustive => "exhaustive",
        }
    }

    /// Whether the method reads channel matrices.
    pub fn uses_csi(self) -> bool {
        matches!(self, Algorithm::LinearSearch | Algorithm::Exhaustive)
    }

    /// Whether the method draws random samples.
    pub fn is_sampling(self) -> bool {
        matches!(
            self,
            Algorithm::BlindCsm | Algorithm::BeamTraining | Algorithm::RankBeamTraining | Algorithm::RankCsm
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid("algorithms", format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassiveSettings {
    /// Random samples `T` for sampling methods.
    pub samples: usize,
    pub mode: MeasurementMode,
    pub rank_threshold: f64,
}

impl Default for PassiveSettings {
    fn default() -> Self {
        PassiveSettings {
            samples: 1000,
            mode: MeasurementMode::Expected,
            rank_threshold: DEFAULT_RANK_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassiveMethod {
    pub algorithm: Algorithm,
    pub settings: PassiveSettings,
}

impl PassiveMethod {
    pub fn new(algorithm: Algorithm, settings: PassiveSettings) -> Self {
        PassiveMethod { algorithm, settings }
    }

    /// Chooses a phase array for a fixed precoder.
    ///
    /// Blind methods are handed only a measurement oracle or rank probe built
    /// from `channels`; they cannot reach the matrices themselves.
    pub fn optimize(
        &self,
        channels: &ChannelSet,
        precoder: &Precoder,
        params: &SystemParams,
        stream: Stream,
    ) -> Result<PhaseConfig> {
        let (n, k, t) = (channels.elements(), params.k, self.settings.samples);
        let meter = || MeasurementOracle::new(channels, precoder, params.noise_w, self.settings.mode);
        let probe = || ChannelRankProbe::new(channels, self.settings.rank_threshold);
        match self.algorithm {
            Algorithm::Zps => zps(n, k),
            Algorithm::LinearSearch => linear_search_csi(channels, precoder, k),
            Algorithm::BlindCsm => blind_csm(&meter()?, k, t, stream),
            Algorithm::BeamTraining => beam_training(&meter()?, k, t, stream),
            Algorithm::RankBeamTraining => rank_beam_training(&meter()?, &probe()?, k, t, stream),
            Algorithm::RankCsm => rank_csm(&probe()?, k, t, stream),
            Algorithm::Exhaustive => exhaustive(
                |theta| {
                    effective_channel(channels, theta)
                        .and_then(|h| h.apply(precoder))
                        .and_then(|a| capacity(&a, params.noise_w))
                        .unwrap_or(f64::NAN)
                },
                n,
                k,
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    /// Precoder re-optimized for the current phase array.
    Precoder,
    /// Phase array re-optimized for the current precoder.
    Phases,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub round: usize,
    pub step: Step,
    /// Capacity in bit/s/Hz after the step.
    pub capacity: f64,
    /// `f_b` of the current phase array under the current precoder.
    pub surrogate: f64,
}

#[derive(Debug, Clone)]
pub struct AlternatingOutcome {
    pub precoder: Precoder,
    pub phases: PhaseConfig,
    pub trace: Vec<TraceEntry>,
}

impl AlternatingOutcome {
    pub fn final_capacity(&self) -> f64 {
        self.trace.last().map_or(0.0, |e| e.capacity)
    }
}

/// Alternates water-filling precoding and passive beamforming.
///
/// Starting from zero phases, each round re-solves the precoder for the
/// current phases and then the phases for that precoder; a final precoder
/// step follows the last round. Capacity is recorded after every step.
pub fn alternating_optimize(
    channels: &ChannelSet,
    params: &SystemParams,
    method: &PassiveMethod,
    n_rounds: usize,
    stream: Stream,
) -> Result<AlternatingOutcome> {
    if n_rounds == 0 {
        return Err(Error::invalid("rounds", "need at least one round"));
    }
    channels.check_params(params)?;
    let mut phases = zps(params.n, params.k)?;
    let mut trace = Vec::with_capacity(2 * n_rounds + 1);
    let record = |round, step, phases: &PhaseConfig, precoder: &Precoder, trace: &mut Vec<TraceEntry>| -> Result<()> {
        let a = effective_channel(channels, phases)?.apply(precoder)?;
        trace.push(TraceEntry {
            round,
            step,
            capacity: capacity(&a, params.noise_w)?,
            surrogate: Surrogate::new(channels, precoder)?.value(phases)?,
        });
        Ok(())
    };
    let solve_precoder = |phases: &PhaseConfig| -> Result<Precoder> {
        let h = effective_channel(channels, phases)?.h;
        Ok(active_beamforming(&h, params.power_w, params.s, params.noise_w)?.precoder)
    };

    let mut precoder = solve_precoder(&phases)?;
    for round in 0..n_rounds {
        if round > 0 {
            precoder = solve_precoder(&phases)?;
        }
        record(round, Step::Precoder, &phases, &precoder, &mut trace)?;
        phases = method.optimize(channels, &precoder, params, stream.child(round as u64))?;
        record(round, Step::Phases, &phases, &precoder, &mut trace)?;
    }
    precoder = solve_precoder(&phases)?;
    record(n_rounds, Step::Precoder, &phases, &precoder, &mut trace)?;
    Ok(AlternatingOutcome {
        precoder,
        phases,
        trace,
    })
}
