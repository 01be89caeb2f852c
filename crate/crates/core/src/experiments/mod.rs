//! Seeded Monte Carlo studies over the reference scenario.
//!
//! Every study is a pure function of its [`ExperimentSpec`]: trial `t` draws its
//! channels from `seed → [CHANNEL, t]` (shared by all sweep points, so grids
//! compare matched realizations) and its random samples from
//! `seed → [SAMPLES, point, t]`. Trials run in parallel and are reduced in
//! index order, so expected-mode results are bit-for-bit reproducible.

mod output;
mod studies;
mod tables;

pub use output::{write_study, Manifest, ManifestFile};
pub use studies::{
    gap_study, prop1_study, prop1_study_modes, single_study, sweep_res, sweep_tx_antennas, timing_study,
    TIMING_ALGORITHMS,
};
pub use tables::{GapRow, MatchRow, RateRow, ResultTable, Summary, TimingRow};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mimo::MeasurementMode;
use crate::passive::{Algorithm, PassiveSettings};
use crate::rng::Stream;
use crate::scenario::Scenario;

pub(crate) const CHANNEL_TAG: u64 = 0xC4A7;
pub(crate) const SAMPLES_TAG: u64 = 0x5A3B;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    Single,
    SweepM,
    SweepN,
    Gap,
    Prop1,
    Timing,
}

impl Study {
    pub const ALL: [Study; 6] = [
        Study::Single,
        Study::SweepM,
        Study::SweepN,
        Study::Gap,
        Study::Prop1,
        Study::Timing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Study::Single => "single",
            Study::SweepM => "sweep-m",
            Study::SweepN => "sweep-n",
            Study::Gap => "gap",
            Study::Prop1 => "prop1",
            Study::Timing => "timing",
        }
    }

    pub fn parse(s: &str) -> Option<Study> {
        Study::ALL.into_iter().find(|st| st.name() == s)
    }

    /// What the grid of an [`ExperimentSpec`] sweeps for this study.
    pub fn sweep_variable(self) -> &'static str {
        match self {
            Study::Single => "none",
            Study::SweepM => "m",
            Study::SweepN | Study::Gap | Study::Timing => "n",
            Study::Prop1 => "t",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    /// Values of the swept variable (M, N or T depending on the study).
    pub grid: Vec<usize>,
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    pub settings: PassiveSettings,
    /// Alternating-optimization rounds.
    pub rounds: usize,
    /// Stream count; `None` means `min(M, L)` at every sweep point.
    pub streams: Option<usize>,
    pub master_seed: u64,
    /// Timed repetitions per point in the timing study.
    pub timing_runs: usize,
}

impl ExperimentSpec {
    /// Reference scenario, 20 trials, one alternating round, T = 1000 expected-mode samples.
    pub fn reference(grid: Vec<usize>, algorithms: Vec<Algorithm>) -> Self {
        ExperimentSpec {
            scenario: Scenario::reference(),
            grid,
            trials: 20,
            algorithms,
            settings: PassiveSettings::default(),
            rounds: 1,
            streams: None,
            master_seed: 1,
            timing_runs: 7,
        }
    }

    pub fn mode(&self) -> MeasurementMode {
        self.settings.mode
    }

    pub(crate) fn channel_stream(&self, trial: usize) -> Stream {
        Stream::new(self.master_seed).path(&[CHANNEL_TAG, trial as u64])
    }

    pub(crate) fn sample_stream(&self, point: usize, trial: usize) -> Stream {
        Stream::new(self.master_seed).path(&[SAMPLES_TAG, point as u64, trial as u64])
    }

    /// Scenario with the stream count resolved for the given dimensions.
    pub(crate) fn scenario_at(&self, m: usize, n: usize) -> Scenario {
        let mut sc = self.scenario.clone();
        sc.params.m = m;
        sc.params.n = n;
        sc.params.s = self.streams.unwrap_or(m.min(sc.params.l));
        sc
    }

    /// Every invariant violation as `(key, message)`.
    pub fn violations(&self, study: Study) -> Vec<(&'static str, String)> {
        let mut out: Vec<(&'static str, String)> = Vec::new();
        if study != Study::Single && self.grid.is_empty() {
            out.push(("grid", format!("the {} grid must not be empty", study.sweep_variable())));
        }
        if self.trials == 0 {
            out.push(("trials", "trials must be ≥ 1".into()));
        }
        if self.rounds == 0 {
            out.push(("rounds", "rounds must be ≥ 1".into()));
        }
        if self.algorithms.is_empty() && !matches!(study, Study::Prop1 | Study::Timing) {
            out.push(("algorithms", "at least one algorithm is required".into()));
        }
        let points: Vec<(usize, usize)> = match study {
            Study::SweepM => self.grid.iter().map(|&m| (m, self.scenario.params.n)).collect(),
            Study::SweepN | Study::Gap | Study::Timing => {
                self.grid.iter().map(|&n| (self.scenario.params.m, n)).collect()
            }
            Study::Single | Study::Prop1 => vec![(self.scenario.params.m, self.scenario.params.n)],
        };
        for (m, n) in points {
            for (key, msg) in self.scenario_at(m, n).params.violations() {
                let msg = format!("{msg} (at M = {m}, N = {n})");
                if !out.iter().any(|(k, existing)| *k == key && *existing == msg) {
                    out.push((key, msg));
                }
            }
        }
        out.extend(self.scenario.geometry.violations());
        out.extend(self.scenario.fading.violations());
        let k = self.scenario.params.k;
        let uses_csm = self
            .algorithms
            .iter()
            .any(|a| matches!(a, Algorithm::BlindCsm | Algorithm::RankCsm));
        if study == Study::Prop1 {
            if let Some(&t) = self.grid.iter().find(|&&t| t < k) {
                out.push(("t_grid", format!("sample count {t} is below K = {k}")));
            }
        } else if (uses_csm || study == Study::Timing) && self.settings.samples < k {
            out.push(("samples", format!("T = {} must be ≥ K = {k}", self.settings.samples)));
        }
        if self.settings.samples == 0 {
            out.push(("samples", "T must be ≥ 1".into()));
        }
        if let MeasurementMode::Sampled { n_symbols: 0 } = self.settings.mode {
            out.push(("n_symbols", "n_symbols must be ≥ 1".into()));
        }
        let thr = self.settings.rank_threshold;
        if !(thr > 0.0 && thr < 1.0) {
            out.push(("rank_threshold", format!("must lie in (0, 1), got {thr}")));
        }
        if study == Study::Timing && self.timing_runs < 5 {
            out.push(("timing_runs", "timing needs at least 5 runs per point".into()));
        }
        out
    }

    /// Search-space guards that are not parameter errors.
    pub fn guard_violations(&self, study: Study) -> Vec<(&'static str, String)> {
        if !self.algorithms.contains(&Algorithm::Exhaustive) || matches!(study, Study::Prop1 | Study::Timing) {
            return Vec::new();
        }
        let k = self.scenario.params.k as u128;
        let ns: Vec<usize> = match study {
            Study::SweepN | Study::Gap => self.grid.clone(),
            _ => vec![self.scenario.params.n],
        };
        ns.into_iter()
            .filter_map(|n| {
                let size = k.checked_pow(n as u32).unwrap_or(u128::MAX);
                (size > crate::passive::EXHAUSTIVE_BUDGET as u128).then(|| {
                    (
                        "algorithms",
                        format!(
                            "exhaustive search over K^N = {k}^{n} arrays exceeds the budget of {}",
                            crate::passive::EXHAUSTIVE_BUDGET
                        ),
                    )
                })
            })
            .collect()
    }

    pub fn validate(&self, study: Study) -> Result<()> {
        if let Some((key, msg)) = self.violations(study).into_iter().next() {
            return Err(Error::invalid(key, msg));
        }
        Ok(())
    }
}
