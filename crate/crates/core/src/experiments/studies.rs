use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::tables::{GapRow, MatchRow, RateRow, ResultTable, Summary, TimingRow};
use super::{ExperimentSpec, Study};
use crate::error::{Error, Result};
use crate::mimo::{
    active_beamforming, capacity, capacity_bounds, effective_channel, MeasurementMode, MeasurementOracle, PhaseConfig,
    Precoder,
};
use crate::passive::{
    alternating_optimize, analytic_csm, blind_csm, bound_diagnostics, decide_levels, linear_search_csi, zps, Algorithm,
    BoundParams, PassiveMethod,
};
use crate::rng::Stream;
use crate::scenario::{ChannelSet, SystemParams};

/// Methods timed by [`timing_study`].
pub const TIMING_ALGORITHMS: [Algorithm; 3] = [Algorithm::LinearSearch, Algorithm::BlindCsm, Algorithm::BeamTraining];

/// Symbols per reading when sampled mode is requested without a count.
const DEFAULT_N_SYMBOLS: usize = 16;
/// Channel redraws allowed before the identifiability search gives up.
const MAX_REDRAWS: usize = 1000;
/// Target duration of one timed run.
const TIMING_TARGET: Duration = Duration::from_millis(20);

/// Water-filling precoder for the zero-phase channel.
fn initial_precoder(channels: &ChannelSet, params: &SystemParams) -> Result<Precoder> {
    let h = effective_channel(channels, &zps(params.n, params.k)?)?.h;
    Ok(active_beamforming(&h, params.power_w, params.s, params.noise_w)?.precoder)
}

struct TrialRates {
    rates: Vec<f64>,
    walls: Vec<f64>,
}

fn rate_study(spec: &ExperimentSpec, study: Study) -> Result<ResultTable> {
    spec.validate(study)?;
    let points: Vec<(usize, usize, usize)> = match study {
        Study::SweepM => spec.grid.iter().map(|&m| (m, m, spec.scenario.params.n)).collect(),
        Study::SweepN => spec.grid.iter().map(|&n| (n, spec.scenario.params.m, n)).collect(),
        _ => vec![(spec.scenario.params.n, spec.scenario.params.m, spec.scenario.params.n)],
    };
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..spec.trials).map(move |t| (p, t)))
        .collect();
    let results: Vec<TrialRates> = jobs
        .par_iter()
        .map(|&(p, trial)| {
            let (_, m, n) = points[p];
            let sc = spec.scenario_at(m, n);
            let channels = sc.draw(spec.channel_stream(trial))?;
            let mut rates = Vec::with_capacity(spec.algorithms.len());
            let mut walls = Vec::with_capacity(spec.algorithms.len());
            for &alg in &spec.algorithms {
                let method = PassiveMethod::new(alg, spec.settings);
                let start = Instant::now();
                let out = alternating_optimize(
                    &channels,
                    &sc.params,
                    &method,
                    spec.rounds,
                    spec.sample_stream(p, trial),
                )?;
                walls.push(start.elapsed().as_secs_f64());
                rates.push(out.final_capacity());
            }
            Ok(TrialRates { rates, walls })
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (p, &(value, _, _)) in points.iter().enumerate() {
        let trials = &results[p * spec.trials..(p + 1) * spec.trials];
        for (a, &alg) in spec.algorithms.iter().enumerate() {
            let rates: Vec<f64> = trials.iter().map(|t| t.rates[a]).collect();
            let walls: Vec<f64> = trials.iter().map(|t| t.walls[a]).collect();
            rows.push(RateRow {
                sweep_value: value,
                algorithm: alg,
                rate: Summary::of(&rates),
                mean_wall_s: Summary::of(&walls).mean,
            });
        }
    }
    let sweep = match study {
        Study::SweepM => "m",
        _ => "n",
    };
    Ok(ResultTable::Rate {
        sweep: sweep.to_string(),
        rows,
    })
}

/// Rate of every algorithm at the spec's own `(M, N)`.
pub fn single_study(spec: &ExperimentSpec) -> Result<ResultTable> {
    rate_study(spec, Study::Single)
}

/// Rate versus transmit antennas `M` over `spec.grid`.
pub fn sweep_tx_antennas(spec: &ExperimentSpec) -> Result<ResultTable> {
    rate_study(spec, Study::SweepM)
}

/// Rate versus surface elements `N` over `spec.grid`.
pub fn sweep_res(spec: &ExperimentSpec) -> Result<ResultTable> {
    rate_study(spec, Study::SweepN)
}

/// Capacity against its single-mode lower and Jensen upper approximations
/// versus `N`, with the precoder fixed at water-filling for zero phases.
pub fn gap_study(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate(Study::Gap)?;
    let jobs: Vec<(usize, usize)> = (0..spec.grid.len())
        .flat_map(|p| (0..spec.trials).map(move |t| (p, t)))
        .collect();
    // per job, per algorithm: (capacity, lower, upper)
    let results: Vec<Vec<[f64; 3]>> = jobs
        .par_iter()
        .map(|&(p, trial)| {
            let sc = spec.scenario_at(spec.scenario.params.m, spec.grid[p]);
            let params = &sc.params;
            let channels = sc.draw(spec.channel_stream(trial))?;
            let precoder = initial_precoder(&channels, params)?;
            spec.algorithms
                .iter()
                .map(|&alg| {
                    let theta = PassiveMethod::new(alg, spec.settings).optimize(
                        &channels,
                        &precoder,
                        params,
                        spec.sample_stream(p, trial),
                    )?;
                    let a = effective_channel(&channels, &theta)?.apply(&precoder)?;
                    let c = capacity(&a, params.noise_w)?;
                    let b = capacity_bounds(&a, params.noise_w, params.s)?;
                    Ok([c, b.lower, b.upper])
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (p, &n) in spec.grid.iter().enumerate() {
        let trials = &results[p * spec.trials..(p + 1) * spec.trials];
        for (a, &alg) in spec.algorithms.iter().enumerate() {
            let col = |f: &dyn Fn(&[f64; 3]) -> f64| Summary::of(&trials.iter().map(|t| f(&t[a])).collect::<Vec<_>>());
            rows.push(GapRow {
                n,
                algorithm: alg,
                capacity: col(&|v| v[0]),
                lower: col(&|v| v[1]),
                upper: col(&|v| v[2]),
                gap_lower: col(&|v| v[0] - v[1]),
                gap_upper: col(&|v| v[2] - v[0]),
            });
        }
    }
    Ok(ResultTable::Gap(rows))
}

/// Measurement modes compared by [`prop1_study`]: expected mode and sampled
/// mode with the spec's symbol count (or a default).
fn prop1_modes(spec: &ExperimentSpec) -> Vec<MeasurementMode> {
    let n_symbols = match spec.settings.mode {
        MeasurementMode::Sampled { n_symbols } => n_symbols,
        MeasurementMode::Expected => DEFAULT_N_SYMBOLS,
    };
    vec![MeasurementMode::Expected, MeasurementMode::Sampled { n_symbols }]
}

/// Convergence of blind CSM to the CSI linear-search phases over the sample
/// counts in `spec.grid`, in expected and sampled measurement modes.
pub fn prop1_study(spec: &ExperimentSpec) -> Result<ResultTable> {
    prop1_study_modes(spec, &prop1_modes(spec))
}

fn mode_name(mode: MeasurementMode) -> String {
    match mode {
        MeasurementMode::Expected => "expected".into(),
        MeasurementMode::Sampled { n_symbols } => format!("sampled_{n_symbols}"),
    }
}

/// First channel draw whose per-element optimum is unique, with the number of
/// rejected draws.
fn identifiable_draw(spec: &ExperimentSpec, params: &SystemParams) -> Result<(ChannelSet, Precoder, usize)> {
    let sc = spec.scenario_at(params.m, params.n);
    for attempt in 0..MAX_REDRAWS {
        let channels = sc.draw(spec.channel_stream(attempt))?;
        let precoder = initial_precoder(&channels, params)?;
        let diag = bound_diagnostics(
            &channels,
            &precoder,
            params.noise_w,
            params.k,
            BoundParams {
                samples: 1,
                q: 1.0,
                p0: 0.5,
            },
        )?;
        if diag.identifiable {
            return Ok((channels, precoder, attempt));
        }
    }
    Err(Error::Domain(format!(
        "no identifiable channel found in {MAX_REDRAWS} draws"
    )))
}

fn match_stats(found: &PhaseConfig, target: &PhaseConfig) -> (f64, f64) {
    let same = found
        .levels()
        .iter()
        .zip(target.levels())
        .filter(|(a, b)| a == b)
        .count();
    let exact = if same == target.len() { 1.0 } else { 0.0 };
    (exact, same as f64 / target.len() as f64)
}

/// [`prop1_study`] over an explicit list of measurement modes.
pub fn prop1_study_modes(spec: &ExperimentSpec, modes: &[MeasurementMode]) -> Result<ResultTable> {
    spec.validate(Study::Prop1)?;
    if modes.is_empty() {
        return Err(Error::invalid("mode", "at least one measurement mode is required"));
    }
    let sc = spec.scenario_at(spec.scenario.params.m, spec.scenario.params.n);
    let params = sc.params;
    let (channels, precoder, excluded) = identifiable_draw(spec, &params)?;
    let target = linear_search_csi(&channels, &precoder, params.k)?;

    let mut rows = Vec::new();
    for (p, &t) in spec.grid.iter().enumerate() {
        for (mi, &mode) in modes.iter().enumerate() {
            let meter = MeasurementOracle::new(&channels, &precoder, params.noise_w, mode)?;
            let point = p * modes.len() + mi;
            let stats: Vec<(f64, f64)> = (0..spec.trials)
                .into_par_iter()
                .map(|trial| {
                    let found = blind_csm(&meter, params.k, t, spec.sample_stream(point, trial))?;
                    Ok(match_stats(&found, &target))
                })
                .collect::<Result<_>>()?;
            rows.push(MatchRow {
                samples: Some(t),
                mode: mode_name(mode),
                exact_match: Summary::of(&stats.iter().map(|s| s.0).collect::<Vec<_>>()),
                element_match: Summary::of(&stats.iter().map(|s| s.1).collect::<Vec<_>>()),
                excluded_channels: excluded,
            });
        }
    }
    let limit = decide_levels(&analytic_csm(&channels, &precoder, params.noise_w, params.k)?, params.k);
    let (exact, element) = match_stats(&limit, &target);
    rows.push(MatchRow {
        samples: None,
        mode: "analytic".into(),
        exact_match: Summary::of(&[exact]),
        element_match: Summary::of(&[element]),
        excluded_channels: excluded,
    });
    Ok(ResultTable::Match(rows))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median wall time per call of the passive step of each timed method versus
/// `N`, with the precoder fixed at its initial value.
///
/// Each `(N, method)` pair is warmed up and given enough repetitions per run
/// to last about 20 ms. Runs are interleaved across grid points and execute
/// sequentially.
pub fn timing_study(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate(Study::Timing)?;
    struct Case {
        n: usize,
        algorithm: Algorithm,
        channels: ChannelSet,
        precoder: Precoder,
        params: SystemParams,
        reps: usize,
        times: Vec<f64>,
    }
    let mut cases = Vec::new();
    for &n in &spec.grid {
        let sc = spec.scenario_at(spec.scenario.params.m, n);
        let channels = sc.draw(spec.channel_stream(0))?;
        let precoder = initial_precoder(&channels, &sc.params)?;
        for alg in TIMING_ALGORITHMS {
            cases.push(Case {
                n,
                algorithm: alg,
                channels: channels.clone(),
                precoder: precoder.clone(),
                params: sc.params.clone(),
                reps: 1,
                times: Vec::with_capacity(spec.timing_runs),
            });
        }
    }
    let stream = Stream::new(spec.master_seed).child(super::SAMPLES_TAG);
    let run = |case: &Case, reps: usize| -> Result<Duration> {
        let method = PassiveMethod::new(case.algorithm, spec.settings);
        let start = Instant::now();
        for r in 0..reps {
            std::hint::black_box(method.optimize(
                &case.channels,
                &case.precoder,
                &case.params,
                stream.child(r as u64),
            )?);
        }
        Ok(start.elapsed())
    };
    for case in &mut cases {
        let once = run(case, 1)?.max(run(case, 1)?);
        let per = once.as_secs_f64().max(1e-9);
        case.reps = ((TIMING_TARGET.as_secs_f64() / per).ceil() as usize).clamp(1, 100_000);
    }
    for _ in 0..spec.timing_runs {
        for case in &mut cases {
            let elapsed = run(case, case.reps)?;
            case.times.push(elapsed.as_secs_f64() / case.reps as f64);
        }
    }
    let mut rows: Vec<TimingRow> = Vec::new();
    for case in &mut cases {
        let med = median(&mut case.times);
        let first = rows
            .iter()
            .find(|r| r.algorithm == case.algorithm)
            .map_or(med, |r| r.median_s);
        rows.push(TimingRow {
            n: case.n,
            algorithm: case.algorithm,
            median_s: med,
            ratio_to_first: med / first,
            runs: spec.timing_runs,
            reps_per_run: case.reps,
        });
    }
    Ok(ResultTable::Timing(rows))
}
