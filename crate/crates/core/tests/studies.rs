use isbeam::experiments::{
    gap_study, prop1_study, prop1_study_modes, single_study, sweep_res, sweep_tx_antennas, timing_study,
    ExperimentSpec, Study,
};
use isbeam::mimo::MeasurementMode;
use isbeam::passive::Algorithm;

fn small(grid: Vec<usize>, algorithms: Vec<Algorithm>) -> ExperimentSpec {
    let mut spec = ExperimentSpec::reference(grid, algorithms);
    spec.scenario.params.m = 8;
    spec.scenario.params.n = 32;
    spec.trials = 5;
    spec.settings.samples = 200;
    spec
}

#[test]
fn one_row_per_grid_point() {
    let mut spec = small(vec![2, 4, 8], vec![Algorithm::Zps]);
    spec.trials = 1;
    let table = sweep_tx_antennas(&spec).unwrap();
    let rows = table.rate_rows();
    assert_eq!(rows.iter().map(|r| r.sweep_value).collect::<Vec<_>>(), vec![2, 4, 8]);
    assert!(rows
        .iter()
        .all(|r| r.rate.mean >= 0.0 && r.rate.count == 1 && r.mean_wall_s >= 0.0));
}

#[test]
fn single_point_sweep_matches_single_study() {
    let algs = vec![Algorithm::Zps, Algorithm::BlindCsm, Algorithm::LinearSearch];
    let mut spec = small(vec![32], algs.clone());
    let swept = sweep_res(&spec).unwrap();
    spec.grid.clear();
    let single = single_study(&spec).unwrap();
    for alg in algs {
        assert_eq!(swept.rate(32, alg).unwrap().rate, single.rate(32, alg).unwrap().rate);
    }
}

#[test]
fn blind_beats_zps_at_every_n() {
    let mut spec = ExperimentSpec::reference(vec![100, 200, 400], vec![Algorithm::Zps, Algorithm::BlindCsm]);
    spec.scenario.params.m = 16;
    let table = sweep_res(&spec).unwrap();
    for &n in &spec.grid {
        let blind = table.rate(n, Algorithm::BlindCsm).unwrap().rate.mean;
        let zps = table.rate(n, Algorithm::Zps).unwrap().rate.mean;
        assert!(blind >= zps, "N = {n}: blind {blind} < zps {zps}");
    }
}

#[test]
fn blind_beats_beam_training_across_transmit_antennas() {
    let spec = ExperimentSpec::reference(vec![8, 16, 32, 64], vec![Algorithm::BlindCsm, Algorithm::BeamTraining]);
    let table = sweep_tx_antennas(&spec).unwrap();
    for &m in &spec.grid {
        let blind = table.rate(m, Algorithm::BlindCsm).unwrap().rate;
        let bt = table.rate(m, Algorithm::BeamTraining).unwrap().rate;
        let se = (blind.stderr.powi(2) + bt.stderr.powi(2)).sqrt();
        assert!(blind.mean - bt.mean > -2.0 * se, "M = {m}: blind {blind:?} vs {bt:?}");
    }
}

#[test]
fn single_stream_gaps_vanish() {
    let mut spec = small(vec![8, 32], vec![Algorithm::Zps, Algorithm::LinearSearch]);
    spec.streams = Some(1);
    for row in gap_study(&spec).unwrap().gap_rows() {
        assert!(
            row.gap_lower.mean.abs() < 1e-9 && row.gap_upper.mean.abs() < 1e-9,
            "{row:?}"
        );
    }
}

#[test]
fn gaps_are_non_negative() {
    let spec = small(
        vec![8, 32, 64],
        vec![Algorithm::Zps, Algorithm::BlindCsm, Algorithm::LinearSearch],
    );
    for row in gap_study(&spec).unwrap().gap_rows() {
        assert!(row.gap_lower.mean >= -1e-9 && row.gap_upper.mean >= -1e-9, "{row:?}");
        assert!(row.lower.mean <= row.capacity.mean + 1e-9 && row.capacity.mean <= row.upper.mean + 1e-9);
    }
}

fn prop1_small(grid: Vec<usize>, n: usize) -> ExperimentSpec {
    let mut spec = ExperimentSpec::reference(grid, vec![Algorithm::BlindCsm]);
    spec.scenario.params.m = 2;
    spec.scenario.params.l = 2;
    spec.scenario.params.n = n;
    spec.scenario.params.k = 4;
    spec.trials = 40;
    spec
}

#[test]
fn match_rate_grows_with_samples() {
    let spec = prop1_small(vec![100, 1000, 10_000, 100_000], 4);
    let table = prop1_study_modes(&spec, &[MeasurementMode::Expected]).unwrap();
    let rows: Vec<_> = table.match_rows().iter().filter(|r| r.samples.is_some()).collect();
    assert_eq!(rows.len(), 4);
    let mut inversions = 0;
    for w in rows.windows(2) {
        let (a, b) = (&w[0].exact_match, &w[1].exact_match);
        if b.mean < a.mean {
            inversions += 1;
            assert!(a.mean - b.mean <= 2.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt());
        }
    }
    assert!(inversions <= 1);
    assert!(rows[3].exact_match.mean >= 0.95);
    let limit = table.match_rows().iter().find(|r| r.samples.is_none()).unwrap();
    assert_eq!(limit.exact_match.mean, 1.0);
    assert_eq!(limit.mode, "analytic");
}

#[test]
fn single_element_matches_quickly() {
    let spec = prop1_small(vec![200], 1);
    let table = prop1_study_modes(&spec, &[MeasurementMode::Expected]).unwrap();
    assert_eq!(table.match_rows()[0].exact_match.mean, 1.0);
}

#[test]
fn prop1_reports_both_modes() {
    let mut spec = prop1_small(vec![1000], 4);
    spec.trials = 5;
    let table = prop1_study(&spec).unwrap();
    let modes: Vec<&str> = table.match_rows().iter().map(|r| r.mode.as_str()).collect();
    assert_eq!(modes, vec!["expected", "sampled_16", "analytic"]);
    assert!(table
        .match_rows()
        .iter()
        .all(|r| r.element_match.mean >= r.exact_match.mean));
}

#[test]
fn beam_training_is_cheaper_than_blind_csm() {
    let mut spec = ExperimentSpec::reference(vec![100], Vec::new());
    spec.timing_runs = 5;
    let table = timing_study(&spec).unwrap();
    let time = |alg| {
        table
            .timing_rows()
            .iter()
            .find(|r| r.algorithm == alg)
            .unwrap()
            .median_s
    };
    assert!(time(Algorithm::BeamTraining) < time(Algorithm::BlindCsm));
    assert!(table
        .timing_rows()
        .iter()
        .all(|r| r.median_s > 0.0 && r.ratio_to_first == 1.0));
}

#[test]
fn invalid_specs_are_rejected() {
    let spec = small(Vec::new(), vec![Algorithm::Zps]);
    assert!(sweep_tx_antennas(&spec).is_err());
    assert!(single_study(&spec).is_ok());

    let mut spec = small(vec![8], vec![Algorithm::Zps]);
    spec.trials = 0;
    assert!(spec.violations(Study::SweepM).iter().any(|(k, _)| *k == "trials"));

    let mut spec = prop1_small(vec![2], 4);
    spec.trials = 1;
    assert!(prop1_study(&spec).is_err());

    let mut spec = small(vec![8], vec![Algorithm::Exhaustive]);
    spec.scenario.params.n = 20;
    assert!(spec.violations(Study::Single).is_empty());
    assert_eq!(spec.guard_violations(Study::Single).len(), 1);
}
