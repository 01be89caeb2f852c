//! Optimizers that never see channel matrices.

use super::samples::{collect_samples, csm_table, draw_configs, CsmTable, SampleBatch};
use super::RankProbe;
use crate::error::{Error, Result};
use crate::mimo::{PhaseConfig, PowerMeter};
use crate::rng::Stream;

fn check_csm_samples(k: usize, samples: usize) -> Result<()> {
    if samples < k {
        return Err(Error::invalid(
            "t",
            format!("conditional sample means need T ≥ K, got T = {samples}, K = {k}"),
        ));
    }
    Ok(())
}

/// Blind beamforming by conditional sample means of the summed received power.
///
/// Tries `samples` uniform random arrays, averages `g = Σ_i |y_i|²` over the
/// samples in which element `n` took level `k`, and picks the level with the
/// largest average for each element.
pub fn blind_csm<P: PowerMeter + ?Sized>(meter: &P, k: usize, samples: usize, stream: Stream) -> Result<PhaseConfig> {
    blind_csm_with_table(meter, k, samples, stream).map(|(c, _)| c)
}

/// [`blind_csm`] that also returns the learned table.
pub fn blind_csm_with_table<P: PowerMeter + ?Sized>(
    meter: &P,
    k: usize,
    samples: usize,
    stream: Stream,
) -> Result<(PhaseConfig, CsmTable)> {
    check_csm_samples(k, samples)?;
    let batch = collect_samples(meter, k, samples, stream)?;
    let table = csm_table(&batch)?;
    Ok((table.decide(), table))
}

/// Best sampled array by summed received power, earliest sample on ties.
pub fn beam_training<P: PowerMeter + ?Sized>(
    meter: &P,
    k: usize,
    samples: usize,
    stream: Stream,
) -> Result<PhaseConfig> {
    let batch = collect_samples(meter, k, samples, stream)?;
    Ok(best_by_power(&batch))
}

pub(crate) fn best_by_power(batch: &SampleBatch) -> PhaseConfig {
    let mut best = (0, batch.utility(0));
    for t in 1..batch.len() {
        let g = batch.utility(t);
        if g > best.1 {
            best = (t, g);
        }
    }
    batch.config(best.0)
}

/// Best sampled array by reported channel rank, then by summed power, then by
/// sample index.
pub fn rank_beam_training<P, R>(meter: &P, probe: &R, k: usize, samples: usize, stream: Stream) -> Result<PhaseConfig>
where
    P: PowerMeter + ?Sized,
    R: RankProbe + ?Sized,
{
    let batch = collect_samples(meter, k, samples, stream)?;
    let ranks: Vec<usize> = (0..batch.len()).map(|t| probe.rank(&batch.config(t))).collect();
    Ok(best_by_rank(&batch, &ranks))
}

pub(crate) fn best_by_rank(batch: &SampleBatch, ranks: &[usize]) -> PhaseConfig {
    let mut best = 0;
    for t in 1..batch.len() {
        let better = ranks[t] > ranks[best] || (ranks[t] == ranks[best] && batch.utility(t) > batch.utility(best));
        if better {
            best = t;
        }
    }
    batch.config(best)
}

/// Conditional sample means with the reported channel rank as the utility.
pub fn rank_csm<R: RankProbe + ?Sized>(probe: &R, k: usize, samples: usize, stream: Stream) -> Result<PhaseConfig> {
    check_csm_samples(k, samples)?;
    let n = probe.elements();
    let levels = draw_configs(n, k, samples, stream);
    let ranks: Vec<f64> = levels
        .chunks_exact(n)
        .map(|row| probe.rank(&PhaseConfig::new(row.to_vec(), k).expect("levels drawn in range")) as f64)
        .collect();
    Ok(CsmTable::from_utilities(&levels, n, k, &ranks)?.decide())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::mimo::{MeasurementMode, MeasurementOracle, Precoder};
    use crate::passive::{exhaustive, linear_search_csi};
    use crate::rng::SimRng;
    use crate::scenario::{ChannelSet, Scenario};
    use crate::Complex64;

    fn scalar_oracle(beta: f64, noise: f64) -> MeasurementOracle {
        let m = |v: f64| CMatrix::from_element(1, 1, Complex64::new(v, 0.0));
        let ch = ChannelSet::new(m(1.0), m(beta), m(1.0)).unwrap();
        MeasurementOracle::new(&ch, &Precoder { w: m(1.0) }, noise, MeasurementMode::Expected).unwrap()
    }

    #[test]
    fn scalar_closed_form() {
        // E[g | θ=0] = 2.25 + σ², E[g | θ=π] = 0.25 + σ²
        let o = scalar_oracle(0.5, 0.1);
        let (cfg, table) = blind_csm_with_table(&o, 2, 200, Stream::new(1)).unwrap();
        assert_eq!(cfg.levels(), &[0]);
        assert!((table.mean(0, 0).unwrap() - 2.35).abs() < 1e-12);
        assert!((table.mean(0, 1).unwrap() - 0.35).abs() < 1e-12);
    }

    #[test]
    fn zero_reflection_is_all_tie() {
        let o = scalar_oracle(0.0, 1.0);
        assert_eq!(blind_csm(&o, 4, 100, Stream::new(3)).unwrap().levels(), &[0]);
    }

    #[test]
    fn too_few_samples() {
        let o = scalar_oracle(0.5, 1.0);
        assert!(blind_csm(&o, 4, 3, Stream::new(0)).is_err());
        assert!(blind_csm(&o, 4, 4, Stream::new(0)).is_ok());
    }

    fn small_setup(seed: u64) -> (ChannelSet, Precoder, f64) {
        let mut sc = Scenario::reference();
        sc.params.m = 2;
        sc.params.l = 2;
        sc.params.n = 2;
        sc.params.s = 2;
        let ch = sc.draw(Stream::new(seed)).unwrap();
        let h = crate::mimo::effective_channel(&ch, &PhaseConfig::zeros(2, 2).unwrap())
            .unwrap()
            .h;
        let w = crate::mimo::active_beamforming(&h, sc.params.power_w, 2, sc.params.noise_w)
            .unwrap()
            .precoder;
        (ch, w, sc.params.noise_w)
    }

    #[test]
    fn recovers_linear_search_with_many_samples() {
        let (ch, w, noise) = small_setup(21);
        let csi = linear_search_csi(&ch, &w, 2).unwrap();
        let o = MeasurementOracle::new(&ch, &w, noise, MeasurementMode::Expected).unwrap();
        let hits = (0..100)
            .filter(|&r| blind_csm(&o, 2, 10_000, Stream::new(r)).unwrap() == csi)
            .count();
        assert!(hits >= 95, "{hits}/100");
    }

    /// A meter that applies `a·p + b` to another meter's readings.
    struct Affine<'a, P> {
        inner: &'a P,
        scale: f64,
        offset: f64,
    }

    impl<P: PowerMeter> PowerMeter for Affine<'_, P> {
        fn rx_antennas(&self) -> usize {
            self.inner.rx_antennas()
        }
        fn elements(&self) -> usize {
            self.inner.elements()
        }
        fn measure(&self, theta: &PhaseConfig, rng: &mut SimRng) -> Vec<f64> {
            self.inner
                .measure(theta, rng)
                .into_iter()
                .map(|p| self.scale * p + self.offset)
                .collect()
        }
    }

    #[test]
    fn invariant_to_affine_rescaling() {
        let mut sc = Scenario::reference();
        sc.params.n = 16;
        let ch = sc.draw(Stream::new(4)).unwrap();
        let h = crate::mimo::effective_channel(&ch, &PhaseConfig::zeros(16, 4).unwrap())
            .unwrap()
            .h;
        let w = crate::mimo::active_beamforming(&h, 1.0, 4, 1e-12).unwrap().precoder;
        let o = MeasurementOracle::new(&ch, &w, 1e-12, MeasurementMode::Expected).unwrap();
        let base = blind_csm(&o, 4, 500, Stream::new(8)).unwrap();
        for (scale, offset) in [(1.0, 1e-9), (1e6, 0.0), (3.5, 2e-8)] {
            let a = Affine {
                inner: &o,
                scale,
                offset,
            };
            assert_eq!(blind_csm(&a, 4, 500, Stream::new(8)).unwrap(), base);
        }
    }

    #[test]
    fn beam_training_examples() {
        let (ch, w, noise) = small_setup(5);
        let o = MeasurementOracle::new(&ch, &w, noise, MeasurementMode::Expected).unwrap();
        let only = beam_training(&o, 2, 1, Stream::new(2)).unwrap();
        let batch = collect_samples(&o, 2, 1, Stream::new(2)).unwrap();
        assert_eq!(only, batch.config(0));

        // a batch covering all four arrays picks the exhaustive sum-power maximizer
        let configs: Vec<PhaseConfig> = (0..4)
            .map(|c| PhaseConfig::new(vec![c / 2, c % 2], 2).unwrap())
            .collect();
        let mut rng = Stream::new(0).rng();
        let powers: Vec<Vec<f64>> = configs.iter().map(|c| o.measure(c, &mut rng)).collect();
        let full = SampleBatch::from_rows(&configs, &powers).unwrap();
        let by_f = exhaustive(
            |t| {
                let a = crate::mimo::effective_channel(&ch, t).unwrap().apply(&w).unwrap();
                crate::mimo::sum_power(&a)
            },
            2,
            2,
        )
        .unwrap();
        assert_eq!(best_by_power(&full), by_f);
    }

    #[test]
    fn rank_ties_fall_back_to_power_then_index() {
        let configs: Vec<PhaseConfig> = (0..3).map(|c| PhaseConfig::new(vec![c], 4).unwrap()).collect();
        let batch = SampleBatch::from_rows(&configs, &[vec![1.0], vec![3.0], vec![3.0]]).unwrap();
        assert_eq!(best_by_rank(&batch, &[2, 2, 2]).levels(), &[1]);
        assert_eq!(best_by_rank(&batch, &[2, 1, 2]).levels(), &[2]);
        assert_eq!(best_by_rank(&batch, &[3, 2, 2]).levels(), &[0]);
        assert_eq!(best_by_rank(&batch, &[2, 2, 2]), best_by_power(&batch));
    }

    struct FixedRank(usize, usize);

    impl RankProbe for FixedRank {
        fn elements(&self) -> usize {
            self.0
        }
        fn rank(&self, _: &PhaseConfig) -> usize {
            self.1
        }
    }

    /// Rank 2 when element 0 sits at level 1, rank 1 otherwise.
    struct LevelRank;

    impl RankProbe for LevelRank {
        fn elements(&self) -> usize {
            1
        }
        fn rank(&self, t: &PhaseConfig) -> usize {
            if t.level(0) == 1 {
                2
            } else {
                1
            }
        }
    }

    #[test]
    fn rank_csm_examples() {
        assert_eq!(
            rank_csm(&FixedRank(5, 3), 4, 50, Stream::new(1)).unwrap().levels(),
            &[0; 5]
        );
        assert_eq!(rank_csm(&LevelRank, 2, 20, Stream::new(1)).unwrap().levels(), &[1]);
        assert!(rank_csm(&LevelRank, 2, 1, Stream::new(1)).is_err());
    }

    #[test]
    fn rank_beam_training_single_sample() {
        let (ch, w, noise) = small_setup(6);
        let o = MeasurementOracle::new(&ch, &w, noise, MeasurementMode::Expected).unwrap();
        let got = rank_beam_training(&o, &FixedRank(2, 2), 2, 1, Stream::new(4)).unwrap();
        assert_eq!(got, collect_samples(&o, 2, 1, Stream::new(4)).unwrap().config(0));
        // equal ranks reduce to beam training over the same batch
        let a = rank_beam_training(&o, &FixedRank(2, 2), 2, 64, Stream::new(9)).unwrap();
        let b = beam_training(&o, 2, 64, Stream::new(9)).unwrap();
        assert_eq!(a, b);
    }
}
