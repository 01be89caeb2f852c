use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mimo::{unit_phasor, PhaseConfig, PowerMeter, Precoder, Surrogate};
use crate::rng::{SimRng, Stream};
use crate::scenario::ChannelSet;

/// Work size (`T·N·L`) above which sample collection runs in parallel.
const PARALLEL_WORK: usize = 1 << 22;

/// `T` random phase arrays and the per-antenna powers measured under each.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    n: usize,
    k: usize,
    l: usize,
    /// `T × N`, row-major.
    levels: Vec<usize>,
    /// `T × L`, row-major.
    powers: Vec<f64>,
}

impl SampleBatch {
    /// Builds a batch from explicit rows.
    pub fn from_rows(configs: &[PhaseConfig], powers: &[Vec<f64>]) -> Result<Self> {
        let first = configs
            .first()
            .ok_or_else(|| Error::invalid("t", "a batch needs at least one sample"))?;
        if configs.len() != powers.len() {
            return Err(Error::Dimension(format!(
                "{} configurations but {} power rows",
                configs.len(),
                powers.len()
            )));
        }
        let (n, k) = (first.len(), first.k());
        let l = powers[0].len();
        let mut batch = SampleBatch {
            n,
            k,
            l,
            levels: Vec::with_capacity(n * configs.len()),
            powers: Vec::with_capacity(l * configs.len()),
        };
        for (c, p) in configs.iter().zip(powers) {
            if c.len() != n || c.k() != k || p.len() != l {
                return Err(Error::Dimension("inconsistent sample rows".into()));
            }
            if p.iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::Domain("measured powers must be non-negative".into()));
            }
            batch.levels.extend_from_slice(c.levels());
            batch.powers.extend_from_slice(p);
        }
        Ok(batch)
    }

    pub fn len(&self) -> usize {
        self.powers.len() / self.l
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn elements(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rx_antennas(&self) -> usize {
        self.l
    }

    pub fn levels(&self, t: usize) -> &[usize] {
        &self.levels[t * self.n..(t + 1) * self.n]
    }

    pub fn powers(&self, t: usize) -> &[f64] {
        &self.powers[t * self.l..(t + 1) * self.l]
    }

    pub fn config(&self, t: usize) -> PhaseConfig {
        PhaseConfig::new(self.levels(t).to_vec(), self.k).expect("batch levels are valid")
    }

    /// `g(Θ_t) = Σ_i |y_it|²`.
    pub fn utility(&self, t: usize) -> f64 {
        self.powers(t).iter().sum()
    }

    pub fn utilities(&self) -> Vec<f64> {
        (0..self.len()).map(|t| self.utility(t)).collect()
    }

    pub(crate) fn flat_levels(&self) -> &[usize] {
        &self.levels
    }

    /// Writes `t, theta_1..theta_N, power_1..power_L` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.n).map(|n| format!("theta_{n}")));
        header.extend((1..=self.l).map(|i| format!("power_{i}")));
        w.write_record(&header)?;
        for t in 0..self.len() {
            let mut row = vec![t.to_string()];
            row.extend(self.levels(t).iter().map(|l| l.to_string()));
            row.extend(self.powers(t).iter().map(|p| format!("{p:e}")));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn random_levels(rng: &mut SimRng, n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

/// `T` phase arrays with every level i.i.d. uniform on `0..k`. Sample `t` is
/// drawn from `stream.child(t)`, `T × N` row-major.
pub fn draw_configs(n: usize, k: usize, samples: usize, stream: Stream) -> Vec<usize> {
    let mut out = Vec::with_capacity(n * samples);
    for t in 0..samples {
        out.extend(random_levels(&mut stream.child(t as u64).rng(), n, k));
    }
    out
}

/// Tries `samples` uniform random phase arrays and records the measured powers.
///
/// Sample `t` draws its levels and any measurement noise from
/// `stream.child(t)`, so the batch does not depend on evaluation order.
pub fn collect_samples<P: PowerMeter + ?Sized>(
    meter: &P,
    k: usize,
    samples: usize,
    stream: Stream,
) -> Result<SampleBatch> {
    if samples == 0 {
        return Err(Error::invalid("t", "sample count must be ≥ 1"));
    }
    if k < 2 {
        return Err(Error::invalid("k", "K must be ≥ 2"));
    }
    let n = meter.elements();
    let l = meter.rx_antennas();
    let one = |t: usize| {
        let mut rng = stream.child(t as u64).rng();
        let levels = random_levels(&mut rng, n, k);
        let theta = PhaseConfig::new(levels, k).expect("levels drawn in range");
        let powers = meter.measure(&theta, &mut rng);
        (theta, powers)
    };
    let rows: Vec<(PhaseConfig, Vec<f64>)> = if samples * n * l >= PARALLEL_WORK {
        (0..samples).into_par_iter().map(one).collect()
    } else {
        (0..samples).map(one).collect()
    };
    let mut batch = SampleBatch {
        n,
        k,
        l,
        levels: Vec::with_capacity(samples * n),
        powers: Vec::with_capacity(samples * l),
    };
    for (theta, p) in rows {
        batch.levels.extend_from_slice(theta.levels());
        batch.powers.extend_from_slice(&p);
    }
    Ok(batch)
}

/// Conditional sample means of a per-sample utility, grouped by the level each
/// element took.
#[derive(Debug, Clone, PartialEq)]
pub struct CsmTable {
    n: usize,
    k: usize,
    samples: usize,
    /// `N × K`; NaN marks an empty group.
    means: Vec<f64>,
    counts: Vec<usize>,
}

impl CsmTable {
    /// Groups `utilities[t]` by `levels[t·N + n]` for every element `n`.
    pub fn from_utilities(levels: &[usize], n: usize, k: usize, utilities: &[f64]) -> Result<Self> {
        let samples = utilities.len();
        if levels.len() != samples * n {
            return Err(Error::Dimension(format!(
                "{} levels for {samples} samples of {n} elements",
                levels.len()
            )));
        }
        let mut sums = vec![0.0; n * k];
        let mut counts = vec![0usize; n * k];
        for (row, &u) in levels.chunks_exact(n.max(1)).zip(utilities) {
            for (e, &lv) in row.iter().enumerate() {
                if lv >= k {
                    return Err(Error::Domain(format!("level {lv} outside [0, {k})")));
                }
                sums[e * k + lv] += u;
                counts[e * k + lv] += 1;
            }
        }
        let means = sums
            .iter()
            .zip(&counts)
            .map(|(s, &c)| if c == 0 { f64::NAN } else { s / c as f64 })
            .collect();
        Ok(CsmTable {
            n,
            k,
            samples,
            means,
            counts,
        })
    }

    pub fn elements(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn count(&self, n: usize, k: usize) -> usize {
        self.counts[n * self.k + k]
    }

    /// The conditional mean, `None` for an empty group.
    pub fn mean(&self, n: usize, k: usize) -> Option<f64> {
        (self.count(n, k) > 0).then(|| self.means[n * self.k + k])
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.means[n * self.k..(n + 1) * self.k]
    }

    pub fn empty_cells(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|n| (0..self.k).map(move |k| (n, k)))
            .filter(|&(n, k)| self.count(n, k) == 0)
            .collect()
    }

    /// Per element, the level with the largest conditional mean; empty groups
    /// are skipped and ties go to the smallest level.
    pub fn decide(&self) -> PhaseConfig {
        let rows: Vec<&[f64]> = (0..self.n).map(|n| self.row(n)).collect();
        decide_levels(&rows, self.k)
    }

    /// Writes `n, k, count, mean` rows; empty groups have an empty mean.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "k", "count", "mean"])?;
        for n in 0..self.n {
            for k in 0..self.k {
                let mean = self.mean(n, k).map(|m| format!("{m:e}")).unwrap_or_default();
                w.write_record(&[n.to_string(), k.to_string(), self.count(n, k).to_string(), mean])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Row-wise argmax over finite entries, smallest index on ties, level 0 for a
/// row with no finite entry.
pub fn decide_levels<R: AsRef<[f64]>>(rows: &[R], k: usize) -> PhaseConfig {
    let levels = rows
        .iter()
        .map(|row| {
            let mut best: Option<(usize, f64)> = None;
            for (lv, &v) in row.as_ref().iter().enumerate() {
                if v.is_finite() && best.is_none_or(|(_, b)| v > b) {
                    best = Some((lv, v));
                }
            }
            best.map_or(0, |(lv, _)| lv)
        })
        .collect();
    PhaseConfig::new(levels, k).expect("decided levels are in range")
}

/// The summed-power CSM table of a batch.
pub fn csm_table(batch: &SampleBatch) -> Result<CsmTable> {
    CsmTable::from_utilities(batch.flat_levels(), batch.n, batch.k, &batch.utilities())
}

/// Infinite-sample conditional means `E[g | θ_n = kω]` under uniform random
/// phases, in closed form:
///
/// `Σ_ij |α_ij|² + Σ_inj |β_inj|² + L·σ² + 2·Re{c_n·e^{jkω}}`.
pub fn analytic_csm(channels: &ChannelSet, precoder: &Precoder, noise_power: f64, k: usize) -> Result<Vec<Vec<f64>>> {
    let s = Surrogate::new(channels, precoder)?;
    let alpha_power: f64 = s.alpha.iter().map(|z| z.norm_sqr()).sum();
    let l = s.g.nrows();
    let n_el = s.fw.nrows();
    let mut beta_power = 0.0;
    for n in 0..n_el {
        let fw_row: f64 = s.fw.row(n).iter().map(|z| z.norm_sqr()).sum();
        let g_col: f64 = s.g.column(n).iter().map(|z| z.norm_sqr()).sum();
        beta_power += fw_row * g_col;
    }
    let base = alpha_power + beta_power + l as f64 * noise_power;
    Ok(s.coefficients()
        .iter()
        .map(|c| (0..k).map(|lv| base + 2.0 * (c * unit_phasor(lv, k)).re).collect())
        .collect())
}
