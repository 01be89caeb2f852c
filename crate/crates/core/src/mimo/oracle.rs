use serde::{Deserialize, Serialize};

use super::{unit_phasor, PhaseConfig, Precoder};
use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian, CMatrix};
use crate::rng::SimRng;
use crate::scenario::ChannelSet;
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementMode {
    /// Exact expected power `Σ_j |A_ij|² + σ²`.
    Expected,
    /// Average of `|y_i|²` over `n_symbols` independent symbol and noise draws.
    Sampled { n_symbols: usize },
}

/// Per-receive-antenna power readings for a given phase array.
///
/// This is the only view of the environment that blind optimizers receive.
pub trait PowerMeter: Sync {
    fn rx_antennas(&self) -> usize;

    fn elements(&self) -> usize;

    /// Received power at each antenna under `theta`.
    fn measure(&self, theta: &PhaseConfig, rng: &mut SimRng) -> Vec<f64>;
}

/// Simulated receiver for a fixed channel realization and precoder.
///
/// Holds only the precoded factors `D·W`, `G` and `F·W` needed to form `A`
/// and exposes nothing but [`PowerMeter`] readings.
#[derive(Debug, Clone)]
pub struct MeasurementOracle {
    dw: CMatrix,
    g: CMatrix,
    fw: CMatrix,
    noise_power: f64,
    mode: MeasurementMode,
}

impl MeasurementOracle {
    pub fn new(channels: &ChannelSet, precoder: &Precoder, noise_power: f64, mode: MeasurementMode) -> Result<Self> {
        channels.check()?;
        if precoder.w.nrows() != channels.tx_antennas() {
            return Err(Error::Dimension(format!(
                "precoder has {} rows, channels have {} transmit antennas",
                precoder.w.nrows(),
                channels.tx_antennas()
            )));
        }
        if !(noise_power > 0.0) {
            return Err(Error::Domain(format!(
                "noise power must be positive, got {noise_power}"
            )));
        }
        if let MeasurementMode::Sampled { n_symbols: 0 } = mode {
            return Err(Error::invalid("n_symbols", "must be ≥ 1"));
        }
        Ok(MeasurementOracle {
            dw: &channels.d * &precoder.w,
            g: channels.g.clone(),
            fw: &channels.f * &precoder.w,
            noise_power,
            mode,
        })
    }

    pub fn mode(&self) -> MeasurementMode {
        self.mode
    }

    /// `A = D·W + G·Ψ·F·W` without forming `H`.
    fn precoded_channel(&self, theta: &PhaseConfig) -> CMatrix {
        let (l, s) = self.dw.shape();
        let k = theta.k();
        let mut a = self.dw.clone();
        let table: Vec<Complex64> = (0..k).map(|lv| unit_phasor(lv, k)).collect();
        let g = self.g.as_slice();
        let fw = self.fw.as_slice();
        let n_el = self.fw.nrows();
        let a_data = a.as_mut_slice();
        for (n, &lv) in theta.levels().iter().enumerate() {
            let ph = table[lv];
            let g_col = &g[n * l..(n + 1) * l];
            for j in 0..s {
                let t = fw[j * n_el + n] * ph;
                let a_col = &mut a_data[j * l..(j + 1) * l];
                for (ai, gi) in a_col.iter_mut().zip(g_col) {
                    *ai += gi * t;
                }
            }
        }
        a
    }
}

impl PowerMeter for MeasurementOracle {
    fn rx_antennas(&self) -> usize {
        self.dw.nrows()
    }

    fn elements(&self) -> usize {
        self.fw.nrows()
    }

    fn measure(&self, theta: &PhaseConfig, rng: &mut SimRng) -> Vec<f64> {
        assert_eq!(theta.len(), self.elements(), "phase array length");
        let a = self.precoded_channel(theta);
        let (l, s) = a.shape();
        match self.mode {
            MeasurementMode::Expected => a
                .row_iter()
                .map(|row| row.iter().map(|z| z.norm_sqr()).sum::<f64>() + self.noise_power)
                .collect(),
            MeasurementMode::Sampled { n_symbols } => {
                let mut acc = vec![0.0; l];
                let mut sym = vec![Complex64::new(0.0, 0.0); s];
                for _ in 0..n_symbols {
                    for x in sym.iter_mut() {
                        *x = complex_gaussian(rng, 1.0);
                    }
                    for (i, slot) in acc.iter_mut().enumerate() {
                        let mut y = complex_gaussian(rng, self.noise_power);
                        for (j, x) in sym.iter().enumerate() {
                            y += a[(i, j)] * x;
                        }
                        *slot += y.norm_sqr();
                    }
                }
                acc.iter().map(|v| v / n_symbols as f64).collect()
            }
        }
    }
}
