use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, is_finite, sorted_svd, CMatrix};
use crate::Complex64;

/// Transmit beamforming matrix `W`, `M × S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub w: CMatrix,
}

impl Precoder {
    pub fn streams(&self) -> usize {
        self.w.ncols()
    }

    /// `‖W‖²_F`.
    pub fn power(&self) -> f64 {
        frobenius_sq(&self.w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActiveBeamforming {
    pub precoder: Precoder,
    /// Power per eigenmode, in descending order of channel gain.
    pub powers: Vec<f64>,
    /// Normalized gains `σ_i²(H)/σ²` of the selected modes.
    pub gains: Vec<f64>,
    pub water_level: f64,
    /// Set when `H = 0` and an isotropic precoder was returned instead.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaterFilling {
    pub powers: Vec<f64>,
    pub water_level: f64,
}

/// Maximizes `Σ log(1 + p_i·g_i)` subject to `Σ p_i = total`, `p_i ≥ 0`.
///
/// `gains` may be in any order; modes with zero gain receive no power. Returns
/// `None` when no gain is positive.
pub fn water_fill(gains: &[f64], total: f64) -> Option<WaterFilling> {
    let mut order: Vec<usize> = (0..gains.len()).filter(|&i| gains[i] > 0.0).collect();
    if order.is_empty() {
        return None;
    }
    order.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]));
    // Largest active set whose weakest mode still lies below the water level.
    let mut inv_sum = 0.0;
    let mut level = 0.0;
    let mut active = 0;
    for (count, &i) in order.iter().enumerate() {
        let inv = 1.0 / gains[i];
        let candidate = (total + inv_sum + inv) / (count + 1) as f64;
        if candidate - inv <= 0.0 {
            break;
        }
        inv_sum += inv;
        level = candidate;
        active = count + 1;
    }
    let mut powers = vec![0.0; gains.len()];
    for &i in &order[..active] {
        powers[i] = level - 1.0 / gains[i];
    }
    Some(WaterFilling {
        powers,
        water_level: level,
    })
}

/// Eigenmode precoding with water-filling over the top `streams` right singular
/// vectors of `h`.
pub fn active_beamforming(h: &CMatrix, power: f64, streams: usize, noise_power: f64) -> Result<ActiveBeamforming> {
    let (_, m) = h.shape();
    if streams == 0 || streams > h.nrows().min(m) {
        return Err(Error::invalid(
            "s",
            format!("stream count {streams} must lie in [1, {}]", h.nrows().min(m)),
        ));
    }
    if !(power > 0.0) || !(noise_power > 0.0) {
        return Err(Error::Domain("power and noise power must be positive".into()));
    }
    if !is_finite(h) {
        return Err(Error::NonFinite("H"));
    }
    let (sigma, v) = sorted_svd(h);
    let gains: Vec<f64> = sigma[..streams].iter().map(|s| s * s / noise_power).collect();
    match water_fill(&gains, power) {
        Some(wf) => {
            let mut w = CMatrix::zeros(m, streams);
            for (c, p) in wf.powers.iter().enumerate() {
                let amp = p.sqrt();
                w.column_mut(c).copy_from(&(v.column(c) * Complex64::new(amp, 0.0)));
            }
            Ok(ActiveBeamforming {
                precoder: Precoder { w },
                powers: wf.powers,
                gains,
                water_level: wf.water_level,
                degenerate: false,
            })
        }
        None => {
            let per = power / streams as f64;
            let w = CMatrix::from_fn(m, streams, |r, c| {
                if r == c {
                    Complex64::new(per.sqrt(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            Ok(ActiveBeamforming {
                precoder: Precoder { w },
                powers: vec![per; streams],
                gains,
                water_level: f64::INFINITY,
                degenerate: true,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex_gaussian;
    use crate::mimo::capacity;
    use crate::rng::Stream;

    /// Largest violation of the KKT conditions of water-filling.
    fn kkt_residual(gains: &[f64], powers: &[f64], total: f64) -> f64 {
        let level = gains
            .iter()
            .zip(powers)
            .filter(|(_, &p)| p > 0.0)
            .map(|(g, p)| 1.0 / g + p)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut r = (powers.iter().sum::<f64>() - total).abs();
        for (g, &p) in gains.iter().zip(powers) {
            r = r.max((-p).max(0.0));
            if p > 0.0 {
                r = r.max((1.0 / g + p - level).abs());
            } else if *g > 0.0 {
                r = r.max((level - 1.0 / g).max(0.0));
            }
        }
        r
    }

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_fn(values.len(), values.len(), |r, c| {
            Complex64::new(if r == c { values[r] } else { 0.0 }, 0.0)
        })
    }

    #[test]
    fn symmetric_channel_splits_equally() {
        let bf = active_beamforming(&diag(&[1.0, 1.0]), 2.0, 2, 1.0).unwrap();
        assert!((bf.powers[0] - 1.0).abs() < 1e-12 && (bf.powers[1] - 1.0).abs() < 1e-12);
        assert!((bf.precoder.power() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_stream_uses_dominant_mode() {
        let h = diag(&[0.5, 2.0, 1.0]);
        let bf = active_beamforming(&h, 3.0, 1, 1.0).unwrap();
        assert_eq!(bf.powers.len(), 1);
        assert!((bf.powers[0] - 3.0).abs() < 1e-12);
        // all energy on the second transmit antenna
        assert!((bf.precoder.w[(1, 0)].norm_sqr() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn weak_mode_gets_nothing_at_low_power() {
        let bf = active_beamforming(&diag(&[10.0, 0.01]), 0.5, 2, 1.0).unwrap();
        assert!((bf.powers[0] - 0.5).abs() < 1e-12);
        assert_eq!(bf.powers[1], 0.0);
        assert!(kkt_residual(&bf.gains, &bf.powers, 0.5) < 1e-9);
    }

    #[test]
    fn zero_channel_is_isotropic_and_flagged() {
        let bf = active_beamforming(&CMatrix::zeros(2, 3), 4.0, 2, 1.0).unwrap();
        assert!(bf.degenerate);
        assert!((bf.precoder.power() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn random_channels_satisfy_kkt() {
        for seed in 0..100 {
            let mut rng = Stream::new(seed).rng();
            let h = CMatrix::from_fn(4, 6, |_, _| complex_gaussian(&mut rng, 1.0));
            let p = 0.1 + seed as f64 * 0.2;
            let bf = active_beamforming(&h, p, 4, 1.0).unwrap();
            assert!(kkt_residual(&bf.gains, &bf.powers, p) < 1e-9);
            assert!((bf.precoder.power() - p).abs() < 1e-9);
            // capacity of the precoded channel equals the water-filling rate
            let rate: f64 = bf.gains.iter().zip(&bf.powers).map(|(g, p)| (1.0 + g * p).log2()).sum();
            let cap = capacity(&(&h * &bf.precoder.w), 1.0).unwrap();
            assert!((cap - rate).abs() < 1e-9 * rate.max(1.0));
        }
    }

    #[test]
    fn capacity_monotone_in_power() {
        for seed in 0..30 {
            let mut rng = Stream::new(900 + seed).rng();
            let h = CMatrix::from_fn(3, 5, |_, _| complex_gaussian(&mut rng, 1.0));
            let c1 = capacity(&(&h * active_beamforming(&h, 1.0, 3, 1.0).unwrap().precoder.w), 1.0).unwrap();
            let c2 = capacity(&(&h * active_beamforming(&h, 2.0, 3, 1.0).unwrap().precoder.w), 1.0).unwrap();
            assert!(c2 >= c1);
        }
    }

    #[test]
    fn rejects_bad_stream_count() {
        assert!(active_beamforming(&diag(&[1.0, 1.0]), 1.0, 3, 1.0).is_err());
        assert!(active_beamforming(&diag(&[1.0, 1.0]), 1.0, 0, 1.0).is_err());
    }
}
