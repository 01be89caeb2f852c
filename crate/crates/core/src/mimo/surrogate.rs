//! The separable lower bound on the received sum power.
//!
//! With `α = D·W` and `β_inj = G_in·(F·W)_nj`, the sum power `f(Θ) = ‖H(Θ)·W‖²_F`
//! is bounded below by
//!
//! ```text
//! f_b(Θ) = 4 · Σ_n Re{ c_n · e^{jθ_n} },    c_n = Σ_i Σ_j conj(α_ij)·β_inj
//! ```
//!
//! which decouples across elements.

use num_complex::Complex64;

use super::{PhaseConfig, Precoder};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scenario::ChannelSet;

/// Per-element coefficients `c_n` of the surrogate for a fixed precoder.
#[derive(Debug, Clone, PartialEq)]
pub struct Surrogate {
    /// `α = D·W`, `L × S`.
    pub alpha: CMatrix,
    /// `F·W`, `N × S`; `β_inj = G_in·(F·W)_nj`.
    pub fw: CMatrix,
    pub g: CMatrix,
    coeffs: Vec<Complex64>,
}

impl Surrogate {
    pub fn new(channels: &ChannelSet, precoder: &Precoder) -> Result<Self> {
        channels.check()?;
        if precoder.w.nrows() != channels.tx_antennas() {
            return Err(Error::Dimension(format!(
                "precoder has {} rows, channels have {} transmit antennas",
                precoder.w.nrows(),
                channels.tx_antennas()
            )));
        }
        let alpha = &channels.d * &precoder.w;
        let fw = &channels.f * &precoder.w;
        // c_n = Σ_j (F·W)_nj · (αᴴ·G)_jn
        let ah_g = alpha.adjoint() * &channels.g;
        let coeffs = (0..fw.nrows())
            .map(|n| (0..fw.ncols()).map(|j| fw[(n, j)] * ah_g[(j, n)]).sum())
            .collect();
        Ok(Surrogate {
            alpha,
            fw,
            g: channels.g.clone(),
            coeffs,
        })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_in = Σ_j conj(α_ij)·β_inj` for one receive antenna and element.
    pub fn antenna_coefficient(&self, i: usize, n: usize) -> Complex64 {
        let g = self.g[(i, n)];
        (0..self.alpha.ncols())
            .map(|j| self.alpha[(i, j)].conj() * g * self.fw[(n, j)])
            .sum()
    }

    /// `β_inj`.
    pub fn beta(&self, i: usize, n: usize, j: usize) -> Complex64 {
        self.g[(i, n)] * self.fw[(n, j)]
    }

    /// `Re{c_n·e^{jφ}}` for every level φ of element `n`.
    pub fn element_scores(&self, n: usize, k: usize) -> Vec<f64> {
        (0..k)
            .map(|lv| (self.coeffs[n] * super::unit_phasor(lv, k)).re)
            .collect()
    }

    pub fn value(&self, theta: &PhaseConfig) -> Result<f64> {
        if theta.len() != self.coeffs.len() {
            return Err(Error::Dimension(format!(
                "phase array has {} elements, surrogate has {}",
                theta.len(),
                self.coeffs.len()
            )));
        }
        Ok(4.0
            * self
                .coeffs
                .iter()
                .zip(theta.phasors())
                .map(|(c, p)| (c * p).re)
                .sum::<f64>())
    }
}

/// `f_b(Θ)` for one phase array.
pub fn surrogate_fb(channels: &ChannelSet, precoder: &Precoder, theta: &PhaseConfig) -> Result<f64> {
    Surrogate::new(channels, precoder)?.value(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex_gaussian;
    use crate::mimo::{effective_channel, sum_power};
    use crate::rng::Stream;

    fn one(z: Complex64) -> CMatrix {
        CMatrix::from_element(1, 1, z)
    }

    #[test]
    fn aligned_scalar_case_is_tight() {
        let u = Complex64::new(1.0, 0.0);
        let ch = ChannelSet::new(one(u), one(u), one(u)).unwrap();
        let w = Precoder { w: one(u) };
        let theta = PhaseConfig::zeros(1, 4).unwrap();
        assert!((surrogate_fb(&ch, &w, &theta).unwrap() - 4.0).abs() < 1e-15);
        let a = effective_channel(&ch, &theta).unwrap().apply(&w).unwrap();
        assert!((sum_power(&a) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn zero_beta_gives_zero() {
        let mut rng = Stream::new(2).rng();
        let mut r = |r, c| CMatrix::from_fn(r, c, |_, _| complex_gaussian(&mut rng, 1.0));
        let ch = ChannelSet::new(r(2, 3), r(4, 3), CMatrix::zeros(2, 4)).unwrap();
        let w = Precoder { w: r(3, 2) };
        for lv in 0..4 {
            let theta = PhaseConfig::new(vec![lv, 0, 3, 1], 4).unwrap();
            assert_eq!(surrogate_fb(&ch, &w, &theta).unwrap(), 0.0);
        }
    }

    #[test]
    fn coefficients_match_triple_sum() {
        let mut rng = Stream::new(3).rng();
        let mut r = |r, c| CMatrix::from_fn(r, c, |_, _| complex_gaussian(&mut rng, 1.0));
        let ch = ChannelSet::new(r(3, 4), r(5, 4), r(3, 5)).unwrap();
        let w = Precoder { w: r(4, 2) };
        let s = Surrogate::new(&ch, &w).unwrap();
        let alpha = &ch.d * &w.w;
        let fw = &ch.f * &w.w;
        for n in 0..5 {
            let mut c = Complex64::new(0.0, 0.0);
            for i in 0..3 {
                for j in 0..2 {
                    c += alpha[(i, j)].conj() * ch.g[(i, n)] * fw[(n, j)];
                }
            }
            assert!((c - s.coefficients()[n]).norm() < 1e-12);
            let per_antenna: Complex64 = (0..3).map(|i| s.antenna_coefficient(i, n)).sum();
            assert!((c - per_antenna).norm() < 1e-12);
        }
    }
}
