use nalgebra::DMatrix;
use serde::Serialize;

use super::{PhaseConfig, Precoder};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, gram_eigenvalues, is_finite, CMatrix};
use crate::scenario::ChannelSet;
use crate::Complex64;

/// The overall transmitter-to-receiver channel `H = D + G·Ψ·F` for one phase array.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    pub h: CMatrix,
}

impl EffectiveChannel {
    /// `A = H·W`.
    pub fn apply(&self, precoder: &Precoder) -> Result<CMatrix> {
        if precoder.w.nrows() != self.h.ncols() {
            return Err(Error::Dimension(format!(
                "precoder has {} rows, channel has {} columns",
                precoder.w.nrows(),
                self.h.ncols()
            )));
        }
        Ok(&self.h * &precoder.w)
    }
}

pub fn effective_channel(channels: &ChannelSet, theta: &PhaseConfig) -> Result<EffectiveChannel> {
    if theta.len() != channels.elements() {
        return Err(Error::Dimension(format!(
            "phase array has {} elements, surface has {}",
            theta.len(),
            channels.elements()
        )));
    }
    let mut gp = channels.g.clone();
    for (n, ph) in theta.phasors().into_iter().enumerate() {
        for z in gp.column_mut(n).iter_mut() {
            *z *= ph;
        }
    }
    Ok(EffectiveChannel {
        h: &channels.d + gp * &channels.f,
    })
}

fn check_noise(noise_power: f64) -> Result<()> {
    if noise_power > 0.0 && noise_power.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "noise power must be positive, got {noise_power}"
        )))
    }
}

/// `log2 det(I + A·Aᴴ/σ²)` in bit/s/Hz, evaluated through a Cholesky factor.
pub fn capacity(a: &CMatrix, noise_power: f64) -> Result<f64> {
    check_noise(noise_power)?;
    if !is_finite(a) {
        return Err(Error::NonFinite("A"));
    }
    let l = a.nrows();
    let m = DMatrix::<Complex64>::identity(l, l) + (a * a.adjoint()).unscale(noise_power);
    match m.cholesky() {
        Some(chol) => {
            let ln_det: f64 = chol.l_dirty().diagonal().iter().map(|d| 2.0 * d.re.ln()).sum();
            Ok(ln_det / std::f64::consts::LN_2)
        }
        // Only reachable through severe rounding; fall back to the spectral form.
        None => capacity_from_eigenvalues(&gram_eigenvalues(a), noise_power),
    }
}

/// `Σ_i log2(1 + λ_i/σ²)`.
pub fn capacity_from_eigenvalues(eigenvalues: &[f64], noise_power: f64) -> Result<f64> {
    check_noise(noise_power)?;
    Ok(eigenvalues
        .iter()
        .map(|&l| (l.max(0.0) / noise_power).ln_1p())
        .sum::<f64>()
        / std::f64::consts::LN_2)
}

/// `Σ_i Σ_j |A_ij|²`, the sum of the eigenvalues of `A·Aᴴ`.
pub fn sum_power(a: &CMatrix) -> f64 {
    frobenius_sq(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Single-mode lower and Jensen upper approximations of the capacity.
///
/// With `x = ‖A‖²_F/(σ²·S)`: `lower = log2(1+x)`, `upper = S·log2(1+x)`. The
/// sandwich `lower ≤ C ≤ upper` holds whenever `rank(A) ≤ S`.
pub fn capacity_bounds(a: &CMatrix, noise_power: f64, streams: usize) -> Result<CapacityBounds> {
    check_noise(noise_power)?;
    if streams == 0 {
        return Err(Error::invalid("s", "stream count must be ≥ 1"));
    }
    if !is_finite(a) {
        return Err(Error::NonFinite("A"));
    }
    let x = sum_power(a) / (noise_power * streams as f64);
    let lower = x.ln_1p() / std::f64::consts::LN_2;
    Ok(CapacityBounds {
        lower,
        upper: streams as f64 * lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex_gaussian;
    use crate::rng::Stream;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut rng = Stream::new(seed).rng();
        CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(&mut rng, 1.0))
    }

    #[test]
    fn effective_channel_examples() {
        let ch = ChannelSet::new(random(2, 3, 1), random(4, 3, 2), random(2, 4, 3)).unwrap();
        let h = effective_channel(&ch, &PhaseConfig::zeros(4, 4).unwrap()).unwrap().h;
        assert!((h - (&ch.d + &ch.g * &ch.f)).iter().all(|z| z.norm() < 1e-12));

        let no_reflect = ChannelSet::new(ch.d.clone(), ch.f.clone(), CMatrix::zeros(2, 4)).unwrap();
        let theta = PhaseConfig::new(vec![1, 3, 2, 0], 4).unwrap();
        assert_eq!(effective_channel(&no_reflect, &theta).unwrap().h, ch.d);

        let one = CMatrix::from_element(1, 1, c(1.0, 0.0));
        let scalar = ChannelSet::new(one.clone(), one.clone(), one).unwrap();
        let h = effective_channel(&scalar, &PhaseConfig::new(vec![1], 2).unwrap())
            .unwrap()
            .h;
        assert!(h[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn effective_channel_matches_explicit_product() {
        let ch = ChannelSet::new(random(3, 2, 4), random(5, 2, 5), random(3, 5, 6)).unwrap();
        let theta = PhaseConfig::new(vec![0, 1, 2, 5, 7], 8).unwrap();
        let psi = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(theta.phasors()));
        let expect = &ch.d + &ch.g * psi * &ch.f;
        let h = effective_channel(&ch, &theta).unwrap().h;
        assert!((h - expect).iter().all(|z| z.norm() < 1e-12));
        assert!(effective_channel(&ch, &PhaseConfig::zeros(4, 8).unwrap()).is_err());
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(capacity(&CMatrix::zeros(3, 2), 1.0).unwrap(), 0.0);
        let a = CMatrix::from_element(1, 1, c(3f64.sqrt(), 0.0));
        assert!((capacity(&a, 1.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(capacity(&a, 0.0).is_err());
        let bad = CMatrix::from_element(1, 1, c(f64::NAN, 0.0));
        assert!(matches!(capacity(&bad, 1.0), Err(Error::NonFinite(_))));
    }

    #[test]
    fn logdet_equals_eigen_sum() {
        for seed in 0..100 {
            let a = random(4, 2, 1000 + seed);
            let noise = 0.1 + (seed as f64) * 0.05;
            let c1 = capacity(&a, noise).unwrap();
            let c2 = capacity_from_eigenvalues(&gram_eigenvalues(&a), noise).unwrap();
            assert!((c1 - c2).abs() <= 1e-9 * c1.abs().max(1.0), "{c1} vs {c2}");
        }
    }

    #[test]
    fn bounds_examples() {
        let a = random(4, 1, 9);
        let cap = capacity(&a, 0.5).unwrap();
        let b = capacity_bounds(&a, 0.5, 1).unwrap();
        assert!((b.lower - cap).abs() < 1e-12 && (b.upper - cap).abs() < 1e-12);
        let z = capacity_bounds(&CMatrix::zeros(2, 2), 1.0, 2).unwrap();
        assert_eq!((z.lower, z.upper), (0.0, 0.0));
        for seed in 0..1000 {
            let a = random(4, 4, 5000 + seed);
            let cap = capacity(&a, 1.0).unwrap();
            let b = capacity_bounds(&a, 1.0, 4).unwrap();
            assert!(b.lower <= cap + 1e-9 && cap <= b.upper + 1e-9);
        }
    }

    #[test]
    fn sum_power_examples() {
        assert_eq!(sum_power(&CMatrix::identity(2, 2)), 2.0);
        assert_eq!(sum_power(&CMatrix::zeros(2, 3)), 0.0);
        let a = random(3, 4, 77);
        let trace = (&a * a.adjoint()).trace().re;
        assert!((sum_power(&a) - trace).abs() < 1e-12 * trace);
        let eig: f64 = gram_eigenvalues(&a).iter().sum();
        assert!((sum_power(&a) - eig).abs() < 1e-9 * trace);
    }
}
