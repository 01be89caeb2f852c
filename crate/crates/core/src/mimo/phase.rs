use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `exp(j·level·2π/k)`.
pub fn unit_phasor(level: usize, k: usize) -> Complex64 {
    // Exact values at the quarter turns keep K=2 and K=4 phasors free of rounding.
    match (4 * level) % (4 * k) {
        0 => return Complex64::new(1.0, 0.0),
        x if x == k => return Complex64::new(0.0, 1.0),
        x if x == 2 * k => return Complex64::new(-1.0, 0.0),
        x if x == 3 * k => return Complex64::new(0.0, -1.0),
        _ => {}
    }
    Complex64::from_polar(1.0, TAU * level as f64 / k as f64)
}

/// A discrete phase-shift array: element `n` applies `levels[n]·2π/k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseConfig {
    levels: Vec<usize>,
    k: usize,
}

impl PhaseConfig {
    pub fn new(levels: Vec<usize>, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid("k", "K must be ≥ 2"));
        }
        if levels.is_empty() {
            return Err(Error::invalid("n", "N must be ≥ 1"));
        }
        if let Some((n, &lv)) = levels.iter().enumerate().find(|(_, &lv)| lv >= k) {
            return Err(Error::Domain(format!("level {lv} of element {n} is outside [0, {k})")));
        }
        Ok(PhaseConfig { levels, k })
    }

    /// All elements at phase zero.
    pub fn zeros(n: usize, k: usize) -> Result<Self> {
        Self::new(vec![0; n], k)
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> usize {
        self.levels[n]
    }

    /// Phase of element `n` in radians.
    pub fn phase(&self, n: usize) -> f64 {
        TAU * self.levels[n] as f64 / self.k as f64
    }

    /// The diagonal of the reflection matrix, `exp(j·θ_n)`.
    pub fn phasors(&self) -> Vec<Complex64> {
        self.levels.iter().map(|&l| unit_phasor(l, self.k)).collect()
    }
}

impl fmt::Display for PhaseConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.levels.iter().map(|l| l.to_string()).collect();
        write!(f, "[{}]/K={}", parts.join(","), self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_levels() {
        assert!(PhaseConfig::new(vec![0, 4], 4).is_err());
        assert!(PhaseConfig::new(vec![0], 1).is_err());
        assert!(PhaseConfig::new(vec![], 2).is_err());
        assert!(PhaseConfig::new(vec![3, 0, 1], 4).is_ok());
    }

    #[test]
    fn phasors_match_polar() {
        for k in 2..9 {
            for l in 0..k {
                let exact = Complex64::from_polar(1.0, TAU * l as f64 / k as f64);
                assert!((unit_phasor(l, k) - exact).norm() < 1e-15);
            }
        }
        assert_eq!(unit_phasor(1, 2), Complex64::new(-1.0, 0.0));
        assert_eq!(unit_phasor(3, 4), Complex64::new(0.0, -1.0));
    }
}
