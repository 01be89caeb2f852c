use crate::error::{Error, Result};
use crate::linalg::{singular_values, CMatrix};
use crate::mimo::{effective_channel, PhaseConfig};
use crate::scenario::ChannelSet;

pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-3;

/// Numerical rank: singular values at or above `rel_threshold·σ_max`.
pub fn channel_rank(h: &CMatrix, rel_threshold: f64) -> Result<usize> {
    if !(rel_threshold > 0.0 && rel_threshold < 1.0) {
        return Err(Error::invalid(
            "rank_threshold",
            format!("relative threshold must lie in (0, 1), got {rel_threshold}"),
        ));
    }
    let sv = singular_values(h);
    let max = sv.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s >= rel_threshold * max).count())
}

/// Reports the channel rank observed under a phase array.
pub trait RankProbe: Sync {
    fn elements(&self) -> usize;

    fn rank(&self, theta: &PhaseConfig) -> usize;
}

/// Simulated rank reports from the numerical rank of `H(Θ)`.
#[derive(Debug, Clone)]
pub struct ChannelRankProbe {
    channels: ChannelSet,
    rel_threshold: f64,
}

impl ChannelRankProbe {
    pub fn new(channels: &ChannelSet, rel_threshold: f64) -> Result<Self> {
        channels.check()?;
        channel_rank(&CMatrix::zeros(1, 1), rel_threshold)?;
        Ok(ChannelRankProbe {
            channels: channels.clone(),
            rel_threshold,
        })
    }
}

impl RankProbe for ChannelRankProbe {
    fn elements(&self) -> usize {
        self.channels.elements()
    }

    fn rank(&self, theta: &PhaseConfig) -> usize {
        let h = effective_channel(&self.channels, theta)
            .expect("phase array matches surface")
            .h;
        channel_rank(&h, self.rel_threshold).expect("threshold validated at construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex64;

    #[test]
    fn rank_examples() {
        assert_eq!(channel_rank(&CMatrix::identity(4, 4), 1e-3).unwrap(), 4);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1e-9, 0.0),
        ]));
        assert_eq!(channel_rank(&d, 1e-3).unwrap(), 1);
        let u = CMatrix::from_fn(3, 1, |r, _| Complex64::new(r as f64 + 1.0, 0.5));
        let v = CMatrix::from_fn(1, 4, |_, c| Complex64::new(0.2, c as f64));
        assert_eq!(channel_rank(&(u * v), 1e-3).unwrap(), 1);
        assert_eq!(channel_rank(&CMatrix::zeros(2, 3), 1e-3).unwrap(), 0);
    }

    #[test]
    fn rejects_bad_threshold() {
        for t in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(channel_rank(&CMatrix::identity(2, 2), t).is_err());
        }
    }
}
