use crate::error::{Error, Result};
use crate::mimo::{PhaseConfig, Precoder, Surrogate};
use crate::scenario::ChannelSet;

/// Zero phase shift on every element.
pub fn zps(n: usize, k: usize) -> Result<PhaseConfig> {
    PhaseConfig::zeros(n, k)
}

/// Maximizes the separable surrogate `f_b` element by element:
/// `θ_n = argmax_φ Re{c_n·e^{jφ}}`, ties to the smallest level.
///
/// Cost is `O(N·S·(L + M))` to form the coefficients plus `O(N·K)` for the search.
pub fn linear_search_csi(channels: &ChannelSet, precoder: &Precoder, k: usize) -> Result<PhaseConfig> {
    if k < 2 {
        return Err(Error::invalid("k", "K must be ≥ 2"));
    }
    let surrogate = Surrogate::new(channels, precoder)?;
    let rows: Vec<Vec<f64>> = (0..channels.elements())
        .map(|n| surrogate.element_scores(n, k))
        .collect();
    Ok(super::decide_levels(&rows, k))
}
