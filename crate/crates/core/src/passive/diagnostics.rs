//! Sample-complexity diagnostics for blind conditional-sample-mean beamforming.
//!
//! For receive antenna `i` and element `n`, the expected per-antenna power
//! conditioned on `θ_n = kω` differs across `k` only through
//! `v_in(k) = Re{c_in·e^{jkω}}`, `c_in = Σ_j conj(α_ij)·β_inj`. The gap `ε_in`
//! between its largest and second-largest values, its infimum `ε₀`, and the
//! smallest per-antenna channel power `ν` govern how many samples make every
//! conditional mean land within `ε₀` of its expectation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mimo::{unit_phasor, Precoder, Surrogate};
use crate::scenario::ChannelSet;

/// Correspondence between the error-analysis symbols and the surrogate's.
pub const NOTATION: [(&str, &str); 2] = [("Q_ij", "alpha_ij = [D W]_ij"), ("R_inj", "beta_inj = [G]_in [F W]_nj")];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParams {
    /// Sample count `T` at which to evaluate the bounds.
    pub samples: usize,
    /// Free constant `q > 0` of the tail bound.
    pub q: f64,
    /// Per-term target probability `p₀`; the total failure bound is `4·p₀`.
    pub p0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundDiagnostics {
    pub rx_antennas: usize,
    pub elements: usize,
    /// `ε_in`, `L × N` row-major.
    pub gaps: Vec<f64>,
    pub epsilon0: f64,
    pub nu: f64,
    /// `ε₀ > 0`; when false the per-element optimum is not unique for some antenna.
    pub identifiable: bool,
    /// Bound on `P{E_ink}` for a single `(i, n, k)`.
    pub tuple_bound: f64,
    /// The four union-bound terms on `P{E₀}`.
    pub union_terms: [f64; 4],
    pub union_bound: f64,
    /// `2·ln(8NKL/p₀)`: smallest `q` for which the last term is at most `p₀`.
    pub q_required: f64,
    pub q_sufficient: bool,
    /// Smallest `T` meeting the three sample-count conditions at the given `q`;
    /// `None` when not identifiable.
    pub min_samples: Option<f64>,
    pub notation: [(&'static str, &'static str); 2],
}

impl BoundDiagnostics {
    pub fn gap(&self, i: usize, n: usize) -> f64 {
        self.gaps[i * self.elements + n]
    }
}

fn top_two_gap(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    if sorted.len() < 2 {
        0.0
    } else {
        (sorted[0] - sorted[1]).max(0.0)
    }
}

/// Evaluates the per-tuple and union error bounds and the sufficient sample
/// count for a channel realization and fixed precoder.
pub fn bound_diagnostics(
    channels: &ChannelSet,
    precoder: &Precoder,
    noise_power: f64,
    k: usize,
    params: BoundParams,
) -> Result<BoundDiagnostics> {
    if k < 2 {
        return Err(Error::invalid("k", "K must be ≥ 2"));
    }
    if !(params.q > 0.0) {
        return Err(Error::invalid("q", "q must be positive"));
    }
    if !(params.p0 > 0.0 && params.p0 < 1.0) {
        return Err(Error::invalid("p0", "p0 must lie in (0, 1)"));
    }
    if params.samples == 0 {
        return Err(Error::invalid("t", "sample count must be ≥ 1"));
    }
    let s = Surrogate::new(channels, precoder)?;
    let l = channels.rx_antennas();
    let n_el = channels.elements();

    let mut gaps = Vec::with_capacity(l * n_el);
    let mut scale = 0f64;
    for i in 0..l {
        for n in 0..n_el {
            let c = s.antenna_coefficient(i, n);
            scale = scale.max(c.norm());
            let values: Vec<f64> = (0..k).map(|lv| (c * unit_phasor(lv, k)).re).collect();
            gaps.push(top_two_gap(&values));
        }
    }
    let epsilon0 = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    // gaps below rounding level of the coefficients count as exact ties
    let identifiable = epsilon0 > 1e-12 * scale;

    let nu = (0..l)
        .map(|i| {
            let direct: f64 = s.alpha.row(i).iter().map(|z| z.norm_sqr()).sum();
            let reflected: f64 = (0..n_el)
                .map(|n| s.g[(i, n)].norm_sqr() * s.fw.row(n).iter().map(|z| z.norm_sqr()).sum::<f64>())
                .sum();
            direct + reflected
        })
        .fold(f64::INFINITY, f64::min);

    let (nf, kf, lf) = (n_el as f64, k as f64, l as f64);
    let t = params.samples as f64;
    let q = params.q;
    let s2 = noise_power;
    let e2 = epsilon0 * epsilon0;
    let exp_term = (-2.0 * e2 * t / (9.0 * q * q * nu * nu * kf)).exp();
    let tail = (-q / 2.0).exp();

    let tuple_bound = 2.0 * exp_term + (9.0 * s2 * s2 + 18.0 * q * nu * s2) * kf / (e2 * t) + 8.0 * tail;
    let union_terms = [
        2.0 * nf * kf * lf * exp_term,
        9.0 * s2 * s2 * nf * kf * kf * lf / (e2 * t),
        18.0 * q * nu * s2 * nf * kf * kf * lf / (e2 * t),
        8.0 * nf * kf * lf * tail,
    ];
    let q_required = 2.0 * (8.0 * nf * kf * lf / params.p0).ln();
    let min_samples = identifiable.then(|| {
        let p0 = params.p0;
        let t1 = 9.0 * s2 * s2 * nf * kf * kf * lf / (e2 * p0);
        let t2 = 18.0 * q * nu * s2 * nf * kf * kf * lf / (e2 * p0);
        let t3 = 9.0 * q * q * nu * nu * kf * (2.0 * nf * kf * lf / p0).ln() / (2.0 * e2);
        t1.max(t2).max(t3).ceil()
    });

    Ok(BoundDiagnostics {
        rx_antennas: l,
        elements: n_el,
        gaps,
        epsilon0,
        nu,
        identifiable,
        tuple_bound,
        union_terms,
        union_bound: union_terms.iter().sum(),
        q_required,
        q_sufficient: q >= q_required,
        min_samples,
        notation: NOTATION,
    })
}
