use std::f64::consts::PI;

use super::{azimuth, FadingConfig, Geometry, Link, SystemParams};
use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian, is_finite, CMatrix};
use crate::rng::{SimRng, Stream};
use num_complex::Complex64;

/// One realization of the three link channels.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// Direct channel, `L × M`.
    pub d: CMatrix,
    /// Transmitter to surface, `N × M`.
    pub f: CMatrix,
    /// Surface to receiver, `L × N`.
    pub g: CMatrix,
}

impl ChannelSet {
    pub fn new(d: CMatrix, f: CMatrix, g: CMatrix) -> Result<Self> {
        let set = ChannelSet { d, f, g };
        set.check()?;
        Ok(set)
    }

    pub fn tx_antennas(&self) -> usize {
        self.d.ncols()
    }

    pub fn rx_antennas(&self) -> usize {
        self.d.nrows()
    }

    pub fn elements(&self) -> usize {
        self.f.nrows()
    }

    /// Checks internal dimension consistency and finiteness.
    pub fn check(&self) -> Result<()> {
        let (l, m) = self.d.shape();
        let n = self.f.nrows();
        if self.f.ncols() != m {
            return Err(Error::Dimension(format!("F has {} columns, D has {m}", self.f.ncols())));
        }
        if self.g.shape() != (l, n) {
            return Err(Error::Dimension(format!(
                "G is {:?}, expected ({l}, {n})",
                self.g.shape()
            )));
        }
        if !(is_finite(&self.d) && is_finite(&self.f) && is_finite(&self.g)) {
            return Err(Error::NonFinite("channel set"));
        }
        Ok(())
    }

    /// Checks consistency against `params`.
    pub fn check_params(&self, params: &SystemParams) -> Result<()> {
        self.check()?;
        let got = (self.rx_antennas(), self.tx_antennas(), self.elements());
        if got != (params.l, params.m, params.n) {
            return Err(Error::Dimension(format!(
                "channels have (L, M, N) = {got:?}, params expect ({}, {}, {})",
                params.l, params.m, params.n
            )));
        }
        Ok(())
    }
}

/// ULA response: entry `n` is `exp(j·2π·spacing·n·sin(angle))`, spacing in wavelengths.
pub fn steering_vector(array_size: usize, spacing_wavelengths: f64, angle_rad: f64) -> Vec<Complex64> {
    let step = 2.0 * PI * spacing_wavelengths * angle_rad.sin();
    (0..array_size)
        .map(|n| Complex64::from_polar(1.0, step * n as f64))
        .collect()
}

/// Draws `D` (Rayleigh) and `F`, `G` (Rician) for one realization.
///
/// Each matrix uses its own child stream and is filled column by column, so a
/// draw with more transmit antennas extends the columns of `D` and `F` drawn
/// with fewer (and likewise the columns of `G` in the element count).
pub fn draw_channels(
    params: &SystemParams,
    geometry: &Geometry,
    fading: &FadingConfig,
    stream: Stream,
) -> Result<ChannelSet> {
    params.validate()?;
    geometry.validate()?;
    if !(fading.rician_k_factor >= 0.0) {
        return Err(Error::invalid("rician_k_db", "Rician K-factor must be ≥ 0"));
    }
    let lambda = params.wavelength();
    let gain = |link: Link| fading.model(link).gain(geometry.distance(link));

    let d_gain = gain(Link::BsUser)?;
    let mut rng = stream.child(0).rng();
    let d = column_major(params.l, params.m, |_, _| complex_gaussian(&mut rng, d_gain));

    let bs_dep = azimuth(geometry.bs_position, geometry.is_position);
    let is_arr = azimuth(geometry.is_position, geometry.bs_position);
    let a_bs = steering_vector(params.m, geometry.bs_array_spacing / lambda, bs_dep);
    let a_is_in = steering_vector(params.n, geometry.is_array_spacing / lambda, is_arr);
    let f = rician(
        &a_is_in,
        &a_bs,
        gain(Link::BsSurface)?,
        fading.rician_k_factor,
        &mut stream.child(1).rng(),
    );

    let is_dep = azimuth(geometry.is_position, geometry.user_position);
    let ue_arr = azimuth(geometry.user_position, geometry.is_position);
    let a_is_out = steering_vector(params.n, geometry.is_array_spacing / lambda, is_dep);
    let a_ue = steering_vector(params.l, geometry.user_array_spacing / lambda, ue_arr);
    let g = rician(
        &a_ue,
        &a_is_out,
        gain(Link::SurfaceUser)?,
        fading.rician_k_factor,
        &mut stream.child(2).rng(),
    );

    ChannelSet::new(d, f, g)
}

fn column_major(rows: usize, cols: usize, mut entry: impl FnMut(usize, usize) -> Complex64) -> CMatrix {
    let mut data = Vec::with_capacity(rows * cols);
    for c in 0..cols {
        for r in 0..rows {
            data.push(entry(r, c));
        }
    }
    CMatrix::from_vec(rows, cols, data)
}

/// `sqrt(gain)·(sqrt(κ/(1+κ))·a_rx·a_txᴴ + sqrt(1/(1+κ))·NLoS)`.
fn rician(a_rx: &[Complex64], a_tx: &[Complex64], gain: f64, kappa: f64, rng: &mut SimRng) -> CMatrix {
    let (los_w, nlos_w) = if kappa.is_infinite() {
        (1.0, 0.0)
    } else {
        ((kappa / (1.0 + kappa)).sqrt(), (1.0 / (1.0 + kappa)).sqrt())
    };
    let amp = gain.sqrt();
    column_major(a_rx.len(), a_tx.len(), |r, c| {
        let los = a_rx[r] * a_tx[c].conj();
        // The NLoS draw always happens so the stream position does not depend on κ.
        let nlos = complex_gaussian(rng, 1.0);
        (los * los_w + nlos * nlos_w) * amp
    })
}
