//! System constants, node layout and random channel realizations.

mod channel;
mod pathloss;

pub use channel::{draw_channels, steering_vector, ChannelSet};
pub use pathloss::{pathloss_db, Link, PathlossModel};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Scalar constants of one IS-aided MIMO link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Transmit antennas.
    pub m: usize,
    /// Receive antennas.
    pub l: usize,
    /// Reflective elements on the surface.
    pub n: usize,
    /// Phase levels per element; phases are multiples of 2π/k.
    pub k: usize,
    /// Data streams.
    pub s: usize,
    /// Transmit power budget in watts.
    pub power_w: f64,
    /// Noise power per receive antenna in watts.
    pub noise_w: f64,
    pub carrier_hz: f64,
}

impl SystemParams {
    /// Parameters with `s = min(m, l)`.
    pub fn new(m: usize, l: usize, n: usize, k: usize, power_w: f64, noise_w: f64, carrier_hz: f64) -> Self {
        SystemParams {
            m,
            l,
            n,
            k,
            s: m.min(l),
            power_w,
            noise_w,
            carrier_hz,
        }
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Every violated invariant as `(key, message)`.
    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if self.m < 1 {
            out.push(("m", "M must be ≥ 1".to_string()));
        }
        if self.l < 1 {
            out.push(("l", "L must be ≥ 1".to_string()));
        }
        if self.n < 1 {
            out.push(("n", "N must be ≥ 1".to_string()));
        }
        if self.k < 2 {
            out.push(("k", "K must be ≥ 2".to_string()));
        }
        if self.s < 1 || self.s > self.m.min(self.l) {
            out.push((
                "s",
                format!(
                    "stream count S = {} must satisfy 1 ≤ S ≤ min(M, L) = {}",
                    self.s,
                    self.m.min(self.l)
                ),
            ));
        }
        if !(self.power_w > 0.0 && self.power_w.is_finite()) {
            out.push(("power_dbm", "transmit power must be positive and finite".to_string()));
        }
        if !(self.noise_w > 0.0 && self.noise_w.is_finite()) {
            out.push(("noise_dbm", "noise power must be positive and finite".to_string()));
        }
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            out.push(("carrier_ghz", "carrier frequency must be positive".to_string()));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            None => Ok(()),
            Some((key, msg)) => Err(Error::invalid(key, msg)),
        }
    }
}

/// Node positions (meters) and array spacings (meters).
///
/// All arrays are uniform linear arrays along the y axis; line-of-sight angles
/// are azimuths in the x-y plane measured from the x axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub bs_position: [f64; 3],
    pub is_position: [f64; 3],
    pub user_position: [f64; 3],
    pub bs_array_spacing: f64,
    pub is_array_spacing: f64,
    pub user_array_spacing: f64,
}

impl Geometry {
    pub const DEFAULT_BS: [f64; 3] = [0.0, 0.0, 20.0];
    pub const DEFAULT_IS: [f64; 3] = [250.0, 0.0, 5.0];
    pub const DEFAULT_USER: [f64; 3] = [250.0, 25.0, 1.5];

    /// Default layout with half-wavelength spacing at `carrier_hz`.
    pub fn default_for_carrier(carrier_hz: f64) -> Self {
        Self::with_positions(Self::DEFAULT_BS, Self::DEFAULT_IS, Self::DEFAULT_USER, carrier_hz)
    }

    pub fn with_positions(bs: [f64; 3], is: [f64; 3], user: [f64; 3], carrier_hz: f64) -> Self {
        let half = SPEED_OF_LIGHT / carrier_hz / 2.0;
        Geometry {
            bs_position: bs,
            is_position: is,
            user_position: user,
            bs_array_spacing: half,
            is_array_spacing: half,
            user_array_spacing: half,
        }
    }

    pub fn distance(&self, link: Link) -> f64 {
        let (a, b) = self.endpoints(link);
        dist(a, b)
    }

    fn endpoints(&self, link: Link) -> ([f64; 3], [f64; 3]) {
        match link {
            Link::BsUser => (self.bs_position, self.user_position),
            Link::BsSurface => (self.bs_position, self.is_position),
            Link::SurfaceUser => (self.is_position, self.user_position),
        }
    }

    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        for link in [Link::BsUser, Link::BsSurface, Link::SurfaceUser] {
            let d = self.distance(link);
            if !(d > 0.0 && d.is_finite()) {
                out.push(("positions", format!("{link} distance must be positive, got {d}")));
            }
        }
        for (name, s) in [
            ("bs_array_spacing", self.bs_array_spacing),
            ("is_array_spacing", self.is_array_spacing),
            ("user_array_spacing", self.user_array_spacing),
        ] {
            if !(s > 0.0 && s.is_finite()) {
                out.push((name, format!("array spacing must be positive, got {s}")));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            None => Ok(()),
            Some((key, msg)) => Err(Error::invalid(key, msg)),
        }
    }
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Azimuth of the direction `from → to` in the x-y plane.
pub(crate) fn azimuth(from: [f64; 3], to: [f64; 3]) -> f64 {
    let dx = to[0] - from[0];
    let dy = to[1] - from[1];
    if dx == 0.0 && dy == 0.0 {
        0.0
    } else {
        dy.atan2(dx)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FadingConfig {
    /// Linear LoS-to-scattered power ratio of `F` and `G`. `f64::INFINITY` gives
    /// pure line of sight.
    pub rician_k_factor: f64,
    pub bs_user: PathlossModel,
    pub bs_surface: PathlossModel,
    pub surface_user: PathlossModel,
}

impl FadingConfig {
    pub const DEFAULT_RICIAN_K_DB: f64 = 10.0;

    pub fn with_rician_k(rician_k_factor: f64) -> Self {
        FadingConfig {
            rician_k_factor,
            bs_user: PathlossModel::for_link(Link::BsUser),
            bs_surface: PathlossModel::for_link(Link::BsSurface),
            surface_user: PathlossModel::for_link(Link::SurfaceUser),
        }
    }

    pub fn model(&self, link: Link) -> &PathlossModel {
        match link {
            Link::BsUser => &self.bs_user,
            Link::BsSurface => &self.bs_surface,
            Link::SurfaceUser => &self.surface_user,
        }
    }

    pub fn violations(&self) -> Vec<(&'static str, String)> {
        if self.rician_k_factor >= 0.0 {
            Vec::new()
        } else {
            vec![("rician_k_db", "Rician K-factor must be ≥ 0".to_string())]
        }
    }
}

impl Default for FadingConfig {
    fn default() -> Self {
        Self::with_rician_k(db_to_linear(Self::DEFAULT_RICIAN_K_DB))
    }
}

/// Everything needed to draw one channel realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub params: SystemParams,
    pub geometry: Geometry,
    pub fading: FadingConfig,
}

impl Scenario {
    /// M=64, L=4, N=100, K=4, 30 dBm transmit power, −90 dBm noise, 2.6 GHz,
    /// default layout and Rician factor.
    pub fn reference() -> Self {
        let carrier = 2.6e9;
        Scenario {
            params: SystemParams::new(64, 4, 100, 4, dbm_to_watts(30.0), dbm_to_watts(-90.0), carrier),
            geometry: Geometry::default_for_carrier(carrier),
            fading: FadingConfig::default(),
        }
    }

    pub fn draw(&self, stream: crate::rng::Stream) -> Result<ChannelSet> {
        draw_channels(&self.params, &self.geometry, &self.fading, stream)
    }
}
