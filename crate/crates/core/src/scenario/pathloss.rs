use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Link {
    /// Base station to user (direct path).
    BsUser,
    /// Base station to surface.
    BsSurface,
    /// Surface to user.
    SurfaceUser,
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Link::BsUser => "BS-user",
            Link::BsSurface => "BS-IS",
            Link::SurfaceUser => "IS-user",
        })
    }
}

/// Log-distance pathloss `PL(d) = intercept + slope·log10(d)` in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathlossModel {
    pub intercept_db: f64,
    pub slope_db: f64,
}

impl PathlossModel {
    pub fn for_link(link: Link) -> Self {
        match link {
            Link::BsUser => PathlossModel {
                intercept_db: 32.6,
                slope_db: 36.7,
            },
            Link::BsSurface | Link::SurfaceUser => PathlossModel {
                intercept_db: 30.0,
                slope_db: 22.0,
            },
        }
    }

    pub fn loss_db(&self, distance_m: f64) -> Result<f64> {
        if !(distance_m > 0.0) || !distance_m.is_finite() {
            return Err(Error::Domain(format!("distance must be positive, got {distance_m}")));
        }
        Ok(self.intercept_db + self.slope_db * distance_m.log10())
    }

    /// Linear power gain `10^(−PL/10)`.
    pub fn gain(&self, distance_m: f64) -> Result<f64> {
        Ok(10f64.powf(-self.loss_db(distance_m)? / 10.0))
    }
}

/// Pathloss in dB of `link` at `distance_m` under the default link models.
pub fn pathloss_db(link: Link, distance_m: f64) -> Result<f64> {
    PathlossModel::for_link(link).loss_db(distance_m)
}
