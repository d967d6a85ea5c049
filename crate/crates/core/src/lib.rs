//! Delay-spread performance evaluation of rectangular building layouts.
//!
//! Given a floorplan — a rectangular outline tiled by rectangular typed
//! rooms — this crate computes how the layout shapes the RMS delay spread of
//! wireless links deployed uniformly inside it:
//!
//! - **DS gain**: the expected indoor RMS delay spread minus the open-space
//!   (two-ray) reference over the same footprint, evaluated in closed form
//!   plus one-dimensional adaptive quadrature ([`analytic`]).
//! - **Reliability**: the distance-averaged spread of the per-link law
//!   around that expectation ([`analytic::reliability`]).
//! - **Monte-Carlo validation**: a deterministic link simulator drawing the
//!   same statistical model, used as an independent oracle ([`montecarlo`]).
//!
//! The geometric core is the rectangle containment kernel `Z(d, a, b)`
//! ([`geometry::z_kernel`]), which yields both the Tx-Rx distance density
//! and per-room line-of-sight probabilities; the channel model is a Gaussian
//! delay-spread law regressed on path loss per room type and blockage state
//! ([`channel`]).
//!
//! ```
//! use dsgain::prelude::*;
//!
//! let fp = generate_winner_a1(4.0, 3.0).unwrap();
//! let report = ds_gain(&fp, &default_params(), &QuadratureSpec::default()).unwrap();
//! assert!((report.ds_gain_ns - 27.76).abs() < 0.1);
//! ```

pub mod analytic;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod layout;
pub mod montecarlo;
pub mod quadrature;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analytic::{
        ds_gain, ds_gain_with_id, expected_tau_indoor, expected_tau_open, reliability,
        EvalReport, ReliabilityMode,
    };
    pub use crate::channel::{
        default_params, mean_path_loss, tau_indoor_distribution, tau_open_reference,
        tau_open_space, truncated_mean, Blockage, DsParams, TauDistribution,
    };
    pub use crate::error::{Error, Result};
    pub use crate::geometry::{distance_pdf, los_probability, z_kernel};
    pub use crate::layout::{
        generate_grid, generate_winner_a1, parse_floorplan, Floorplan, Room, RoomType,
    };
    pub use crate::montecarlo::{
        empirical_distance_pdf, empirical_reliability, empirical_tau_cdf, simulate,
        simulate_conditioned, LinkSample, SimReport, SimRun,
    };
    pub use crate::quadrature::QuadratureSpec;
}
