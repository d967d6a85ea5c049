//! Closed-form geometric probability kernels for rectangles.
//!
//! Everything here is a pure function of scalars. The central object is the
//! containment kernel `Z(d, a, b)`: given a point A uniform in an `a x b`
//! rectangle (`a <= b`) and a point B uniform on the circle of radius `d`
//! around A, `Z` is the probability that B also lies in the rectangle. The
//! Tx-Rx distance density and the conditional line-of-sight probability of a
//! room inside a building outline are both ratios built from `Z`.
//!
//! `Z` derives from averaging the self-overlap of the rectangle shifted by
//! `d` over all directions:
//!
//! ```text
//! Z(d,a,b) = (2/pi) * integral_0^{pi/2} max(0, 1 - d cos(t)/b) * max(0, 1 - d sin(t)/a) dt
//! ```
//!
//! which evaluates piecewise on `[0, a]`, `(a, b]`, `(b, sqrt(a^2+b^2)]`.
//! The middle branch carries `sqrt(1 - a^2/d^2)`; any other numerator under
//! that root breaks continuity at `d = a`, which the tests pin down to 1e-12
//! together with a circle-sampling Monte-Carlo oracle.

use crate::error::{Error, Result};
use crate::layout::{Floorplan, Room};
use std::f64::consts::PI;

/// Branch points of `Z(d, a, b)` as a function of `d`.
///
/// The kernel is continuous everywhere but its second derivative jumps at
/// `a`, `b`, and `sqrt(a^2 + b^2)`; adaptive quadrature over integrands
/// containing `Z` must split panels there.
#[derive(Debug, Clone, PartialEq)]
pub struct ZBranchpoints {
    pub a: f64,
    pub b: f64,
    /// `{a, b, sqrt(a^2+b^2)}`, ascending.
    pub points: [f64; 3],
}

impl ZBranchpoints {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        check_rect(a, b)?;
        Ok(ZBranchpoints {
            a,
            b,
            points: [a, b, a.hypot(b)],
        })
    }
}

fn check_rect(a: f64, b: f64) -> Result<()> {
    if !a.is_finite() || !b.is_finite() || a <= 0.0 || b < a {
        return Err(Error::Domain(format!(
            "Z kernel requires 0 < a <= b, got a = {a}, b = {b}"
        )));
    }
    Ok(())
}

/// Probability that a point at distance `d` from a uniform point inside an
/// `a x b` rectangle is itself inside the rectangle. Requires `0 < a <= b`.
pub fn z_kernel(d: f64, a: f64, b: f64) -> Result<f64> {
    check_rect(a, b)?;
    if d.is_nan() || d < 0.0 {
        return Err(Error::Domain(format!("Z kernel requires d >= 0, got {d}")));
    }
    Ok(z_eval(d, a, b))
}

/// `z_kernel` without argument validation; callers must ensure `0 < a <= b`.
pub(crate) fn z_eval(d: f64, a: f64, b: f64) -> f64 {
    if d <= 0.0 {
        return 1.0;
    }
    if d * d >= a * a + b * b {
        return 0.0;
    }
    let ab_pi = a * b * PI;
    if d <= a {
        (d * d - 2.0 * d * (a + b) + ab_pi) / ab_pi
    } else if d <= b {
        let root = (1.0 - (a * a) / (d * d)).max(0.0).sqrt();
        (-a * a + 2.0 * d * b * (root - 1.0) + 2.0 * a * b * (a / d).asin()) / ab_pi
    } else {
        let ra = (1.0 - (a * a) / (d * d)).max(0.0).sqrt();
        let rb = (1.0 - (b * b) / (d * d)).max(0.0).sqrt();
        -(d * d + a * a + b * b - 2.0 * d * (b * ra + a * rb)
            + 2.0 * a * b * ((a / d).acos() + (b / d).acos() - PI / 2.0))
            / ab_pi
    }
}

/// Density of the distance between two independent uniform points in the
/// building outline, `2 pi d Z(d, Y, X) / (X Y)`. Zero beyond the outline
/// diagonal.
pub fn distance_pdf(d: f64, fp: &Floorplan) -> f64 {
    if d < 0.0 {
        return 0.0;
    }
    let (x, y) = (fp.long_edge(), fp.short_edge());
    2.0 * PI * d * z_eval(d, y, x) / (x * y)
}

/// Probability that a link of planar length `d` whose transmitter is uniform
/// in `room` is line-of-sight (receiver in the same room), conditioned on the
/// receiver lying inside the outline.
///
/// Returns `Z(d, l, m) / Z(d, Y, X)` clamped to `[0, 1]`, and 0 where the
/// outline kernel has no support (the conditioning event has probability
/// zero there, so the value never meets nonzero mass in an integral).
pub fn los_probability(d: f64, room: &Room, fp: &Floorplan) -> f64 {
    let zb = z_eval(d.max(0.0), fp.short_edge(), fp.long_edge());
    if zb <= 0.0 {
        return 0.0;
    }
    let zr = z_eval(d.max(0.0), room.short_edge(), room.long_edge());
    (zr / zb).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{generate_grid, RoomType};
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn branch1(d: f64, a: f64, b: f64) -> f64 {
        (d * d - 2.0 * d * (a + b) + a * b * PI) / (a * b * PI)
    }

    fn branch2(d: f64, a: f64, b: f64) -> f64 {
        (-a * a + 2.0 * d * b * ((1.0 - a * a / (d * d)).sqrt() - 1.0)
            + 2.0 * a * b * (a / d).asin())
            / (a * b * PI)
    }

    fn branch3(d: f64, a: f64, b: f64) -> f64 {
        -(d * d + a * a + b * b
            - 2.0 * d * (b * (1.0 - a * a / (d * d)).sqrt() + a * (1.0 - b * b / (d * d)).sqrt())
            + 2.0 * a * b * ((a / d).acos() + (b / d).acos() - PI / 2.0))
            / (a * b * PI)
    }

    #[test]
    fn z_at_zero_is_one() {
        assert_eq!(z_kernel(0.0, 3.0, 7.0).unwrap(), 1.0);
    }

    #[test]
    fn branchpoints_sorted_and_validated() {
        let bp = ZBranchpoints::new(3.0, 4.0).unwrap();
        assert_eq!(bp.points, [3.0, 4.0, 5.0]);
        assert!(ZBranchpoints::new(4.0, 3.0).is_err());
        assert!(ZBranchpoints::new(-1.0, 3.0).is_err());
    }

    #[test]
    fn z_at_diagonal_is_zero() {
        let (a, b) = (3.0f64, 7.0);
        assert_eq!(z_kernel(a.hypot(b), a, b).unwrap(), 0.0);
        assert_eq!(z_kernel(1e6, a, b).unwrap(), 0.0);
    }

    #[test]
    fn z_frozen_value() {
        // circle-sampling Monte-Carlo oracle (1e6 samples) gives 0.5623
        let z = z_kernel(5.0, 10.0, 20.0).unwrap();
        assert!((z - 0.5623).abs() < 2e-4, "z = {z}");
    }

    #[test]
    fn z_rejects_bad_rectangle() {
        assert!(z_kernel(1.0, 20.0, 10.0).is_err());
        assert!(z_kernel(1.0, 0.0, 10.0).is_err());
        assert!(z_kernel(-1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn z_square_rooms_are_allowed() {
        // a == b collapses the middle branch to an empty interval
        let z = z_kernel(5.0, 10.0, 10.0).unwrap();
        assert!((z - 0.44296).abs() < 1e-4, "z = {z}");
    }

    #[test]
    fn branches_agree_at_branch_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a = rng.random::<f64>() * 50.0 + 0.5;
            let b = a + rng.random::<f64>() * 50.0 + 1e-3;
            assert!(
                (branch1(a, a, b) - branch2(a, a, b)).abs() < 1e-12,
                "discontinuity at d=a for a={a}, b={b}"
            );
            assert!(
                (branch2(b, a, b) - branch3(b, a, b)).abs() < 1e-12,
                "discontinuity at d=b for a={a}, b={b}"
            );
            let diag = a.hypot(b);
            assert!(
                branch3(diag, a, b).abs() < 1e-12,
                "branch 3 does not vanish at the diagonal for a={a}, b={b}"
            );
        }
    }

    #[test]
    fn z_monotone_non_increasing_in_d() {
        let (a, b) = (4.0f64, 9.0);
        let diag = a.hypot(b);
        let mut prev = 1.0;
        for i in 1..=2000 {
            let d = diag * i as f64 / 2000.0;
            let z = z_eval(d, a, b);
            assert!(z <= prev + 1e-12, "Z increased at d = {d}");
            prev = z;
        }
    }

    #[test]
    fn z_monotone_in_nested_rectangles() {
        // a room that fits inside the outline never has a larger kernel
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let a = rng.random::<f64>() * 10.0 + 0.5;
            let b = a + rng.random::<f64>() * 10.0;
            let a2 = a + rng.random::<f64>() * 10.0;
            let b2 = b.max(a2) + rng.random::<f64>() * 10.0;
            let d = rng.random::<f64>() * a2.hypot(b2);
            assert!(z_eval(d, a, b) <= z_eval(d, a2, b2) + 1e-12);
        }
    }

    #[test]
    fn distance_pdf_vanishes_beyond_diagonal() {
        let fp = generate_grid(1, 1, 20.0, 10.0, RoomType::office(), 4.0, 3.0).unwrap();
        assert_eq!(distance_pdf(30.0, &fp), 0.0);
        assert_eq!(distance_pdf(-1.0, &fp), 0.0);
    }

    #[test]
    fn distance_pdf_frozen_value() {
        // histogram of 1e6 uniform point pairs in a 20 x 10 outline, 0.1 m bins
        let fp = generate_grid(1, 1, 20.0, 10.0, RoomType::office(), 4.0, 3.0).unwrap();
        let p = distance_pdf(5.0, &fp);
        assert!((p - 0.0883).abs() < 2e-4, "pdf = {p}");
    }

    #[test]
    fn los_single_room_building_is_one() {
        let fp = generate_grid(1, 1, 12.0, 8.0, RoomType::office(), 4.0, 3.0).unwrap();
        let room = &fp.rooms()[0];
        for d in [0.0, 1.0, 5.0, 12.0, 14.0] {
            assert_eq!(los_probability(d, room, &fp), 1.0);
        }
        // beyond the diagonal the conditioning event is empty
        assert_eq!(los_probability(15.0, room, &fp), 0.0);
    }

    #[test]
    fn los_beyond_room_diagonal_is_zero() {
        let fp = generate_grid(2, 3, 10.0, 10.0, RoomType::office(), 4.0, 3.0).unwrap();
        let room = &fp.rooms()[0];
        assert_eq!(los_probability(15.0, room, &fp), 0.0);
    }

    #[test]
    fn los_frozen_ratio() {
        // 10 x 10 room inside a 30 x 20 outline at d = 5:
        // Z(5,10,10) = 0.4430 and Z(5,20,30) = 0.7480 by the sampling oracle
        let fp = generate_grid(2, 3, 10.0, 10.0, RoomType::office(), 4.0, 3.0).unwrap();
        let room = &fp.rooms()[0];
        let p = los_probability(5.0, room, &fp);
        assert!((p - 0.592).abs() < 1e-3, "p = {p}");
    }
}
