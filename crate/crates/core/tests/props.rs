//! Property tests over the geometric kernels and the floorplan model.

use dsgain::channel::{truncated_mean, TauDistribution};
use dsgain::geometry::{distance_pdf, z_kernel};
use dsgain::layout::{generate_grid, parse_floorplan, RoomType};
use dsgain::quadrature::{integrate, QuadratureSpec};
use proptest::prelude::*;

proptest! {
    #[test]
    fn z_kernel_is_a_probability_and_non_increasing(
        a in 0.1f64..50.0,
        extra in 0.0f64..50.0,
        t1 in 0.0f64..1.0,
        t2 in 0.0f64..1.0,
    ) {
        let b = a + extra;
        let diag = a.hypot(b);
        let (d1, d2) = (t1.min(t2) * diag, t1.max(t2) * diag);
        let z1 = z_kernel(d1, a, b).unwrap();
        let z2 = z_kernel(d2, a, b).unwrap();
        prop_assert!((0.0..=1.0).contains(&z1));
        prop_assert!((0.0..=1.0).contains(&z2));
        prop_assert!(z2 <= z1 + 1e-12);
    }

    #[test]
    fn z_kernel_grows_with_the_rectangle(
        a in 0.1f64..20.0,
        extra in 0.0f64..20.0,
        grow_a in 0.0f64..20.0,
        grow_b in 0.0f64..20.0,
        t in 0.0f64..1.2,
    ) {
        let b = a + extra;
        let (a2, b2) = (a + grow_a, (a + grow_a).max(b) + grow_b);
        let d = t * a2.hypot(b2);
        prop_assert!(z_kernel(d, a, b).unwrap() <= z_kernel(d, a2, b2).unwrap() + 1e-12);
    }

    #[test]
    fn distance_pdf_normalizes(w in 1.0f64..120.0, h in 1.0f64..120.0) {
        let fp = generate_grid(1, 1, w, h, RoomType::office(), 4.0, 3.0).unwrap();
        let mass = integrate(
            |d| distance_pdf(d, &fp),
            0.0,
            fp.diagonal(),
            &[fp.short_edge(), fp.long_edge()],
            &QuadratureSpec::default(),
        )
        .unwrap()
        .value;
        prop_assert!((mass - 1.0).abs() < 1e-6, "mass = {mass}");
    }

    #[test]
    fn grid_floorplans_partition_the_outline(
        rows in 1usize..6,
        cols in 1usize..6,
        room_w in 0.5f64..20.0,
        room_h in 0.5f64..20.0,
        points in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 50),
    ) {
        let fp = generate_grid(rows, cols, room_w, room_h, RoomType::office(), 4.0, 3.0).unwrap();
        prop_assert!((fp.rooms().iter().map(|r| r.area()).sum::<f64>() - fp.area()).abs()
            <= fp.area() * 1e-9);
        for (u, v) in points {
            let p = (u * fp.width(), v * fp.height());
            let claiming = fp.rooms().iter().filter(|r| r.contains(p)).count();
            prop_assert_eq!(claiming, 1, "point {:?} claimed by {} rooms", p, claiming);
            prop_assert!(fp.room_index_of(p).is_some());
        }
    }

    #[test]
    fn floorplan_json_round_trip(
        rows in 1usize..5,
        cols in 1usize..5,
        room_w in 0.5f64..25.0,
        room_h in 0.5f64..25.0,
    ) {
        let fp = generate_grid(rows, cols, room_w, room_h, RoomType::corridor(), 4.0, 3.0).unwrap();
        let fp2 = parse_floorplan(&fp.to_json()).unwrap();
        prop_assert_eq!(fp.width(), fp2.width());
        prop_assert_eq!(fp.height(), fp2.height());
        prop_assert_eq!(fp.rooms().len(), fp2.rooms().len());
        for (a, b) in fp.rooms().iter().zip(fp2.rooms()) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn truncated_mean_within_bounds(mu in -30.0f64..30.0, sigma in 1e-3f64..8.0) {
        let t = truncated_mean(TauDistribution { mu, sigma });
        prop_assert!(t >= 0.0);
        prop_assert!(t >= mu - mu.abs() * 1e-14);
        // upper bound: E[max(X, 0)] <= E[|X|] <= |mu| + sigma
        prop_assert!(t <= mu.abs() + sigma);
    }
}
