//! Closed-form evaluation of the delay-spread metrics of a floorplan.
//!
//! The expected indoor RMS delay spread marginalizes the per-link Gaussian
//! law over the transmitter's room, the blockage condition, and the Tx-Rx
//! distance:
//!
//! ```text
//! E[tau_I] = sum_i (S_i/V) * integral_0^diag (2 pi d / (X Y)) *
//!            [ Z(d,l_i,m_i) * T(mu_los_i(d), sigma_los_i)
//!              + (Z(d,Y,X) - Z(d,l_i,m_i)) * T(mu_nlos_i(d), sigma_nlos_i) ] dd
//! ```
//!
//! with `T` the zero-truncated Gaussian mean. The open-space expectation is
//! the distance density against the two-ray reference delay, and the DS gain
//! is their difference. A reliability figure accompanies the gain: the
//! distance-averaged standard deviation of the per-link delay-spread law,
//!
//! ```text
//! sigma = integral p(d) sqrt( sum_i (S_i/V) [ P_los_i(d) s_los_i^2
//!                                           + (1 - P_los_i(d)) s_nlos_i^2 ] ) dd
//! ```
//!
//! mixing component *variances*. [`ReliabilityMode::StdMixture`] mixes the
//! component standard deviations instead, for comparison; the variance
//! mixture is the default and is the one the simulator's empirical spread
//! reproduces.

use crate::channel::{self, tau_open_reference, truncated_mean, Blockage, DsParams, TauDistribution};
use crate::error::Result;
use crate::geometry::{z_eval, ZBranchpoints};
use crate::layout::{Floorplan, RoomType};
use crate::quadrature::{integrate, QuadResult, QuadratureSpec};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// How the reliability integrand mixes per-condition spreads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReliabilityMode {
    /// Mix component variances under the square root (a proper standard
    /// deviation of the conditional mixture, up to the between-component
    /// mean spread). Default; validated against the simulator.
    #[default]
    VarianceMixture,
    /// Mix component standard deviations under the square root.
    StdMixture,
}

/// Aggregate quadrature diagnostics for one report.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct QuadDiagnostics {
    pub evaluations: u64,
    pub error_estimate: f64,
}

impl QuadDiagnostics {
    fn absorb(&mut self, r: &QuadResult) {
        self.evaluations += r.evaluations;
        self.error_estimate += r.error_estimate;
    }
}

/// Contribution of one room to the indoor expectation.
#[derive(Debug, Clone, Serialize)]
pub struct RoomContribution {
    pub room_id: String,
    pub contribution_ns: f64,
}

/// Full analytic evaluation of one floorplan.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub floorplan_id: String,
    pub e_tau_indoor_ns: f64,
    pub e_tau_open_ns: f64,
    /// `e_tau_indoor_ns - e_tau_open_ns`.
    pub ds_gain_ns: f64,
    pub reliability_ns: f64,
    pub room_contributions_ns: Vec<RoomContribution>,
    pub quadrature: QuadDiagnostics,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub const CSV_HEADER: &'static str =
        "floorplan_id,e_tau_indoor_ns,e_tau_open_ns,ds_gain_ns,reliability_ns,quad_error_est";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.floorplan_id,
            self.e_tau_indoor_ns,
            self.e_tau_open_ns,
            self.ds_gain_ns,
            self.reliability_ns,
            self.quadrature.error_estimate
        )
    }
}

/// Rooms with identical dimensions and type share one integral; the group
/// weight is the summed area fraction.
struct RoomGroup {
    short: f64,
    long: f64,
    room_type: RoomType,
    /// Sum of `S_i / V` over members.
    weight: f64,
    /// Indices of member rooms in declaration order.
    members: Vec<usize>,
}

fn group_rooms(fp: &Floorplan) -> Vec<RoomGroup> {
    let mut groups: BTreeMap<(u64, u64, RoomType), RoomGroup> = BTreeMap::new();
    let v = fp.area();
    for (i, room) in fp.rooms().iter().enumerate() {
        let (l, m) = (room.short_edge(), room.long_edge());
        let key = (l.to_bits(), m.to_bits(), room.room_type.clone());
        let group = groups.entry(key).or_insert_with(|| RoomGroup {
            short: l,
            long: m,
            room_type: room.room_type.clone(),
            weight: 0.0,
            members: Vec::new(),
        });
        group.members.push(i);
        group.weight += room.area() / v;
    }
    groups.into_values().collect()
}

fn outline_breakpoints(fp: &Floorplan) -> ZBranchpoints {
    ZBranchpoints::new(fp.short_edge(), fp.long_edge()).expect("validated outline")
}

/// Expected indoor RMS delay spread with per-room contributions.
#[derive(Debug, Clone)]
pub struct IndoorExpectation {
    pub total_ns: f64,
    pub per_room_ns: Vec<RoomContribution>,
    pub quadrature: QuadDiagnostics,
}

/// Evaluates the indoor expectation by per-room quadrature.
///
/// Each room's integrand is split at its own kernel branch points
/// (`l`, `m`, `sqrt(l^2+m^2)`) and the outline's (`Y`, `X`); contributions
/// are summed in room declaration order.
pub fn expected_tau_indoor(
    fp: &Floorplan,
    params: &DsParams,
    spec: &QuadratureSpec,
) -> Result<IndoorExpectation> {
    params.validate_for(fp)?;
    let (x, y) = (fp.long_edge(), fp.short_edge());
    let diag = fp.diagonal();
    let outline_bp = outline_breakpoints(fp);
    let groups = group_rooms(fp);

    let mut diagnostics = QuadDiagnostics::default();
    // value per group, indexed like `groups`
    let mut group_values = Vec::with_capacity(groups.len());
    for g in &groups {
        let los = *params.row(&g.room_type, Blockage::Los)?;
        let nlos = *params.row(&g.room_type, Blockage::Nlos)?;
        let (l, m) = (g.short, g.long);
        let integrand = |d: f64| {
            if d <= 0.0 {
                return 0.0;
            }
            let zb = z_eval(d, y, x);
            let zr = z_eval(d, l, m);
            let t_los = truncated_mean(channel::tau_indoor_unchecked(d, &los, params));
            let t_nlos = truncated_mean(channel::tau_indoor_unchecked(d, &nlos, params));
            2.0 * PI * d / (x * y) * (zr * t_los + (zb - zr).max(0.0) * t_nlos)
        };
        let room_bp = ZBranchpoints::new(l, m)?;
        let mut cuts = room_bp.points.to_vec();
        cuts.extend_from_slice(&outline_bp.points);
        let r = integrate(integrand, 0.0, diag, &cuts, spec)?;
        diagnostics.absorb(&r);
        group_values.push(r.value);
    }

    // scatter group values back to rooms, then reduce in declaration order
    let v = fp.area();
    let mut per_room: Vec<Option<RoomContribution>> = vec![None; fp.rooms().len()];
    for (g, value) in groups.iter().zip(&group_values) {
        for &i in &g.members {
            let room = &fp.rooms()[i];
            per_room[i] = Some(RoomContribution {
                room_id: room.id.clone(),
                contribution_ns: room.area() / v * value,
            });
        }
    }
    let per_room_ns: Vec<RoomContribution> =
        per_room.into_iter().map(|c| c.expect("every room grouped")).collect();
    let total_ns = per_room_ns.iter().map(|c| c.contribution_ns).sum();

    Ok(IndoorExpectation {
        total_ns,
        per_room_ns,
        quadrature: diagnostics,
    })
}

/// Expected open-space reference delay over the same footprint:
/// `integral p(d) * tau_open_reference(d) dd`.
pub fn expected_tau_open(fp: &Floorplan, spec: &QuadratureSpec) -> Result<(f64, QuadResult)> {
    let (x, y) = (fp.long_edge(), fp.short_edge());
    let (h_t, h_r) = (fp.tx_height(), fp.rx_height());
    let integrand = |d: f64| {
        if d <= 0.0 {
            return 0.0;
        }
        2.0 * PI * d * z_eval(d, y, x) / (x * y) * tau_open_reference(d, h_t, h_r)
    };
    let r = integrate(
        integrand,
        0.0,
        fp.diagonal(),
        &outline_breakpoints(fp).points,
        spec,
    )?;
    Ok((r.value, r))
}

/// Distance-averaged standard deviation of the per-link delay-spread law.
pub fn reliability(
    fp: &Floorplan,
    params: &DsParams,
    spec: &QuadratureSpec,
    mode: ReliabilityMode,
) -> Result<(f64, QuadResult)> {
    params.validate_for(fp)?;
    let (x, y) = (fp.long_edge(), fp.short_edge());
    let groups = group_rooms(fp);

    // sigma is d-independent, so resolve each group's spreads once
    let mut terms = Vec::with_capacity(groups.len());
    let mut cuts = outline_breakpoints(fp).points.to_vec();
    for g in &groups {
        let s_los = channel::tau_indoor_unchecked(1.0, params.row(&g.room_type, Blockage::Los)?, params).sigma;
        let s_nlos =
            channel::tau_indoor_unchecked(1.0, params.row(&g.room_type, Blockage::Nlos)?, params).sigma;
        terms.push((g.short, g.long, g.weight, s_los, s_nlos));
        cuts.extend_from_slice(&ZBranchpoints::new(g.short, g.long)?.points);
    }

    let integrand = |d: f64| {
        if d <= 0.0 {
            return 0.0;
        }
        let zb = z_eval(d, y, x);
        if zb <= 0.0 {
            return 0.0;
        }
        let mut mixture = 0.0;
        for &(l, m, w, s_los, s_nlos) in &terms {
            let p_los = (z_eval(d, l, m) / zb).clamp(0.0, 1.0);
            mixture += match mode {
                ReliabilityMode::VarianceMixture => {
                    w * (p_los * s_los * s_los + (1.0 - p_los) * s_nlos * s_nlos)
                }
                ReliabilityMode::StdMixture => w * (p_los * s_los + (1.0 - p_los) * s_nlos),
            };
        }
        2.0 * PI * d * zb / (x * y) * mixture.max(0.0).sqrt()
    };
    let r = integrate(integrand, 0.0, fp.diagonal(), &cuts, spec)?;
    Ok((r.value, r))
}

/// Evaluates indoor and open-space expectations, the DS gain, and the
/// reliability figure in one report.
pub fn ds_gain(fp: &Floorplan, params: &DsParams, spec: &QuadratureSpec) -> Result<EvalReport> {
    ds_gain_with_id(fp, params, spec, "floorplan")
}

pub fn ds_gain_with_id(
    fp: &Floorplan,
    params: &DsParams,
    spec: &QuadratureSpec,
    floorplan_id: &str,
) -> Result<EvalReport> {
    let indoor = expected_tau_indoor(fp, params, spec)?;
    let (open, open_result) = expected_tau_open(fp, spec)?;
    let (rel, _) = reliability(fp, params, spec, ReliabilityMode::VarianceMixture)?;
    let mut quadrature = indoor.quadrature;
    quadrature.absorb(&open_result);
    Ok(EvalReport {
        floorplan_id: floorplan_id.to_owned(),
        e_tau_indoor_ns: indoor.total_ns,
        e_tau_open_ns: open,
        ds_gain_ns: indoor.total_ns - open,
        reliability_ns: rel,
        room_contributions_ns: indoor.per_room_ns,
        quadrature,
    })
}

/// Aggregate line-of-sight probability at distance `d`: the area-weighted
/// mixture `sum_i (S_i/V) Z(d,l_i,m_i) / Z(d,Y,X)`.
///
/// Unlike the per-room conditional, this aggregate is exact for links drawn
/// uniformly over the outline, and is what empirical LOS fractions estimate.
pub fn aggregate_los_probability(d: f64, fp: &Floorplan) -> f64 {
    let (x, y) = (fp.long_edge(), fp.short_edge());
    let zb = z_eval(d.max(0.0), y, x);
    if zb <= 0.0 {
        return 0.0;
    }
    let v = fp.area();
    let mut p = 0.0;
    for room in fp.rooms() {
        p += room.area() / v * z_eval(d.max(0.0), room.short_edge(), room.long_edge());
    }
    (p / zb).clamp(0.0, 1.0)
}

/// Analytic CDF of the indoor delay spread conditioned on distance `d`:
/// a truncated-Gaussian mixture over rooms and blockage states. `tau < 0`
/// maps to 0 (draws are clamped at zero).
pub fn tau_cdf_at_distance(tau: f64, d: f64, fp: &Floorplan, params: &DsParams) -> Result<f64> {
    params.validate_for(fp)?;
    if tau < 0.0 {
        return Ok(0.0);
    }
    let (x, y) = (fp.long_edge(), fp.short_edge());
    let zb = z_eval(d.max(0.0), y, x);
    if zb <= 0.0 {
        // no receiver position realizes this distance; degenerate law at 0
        return Ok(1.0);
    }
    let v = fp.area();
    let mut cdf = 0.0;
    for room in fp.rooms() {
        let w = room.area() / v;
        let p_los = (z_eval(d, room.short_edge(), room.long_edge()) / zb).clamp(0.0, 1.0);
        for (blockage, weight) in [(Blockage::Los, p_los), (Blockage::Nlos, 1.0 - p_los)] {
            if weight == 0.0 {
                continue;
            }
            let row = params.row(&room.room_type, blockage)?;
            let TauDistribution { mu, sigma } = channel::tau_indoor_unchecked(d, row, params);
            let component = if sigma <= 0.0 {
                if tau >= mu.max(0.0) {
                    1.0
                } else {
                    0.0
                }
            } else {
                channel::normal_cdf((tau - mu) / sigma)
            };
            cdf += w * weight * component;
        }
    }
    Ok(cdf.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::default_params;
    use crate::layout::{generate_grid, generate_winner_a1, RoomType};

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn single_room_building_is_pure_los() {
        // NLOS weight Z(d,Y,X) - Z(d,l,m) is identically zero
        let fp = generate_grid(1, 1, 30.0, 20.0, RoomType::office(), 4.0, 3.0).unwrap();
        let p = default_params();
        let indoor = expected_tau_indoor(&fp, &p, &spec()).unwrap();

        // reference: integrate the pure-LOS law directly
        let los = *p.row(&RoomType::office(), Blockage::Los).unwrap();
        let reference = integrate(
            |d| {
                if d <= 0.0 {
                    return 0.0;
                }
                crate::geometry::distance_pdf(d, &fp)
                    * truncated_mean(channel::tau_indoor_unchecked(d, &los, &p))
            },
            0.0,
            fp.diagonal(),
            &[20.0, 30.0],
            &spec(),
        )
        .unwrap();
        assert!(
            (indoor.total_ns - reference.value).abs() < 1e-9,
            "indoor = {}, reference = {}",
            indoor.total_ns,
            reference.value
        );
    }

    #[test]
    fn per_room_contributions_sum_to_total() {
        let fp = generate_winner_a1(4.0, 3.0).unwrap();
        let report = ds_gain(&fp, &default_params(), &spec()).unwrap();
        let sum: f64 = report
            .room_contributions_ns
            .iter()
            .map(|c| c.contribution_ns)
            .sum();
        let rel = (sum - report.e_tau_indoor_ns).abs() / report.e_tau_indoor_ns;
        assert!(rel < 1e-9, "rel = {rel}");
        assert_eq!(report.room_contributions_ns.len(), 42);
    }

    #[test]
    fn gain_is_exact_difference() {
        let fp = generate_grid(3, 3, 10.0, 10.0, RoomType::office(), 4.0, 3.0).unwrap();
        let report = ds_gain(&fp, &default_params(), &spec()).unwrap();
        assert_eq!(
            report.ds_gain_ns,
            report.e_tau_indoor_ns - report.e_tau_open_ns
        );
        assert!(report.reliability_ns >= 0.0);
    }

    #[test]
    fn open_space_expectation_non_negative_and_small_outline_limit() {
        // all distance mass near zero: the reference delay approaches its
        // d = 0 value, half of 6 m / (2c)
        let fp = generate_grid(1, 1, 0.1, 0.1, RoomType::office(), 4.0, 3.0).unwrap();
        let (open, _) = expected_tau_open(&fp, &spec()).unwrap();
        let d0 = tau_open_reference(0.0, 4.0, 3.0);
        assert!((open - d0).abs() < 0.01, "open = {open}, limit = {d0}");
        assert!(open > 0.0);
    }

    #[test]
    fn indoor_expectation_invariant_under_reordering_and_translation() {
        let p = default_params();
        let a = generate_winner_a1(4.0, 3.0).unwrap();
        let base = expected_tau_indoor(&a, &p, &spec()).unwrap().total_ns;

        // reorder rooms
        let mut doc = a.to_document();
        doc.rooms.reverse();
        let reordered = doc.clone().into_floorplan().unwrap();
        let got = expected_tau_indoor(&reordered, &p, &spec()).unwrap().total_ns;
        assert!((got - base).abs() / base < 1e-12, "reorder: {got} vs {base}");

        // rigid motion: mirror every room vertically, y -> 50 - (y + h)
        let mut doc2 = a.to_document();
        for room in &mut doc2.rooms {
            room.origin[1] = 50.0 - (room.origin[1] + room.size[1]);
        }
        let mirrored = doc2.into_floorplan().unwrap();
        let got2 = expected_tau_indoor(&mirrored, &p, &spec()).unwrap().total_ns;
        assert!((got2 - base).abs() / base < 1e-12, "mirror: {got2} vs {base}");
    }

    #[test]
    fn reliability_single_room_limit() {
        // one office room equal to a small outline: every link is LOS and
        // the figure collapses to the office LOS spread
        let fp = generate_grid(1, 1, 1.0, 1.0, RoomType::office(), 4.0, 3.0).unwrap();
        let p = default_params();
        let (rel, _) = reliability(&fp, &p, &spec(), ReliabilityMode::VarianceMixture).unwrap();
        let s_los = channel::tau_indoor_unchecked(
            1.0,
            p.row(&RoomType::office(), Blockage::Los).unwrap(),
            &p,
        )
        .sigma;
        assert!((rel - s_los).abs() < 1e-6, "rel = {rel}, sigma = {s_los}");
        assert!((rel - 2.7817).abs() < 1e-3);
    }

    #[test]
    fn reliability_many_room_limit_approaches_nlos_spread() {
        let fp = generate_grid(20, 20, 1.5, 1.5, RoomType::office(), 4.0, 3.0).unwrap();
        let p = default_params();
        let (rel, _) = reliability(&fp, &p, &spec(), ReliabilityMode::VarianceMixture).unwrap();
        let s_nlos = channel::tau_indoor_unchecked(
            1.0,
            p.row(&RoomType::office(), Blockage::Nlos).unwrap(),
            &p,
        )
        .sigma;
        assert!((rel - s_nlos).abs() < 0.05, "rel = {rel}, sigma = {s_nlos}");
    }

    #[test]
    fn reliability_modes_differ() {
        let fp = generate_grid(3, 3, 10.0, 10.0, RoomType::office(), 4.0, 3.0).unwrap();
        let p = default_params();
        let (var_mode, _) = reliability(&fp, &p, &spec(), ReliabilityMode::VarianceMixture).unwrap();
        let (std_mode, _) = reliability(&fp, &p, &spec(), ReliabilityMode::StdMixture).unwrap();
        assert!(var_mode > std_mode, "variance mixture should dominate");
    }

    #[test]
    fn quadrature_self_consistency() {
        let fp = generate_winner_a1(4.0, 3.0).unwrap();
        let p = default_params();
        let coarse = ds_gain(&fp, &p, &QuadratureSpec::with_rel_tol(1e-8)).unwrap();
        let fine = ds_gain(&fp, &p, &QuadratureSpec::with_rel_tol(5e-9)).unwrap();
        let drift = (coarse.ds_gain_ns - fine.ds_gain_ns).abs();
        assert!(
            drift <= coarse.quadrature.error_estimate.max(1e-12),
            "drift {drift} exceeds estimate {}",
            coarse.quadrature.error_estimate
        );
    }

    #[test]
    fn csv_row_shape() {
        let fp = generate_grid(1, 1, 5.0, 5.0, RoomType::office(), 4.0, 3.0).unwrap();
        let report = ds_gain_with_id(&fp, &default_params(), &spec(), "unit").unwrap();
        let row = report.to_csv_row();
        assert_eq!(row.split(',').count(), EvalReport::CSV_HEADER.split(',').count());
        assert!(row.starts_with("unit,"));
    }
}
