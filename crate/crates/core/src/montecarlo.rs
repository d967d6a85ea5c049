//! Monte-Carlo link simulator: the independent oracle for the analytic
//! engine.
//!
//! Links are drawn as iid uniform (Tx, Rx) pairs over the outline. A link is
//! LOS exactly when both endpoints share a room; the delay spread is then a
//! clamped Gaussian draw from the law of the transmitter's room type, and the
//! open-space value is the deterministic two-ray reference at the same
//! distance.
//!
//! Reproducibility: link `i` consumes only stream `i` of a counter-based
//! generator seeded once per run, so the sample vector is a pure function of
//! `(floorplan, params, n_links, seed)` no matter how many worker threads
//! rayon uses. Reductions run over the ordered sample vector with pairwise
//! summation.

use crate::channel::{self, tau_open_reference, truncated_mean, Blockage, DsParams};
use crate::error::{Error, Result};
use crate::layout::Floorplan;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;

/// One simulated Tx-Rx realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSample {
    pub tx: (f64, f64),
    pub rx: (f64, f64),
    /// Planar Tx-Rx distance, metres.
    pub d: f64,
    /// Index of the transmitter's room in the floorplan's room list.
    pub tx_room: u32,
    pub blockage: Blockage,
    /// Drawn indoor RMS delay spread, ns (clamped at zero).
    pub tau_indoor: f64,
    /// Two-ray reference delay at `d`, ns.
    pub tau_open: f64,
}

/// Summary statistics of one simulation run.
#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    pub n_links: u64,
    pub seed: u64,
    pub mean_tau_indoor_ns: f64,
    pub se_tau_indoor_ns: f64,
    pub mean_tau_open_ns: f64,
    pub se_tau_open_ns: f64,
    /// `mean_tau_indoor_ns - mean_tau_open_ns`.
    pub ds_gain_sim_ns: f64,
    /// Standard error of the paired per-link gain.
    pub se_ds_gain_ns: f64,
    /// Distance-binned empirical reliability; `None` below 10^4 links.
    pub empirical_reliability_ns: Option<f64>,
}

impl SimReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A run's report plus the full ordered sample stream.
#[derive(Debug, Clone)]
pub struct SimRun {
    pub report: SimReport,
    pub samples: Vec<LinkSample>,
}

/// Minimum sample count for empirical reliability estimation.
pub const RELIABILITY_MIN_SAMPLES: usize = 10_000;

fn stream_rng(seed: u64, link_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(link_index);
    rng
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; 1 - u keeps the log argument in (0, 1]
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Per-room delay-law coefficients resolved once per run:
/// `mu(d) = c0 + c1 * log10(d)` per blockage state.
struct RoomLaw {
    los: (f64, f64, f64),
    nlos: (f64, f64, f64),
}

fn resolve_laws(fp: &Floorplan, params: &DsParams) -> Result<Vec<RoomLaw>> {
    fp.rooms()
        .iter()
        .map(|room| {
            let law = |blockage| -> Result<(f64, f64, f64)> {
                let row = params.row(&room.room_type, blockage)?;
                Ok((
                    row.k * params.l0_db + row.k * row.c + row.b,
                    10.0 * row.k * row.n,
                    (row.sigma * row.sigma + row.k * row.k * row.sigma_s * row.sigma_s).sqrt(),
                ))
            };
            Ok(RoomLaw {
                los: law(Blockage::Los)?,
                nlos: law(Blockage::Nlos)?,
            })
        })
        .collect()
}

fn draw_link(fp: &Floorplan, laws: &[RoomLaw], seed: u64, index: u64) -> LinkSample {
    let mut rng = stream_rng(seed, index);
    let (w, h) = (fp.width(), fp.height());
    let tx = (rng.random::<f64>() * w, rng.random::<f64>() * h);
    let rx = (rng.random::<f64>() * w, rng.random::<f64>() * h);
    finish_link(fp, laws, tx, rx, &mut rng)
}

fn finish_link(
    fp: &Floorplan,
    laws: &[RoomLaw],
    tx: (f64, f64),
    rx: (f64, f64),
    rng: &mut ChaCha8Rng,
) -> LinkSample {
    let d = (tx.0 - rx.0).hypot(tx.1 - rx.1);
    let tx_room = fp
        .room_index_of(tx)
        .expect("tx drawn inside the outline tiling");
    let rx_room = fp
        .room_index_of(rx)
        .expect("rx drawn inside the outline tiling");
    let blockage = if tx_room == rx_room {
        Blockage::Los
    } else {
        Blockage::Nlos
    };
    let (c0, c1, sigma) = match blockage {
        Blockage::Los => laws[tx_room].los,
        Blockage::Nlos => laws[tx_room].nlos,
    };
    // log10(0) only occurs when tx == rx exactly; the draw then sits at -inf
    // mean and clamps to zero like the analytic truncation
    let mu = c0 + c1 * d.log10();
    let tau_indoor = (mu + sigma * standard_normal(rng)).max(0.0);
    let tau_open = tau_open_reference(d, fp.tx_height(), fp.rx_height());
    LinkSample {
        tx,
        rx,
        d,
        tx_room: tx_room as u32,
        blockage,
        tau_indoor,
        tau_open,
    }
}

/// Simulates `n_links` independent links; deterministic given the seed.
pub fn simulate(fp: &Floorplan, params: &DsParams, n_links: u64, seed: u64) -> Result<SimRun> {
    if n_links == 0 {
        return Err(Error::Domain("n_links must be at least 1".to_owned()));
    }
    params.validate_for(fp)?;
    let laws = resolve_laws(fp, params)?;
    let samples: Vec<LinkSample> = (0..n_links)
        .into_par_iter()
        .map(|i| draw_link(fp, &laws, seed, i))
        .collect();
    let report = summarize(fp, params, &samples, seed);
    Ok(SimRun { report, samples })
}

/// Simulates links conditioned on an exact Tx-Rx distance: Rx uniform on the
/// circle of radius `d_target` around a uniform Tx, rejected until it falls
/// inside the outline.
pub fn simulate_conditioned(
    fp: &Floorplan,
    params: &DsParams,
    d_target: f64,
    n_links: u64,
    seed: u64,
) -> Result<Vec<LinkSample>> {
    if n_links == 0 {
        return Err(Error::Domain("n_links must be at least 1".to_owned()));
    }
    if !d_target.is_finite() || d_target <= 0.0 || d_target >= fp.diagonal() {
        return Err(Error::Domain(format!(
            "conditioned distance {d_target} must lie in (0, outline diagonal)"
        )));
    }
    params.validate_for(fp)?;
    let laws = resolve_laws(fp, params)?;
    let (w, h) = (fp.width(), fp.height());
    let samples = (0..n_links)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            loop {
                let tx = (rng.random::<f64>() * w, rng.random::<f64>() * h);
                let theta = rng.random::<f64>() * 2.0 * PI;
                let rx = (tx.0 + d_target * theta.cos(), tx.1 + d_target * theta.sin());
                if rx.0 >= 0.0 && rx.0 < w && rx.1 >= 0.0 && rx.1 < h {
                    return finish_link(fp, &laws, tx, rx, &mut rng);
                }
            }
        })
        .collect();
    Ok(samples)
}

fn summarize(fp: &Floorplan, params: &DsParams, samples: &[LinkSample], seed: u64) -> SimReport {
    let n = samples.len();
    let taus_i: Vec<f64> = samples.iter().map(|s| s.tau_indoor).collect();
    let taus_o: Vec<f64> = samples.iter().map(|s| s.tau_open).collect();
    let gains: Vec<f64> = samples.iter().map(|s| s.tau_indoor - s.tau_open).collect();
    let (mean_i, se_i) = mean_and_se(&taus_i);
    let (mean_o, se_o) = mean_and_se(&taus_o);
    let (_, se_g) = mean_and_se(&gains);
    let reliability = if n >= RELIABILITY_MIN_SAMPLES {
        empirical_reliability(samples, |s| conditional_gain_mean(s, fp, params), 1.0).ok()
    } else {
        None
    };
    SimReport {
        n_links: n as u64,
        seed,
        mean_tau_indoor_ns: mean_i,
        se_tau_indoor_ns: se_i,
        mean_tau_open_ns: mean_o,
        se_tau_open_ns: se_o,
        ds_gain_sim_ns: mean_i - mean_o,
        se_ds_gain_ns: se_g,
        empirical_reliability_ns: reliability,
    }
}

/// Pairwise (cascade) summation in index order: deterministic and stable.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        acc
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Empirical CDF of `tau_indoor` over samples with `|d - d_target| <=
/// d_window / 2`, as `(tau, P(tau_I <= tau))` steps.
pub fn empirical_tau_cdf(
    samples: &[LinkSample],
    d_target: f64,
    d_window: f64,
) -> Result<Vec<(f64, f64)>> {
    if !d_window.is_finite() || d_window <= 0.0 {
        return Err(Error::Domain(format!(
            "CDF window must be positive, got {d_window}"
        )));
    }
    let mut taus: Vec<f64> = samples
        .iter()
        .filter(|s| (s.d - d_target).abs() <= 0.5 * d_window)
        .map(|s| s.tau_indoor)
        .collect();
    if taus.len() < 100 {
        return Err(Error::InsufficientSamples {
            needed: 100,
            got: taus.len(),
        });
    }
    taus.sort_by(f64::total_cmp);
    let n = taus.len() as f64;
    Ok(taus
        .into_iter()
        .enumerate()
        .map(|(i, tau)| (tau, (i + 1) as f64 / n))
        .collect())
}

/// Normalized histogram of link distances: `(bin centre, density)` rows with
/// total mass one.
pub fn empirical_distance_pdf(
    samples: &[LinkSample],
    bin_width: f64,
) -> Result<Vec<(f64, f64)>> {
    if !bin_width.is_finite() || bin_width <= 0.0 {
        return Err(Error::Domain(format!(
            "bin width must be positive, got {bin_width}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let max_d = samples.iter().map(|s| s.d).fold(0.0, f64::max);
    let bins = (max_d / bin_width).floor() as usize + 1;
    let mut counts = vec![0u64; bins];
    for s in samples {
        counts[(s.d / bin_width) as usize] += 1;
    }
    let n = samples.len() as f64;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| ((i as f64 + 0.5) * bin_width, c as f64 / (n * bin_width)))
        .collect())
}

/// Analytic conditional mean of the per-link gain given the sample's
/// distance, room type, and blockage state; the centring function for
/// [`empirical_reliability`].
pub fn conditional_gain_mean(s: &LinkSample, fp: &Floorplan, params: &DsParams) -> f64 {
    let room = &fp.rooms()[s.tx_room as usize];
    let row = params
        .row(&room.room_type, s.blockage)
        .expect("parameter table validated against the floorplan");
    let t = if s.d > 0.0 {
        truncated_mean(channel::tau_indoor_unchecked(s.d, row, params))
    } else {
        0.0
    };
    t - s.tau_open
}

/// Distance-binned empirical reliability: per bin, the root mean square of
/// the per-link gain's deviation from its analytic conditional mean
/// `mean_fn(sample)`; bins are averaged weighted by their sample mass.
pub fn empirical_reliability<F: Fn(&LinkSample) -> f64>(
    samples: &[LinkSample],
    mean_fn: F,
    bin_width: f64,
) -> Result<f64> {
    if samples.len() < RELIABILITY_MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: RELIABILITY_MIN_SAMPLES,
            got: samples.len(),
        });
    }
    if !bin_width.is_finite() || bin_width <= 0.0 {
        return Err(Error::Domain(format!(
            "bin width must be positive, got {bin_width}"
        )));
    }
    let max_d = samples.iter().map(|s| s.d).fold(0.0, f64::max);
    let bins = (max_d / bin_width).floor() as usize + 1;
    let mut sq_sum = vec![0.0f64; bins];
    let mut counts = vec![0u64; bins];
    for s in samples {
        let dev = (s.tau_indoor - s.tau_open) - mean_fn(s);
        let bin = (s.d / bin_width) as usize;
        sq_sum[bin] += dev * dev;
        counts[bin] += 1;
    }
    let n = samples.len() as f64;
    let mut out = 0.0;
    for (sq, c) in sq_sum.iter().zip(&counts) {
        if *c > 0 {
            out += (*c as f64 / n) * (sq / *c as f64).sqrt();
        }
    }
    Ok(out)
}

/// Writes samples as CSV with the layout's room metadata resolved.
pub fn write_samples_csv<W: Write>(
    mut w: W,
    fp: &Floorplan,
    samples: &[LinkSample],
) -> std::io::Result<()> {
    writeln!(
        w,
        "tx_x,tx_y,rx_x,rx_y,d_m,tx_room,room_type,blockage,tau_indoor_ns,tau_open_ns"
    )?;
    for s in samples {
        let room = &fp.rooms()[s.tx_room as usize];
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            s.tx.0,
            s.tx.1,
            s.rx.0,
            s.rx.1,
            s.d,
            room.id,
            room.room_type,
            s.blockage.as_str(),
            s.tau_indoor,
            s.tau_open
        )?;
    }
    Ok(())
}

/// Two-column CSV for histogram or CDF tables.
pub fn write_xy_csv<W: Write>(
    mut w: W,
    header: (&str, &str),
    rows: &[(f64, f64)],
) -> std::io::Result<()> {
    writeln!(w, "{},{}", header.0, header.1)?;
    for (x, y) in rows {
        writeln!(w, "{x},{y}")?;
    }
    Ok(())
}
