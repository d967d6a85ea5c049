//! Adaptive Gauss-Kronrod quadrature with mandatory breakpoint splits.
//!
//! The delay-spread integrands are smooth except at the containment-kernel
//! branch points, where the second derivative jumps. Plain adaptive
//! refinement stalls on those kinks, so callers pass them up front and every
//! one becomes an initial panel boundary. Inside each panel a (G7, K15) pair
//! supplies the value and the error estimate; the panel with the largest
//! estimate is bisected until the summed estimate meets tolerance.

use crate::error::{Error, Result};

/// Tolerances and budget for one integral evaluation.
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    /// Relative tolerance on the integral value.
    pub rel_tol: f64,
    /// Absolute tolerance floor (values near zero), in the integrand's units.
    pub abs_tol: f64,
    /// Extra panel boundaries merged into every integral's own breakpoints.
    pub breakpoints: Vec<f64>,
    /// Maximum number of panels before giving up.
    pub max_intervals: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            breakpoints: Vec::new(),
            max_intervals: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            ..Default::default()
        }
    }
}

/// Value and diagnostics of one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
    pub intervals: usize,
}

// 15-point Kronrod abscissae on [-1, 1] (positive half) and weights, with
// the embedded 7-point Gauss weights on the odd Kronrod nodes. Digits kept
// as tabulated; the compiler rounds to the nearest f64.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One (G7, K15) pass over `[a, b]`: returns the K15 value and `|K15 - G7|`.
fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);

    let f_mid = f(mid);
    let mut kronrod = WGK[7] * f_mid;
    let mut gauss = WG[3] * f_mid;

    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let fsum = f(mid - dx) + f(mid + dx);
        kronrod += WGK[i] * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Integrates `f` over `[lo, hi]`, splitting at `breakpoints` (values outside
/// `(lo, hi)` are ignored) and at the panels in `spec.breakpoints`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    if lo.is_nan() || hi.is_nan() || hi < lo {
        return Err(Error::Domain(format!(
            "integration bounds out of order: [{lo}, {hi}]"
        )));
    }
    if hi == lo {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            intervals: 0,
        });
    }

    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .chain(spec.breakpoints.iter())
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut panels = Vec::with_capacity(cuts.len() + 1);
    let mut evaluations = 0u64;
    let mut left = lo;
    for cut in cuts.into_iter().chain(std::iter::once(hi)) {
        let (value, error) = gauss_kronrod(&f, left, cut);
        evaluations += 15;
        panels.push(Panel {
            a: left,
            b: cut,
            value,
            error,
        });
        left = cut;
    }

    loop {
        let total: f64 = {
            let mut ordered: Vec<&Panel> = panels.iter().collect();
            ordered.sort_by(|p, q| p.a.total_cmp(&q.a));
            ordered.iter().map(|p| p.value).sum()
        };
        let total_error: f64 = panels.iter().map(|p| p.error).sum();
        let tolerance = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_error <= tolerance {
            return Ok(QuadResult {
                value: total,
                error_estimate: total_error,
                evaluations,
                intervals: panels.len(),
            });
        }
        if panels.len() >= spec.max_intervals {
            return Err(Error::Convergence {
                error_estimate: total_error,
                tolerance,
                intervals: panels.len(),
            });
        }

        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.error.total_cmp(&q.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // interval is at floating-point resolution; accept its estimate
            let total_error: f64 = panels.iter().map(|p| p.error).sum();
            return Err(Error::Convergence {
                error_estimate: total_error,
                tolerance,
                intervals: panels.len(),
            });
        }
        let (lv, le) = gauss_kronrod(&f, a, mid);
        let (rv, re) = gauss_kronrod(&f, mid, b);
        evaluations += 30;
        panels[worst] = Panel {
            a,
            b: mid,
            value: lv,
            error: le,
        };
        panels.push(Panel {
            a: mid,
            b,
            value: rv,
            error: re,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        // K15 integrates degree <= 22 exactly
        let spec = QuadratureSpec::default();
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, &[], &spec).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13, "value = {}", r.value);
        assert_eq!(r.intervals, 1);
    }

    #[test]
    fn kinked_integrand_with_breakpoint() {
        let spec = QuadratureSpec::default();
        let f = |x: f64| (x - 1.0).abs();
        let exact = 1.0;
        let r = integrate(f, 0.0, 2.0, &[1.0], &spec).unwrap();
        assert!((r.value - exact).abs() < 1e-12);
        // without the breakpoint it still converges, just works harder
        let r2 = integrate(f, 0.0, 2.0, &[], &spec).unwrap();
        assert!((r2.value - exact).abs() < 1e-8);
        assert!(r2.intervals >= r.intervals);
    }

    #[test]
    fn oscillatory_integral() {
        let spec = QuadratureSpec::default();
        let r = integrate(|x: f64| (10.0 * x).sin(), 0.0, std::f64::consts::PI, &[], &spec).unwrap();
        let exact = (1.0 - (10.0 * std::f64::consts::PI).cos()) / 10.0;
        assert!((r.value - exact).abs() < 1e-10);
    }

    #[test]
    fn empty_interval_is_zero() {
        let spec = QuadratureSpec::default();
        let r = integrate(|_| 1.0, 3.0, 3.0, &[], &spec).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(integrate(|_| 1.0, 3.0, 2.0, &[], &spec).is_err());
    }

    #[test]
    fn budget_exhaustion_reports_convergence_error() {
        let spec = QuadratureSpec {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            breakpoints: Vec::new(),
            max_intervals: 2,
        };
        // sqrt has unbounded derivatives at 0; two panels cannot reach 1e-14
        let err = integrate(|x: f64| x.sqrt(), 0.0, 1.0, &[], &spec).unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }), "{err}");
    }

    #[test]
    fn breakpoints_outside_bounds_are_ignored() {
        let spec = QuadratureSpec::default();
        let r = integrate(|x| x, 0.0, 1.0, &[-1.0, 0.0, 1.0, 5.0], &spec).unwrap();
        assert!((r.value - 0.5).abs() < 1e-14);
        assert_eq!(r.intervals, 1);
    }
}
