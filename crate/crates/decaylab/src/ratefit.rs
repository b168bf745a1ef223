//! Asymptotic model fitting on sampled time series.
//!
//! Three fits cover the claims the scenarios make about late-time behavior:
//! a power law `y ~ A t^beta` (ordinary least squares in log-log),
//! a square-root-of-log law `y ~ sqrt(slope * log t)` (least squares of
//! `y^2` against `log t`), and a boundedness verdict (flat power exponent
//! plus a sup bound against a configured multiple of the data scale).
//!
//! All fits run on an explicit `[t0, t1]` window with `t0 >= 1` so the
//! logarithms are well-behaved, and refuse windows holding fewer than ten
//! samples.

use serde::Serialize;

use crate::numgrid::csum;
use crate::{Error, Result};

/// Minimum number of samples a fit window must contain.
pub const MIN_WINDOW_SAMPLES: usize = 10;

/// |beta| at or below this counts as "no growth" for boundedness verdicts.
pub const BETA_TOL: f64 = 0.05;

/// Which asymptotic model a [`RateFit`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    Power,
    Sqrtlog,
    Bounded,
}

/// A fitted asymptotic model over a time window.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub model: FitModel,
    /// `[t0, t1]` actually used for the fit.
    pub window: (f64, f64),
    /// Power model: the log-log slope beta. Sqrtlog model: the slope of
    /// `y^2` against `log t` (the squared prefactor).
    pub exponent: f64,
    /// Power model: `exp(intercept)`. Sqrtlog model: `sqrt(max(slope, 0))`.
    pub prefactor: f64,
    pub r_squared: f64,
    /// Standard error of the fitted slope.
    pub slope_se: f64,
    /// Sqrtlog only: `max(y^2 / log t) / min(y^2 / log t)` over the window
    /// (samples at `t = 1` excluded); 1 means a perfect sqrt-log profile.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub goodness_ratio: Option<f64>,
    pub n_samples: usize,
}

/// Boundedness verdict for a series against a data-derived scale.
#[derive(Debug, Clone, Serialize)]
pub struct BoundednessVerdict {
    pub bounded: bool,
    pub window: (f64, f64),
    /// Largest sample value on the window and where it occurs.
    pub sup: f64,
    pub sup_t: f64,
    /// `sup / data_scale` (0 when both vanish).
    pub ratio: f64,
    pub ratio_cap: f64,
    /// Fitted power exponent over the window (0 for an identically zero
    /// series).
    pub exponent: f64,
    pub slope_se: f64,
}

/// Default window for growth-rate fits over a run of length `horizon`:
/// `[20, horizon]`, clipped so the start stays in `[1, horizon/2]`.
pub fn growth_window(horizon: f64) -> (f64, f64) {
    ((horizon / 2.0).min(20.0).max(1.0), horizon)
}

/// Default window for decay/boundedness fits: the last three quarters of
/// the run, starting no earlier than `t = 1`.
pub fn decay_window(horizon: f64) -> (f64, f64) {
    ((horizon / 4.0).max(1.0), horizon)
}

fn window_slice(samples: &[(f64, f64)], window: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    let (t0, t1) = window;
    if !(t0.is_finite() && t1.is_finite()) || t0 < 1.0 || t1 <= t0 {
        return Err(Error::Fit(format!(
            "fit window [{t0}, {t1}] must satisfy 1 <= t0 < t1"
        )));
    }
    let picked: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(t, _)| *t >= t0 && *t <= t1)
        .collect();
    if picked.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::Fit(format!(
            "window [{t0}, {t1}] holds {} samples; need at least {MIN_WINDOW_SAMPLES}",
            picked.len()
        )));
    }
    Ok(picked)
}

fn require_positive(picked: &[(f64, f64)], what: &str) -> Result<()> {
    for (t, y) in picked {
        if *y <= 0.0 || !y.is_finite() {
            return Err(Error::Fit(format!(
                "{what} needs positive finite values, found y = {y} at t = {t}"
            )));
        }
    }
    Ok(())
}

struct LineFit {
    slope: f64,
    intercept: f64,
    r_squared: f64,
    slope_se: f64,
}

/// Plain least squares of `z` against `x`, with `r^2` clamped to `[0, 1]`
/// and defined as 1 when `z` has no variance at all.
fn least_squares(xs: &[f64], zs: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = csum(xs.iter().copied()) / n;
    let mz = csum(zs.iter().copied()) / n;
    let sxx = csum(xs.iter().map(|x| (x - mx) * (x - mx)));
    let sxz = csum(xs.iter().zip(zs).map(|(x, z)| (x - mx) * (z - mz)));
    let slope = sxz / sxx;
    let intercept = mz - slope * mx;
    let ss_tot = csum(zs.iter().map(|z| (z - mz) * (z - mz)));
    let ss_res = csum(
        xs.iter()
            .zip(zs)
            .map(|(x, z)| {
                let r = z - (intercept + slope * x);
                r * r
            }),
    );
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let slope_se = (ss_res / ((n - 2.0) * sxx)).sqrt();
    LineFit { slope, intercept, r_squared, slope_se }
}

/// Fit `y ~ prefactor * t^exponent` by ordinary least squares of `log y`
/// against `log t` over the window. Exact power laws are recovered to
/// machine precision; nonpositive values anywhere in the window are an
/// error.
pub fn fit_power(samples: &[(f64, f64)], window: (f64, f64)) -> Result<RateFit> {
    let picked = window_slice(samples, window)?;
    require_positive(&picked, "power-law fit")?;
    let xs: Vec<f64> = picked.iter().map(|(t, _)| t.ln()).collect();
    let zs: Vec<f64> = picked.iter().map(|(_, y)| y.ln()).collect();
    let line = least_squares(&xs, &zs);
    Ok(RateFit {
        model: FitModel::Power,
        window,
        exponent: line.slope,
        prefactor: line.intercept.exp(),
        r_squared: line.r_squared,
        slope_se: line.slope_se,
        goodness_ratio: None,
        n_samples: picked.len(),
    })
}

/// Fit `y ~ sqrt(slope * log t)` by least squares of `y^2` against
/// `log t`. The slope estimates the squared prefactor; the goodness ratio
/// `max(y^2/log t) / min(y^2/log t)` (over samples with `t > 1`) is 1 for
/// an exact sqrt-log profile and grows as the profile departs from it.
pub fn fit_sqrtlog(samples: &[(f64, f64)], window: (f64, f64)) -> Result<RateFit> {
    let picked = window_slice(samples, window)?;
    require_positive(&picked, "sqrt-log fit")?;
    let xs: Vec<f64> = picked.iter().map(|(t, _)| t.ln()).collect();
    let zs: Vec<f64> = picked.iter().map(|(_, y)| y * y).collect();
    let line = least_squares(&xs, &zs);
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = 0.0f64;
    for (x, z) in xs.iter().zip(&zs) {
        if *x > 0.0 {
            let r = z / x;
            ratio_min = ratio_min.min(r);
            ratio_max = ratio_max.max(r);
        }
    }
    let goodness = if ratio_min.is_finite() && ratio_min > 0.0 {
        Some(ratio_max / ratio_min)
    } else {
        None
    };
    Ok(RateFit {
        model: FitModel::Sqrtlog,
        window,
        exponent: line.slope,
        prefactor: line.slope.max(0.0).sqrt(),
        r_squared: line.r_squared,
        slope_se: line.slope_se,
        goodness_ratio: goodness,
        n_samples: picked.len(),
    })
}

/// Decide whether a series is bounded on the window: the fitted power
/// exponent must be flat (`|beta| <= BETA_TOL`) and the sup must not
/// exceed `ratio_cap * data_scale`. An identically zero window is bounded
/// with exponent 0.
pub fn boundedness_score(
    samples: &[(f64, f64)],
    window: (f64, f64),
    data_scale: f64,
    ratio_cap: f64,
) -> Result<BoundednessVerdict> {
    let picked = window_slice(samples, window)?;
    let (mut sup, mut sup_t) = (f64::NEG_INFINITY, 0.0);
    for (t, y) in &picked {
        if *y > sup {
            sup = *y;
            sup_t = *t;
        }
    }
    let (exponent, slope_se) = if sup <= 0.0 {
        (0.0, 0.0)
    } else {
        let fit = fit_power(samples, window)?;
        (fit.exponent, fit.slope_se)
    };
    let ratio = if sup == 0.0 && data_scale == 0.0 { 0.0 } else { sup / data_scale };
    Ok(BoundednessVerdict {
        bounded: exponent.abs() <= BETA_TOL && sup <= ratio_cap * data_scale,
        window,
        sup,
        sup_t,
        ratio,
        ratio_cap,
        exponent,
        slope_se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn linear_samples(t0: f64, t1: f64, n: usize, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let t = t0 + (t1 - t0) * i as f64 / (n - 1) as f64;
                (t, f(t))
            })
            .collect()
    }

    fn log_samples(t0: f64, t1: f64, n: usize, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let t = t0 * (t1 / t0).powf(i as f64 / (n - 1) as f64);
                (t, f(t))
            })
            .collect()
    }

    #[test]
    fn exact_power_law_is_recovered_to_machine_precision() {
        let s = linear_samples(1.0, 100.0, 120, |t| 3.0 * t.powf(0.5));
        let fit = fit_power(&s, (1.0, 100.0)).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-12, "beta = {}", fit.exponent);
        assert!((fit.prefactor - 3.0).abs() < 1e-12, "A = {}", fit.prefactor);
        assert!(fit.r_squared > 1.0 - 1e-12);
        assert!(fit.slope_se < 1e-12);
        assert_eq!(fit.n_samples, 120);
        assert_eq!(fit.model, FitModel::Power);
    }

    #[test]
    fn constant_series_fits_flat() {
        let s = linear_samples(1.0, 50.0, 60, |_| 7.0);
        let fit = fit_power(&s, (1.0, 50.0)).unwrap();
        assert!(fit.exponent.abs() < 1e-13, "beta = {}", fit.exponent);
        assert!((fit.prefactor - 7.0).abs() < 1e-12);
    }

    #[test]
    fn power_fit_rejects_bad_windows_and_values() {
        let s = linear_samples(1.0, 50.0, 60, |t| t);
        assert!(matches!(fit_power(&s, (0.5, 50.0)), Err(Error::Fit(_))));
        assert!(matches!(fit_power(&s, (10.0, 5.0)), Err(Error::Fit(_))));
        // window catching just a handful of samples
        assert!(matches!(fit_power(&s, (1.0, 3.0)), Err(Error::Fit(_))));
        let mut with_zero = s.clone();
        with_zero[30].1 = 0.0;
        assert!(matches!(fit_power(&with_zero, (1.0, 50.0)), Err(Error::Fit(_))));
        let mut with_neg = s;
        with_neg[10].1 = -1.0;
        assert!(matches!(fit_power(&with_neg, (1.0, 50.0)), Err(Error::Fit(_))));
    }

    #[test]
    fn exact_sqrtlog_profile_is_recovered() {
        let s = log_samples(2.0, 1.0e4, 200, |t| (2.0 * t.ln()).sqrt());
        let fit = fit_sqrtlog(&s, (2.0, 1.0e4)).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12, "slope = {}", fit.exponent);
        assert!((fit.prefactor - 2.0f64.sqrt()).abs() < 1e-12);
        assert!(fit.r_squared > 1.0 - 1e-12);
        let g = fit.goodness_ratio.unwrap();
        assert!((g - 1.0).abs() < 1e-12, "goodness = {g}");
    }

    #[test]
    fn sqrtlog_slope_of_a_constant_is_zero() {
        let s = log_samples(2.0, 1.0e3, 100, |_| 4.0);
        let fit = fit_sqrtlog(&s, (2.0, 1.0e3)).unwrap();
        assert!(fit.exponent.abs() < 1e-11, "slope = {}", fit.exponent);
        // constant y over growing log t makes the pointwise ratio spread
        assert!(fit.goodness_ratio.unwrap() > 2.0);
    }

    #[test]
    fn power_and_sqrtlog_models_are_distinguishable() {
        // sqrt(log t) over [10, 1e4] looks almost flat to a power fit
        let slow = log_samples(10.0, 1.0e4, 200, |t| t.ln().sqrt());
        let beta_slow = fit_power(&slow, (10.0, 1.0e4)).unwrap().exponent;
        assert!(beta_slow < 0.1, "beta = {beta_slow}");
        assert!(beta_slow > 0.0);

        // while a genuine t^0.1 keeps its exponent
        let fast = log_samples(10.0, 1.0e4, 200, |t| t.powf(0.1));
        let beta_fast = fit_power(&fast, (10.0, 1.0e4)).unwrap().exponent;
        assert!(beta_fast >= 0.09, "beta = {beta_fast}");

        // and the sqrt-log fit prefers the right profile
        let good = fit_sqrtlog(&slow, (10.0, 1.0e4)).unwrap();
        assert!(good.r_squared > 1.0 - 1e-10);
        assert!((good.goodness_ratio.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundedness_verdicts_match_hand_cases() {
        let flat = linear_samples(1.0, 40.0, 80, |_| 1.0);
        let v = boundedness_score(&flat, (1.0, 40.0), 1.0, 10.0).unwrap();
        assert!(v.bounded);
        assert_eq!(v.sup, 1.0);
        assert!(v.exponent.abs() < 1e-12);
        assert_eq!(v.ratio, 1.0);

        let growing = linear_samples(1.0, 40.0, 80, |t| t.powf(0.5));
        let v = boundedness_score(&growing, (1.0, 40.0), 1e6, 1e6).unwrap();
        assert!(!v.bounded, "t^0.5 must fail the flatness test, beta = {}", v.exponent);
        assert!((v.exponent - 0.5).abs() < 0.01);

        // flat but too large against the cap
        let big = linear_samples(1.0, 40.0, 80, |_| 50.0);
        let v = boundedness_score(&big, (1.0, 40.0), 1.0, 10.0).unwrap();
        assert!(!v.bounded);
        assert_eq!(v.ratio, 50.0);

        // identically zero is trivially bounded
        let zero = linear_samples(1.0, 40.0, 80, |_| 0.0);
        let v = boundedness_score(&zero, (1.0, 40.0), 0.0, 10.0).unwrap();
        assert!(v.bounded);
        assert_eq!(v.sup, 0.0);
        assert_eq!(v.ratio, 0.0);
    }

    #[test]
    fn default_windows_have_sane_shapes() {
        assert_eq!(growth_window(100.0), (20.0, 100.0));
        assert_eq!(growth_window(10.0), (5.0, 10.0));
        assert_eq!(growth_window(1.5), (1.0, 1.5));
        assert_eq!(decay_window(200.0), (50.0, 200.0));
        assert_eq!(decay_window(2.0), (1.0, 2.0));
    }

    proptest! {
        #[test]
        fn power_fit_is_scale_invariant(
            a in 0.1f64..10.0,
            beta in -1.0f64..1.0,
            c in 1e-6f64..1e6,
        ) {
            let base = linear_samples(1.0, 60.0, 60, |t| a * t.powf(beta));
            let scaled: Vec<(f64, f64)> =
                base.iter().map(|(t, y)| (*t, c * y)).collect();
            let f1 = fit_power(&base, (1.0, 60.0)).unwrap();
            let f2 = fit_power(&scaled, (1.0, 60.0)).unwrap();
            prop_assert!((f1.exponent - f2.exponent).abs() < 1e-9);
            prop_assert!((f1.r_squared - f2.r_squared).abs() < 1e-9);
            prop_assert!((f2.prefactor / (c * f1.prefactor) - 1.0).abs() < 1e-9);
            prop_assert!((f1.exponent - beta).abs() < 1e-9);
        }

        #[test]
        fn boundedness_verdict_survives_joint_rescale(
            c in 1e-3f64..1e3,
            amp in 0.5f64..2.0,
            wobble in 0.0f64..1e-3,
        ) {
            let base = linear_samples(1.0, 30.0, 60, |t| amp * (1.0 + wobble * t.sin()));
            let scaled: Vec<(f64, f64)> =
                base.iter().map(|(t, y)| (*t, c * y)).collect();
            let v1 = boundedness_score(&base, (1.0, 30.0), amp, 10.0).unwrap();
            let v2 = boundedness_score(&scaled, (1.0, 30.0), c * amp, 10.0).unwrap();
            prop_assert!(v1.bounded);
            prop_assert_eq!(v1.bounded, v2.bounded);
            prop_assert!((v1.ratio - v2.ratio).abs() < 1e-9);

            let grow = linear_samples(1.0, 30.0, 60, |t| amp * t.powf(0.5));
            let grow_scaled: Vec<(f64, f64)> =
                grow.iter().map(|(t, y)| (*t, c * y)).collect();
            let g1 = boundedness_score(&grow, (1.0, 30.0), amp, 1e9).unwrap();
            let g2 = boundedness_score(&grow_scaled, (1.0, 30.0), c * amp, 1e9).unwrap();
            prop_assert!(!g1.bounded);
            prop_assert_eq!(g1.bounded, g2.bounded);
        }
    }
}
