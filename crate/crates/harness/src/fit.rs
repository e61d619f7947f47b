//! Log-log least-squares growth exponents.

use crate::error::{HarnessError, Result};
use crate::series::TimeSeries;

pub const MIN_FIT_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    /// RMS of the log-space residuals.
    pub residual_rms: f64,
    pub points: usize,
}

/// Fits `log v = intercept + slope · log t` over samples with `t` in `window`.
pub fn fit_power_law(t: &[f64], v: &[f64], window: (f64, f64)) -> Result<FitResult> {
    if t.len() != v.len() {
        return Err(HarnessError::Input(
            "time and value columns differ in length".into(),
        ));
    }
    let (lo, hi) = window;
    if !(lo > 0.0 && lo < hi) {
        return Err(HarnessError::Input(format!(
            "window must satisfy 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&ti, &vi) in t.iter().zip(v) {
        if ti >= lo && ti <= hi {
            if !(vi > 0.0 && vi.is_finite()) {
                return Err(HarnessError::Input(format!(
                    "non-positive value {vi} at t = {ti}"
                )));
            }
            xs.push(ti.ln());
            ys.push(vi.ln());
        }
    }
    let n = xs.len();
    if n < MIN_FIT_POINTS {
        return Err(HarnessError::Input(format!(
            "need at least {MIN_FIT_POINTS} points in [{lo}, {hi}], got {n}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(HarnessError::Input("all fit points share one time".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let t_in = t.iter().copied().filter(|&ti| ti >= lo && ti <= hi);
    let (t_lo, t_hi) = t_in.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
        (a.min(x), b.max(x))
    });
    Ok(FitResult {
        slope,
        intercept,
        t_lo,
        t_hi,
        residual_rms: (ss / nf).sqrt(),
        points: n,
    })
}

/// Fits `column` against the first column of `series`. Without a window
/// every sample with positive time is used.
pub fn fit_growth(
    series: &TimeSeries,
    column: &str,
    window: Option<(f64, f64)>,
) -> Result<FitResult> {
    let t = series.column(&series.columns[0])?;
    let v = series.column(column)?;
    let window = window.unwrap_or_else(|| {
        let pos = t.iter().copied().filter(|&x| x > 0.0);
        let lo = pos.clone().fold(f64::INFINITY, f64::min);
        let hi = pos.fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    });
    fit_power_law(&t, &v, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn exact_square_root() {
        let t = grid(32, 1.0, 100.0);
        let v: Vec<f64> = t.iter().map(|x| 3.0 * x.sqrt()).collect();
        let f = fit_power_law(&t, &v, (1.0, 100.0)).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-6);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn constant_series() {
        let t = grid(32, 1.0, 100.0);
        let v = vec![7.0; 32];
        assert!(fit_power_law(&t, &v, (1.0, 100.0)).unwrap().slope.abs() < 1e-9);
    }

    #[test]
    fn oscillating_envelope() {
        let t = grid(200, 1.0, 1e4);
        let v: Vec<f64> = t
            .iter()
            .map(|x| x.powf(0.25) * (2.0 + x.ln().sin()))
            .collect();
        let s = fit_power_law(&t, &v, (1.0, 1e4)).unwrap().slope;
        assert!((0.15..=0.35).contains(&s), "{s}");
    }

    #[test]
    fn too_few_points() {
        let t = grid(7, 1.0, 10.0);
        let e = fit_power_law(&t, &t, (1.0, 10.0)).unwrap_err();
        assert!(e.to_string().contains("at least 8"));
    }

    #[test]
    fn rejects_non_positive_values() {
        let t = grid(10, 1.0, 10.0);
        let mut v = t.clone();
        v[3] = 0.0;
        assert!(fit_power_law(&t, &v, (1.0, 10.0)).is_err());
    }

    #[test]
    fn window_selects_points() {
        let t = grid(40, 1.0, 1000.0);
        let v: Vec<f64> = t.iter().map(|&x| if x < 10.0 { 1.0 } else { x }).collect();
        let f = fit_power_law(&t, &v, (10.0, 1000.0)).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert!(f.t_lo >= 10.0 && f.t_hi <= 1000.0);
    }

    proptest! {
        #[test]
        fn recovers_power_laws(a in 0.01f64..100.0, b in -3.0f64..3.0) {
            let t = grid(16, 0.5, 50.0);
            let v: Vec<f64> = t.iter().map(|x| a * x.powf(b)).collect();
            let f = fit_power_law(&t, &v, (0.5, 50.0)).unwrap();
            prop_assert!((f.slope - b).abs() < 1e-9);
            prop_assert!(f.residual_rms < 1e-9);
        }
    }
}
