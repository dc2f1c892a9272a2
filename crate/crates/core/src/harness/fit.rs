use super::experiment::Trace;

/// Default share of the usable trace, taken from its end, used for fitting.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.5;

/// Values below this are not used for fitting. Noisy runs in f64 stall
/// around `1e-29` because withdrawn noise leaves rounding residue in the
/// sum, so the last few decades above the recording floor are not decay.
pub const FIT_FLOOR: f64 = 1e-25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// `exp(slope)` of `ln(error)` against iteration; `0.0` when degenerate.
    pub rate: f64,
    /// Fewer than two positive points were available.
    pub degenerate: bool,
    /// The series fell below the fit floor and was cut before that point.
    pub truncated: bool,
    /// Range of row indices that entered the fit, `start..end`.
    pub window: (usize, usize),
}

/// Fits a per-iteration geometric rate to the mean relative error column.
pub fn fit_rate(trace: &Trace, tail_fraction: f64) -> RateFit {
    fit_series(&trace.times(), &trace.mean_rel_err(), tail_fraction)
}

pub fn fit_baseline_rate(trace: &Trace, tail_fraction: f64) -> RateFit {
    fit_series(&trace.times(), &trace.baseline_rel_err(), tail_fraction)
}

/// Least-squares slope of `ln y` on `t` over the trailing `tail_fraction` of
/// the series, exponentiated.
///
/// Only the prefix before the first value below [`FIT_FLOOR`] is used: past
/// that point the curve reflects rounding, not convergence.
pub fn fit_series(t: &[u64], y: &[f64], tail_fraction: f64) -> RateFit {
    fit_series_above(t, y, tail_fraction, FIT_FLOOR)
}

/// [`fit_series`] with an explicit cut-off; `floor = 0.0` keeps every
/// positive point.
pub fn fit_series_above(t: &[u64], y: &[f64], tail_fraction: f64, floor: f64) -> RateFit {
    assert_eq!(t.len(), y.len(), "time and value columns differ in length");
    let usable = y
        .iter()
        .position(|&v| !(v > 0.0 && v >= floor))
        .unwrap_or(y.len());
    let truncated = usable < y.len();
    let frac = tail_fraction.clamp(0.0, 1.0);
    let count = ((usable as f64 * frac).ceil() as usize).clamp(usable.min(2), usable);
    let start = usable - count;
    if count < 2 {
        return RateFit {
            rate: 0.0,
            degenerate: true,
            truncated,
            window: (start, usable),
        };
    }

    let xs: Vec<f64> = t[start..usable].iter().map(|&v| v as f64).collect();
    let ys: Vec<f64> = y[start..usable].iter().map(|v| v.ln()).collect();
    let n = count as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return RateFit {
            rate: 0.0,
            degenerate: true,
            truncated,
            window: (start, usable),
        };
    }
    RateFit {
        rate: (sxy / sxx).exp(),
        degenerate: false,
        truncated,
        window: (start, usable),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential() {
        let t: Vec<u64> = (0..2000).collect();
        let y: Vec<f64> = t.iter().map(|&k| 0.99f64.powi(k as i32)).collect();
        let fit = fit_series(&t, &y, DEFAULT_TAIL_FRACTION);
        assert!((fit.rate - 0.99).abs() < 1e-6);
        assert_eq!(fit.window, (1000, 2000));
        assert!(!fit.truncated && !fit.degenerate);
    }

    #[test]
    fn constant_is_rate_one() {
        let t: Vec<u64> = (0..100).collect();
        let fit = fit_series(&t, &vec![0.3; 100], 0.5);
        assert!((fit.rate - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zeros_cut_the_series() {
        let t: Vec<u64> = (0..10).collect();
        let mut y: Vec<f64> = t.iter().map(|&k| 0.5f64.powi(k as i32)).collect();
        y[6] = 0.0;
        y[8] = 0.0;
        let fit = fit_series(&t, &y, 0.5);
        assert!(fit.truncated);
        assert_eq!(fit.window, (3, 6));
        assert!((fit.rate - 0.5).abs() < 1e-12);
    }

    #[test]
    fn stops_at_fit_floor() {
        let t: Vec<u64> = (0..100).collect();
        let y: Vec<f64> = t
            .iter()
            .map(|&k| 0.1f64.powi(k as i32).max(1e-29))
            .collect();
        let fit = fit_series(&t, &y, 0.5);
        assert!(fit.truncated);
        assert_eq!(fit.window.1, 26);
        assert!((fit.rate - 0.1).abs() < 1e-9);
        let all = fit_series_above(&t, &y, 1.0, 0.0);
        assert!(!all.truncated && all.rate > 0.1);
    }

    #[test]
    fn immediate_zero_is_degenerate() {
        let fit = fit_series(&[0, 1, 2], &[1.0, 0.0, 0.0], 0.5);
        assert!(fit.degenerate);
        assert_eq!(fit.rate, 0.0);
    }
}
