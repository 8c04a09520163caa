use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::TrajectoryRecord;
use crate::error::{CtnError, Result};

/// Normalized half-cut Page entropy `1 - 1/(n ln 2)`.
pub fn page_bound(n: usize) -> f64 {
    1.0 - 1.0 / (n as f64 * std::f64::consts::LN_2)
}

/// Mean and standard error `σ/√m` of a sample (`0` for a single value).
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    if m == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    (mean, (var / m as f64).sqrt())
}

/// Ensemble average of `max_entropy` at one step of one method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub method: String,
    pub theta: f64,
    pub t_count: usize,
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Groups records by `(method, theta, t_count)`.
pub fn summarize(records: &[TrajectoryRecord]) -> Vec<StepSummary> {
    let mut groups: BTreeMap<(String, u64, usize), Vec<f64>> = BTreeMap::new();
    for r in records {
        groups.entry((r.method.clone(), r.theta.to_bits(), r.t_count)).or_default().push(r.max_entropy);
    }
    groups
        .into_iter()
        .map(|((method, theta, t_count), values)| {
            let (mean, stderr) = mean_and_stderr(&values);
            StepSummary { method, theta: f64::from_bits(theta), t_count, mean, stderr, samples: values.len() }
        })
        .collect()
}

/// Ensemble growth rate `α = (S̄(2N) - S̄(N)) / N` of the mean maximal
/// entropy, counting the `N` rotations `N+1 ..= 2N`.
pub fn growth_rate(records: &[TrajectoryRecord], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(CtnError::InvalidArgument("growth rate needs n >= 1".into()));
    }
    let mean_at = |t: usize| -> Result<f64> {
        let v: Vec<f64> = records.iter().filter(|r| r.t_count == t).map(|r| r.max_entropy).collect();
        if v.is_empty() {
            return Err(CtnError::WindowNotCovered(t));
        }
        Ok(mean_and_stderr(&v).0)
    };
    Ok((mean_at(2 * n)? - mean_at(n)?) / n as f64)
}

/// Per-realization growth rates, for error bars on [`growth_rate`].
pub fn growth_rates_per_realization(records: &[TrajectoryRecord], n: usize) -> Result<Vec<f64>> {
    let mut by_run: BTreeMap<usize, Vec<TrajectoryRecord>> = BTreeMap::new();
    for r in records {
        by_run.entry(r.realization).or_default().push(r.clone());
    }
    by_run.values().map(|rs| growth_rate(rs, n)).collect()
}

/// Weighted least-squares line `y = slope x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    pub r_squared: f64,
}

/// Fits `y` against `x` with weights `1/σ²` when every `σ > 0`, ordinary
/// least squares otherwise. With weights the parameter errors come from the
/// covariance `(XᵀWX)⁻¹`; without them from the residual variance.
pub fn linear_fit(x: &[f64], y: &[f64], sigma: Option<&[f64]>) -> Result<LinearFit> {
    let m = x.len();
    if m < 2 || y.len() != m || sigma.is_some_and(|s| s.len() != m) {
        return Err(CtnError::InvalidArgument("linear fit needs at least two matched points".into()));
    }
    let weighted = sigma.filter(|s| s.iter().all(|&v| v > 0.0));
    let w: Vec<f64> = match weighted {
        Some(s) => s.iter().map(|v| 1.0 / (v * v)).collect(),
        None => vec![1.0; m],
    };
    let sw: f64 = w.iter().sum();
    let sx: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let sy: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum();
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let sxy: f64 = w.iter().zip(x).zip(y).map(|((w, x), y)| w * x * y).sum();
    let det = sw * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return Err(CtnError::InvalidArgument("degenerate x values".into()));
    }
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let ybar = sy / sw;
    let ss_res: f64 = (0..m).map(|i| w[i] * (y[i] - slope * x[i] - intercept).powi(2)).sum();
    let ss_tot: f64 = (0..m).map(|i| w[i] * (y[i] - ybar).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let scale = if weighted.is_some() { 1.0 } else if m > 2 { ss_res / (m - 2) as f64 } else { 0.0 };
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr: (scale * sw / det).sqrt(),
        intercept_stderr: (scale * sxx / det).sqrt(),
        r_squared,
    })
}

/// Largest `|a - b| / sqrt(σa² + σb²)` over steps present in both summaries.
/// Steps where both errors vanish count as `0` when the means agree exactly
/// and as infinite otherwise.
pub fn max_standardized_difference(a: &[StepSummary], b: &[StepSummary]) -> f64 {
    let mut worst: f64 = 0.0;
    for sa in a {
        let Some(sb) = b.iter().find(|s| s.t_count == sa.t_count && s.theta.to_bits() == sa.theta.to_bits()) else {
            continue;
        };
        let diff = (sa.mean - sb.mean).abs();
        let err = (sa.stderr.powi(2) + sb.stderr.powi(2)).sqrt();
        let z = if err > 0.0 {
            diff / err
        } else if diff <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        };
        worst = worst.max(z);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(realization: usize, t: usize, s: f64) -> TrajectoryRecord {
        TrajectoryRecord { realization, t_count: t, step: t - 1, max_entropy: s, ..TrajectoryRecord::default() }
    }

    #[test]
    fn page_bound_values() {
        assert!((page_bound(12) - 0.879776).abs() < 1e-6);
        assert!((page_bound(1_000_000) - 1.0).abs() < 1e-5);
        assert!((2..40).all(|n| page_bound(n + 1) > page_bound(n)));
    }

    #[test]
    fn growth_rate_examples() {
        let n = 8;
        let flat: Vec<_> = (1..=20).map(|t| record(0, t, 2.0)).collect();
        assert_eq!(growth_rate(&flat, n).unwrap(), 0.0);
        let ramp: Vec<_> = (1..=20).map(|t| record(0, t, 0.01 * (t as f64 - n as f64))).collect();
        assert!((growth_rate(&ramp, n).unwrap() - 0.01).abs() < 1e-12);
        let short: Vec<_> = (1..=10).map(|t| record(0, t, 1.0)).collect();
        assert!(matches!(growth_rate(&short, n), Err(CtnError::WindowNotCovered(16))));
        let two: Vec<_> = (1..=20).flat_map(|t| [record(0, t, t as f64), record(1, t, 0.0)]).collect();
        assert_eq!(growth_rates_per_realization(&two, n).unwrap(), vec![1.0, 0.0]);
        assert!((growth_rate(&two, n).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn standard_error_examples() {
        assert_eq!(mean_and_stderr(&[3.0]), (3.0, 0.0));
        let (m, se) = mean_and_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        let std = statrs::statistics::Statistics::std_dev([1.0, 2.0, 3.0, 4.0].iter());
        assert!((se - std / 2.0).abs() < 1e-12);
    }

    #[test]
    fn linear_fit_recovers_lines() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let fit = linear_fit(&x, &y, None).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12 && (fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        let fit = linear_fit(&x, &y, Some(&[0.1, 0.2, 0.1, 0.3])).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.intercept_stderr > 0.0);
        let noisy = [3.1, 4.9, 7.2, 8.8];
        let fit = linear_fit(&x, &noisy, None).unwrap();
        assert!(fit.r_squared > 0.9 && fit.r_squared < 1.0);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0], None).is_err());
        assert!(linear_fit(&[1.0], &[0.0], None).is_err());
    }

    #[test]
    fn summaries_and_comparisons() {
        let mut rs = Vec::new();
        for (i, s) in [1.0, 2.0, 3.0].iter().enumerate() {
            rs.push(TrajectoryRecord { method: "a".into(), ..record(i, 1, *s) });
            rs.push(TrajectoryRecord { method: "b".into(), ..record(i, 1, s + 0.1) });
        }
        let sum = summarize(&rs);
        assert_eq!(sum.len(), 2);
        assert_eq!(sum[0].samples, 3);
        assert!((sum[0].mean - 2.0).abs() < 1e-12);
        let z = max_standardized_difference(&sum[..1], &sum[1..]);
        assert!((z - 0.1 / (2.0 * sum[0].stderr.powi(2)).sqrt()).abs() < 1e-12);
        let single = summarize(&rs[..1]);
        assert_eq!(single[0].stderr, 0.0);
    }
}
