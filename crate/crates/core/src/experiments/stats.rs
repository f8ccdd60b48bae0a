//! Small statistics kit for the suites: Wilson intervals, fixed-order sums,
//! moments, correlation and the one-sample Kolmogorov–Smirnov test.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }
}

/// Two-sided normal quantile for the given confidence level.
pub fn z_for_confidence(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(LabError::InvalidArgument(format!("confidence level must lie in (0, 1), got {level}")));
    }
    let normal = Normal::standard();
    Ok(normal.inverse_cdf(0.5 + level / 2.0))
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, level: f64) -> Result<Interval> {
    if trials == 0 || successes > trials {
        return Err(LabError::InvalidArgument(format!("invalid counts {successes}/{trials}")));
    }
    let z = z_for_confidence(level)?;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // Clamp to keep the endpoints exact at 0 and 1.
    let low = if successes == 0 { 0.0 } else { (center - half).max(0.0).min(p) };
    let high = if successes == trials { 1.0 } else { (center + half).min(1.0).max(p) };
    Ok(Interval { low, high })
}

/// Pairwise summation in a fixed split order, independent of threading.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Mean and standard error of the mean (sample standard deviation / √n).
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = mean(xs);
    if xs.len() < 2 {
        return (m, f64::NAN);
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Sample median (average of the middle pair for even lengths).
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Pearson correlation. `None` when either sample has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len(), "pearson needs paired samples");
    let (mx, my) = (mean(xs), mean(ys));
    let cov: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let vx: Vec<f64> = xs.iter().map(|x| (x - mx).powi(2)).collect();
    let vy: Vec<f64> = ys.iter().map(|y| (y - my).powi(2)).collect();
    let (sxy, sxx, syy) = (pairwise_sum(&cov), pairwise_sum(&vx), pairwise_sum(&vy));
    let scale = (xs.len() as f64) * 1e-24;
    if sxx <= scale || syy <= scale {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let statistic = v
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic;
    KsResult { statistic, p_value: kolmogorov_survival(lambda) }
}

/// `Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2k²λ²)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_values() {
        // 50/100 at 95%: centre 0.5, half-width ≈ 0.0962
        let ci = wilson_interval(50, 100, 0.95).unwrap();
        assert!((ci.low - 0.40383).abs() < 1e-4 && (ci.high - 0.59617).abs() < 1e-4);
        let ci = wilson_interval(0, 10, 0.95).unwrap();
        assert_eq!(ci.low, 0.0);
        assert!(ci.high > 0.2 && ci.high < 0.35);
        let ci = wilson_interval(10, 10, 0.95).unwrap();
        assert_eq!(ci.high, 1.0);
        assert!(wilson_interval(3, 2, 0.95).is_err());
        assert!(wilson_interval(0, 0, 0.95).is_err());
        assert!((z_for_confidence(0.95).unwrap() - 1.959964).abs() < 1e-6);
    }

    #[test]
    fn sums_and_moments() {
        let xs: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 500500.0);
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn correlation() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson(&xs, &[2.0, 4.0, 6.0, 8.0]).unwrap() - 1.0).abs() < 1e-14);
        assert!((pearson(&xs, &[8.0, 6.0, 4.0, 2.0]).unwrap() + 1.0).abs() < 1e-14);
        assert_eq!(pearson(&xs, &[1.0; 4]), None);
    }

    #[test]
    fn kolmogorov_values() {
        // Standard table: Q(1.36) ≈ 0.049, Q(1.63) ≈ 0.0098
        assert!((kolmogorov_survival(1.36) - 0.0494).abs() < 1e-3);
        assert!((kolmogorov_survival(1.63) - 0.0098).abs() < 5e-4);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
        let uniform: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let r = ks_test(&uniform, |x| x);
        assert!(r.statistic <= 0.0005 + 1e-12 && r.p_value > 0.99);
        let r = ks_test(&uniform, |x| x * x);
        assert!(r.p_value < 1e-6);
    }
}
