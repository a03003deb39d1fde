//! Least-squares fits of `ln T` against `ln n`.

use std::collections::BTreeMap;

use super::ExperimentError;

/// `ln T = alpha ln n + intercept`, so `T ~ n^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionResult {
    pub alpha: f64,
    pub intercept: f64,
    /// Residual standard error, `sqrt(SSR / (points - 2))`.
    pub rse: f64,
    pub points: usize,
}

/// Ordinary least squares of `ys` on `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<RegressionResult, ExperimentError> {
    if xs.len() != ys.len() {
        return Err(ExperimentError::Regression(format!(
            "{} x values but {} y values",
            xs.len(),
            ys.len()
        )));
    }
    let k = xs.len();
    if k < 3 {
        return Err(ExperimentError::Regression(format!(
            "need at least 3 points, got {k}"
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(ExperimentError::Regression("non-finite input".into()));
    }
    let mean_x = xs.iter().sum::<f64>() / k as f64;
    let mean_y = ys.iter().sum::<f64>() / k as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(ExperimentError::Regression("all x values are equal".into()));
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let alpha = sxy / sxx;
    let intercept = mean_y - alpha * mean_x;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - alpha * x).powi(2))
        .sum();
    Ok(RegressionResult {
        alpha,
        intercept,
        rse: (ssr / (k - 2) as f64).sqrt(),
        points: k,
    })
}

/// Groups `(n, T)` observations by `n`, averages `ln T` per group (geometric mean of `T`)
/// and fits against `ln n`.
pub fn fit_power_law(observations: &[(usize, f64)]) -> Result<RegressionResult, ExperimentError> {
    let mut groups: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for &(n, t) in observations {
        let entry = groups.entry(n).or_default();
        entry.0 += t.ln();
        entry.1 += 1;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = groups
        .into_iter()
        .map(|(n, (sum, count))| ((n as f64).ln(), sum / count as f64))
        .unzip();
    linear_fit(&xs, &ys)
}
