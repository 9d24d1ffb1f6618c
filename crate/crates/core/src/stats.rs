//! Small statistics toolkit: proportions with Wilson intervals, order-independent
//! summaries and least-squares slopes.

use serde::{Deserialize, Serialize};

/// z-value of a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Self {
        Proportion { successes, trials }
    }

    pub fn estimate(&self) -> f64 {
        if self.trials == 0 {
            return f64::NAN;
        }
        self.successes as f64 / self.trials as f64
    }

    /// Binomial standard error of the point estimate.
    pub fn std_err(&self) -> f64 {
        let p = self.estimate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn wilson95(&self) -> (f64, f64) {
        wilson(self.successes, self.trials, Z95)
    }

    pub fn merge(self, other: Proportion) -> Proportion {
        Proportion::new(self.successes + other.successes, self.trials + other.trials)
    }
}

/// Pairwise (cascade) summation; the result depends only on the slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Summary of a sample. Values are sorted before summation, so the summary is
/// bit-identical for every permutation of the input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_err: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let mean = pairwise_sum(&v) / n as f64;
        let sq: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
        let variance = if n > 1 { pairwise_sum(&sq) / (n - 1) as f64 } else { 0.0 };
        Some(Summary {
            count: n,
            mean,
            variance,
            std_err: (variance / n as f64).sqrt(),
            min: v[0],
            max: v[n - 1],
        })
    }
}

/// Ordinary least-squares line fit; returns `(slope, intercept, slope_std_err)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    weighted_linear_fit(xs, ys, &vec![1.0; xs.len()])
}

/// Weighted least squares with weights `w_i` (typically inverse variances).
pub fn weighted_linear_fit(xs: &[f64], ys: &[f64], ws: &[f64]) -> (f64, f64, f64) {
    assert!(xs.len() == ys.len() && xs.len() == ws.len() && xs.len() >= 2);
    let sw: f64 = ws.iter().sum();
    let mx = xs.iter().zip(ws).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = ys.iter().zip(ws).map(|(y, w)| y * w).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..xs.len() {
        sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
        sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let n = xs.len() as f64;
    let resid: f64 = (0..xs.len())
        .map(|i| ws[i] * (ys[i] - intercept - slope * xs[i]).powi(2))
        .sum();
    let se = if xs.len() > 2 { (resid / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    (slope, intercept, se)
}

/// Log-log slope of `(n, P(n))` pairs, weighting each point by the inverse
/// variance of `ln P` (delta method).
pub fn log_log_slope(points: &[(f64, Proportion)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, p)| p.estimate().ln()).collect();
    let ws: Vec<f64> = points
        .iter()
        .map(|(_, p)| {
            let e = p.estimate();
            let var_ln = (1.0 - e) / (e * p.trials as f64);
            1.0 / var_ln.max(1e-300)
        })
        .collect();
    weighted_linear_fit(&xs, &ys, &ws).0
}

/// Integer histogram: `counts[k]` = number of values equal to `k`.
pub fn histogram(values: &[u64]) -> Vec<u64> {
    let max = values.iter().copied().max().unwrap_or(0) as usize;
    let mut h = vec![0u64; if values.is_empty() { 0 } else { max + 1 }];
    for &v in values {
        h[v as usize] += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_point() {
        let (lo, hi) = wilson(30, 100, Z95);
        assert!(lo < 0.3 && 0.3 < hi);
        let (lo, hi) = wilson(0, 50, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
    }

    #[test]
    fn summary_mean() {
        let s = Summary::of(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.variance, 1.0);
        assert!(Summary::of(&[]).is_none());
    }

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (s, i, _) = linear_fit(&xs, &ys);
        assert!((s - 2.0).abs() < 1e-12 && (i - 1.0).abs() < 1e-12);
    }
}
