//! Interval estimates and curve fitting for sweep summaries.

use serde::{Deserialize, Serialize};

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson(successes: usize, trials: usize, z: f64) -> Interval {
    if trials == 0 {
        return Interval {
            low: 0.0,
            high: 1.0,
        };
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Interval {
        low: (centre - half).max(0.0),
        high: (centre + half).min(1.0),
    }
}

/// Slope and intercept of the least-squares line through `points`.
pub fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Where a nondecreasing curve `(p, frequency)` crosses `level`, by linear
/// interpolation in `log p`. `None` if the curve never reaches `level` or
/// starts above it at `p = 0`.
pub fn crossing(curve: &[(f64, f64)], level: f64) -> Option<f64> {
    let j = curve.iter().position(|&(_, f)| f >= level)?;
    let (p1, f1) = curve[j];
    if j == 0 || f1 == level {
        return (p1 > 0.0 || f1 == level).then_some(p1);
    }
    let (p0, f0) = curve[j - 1];
    if p0 <= 0.0 {
        return Some(p1);
    }
    let w = (level - f0) / (f1 - f0);
    Some((p0.ln() + w * (p1.ln() - p0.ln())).exp())
}
