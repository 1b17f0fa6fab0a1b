use serde::Serialize;

use crate::error::{Error, Result};

/// Normal quantile for two-sided 95% intervals.
pub const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if p == 1.0 { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Gaussian-shape fit `log P(X > lambda) ≈ log C + slope * lambda^2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailFit {
    pub lambdas: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub exceedances: Vec<usize>,
    /// Fitted `-c` (negative for a decaying tail).
    pub slope: f64,
    /// Fitted `log C`.
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: usize,
    /// Grid points left out of the fit because `P` was 0 or 1 there.
    pub trimmed: usize,
}

impl TailFit {
    /// CSV curve `lambda,p,lo,hi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,p,lo,hi\n");
        for i in 0..self.lambdas.len() {
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e}\n",
                self.lambdas[i], self.probabilities[i], self.lower[i], self.upper[i]
            ));
        }
        out
    }
}

/// Empirical exceedance curve of `values` on `lambdas`.
pub fn exceedance(values: &[f64], lambdas: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    lambdas
        .iter()
        .map(|&l| sorted.len() - sorted.partition_point(|&v| v <= l))
        .collect()
}

/// Weighted least squares of `log P^` against `lambda^2`, with weights from
/// the delta-method variance `(1 - p) / (n p)`.
pub fn tail_fit(values: &[f64], lambdas: &[f64]) -> Result<TailFit> {
    let n = values.len();
    if n < 100 {
        return Err(Error::param("values", format!("need at least 100 samples, got {n}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("tail sample".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        return Err(Error::Degenerate("all values are equal; no spread to fit".into()));
    }
    let counts = exceedance(values, lambdas);
    let nf = n as f64;
    let mut probabilities = Vec::with_capacity(lambdas.len());
    let mut lower = Vec::with_capacity(lambdas.len());
    let mut upper = Vec::with_capacity(lambdas.len());
    let (mut xs, mut ys, mut ws) = (Vec::new(), Vec::new(), Vec::new());
    for (&l, &k) in lambdas.iter().zip(&counts) {
        let p = k as f64 / nf;
        let (a, b) = wilson_interval(k, n, Z95);
        probabilities.push(p);
        lower.push(a);
        upper.push(b);
        if k > 0 && k < n {
            xs.push(l * l);
            ys.push(p.ln());
            ws.push(nf * p / (1.0 - p));
        }
    }
    if xs.len() < 3 {
        return Err(Error::Degenerate(format!(
            "only {} usable lambda points; need 3",
            xs.len()
        )));
    }
    let (slope, intercept, r_squared) = weighted_line(&xs, &ys, &ws);
    Ok(TailFit {
        lambdas: lambdas.to_vec(),
        probabilities,
        lower,
        upper,
        exceedances: counts,
        slope,
        intercept,
        r_squared,
        samples: n,
        trimmed: lambdas.len() - xs.len(),
    })
}

/// Weighted least-squares line; returns `(slope, intercept, R^2)` with
/// `R^2` clamped to `[0, 1]`.
pub fn weighted_line(xs: &[f64], ys: &[f64], ws: &[f64]) -> (f64, f64, f64) {
    let sw: f64 = ws.iter().sum();
    let mx = xs.iter().zip(ws).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = ys.iter().zip(ws).map(|(y, w)| y * w).sum::<f64>() / sw;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for ((x, y), w) in xs.iter().zip(ys).zip(ws) {
        sxx += w * (x - mx) * (x - mx);
        sxy += w * (x - mx) * (y - my);
        syy += w * (y - my) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 && sxx > 0.0 {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (slope, intercept, r2)
}

/// Ordinary least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    weighted_line(&lx, &ly, &vec![1.0; xs.len()]).0
}

/// `points` thresholds spaced evenly in `lambda^2` between the empirical
/// quantiles at exceedance `p_high` and `p_low`.
pub fn lambda_grid(values: &[f64], p_high: f64, p_low: f64, points: usize) -> Vec<f64> {
    let a = quantile(values, 1.0 - p_high);
    let b = quantile(values, 1.0 - p_low);
    let (a2, b2) = (a * a, b * b);
    (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1).max(1) as f64;
            (a2 + t * (b2 - a2)).sqrt()
        })
        .collect()
}

/// Linear-interpolated empirical quantile.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let i = pos.floor() as usize;
    let j = (i + 1).min(n - 1);
    sorted[i] + (pos - i as f64) * (sorted[j] - sorted[i])
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_brackets_the_estimate() {
        let (lo, hi) = wilson_interval(30, 100, Z95);
        assert!(lo < 0.3 && 0.3 < hi);
        let (lo, hi) = wilson_interval(0, 100, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
    }

    #[test]
    fn equal_values_are_degenerate() {
        let v = vec![2.0; 200];
        assert!(matches!(tail_fit(&v, &[1.0, 2.0, 3.0]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn exact_line_has_unit_r2() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 - 2.0 * x).collect();
        let (m, b, r2) = weighted_line(&xs, &ys, &[1.0, 2.0, 1.0, 3.0]);
        assert!((m + 2.0).abs() < 1e-12 && (b - 0.5).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }
}
