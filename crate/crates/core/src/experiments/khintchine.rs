use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ensemble::run_indexed;
use crate::error::{Error, Result};
use crate::randomization::{mix_seed, RandomCoefficientModel};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KhintchineRow {
    pub p: f64,
    /// `(E |sum g_n c_n|^p)^{1/p}`.
    pub norm: f64,
    /// `norm / (sqrt(p) ||c||_2)`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KhintchineReport {
    pub samples: usize,
    pub l2: f64,
    pub rows: Vec<KhintchineRow>,
    pub max_ratio: f64,
    /// Fraction of bootstrap resamples in which the ratio increased with `p`.
    pub bootstrap_violations: f64,
    pub bootstrap_resamples: usize,
}

fn moments(sums: &[f64], ps: &[f64], pick: impl Fn(usize) -> usize) -> Vec<f64> {
    let n = sums.len();
    let max = sums.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    ps.iter()
        .map(|&p| {
            let mean = (0..n).map(|i| (sums[pick(i)] / max).powf(p)).sum::<f64>() / n as f64;
            max * mean.powf(1.0 / p)
        })
        .collect()
}

/// Empirical `L^p(Omega)` norms of `sum_n g_n c_n` against `sqrt(p) ||c||_2`.
///
/// The coefficient of index `n` is the model's draw for cube `(n, 0, ...)`.
pub fn khintchine_study(
    c: &[Complex64],
    ps: &[f64],
    samples: usize,
    model: &RandomCoefficientModel,
    bootstrap: usize,
) -> Result<KhintchineReport> {
    if c.is_empty() {
        return Err(Error::param("c", "empty sequence"));
    }
    if let Some(&p) = ps.iter().find(|&&p| !(p >= 2.0 && p.is_finite())) {
        return Err(Error::param("p", format!("need finite p >= 2, got {p}")));
    }
    if samples < 2 {
        return Err(Error::param("samples", "need at least 2"));
    }
    let l2 = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let sums = run_indexed(samples, |i| {
        let m = model.for_sample(i as u64);
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, cn) in c.iter().enumerate() {
            acc += m.sample_cube(&[n as i64, 0, 0, 0]) * cn;
        }
        acc.norm()
    });
    let norms = moments(&sums, ps, |i| i);
    let rows: Vec<KhintchineRow> = ps
        .iter()
        .zip(&norms)
        .map(|(&p, &norm)| KhintchineRow {
            p,
            norm,
            ratio: norm / (p.sqrt() * l2),
        })
        .collect();
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);

    let violations = run_indexed(bootstrap, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(model.seed, &[-1, b as i64]));
        let idx: Vec<usize> = (0..samples).map(|_| rng.random_range(0..samples)).collect();
        let ratios: Vec<f64> = moments(&sums, ps, |i| idx[i])
            .iter()
            .zip(ps)
            .map(|(n, p)| n / p.sqrt())
            .collect();
        ratios.windows(2).any(|w| w[1] > w[0])
    });
    let bootstrap_violations = if bootstrap == 0 {
        0.0
    } else {
        violations.iter().filter(|&&v| v).count() as f64 / bootstrap as f64
    };
    Ok(KhintchineReport {
        samples,
        l2,
        rows,
        max_ratio,
        bootstrap_violations,
        bootstrap_resamples: bootstrap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bernoulli_term_is_constant() {
        // |(+-1) + i(+-1)| = sqrt(2) on every draw.
        let c = [Complex64::new(0.3, 0.4)];
        let r = khintchine_study(&c, &[2.0, 4.0, 8.0], 200, &RandomCoefficientModel::bernoulli(1), 0).unwrap();
        for row in &r.rows {
            assert!((row.norm - 0.5 * 2f64.sqrt()).abs() < 1e-12);
            assert!((row.ratio - 2f64.sqrt() / row.p.sqrt()).abs() < 1e-12);
        }
    }
}
