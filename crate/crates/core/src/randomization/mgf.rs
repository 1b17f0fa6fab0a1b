use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::coefficients::RandomCoefficientModel;

#[derive(Clone, Debug, Serialize)]
pub struct MgfRow {
    pub kappa: f64,
    pub empirical: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MgfReport {
    pub c: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub rows: Vec<MgfRow>,
}

impl MgfReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Empirical `E e^{kappa X}` of one coefficient component against `e^{c kappa^2}`.
pub fn mgf_bound_check(
    model: &RandomCoefficientModel,
    kappas: &[f64],
    c: f64,
    samples: usize,
    tolerance: f64,
) -> MgfReport {
    let sampler = model.sampler();
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let draws: Vec<f64> = (0..samples).map(|_| sampler.draw(&mut rng)).collect();
    let rows = kappas
        .iter()
        .map(|&kappa| {
            let empirical = if kappa == 0.0 || draws.is_empty() {
                1.0
            } else {
                draws.iter().map(|x| (kappa * x).exp()).sum::<f64>() / draws.len() as f64
            };
            let bound = (c * kappa * kappa).exp();
            MgfRow {
                kappa,
                empirical,
                bound,
                holds: empirical <= bound * (1.0 + tolerance),
            }
        })
        .collect();
    MgfReport { c, samples, tolerance, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_at_zero_is_one() {
        let r = mgf_bound_check(&RandomCoefficientModel::bernoulli(1), &[0.0], 1.0, 1000, 0.0);
        assert_eq!(r.rows[0].empirical, 1.0);
        assert!(r.all_hold());
    }

    #[test]
    fn bernoulli_cosh_bound() {
        let kappas: Vec<f64> = (-30..=30).map(|i| i as f64 / 10.0).collect();
        let r = mgf_bound_check(&RandomCoefficientModel::bernoulli(3), &kappas, 1.0, 20_000, 0.05);
        assert!(r.all_hold());
        for k in kappas {
            assert!(k.cosh() <= (k * k).exp());
        }
    }

    #[test]
    fn gaussian_matches_exact_mgf() {
        let r = mgf_bound_check(&RandomCoefficientModel::gaussian(5), &[2.0], 0.5, 1_000_000, 0.1);
        let exact = 2f64.exp();
        assert!((r.rows[0].empirical - exact).abs() < 0.1 * exact);
        assert!(r.all_hold());
    }
}
