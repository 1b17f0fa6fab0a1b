use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::partition::CubeSet;
use crate::error::{Error, Result};
use crate::spectral::Lattice;

/// Law of each real component of `g_n`; real and imaginary parts are independent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum CoefficientLaw {
    /// Standard normal components.
    Gaussian,
    /// Components `+1` or `-1` with equal probability.
    Bernoulli,
    /// A finite mean-zero discrete law.
    Custom { values: Vec<f64>, weights: Vec<f64> },
}

impl CoefficientLaw {
    pub fn validate(&self) -> Result<()> {
        if let CoefficientLaw::Custom { values, weights } = self {
            if values.is_empty() || values.len() != weights.len() {
                return Err(Error::param("law", "custom table needs matching non-empty values and weights"));
            }
            if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || values.iter().any(|v| !v.is_finite()) {
                return Err(Error::param("law", "custom table entries must be finite, weights nonnegative"));
            }
            let total: f64 = weights.iter().sum();
            if total <= 0.0 {
                return Err(Error::param("law", "custom weights sum to zero"));
            }
            let mean: f64 = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total;
            let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if mean.abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::param("law", format!("custom law has mean {mean}, expected 0")));
            }
        }
        Ok(())
    }

    /// Exact second moment of one component.
    pub fn component_variance(&self) -> f64 {
        match self {
            CoefficientLaw::Gaussian | CoefficientLaw::Bernoulli => 1.0,
            CoefficientLaw::Custom { values, weights } => {
                let total: f64 = weights.iter().sum();
                values.iter().zip(weights).map(|(v, w)| v * v * w).sum::<f64>() / total
            }
        }
    }
}

/// Coefficient model: a component law plus a base seed.
///
/// The coefficient of cube `n` is drawn from its own stream seeded by
/// `mix_seed(seed, n)`, so it does not depend on which cubes are drawn or in
/// what order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomCoefficientModel {
    pub law: CoefficientLaw,
    pub seed: u64,
}

impl RandomCoefficientModel {
    pub fn new(law: CoefficientLaw, seed: u64) -> Result<Self> {
        law.validate()?;
        Ok(Self { law, seed })
    }

    pub fn gaussian(seed: u64) -> Self {
        Self { law: CoefficientLaw::Gaussian, seed }
    }

    pub fn bernoulli(seed: u64) -> Self {
        Self { law: CoefficientLaw::Bernoulli, seed }
    }

    /// The model for ensemble member `index`.
    pub fn for_sample(&self, index: u64) -> Self {
        Self {
            law: self.law.clone(),
            seed: mix_seed(self.seed, &[index as i64]),
        }
    }

    pub(crate) fn sampler(&self) -> ComponentSampler {
        let weighted = match &self.law {
            CoefficientLaw::Custom { weights, .. } => {
                Some(WeightedIndex::new(weights).expect("validated weights"))
            }
            _ => None,
        };
        ComponentSampler { law: self.law.clone(), weighted }
    }

    pub fn sample_cube(&self, cube: &Lattice) -> Complex64 {
        self.sampler().draw_pair(&mut cube_rng(self.seed, cube))
    }

    pub fn sample(&self, cubes: &CubeSet) -> Coefficients {
        let sampler = self.sampler();
        let values = cubes
            .iter()
            .map(|c| sampler.draw_pair(&mut cube_rng(self.seed, &c)))
            .collect();
        Coefficients { cubes: cubes.clone(), values }
    }
}

pub(crate) struct ComponentSampler {
    law: CoefficientLaw,
    weighted: Option<WeightedIndex<f64>>,
}

impl ComponentSampler {
    pub(crate) fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match &self.law {
            CoefficientLaw::Gaussian => rng.sample(StandardNormal),
            CoefficientLaw::Bernoulli => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            CoefficientLaw::Custom { values, .. } => {
                values[self.weighted.as_ref().expect("custom sampler").sample(rng)]
            }
        }
    }

    fn draw_pair<R: Rng>(&self, rng: &mut R) -> Complex64 {
        let re = self.draw(rng);
        let im = self.draw(rng);
        Complex64::new(re, im)
    }
}

fn cube_rng(seed: u64, cube: &Lattice) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, cube))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-style hash of a base seed and a tuple of integers.
pub fn mix_seed(base: u64, parts: &[i64]) -> u64 {
    let mut h = splitmix64(base);
    for &p in parts {
        h = splitmix64(h ^ splitmix64(p as u64));
    }
    h
}

/// Dense coefficient table over a [`CubeSet`].
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients {
    cubes: CubeSet,
    values: Vec<Complex64>,
}

impl Coefficients {
    /// `g_n = 1` for every cube.
    pub fn ones(cubes: &CubeSet) -> Self {
        Self {
            cubes: cubes.clone(),
            values: vec![Complex64::new(1.0, 0.0); cubes.len()],
        }
    }

    pub fn from_fn(cubes: &CubeSet, f: impl Fn(&Lattice) -> Complex64) -> Self {
        Self {
            cubes: cubes.clone(),
            values: cubes.iter().map(|c| f(&c)).collect(),
        }
    }

    pub fn cubes(&self) -> &CubeSet {
        &self.cubes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, cube: &Lattice) -> Option<Complex64> {
        self.cubes.index_of(cube).map(|i| self.values[i])
    }

    /// `{"n1,n2,...": [re, im]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let d = self.cubes.dim();
        let map = self
            .cubes
            .iter()
            .zip(&self.values)
            .map(|(c, v)| {
                let key = c[..d].iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
                (key, serde_json::json!([v.re, v.im]))
            })
            .collect();
        serde_json::Value::Object(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_components_are_signs() {
        let set = CubeSet::cube_box(3, -3, 3);
        let g = RandomCoefficientModel::bernoulli(7).sample(&set);
        for v in g.values() {
            assert_eq!(v.re.abs(), 1.0);
            assert_eq!(v.im.abs(), 1.0);
        }
    }

    #[test]
    fn sampling_is_order_independent() {
        let model = RandomCoefficientModel::gaussian(42);
        let big = model.sample(&CubeSet::cube_box(2, -4, 4));
        let small = model.sample(&CubeSet::cube_box(2, -1, 2));
        for c in small.cubes().iter() {
            assert_eq!(small.get(&c), big.get(&c));
            assert_eq!(small.get(&c), Some(model.sample_cube(&c)));
        }
        assert_eq!(model.sample(&CubeSet::cube_box(2, -4, 4)), big);
    }

    #[test]
    fn gaussian_moments() {
        // One cube across many seeds; CLT tolerance for the mean, 2% for E|g|^2.
        let n = 100_000;
        let cube = [1, 2, 3, 0];
        let base = RandomCoefficientModel::gaussian(9);
        let mut mean = Complex64::new(0.0, 0.0);
        let mut second = 0.0;
        for i in 0..n {
            let g = base.for_sample(i).sample_cube(&cube);
            mean += g;
            second += g.norm_sqr();
        }
        mean /= n as f64;
        second /= n as f64;
        let tol = 3.0 * (2.0 / n as f64).sqrt();
        assert!(mean.norm() < tol, "mean {mean}");
        assert!((second - 2.0).abs() < 0.04, "second moment {second}");
    }

    #[test]
    fn custom_law_validation() {
        assert!(RandomCoefficientModel::new(
            CoefficientLaw::Custom { values: vec![-1.0, 2.0], weights: vec![2.0, 1.0] },
            0
        )
        .is_ok());
        assert!(RandomCoefficientModel::new(
            CoefficientLaw::Custom { values: vec![1.0, 2.0], weights: vec![1.0, 1.0] },
            0
        )
        .is_err());
    }

    #[test]
    fn json_export_keys() {
        let set = CubeSet::cube_box(2, 0, 1);
        let g = Coefficients::ones(&set);
        let json = g.to_json();
        assert_eq!(json["1,0"], serde_json::json!([1.0, 0.0]));
        assert_eq!(json.as_object().unwrap().len(), 4);
    }
}
