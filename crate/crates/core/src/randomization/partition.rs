use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, Lattice, MAX_DIM};

/// One-dimensional bump `eta` of smoothness order `p`.
///
/// `eta(x) = 1 - S(|x|)` on `(-1, 1)` and zero outside, where `S` is the
/// degree `2p - 1` smoothstep. `S(x) + S(1 - x) = 1` makes the integer
/// translates of `eta` sum to one. `p = 1` is the hat function, `p = 3` is C^2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Smoothstep {
    order: u32,
    coeffs: [f64; 16],
}

impl TryFrom<u32> for Smoothstep {
    type Error = Error;
    fn try_from(order: u32) -> Result<Self> {
        Smoothstep::new(order)
    }
}

impl From<Smoothstep> for u32 {
    fn from(s: Smoothstep) -> u32 {
        s.order
    }
}

impl Smoothstep {
    pub const MAX_ORDER: u32 = 8;

    pub fn new(order: u32) -> Result<Self> {
        if order == 0 || order > Self::MAX_ORDER {
            return Err(Error::param(
                "order",
                format!("smoothness order must be in 1..={}, got {order}", Self::MAX_ORDER),
            ));
        }
        let n = order as usize - 1;
        let mut coeffs = [0.0; 16];
        for (k, c) in coeffs.iter_mut().enumerate().take(n + 1) {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            *c = sign * binomial(n + k, k) * binomial(2 * n + 1, n - k);
        }
        Ok(Self { order, coeffs })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// The rising smoothstep on `[0, 1]`, clamped outside.
    pub fn rise(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let n = self.order as usize - 1;
        let mut poly = 0.0;
        for &c in self.coeffs[..=n].iter().rev() {
            poly = poly * x + c;
        }
        poly * x.powi(n as i32 + 1)
    }

    /// The bump `eta(x)`.
    pub fn eta(&self, x: f64) -> f64 {
        let a = x.abs();
        if a >= 1.0 {
            0.0
        } else {
            1.0 - self.rise(a)
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Tensor partition of unity `psi^mu(xi) = prod_j eta(xi_j / mu)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionFunction {
    generator: Smoothstep,
    dim: usize,
    scale: f64,
}

impl PartitionFunction {
    pub fn new(order: u32, dim: usize, scale: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::param("d", format!("dimension {dim} outside 1..={MAX_DIM}")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::param("mu", format!("scale must be positive, got {scale}")));
        }
        Ok(Self {
            generator: Smoothstep::new(order)?,
            dim,
            scale,
        })
    }

    pub fn generator(&self) -> &Smoothstep {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `psi^mu(xi)`.
    pub fn eval(&self, xi: &[f64]) -> f64 {
        xi.iter()
            .take(self.dim)
            .map(|&x| self.generator.eta(x / self.scale))
            .product()
    }

    /// `psi^mu(xi - mu n)`, the weight of cube `n` at `xi`.
    pub fn cube_weight(&self, xi: &[f64], cube: &Lattice) -> f64 {
        xi.iter()
            .zip(cube)
            .take(self.dim)
            .map(|(&x, &c)| self.generator.eta(x / self.scale - c as f64))
            .product()
    }

    /// All cubes whose closed support meets the grid's frequency box.
    pub fn cubes_for(&self, grid: &Grid) -> Result<CubeSet> {
        if grid.dim() != self.dim {
            return Err(Error::GridMismatch(format!(
                "partition has d = {}, grid has d = {}",
                self.dim,
                grid.dim()
            )));
        }
        let dk = grid.frequency_spacing();
        let half = (grid.n() / 2) as f64;
        let lo = ((-half * dk) / self.scale - 1.0).ceil() as i64;
        let hi = (((half - 1.0) * dk) / self.scale + 1.0).floor() as i64;
        Ok(CubeSet::cube_box(self.dim, lo, hi))
    }
}

/// A box `[lo, hi]^d` of cube labels, enumerated with axis 1 fastest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeSet {
    dim: usize,
    lo: i64,
    hi: i64,
}

impl CubeSet {
    pub fn cube_box(dim: usize, lo: i64, hi: i64) -> Self {
        Self { dim, lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn side(&self) -> usize {
        if self.hi < self.lo {
            0
        } else {
            (self.hi - self.lo + 1) as usize
        }
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index_of(&self, cube: &Lattice) -> Option<usize> {
        let side = self.side();
        let mut idx = 0;
        let mut stride = 1;
        for &c in cube.iter().take(self.dim) {
            if c < self.lo || c > self.hi {
                return None;
            }
            idx += (c - self.lo) as usize * stride;
            stride *= side;
        }
        Some(idx)
    }

    pub fn cube_at(&self, index: usize) -> Lattice {
        let side = self.side();
        let mut rest = index;
        let mut out = [0; MAX_DIM];
        for slot in out.iter_mut().take(self.dim) {
            *slot = self.lo + (rest % side) as i64;
            rest /= side;
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = Lattice> + '_ {
        (0..self.len()).map(|i| self.cube_at(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_low_orders() {
        let s1 = Smoothstep::new(1).unwrap();
        let s3 = Smoothstep::new(3).unwrap();
        for x in [0.0, 0.1, 0.37, 0.5, 0.9, 1.0] {
            assert!((s1.rise(x) - x).abs() < 1e-15);
            let quintic = x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
            assert!((s3.rise(x) - quintic).abs() < 1e-14);
        }
        assert_eq!(s1.eta(0.5), 0.5);
    }

    #[test]
    fn rise_is_symmetric_for_every_order() {
        for p in 1..=Smoothstep::MAX_ORDER {
            let s = Smoothstep::new(p).unwrap();
            for i in 0..=20 {
                let x = i as f64 / 20.0;
                assert!((s.rise(x) + s.rise(1.0 - x) - 1.0).abs() < 1e-10, "p={p} x={x}");
            }
        }
    }

    #[test]
    fn cube_weights_at_half() {
        // One axis at xi = 0.5: cubes 0 and 1 each get eta(0.5) = 1/2 for any order.
        let psi = PartitionFunction::new(3, 1, 1.0).unwrap();
        assert!((psi.cube_weight(&[0.5], &[0, 0, 0, 0]) - 0.5).abs() < 1e-15);
        assert!((psi.cube_weight(&[0.5], &[1, 0, 0, 0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cube_set_indexing() {
        let set = CubeSet::cube_box(3, -2, 3);
        assert_eq!(set.len(), 216);
        for i in 0..set.len() {
            assert_eq!(set.index_of(&set.cube_at(i)), Some(i));
        }
        assert_eq!(set.index_of(&[4, 0, 0, 0]), None);
    }
}
