use num_complex::Complex64;

use super::coefficients::Coefficients;
use super::partition::PartitionFunction;
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField, MAX_DIM};

// For each per-axis storage index: the two cube labels whose support can
// contain this frequency, with their one-dimensional weights.
struct AxisCandidates {
    lo: Vec<i64>,
    w: Vec<[f64; 2]>,
}

fn axis_candidates(grid: &Grid, psi: &PartitionFunction) -> AxisCandidates {
    let eta = psi.generator();
    let mut lo = Vec::with_capacity(grid.n());
    let mut w = Vec::with_capacity(grid.n());
    for xi in grid.axis_frequencies() {
        let y = xi / psi.scale();
        let base = y.floor();
        lo.push(base as i64);
        w.push([eta.eta(y - base), eta.eta(y - base - 1.0)]);
    }
    AxisCandidates { lo, w }
}

/// `phi^omega = sum_n g_n psi^mu(xi - mu n) phi^(xi)`.
///
/// The cube scale `mu` is taken from `psi`. Fails if some cube with nonzero
/// weight on the support of `phi^` has no coefficient.
pub fn randomize(
    phi: &SpectralField,
    psi: &PartitionFunction,
    g: &Coefficients,
) -> Result<SpectralField> {
    let grid = *phi.grid();
    if grid.dim() != psi.dim() || g.cubes().dim() != psi.dim() {
        return Err(Error::GridMismatch(format!(
            "field d = {}, partition d = {}, coefficients d = {}",
            grid.dim(),
            psi.dim(),
            g.cubes().dim()
        )));
    }
    let d = grid.dim();
    let cand = axis_candidates(&grid, psi);
    let mut out = Vec::with_capacity(grid.len());
    for (flat, &value) in phi.data().iter().enumerate() {
        if value == Complex64::new(0.0, 0.0) {
            out.push(value);
            continue;
        }
        let idx = grid.axis_indices(flat);
        let mut acc = Complex64::new(0.0, 0.0);
        for combo in 0..(1usize << d) {
            let mut weight = 1.0;
            let mut cube = [0i64; MAX_DIM];
            for j in 0..d {
                let bit = (combo >> j) & 1;
                weight *= cand.w[idx[j]][bit];
                cube[j] = cand.lo[idx[j]] + bit as i64;
            }
            if weight == 0.0 {
                continue;
            }
            let coeff = g.get(&cube).ok_or_else(|| Error::UncoveredCube {
                cube: cube[..d].to_vec(),
            })?;
            acc += coeff * weight;
        }
        out.push(acc * value);
    }
    SpectralField::from_vec(grid, out)
}

/// Randomization over the dilated cubes `mu n` using the unit partition `psi`.
pub fn randomize_dilated(
    phi: &SpectralField,
    mu: f64,
    psi: &PartitionFunction,
    g: &Coefficients,
) -> Result<SpectralField> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::param("mu", format!("dilation must lie in (0, 1], got {mu}")));
    }
    let scaled = PartitionFunction::new(psi.generator().order(), psi.dim(), psi.scale() * mu)?;
    randomize(phi, &scaled, g)
}

/// `W(xi)^2 = sum_n psi^mu(xi - mu n)^2` on the lattice.
///
/// With `E|g_n|^2 = v`, `E ||phi^omega||_2^2 = v ||W phi||_2^2`.
pub fn square_weight(grid: &Grid, psi: &PartitionFunction) -> Vec<f64> {
    let cand = axis_candidates(grid, psi);
    let axis: Vec<f64> = cand.w.iter().map(|w| w[0] * w[0] + w[1] * w[1]).collect();
    let mut out = vec![1.0];
    for _ in 0..grid.dim() {
        let mut next = Vec::with_capacity(out.len() * grid.n());
        for &a in &axis {
            next.extend(out.iter().map(|&b| b * a));
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomization::partition::CubeSet;

    fn bump(grid: Grid) -> SpectralField {
        SpectralField::from_fn(grid, |xi| {
            let r2: f64 = xi.iter().map(|x| x * x).sum();
            Complex64::new((-r2 / 4.0).exp(), 0.0)
        })
    }

    #[test]
    fn unit_coefficients_reconstruct() {
        for order in [1, 3, 5] {
            let grid = Grid::new(2, 16, 3.0).unwrap();
            let psi = PartitionFunction::new(order, 2, 1.0).unwrap();
            let phi = bump(grid);
            let g = Coefficients::ones(&psi.cubes_for(&grid).unwrap());
            let out = randomize(&phi, &psi, &g).unwrap();
            assert!((&out - &phi).l2_norm() <= 1e-10 * phi.l2_norm());
        }
    }

    #[test]
    fn missing_cube_is_an_error() {
        let grid = Grid::new(1, 16, 3.0).unwrap();
        let psi = PartitionFunction::new(3, 1, 1.0).unwrap();
        let g = Coefficients::ones(&CubeSet::cube_box(1, -1, 1));
        assert!(matches!(
            randomize(&bump(grid), &psi, &g),
            Err(Error::UncoveredCube { .. })
        ));
    }

    #[test]
    fn one_cube_interior_uses_at_most_two_to_the_d_terms() {
        // A single mode at xi = (0.25, 0.5, 0.75): each axis has exactly two
        // overlapping cubes, so at most 8 coefficients contribute.
        let grid = Grid::new(3, 8, 4.0 * std::f64::consts::PI).unwrap();
        let psi = PartitionFunction::new(3, 3, 1.0).unwrap();
        let cubes = psi.cubes_for(&grid).unwrap();
        let phi = SpectralField::plane_wave(grid, &[1, 2, 3, 0]).unwrap();
        let mut used = 0;
        for c in cubes.iter() {
            let g = Coefficients::from_fn(&cubes, |x| {
                if *x == c {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            if randomize(&phi, &psi, &g).unwrap().l2_norm() > 0.0 {
                used += 1;
            }
        }
        assert_eq!(used, 8);
    }
}
