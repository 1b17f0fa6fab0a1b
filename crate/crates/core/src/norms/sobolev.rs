use crate::spectral::{bessel, homogeneous, SpectralField};

/// `(sum w(xi)^2 |f^|^2 (pi/L)^d)^{1/2}` with `w = <xi>^s`, or `|xi|^s` when
/// `homogeneous` is set. For homogeneous norms with `s < 0` the zero mode is
/// dropped.
pub fn sobolev_norm(f: &SpectralField, s: f64, homogeneous_norm: bool) -> f64 {
    let grid = f.grid();
    let xi2 = grid.xi_squared_table();
    let sum: f64 = f
        .data()
        .iter()
        .zip(&xi2)
        .map(|(v, &x2)| {
            let w = if homogeneous_norm { homogeneous(x2, s) } else { bessel(x2, s) };
            w * w * v.norm_sqr()
        })
        .sum();
    (sum * grid.mode_volume()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn single_mode_bessel() {
        let grid = Grid::new(3, 8, std::f64::consts::PI).unwrap();
        let f = SpectralField::plane_wave(grid, &[0, 2, 0, 0]).unwrap();
        let ratio = sobolev_norm(&f, 1.0, false) / f.l2_norm();
        assert!((ratio - 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(sobolev_norm(&f, 0.0, false), f.l2_norm());
        assert_eq!(sobolev_norm(&f, 0.0, true), f.l2_norm());
    }
}
