use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField, MAX_DIM};

/// `phi_mu(x) = mu^{-3/2} phi(x / mu)` for `mu = 2^{-m}`.
///
/// The target grid must cover the box `[-mu L, mu L)^d` with at least as many
/// points per axis as the source. Mode `k` of the target then carries the
/// frequency `xi_k / mu` of the source mode `k`, so the transform is an exact
/// relabelling `phi_mu^[k] = mu^{d - 3/2} phi^[k]`, zero-padded above the
/// source band.
pub fn dilate_field(phi: &SpectralField, mu: f64, target: &Grid) -> Result<SpectralField> {
    let src = phi.grid();
    if !(mu > 0.0 && mu <= 1.0) || (1.0 / mu).log2().fract() != 0.0 {
        return Err(Error::param("mu", format!("{mu} is not of the form 2^-m")));
    }
    if target.dim() != src.dim() {
        return Err(Error::GridMismatch("dilation target has a different dimension".into()));
    }
    let want = mu * src.half_width();
    if ((target.half_width() - want) / want).abs() > 1e-12 {
        return Err(Error::GridMismatch(format!(
            "dilation target half-width {} should be {want}",
            target.half_width()
        )));
    }
    if target.n() < src.n() {
        return Err(Error::GridMismatch(format!(
            "dilation target has {} points per axis, source has {}",
            target.n(),
            src.n()
        )));
    }
    let factor = mu.powf(src.dim() as f64 - 1.5);
    let mut out = SpectralField::zeros(*target);
    let data = out.data_mut();
    for (flat, v) in phi.data().iter().enumerate() {
        let k = src.lattice(flat);
        let mut kk = [0i64; MAX_DIM];
        kk[..src.dim()].copy_from_slice(&k[..src.dim()]);
        let dst = target.flat_of_mode(&kk).expect("target lattice contains source lattice");
        data[dst] = v * Complex64::new(factor, 0.0);
    }
    Ok(out)
}
