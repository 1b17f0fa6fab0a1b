use num_complex::Complex64;
use proptest::prelude::*;
use quartic_nls::spectral::snapshot::Snapshot;
use quartic_nls::spectral::*;

fn random_field(grid: Grid, seed: u64) -> SpectralField {
    // Cheap deterministic pseudo-random values; independent of the crate's RNG.
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let data = (0..grid.len()).map(|_| Complex64::new(next(), next())).collect();
    SpectralField::from_vec(grid, data).unwrap()
}

fn grids() -> impl Strategy<Value = Grid> {
    (1usize..=3, 3u32..=4, 0.5f64..8.0).prop_map(|(d, p, l)| Grid::new(d, 1 << p, l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_round_trip(grid in grids(), seed in any::<u64>()) {
        let plan = FourierTransform::new(grid);
        let f = random_field(grid, seed);
        let back = plan.forward(&plan.inverse(&f).unwrap()).unwrap();
        prop_assert!((&back - &f).l2_norm() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn parseval(grid in grids(), seed in any::<u64>()) {
        let plan = FourierTransform::new(grid);
        let f = random_field(grid, seed);
        let u = plan.inverse(&f).unwrap();
        prop_assert!((u.l2_norm() - f.l2_norm()).abs() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn bessel_powers_compose(grid in grids(), seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let f = random_field(grid, seed);
        let ab = apply_multiplier(&apply_multiplier(&f, &Multiplier::Bessel(a)).unwrap(), &Multiplier::Bessel(b)).unwrap();
        let direct = apply_multiplier(&f, &Multiplier::Bessel(a + b)).unwrap();
        prop_assert!((&ab - &direct).l2_norm() <= 1e-10 * direct.l2_norm());
    }

    #[test]
    fn phase_group_law(grid in grids(), seed in any::<u64>(), t in -1.0f64..1.0) {
        let f = random_field(grid, seed);
        let there = apply_multiplier(&f, &Multiplier::phase(t)).unwrap();
        let back = apply_multiplier(&there, &Multiplier::phase(-t)).unwrap();
        prop_assert!((&back - &f).l2_norm() <= 1e-12 * f.l2_norm());
        prop_assert!((there.l2_norm() - f.l2_norm()).abs() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn dyadic_pieces_sum_to_identity(grid in grids(), seed in any::<u64>()) {
        let f = random_field(grid, seed);
        let p = DyadicPartition::default();
        let mut sum = SpectralField::zeros(grid);
        for band in p.bands(&grid) {
            sum = &sum + &p.project(&f, band).unwrap();
        }
        prop_assert!((&sum - &f).l2_norm() <= 1e-10 * f.l2_norm());
    }

    #[test]
    fn dealias_is_a_projection(grid in grids(), seed in any::<u64>()) {
        let f = random_field(grid, seed);
        let once = dealias(&f);
        prop_assert_eq!(dealias(&once), once);
    }
}

/// Cubic product of band-limited fields against a direct convolution of the
/// coefficient lists.
#[test]
fn dealiased_cubic_product_matches_convolution() {
    let n = 16usize;
    let grid = Grid::new(1, n, std::f64::consts::PI).unwrap();
    let plan = FourierTransform::new(grid);
    let u = dealias(&random_field(grid, 3));
    let phys = plan.inverse(&u).unwrap();
    let cube: Vec<Complex64> = phys.data().iter().map(|v| v * v.norm_sqr()).collect();
    let product = dealias(&plan.forward(&PhysicalField::from_vec(grid, cube).unwrap()).unwrap());

    // Physical value e^{ikx} corresponds to coefficient c = (2 pi)^{1/2}/(pi/L)
    // in one dimension, so |u|^2 u has coefficients (1/c^2) sum a_k1 conj(a_k2) a_k3.
    let c = (2.0 * std::f64::consts::PI).sqrt();
    let coeff = |k: i64| grid.storage_index(k).map_or(Complex64::new(0.0, 0.0), |i| u.data()[i]);
    let q = (n / 4) as i64;
    for k in -(q - 1)..q {
        let mut acc = Complex64::new(0.0, 0.0);
        for k1 in -(q - 1)..q {
            for k2 in -(q - 1)..q {
                let k3 = k - k1 + k2;
                if k3.abs() < q {
                    acc += coeff(k1) * coeff(k2).conj() * coeff(k3);
                }
            }
        }
        let expect = acc / (c * c);
        let got = product.data()[grid.storage_index(k).unwrap()];
        assert!((got - expect).norm() < 1e-12, "k = {k}: {got} vs {expect}");
    }
}

#[test]
fn derivative_of_single_mode() {
    let grid = Grid::new(3, 8, 2.0).unwrap();
    let k = [1i64, -2, 3, 0];
    let f = SpectralField::plane_wave(grid, &k).unwrap();
    let df = apply_multiplier(&f, &Multiplier::Derivative(Derivative::Coordinate(1))).unwrap();
    let xi = -2.0 * std::f64::consts::PI / 2.0;
    let expect = f.scale(Complex64::new(0.0, xi));
    assert!((&df - &expect).l2_norm() < 1e-12 * f.l2_norm());
}

#[test]
fn snapshot_round_trip_through_bytes() {
    let grid = Grid::new(2, 8, 1.5).unwrap();
    let f = random_field(grid, 9);
    let mut bytes = Vec::new();
    Snapshot::Spectral(f.clone()).write_to(&mut bytes).unwrap();
    match Snapshot::read_from(bytes.as_slice()).unwrap() {
        Snapshot::Spectral(g) => assert_eq!(g, f),
        other => panic!("wrong kind {other:?}"),
    }
}
