use num_complex::Complex64;
use proptest::prelude::*;
use quartic_nls::evolution::*;
use quartic_nls::norms::{make_schedule, schedule_norm, ScheduleKind};
use quartic_nls::spectral::{dealias, Derivative, Grid, PhaseSign, SpectralField};

fn bump(grid: Grid, a: f64) -> SpectralField {
    dealias(&SpectralField::from_fn(grid, |xi| {
        let r2: f64 = xi.iter().map(|x| x * x).sum();
        Complex64::new(a * (-0.5 * r2).exp(), 0.4 * a * xi[0] * (-0.5 * r2).exp())
    }))
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    (a - b).l2_norm() / b.l2_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nonlinearity_is_cubically_homogeneous(re in -2.0f64..2.0, im in -2.0f64..2.0, radial in any::<bool>()) {
        let grid = Grid::new(2, 16, 3.0).unwrap();
        let d = if radial { Derivative::Radial } else { Derivative::Coordinate(1) };
        let n = Nonlinearity::new(grid, d, NonlinearSign::Minus).unwrap();
        let u = bump(grid, 1.0);
        let a = Complex64::new(re, im);
        let lhs = n.eval(&u.scale(a)).unwrap();
        let rhs = n.eval(&u).unwrap().scale(a * a.norm_sqr());
        prop_assert!((&lhs - &rhs).l2_norm() <= 1e-12 * (1.0 + rhs.l2_norm()));
    }

    #[test]
    fn propagator_group_law(t in -2.0f64..2.0, s in -2.0f64..2.0) {
        let grid = Grid::new(3, 8, 2.0).unwrap();
        let f = bump(grid, 1.0);
        let lhs = propagate(&propagate(&f, t), s);
        let rhs = propagate(&f, t + s);
        prop_assert!((&lhs - &rhs).l2_norm() <= 1e-12 * f.l2_norm());
        prop_assert_eq!(propagate(&f, 0.0), f);
    }

    #[test]
    fn horizon_decreases_in_r(r in 0.1f64..10.0, dr in 0.01f64..5.0, eta in 0.01f64..1.0, delta in 0.05f64..1.0) {
        let a = local_time_horizon(r, eta, 1.0, 2.0, delta).unwrap();
        let b = local_time_horizon(r + dr, eta, 1.0, 2.0, delta).unwrap();
        prop_assert!(b <= a);
    }
}

#[test]
fn single_mode_nonlinearity() {
    let grid = Grid::new(2, 16, 2.0).unwrap();
    let k = [3i64, -2, 0, 0];
    let u = SpectralField::plane_wave(grid, &k).unwrap();
    for (sign, sf) in [(NonlinearSign::Plus, 1.0), (NonlinearSign::Minus, -1.0)] {
        for axis in 0..2 {
            let n = Nonlinearity::new(grid, Derivative::Coordinate(axis), sign).unwrap();
            let xi = k[axis] as f64 * std::f64::consts::PI / 2.0;
            let expect = u.scale(Complex64::new(0.0, sf * xi));
            assert!((&n.eval(&u).unwrap() - &expect).l2_norm() < 1e-12 * u.l2_norm());
        }
    }
    let zero = Nonlinearity::new(grid, Derivative::Radial, NonlinearSign::Plus).unwrap();
    assert_eq!(zero.eval(&SpectralField::zeros(grid)).unwrap().max_abs(), 0.0);
}

#[test]
fn linear_switch_is_exact_on_every_path() {
    let grid = Grid::new(2, 16, 4.0).unwrap();
    let phi = bump(grid, 2.0);
    let mut cfg = EvolutionConfig::new(0.003, 9);
    cfg.nonlinear = false;
    let expect = propagate(&phi, cfg.window());
    let direct = solve_direct(&phi, &cfg).unwrap();
    assert!(rel(direct.last(), &expect) < 1e-12);
    for f in direct.fields() {
        assert!((f.l2_norm() - phi.l2_norm()).abs() < 1e-12 * phi.l2_norm());
    }
    let sol = solve_perturbed(&phi, &cfg).unwrap();
    assert!(sol.diagnostics.converged);
    assert_eq!(sol.v_final().max_abs(), 0.0);
    let z = Propagator::new(grid, cfg.phase_sign).linear_trajectory(&phi, 0.0, cfg.dt, cfg.steps).unwrap();
    assert_eq!(picard_iterate(&z, &z, &cfg).unwrap().last().max_abs(), 0.0);
}

#[test]
fn linear_trajectory_basics() {
    let grid = Grid::new(3, 8, 2.0).unwrap();
    let phi = bump(grid, 1.0);
    let prop = Propagator::new(grid, PhaseSign::Negative);
    let single = prop.linear_trajectory(&phi, 0.0, 0.1, 0).unwrap();
    assert_eq!(single.fields(), &[phi.clone()]);
    let traj = prop.linear_trajectory(&phi, 0.0, 0.1, 10).unwrap();
    for f in traj.fields() {
        assert!((f.l2_norm() - phi.l2_norm()).abs() < 1e-12 * phi.l2_norm());
    }
}

#[test]
fn x0_norm_of_z_converges_under_step_halving() {
    let grid = Grid::new(3, 16, std::f64::consts::PI).unwrap();
    let phi = bump(grid, 1.0);
    let prop = Propagator::new(grid, PhaseSign::Negative);
    let schedule = make_schedule(ScheduleKind::X, 3, 0.1).unwrap();
    let t = 0.25;
    let norm = |m: usize| {
        let z = prop.linear_trajectory(&phi, 0.0, t / m as f64, m).unwrap();
        schedule_norm(&z, &schedule, 0.0).unwrap()
    };
    let (a, b) = (norm(64), norm(128));
    assert!(((a - b) / b).abs() < 0.02, "{a} vs {b}");
}

#[test]
fn single_mode_propagator_phase() {
    let grid = Grid::new(1, 16, 1.0).unwrap();
    let k = [3i64, 0, 0, 0];
    let u = SpectralField::plane_wave(grid, &k).unwrap();
    let xi4 = (3.0 * std::f64::consts::PI).powi(4);
    let t = 0.013;
    for (sign, sf) in [(PhaseSign::Negative, -1.0), (PhaseSign::Positive, 1.0)] {
        let got = Propagator::new(grid, sign).apply(&u, t).unwrap();
        let expect = u.scale(Complex64::from_polar(1.0, sf * t * xi4));
        assert!((&got - &expect).l2_norm() < 1e-12 * u.l2_norm());
    }
}

/// Richardson self-convergence of the direct stepper: successive differences
/// shrink by 2^4 per halving.
#[test]
fn step_halving_ratio() {
    let grid = Grid::new(1, 32, 6.0).unwrap();
    let u0 = bump(grid, 3.0);
    let t = 0.02;
    let run = |steps: usize| solve_direct(&u0, &EvolutionConfig::new(t / steps as f64, steps)).unwrap().last().clone();
    let (a, b, c) = (run(20), run(40), run(80));
    let ratio = (&a - &b).l2_norm() / (&b - &c).l2_norm();
    assert!((ratio - 16.0).abs() <= 0.3 * 16.0, "ratio {ratio}");
}

#[test]
fn first_iterate_is_cubic_in_the_data() {
    let grid = Grid::new(2, 16, 3.0).unwrap();
    let cfg = EvolutionConfig::new(0.002, 20);
    let prop = Propagator::new(grid, cfg.phase_sign);
    let gamma0 = |a: f64| {
        let z = prop.linear_trajectory(&bump(grid, a), 0.0, cfg.dt, cfg.steps).unwrap();
        let v = quartic_nls::norms::Trajectory::zeros(grid, 0.0, cfg.dt, cfg.steps).unwrap();
        picard_iterate(&v, &z, &cfg).unwrap()
    };
    let base = gamma0(1.0);
    assert_eq!(base.fields()[0].max_abs(), 0.0);
    for a in [0.5, 2.0, -3.0] {
        let scaled = gamma0(a);
        let expect = base.last().scale_real(a * a * a);
        assert!(rel(scaled.last(), &expect) < 1e-12);
    }
}

fn consistency_error(derivative: Derivative, sign: NonlinearSign, dt: f64) -> f64 {
    let grid = Grid::new(2, 16, std::f64::consts::PI).unwrap();
    let phi = bump(grid, 0.01);
    let mut cfg = EvolutionConfig::new(dt, 100);
    cfg.derivative = derivative;
    cfg.sign = sign;
    cfg.picard.tolerance = 1e-13;
    let sol = solve_perturbed(&phi, &cfg).unwrap();
    assert!(sol.diagnostics.converged);
    let u = &propagate(&phi, cfg.window()) + &sol.v_final();
    let direct = solve_direct(&phi, &cfg).unwrap();
    rel(&u, direct.last())
}

#[test]
fn perturbed_solution_matches_direct_solver() {
    for d in [Derivative::Coordinate(1), Derivative::Radial] {
        for s in [NonlinearSign::Plus, NonlinearSign::Minus] {
            for dt in [5e-4, -5e-4] {
                let err = consistency_error(d, s, dt);
                assert!(err <= 1e-6, "{d:?} {s:?} dt={dt}: {err}");
            }
        }
    }
}

#[test]
fn gauge_covariance() {
    let grid = Grid::new(2, 16, 3.0).unwrap();
    let phi = bump(grid, 0.5);
    let g = Complex64::from_polar(1.0, 0.7);
    let mut cfg = EvolutionConfig::new(0.001, 40);
    cfg.picard.tolerance = 1e-12;
    let a = solve_perturbed(&phi, &cfg).unwrap();
    let b = solve_perturbed(&phi.scale(g), &cfg).unwrap();
    for m in 0..a.v.len() {
        let expect = a.v.field(m).scale(g);
        assert!((&b.v.field(m) - &expect).l2_norm() <= 1e-10 * (1.0 + expect.l2_norm()));
    }
    let ua = solve_direct(&phi, &cfg).unwrap();
    let ub = solve_direct(&phi.scale(g), &cfg).unwrap();
    assert!(rel(ub.last(), &ua.last().scale(g)) < 1e-10);
}

#[test]
fn contraction_bounds_the_iteration_count() {
    let grid = Grid::new(3, 8, 2.0).unwrap();
    let phi = bump(grid, 0.8);
    let mut cfg = EvolutionConfig::new(0.002, 25);
    cfg.picard.tolerance = 1e-12;
    let d = solve_perturbed(&phi, &cfg).unwrap().diagnostics;
    assert!(d.converged, "{d:?}");
    let rho = d.ratios.iter().copied().fold(0.0, f64::max);
    assert!(rho > 0.0 && rho < 1.0, "rho {rho}");
    let floor = d.norms[1..].iter().copied().fold(f64::INFINITY, f64::min);
    let k = ((cfg.picard.tolerance * floor / d.increments[0]).ln() / rho.ln()).ceil() + 1.0;
    assert!(d.iterations as f64 <= k, "{} iterations, bound {k}", d.iterations);
    assert!(d.ratios.iter().all(|r| *r >= 0.0));
}

#[test]
fn backward_run_returns_to_the_data() {
    let grid = Grid::new(1, 32, 4.0).unwrap();
    let phi = bump(grid, 1.0);
    let cfg = EvolutionConfig::new(2e-4, 100);
    let forward = solve_direct(&phi, &cfg).unwrap();
    let back = solve_direct(forward.last(), &cfg.reversed()).unwrap();
    assert!(rel(back.last(), &phi) < 1e-8);
    assert!(cfg.reversed().window() < 0.0);
}

#[test]
fn horizon_and_threshold_examples() {
    let t = local_time_horizon(1.0, 0.1, 1.0, 1.0, 0.5).unwrap();
    assert!((t - 0.05f64.powi(8)).abs() < 1e-24);
    // Tie: eta/(2 C1' R^3) = 1/(4 C2' R^2) when eta = 1/2, C1' = C2' = R = 1.
    let tie = local_time_horizon(1.0, 0.5, 1.0, 1.0, 0.25).unwrap();
    assert!((tie - 0.25f64.powi(16)).abs() < 1e-22);
    let mu = dilation_scale_threshold(0.1, 1.0, (-1.0f64).exp(), 0.0, 4, 1.0).unwrap();
    assert!((mu - 0.01).abs() < 1e-15);
    let doubled = dilation_scale_threshold(0.1, 2.0, (-1.0f64).exp(), 0.0, 4, 1.0).unwrap();
    assert!((doubled / mu - 2f64.powf(-2.0)).abs() < 1e-12);
    let near_one = dilation_scale_threshold(0.1, 1.0, 1.0 - 1e-12, 0.0, 4, 1.0).unwrap();
    assert!(near_one > 1e8);
    assert!(dilation_scale_threshold(0.1, 1.0, 0.5, 0.0, 3, 1.0).is_err());
}

#[test]
fn large_focusing_data_is_flagged_not_fatal() {
    let grid = Grid::new(1, 32, 2.0).unwrap();
    let phi = bump(grid, 40.0);
    let mut cfg = EvolutionConfig::new(0.01, 50);
    cfg.sign = NonlinearSign::Minus;
    let d = solve_perturbed(&phi, &cfg).unwrap().diagnostics;
    assert!(!d.converged);
    assert!(d.blow_up || d.iterations == cfg.picard.max_iterations);
}

#[test]
fn linear_run_scatters_to_zero() {
    let grid = Grid::new(3, 8, 4.0).unwrap();
    let phi = bump(grid, 1.0);
    let mut cfg = EvolutionConfig::new(0.001, 10);
    cfg.nonlinear = false;
    let sol = solve_perturbed(&phi, &cfg).unwrap();
    let st = scattering_state_band(&sol.v, cfg.phase_sign, 0.0, Some(&phi)).unwrap();
    assert_eq!(st.state.max_abs(), 0.0);
    assert!(st.residuals.iter().all(|r| *r == 0.0));
}

#[test]
fn invalid_configs_are_rejected() {
    let grid = Grid::new(2, 8, 1.0).unwrap();
    let phi = bump(grid, 1.0);
    let mut cfg = EvolutionConfig::new(0.0, 10);
    assert!(solve_perturbed(&phi, &cfg).is_err());
    cfg.dt = 0.1;
    cfg.derivative = Derivative::Coordinate(2);
    assert!(solve_direct(&phi, &cfg).is_err());
}
