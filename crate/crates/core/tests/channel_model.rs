use fama_core::channel::{bessel_j0, complex_gaussian, sample_user_channel};
use fama_core::{correlation_matrix, sample_channels, trial_stream, CorrelationMatrix, FamaError, HermitianMatrix, PortTopology, C64};
use std::f64::consts::PI;

/// Power series sum_k (-1)^k (x/2)^{2k} / (k!)^2, 40 terms.
fn j0_series(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

/// (1/pi) int_0^pi cos(x sin t) dt, composite Simpson.
fn j0_quadrature(x: f64) -> f64 {
    let n = 2000;
    let h = PI / n as f64;
    let f = |t: f64| (x * t.sin()).cos();
    let mut s = f(0.0) + f(PI);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0 / PI
}

#[test]
fn bessel_against_independent_oracles() {
    assert!((bessel_j0(PI) - (-0.304_242_177_644_093_9)).abs() < 1e-12);
    assert!((j0_series(PI) - (-0.304_242_177_644_093_9)).abs() < 1e-12);
    for i in 0..=200 {
        let x = i as f64 * 0.1;
        assert!((bessel_j0(x) - j0_quadrature(x)).abs() < 1e-12, "x={x}");
        if x <= 12.0 {
            assert!((bessel_j0(x) - j0_series(x)).abs() < 1e-10, "x={x}");
        }
    }
}

#[test]
fn line_correlation_is_toeplitz_with_unit_diagonal() {
    let t = PortTopology::line(37, 4.0).unwrap();
    let c = correlation_matrix(&t).unwrap();
    let s = c.sigma().as_matrix();
    for r in 0..37 {
        assert_eq!(s[(r, r)], C64::new(1.0, 0.0));
        for q in 0..37 {
            assert_eq!(s[(r, q)], s[(q, r)]);
            let lag = r.abs_diff(q);
            assert_eq!(s[(r, q)], s[(lag, 0)], "Toeplitz at ({r},{q})");
            assert_eq!(s[(r, q)].im, 0.0);
        }
    }
    let spacing = 4.0 / 36.0;
    assert!((s[(3, 0)].re - j0_series(2.0 * PI * 3.0 * spacing)).abs() < 1e-13);
}

#[test]
fn grid_correlation_uses_euclidean_distance() {
    let t = PortTopology::grid(4, 3, 2.0, 1.0).unwrap();
    let c = correlation_matrix(&t).unwrap();
    let s = c.sigma().as_matrix();
    assert_eq!(c.dim(), 12);
    // port (i, j) flattens to i * 3 + j; (0,0) to (1,2): dx = 2/3, dy = 1
    let d = ((2.0f64 / 3.0).powi(2) + 1.0).sqrt();
    assert!((s[(0, 5)].re - j0_quadrature(2.0 * PI * d)).abs() < 1e-12);
    for i in 0..12 {
        assert_eq!(s[(i, i)].re, 1.0);
    }
}

#[test]
fn dense_line_is_clamped_but_accepted() {
    let c = correlation_matrix(&PortTopology::line(200, 1.0).unwrap()).unwrap();
    assert!(c.min_eigenvalue() >= -1e-10 * c.max_eigenvalue());
    // F F^H reproduces sigma to the clamp level.
    let f = c.sqrt_factor();
    let err = f.matmul(&f.adjoint()).sub(c.sigma().as_matrix()).max_abs();
    assert!(err < 1e-8, "{err}");
}

#[test]
fn indefinite_sigma_is_rejected() {
    let mut m = HermitianMatrix::identity(3).into_matrix();
    m[(0, 1)] = C64::new(2.0, 0.0);
    m[(1, 0)] = C64::new(2.0, 0.0);
    let err = CorrelationMatrix::from_sigma(HermitianMatrix::new(m).unwrap()).unwrap_err();
    assert!(matches!(err, FamaError::CorrelationNotPsd { .. }));
}

#[test]
fn complex_gaussian_has_unit_power() {
    let mut r = trial_stream(7, 0, 0);
    let n = 100_000;
    let (mut p, mut re2, mut mean) = (0.0, 0.0, C64::new(0.0, 0.0));
    for _ in 0..n {
        let z = complex_gaussian(&mut r);
        p += z.norm_sqr();
        re2 += z.re * z.re;
        mean += z;
    }
    let var = p / n as f64;
    assert!((0.98..=1.02).contains(&var), "{var}");
    assert!((re2 / n as f64 - 0.5).abs() < 0.01);
    assert!((mean / n as f64).norm() < 0.01);
}

#[test]
fn sample_covariance_converges_to_sigma() {
    for (n, w) in [(2usize, 0.5), (5, 1.0), (8, 2.0)] {
        let c = correlation_matrix(&PortTopology::line(n, w).unwrap()).unwrap();
        let mut r = trial_stream(11, n as u64, 0);
        let draws = 100_000;
        let h = sample_user_channel(&c, draws, &mut r);
        for i in 0..n {
            for j in 0..n {
                let est: C64 = (0..draws).map(|d| h[(i, d)] * h[(j, d)].conj()).sum::<C64>() / draws as f64;
                let err = (est - c.sigma().as_matrix()[(i, j)]).norm();
                assert!(err < 5e-2, "n={n} ({i},{j}) err={err}");
            }
        }
    }
}

#[test]
fn draws_are_deterministic_and_stream_separated() {
    let c = correlation_matrix(&PortTopology::line(10, 2.0).unwrap()).unwrap();
    let a = sample_channels(&c, 4, 4, 42, 17).unwrap();
    let b = sample_channels(&c, 4, 4, 42, 17).unwrap();
    assert_eq!(a, b);
    let other_trial = sample_channels(&c, 4, 4, 42, 18).unwrap();
    let other_seed = sample_channels(&c, 4, 4, 43, 17).unwrap();
    assert_ne!(a, other_trial);
    assert_ne!(a, other_seed);
    assert_ne!(a.user(0), a.user(1));
    // Per-user streams depend only on (seed, trial, user), not on K.
    let fewer = sample_channels(&c, 4, 2, 42, 17).unwrap();
    assert_eq!(fewer.user(1), a.user(1));
}

#[test]
fn topology_validation() {
    assert!(PortTopology::line(0, 1.0).is_err());
    assert!(PortTopology::line(3, 0.0).is_err());
    assert!(PortTopology::line(1, 0.0).is_ok());
    assert!(PortTopology::line(2, f64::NAN).is_err());
    assert!(PortTopology::grid(3, 0, 1.0, 1.0).is_err());
    assert_eq!(PortTopology::grid(60, 15, 4.0, 1.0).unwrap().num_ports(), 900);
}
