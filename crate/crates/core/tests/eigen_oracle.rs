//! Shooting eigenvalues against a finite-volume Sturm-sequence oracle and
//! against transcendental boundary equations solved by plain bisection.

use std::f64::consts::PI;

use proptest::prelude::*;
use tzlab::eigen::{ground_state, r0, solve_general, solve_linear_drift, solve_sign_drift, solve_tan_drift, solve_tanh_drift};
use tzlab::{Direction, DriftSpec};

fn bisect(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Smallest eigenvalue of `-(sigma^2/2) (w h')' = E w h` on `(0, L]`, `h(0) = 0`,
/// `h'(L) = 0`, with `w = exp(2 Phi / sigma^2)` and `Phi' = mu`.
fn sturm_e1(phi: &dyn Fn(f64) -> f64, sigma: f64, l: f64, n: usize) -> f64 {
    let dx = l / n as f64;
    let k = 0.5 * sigma * sigma / (dx * dx);
    let w = |x: f64| (2.0 * phi(x) / (sigma * sigma)).exp();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    for i in 1..=n {
        let x = i as f64 * dx;
        let wl = w(x - 0.5 * dx);
        let (a, m) = if i < n {
            (k * (wl + w(x + 0.5 * dx)), w(x))
        } else {
            (k * wl, 0.5 * w(x))
        };
        diag[i - 1] = a / m;
        if i < n {
            let mn = if i + 1 < n { w(x + dx) } else { 0.5 * w(x + dx) };
            off[i - 1] = -k * w(x + 0.5 * dx) / (m * mn).sqrt();
        }
    }
    let below = |lam: f64| {
        let mut count = 0;
        let mut q = diag[0] - lam;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let qq = if q == 0.0 { 1e-300 } else { q };
            q = diag[i] - lam - off[i - 1] * off[i - 1] / qq;
            if q < 0.0 {
                count += 1;
            }
        }
        count as f64 - 0.5
    };
    bisect(below, 0.0, 1e3)
}

fn sturm_richardson(phi: &dyn Fn(f64) -> f64, sigma: f64, l: f64) -> f64 {
    let a = sturm_e1(phi, sigma, l, 2000);
    let b = sturm_e1(phi, sigma, l, 4000);
    (4.0 * b - a) / 3.0
}

#[test]
fn linear_drift_matches_sturm_oracle() {
    for (alpha, dir) in [(0.5, Direction::MeanReverting), (0.5, Direction::Momentum), (2.0, Direction::MeanReverting)] {
        let eps = dir.sign();
        let phi = move |x: f64| eps * alpha * x * x / 2.0;
        let oracle = sturm_richardson(&phi, 1.0, 1.0);
        let shot = solve_linear_drift(alpha, dir, 1.0, 1.0, 2001).unwrap().e1();
        assert!((shot / oracle - 1.0).abs() < 1e-7, "alpha {alpha} {dir:?}: {shot} vs {oracle}");
    }
}

#[test]
fn tan_drift_matches_sturm_and_transcendental() {
    for nu in [0.3, 0.5, 1.0] {
        let phi = move |x: f64| (nu * x).cos().ln();
        let oracle = sturm_richardson(&phi, 1.0, 1.0);
        let sol = solve_tan_drift(nu, 1.0, 1.0, 2001).unwrap();
        assert!((sol.e1() / oracle - 1.0).abs() < 1e-7, "nu {nu}: {} vs {oracle}", sol.e1());
        // omega cot(omega L) = -nu tan(nu L), root on (pi/2, pi)
        let target = -nu * nu.tan();
        let w = bisect(|w| w / w.tan() - target, PI / 2.0, PI - 1e-12);
        let exact = 0.5 * (w * w - nu * nu);
        assert!((sol.e1() / exact - 1.0).abs() < 1e-9);
        assert!(sol.e1() > sol.r0());
    }
    let e = solve_tan_drift(1.0, 1.0, 1.0, 2001).unwrap().e1();
    assert!((e - 1.89618).abs() < 1e-5);
}

#[test]
fn closed_forms_match_bisection() {
    // sign drift, both orientations
    for (nu, dir) in [(0.4, Direction::Momentum), (0.9, Direction::Momentum), (0.7, Direction::MeanReverting)] {
        let eps = dir.sign();
        let lo = if eps > 0.0 { 1e-9 } else { PI / 2.0 };
        let hi = if eps > 0.0 { PI / 2.0 } else { PI - 1e-12 };
        let w = bisect(|w| w / w.tan() - eps * nu, lo, hi);
        let exact = 0.5 * (nu * nu + w * w);
        let sol = solve_sign_drift(nu, dir, 1.0, 1.0, 201).unwrap();
        assert!((sol.e1() / exact - 1.0).abs() < 1e-12);
    }
    let nu = 0.8;
    let w = bisect(|w| w / w.tan() - nu * f64::tanh(nu), 1e-9, PI / 2.0);
    let sol = solve_tanh_drift(nu, 1.0, 1.0, 201).unwrap();
    assert!((sol.e1() / (0.5 * (nu * nu + w * w)) - 1.0).abs() < 1e-12);
}

#[test]
fn grid_refinement_converges() {
    // fourth-order shooting: the error must drop at least fourfold when the step halves
    let d = DriftSpec::Linear {
        alpha: 1.5,
        direction: Direction::MeanReverting,
    };
    let fine = solve_general(&d, 1.0, 1.0, 3201).unwrap().e1();
    let e1 = solve_general(&d, 1.0, 1.0, 51).unwrap().e1();
    let e2 = solve_general(&d, 1.0, 1.0, 101).unwrap().e1();
    let (err1, err2) = ((e1 - fine).abs(), (e2 - fine).abs());
    assert!(err2 < err1 / 4.0, "{err1} {err2}");
}

#[test]
fn ground_state_residuals() {
    let g = ground_state(
        &DriftSpec::Linear {
            alpha: 1.0,
            direction: Direction::MeanReverting,
        },
        1.0,
        1.0,
        2001,
    )
    .unwrap();
    assert!(g.residual() < 1e-8);
    // psi_0 proportional to exp(-x^2/2)
    let ratio = g.psi0()[1000] / g.psi0()[2000];
    assert!((ratio - 0.5f64.exp()).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ordering_by_direction(nu in 0.05f64..0.95, alpha in 0.05f64..3.0, sigma in 0.3f64..2.0, l in 0.5f64..2.0) {
        let r = r0(sigma, l);
        let nu = nu / l;
        let mr = solve_sign_drift(nu, Direction::MeanReverting, sigma, l, 201).unwrap().e1();
        let mo = solve_sign_drift(nu, Direction::Momentum, sigma, l, 201).unwrap().e1();
        prop_assert!(mr > r && r > mo);
        let mr = solve_linear_drift(alpha, Direction::MeanReverting, sigma, l, 401).unwrap().e1();
        let mo = solve_linear_drift(alpha, Direction::Momentum, sigma, l, 401).unwrap().e1();
        prop_assert!(mr > r && r > mo);
    }

    #[test]
    fn eigen_solution_invariants(nu in 0.05f64..0.95, sigma in 0.3f64..2.0) {
        for sol in [
            solve_sign_drift(nu, Direction::Momentum, sigma, 1.0, 301).unwrap(),
            solve_tanh_drift(nu, sigma, 1.0, 301).unwrap(),
            solve_tan_drift(nu, sigma, 1.0, 301).unwrap(),
        ] {
            let n = sol.h().len();
            prop_assert!(sol.e1() >= 0.0);
            prop_assert_eq!(sol.node_count(), 1);
            prop_assert!(sol.h().windows(2).all(|w| w[1] > w[0]));
            prop_assert!(sol.h_prime()[0].abs() < 1e-8 && sol.h_prime()[n - 1].abs() < 1e-8);
            for i in 0..n {
                prop_assert!((sol.h()[i] + sol.h()[n - 1 - i]).abs() < 1e-12);
            }
        }
    }
}
