//! Nonlinear map against a finite-difference relaxation solver written from scratch.

use tzlab::eigen::{r0, solve_zero_drift, solve_sign_drift};
use tzlab::fxmap::{build_linearized, solve_nonlinear};
use tzlab::{Direction, DriftSpec, TargetZone};

/// Newton relaxation for `sigma^2/2 u'' + mu u' + r u (1 + u) = 0` on `[0, L]`
/// with `u(0) = 0`, `u(L) = gamma`, `u'(L) = 0` (ghost node), unknowns `u_1..u_{N-1}` and `r`.
fn relax(drift: &DriftSpec, sigma: f64, l: f64, gamma: f64, n: usize, r_guess: f64) -> (Vec<f64>, f64) {
    let dx = l / n as f64;
    let a = 0.5 * sigma * sigma / (dx * dx);
    let x: Vec<f64> = (0..=n).map(|i| i as f64 * dx).collect();
    let mu: Vec<f64> = x.iter().map(|&xi| drift.eval(sigma, xi).unwrap()).collect();
    let mut u: Vec<f64> = x.iter().map(|&xi| gamma * (std::f64::consts::FRAC_PI_2 * xi / l).sin()).collect();
    let mut r = r_guess;
    for _ in 0..50 {
        // residuals for rows 1..=n
        let mut f = vec![0.0; n + 1];
        for i in 1..n {
            f[i] = a * (u[i + 1] - 2.0 * u[i] + u[i - 1]) + mu[i] * (u[i + 1] - u[i - 1]) / (2.0 * dx) + r * u[i] * (1.0 + u[i]);
        }
        f[n] = 2.0 * a * (u[n - 1] - u[n]) + r * u[n] * (1.0 + u[n]);
        let norm = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if norm < 1e-15 {
            break;
        }
        // Jacobian over v = u_1..u_{n-1}: tridiagonal T, column c = d/dr
        let m = n - 1;
        let mut lo = vec![0.0; m];
        let mut di = vec![0.0; m];
        let mut up = vec![0.0; m];
        let mut c = vec![0.0; m];
        for k in 0..m {
            let i = k + 1;
            lo[k] = a - mu[i] / (2.0 * dx);
            up[k] = a + mu[i] / (2.0 * dx);
            di[k] = -2.0 * a + r * (1.0 + 2.0 * u[i]);
            c[k] = u[i] * (1.0 + u[i]);
        }
        let rhs: Vec<f64> = (1..n).map(|i| -f[i]).collect();
        let y1 = thomas(&lo, &di, &up, &rhs);
        let y2 = thomas(&lo, &di, &up, &c);
        // last row: 2a du_{n-1} + u_n(1+u_n) dr = -f_n
        let an = 2.0 * a;
        let dn = u[n] * (1.0 + u[n]);
        let dr = (-f[n] - an * y1[m - 1]) / (dn - an * y2[m - 1]);
        for k in 0..m {
            u[k + 1] += y1[k] - y2[k] * dr;
        }
        r += dr;
    }
    (u, r)
}

fn thomas(lo: &[f64], di: &[f64], up: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = di.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = up[0] / di[0];
    dp[0] = rhs[0] / di[0];
    for i in 1..n {
        let den = di[i] - lo[i] * cp[i - 1];
        cp[i] = up[i] / den;
        dp[i] = (rhs[i] - lo[i] * dp[i - 1]) / den;
    }
    let mut out = vec![0.0; n];
    out[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = dp[i] - cp[i] * out[i + 1];
    }
    out
}

#[test]
fn wide_band_matches_relaxation() {
    let zone = TargetZone::new(0.95, 1.05, 1.0, 1.0).unwrap();
    let gamma = zone.gamma();
    assert!((gamma - 0.05).abs() < 1e-15);
    let drifts = [
        DriftSpec::Zero,
        DriftSpec::Linear {
            alpha: 0.8,
            direction: Direction::MeanReverting,
        },
    ];
    for drift in &drifts {
        let map = solve_nonlinear(&zone, 1.0, drift, r0(1.0, 1.0), 2001).unwrap();
        // Richardson-combined relaxation at N and 2N
        let (u1, r1) = relax(drift, 1.0, 1.0, gamma, 4000, r0(1.0, 1.0));
        let (u2, r2) = relax(drift, 1.0, 1.0, gamma, 8000, r0(1.0, 1.0));
        let r_ref = (4.0 * r2 - r1) / 3.0;
        assert!((map.r_star() / r_ref - 1.0).abs() < 1e-8, "{drift:?}: {} vs {r_ref}", map.r_star());
        let mut worst = 0.0_f64;
        for k in 0..=1000 {
            let u_ref = (4.0 * u2[8 * k] - u1[4 * k]) / 3.0;
            let f = map.f()[1000 + k];
            worst = worst.max((f - (1.0 + u_ref)).abs() / 1.0);
        }
        assert!(worst < 1e-6, "{drift:?}: {worst}");
    }
}

#[test]
fn wide_band_linearized_gap_is_quantified() {
    let zone = TargetZone::new(0.95, 1.05, 1.0, 1.0).unwrap();
    let g = zone.gamma();
    let nl = solve_nonlinear(&zone, 1.0, &DriftSpec::Zero, r0(1.0, 1.0), 2001).unwrap();
    let lin = build_linearized(&solve_zero_drift(1.0, 1.0, 2001).unwrap(), &zone).unwrap();
    let gap = nl.f().iter().zip(lin.f()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    // the quadratic term shifts f by order gamma^2 and r_* by order gamma
    assert!(gap > 0.05 * g * g && gap < 5.0 * g * g, "gap {gap}");
    let dr = nl.r_star() / r0(1.0, 1.0) - 1.0;
    assert!(dr.abs() < 2.0 * g, "dr {dr}");
    let [fl, dfl] = nl.lower_edge_mismatch().unwrap();
    assert!(fl.abs() < 5.0 * g * g && dfl.abs() < 5.0 * g * g);
}

#[test]
fn linearized_map_invariants_for_catalog() {
    let zone = TargetZone::hkd();
    let sols = [
        solve_zero_drift(0.8, 1.0, 801).unwrap(),
        solve_sign_drift(0.6, Direction::Momentum, 0.8, 1.0, 801).unwrap(),
        tzlab::eigen::solve_tanh_drift(1.0, 0.8, 1.0, 801).unwrap(),
        tzlab::eigen::solve_tan_drift(0.5, 0.8, 1.0, 801).unwrap(),
        tzlab::eigen::solve_linear_drift(1.0, Direction::MeanReverting, 0.8, 1.0, 801).unwrap(),
    ];
    for e in &sols {
        let m = build_linearized(e, &zone).unwrap();
        let n = m.f().len();
        assert!(m.f().windows(2).all(|w| w[1] > w[0]));
        assert!((m.f()[0] - zone.s_minus()).abs() < 1e-8 * zone.s_star());
        assert!((m.f()[n - 1] - zone.s_plus()).abs() < 1e-8 * zone.s_star());
        assert!(m.df()[0].abs() < 1e-8 && m.df()[n - 1].abs() < 1e-8);
        assert!(m.df()[1..n - 1].iter().all(|&d| d > 0.0));
        for i in 0..n {
            let odd = (m.f()[i] - zone.s_star()) + (m.f()[n - 1 - i] - zone.s_star());
            assert!(odd.abs() < 1e-12);
        }
        assert!(m.uirp_residual().unwrap() < 5.0 * zone.gamma() * m.r_star());
    }
}
