use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::{assemble, r0, EigenSolution, Method};
use crate::error::{Error, Result};
use crate::model::{Direction, DriftSpec};
use crate::numeric::{brent, symmetric_grid, z_cot_z};

/// Relative distance from a limiting drift strength treated as the limit itself.
const LIMIT_TOL: f64 = 1e-12;

fn check_common(sigma: f64, half_width: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
    }
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::param("half_width", format!("must be positive, got {half_width}")));
    }
    Ok(())
}

/// Tabulates `psi = sin(omega x)` (or `psi = x` when `omega == 0`) on the grid.
fn sine_mode(
    omega: f64,
    e1: f64,
    drift: DriftSpec,
    sigma: f64,
    half_width: f64,
    nodes: usize,
) -> Result<EigenSolution> {
    let grid = symmetric_grid(half_width, nodes)?;
    let mid = (nodes - 1) / 2;
    let half: Vec<(f64, f64)> = grid[mid..]
        .iter()
        .map(|&x| {
            if omega == 0.0 {
                (x, 1.0)
            } else {
                ((omega * x).sin(), omega * (omega * x).cos())
            }
        })
        .collect();
    assemble(grid, &half, e1, Some(omega), drift, sigma, half_width, Method::ClosedForm)
}

/// Vanishing drift: `h = sin(pi x / 2L)`, `E_1 = r_0`.
pub fn solve_zero_drift(sigma: f64, half_width: f64, nodes: usize) -> Result<EigenSolution> {
    check_common(sigma, half_width)?;
    let omega = FRAC_PI_2 / half_width;
    sine_mode(omega, r0(sigma, half_width), DriftSpec::Zero, sigma, half_width, nodes)
}

/// `mu = eps nu sigma^2 sign(x)`: `omega cot(omega L) = eps nu`,
/// `E_1 = sigma^2 (nu^2 + omega^2) / 2`.
///
/// For the momentum orientation a root exists only up to `nu = 1/L`, where the
/// eigenfunction degenerates to `psi = x` and `E_1 = 4 r_0 / pi^2`.
pub fn solve_sign_drift(
    nu: f64,
    direction: Direction,
    sigma: f64,
    half_width: f64,
    nodes: usize,
) -> Result<EigenSolution> {
    check_common(sigma, half_width)?;
    let drift = DriftSpec::Sign { nu, direction };
    drift.validate(half_width)?;
    let z = nu * half_width;
    let y = match direction {
        Direction::Momentum => momentum_root(z, "sign drift")?,
        Direction::MeanReverting => {
            // z cot z = -nu L has its first root on (pi/2, pi)
            let hi = PI * (1.0 - 1e-12);
            brent(|y| z_cot_z(y) + z, FRAC_PI_2, hi, 1e-15, "sign drift")?
        }
    };
    let omega = y / half_width;
    let e1 = 0.5 * sigma * sigma * (nu * nu + omega * omega);
    sine_mode(omega, e1, drift, sigma, half_width, nodes)
}

/// Root `y = omega L` of `y cot y = c` on `[0, pi/2)` for `0 < c <= 1`.
fn momentum_root(c: f64, what: &str) -> Result<f64> {
    if c > 1.0 + LIMIT_TOL {
        return Err(Error::NoRoot {
            reason: format!(
                "{what}: boundary equation has no root for a momentum strength of {c} \
                 (limiting value 1, where omega -> 0 and E_1 reaches its minimum)"
            ),
        });
    }
    if c >= 1.0 - LIMIT_TOL {
        return Ok(0.0);
    }
    brent(|y| z_cot_z(y) - c, 0.0, FRAC_PI_2, 1e-15, what)
}

/// `mu = nu sigma^2 tanh(nu x)`: constant potential `sigma^2 nu^2 / 2` and
/// `omega cot(omega L) = nu tanh(nu L)`. The limit is `nu L tanh(nu L) = 1`.
pub fn solve_tanh_drift(nu: f64, sigma: f64, half_width: f64, nodes: usize) -> Result<EigenSolution> {
    check_common(sigma, half_width)?;
    let drift = DriftSpec::Tanh { nu };
    drift.validate(half_width)?;
    let c = nu * half_width * (nu * half_width).tanh();
    let y = momentum_root(c, "tanh drift")?;
    let omega = y / half_width;
    let e1 = 0.5 * sigma * sigma * (nu * nu + omega * omega);
    sine_mode(omega, e1, drift, sigma, half_width, nodes)
}

/// Drift strength `nu` solving `nu L tanh(nu L) = 1`, where the tanh drift attains its lowest `E_1`.
pub fn tanh_limit_nu(half_width: f64) -> Result<f64> {
    let z = brent(|z| z * z.tanh() - 1.0, 0.5, 2.0, 1e-15, "tanh limit")?;
    Ok(z / half_width)
}

/// Step drift that vanishes inside the band and pushes back with strength
/// `xi sigma^2` outside it.
#[derive(Debug, Clone)]
pub struct InterventionSolution {
    eigen: EigenSolution,
    xi: f64,
    omega: f64,
    decay: f64,
}

impl InterventionSolution {
    /// In-band solution tabulated on `[-L, L]`.
    pub fn eigen(&self) -> &EigenSolution {
        &self.eigen
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Decay rate `lambda = sqrt(xi^2 - omega^2)` of `psi` outside the band.
    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn e1(&self) -> f64 {
        self.eigen.e1()
    }

    /// `(pi / 2L) (1 - 1 / (2 xi L))`.
    pub fn omega_asymptotic(&self) -> f64 {
        let l = self.eigen.half_width();
        FRAC_PI_2 / l * (1.0 - 1.0 / (2.0 * self.xi * l))
    }

    /// `xi - pi^2 / (8 xi L^2)`.
    pub fn decay_asymptotic(&self) -> f64 {
        let l = self.eigen.half_width();
        self.xi - PI * PI / (8.0 * self.xi * l * l)
    }

    /// Growth rate `xi - lambda` of `h` beyond the barrier; tends to zero as `xi` grows.
    pub fn outer_slope(&self) -> f64 {
        self.xi - self.decay
    }

    /// Band profile on the whole real line, odd, with `h(±L) = ±1`.
    pub fn h_at(&self, x: f64) -> f64 {
        let l = self.eigen.half_width();
        if x.abs() <= l {
            (self.omega * x).sin() / (self.omega * l).sin()
        } else {
            x.signum() * (self.outer_slope() * (x.abs() - l)).exp()
        }
    }

    pub fn h_prime_at(&self, x: f64) -> f64 {
        let l = self.eigen.half_width();
        if x.abs() <= l {
            self.omega * (self.omega * x).cos() / (self.omega * l).sin()
        } else {
            self.outer_slope() * (self.outer_slope() * (x.abs() - l)).exp()
        }
    }
}

/// Solves the intervention model: `sin(2 omega L) = omega / xi` on `(0, pi/2L)`,
/// `E_1 = sigma^2 omega^2 / 2`. Requires `xi L >= 5`.
pub fn solve_intervention(xi: f64, sigma: f64, half_width: f64, nodes: usize) -> Result<InterventionSolution> {
    check_common(sigma, half_width)?;
    let drift = DriftSpec::InterventionStep {
        xi,
        barrier: half_width,
    };
    drift.validate(half_width)?;
    let xl = xi * half_width;
    // the trivial root omega = 0 lies outside [pi/4, pi/2]
    let y = brent(|y| (2.0 * y).sin() - y / xl, FRAC_PI_4, FRAC_PI_2, 1e-15, "intervention")?;
    let omega = y / half_width;
    let decay = (xi * xi - omega * omega).sqrt();
    let e1 = 0.5 * sigma * sigma * omega * omega;

    let mut eigen = sine_mode(omega, e1, drift, sigma, half_width, nodes)?;
    // matching condition at the barrier replaces the box boundary condition:
    // psi'(L-) - psi'(L+) = xi psi(L)
    let norm = eigen.psi1[eigen.psi1.len() - 1] / y.sin();
    eigen.robin_residual = norm * (omega * y.cos() + decay * y.sin() - xi * y.sin());

    let sol = InterventionSolution {
        eigen,
        xi,
        omega,
        decay,
    };
    debug_assert!(
        (sol.omega - sol.omega_asymptotic()).abs() * xl * xl <= FRAC_PI_2 / half_width,
        "omega off its large-xi expansion"
    );
    debug_assert!(
        (sol.decay - sol.decay_asymptotic()).abs() * xi * xi * half_width.powi(3) <= PI * PI / 4.0,
        "lambda off its large-xi expansion"
    );
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_drift_closed_form() {
        let s = solve_zero_drift(1.0, 1.0, 201).unwrap();
        assert!((s.e1() - PI * PI / 8.0).abs() < 1e-15);
        assert!((s.e1() - 1.2337).abs() < 1e-4);
        let s2 = solve_zero_drift(2.0, 1.0, 201).unwrap();
        assert!((s2.e1() - PI * PI / 2.0).abs() < 1e-14);
        // h(L/3) = sin(pi/6)
        let s3 = solve_zero_drift(1.0, 1.0, 301).unwrap();
        let i = 150 + 50;
        assert!((s3.x()[i] - 1.0 / 3.0).abs() < 1e-15);
        assert!((s3.h()[i] - 0.5).abs() < 1e-14);
        assert_eq!(s3.method(), Method::ClosedForm);
        assert!(s3.robin_residual().abs() < 1e-14);
    }

    #[test]
    fn sign_momentum_limit() {
        let s = solve_sign_drift(1.0, Direction::Momentum, 1.0, 1.0, 201).unwrap();
        assert_eq!(s.omega(), Some(0.0));
        assert!((s.e1() - 0.5).abs() < 1e-15);
        assert!((s.ratio_to_r0() - 4.0 / (PI * PI)).abs() < 1e-14);
        assert!((s.ratio_to_r0() - 0.4053).abs() < 1e-4);
        assert_eq!(s.node_count(), 1);
        assert!(s.h_prime()[200].abs() < 1e-14);
    }

    #[test]
    fn sign_momentum_beyond_limit_has_no_root() {
        let err = solve_sign_drift(1.2, Direction::Momentum, 1.0, 1.0, 201).unwrap_err();
        match err {
            Error::NoRoot { reason } => assert!(reason.contains("limiting value 1")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn weak_drifts_approach_r0() {
        let r = r0(1.0, 1.0);
        for dir in [Direction::Momentum, Direction::MeanReverting] {
            let s = solve_sign_drift(1e-7, dir, 1.0, 1.0, 201).unwrap();
            assert!((s.e1() / r - 1.0).abs() < 1e-6);
            assert!((s.omega().unwrap() - FRAC_PI_2).abs() < 1e-6);
        }
        let t = solve_tanh_drift(1e-5, 1.0, 1.0, 201).unwrap();
        assert!((t.e1() / r - 1.0).abs() < 1e-8);
    }

    #[test]
    fn tanh_beyond_limit_has_no_root() {
        assert!(matches!(solve_tanh_drift(1.3, 1.0, 1.0, 201), Err(Error::NoRoot { .. })));
    }

    #[test]
    fn tanh_limit() {
        let nu = tanh_limit_nu(1.0).unwrap();
        assert!((nu - 1.1997).abs() < 1e-4);
        let s = solve_tanh_drift(nu, 1.0, 1.0, 201).unwrap();
        assert_eq!(s.omega(), Some(0.0));
        assert!((s.ratio_to_r0() - 0.583).abs() < 1e-3);
    }

    #[test]
    fn profiles_are_odd_monotone_and_reflecting() {
        let sols = [
            solve_zero_drift(1.0, 1.0, 401).unwrap(),
            solve_sign_drift(0.5, Direction::MeanReverting, 1.0, 1.0, 401).unwrap(),
            solve_sign_drift(0.8, Direction::Momentum, 1.3, 1.0, 401).unwrap(),
            solve_tanh_drift(0.9, 0.7, 1.0, 401).unwrap(),
        ];
        for s in &sols {
            let n = s.h().len();
            assert_eq!(s.h()[0], -1.0);
            assert_eq!(s.h()[n - 1], 1.0);
            for i in 0..n {
                assert!((s.h()[i] + s.h()[n - 1 - i]).abs() < 1e-13);
            }
            assert!(s.h().windows(2).all(|w| w[1] > w[0]));
            assert!(s.h_prime()[0].abs() < 1e-12 && s.h_prime()[n - 1].abs() < 1e-12);
            assert_eq!(s.node_count(), 1);
            assert!(s.e1() >= 0.0);
        }
    }

    #[test]
    fn intervention_large_xi() {
        let s = solve_intervention(1e4, 1.0, 1.0, 201).unwrap();
        assert!((s.omega() - FRAC_PI_2).abs() < 2e-4);
        assert!((s.e1() / r0(1.0, 1.0) - 1.0).abs() < 3e-4);
        assert!(s.outer_slope() < 2e-4);
        assert!((s.h_at(1.5) - 1.0).abs() < 1e-4);
        assert!((s.h_at(-1.0) + 1.0).abs() < 1e-14);
        assert!(s.eigen().robin_residual().abs() < 1e-10);
    }

    #[test]
    fn intervention_requires_large_xi() {
        assert!(solve_intervention(3.0, 1.0, 1.0, 201).is_err());
    }

    #[test]
    fn intervention_profile_continuous_at_barrier() {
        let s = solve_intervention(20.0, 1.0, 1.0, 201).unwrap();
        let eps = 1e-9;
        assert!((s.h_at(1.0 - eps) - s.h_at(1.0 + eps)).abs() < 1e-8);
        assert!((s.h_prime_at(1.0 - eps) - s.h_prime_at(1.0 + eps)).abs() < 1e-7);
        assert!((s.h_at(-1.3) + s.h_at(1.3)).abs() < 1e-15);
    }
}
