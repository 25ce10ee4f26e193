//! First excited level of `-sigma^2/2 psi'' + V psi = E psi` with the Robin
//! conditions `psi'(±L) = mu(±L) psi(±L) / sigma^2`.
//!
//! The level `E_1` is the peg scale `r_*`. Its eigenfunction is odd with a single
//! node at the origin; the band profile `h` is recovered from it through
//! `h = exp(-sigma^-2 ∫ mu) psi`, normalised to `h(±L) = ±1`.

mod closed;
mod ground;
mod shooting;

use std::f64::consts::PI;

use crate::model::DriftSpec;

pub use closed::{
    solve_intervention, solve_sign_drift, solve_tanh_drift, solve_zero_drift, tanh_limit_nu, InterventionSolution,
};
pub use ground::{ground_state, GroundState};
pub use shooting::{solve_general, solve_linear_drift, solve_tan_drift};

/// Nodes used when callers do not ask for a specific resolution.
pub const DEFAULT_NODES: usize = 2001;

/// `r_0 = pi^2 sigma^2 / (8 L^2)`, the driftless peg scale.
pub fn r0(sigma: f64, half_width: f64) -> f64 {
    PI * PI * sigma * sigma / (8.0 * half_width * half_width)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Shooting,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Shooting => "shooting",
        }
    }
}

/// First excited level with its eigenfunction and band profile tabulated on a
/// symmetric grid over `[-L, L]`.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    e1: f64,
    omega: Option<f64>,
    x: Vec<f64>,
    psi1: Vec<f64>,
    h: Vec<f64>,
    h_prime: Vec<f64>,
    drift: DriftSpec,
    sigma: f64,
    half_width: f64,
    method: Method,
    robin_residual: f64,
}

impl EigenSolution {
    pub fn e1(&self) -> f64 {
        self.e1
    }

    /// Wave number of the `sin(omega x)` eigenfunction when a closed form applies.
    pub fn omega(&self) -> Option<f64> {
        self.omega
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Eigenfunction, unit L2 norm, positive for `x > 0`.
    pub fn psi1(&self) -> &[f64] {
        &self.psi1
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn h_prime(&self) -> &[f64] {
        &self.h_prime
    }

    /// `h''` from `sigma^2/2 h'' + mu h' + E_1 h = 0`.
    pub fn h_second(&self) -> Vec<f64> {
        let s2 = self.sigma * self.sigma;
        self.x
            .iter()
            .zip(self.h.iter().zip(&self.h_prime))
            .map(|(&x, (&h, &hp))| {
                let mu = self.drift.eval(self.sigma, x).unwrap_or(0.0);
                -2.0 * (mu * hp + self.e1 * h) / s2
            })
            .collect()
    }

    pub fn drift(&self) -> &DriftSpec {
        &self.drift
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Boundary-condition defect at `x = L` of the normalised eigenfunction.
    pub fn robin_residual(&self) -> f64 {
        self.robin_residual
    }

    pub fn r0(&self) -> f64 {
        r0(self.sigma, self.half_width)
    }

    pub fn ratio_to_r0(&self) -> f64 {
        self.e1 / self.r0()
    }

    /// Sign changes of `psi1` over the grid, counting an exact zero once.
    pub fn node_count(&self) -> usize {
        count_sign_changes(&self.psi1)
    }
}

pub(crate) fn count_sign_changes(values: &[f64]) -> usize {
    let mut count = 0;
    let mut last = 0.0_f64;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

/// Builds the full-grid tables from `psi`, `psi'` on the non-negative half of `grid`,
/// extending oddly to `x < 0`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn assemble(
    grid: Vec<f64>,
    half_psi: &[(f64, f64)],
    e1: f64,
    omega: Option<f64>,
    drift: DriftSpec,
    sigma: f64,
    half_width: f64,
    method: Method,
) -> crate::Result<EigenSolution> {
    let n = grid.len();
    let mid = (n - 1) / 2;
    debug_assert_eq!(half_psi.len(), mid + 1);
    let s2 = sigma * sigma;
    let (psi_l, dpsi_l) = half_psi[mid];

    let mut psi1 = vec![0.0; n];
    let mut h = vec![0.0; n];
    let mut h_prime = vec![0.0; n];
    for (k, &(psi, dpsi)) in half_psi.iter().enumerate() {
        let x = grid[mid + k];
        // exp(-(U(x) - U(L))) with U = sigma^-2 ∫ mu
        let weight = (drift.integral(sigma, x, half_width)? / s2).exp();
        let mu = drift.eval(sigma, x)?;
        let hv = weight * psi / psi_l;
        let hp = weight * (dpsi - mu * psi / s2) / psi_l;
        psi1[mid + k] = psi;
        psi1[mid - k] = -psi;
        h[mid + k] = hv;
        h[mid - k] = -hv;
        h_prime[mid + k] = hp;
        h_prime[mid - k] = hp;
    }
    h[n - 1] = 1.0;
    h[0] = -1.0;
    h[mid] = 0.0;

    let norm = crate::numeric::trapezoid(&grid, &psi1.iter().map(|p| p * p).collect::<Vec<_>>()).sqrt();
    psi1.iter_mut().for_each(|p| *p /= norm);
    let mu_l = drift.eval(sigma, half_width)?;
    let robin_residual = (dpsi_l - mu_l * psi_l / s2) / norm;

    Ok(EigenSolution {
        e1,
        omega,
        x: grid,
        psi1,
        h,
        h_prime,
        drift,
        sigma,
        half_width,
        method,
        robin_residual,
    })
}
