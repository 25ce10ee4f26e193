use crate::error::{Error, Result};
use crate::model::{DriftSpec, Side};
use crate::numeric::{symmetric_grid, trapezoid};

/// Zero-energy state `psi_0 = a_0 exp(sigma^-2 ∫_{-L}^x mu)`.
#[derive(Debug, Clone)]
pub struct GroundState {
    x: Vec<f64>,
    psi0: Vec<f64>,
    a0: f64,
    residual: f64,
    checked: usize,
}

impl GroundState {
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Unit L2 norm on `[-L, L]`.
    pub fn psi0(&self) -> &[f64] {
        &self.psi0
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// `max |-sigma^2/2 psi_0'' + V psi_0|` from a fourth-order stencil.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Grid points whose stencil avoids every drift breakpoint.
    pub fn checked_points(&self) -> usize {
        self.checked
    }
}

/// Builds the ground state and checks it against the Schrodinger operator at `E = 0`.
pub fn ground_state(drift: &DriftSpec, sigma: f64, half_width: f64, nodes: usize) -> Result<GroundState> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
    }
    drift.validate(half_width)?;
    let x = symmetric_grid(half_width, nodes)?;
    let s2 = sigma * sigma;
    let mut psi0 = x
        .iter()
        .map(|&xi| Ok((drift.integral(sigma, -half_width, xi)? / s2).exp()))
        .collect::<Result<Vec<f64>>>()?;
    let norm = trapezoid(&x, &psi0.iter().map(|p| p * p).collect::<Vec<_>>()).sqrt();
    psi0.iter_mut().for_each(|p| *p /= norm);
    let a0 = 1.0 / norm;

    let dx = x[1] - x[0];
    let breaks = drift.breakpoints();
    let mut residual = 0.0_f64;
    let mut checked = 0;
    for i in 2..nodes - 2 {
        let (lo, hi) = (x[i - 2], x[i + 2]);
        if breaks.iter().any(|&b| b >= lo && b <= hi) {
            continue;
        }
        let d2 = (-psi0[i - 2] + 16.0 * psi0[i - 1] - 30.0 * psi0[i] + 16.0 * psi0[i + 1] - psi0[i + 2])
            / (12.0 * dx * dx);
        let v = drift.potential(sigma, x[i], Side::Right)?;
        residual = residual.max((-0.5 * s2 * d2 + v * psi0[i]).abs());
        checked += 1;
    }
    Ok(GroundState {
        x,
        psi0,
        a0,
        residual,
        checked,
    })
}
