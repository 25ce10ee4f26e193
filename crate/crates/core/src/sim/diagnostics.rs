use super::{Estimate, PathSet, PathView, Simulator};
use crate::error::Result;

/// Average drift of `Z_t = S_t / B_t`, `B_t = exp(∫ r ds)`, over one path:
/// `(Z_T - Z_0) / T` with the rate integrated by the trapezoid rule.
pub fn z_drift(path: &PathView, dt: f64) -> f64 {
    let mut log_b = 0.0;
    for w in path.r.windows(2) {
        log_b += 0.5 * (w[0] + w[1]) * dt;
    }
    let n = path.s.len() - 1;
    let z_t = path.s[n] * (-log_b).exp();
    (z_t - path.s[0]) / (n as f64 * dt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MartingaleReport {
    /// Drift of `Z` per year across paths.
    pub slope: Estimate,
}

impl MartingaleReport {
    /// Whether the slope is within `k` standard errors of zero.
    pub fn consistent_with_zero(&self, k: f64) -> bool {
        self.slope.mean == 0.0 || self.slope.mean.abs() <= k * self.slope.se
    }
}

pub fn martingale_check(ps: &PathSet) -> MartingaleReport {
    let dt = ps.params().dt;
    MartingaleReport {
        slope: Estimate::from_samples(&ps.map_paths(|p| z_drift(p, dt))),
    }
}

impl Simulator<'_> {
    /// [`martingale_check`] without storing the paths.
    pub fn martingale_check(&self) -> Result<MartingaleReport> {
        let dt = self.params().dt;
        Ok(MartingaleReport {
            slope: Estimate::from_samples(&self.for_each_path(|p| z_drift(p, dt))?),
        })
    }

    /// [`carry_strategy_pnl`] without storing the paths.
    pub fn carry_pnl(&self, r_star_uirp: f64, r_star_star: f64) -> Result<CarryReport> {
        let dt = self.params().dt;
        let s_star = self.map().zone().s_star();
        let pnl = self.for_each_path(|p| carry_accrual(p.s, s_star, r_star_uirp, r_star_star, dt))?;
        Ok(CarryReport::new(r_star_uirp, r_star_star, pnl))
    }
}

/// Accrued P&L of the dynamic carry trade along one FX path.
///
/// The fair foreign rate is `r_d + r_* (1 - S/S_*)` but the peg pays
/// `r_d + r_** (1 - S/S_*)`. Whenever `S != S_*` the strategy lends the currency
/// the peg overpays and borrows the other, so each step accrues
/// `|r_* - r_**| |1 - S/S_*| dt` (left-point, non-anticipating).
pub fn carry_accrual(s: &[f64], s_star: f64, r_star_uirp: f64, r_star_star: f64, dt: f64) -> f64 {
    let spread = r_star_uirp - r_star_star;
    s[..s.len().saturating_sub(1)]
        .iter()
        .map(|&v| {
            let gap = 1.0 - v / s_star;
            // +1: long domestic, short foreign
            let position = gap.signum() * spread.signum();
            let position = if gap == 0.0 || spread == 0.0 { 0.0 } else { position };
            position * spread * gap * dt
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CarryReport {
    pub r_star_uirp: f64,
    pub r_star_star: f64,
    pub pnl: Vec<f64>,
    pub summary: Estimate,
}

impl CarryReport {
    fn new(r_star_uirp: f64, r_star_star: f64, pnl: Vec<f64>) -> Self {
        let summary = Estimate::from_samples(&pnl);
        Self {
            r_star_uirp,
            r_star_star,
            pnl,
            summary,
        }
    }
}

/// Carry-trade P&L per path of `ps`, which should be simulated under the peg `r_**`.
pub fn carry_strategy_pnl(ps: &PathSet, r_star_uirp: f64, r_star_star: f64) -> CarryReport {
    let dt = ps.params().dt;
    let s_star = ps.s_star();
    let pnl = ps.map_paths(|p| carry_accrual(p.s, s_star, r_star_uirp, r_star_star, dt));
    CarryReport::new(r_star_uirp, r_star_star, pnl)
}
