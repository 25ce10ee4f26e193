use crate::error::Result;
use crate::sim::{Estimate, PathSet, PathView, Simulator};

fn rate_integral(path: &PathView, dt: f64) -> f64 {
    path.r.windows(2).map(|w| 0.5 * (w[0] + w[1]) * dt).sum()
}

/// `exp(-∫ r_f dt)` along one path, `r_f = r_d + r`.
pub fn path_bond_discount(path: &PathView, dt: f64, r_domestic: f64) -> f64 {
    let horizon = (path.r.len() - 1) as f64 * dt;
    (-rate_integral(path, dt) - r_domestic * horizon).exp()
}

/// `exp(-∫ r dt) Y(S_T)` along one path; comparable with the PDE value `v`.
pub fn path_claim_value(path: &PathView, dt: f64, payoff: impl Fn(f64) -> f64) -> f64 {
    (-rate_integral(path, dt)).exp() * payoff(path.s[path.s.len() - 1])
}

/// Monte Carlo foreign zero-coupon bond price over the horizon of `ps`.
pub fn bond_via_mc(ps: &PathSet, r_domestic: f64) -> Estimate {
    let dt = ps.params().dt;
    Estimate::from_samples(&ps.map_paths(|p| path_bond_discount(p, dt, r_domestic)))
}

/// Monte Carlo `v` for a payoff written on the terminal FX rate.
pub fn claim_via_mc(ps: &PathSet, payoff: impl Fn(f64) -> f64 + Sync) -> Estimate {
    let dt = ps.params().dt;
    Estimate::from_samples(&ps.map_paths(|p| path_claim_value(p, dt, &payoff)))
}

impl Simulator<'_> {
    /// [`bond_via_mc`] without storing the paths.
    pub fn bond_mc(&self, r_domestic: f64) -> Result<Estimate> {
        let dt = self.params().dt;
        Ok(Estimate::from_samples(&self.for_each_path(|p| path_bond_discount(p, dt, r_domestic))?))
    }

    /// [`claim_via_mc`] without storing the paths.
    pub fn claim_mc(&self, payoff: impl Fn(f64) -> f64 + Sync) -> Result<Estimate> {
        let dt = self.params().dt;
        Ok(Estimate::from_samples(&self.for_each_path(|p| path_claim_value(p, dt, &payoff))?))
    }
}
