//! Claims on the band coordinate: Crank-Nicolson in `x`, linear-peg closed
//! forms and Monte Carlo cross-checks.
//!
//! `v(x, t)` is the price in foreign-bond units, discounted with the rate
//! differential only; [`discount_to_actual`] adds the domestic leg.

mod closed;
mod mc;

pub use closed::{closed_form_bond, closed_form_claim, discount_to_actual, foreign_rate_bounds, BondQuote};
pub use mc::{bond_via_mc, claim_via_mc, path_bond_discount, path_claim_value};

use crate::error::{Error, Result};
use crate::fxmap::FxMap;
use crate::numeric::{solve_tridiagonal, symmetric_grid};

/// Terminal payoff `Y(X_T)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Payoff {
    /// `Y = f(x)`: one unit of domestic currency, worth `S_T` foreign.
    Forward,
    /// `Y = 1`.
    UnitBond,
    /// Values on an increasing grid covering `[-L, L]`, linearly interpolated.
    Tabulated { x: Vec<f64>, y: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimSpec {
    pub payoff: Payoff,
    pub maturity: f64,
}

impl ClaimSpec {
    pub fn forward(maturity: f64) -> Self {
        Self {
            payoff: Payoff::Forward,
            maturity,
        }
    }

    pub fn unit_bond(maturity: f64) -> Self {
        Self {
            payoff: Payoff::UnitBond,
            maturity,
        }
    }

    pub fn tabulated(x: Vec<f64>, y: Vec<f64>, maturity: f64) -> Result<Self> {
        if x.len() != y.len() || x.len() < 3 {
            return Err(Error::param("payoff table", "x and y need equal lengths of at least 3"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("payoff table", "x must increase strictly and y be finite"));
        }
        Ok(Self {
            payoff: Payoff::Tabulated { x, y },
            maturity,
        })
    }

    /// `Y = g(f(x))` sampled on the map grid; reflecting whenever `f' (±L) = 0`.
    pub fn of_rate(map: &FxMap, g: impl Fn(f64) -> f64, maturity: f64) -> Result<Self> {
        let y = map.f().iter().map(|&s| g(s)).collect();
        Self::tabulated(map.x().to_vec(), y, maturity)
    }

    /// Payoff at the nodes `x`, which must lie in `[-L, L]`.
    pub fn sample(&self, map: &FxMap, x: &[f64]) -> Result<Vec<f64>> {
        match &self.payoff {
            Payoff::Forward => x.iter().map(|&v| map.value(v)).collect(),
            Payoff::UnitBond => Ok(vec![1.0; x.len()]),
            Payoff::Tabulated { x: tx, y } => {
                let l = map.half_width();
                let tol = 1e-12 * l;
                if tx[0] > -l + tol || tx[tx.len() - 1] < l - tol {
                    return Err(Error::param("payoff table", format!("grid must cover [-{l}, {l}]")));
                }
                Ok(x.iter().map(|&v| interp(tx, y, v)).collect())
            }
        }
    }

    /// Rejects payoffs with `dY/dx != 0` at the barriers (one-sided second-order
    /// slope against `(1e-8 + dx^2) max|Y| / L`).
    pub fn check_neumann(&self, map: &FxMap) -> Result<()> {
        let (x, y) = match &self.payoff {
            Payoff::UnitBond => return Ok(()),
            Payoff::Forward => (map.x().to_vec(), map.f().to_vec()),
            Payoff::Tabulated { x, y } => (x.clone(), y.clone()),
        };
        let l = map.half_width();
        let n = x.len();
        let scale = y.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let (lo, hi) = (slope_left(&x, &y), slope_right(&x[n - 3..], &y[n - 3..]));
        for (at, slope, dx) in [(-l, lo, x[1] - x[0]), (l, hi, x[n - 1] - x[n - 2])] {
            if slope.abs() > (1e-8 + dx * dx) * scale / l {
                return Err(Error::ClaimNotNeumann { at, slope });
            }
        }
        Ok(())
    }
}

fn interp(x: &[f64], y: &[f64], v: f64) -> f64 {
    let k = x.partition_point(|&p| p <= v).clamp(1, x.len() - 1);
    let t = (v - x[k - 1]) / (x[k] - x[k - 1]);
    y[k - 1] + t.clamp(0.0, 1.0) * (y[k] - y[k - 1])
}

/// Second-order one-sided slope at the first node, for possibly uneven spacing.
fn slope_left(x: &[f64], y: &[f64]) -> f64 {
    let (h1, h2) = (x[1] - x[0], x[2] - x[1]);
    -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1] - h1 / (h2 * (h1 + h2)) * y[2]
}

fn slope_right(x: &[f64], y: &[f64]) -> f64 {
    let xr = [-x[2], -x[1], -x[0]];
    let yr = [y[2], y[1], y[0]];
    -slope_left(&xr, &yr)
}

/// Differential rate used for discounting in the PDE.
#[derive(Debug, Clone, PartialEq)]
pub enum RateModel {
    /// The map's UIRP rate `(mu f' + sigma^2/2 f'') / f`.
    Uirp,
    /// `r_** (1 - f(x)/S_*)`.
    Linear { r_star_star: f64 },
    Zero,
    /// Values at the PDE nodes.
    Table(Vec<f64>),
}

impl RateModel {
    fn sample(&self, map: &FxMap, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            RateModel::Uirp => x.iter().map(|&v| map.uirp_rate(v)).collect(),
            RateModel::Linear { r_star_star } => {
                let s = map.zone().s_star();
                x.iter().map(|&v| Ok(r_star_star * (1.0 - map.value(v)? / s))).collect()
            }
            RateModel::Zero => Ok(vec![0.0; x.len()]),
            RateModel::Table(t) => {
                if t.len() != x.len() {
                    return Err(Error::param("rate table", format!("need {} values, got {}", x.len(), t.len())));
                }
                Ok(t.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Space nodes on `[-L, L]`, odd.
    pub nx: usize,
    /// Time steps from `t0` to maturity.
    pub nt: usize,
    /// Replace the first Crank-Nicolson step by two implicit half-steps.
    pub rannacher: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            nx: 1001,
            nt: 1000,
            rannacher: true,
        }
    }
}

/// Full space-time solution, `v[k]` the slice at `t[k]` (ascending in time).
#[derive(Debug, Clone)]
pub struct PricingGrid {
    x: Vec<f64>,
    t: Vec<f64>,
    v: Vec<Vec<f64>>,
    scheme: GridSpec,
}

impl PricingGrid {
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn slice(&self, k: usize) -> &[f64] {
        &self.v[k]
    }

    /// Prices at the valuation time `t0`.
    pub fn initial(&self) -> &[f64] {
        &self.v[0]
    }

    pub fn scheme(&self) -> GridSpec {
        self.scheme
    }

    /// `v(x, t0)` by linear interpolation.
    pub fn value_at(&self, x: f64) -> f64 {
        interp(&self.x, &self.v[0], x)
    }

    /// Largest one-sided boundary slope over all slices, relative to `max |v|`.
    pub fn neumann_defect(&self) -> f64 {
        let n = self.x.len();
        let mut worst = 0.0_f64;
        let mut scale = 0.0_f64;
        for v in &self.v {
            scale = v.iter().fold(scale, |m, a| m.max(a.abs()));
            let lo = slope_left(&self.x[..3], &v[..3]);
            let hi = slope_right(&self.x[n - 3..], &v[n - 3..]);
            worst = worst.max(lo.abs()).max(hi.abs());
        }
        worst / scale.max(f64::MIN_POSITIVE)
    }
}

/// Solves `v_t + mu v_x + sigma^2/2 v_xx - r v = 0` backward from `v(., T) = Y`
/// to `t0` with central differences, ghost-node Neumann closure and
/// Crank-Nicolson in time. Drift and `sigma` are the map's.
pub fn price_pde(claim: &ClaimSpec, map: &FxMap, rate: &RateModel, t0: f64, grid: GridSpec) -> Result<PricingGrid> {
    let tau = claim.maturity - t0;
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::param("t0", format!("need t0 <= maturity, got t0 = {t0}, T = {}", claim.maturity)));
    }
    if grid.nt == 0 {
        return Err(Error::param("nt", "need at least one time step"));
    }
    claim.check_neumann(map)?;
    let l = map.half_width();
    let x = symmetric_grid(l, grid.nx)?;
    let n = x.len();
    let dx = x[1] - x[0];
    let sigma = map.sigma();
    let s2 = sigma * sigma;
    let mu = x.iter().map(|&v| map.drift().eval(sigma, v)).collect::<Result<Vec<f64>>>()?;
    let max_mu = mu.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if max_mu * dx > s2 {
        return Err(Error::Peclet {
            cell_peclet: max_mu * dx / s2,
            limit: 1.0,
            suggested_dx: s2 / max_mu,
        });
    }
    let r = rate.sample(map, &x)?;

    // A v = a v_{j-1} + b v_j + c v_{j+1}
    let d = 0.5 * s2 / (dx * dx);
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut c = vec![0.0; n];
    for j in 0..n {
        b[j] = -2.0 * d - r[j];
        if j == 0 {
            c[j] = 2.0 * d;
        } else if j == n - 1 {
            a[j] = 2.0 * d;
        } else {
            a[j] = d - mu[j] / (2.0 * dx);
            c[j] = d + mu[j] / (2.0 * dx);
        }
    }
    let apply = |v: &[f64], out: &mut [f64], w: f64| {
        for j in 0..n {
            let mut acc = b[j] * v[j];
            if j > 0 {
                acc += a[j] * v[j - 1];
            }
            if j + 1 < n {
                acc += c[j] * v[j + 1];
            }
            out[j] = v[j] + w * acc;
        }
    };
    let implicit = |w: f64| {
        let lower: Vec<f64> = a.iter().map(|v| -w * v).collect();
        let diag: Vec<f64> = b.iter().map(|v| 1.0 - w * v).collect();
        let upper: Vec<f64> = c.iter().map(|v| -w * v).collect();
        (lower, diag, upper)
    };

    let dt = tau / grid.nt as f64;
    // also the backward-Euler matrix for a half step
    let cn = implicit(0.5 * dt);
    let mut scratch = Vec::with_capacity(n);
    let mut slices = Vec::with_capacity(grid.nt + 1);
    let mut v = claim.sample(map, &x)?;
    slices.push(v.clone());
    let mut rhs = vec![0.0; n];
    for step in 0..grid.nt {
        if step == 0 && grid.rannacher {
            for _ in 0..2 {
                solve_tridiagonal(&cn.0, &cn.1, &cn.2, &mut v, &mut scratch);
            }
        } else {
            apply(&v, &mut rhs, 0.5 * dt);
            solve_tridiagonal(&cn.0, &cn.1, &cn.2, &mut rhs, &mut scratch);
            std::mem::swap(&mut v, &mut rhs);
        }
        slices.push(v.clone());
    }
    slices.reverse();
    let t = (0..=grid.nt).map(|k| t0 + k as f64 * dt).collect();
    Ok(PricingGrid {
        x,
        t,
        v: slices,
        scheme: grid,
    })
}
