//! The monotone FX map `S = f(X)` from the band coordinate to the exchange rate.

mod elliptic;
mod nonlinear;

pub use elliptic::{elliptic_residual, jacobi_sn};
pub use nonlinear::solve_nonlinear;

use crate::eigen::EigenSolution;
use crate::error::{Error, Result};
use crate::model::{DriftSpec, TargetZone};
use crate::numeric::brent;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapSource {
    /// `f = S_* (1 + gamma h)` from the first excited eigenfunction.
    Linearized,
    /// Full UIRP equation with the linear peg, solved by shooting.
    NonlinearOde,
}

impl MapSource {
    pub fn as_str(self) -> &'static str {
        match self {
            MapSource::Linearized => "linearized",
            MapSource::NonlinearOde => "nonlinear_ode",
        }
    }
}

/// `f`, `f'`, `f''` tabulated on a uniform symmetric grid, with cubic Hermite
/// interpolation in between.
#[derive(Debug, Clone)]
pub struct FxMap {
    x: Vec<f64>,
    f: Vec<f64>,
    df: Vec<f64>,
    d2f: Vec<f64>,
    zone: TargetZone,
    source: MapSource,
    r_star: f64,
    sigma: f64,
    drift: DriftSpec,
    lower_edge: Option<[f64; 2]>,
}

/// `f = S_* (1 + gamma h)` with derivatives scaled by `gamma S_*`.
pub fn build_linearized(eigen: &EigenSolution, zone: &TargetZone) -> Result<FxMap> {
    let tol = 1e-9 * zone.half_width();
    if (eigen.half_width() - zone.half_width()).abs() > tol {
        return Err(Error::param(
            "half_width",
            format!(
                "eigen solution covers [-{}, {}] but the zone has L = {}",
                eigen.half_width(),
                eigen.half_width(),
                zone.half_width()
            ),
        ));
    }
    let (s, g) = (zone.s_star(), zone.gamma());
    let f = eigen.h().iter().map(|h| s * (1.0 + g * h)).collect();
    let df = eigen.h_prime().iter().map(|h| s * g * h).collect();
    let d2f = eigen.h_second().iter().map(|h| s * g * h).collect();
    Ok(FxMap {
        x: eigen.x().to_vec(),
        f,
        df,
        d2f,
        zone: *zone,
        source: MapSource::Linearized,
        r_star: eigen.e1(),
        sigma: eigen.sigma(),
        drift: eigen.drift().clone(),
        lower_edge: None,
    })
}

impl FxMap {
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn df(&self) -> &[f64] {
        &self.df
    }

    pub fn d2f(&self) -> &[f64] {
        &self.d2f
    }

    pub fn zone(&self) -> &TargetZone {
        &self.zone
    }

    pub fn source(&self) -> MapSource {
        self.source
    }

    /// Peg scale the map was built with: `E_1` for the linearized map, the
    /// shooting parameter for the nonlinear one.
    pub fn r_star(&self) -> f64 {
        self.r_star
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn drift(&self) -> &DriftSpec {
        &self.drift
    }

    /// `(f(-L) - S_-, f'(-L))` for the nonlinear map, which pins only the upper edge.
    pub fn lower_edge_mismatch(&self) -> Option<[f64; 2]> {
        self.lower_edge
    }

    pub fn half_width(&self) -> f64 {
        self.zone.half_width()
    }

    fn segment(&self, x: f64) -> (usize, f64) {
        let n = self.x.len();
        let dx = self.x[1] - self.x[0];
        let k = (((x - self.x[0]) / dx).floor().max(0.0) as usize).min(n - 2);
        (k, (x - self.x[k]) / (self.x[k + 1] - self.x[k]))
    }

    fn check_x(&self, x: f64) -> Result<()> {
        let l = self.half_width();
        if !(x.abs() <= l * (1.0 + 1e-12)) {
            return Err(Error::Domain {
                what: "band coordinate x",
                value: x,
                lo: -l,
                hi: l,
            });
        }
        Ok(())
    }

    /// `f(x)` by cubic Hermite interpolation of `(f, f')`.
    pub fn value(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        Ok(self.value_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: f64) -> f64 {
        let (k, t) = self.segment(x);
        let d = self.x[k + 1] - self.x[k];
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = h00 * self.f[k] + h10 * d * self.df[k] + h01 * self.f[k + 1] + h11 * d * self.df[k + 1];
        // f is monotone, so each segment stays between its end values; rounding
        // near the flat edges would otherwise step outside the band
        let (lo, hi) = if self.f[k] <= self.f[k + 1] {
            (self.f[k], self.f[k + 1])
        } else {
            (self.f[k + 1], self.f[k])
        };
        v.clamp(lo, hi)
    }

    /// `f'(x)` from the same Hermite cubic.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        let (k, t) = self.segment(x);
        let d = self.x[k + 1] - self.x[k];
        let t2 = t * t;
        let g00 = 6.0 * t2 - 6.0 * t;
        let g10 = 3.0 * t2 - 4.0 * t + 1.0;
        let g01 = -6.0 * t2 + 6.0 * t;
        let g11 = 3.0 * t2 - 2.0 * t;
        Ok((g00 * self.f[k] + g01 * self.f[k + 1]) / d + g10 * self.df[k] + g11 * self.df[k + 1])
    }

    /// `f''(x)` by linear interpolation of the tabulated values.
    pub fn second_derivative(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        let (k, t) = self.segment(x);
        Ok((1.0 - t) * self.d2f[k] + t * self.d2f[k + 1])
    }

    /// Differential rate making `S_t / B_t` a martingale:
    /// `r = (mu f' + sigma^2/2 f'') / f`.
    pub fn uirp_rate(&self, x: f64) -> Result<f64> {
        let mu = self.drift.eval(self.sigma, x)?;
        let num = mu * self.derivative(x)? + 0.5 * self.sigma * self.sigma * self.second_derivative(x)?;
        Ok(num / self.value(x)?)
    }

    /// [`FxMap::uirp_rate`] at every grid node, from the tabulated derivatives.
    pub fn uirp_rate_table(&self) -> Result<Vec<f64>> {
        let s2 = self.sigma * self.sigma;
        (0..self.x.len())
            .map(|i| {
                let mu = self.drift.eval(self.sigma, self.x[i])?;
                Ok((mu * self.df[i] + 0.5 * s2 * self.d2f[i]) / self.f[i])
            })
            .collect()
    }

    /// Largest gap between the UIRP rate and the linear peg `r_* (1 - f/S_*)`
    /// over interior nodes, with `f''` taken by central differences of `f'`.
    pub fn uirp_residual(&self) -> Result<f64> {
        let s2 = self.sigma * self.sigma;
        let s_star = self.zone.s_star();
        let mut worst = 0.0_f64;
        for i in 1..self.x.len() - 1 {
            let d2 = (self.df[i + 1] - self.df[i - 1]) / (self.x[i + 1] - self.x[i - 1]);
            let mu = self.drift.eval(self.sigma, self.x[i])?;
            let rate = (mu * self.df[i] + 0.5 * s2 * d2) / self.f[i];
            worst = worst.max((rate - self.r_star * (1.0 - self.f[i] / s_star)).abs());
        }
        Ok(worst)
    }

    /// Band coordinate `x` with `f(x) = s`, by a bracketed root of the Hermite interpolant.
    pub fn invert(&self, s: f64) -> Result<f64> {
        let (lo, hi) = (self.f[0], self.f[self.f.len() - 1]);
        let slack = 1e-12 * self.zone.s_star();
        if !(s >= lo - slack && s <= hi + slack) {
            return Err(Error::Domain {
                what: "FX rate",
                value: s,
                lo,
                hi,
            });
        }
        if s <= lo {
            return Ok(self.x[0]);
        }
        if s >= hi {
            return Ok(self.x[self.x.len() - 1]);
        }
        let k = self.f.partition_point(|&v| v <= s).saturating_sub(1);
        if self.f[k] == s {
            return Ok(self.x[k]);
        }
        let (a, b) = (self.x[k], self.x[k + 1]);
        brent(|x| self.value_unchecked(x) - s, a, b, 1e-15 * self.half_width(), "map inverse")
    }
}
