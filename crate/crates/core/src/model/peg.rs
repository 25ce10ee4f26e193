use crate::error::{Error, Result};
use crate::model::TargetZone;

/// How the differential rate `r = r_f - r_d` is tied to the observed FX rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PegKind {
    /// `r = r_* (1 - s/S_*)` with `r_*` the UIRP-consistent eigenvalue.
    NoArbitrage,
    /// `r = r_** (1 - s/S_*)` with an externally chosen scale, possibly below `r_*`.
    Linear { r_star_star: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PegSpec {
    pub kind: PegKind,
    pub s_star: f64,
}

impl PegSpec {
    pub fn no_arbitrage(zone: &TargetZone) -> Self {
        Self {
            kind: PegKind::NoArbitrage,
            s_star: zone.s_star(),
        }
    }

    pub fn linear(zone: &TargetZone, r_star_star: f64) -> Result<Self> {
        if !r_star_star.is_finite() {
            return Err(Error::param("r_star_star", format!("must be finite, got {r_star_star}")));
        }
        Ok(Self {
            kind: PegKind::Linear { r_star_star },
            s_star: zone.s_star(),
        })
    }

    /// Rate scale actually applied: `r_**` for a linear peg, `fallback_r_star` otherwise.
    pub fn scale(&self, fallback_r_star: f64) -> f64 {
        match self.kind {
            PegKind::NoArbitrage => fallback_r_star,
            PegKind::Linear { r_star_star } => r_star_star,
        }
    }

    /// Differential rate at FX rate `s`; `s` must lie inside the band.
    pub fn rate(&self, zone: &TargetZone, s: f64, fallback_r_star: f64) -> Result<f64> {
        zone.check_rate(s)?;
        Ok(self.scale(fallback_r_star) * (1.0 - s / self.s_star))
    }
}

/// Differential rate for peg `peg`; see [`PegSpec::rate`].
pub fn rho_eval(peg: &PegSpec, zone: &TargetZone, s: f64, fallback_r_star: f64) -> Result<f64> {
    peg.rate(zone, s, fallback_r_star)
}

/// Deterministic domestic short rate (continuously compounded, per year).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEnv {
    pub r_domestic: f64,
}

impl RateEnv {
    pub fn new(r_domestic: f64) -> Result<Self> {
        if !r_domestic.is_finite() {
            return Err(Error::param("r_domestic", format!("must be finite, got {r_domestic}")));
        }
        Ok(Self { r_domestic })
    }

    /// Domestic cash bond ratio `B_d(t) / B_d(T)`.
    pub fn discount(&self, t: f64, maturity: f64) -> f64 {
        (-self.r_domestic * (maturity - t)).exp()
    }
}
