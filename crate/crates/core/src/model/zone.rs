use crate::error::{Error, Result};

/// Upper limit of the small-gamma regime.
pub const GAMMA_LIMIT: f64 = 0.2;
const GAMMA_WARN: f64 = 0.05;

/// Symmetric target zone `[s_minus, s_plus]` around the reference rate `s_star`,
/// with the underlying coordinate confined to `[-half_width, half_width]`.
///
/// Rates are quoted as foreign currency per one unit of domestic currency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetZone {
    s_minus: f64,
    s_plus: f64,
    s_star: f64,
    half_width: f64,
    gamma: f64,
}

impl TargetZone {
    /// Validates raw band parameters and computes the relative half-width.
    pub fn new(s_minus: f64, s_plus: f64, s_star: f64, half_width: f64) -> Result<Self> {
        for (name, v) in [
            ("s_minus", s_minus),
            ("s_plus", s_plus),
            ("s_star", s_star),
            ("half_width", half_width),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, format!("must be finite, got {v}")));
            }
        }
        if !(s_minus > 0.0 && s_minus < s_star && s_star < s_plus) {
            return Err(Error::param(
                "s_minus/s_star/s_plus",
                format!("require 0 < s_minus < s_star < s_plus, got {s_minus}, {s_star}, {s_plus}"),
            ));
        }
        if half_width <= 0.0 {
            return Err(Error::param("half_width", format!("must be positive, got {half_width}")));
        }
        let upper = s_plus - s_star;
        let lower = s_star - s_minus;
        if (upper - lower).abs() > 1e-12 * s_star {
            return Err(Error::AsymmetricBand { upper, lower });
        }
        let gamma = upper / s_star;
        if gamma >= GAMMA_LIMIT {
            return Err(Error::BandTooWide {
                gamma,
                limit: GAMMA_LIMIT,
            });
        }
        if gamma > GAMMA_WARN {
            log::warn!("gamma = {gamma:.4} is above {GAMMA_WARN}; leading-order band results lose accuracy");
        }
        Ok(Self {
            s_minus,
            s_plus,
            s_star,
            half_width,
            gamma,
        })
    }

    /// The USD/HKD band 7.75 / 7.80 / 7.85 on the unit coordinate interval.
    pub fn hkd() -> Self {
        Self::new(7.75, 7.85, 7.80, 1.0).expect("HKD band is valid")
    }

    pub fn s_minus(&self) -> f64 {
        self.s_minus
    }

    pub fn s_plus(&self) -> f64 {
        self.s_plus
    }

    pub fn s_star(&self) -> f64 {
        self.s_star
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Whether `s` lies in the closed band, allowing a relative slack of `1e-12`.
    pub fn contains(&self, s: f64) -> bool {
        let slack = 1e-12 * self.s_star;
        s >= self.s_minus - slack && s <= self.s_plus + slack
    }

    pub(crate) fn check_rate(&self, s: f64) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "fx rate",
                value: s,
                lo: self.s_minus,
                hi: self.s_plus,
            })
        }
    }
}

/// Validates raw band parameters; see [`TargetZone::new`].
pub fn validate_zone(s_minus: f64, s_plus: f64, s_star: f64, half_width: f64) -> Result<TargetZone> {
    TargetZone::new(s_minus, s_plus, s_star, half_width)
}
