use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Orientation of a drift relative to the band edges.
///
/// `Momentum` (ε = +1) pushes the coordinate toward the boundaries,
/// `MeanReverting` (ε = −1) pulls it back toward the centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    MeanReverting,
    Momentum,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::MeanReverting => -1.0,
            Direction::Momentum => 1.0,
        }
    }

    pub fn from_sign(epsilon: i64) -> Result<Self> {
        match epsilon {
            1 => Ok(Direction::Momentum),
            -1 => Ok(Direction::MeanReverting),
            other => Err(Error::param("epsilon", format!("must be +1 or -1, got {other}"))),
        }
    }
}

/// Which one-sided limit to take at a point where the drift has a kink or jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Drift `mu(x)` of the band coordinate.
///
/// Parameters typed as magnitudes (`alpha`, `nu`, `xi`) are positive; the
/// orientation lives in [`Direction`]. Drifts written as `nu * sigma^2 * ...`
/// take `sigma` at evaluation time so `nu` keeps units of inverse length.
#[derive(Debug, Clone, PartialEq)]
pub enum DriftSpec {
    Zero,
    /// `mu = eps * alpha * x`
    Linear { alpha: f64, direction: Direction },
    /// `mu = eps * nu * sigma^2 * sign(x)`
    Sign { nu: f64, direction: Direction },
    /// `mu = nu * sigma^2 * tanh(nu x)`
    Tanh { nu: f64 },
    /// `mu = -nu * sigma^2 * tan(nu x)`
    Tan { nu: f64 },
    /// Zero inside `(-barrier, barrier)`, `+xi sigma^2` below and `-xi sigma^2` above.
    InterventionStep { xi: f64, barrier: f64 },
    Tabulated(TabulatedDrift),
}

/// A delta-function term `weight * delta(x - location)` of a potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTerm {
    pub location: f64,
    pub weight: f64,
}

/// Pointwise potential plus its distributional part.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialValue {
    pub value: f64,
    pub deltas: Vec<DeltaTerm>,
}

impl DriftSpec {
    /// Checks parameter invariants against the band half-width `half_width`.
    pub fn validate(&self, half_width: f64) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be positive and finite, got {v}")))
            }
        };
        match self {
            DriftSpec::Zero => Ok(()),
            DriftSpec::Linear { alpha, .. } => positive("alpha", *alpha),
            DriftSpec::Sign { nu, .. } | DriftSpec::Tanh { nu } => positive("nu", *nu),
            DriftSpec::Tan { nu } => {
                positive("nu", *nu)?;
                if nu * half_width >= FRAC_PI_2 {
                    return Err(Error::param(
                        "nu",
                        format!("tan drift needs nu*L < pi/2, got nu*L = {}", nu * half_width),
                    ));
                }
                Ok(())
            }
            DriftSpec::InterventionStep { xi, barrier } => {
                positive("xi", *xi)?;
                positive("barrier", *barrier)?;
                let xl = xi * barrier;
                if xl < 5.0 {
                    return Err(Error::param(
                        "xi",
                        format!("intervention needs xi*L >= 5, got {xl}"),
                    ));
                }
                if xl < 20.0 {
                    log::warn!("xi*L = {xl} is below 20; large-xi asymptotics are rough");
                }
                Ok(())
            }
            DriftSpec::Tabulated(t) => {
                let (lo, hi) = (t.x[0], t.x[t.x.len() - 1]);
                if lo > -half_width || hi < half_width {
                    return Err(Error::param(
                        "tabulated drift",
                        format!("grid [{lo}, {hi}] does not cover [-{half_width}, {half_width}]"),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Drift value `mu(x)`.
    pub fn eval(&self, sigma: f64, x: f64) -> Result<f64> {
        let s2 = sigma * sigma;
        Ok(match self {
            DriftSpec::Zero => 0.0,
            DriftSpec::Linear { alpha, direction } => direction.sign() * alpha * x,
            DriftSpec::Sign { nu, direction } => direction.sign() * nu * s2 * signum(x),
            DriftSpec::Tanh { nu } => nu * s2 * (nu * x).tanh(),
            DriftSpec::Tan { nu } => {
                check_tan_domain(*nu, x)?;
                -nu * s2 * (nu * x).tan()
            }
            DriftSpec::InterventionStep { xi, barrier } => xi * s2 * (heaviside(-x - barrier) - heaviside(x - barrier)),
            DriftSpec::Tabulated(t) => t.value(x),
        })
    }

    /// Pointwise derivative `mu'(x)`; at a kink the `side` limit is returned.
    /// Delta contributions of jumps are not included (see [`DriftSpec::deltas`]).
    pub fn slope(&self, sigma: f64, x: f64, side: Side) -> Result<f64> {
        let s2 = sigma * sigma;
        Ok(match self {
            DriftSpec::Zero | DriftSpec::Sign { .. } | DriftSpec::InterventionStep { .. } => 0.0,
            DriftSpec::Linear { alpha, direction } => direction.sign() * alpha,
            DriftSpec::Tanh { nu } => {
                let c = (nu * x).cosh();
                nu * nu * s2 / (c * c)
            }
            DriftSpec::Tan { nu } => {
                check_tan_domain(*nu, x)?;
                let c = (nu * x).cos();
                -nu * nu * s2 / (c * c)
            }
            DriftSpec::Tabulated(t) => t.slope(x, side),
        })
    }

    /// `integral_a^b mu(y) dy`, exact for every catalog drift.
    pub fn integral(&self, sigma: f64, a: f64, b: f64) -> Result<f64> {
        let s2 = sigma * sigma;
        Ok(match self {
            DriftSpec::Zero => 0.0,
            DriftSpec::Linear { alpha, direction } => direction.sign() * alpha * 0.5 * (b * b - a * a),
            DriftSpec::Sign { nu, direction } => direction.sign() * nu * s2 * (b.abs() - a.abs()),
            DriftSpec::Tanh { nu } => s2 * (ln_cosh(nu * b) - ln_cosh(nu * a)),
            DriftSpec::Tan { nu } => {
                check_tan_domain(*nu, a)?;
                check_tan_domain(*nu, b)?;
                s2 * ((nu * b).cos().ln() - (nu * a).cos().ln())
            }
            DriftSpec::InterventionStep { xi, barrier } => {
                // antiderivatives of the two step functions
                let below = |u: f64| u.min(-barrier);
                let above = |u: f64| (u - barrier).max(0.0);
                xi * s2 * ((below(b) - below(a)) - (above(b) - above(a)))
            }
            DriftSpec::Tabulated(t) => t.integral(b) - t.integral(a),
        })
    }

    /// Locations where the drift or its derivative is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            DriftSpec::Sign { .. } => vec![0.0],
            DriftSpec::InterventionStep { barrier, .. } => vec![-barrier, *barrier],
            DriftSpec::Tabulated(t) => t.x.clone(),
            _ => Vec::new(),
        }
    }

    /// Whether `mu(-x) = -mu(x)`.
    pub fn is_odd(&self) -> bool {
        match self {
            DriftSpec::Tabulated(t) => t.is_odd(),
            _ => true,
        }
    }

    /// `sup |mu|` over `[-half_width, half_width]`.
    pub fn max_abs(&self, sigma: f64, half_width: f64) -> Result<f64> {
        let s2 = sigma * sigma;
        Ok(match self {
            DriftSpec::Zero => 0.0,
            DriftSpec::Linear { alpha, .. } => alpha * half_width,
            DriftSpec::Sign { nu, .. } => nu * s2,
            DriftSpec::Tanh { nu } => nu * s2 * (nu * half_width).tanh(),
            DriftSpec::Tan { nu } => {
                check_tan_domain(*nu, half_width)?;
                nu * s2 * (nu * half_width).tan()
            }
            DriftSpec::InterventionStep { .. } => 0.0,
            DriftSpec::Tabulated(t) => t
                .x
                .iter()
                .zip(&t.mu)
                .filter(|(x, _)| x.abs() <= half_width)
                .map(|(_, m)| m.abs())
                .fold(t.value(half_width).abs().max(t.value(-half_width).abs()), f64::max),
        })
    }

    /// Distributional part of the potential `mu^2/(2 sigma^2) + mu'/2`: half of every jump in `mu`.
    pub fn deltas(&self, sigma: f64) -> Vec<DeltaTerm> {
        let s2 = sigma * sigma;
        match self {
            DriftSpec::Sign { nu, direction } => vec![DeltaTerm {
                location: 0.0,
                weight: direction.sign() * nu * s2,
            }],
            DriftSpec::InterventionStep { xi, barrier } => vec![
                DeltaTerm {
                    location: -barrier,
                    weight: -0.5 * xi * s2,
                },
                DeltaTerm {
                    location: *barrier,
                    weight: -0.5 * xi * s2,
                },
            ],
            _ => Vec::new(),
        }
    }

    /// Pointwise potential `V(x) = mu^2/(2 sigma^2) + mu'/2`.
    pub fn potential(&self, sigma: f64, x: f64, side: Side) -> Result<f64> {
        let mu = match (self, side) {
            // one-sided value of a jump discontinuity
            (DriftSpec::Sign { .. }, _) if x == 0.0 => {
                let probe = if side == Side::Right { 1.0 } else { -1.0 };
                self.eval(sigma, probe)?
            }
            _ => self.eval(sigma, x)?,
        };
        let dmu = self.slope(sigma, x, side)?;
        Ok(mu * mu / (2.0 * sigma * sigma) + 0.5 * dmu)
    }
}

/// Drift value; see [`DriftSpec::eval`].
pub fn drift_eval(drift: &DriftSpec, sigma: f64, x: f64) -> Result<f64> {
    drift.eval(sigma, x)
}

/// Potential at `x` together with the drift's delta-function terms.
pub fn potential_eval(drift: &DriftSpec, sigma: f64, x: f64) -> Result<PotentialValue> {
    Ok(PotentialValue {
        value: drift.potential(sigma, x, Side::Right)?,
        deltas: drift.deltas(sigma),
    })
}

fn signum(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn heaviside(y: f64) -> f64 {
    if y > 0.0 {
        1.0
    } else {
        0.0
    }
}

fn check_tan_domain(nu: f64, x: f64) -> Result<()> {
    let pole = FRAC_PI_2 / nu;
    if x.abs() >= pole {
        Err(Error::Domain {
            what: "x for tan drift",
            value: x,
            lo: -pole,
            hi: pole,
        })
    } else {
        Ok(())
    }
}

fn ln_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Drift given on a strictly increasing grid, linearly interpolated between
/// nodes and held constant beyond the end nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDrift {
    x: Vec<f64>,
    mu: Vec<f64>,
    /// prefix integrals at the nodes
    cumulative: Vec<f64>,
    lipschitz: f64,
}

impl TabulatedDrift {
    pub fn new(x: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        if x.len() != mu.len() {
            return Err(Error::param(
                "tabulated drift",
                format!("{} grid points but {} values", x.len(), mu.len()),
            ));
        }
        if x.len() < 2 {
            return Err(Error::param("tabulated drift", "need at least two nodes"));
        }
        if x.iter().chain(&mu).any(|v| !v.is_finite()) {
            return Err(Error::param("tabulated drift", "grid and values must be finite"));
        }
        if let Some(w) = x.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::param(
                "tabulated drift",
                format!("grid not strictly increasing at index {}", w + 1),
            ));
        }
        let mut cumulative = Vec::with_capacity(x.len());
        cumulative.push(0.0);
        let mut lipschitz: f64 = 0.0;
        for i in 1..x.len() {
            let dx = x[i] - x[i - 1];
            cumulative.push(cumulative[i - 1] + 0.5 * dx * (mu[i] + mu[i - 1]));
            lipschitz = lipschitz.max(((mu[i] - mu[i - 1]) / dx).abs());
        }
        Ok(Self {
            x,
            mu,
            cumulative,
            lipschitz,
        })
    }

    /// Samples `drift` on `grid`.
    pub fn sample(drift: &DriftSpec, sigma: f64, grid: &[f64]) -> Result<Self> {
        let mu = grid.iter().map(|&x| drift.eval(sigma, x)).collect::<Result<Vec<_>>>()?;
        Self::new(grid.to_vec(), mu)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.mu
    }

    /// Largest segment slope, an estimate of the Lipschitz constant.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn segment(&self, x: f64, side: Side) -> usize {
        let n = self.x.len();
        // index i such that x lies in [x_i, x_{i+1}]
        let idx = self.x.partition_point(|&v| v < x);
        let i = match side {
            Side::Right if idx < n && self.x[idx] == x => idx,
            _ => idx.saturating_sub(1),
        };
        i.min(n - 2)
    }

    fn value(&self, x: f64) -> f64 {
        let n = self.x.len();
        if x <= self.x[0] {
            return self.mu[0];
        }
        if x >= self.x[n - 1] {
            return self.mu[n - 1];
        }
        let i = self.segment(x, Side::Left);
        let w = (x - self.x[i]) / (self.x[i + 1] - self.x[i]);
        self.mu[i] + w * (self.mu[i + 1] - self.mu[i])
    }

    fn slope(&self, x: f64, side: Side) -> f64 {
        let n = self.x.len();
        if x < self.x[0] || x > self.x[n - 1] {
            return 0.0;
        }
        if (x == self.x[0] && side == Side::Left) || (x == self.x[n - 1] && side == Side::Right) {
            return 0.0;
        }
        let i = self.segment(x, side);
        (self.mu[i + 1] - self.mu[i]) / (self.x[i + 1] - self.x[i])
    }

    /// `integral_{x_0}^x mu`.
    fn integral(&self, x: f64) -> f64 {
        let n = self.x.len();
        if x <= self.x[0] {
            return self.mu[0] * (x - self.x[0]);
        }
        if x >= self.x[n - 1] {
            return self.cumulative[n - 1] + self.mu[n - 1] * (x - self.x[n - 1]);
        }
        let i = self.segment(x, Side::Left);
        let dx = x - self.x[i];
        let m = self.value(x);
        self.cumulative[i] + 0.5 * dx * (self.mu[i] + m)
    }

    fn is_odd(&self) -> bool {
        let scale = self.mu.iter().fold(0.0_f64, |a, m| a.max(m.abs())).max(1e-300);
        self.x
            .iter()
            .all(|&x| (self.value(-x) + self.value(x)).abs() <= 1e-9 * scale)
    }
}
