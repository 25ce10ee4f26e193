use crate::error::{Error, Result};

/// Monte Carlo settings for `dX = sigma dW + mu(X) dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessParams {
    pub sigma: f64,
    pub dt: f64,
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
}

impl ProcessParams {
    pub fn new(sigma: f64, dt: f64, horizon: f64, n_paths: usize, seed: u64) -> Result<Self> {
        let p = Self {
            sigma,
            dt,
            horizon,
            n_paths,
            seed,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::param("sigma", format!("must be positive, got {}", self.sigma)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.horizon.is_finite() && self.dt <= self.horizon) {
            return Err(Error::param(
                "horizon",
                format!("need dt <= horizon, got dt = {}, horizon = {}", self.dt, self.horizon),
            ));
        }
        if self.n_paths == 0 {
            return Err(Error::param("n_paths", "must be at least 1"));
        }
        Ok(())
    }

    /// Number of time steps; the horizon is rounded to a whole number of steps.
    pub fn n_steps(&self) -> usize {
        (self.horizon / self.dt).round().max(1.0) as usize
    }
}
