//! Seeded Monte Carlo of the band coordinate and everything read off its paths.
//!
//! Path `i` draws from ChaCha8 stream `i` of the run seed, so a path never
//! depends on how many other paths are simulated or on the thread count.
//! `TZLAB_THREADS` caps the worker pool.

mod diagnostics;
mod intervention;
mod swings;

pub use diagnostics::{
    carry_accrual, carry_strategy_pnl, martingale_check, z_drift, CarryReport, MartingaleReport,
};
pub use intervention::{simulate_intervention, InterventionRun};
pub use swings::{count_swings, market_maker_two_state, swing_count, SwingStats, TwoStateReport};

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fxmap::FxMap;
use crate::model::{DriftSpec, PegKind, PegSpec, ProcessParams};

/// Mean and standard error of independent samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let se = if n > 1 {
            let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            f64::NAN
        };
        Self { mean, se, n }
    }

    /// `mean / se`; infinite when every sample agrees and the mean is nonzero.
    pub fn z_score(&self) -> f64 {
        self.mean / self.se
    }
}

pub(crate) fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var("TZLAB_THREADS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
    })
}

pub(crate) fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

/// Folds `x` back into `[-L, L]`; returns the number of folds at each edge.
pub(crate) fn fold(mut x: f64, l: f64) -> (f64, [u32; 2]) {
    let mut hits = [0u32; 2];
    loop {
        if x > l {
            x = 2.0 * l - x;
            hits[1] += 1;
        } else if x < -l {
            x = -2.0 * l - x;
            hits[0] += 1;
        } else {
            return (x, hits);
        }
    }
}

/// One simulated trajectory sampled at `times`.
#[derive(Debug, Clone, Copy)]
pub struct PathView<'a> {
    pub id: usize,
    pub x: &'a [f64],
    pub s: &'a [f64],
    pub r: &'a [f64],
    /// Reflections at `[-L, +L]`.
    pub boundary_hits: [u32; 2],
}

/// Recorded ensemble, rows indexed by path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    times: Vec<f64>,
    x: Vec<f64>,
    s: Vec<f64>,
    r: Vec<f64>,
    boundary_hits: Vec<[u32; 2]>,
    params: ProcessParams,
    s_star: f64,
    half_width: f64,
}

impl PathSet {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn params(&self) -> &ProcessParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.params.seed
    }

    pub fn n_paths(&self) -> usize {
        self.boundary_hits.len()
    }

    pub fn s_star(&self) -> f64 {
        self.s_star
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn path(&self, i: usize) -> PathView<'_> {
        let w = self.times.len();
        let span = i * w..(i + 1) * w;
        PathView {
            id: i,
            x: &self.x[span.clone()],
            s: &self.s[span.clone()],
            r: &self.r[span],
            boundary_hits: self.boundary_hits[i],
        }
    }

    pub fn paths(&self) -> impl Iterator<Item = PathView<'_>> {
        (0..self.n_paths()).map(move |i| self.path(i))
    }

    /// Applies `f` to every path in parallel; results come back in path order.
    pub fn map_paths<T: Send>(&self, f: impl Fn(&PathView) -> T + Sync) -> Vec<T> {
        pool().install(|| (0..self.n_paths()).into_par_iter().map(|i| f(&self.path(i))).collect())
    }
}

/// How the differential rate is read off the path.
#[derive(Debug, Clone, Copy, PartialEq)]
enum RateRule {
    /// `(mu f' + sigma^2/2 f'') / f` from the map.
    Uirp,
    /// `r_** (1 - S/S_*)`.
    Linear(f64),
}

/// Euler-Maruyama for `dX = mu(X) dt + sigma dW` with fold reflection at `±L`.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    params: ProcessParams,
    drift: DriftSpec,
    map: &'a FxMap,
    rule: RateRule,
    x0: f64,
}

impl<'a> Simulator<'a> {
    /// `peg` fixes the rate path: the map's UIRP rate for the no-arbitrage peg,
    /// which needs the map to be built from the same `sigma` and drift.
    pub fn new(params: ProcessParams, drift: &DriftSpec, map: &'a FxMap, peg: &PegSpec) -> Result<Self> {
        params.validate()?;
        let l = map.half_width();
        drift.validate(l)?;
        if matches!(drift, DriftSpec::InterventionStep { .. }) {
            return Err(Error::Unsupported(
                "intervention drift runs on the whole line; use simulate_intervention".into(),
            ));
        }
        let bound = 0.5 * l;
        if params.sigma * params.dt.sqrt() > bound {
            return Err(Error::StepTooLarge {
                bound: format!(
                    "sigma*sqrt(dt) = {} exceeds L/2 = {bound}; use dt <= {}",
                    params.sigma * params.dt.sqrt(),
                    (bound / params.sigma).powi(2)
                ),
            });
        }
        let rule = match peg.kind {
            PegKind::NoArbitrage => {
                let same_sigma = (map.sigma() - params.sigma).abs() <= 1e-12 * params.sigma;
                if !same_sigma || map.drift() != drift {
                    return Err(Error::param(
                        "peg",
                        "the no-arbitrage rate needs a map built from the simulated sigma and drift",
                    ));
                }
                RateRule::Uirp
            }
            PegKind::Linear { r_star_star } => RateRule::Linear(r_star_star),
        };
        Ok(Self {
            params,
            drift: drift.clone(),
            map,
            rule,
            x0: 0.0,
        })
    }

    /// Starting point of every path (default 0).
    pub fn with_start(mut self, x0: f64) -> Result<Self> {
        let l = self.map.half_width();
        if !(x0.abs() <= l) {
            return Err(Error::Domain {
                what: "starting point x0",
                value: x0,
                lo: -l,
                hi: l,
            });
        }
        self.x0 = x0;
        Ok(self)
    }

    /// Starts every path at the band coordinate of FX rate `s0`.
    pub fn with_start_rate(self, s0: f64) -> Result<Self> {
        let x0 = self.map.invert(s0)?;
        self.with_start(x0)
    }

    pub fn params(&self) -> &ProcessParams {
        &self.params
    }

    pub fn map(&self) -> &FxMap {
        self.map
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.params.n_steps()).map(|k| k as f64 * self.params.dt).collect()
    }

    fn rate(&self, x: f64, s: f64) -> Result<f64> {
        match self.rule {
            RateRule::Uirp => self.map.uirp_rate(x),
            RateRule::Linear(r) => Ok(r * (1.0 - s / self.map.zone().s_star())),
        }
    }

    fn fill_path(&self, id: usize, x: &mut [f64], s: &mut [f64], r: &mut [f64]) -> Result<[u32; 2]> {
        let mut rng = path_rng(self.params.seed, id);
        let (dt, sigma) = (self.params.dt, self.params.sigma);
        let sq = sigma * dt.sqrt();
        let l = self.map.half_width();
        let mut hits = [0u32; 2];
        x[0] = self.x0;
        for k in 1..x.len() {
            let z: f64 = rng.sample(StandardNormal);
            let prev = x[k - 1];
            let (next, h) = fold(prev + self.drift.eval(sigma, prev)? * dt + sq * z, l);
            hits[0] += h[0];
            hits[1] += h[1];
            x[k] = next;
        }
        for k in 0..x.len() {
            s[k] = self.map.value_unchecked(x[k]);
            r[k] = self.rate(x[k], s[k])?;
        }
        Ok(hits)
    }

    /// Simulates every path without storing the ensemble and returns
    /// `f(path)` in path order.
    pub fn for_each_path<T: Send>(&self, f: impl Fn(&PathView) -> T + Sync) -> Result<Vec<T>> {
        let w = self.params.n_steps() + 1;
        pool().install(|| {
            (0..self.params.n_paths)
                .into_par_iter()
                .map_init(
                    || vec![0.0; 3 * w],
                    |buf, id| {
                        let (x, rest) = buf.split_at_mut(w);
                        let (s, r) = rest.split_at_mut(w);
                        let hits = self.fill_path(id, x, s, r)?;
                        Ok(f(&PathView {
                            id,
                            x,
                            s,
                            r,
                            boundary_hits: hits,
                        }))
                    },
                )
                .collect()
        })
    }

    /// Simulates and records the whole ensemble.
    pub fn run(&self) -> Result<PathSet> {
        let rows = self.for_each_path(|p| (p.x.to_vec(), p.s.to_vec(), p.r.to_vec(), p.boundary_hits))?;
        let mut ps = PathSet {
            times: self.times(),
            x: Vec::new(),
            s: Vec::new(),
            r: Vec::new(),
            boundary_hits: Vec::with_capacity(rows.len()),
            params: self.params,
            s_star: self.map.zone().s_star(),
            half_width: self.map.half_width(),
        };
        for (x, s, r, h) in rows {
            ps.x.extend(x);
            ps.s.extend(s);
            ps.r.extend(r);
            ps.boundary_hits.push(h);
        }
        Ok(ps)
    }
}

/// Simulates and records reflected paths; see [`Simulator`].
pub fn simulate_reflected(params: ProcessParams, drift: &DriftSpec, map: &FxMap, peg: &PegSpec) -> Result<PathSet> {
    Simulator::new(params, drift, map, peg)?.run()
}
