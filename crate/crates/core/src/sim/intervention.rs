use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{path_rng, pool, PathSet};
use crate::eigen::InterventionSolution;
use crate::error::{Error, Result};
use crate::model::{ProcessParams, TargetZone};

/// Whole-line paths under the intervention drift with per-path excursion statistics.
#[derive(Debug, Clone)]
pub struct InterventionRun {
    /// `max_t (|X_t| - L)^+` per path.
    pub max_excursion: Vec<f64>,
    /// Fraction of steps spent with `|X| > L`, per path.
    pub outside_fraction: Vec<f64>,
    /// Recorded paths with `S = S_* (1 + gamma h(X))` and the linear peg at `r_* = E_1`.
    pub paths: Option<PathSet>,
}

impl InterventionRun {
    pub fn mean_excursion(&self) -> f64 {
        self.max_excursion.iter().sum::<f64>() / self.max_excursion.len() as f64
    }

    pub fn mean_outside_fraction(&self) -> f64 {
        self.outside_fraction.iter().sum::<f64>() / self.outside_fraction.len() as f64
    }

    /// Paths that ever went beyond `L + margin` on either side.
    pub fn escapes(&self, margin: f64) -> usize {
        self.max_excursion.iter().filter(|&&e| e > margin).count()
    }
}

/// Euler-Maruyama on the real line with drift `±xi sigma^2` outside the band.
/// Besides `sigma sqrt(dt) <= L/2` the push-back step must obey `xi sigma^2 dt <= L/2`.
pub fn simulate_intervention(
    params: ProcessParams,
    solution: &InterventionSolution,
    zone: &TargetZone,
    record: bool,
) -> Result<InterventionRun> {
    params.validate()?;
    let l = zone.half_width();
    let drift = solution.eigen().drift().clone();
    drift.validate(l)?;
    if (solution.eigen().half_width() - l).abs() > 1e-9 * l {
        return Err(Error::param("zone", "intervention solution and zone disagree on L"));
    }
    let (sigma, dt) = (params.sigma, params.dt);
    let kick = solution.xi() * sigma * sigma * dt;
    if sigma * dt.sqrt() > 0.5 * l || kick > 0.5 * l {
        return Err(Error::StepTooLarge {
            bound: format!(
                "need sigma*sqrt(dt) <= L/2 and xi*sigma^2*dt <= L/2, got {} and {kick}; use dt <= {}",
                sigma * dt.sqrt(),
                (0.5 * l / (solution.xi() * sigma * sigma)).min((0.5 * l / sigma).powi(2))
            ),
        });
    }
    let n = params.n_steps();
    let w = n + 1;
    let (s_star, gamma, r_star) = (zone.s_star(), zone.gamma(), solution.e1());
    let sq = sigma * dt.sqrt();

    let rows = pool().install(|| {
        (0..params.n_paths)
            .into_par_iter()
            .map(|id| -> Result<(f64, f64, Option<Vec<f64>>)> {
                let mut rng = path_rng(params.seed, id);
                let mut x = 0.0;
                let mut worst = 0.0_f64;
                let mut outside = 0usize;
                let mut trace = record.then(|| {
                    let mut v = Vec::with_capacity(w);
                    v.push(0.0);
                    v
                });
                for _ in 0..n {
                    let z: f64 = rng.sample(StandardNormal);
                    x += drift.eval(sigma, x)? * dt + sq * z;
                    let excess = x.abs() - l;
                    if excess > 0.0 {
                        outside += 1;
                        worst = worst.max(excess);
                    }
                    if let Some(t) = trace.as_mut() {
                        t.push(x);
                    }
                }
                Ok((worst, outside as f64 / n as f64, trace))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut run = InterventionRun {
        max_excursion: Vec::with_capacity(rows.len()),
        outside_fraction: Vec::with_capacity(rows.len()),
        paths: None,
    };
    let mut xs = Vec::new();
    for (e, o, t) in rows {
        run.max_excursion.push(e);
        run.outside_fraction.push(o);
        if let Some(t) = t {
            xs.extend(t);
        }
    }
    if record {
        let s: Vec<f64> = xs.iter().map(|&x| s_star * (1.0 + gamma * solution.h_at(x))).collect();
        let r = s.iter().map(|&v| r_star * (1.0 - v / s_star)).collect();
        run.paths = Some(PathSet {
            times: (0..w).map(|k| k as f64 * dt).collect(),
            boundary_hits: vec![[0, 0]; params.n_paths],
            x: xs,
            s,
            r,
            params,
            s_star,
            half_width: l,
        });
    }
    Ok(run)
}
