use rand::Rng;
use rayon::prelude::*;

use super::{path_rng, pool, PathSet};
use crate::error::{Error, Result};
use crate::model::TargetZone;

/// Fraction of the half-width counted as "at the boundary".
const EDGE_BAND: f64 = 0.01;

/// Boundary-to-boundary traversals of one path.
///
/// A hit is an entry into `|x| >= 0.99 L`. The starting point only fixes the
/// initial side; afterwards every hit on the side opposite to the previous one
/// counts, and so does the first hit of a path that starts inside.
pub fn swing_count(x: &[f64], half_width: f64) -> usize {
    let edge = (1.0 - EDGE_BAND) * half_width;
    let side_of = |v: f64| {
        if v >= edge {
            1
        } else if v <= -edge {
            -1
        } else {
            0
        }
    };
    let Some((&first, rest)) = x.split_first() else {
        return 0;
    };
    let mut side = side_of(first);
    let mut count = 0;
    for &v in rest {
        let s = side_of(v);
        if s != 0 && s != side {
            count += 1;
            side = s;
        }
    }
    count
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwingStats {
    /// Swing count per path.
    pub k: Vec<usize>,
    /// `sigma sqrt(T) / L`.
    pub beta: f64,
    /// `beta^2`, the swing count implied by the volatility.
    pub k_implied: f64,
    pub median_k: f64,
    /// `L sqrt(median K) / (sigma sqrt(T))`; near 1 when the footnote rule holds.
    pub vol_ratio: f64,
}

impl SwingStats {
    pub fn from_counts(k: Vec<usize>, sigma: f64, horizon: f64, half_width: f64) -> Self {
        let beta = sigma * horizon.sqrt() / half_width;
        let mut sorted = k.clone();
        sorted.sort_unstable();
        let n = sorted.len();
        let median_k = if n == 0 {
            0.0
        } else if n % 2 == 1 {
            sorted[n / 2] as f64
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) as f64
        };
        Self {
            k,
            beta,
            k_implied: beta * beta,
            median_k,
            vol_ratio: median_k.sqrt() / beta,
        }
    }
}

pub fn count_swings(ps: &PathSet) -> SwingStats {
    let l = ps.half_width();
    let k = ps.map_paths(|p| swing_count(p.x, l));
    SwingStats::from_counts(k, ps.params().sigma, ps.params().horizon, l)
}

/// Market maker quoting only the band edges: `S` sits at `S_-` or `S_+` and
/// flips each day with probability `p_flip`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStateReport {
    /// Daily FX rates, one row per path.
    pub paths: Vec<Vec<f64>>,
    pub swings: Vec<usize>,
    /// `K L^2 / (T - 1)` with `L = S_+ - S_*`, per path.
    pub daily_variance: Vec<f64>,
    /// `sqrt(T * daily variance)`, which tends to `L sqrt(K)`.
    pub annualized_vol: Vec<f64>,
}

impl TwoStateReport {
    pub fn mean_annualized_vol(&self) -> f64 {
        self.annualized_vol.iter().sum::<f64>() / self.annualized_vol.len() as f64
    }
}

pub fn market_maker_two_state(p_flip: f64, days: usize, zone: &TargetZone, seed: u64, n_paths: usize) -> Result<TwoStateReport> {
    if !(0.0..=1.0).contains(&p_flip) {
        return Err(Error::Domain {
            what: "p_flip",
            value: p_flip,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if days < 2 {
        return Err(Error::param("days", format!("need at least 2, got {days}")));
    }
    if n_paths == 0 {
        return Err(Error::param("n_paths", "must be at least 1"));
    }
    let half = zone.s_plus() - zone.s_star();
    let paths: Vec<Vec<f64>> = pool().install(|| {
        (0..n_paths)
            .into_par_iter()
            .map(|id| {
                let mut rng = path_rng(seed, id);
                let mut up = rng.random_bool(0.5);
                (0..days)
                    .map(|d| {
                        if d > 0 && rng.random_bool(p_flip) {
                            up = !up;
                        }
                        if up {
                            zone.s_plus()
                        } else {
                            zone.s_minus()
                        }
                    })
                    .collect()
            })
            .collect()
    });
    let s_star = zone.s_star();
    let swings: Vec<usize> = paths
        .iter()
        .map(|p| {
            let x: Vec<f64> = p.iter().map(|&s| (s - s_star) / half).collect();
            swing_count(&x, 1.0)
        })
        .collect();
    let t = days as f64;
    let daily_variance: Vec<f64> = swings.iter().map(|&k| k as f64 * half * half / (t - 1.0)).collect();
    let annualized_vol = daily_variance.iter().map(|v| (t * v).sqrt()).collect();
    Ok(TwoStateReport {
        paths,
        swings,
        daily_variance,
        annualized_vol,
    })
}
