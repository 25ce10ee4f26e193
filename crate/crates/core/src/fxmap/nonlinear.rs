use super::{FxMap, MapSource};
use crate::error::{Error, Result};
use crate::model::{DriftSpec, TargetZone};
use crate::numeric::{rk4_along, symmetric_grid};

const MAX_NEWTON: usize = 60;

/// Right-hand side for `u = f/S_* - 1`:
/// `sigma^2/2 u'' + mu u' + r u (1 + u) = 0`, with the sensitivities of `(u, u')`
/// to the initial slope `p` and to `r`.
fn rhs(drift: &DriftSpec, sigma: f64, r: f64, x: f64, y: &[f64; 6]) -> Result<[f64; 6]> {
    let k = 2.0 / (sigma * sigma);
    let mu = drift.eval(sigma, x)?;
    let [u, du, up, dup, ur, dur] = *y;
    let lin = r * (1.0 + 2.0 * u);
    Ok([
        du,
        -k * (mu * du + r * u * (1.0 + u)),
        dup,
        -k * (mu * dup + lin * up),
        dur,
        -k * (mu * dur + lin * ur + u * (1.0 + u)),
    ])
}

fn integrate(
    drift: &DriftSpec,
    sigma: f64,
    nodes: &[f64],
    breaks: &[f64],
    p: f64,
    r: f64,
) -> Result<Vec<[f64; 6]>> {
    rk4_along(nodes, [0.0, p, 0.0, 1.0, 0.0, 0.0], breaks, |x, y, _| rhs(drift, sigma, r, x, y))
}

/// Solves `sigma^2/2 f'' + mu f' - r_* f (1 - f/S_*) = 0` with `f(0) = S_*` by
/// Newton shooting over `(f'(0), r_*)` so that `f(L) = S_+` and `f'(L) = 0`.
///
/// The quadratic term breaks the odd symmetry, so the lower edge conditions are
/// met only to `O(gamma^2)`; the miss is kept in
/// [`FxMap::lower_edge_mismatch`].
pub fn solve_nonlinear(
    zone: &TargetZone,
    sigma: f64,
    drift: &DriftSpec,
    r_star_guess: f64,
    nodes: usize,
) -> Result<FxMap> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
    }
    if !(r_star_guess.is_finite() && r_star_guess > 0.0) {
        return Err(Error::param("r_star_guess", format!("must be positive, got {r_star_guess}")));
    }
    let l = zone.half_width();
    drift.validate(l)?;
    if matches!(drift, DriftSpec::InterventionStep { .. }) {
        return Err(Error::Unsupported("the nonlinear map is posed on the band only".into()));
    }
    let gamma = zone.gamma();
    let grid = symmetric_grid(l, nodes)?;
    let mid = (nodes - 1) / 2;
    let upper = &grid[mid..];
    let lower: Vec<f64> = grid[..=mid].iter().rev().copied().collect();
    let breaks: Vec<f64> = drift.breakpoints();

    // initial slope from the linear problem at the guessed rate
    let lin = rk4_along(upper, [0.0, 1.0], &breaks, |x, y, _| {
        let mu = drift.eval(sigma, x)?;
        Ok([y[1], -2.0 * (mu * y[1] + r_star_guess * y[0]) / (sigma * sigma)])
    })?;
    let mut p = gamma / lin[lin.len() - 1][0];
    let mut r = r_star_guess;

    let tol_u = 1e-13 * gamma;
    let tol_du = 1e-13 * gamma / l;
    let mut last = [f64::NAN; 2];
    let mut converged = false;
    for _ in 0..MAX_NEWTON {
        let path = integrate(drift, sigma, upper, &breaks, p, r)?;
        let [u, du, up, dup, ur, dur] = path[path.len() - 1];
        let res = [u - gamma, du];
        last = res;
        if !res.iter().all(|v| v.is_finite()) {
            break;
        }
        if res[0].abs() <= tol_u && res[1].abs() <= tol_du {
            converged = true;
            break;
        }
        let det = up * dur - ur * dup;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dp = (res[0] * dur - ur * res[1]) / det;
        let dr = (up * res[1] - dup * res[0]) / det;
        p -= dp;
        r -= dr;
    }
    if !converged {
        return Err(Error::NoConvergence {
            solver: "nonlinear map shooting",
            iterations: MAX_NEWTON,
            residuals: last.to_vec(),
        });
    }

    let up_path = integrate(drift, sigma, upper, &breaks, p, r)?;
    let down_path = integrate(drift, sigma, &lower, &breaks, p, r)?;
    let s = zone.s_star();
    let s2 = sigma * sigma;
    let mut f = vec![0.0; nodes];
    let mut df = vec![0.0; nodes];
    for (k, st) in up_path.iter().enumerate() {
        f[mid + k] = s * (1.0 + st[0]);
        df[mid + k] = s * st[1];
    }
    for (k, st) in down_path.iter().enumerate() {
        f[mid - k] = s * (1.0 + st[0]);
        df[mid - k] = s * st[1];
    }
    let d2f = grid
        .iter()
        .zip(f.iter().zip(&df))
        .map(|(&x, (&fv, &dv))| Ok(2.0 * (r * fv * (1.0 - fv / s) - drift.eval(sigma, x)? * dv) / s2))
        .collect::<Result<Vec<f64>>>()?;
    let lower_edge = [f[0] - zone.s_minus(), df[0]];
    log::debug!("nonlinear map: r_* = {r}, f'(0) = {}, lower edge miss {lower_edge:?}", s * p);

    Ok(FxMap {
        x: grid,
        f,
        df,
        d2f,
        zone: *zone,
        source: MapSource::NonlinearOde,
        r_star: r,
        sigma,
        drift: drift.clone(),
        lower_edge: Some(lower_edge),
    })
}
