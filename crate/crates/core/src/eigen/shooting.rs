use super::{assemble, r0, solve_zero_drift, EigenSolution, Method};
use crate::error::{Error, Result};
use crate::model::{Direction, DriftSpec};
use crate::numeric::{brent, rk4_along, symmetric_grid};

/// Energies sampled when bracketing the first sign change of the boundary defect.
const SCAN_POINTS: usize = 300;

/// Integrates `psi'' = 2 (V - E) psi / sigma^2` from the origin with `psi(0) = 0`,
/// `psi'(0) = 1` and returns `[psi, psi']` at every node of `half`.
fn shoot(drift: &DriftSpec, sigma: f64, half: &[f64], breaks: &[f64], energy: f64) -> Result<Vec<[f64; 2]>> {
    let s2 = sigma * sigma;
    rk4_along(half, [0.0, 1.0], breaks, |x, y, side| {
        let v = drift.potential(sigma, x, side)?;
        Ok([y[1], 2.0 * (v - energy) * y[0] / s2])
    })
}

fn defect(drift: &DriftSpec, sigma: f64, half: &[f64], breaks: &[f64], energy: f64, k_l: f64) -> Result<f64> {
    let path = shoot(drift, sigma, half, breaks, energy)?;
    let [psi, dpsi] = path[path.len() - 1];
    Ok(dpsi - k_l * psi)
}

/// First excited level for any odd drift by shooting from the origin.
///
/// Scans the boundary defect `psi'(L) - mu(L) psi(L) / sigma^2` upward from
/// `E = 0`, refines the first sign change with Brent's method and checks the
/// resulting eigenfunction has its only node at the origin.
pub fn solve_general(drift: &DriftSpec, sigma: f64, half_width: f64, nodes: usize) -> Result<EigenSolution> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
    }
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::param("half_width", format!("must be positive, got {half_width}")));
    }
    drift.validate(half_width)?;
    if matches!(drift, DriftSpec::InterventionStep { .. }) {
        return Err(Error::Unsupported(
            "intervention drift lives on the whole line; use solve_intervention".into(),
        ));
    }
    if !drift.is_odd() {
        return Err(Error::Unsupported(
            "shooting from the origin needs an odd drift (mu(-x) = -mu(x))".into(),
        ));
    }

    let grid = symmetric_grid(half_width, nodes)?;
    let mid = (nodes - 1) / 2;
    let half = &grid[mid..];
    let breaks: Vec<f64> = drift
        .breakpoints()
        .into_iter()
        .filter(|&b| b > 0.0 && b < half_width)
        .collect();
    let s2 = sigma * sigma;
    let k_l = drift.eval(sigma, half_width)? / s2;

    let e_max = 10.0 * r0(sigma, half_width) * (1.0 + drift.max_abs(sigma, half_width)? * half_width / s2);
    let de = e_max / SCAN_POINTS as f64;
    let mut lo = 0.0;
    let mut f_lo = defect(drift, sigma, half, &breaks, lo, k_l)?;
    let mut bracket = None;
    for k in 1..=SCAN_POINTS {
        let hi = k as f64 * de;
        let f_hi = defect(drift, sigma, half, &breaks, hi, k_l)?;
        if f_lo == 0.0 || f_lo.signum() != f_hi.signum() {
            bracket = Some((lo, hi));
            break;
        }
        lo = hi;
        f_lo = f_hi;
    }
    let (a, b) = bracket.ok_or_else(|| Error::NoRoot {
        reason: format!("boundary defect keeps its sign on [0, {e_max}]; last value {f_lo}"),
    })?;
    let e1 = if f_lo == 0.0 {
        a
    } else {
        let mut failure = None;
        let root = brent(
            |e| match defect(drift, sigma, half, &breaks, e, k_l) {
                Ok(v) => v,
                Err(err) => {
                    failure.get_or_insert(err);
                    f64::NAN
                }
            },
            a,
            b,
            1e-13 * b,
            "eigenvalue",
        );
        if let Some(err) = failure {
            return Err(err);
        }
        root?
    };

    let path = shoot(drift, sigma, half, &breaks, e1)?;
    if path[1..].iter().any(|s| s[0] <= 0.0) {
        return Err(Error::NoConvergence {
            solver: "eigen shooting",
            iterations: SCAN_POINTS,
            residuals: vec![e1],
        });
    }
    let half_psi: Vec<(f64, f64)> = path.iter().map(|s| (s[0], s[1])).collect();
    assemble(grid, &half_psi, e1, None, drift.clone(), sigma, half_width, Method::Shooting)
}

/// `mu = -nu sigma^2 tan(nu x)`, needs `nu L < pi/2`. The potential is the
/// constant `-nu^2 sigma^2 / 2`, so `E_1 = sigma^2 (omega^2 - nu^2) / 2` with
/// `omega cot(omega L) = -nu tan(nu L)`; solved by shooting.
pub fn solve_tan_drift(nu: f64, sigma: f64, half_width: f64, nodes: usize) -> Result<EigenSolution> {
    let sol = solve_general(&DriftSpec::Tan { nu }, sigma, half_width, nodes)?;
    debug_assert!(sol.e1() > sol.r0(), "mean-reverting tan drift must raise E_1 above r_0");
    Ok(sol)
}

/// `mu = eps alpha x`. `alpha = 0` falls back to the driftless closed form.
pub fn solve_linear_drift(
    alpha: f64,
    direction: Direction,
    sigma: f64,
    half_width: f64,
    nodes: usize,
) -> Result<EigenSolution> {
    if alpha == 0.0 {
        return solve_zero_drift(sigma, half_width, nodes);
    }
    solve_general(&DriftSpec::Linear { alpha, direction }, sigma, half_width, nodes)
}
