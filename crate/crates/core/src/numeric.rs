//! Small numerical building blocks shared by the solvers.

use roots::{find_root_brent, Convergency};

use crate::error::{Error, Result};
use crate::model::Side;

/// `nodes` equally spaced points on `[-half_width, half_width]`; `nodes` must be
/// odd so the origin is a node. End points and the origin are exact.
pub fn symmetric_grid(half_width: f64, nodes: usize) -> Result<Vec<f64>> {
    if nodes < 5 || nodes % 2 == 0 {
        return Err(Error::param("grid nodes", format!("need an odd count >= 5, got {nodes}")));
    }
    let half = (nodes - 1) / 2;
    let h = half_width / half as f64;
    let mut grid: Vec<f64> = (0..nodes).map(|i| (i as f64 - half as f64) * h).collect();
    grid[0] = -half_width;
    grid[half] = 0.0;
    grid[nodes - 1] = half_width;
    Ok(grid)
}

struct Tolerance {
    xtol: f64,
    max_iter: usize,
}

impl Convergency<f64> for Tolerance {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }

    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() <= self.xtol
    }

    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= self.max_iter
    }
}

/// Brent's method on a sign-changing bracket `[a, b]` with absolute tolerance `xtol`.
pub(crate) fn brent(f: impl FnMut(f64) -> f64, a: f64, b: f64, xtol: f64, what: &str) -> Result<f64> {
    let mut tol = Tolerance { xtol, max_iter: 500 };
    find_root_brent(a, b, f, &mut tol).map_err(|e| Error::NoRoot {
        reason: format!("{what}: {e:?} on bracket [{a}, {b}]"),
    })
}

/// Fixed-step classical Runge-Kutta along `nodes` (monotone, either direction).
///
/// Each interval is split at any breakpoint strictly inside it, so the right-hand
/// side is only sampled on smooth pieces. `rhs` receives the one-sided limit to use
/// at piece endpoints. Returns the state at every node.
pub(crate) fn rk4_along<const N: usize>(
    nodes: &[f64],
    y0: [f64; N],
    breakpoints: &[f64],
    mut rhs: impl FnMut(f64, &[f64; N], Side) -> Result<[f64; N]>,
) -> Result<Vec<[f64; N]>> {
    let mut out = Vec::with_capacity(nodes.len());
    let mut y = y0;
    out.push(y);
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let forward = b > a;
        let (lo, hi) = if forward { (a, b) } else { (b, a) };
        let start = breakpoints.partition_point(|&p| p <= lo);
        let end = breakpoints.partition_point(|&p| p < hi);
        let mut cuts: Vec<f64> = breakpoints[start..end].to_vec();
        if !forward {
            cuts.reverse();
        }
        let mut x = a;
        for target in cuts.into_iter().chain(std::iter::once(b)) {
            y = rk4_step(x, target, &y, forward, &mut rhs)?;
            x = target;
        }
        out.push(y);
    }
    Ok(out)
}

fn rk4_step<const N: usize>(
    a: f64,
    b: f64,
    y: &[f64; N],
    forward: bool,
    rhs: &mut impl FnMut(f64, &[f64; N], Side) -> Result<[f64; N]>,
) -> Result<[f64; N]> {
    let h = b - a;
    let (start_side, end_side) = if forward {
        (Side::Right, Side::Left)
    } else {
        (Side::Left, Side::Right)
    };
    let axpy = |base: &[f64; N], k: &[f64; N], s: f64| {
        let mut r = *base;
        for i in 0..N {
            r[i] += s * k[i];
        }
        r
    };
    let mid = a + 0.5 * h;
    let k1 = rhs(a, y, start_side)?;
    let k2 = rhs(mid, &axpy(y, &k1, 0.5 * h), start_side)?;
    let k3 = rhs(mid, &axpy(y, &k2, 0.5 * h), start_side)?;
    let k4 = rhs(b, &axpy(y, &k3, h), end_side)?;
    let mut next = *y;
    for i in 0..N {
        next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(next)
}

/// `z cot z`, continuous through `z = 0`.
pub(crate) fn z_cot_z(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 3.0 - z2 * z2 / 45.0
    } else {
        z * z.cos() / z.sin()
    }
}

/// Trapezoid integral of `values` over `grid`.
pub(crate) fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
        .sum()
}

/// Solves a tridiagonal system in place (Thomas algorithm). `lower[0]` and
/// `upper[n-1]` are ignored.
pub(crate) fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], scratch: &mut Vec<f64>) {
    let n = diag.len();
    scratch.clear();
    scratch.resize(n, 0.0);
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
}
