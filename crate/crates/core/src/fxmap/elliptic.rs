use crate::error::{Error, Result};

/// Jacobi `sn(u | m)` for `0 <= m <= 1` by the descending Landen (AGM) scheme.
pub fn jacobi_sn(u: f64, m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::Domain {
            what: "elliptic parameter m",
            value: m,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if m == 0.0 {
        return Ok(u.sin());
    }
    if m == 1.0 {
        return Ok(u.tanh());
    }
    let mut a = vec![1.0];
    let mut c = vec![m.sqrt()];
    let mut b = (1.0 - m).sqrt();
    while c[c.len() - 1].abs() > f64::EPSILON && a.len() < 64 {
        let an = a[a.len() - 1];
        let next = 0.5 * (an + b);
        c.push(0.5 * (an - b));
        b = (an * b).sqrt();
        a.push(next);
    }
    let n = a.len() - 1;
    let mut phi = 2f64.powi(n as i32) * a[n] * u;
    for k in (1..=n).rev() {
        phi = 0.5 * (phi + (c[k] / a[k] * phi.sin()).asin());
    }
    Ok(phi.sin())
}

/// Largest residual of `phi = sn^2(u|m)` in `phi'' = 2 - 4(1+m) phi + 6 m phi^2`
/// over a uniform grid, with `phi''` from the five-point fourth-order stencil.
pub fn elliptic_residual(m: f64, u: &[f64]) -> Result<f64> {
    if u.len() < 5 {
        return Err(Error::param("u grid", "need at least 5 nodes"));
    }
    let du = u[1] - u[0];
    if !(du > 0.0) || u.windows(2).any(|w| ((w[1] - w[0]) - du).abs() > 1e-9 * du) {
        return Err(Error::param("u grid", "must be uniform and increasing"));
    }
    let phi = u
        .iter()
        .map(|&v| jacobi_sn(v, m).map(|s| s * s))
        .collect::<Result<Vec<f64>>>()?;
    let mut worst = 0.0_f64;
    for i in 2..u.len() - 2 {
        let d2 = (-phi[i - 2] + 16.0 * phi[i - 1] - 30.0 * phi[i] + 16.0 * phi[i + 1] - phi[i + 2]) / (12.0 * du * du);
        let rhs = 2.0 - 4.0 * (1.0 + m) * phi[i] + 6.0 * m * phi[i] * phi[i];
        worst = worst.max((d2 - rhs).abs());
    }
    Ok(worst)
}
