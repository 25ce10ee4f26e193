use std::f64::consts::PI;

use serde_json::{json, Value};

use tzlab::eigen::{
    r0, solve_general, solve_intervention, solve_linear_drift, solve_sign_drift, solve_tan_drift, solve_tanh_drift,
    solve_zero_drift, tanh_limit_nu, EigenSolution, InterventionSolution,
};
use tzlab::fxmap::{build_linearized, solve_nonlinear, FxMap};
use tzlab::pricing::{
    closed_form_bond, closed_form_claim, discount_to_actual, foreign_rate_bounds, price_pde, ClaimSpec, GridSpec,
    RateModel,
};
use tzlab::sim::{carry_accrual, simulate_intervention, swing_count, z_drift, Estimate, Simulator, SwingStats};
use tzlab::{Direction, ProcessParams, TargetZone};

use crate::config::{ClaimKind, DriftConfig, DriftKind, ScenarioConfig};
use crate::error::CliError;
use crate::output::{fmt_f64, OutputDir};

/// Eigen solution plus the whole-line data of the intervention drift.
pub struct Solved {
    pub eigen: EigenSolution,
    pub intervention: Option<InterventionSolution>,
}

pub fn solve_eigen(drift: &DriftConfig, sigma: f64, l: f64, nodes: usize) -> tzlab::Result<Solved> {
    let nu = drift.nu_over_l / l;
    let eigen = match drift.kind {
        DriftKind::Zero => solve_zero_drift(sigma, l, nodes)?,
        DriftKind::Linear => solve_linear_drift(drift.alpha, drift.direction()?, sigma, l, nodes)?,
        DriftKind::Sign => solve_sign_drift(nu, drift.direction()?, sigma, l, nodes)?,
        DriftKind::Tanh => solve_tanh_drift(nu, sigma, l, nodes)?,
        DriftKind::Tan => solve_tan_drift(nu, sigma, l, nodes)?,
        DriftKind::Tabulated => solve_general(&drift.to_spec(l)?, sigma, l, nodes)?,
        DriftKind::Intervention => {
            let sol = solve_intervention(drift.xi, sigma, l, nodes)?;
            return Ok(Solved {
                eigen: sol.eigen().clone(),
                intervention: Some(sol),
            });
        }
    };
    Ok(Solved {
        eigen,
        intervention: None,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn estimate_json(e: &Estimate) -> Value {
    json!({"mean": e.mean, "se": e.se, "n": e.n})
}

pub fn eigen(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<Value, CliError> {
    let (sigma, l) = (cfg.process.sigma, cfg.zone.half_width);
    let points: Vec<DriftConfig> = if cfg.eigen.sweep.is_empty() {
        vec![cfg.drift.clone()]
    } else {
        cfg.eigen.sweep.iter().map(|&p| cfg.drift.with_parameter(p)).collect()
    };
    let single = points.len() == 1;
    let mut rows = Vec::new();
    let mut results = Vec::new();
    let mut profile: Option<EigenSolution> = None;
    for d in &points {
        let parameter = d.parameter().map(|(_, v)| v);
        match solve_eigen(d, sigma, l, cfg.eigen.nodes) {
            Ok(s) => {
                let e = &s.eigen;
                rows.push(vec![
                    opt(parameter),
                    fmt_f64(e.e1()),
                    fmt_f64(e.r0()),
                    fmt_f64(e.ratio_to_r0()),
                    opt(e.omega()),
                    fmt_f64(e.robin_residual()),
                    e.method().as_str().into(),
                    "ok".into(),
                ]);
                let mut r = json!({
                    "parameter": parameter,
                    "e1": e.e1(),
                    "ratio_to_r0": e.ratio_to_r0(),
                    "omega": e.omega(),
                    "method": e.method().as_str(),
                    "robin_residual": e.robin_residual(),
                });
                if let Some(iv) = &s.intervention {
                    r["decay"] = json!(iv.decay());
                    r["omega_asymptotic"] = json!(iv.omega_asymptotic());
                    r["decay_asymptotic"] = json!(iv.decay_asymptotic());
                }
                results.push(r);
                if profile.is_none() {
                    profile = Some(s.eigen);
                }
            }
            Err(e) if !single => {
                rows.push(vec![
                    opt(parameter),
                    String::new(),
                    fmt_f64(r0(sigma, l)),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    e.to_string(),
                ]);
                results.push(json!({"parameter": parameter, "error": e.to_string()}));
            }
            Err(e) => return Err(e.into()),
        }
    }
    out.csv(
        "eigen_sweep.csv",
        &["parameter", "e1", "r0", "ratio_to_r0", "omega", "robin_residual", "method", "status"],
        rows,
    )?;
    if let Some(e) = &profile {
        let rows = (0..e.node_count()).map(|i| {
            vec![
                fmt_f64(e.x()[i]),
                fmt_f64(e.psi1()[i]),
                fmt_f64(e.h()[i]),
                fmt_f64(e.h_prime()[i]),
            ]
        });
        out.csv("eigen_profile.csv", &["x", "psi1", "h", "h_prime"], rows)?;
    }
    let e1 = results.first().and_then(|r| r.get("e1").cloned()).unwrap_or(Value::Null);
    let ratio = results.first().and_then(|r| r.get("ratio_to_r0").cloned()).unwrap_or(Value::Null);
    Ok(json!({
        "drift": cfg.drift,
        "sweep_parameter": cfg.drift.parameter().map(|(n, _)| n),
        "sigma": sigma,
        "half_width": l,
        "r0": r0(sigma, l),
        "e1": e1,
        "e1_over_r0": ratio,
        "results": results,
    }))
}

fn linearized_map(cfg: &ScenarioConfig) -> Result<(FxMap, TargetZone), CliError> {
    let zone = cfg.zone()?;
    let solved = solve_eigen(&cfg.drift, cfg.process.sigma, zone.half_width(), cfg.eigen.nodes)?;
    Ok((build_linearized(&solved.eigen, &zone)?, zone))
}

pub fn map(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<Value, CliError> {
    let (lin, zone) = linearized_map(cfg)?;
    let nonlinear = if cfg.map.nonlinear && cfg.drift.kind != DriftKind::Intervention {
        Some(solve_nonlinear(&zone, cfg.process.sigma, lin.drift(), lin.r_star(), cfg.eigen.nodes)?)
    } else {
        None
    };
    let rate_lin = lin.uirp_rate_table()?;
    let mut rows = Vec::with_capacity(lin.x().len());
    for (i, &x) in lin.x().iter().enumerate() {
        let (f_nl, df_nl) = match &nonlinear {
            Some(m) => (Some(m.value(x)?), Some(m.derivative(x)?)),
            None => (None, None),
        };
        rows.push(vec![
            fmt_f64(x),
            fmt_f64(lin.f()[i]),
            fmt_f64(lin.df()[i]),
            fmt_f64(rate_lin[i]),
            opt(f_nl),
            opt(df_nl),
        ]);
    }
    out.csv(
        "map.csv",
        &["x", "f_linearized", "df_linearized", "uirp_rate_linearized", "f_nonlinear", "df_nonlinear"],
        rows,
    )?;
    let nl = match &nonlinear {
        Some(m) => json!({
            "r_star": m.r_star(),
            "uirp_residual": m.uirp_residual()?,
            "lower_edge_mismatch": m.lower_edge_mismatch(),
        }),
        None => Value::Null,
    };
    Ok(json!({
        "gamma": zone.gamma(),
        "r0": r0(cfg.process.sigma, zone.half_width()),
        "linearized": {"r_star": lin.r_star(), "uirp_residual": lin.uirp_residual()?},
        "nonlinear": nl,
    }))
}

struct PathReport {
    swings: usize,
    carry: f64,
    z_slope: f64,
    hits: [u32; 2],
    recorded: Option<(Vec<f64>, Vec<f64>, Vec<f64>)>,
}

pub fn simulate(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<Value, CliError> {
    let params = cfg.process.params()?;
    let zone = cfg.zone()?;
    let l = zone.half_width();
    if cfg.drift.kind == DriftKind::Intervention {
        return simulate_outside_band(cfg, params, &zone, out);
    }
    let (map, _) = linearized_map(cfg)?;
    let drift = cfg.drift.to_spec(l)?;
    let peg = cfg.peg.to_spec(&zone, map.r_star())?;
    let scale = cfg.peg.scale(map.r_star()).unwrap_or(map.r_star());
    let sim = Simulator::new(params, &drift, &map, &peg)?.with_start(cfg.process.x0)?;
    let (dt, s_star, keep) = (params.dt, zone.s_star(), cfg.output.paths_csv);
    let reports = sim.for_each_path(|p| PathReport {
        swings: swing_count(p.x, l),
        carry: carry_accrual(p.s, s_star, map.r_star(), scale, dt),
        z_slope: z_drift(p, dt),
        hits: p.boundary_hits,
        recorded: (p.id < keep).then(|| (p.x.to_vec(), p.s.to_vec(), p.r.to_vec())),
    })?;
    let times = sim.times();
    let mut path_rows = Vec::new();
    for (id, rep) in reports.iter().enumerate() {
        if let Some((x, s, r)) = &rep.recorded {
            for k in 0..x.len() {
                path_rows.push(vec![
                    id.to_string(),
                    k.to_string(),
                    fmt_f64(times[k]),
                    fmt_f64(x[k]),
                    fmt_f64(s[k]),
                    fmt_f64(r[k]),
                ]);
            }
        }
    }
    out.csv("paths.csv", &["path", "step", "t", "x", "s", "r"], path_rows)?;
    out.csv(
        "per_path.csv",
        &["path", "swings", "carry_pnl", "z_drift", "hits_lower", "hits_upper"],
        reports.iter().enumerate().map(|(id, r)| {
            vec![
                id.to_string(),
                r.swings.to_string(),
                fmt_f64(r.carry),
                fmt_f64(r.z_slope),
                r.hits[0].to_string(),
                r.hits[1].to_string(),
            ]
        }),
    )?;
    let stats = SwingStats::from_counts(
        reports.iter().map(|r| r.swings).collect(),
        params.sigma,
        params.horizon,
        l,
    );
    let carry = Estimate::from_samples(&reports.iter().map(|r| r.carry).collect::<Vec<_>>());
    let slope = Estimate::from_samples(&reports.iter().map(|r| r.z_slope).collect::<Vec<_>>());
    Ok(json!({
        "n_paths": params.n_paths,
        "n_steps": params.n_steps(),
        "r_star": map.r_star(),
        "peg_scale": scale,
        "swings": {
            "beta": stats.beta,
            "k_implied": stats.k_implied,
            "median_k": stats.median_k,
            "vol_ratio": stats.vol_ratio,
        },
        "martingale": {"z_drift": estimate_json(&slope), "z_score": slope.z_score()},
        "carry": {"r_star_uirp": map.r_star(), "r_star_star": scale, "pnl": estimate_json(&carry)},
    }))
}

fn simulate_outside_band(
    cfg: &ScenarioConfig,
    params: ProcessParams,
    zone: &TargetZone,
    out: &mut OutputDir,
) -> Result<Value, CliError> {
    let sol = solve_intervention(cfg.drift.xi, params.sigma, zone.half_width(), cfg.eigen.nodes)?;
    let run = simulate_intervention(params, &sol, zone, false)?;
    out.csv(
        "excursions.csv",
        &["path", "max_excursion", "outside_fraction"],
        run.max_excursion
            .iter()
            .zip(&run.outside_fraction)
            .enumerate()
            .map(|(i, (m, f))| vec![i.to_string(), fmt_f64(*m), fmt_f64(*f)]),
    )?;
    let margin = 10.0 / cfg.drift.xi;
    Ok(json!({
        "n_paths": params.n_paths,
        "xi": cfg.drift.xi,
        "mean_max_excursion": run.mean_excursion(),
        "mean_outside_fraction": run.mean_outside_fraction(),
        "escape_margin": margin,
        "escapes": run.escapes(margin),
    }))
}

/// Every `stride`-th index of `0..n`, always ending at `n - 1`.
fn strided(n: usize, stride: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
    if idx.last() != Some(&(n - 1)) {
        idx.push(n - 1);
    }
    idx
}

fn claim_spec(kind: ClaimKind, map: &FxMap, maturity: f64) -> tzlab::Result<ClaimSpec> {
    let s_star = map.zone().s_star();
    match kind {
        ClaimKind::UnitBond => Ok(ClaimSpec::unit_bond(maturity)),
        ClaimKind::Forward => Ok(ClaimSpec::forward(maturity)),
        ClaimKind::RateSquared => ClaimSpec::of_rate(map, |s| (s / s_star).powi(2), maturity),
    }
}

fn payoff_of(kind: ClaimKind, s_star: f64) -> impl Fn(f64) -> f64 + Sync {
    move |s| match kind {
        ClaimKind::UnitBond => 1.0,
        ClaimKind::Forward => s,
        ClaimKind::RateSquared => (s / s_star).powi(2),
    }
}

pub fn price(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<Value, CliError> {
    if cfg.drift.kind == DriftKind::Intervention {
        return Err(tzlab::Error::Unsupported("pricing needs a reflected band drift".into()).into());
    }
    let (map, zone) = linearized_map(cfg)?;
    let p = &cfg.pricing;
    let scale = cfg.peg.scale(map.r_star());
    let rate = match scale {
        None => RateModel::Uirp,
        Some(r) => RateModel::Linear { r_star_star: r },
    };
    let r_closed = scale.unwrap_or(map.r_star());
    let grid = GridSpec {
        nx: p.nx,
        nt: p.nt,
        rannacher: p.rannacher,
    };
    let x0 = cfg.process.x0;
    let s0 = map.value(x0)?;
    let mut claims = serde_json::Map::new();
    for &kind in &p.claims {
        let claim = claim_spec(kind, &map, p.maturity)?;
        let pg = price_pde(&claim, &map, &rate, 0.0, grid)?;
        let stride = p.surface_stride;
        let mut surface = Vec::new();
        let columns = strided(pg.x().len(), stride);
        for k in strided(pg.t().len(), stride) {
            let v = pg.slice(k);
            for &j in &columns {
                surface.push(vec![fmt_f64(pg.t()[k]), fmt_f64(pg.x()[j]), fmt_f64(v[j])]);
            }
        }
        out.csv(&format!("surface_{}.csv", kind.as_str()), &["t", "x", "v"], surface)?;

        let closed = |s: f64| match kind {
            ClaimKind::UnitBond => Some(closed_form_claim(s, 0.0, p.maturity, 1.0, 1.0, r_closed, zone.s_star())),
            ClaimKind::Forward => Some(closed_form_claim(s, 0.0, p.maturity, zone.s_star(), 0.0, r_closed, zone.s_star())),
            ClaimKind::RateSquared => None,
        };
        let mut quotes = Vec::new();
        for j in 0..pg.x().len() {
            let (x, v) = (pg.x()[j], pg.initial()[j]);
            let s = map.value(x)?;
            quotes.push(vec![
                fmt_f64(x),
                fmt_f64(s),
                fmt_f64(v),
                fmt_f64(discount_to_actual(v, 0.0, p.maturity, p.r_domestic)),
                opt(closed(s)),
            ]);
        }
        out.csv(
            &format!("quotes_{}.csv", kind.as_str()),
            &["x", "s", "v", "actual_price", "closed_form_v"],
            quotes,
        )?;

        let v0 = pg.value_at(x0);
        let mc = if p.mc_paths > 0 {
            let params = ProcessParams::new(cfg.process.sigma, cfg.process.dt, p.maturity, p.mc_paths, cfg.process.seed)?;
            let peg = cfg.peg.to_spec(&zone, map.r_star())?;
            let sim = Simulator::new(params, map.drift(), &map, &peg)?.with_start(x0)?;
            let est = sim.claim_mc(payoff_of(kind, zone.s_star()))?;
            json!({"estimate": estimate_json(&est), "z_vs_pde": (est.mean - v0) / est.se})
        } else {
            Value::Null
        };
        claims.insert(
            kind.as_str().into(),
            json!({
                "pde_v_at_x0": v0,
                "actual_price_at_x0": discount_to_actual(v0, 0.0, p.maturity, p.r_domestic),
                "closed_form_v_at_x0": closed(s0),
                "neumann_defect": pg.neumann_defect(),
                "monte_carlo": mc,
            }),
        );
    }
    let bond = closed_form_bond(s0, 0.0, p.maturity, p.r_domestic, r_closed, &zone);
    let (lo, hi) = foreign_rate_bounds(p.r_domestic, r_closed, &zone);
    Ok(json!({
        "x0": x0,
        "s0": s0,
        "r_star": map.r_star(),
        "peg_scale": r_closed,
        "r_domestic": p.r_domestic,
        "maturity": p.maturity,
        "closed_form_bond": {"price": bond.price, "r_hat": bond.r_hat, "may_exceed_one": bond.may_exceed_one},
        "foreign_rate_bounds": [lo, hi],
        "claims": claims,
    }))
}

/// USD/HKD walk-through: band scale, swing figure, limiting eigenvalue ratios,
/// bond quotes and a simulated swing count.
pub fn hkd_demo(cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<Value, CliError> {
    let zone = TargetZone::hkd();
    let l = zone.half_width();
    let sigma = cfg.process.sigma;
    let nodes = cfg.eigen.nodes;
    let base = r0(sigma, l);
    let gamma = zone.gamma();
    let sign = solve_sign_drift(1.0 / l, Direction::Momentum, sigma, l, nodes)?;
    let tanh_nu = tanh_limit_nu(l)?;
    let tanh = solve_tanh_drift(tanh_nu, sigma, l, nodes)?;
    out.csv(
        "hkd_eigen.csv",
        &["drift", "nu_over_l", "e1", "ratio_to_r0"],
        vec![
            vec!["zero".into(), fmt_f64(0.0), fmt_f64(base), fmt_f64(1.0)],
            vec!["sign".into(), fmt_f64(1.0), fmt_f64(sign.e1()), fmt_f64(sign.ratio_to_r0())],
            vec!["tanh".into(), fmt_f64(tanh_nu * l), fmt_f64(tanh.e1()), fmt_f64(tanh.ratio_to_r0())],
        ],
    )?;

    let r_d = cfg.pricing.r_domestic;
    let fair = closed_form_bond(zone.s_plus(), 0.0, 1.0, r_d, base, &zone);
    let rich = closed_form_bond(zone.s_plus(), 0.0, 1.0, r_d, 4.0, &zone);

    let map = build_linearized(&solve_zero_drift(sigma, l, nodes)?, &zone)?;
    let params = cfg.process.params()?;
    let sim = Simulator::new(params, &tzlab::DriftSpec::Zero, &map, &tzlab::PegSpec::no_arbitrage(&zone))?;
    let counts = sim.for_each_path(|p| swing_count(p.x, l))?;
    let swings = SwingStats::from_counts(counts, sigma, params.horizon, l);

    Ok(json!({
        "zone": {"s_minus": zone.s_minus(), "s_star": zone.s_star(), "s_plus": zone.s_plus(), "half_width": l},
        "gamma": gamma,
        "sigma": sigma,
        "r0": base,
        "gamma_r0": gamma * base,
        "swing_coefficient": gamma * PI * PI / 8.0,
        "eigen_ratios": {
            "sign_momentum_limit": sign.ratio_to_r0(),
            "tanh_limit": tanh.ratio_to_r0(),
            "tanh_limit_nu_l": tanh_nu * l,
        },
        "bond": {
            "r_domestic": r_d,
            "uirp_peg": {"r_star": base, "price_at_s_plus": fair.price, "may_exceed_one": fair.may_exceed_one},
            "rich_peg": {"r_star": 4.0, "price_at_s_plus": rich.price, "may_exceed_one": rich.may_exceed_one},
            "positivity_threshold_r_star": r_d / gamma,
        },
        "swings": {
            "n_paths": params.n_paths,
            "beta": swings.beta,
            "k_implied": swings.k_implied,
            "median_k": swings.median_k,
            "vol_ratio": swings.vol_ratio,
        },
    }))
}
