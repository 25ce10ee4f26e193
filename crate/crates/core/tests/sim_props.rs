use tzlab::eigen::{solve_intervention, solve_linear_drift, solve_zero_drift};
use tzlab::fxmap::{build_linearized, FxMap};
use tzlab::sim::{
    carry_strategy_pnl, count_swings, martingale_check, simulate_intervention, simulate_reflected, Estimate, Simulator,
};
use tzlab::{Direction, DriftSpec, Error, PegSpec, ProcessParams, TargetZone};

fn zero_map(sigma: f64) -> FxMap {
    build_linearized(&solve_zero_drift(sigma, 1.0, 2001).unwrap(), &TargetZone::hkd()).unwrap()
}

#[test]
fn zero_drift_mean_is_zero() {
    let map = zero_map(1.0);
    let p = ProcessParams::new(1.0, 1e-3, 5.0, 400, 21).unwrap();
    let peg = PegSpec::linear(map.zone(), 0.05).unwrap();
    let sim = Simulator::new(p, &DriftSpec::Zero, &map, &peg).unwrap();
    let means = sim.for_each_path(|v| v.x.iter().sum::<f64>() / v.x.len() as f64).unwrap();
    let e = Estimate::from_samples(&means);
    assert!(e.mean.abs() < 3.0 * e.se, "{e:?}");
}

#[test]
fn zero_drift_terminal_law_is_uniform() {
    // chi-square on 20 bins, 5% critical value with 19 degrees of freedom
    let map = zero_map(3.0);
    let p = ProcessParams::new(3.0, 1e-3, 1.0, 10_000, 5).unwrap();
    let sim = Simulator::new(p, &DriftSpec::Zero, &map, &PegSpec::no_arbitrage(map.zone())).unwrap();
    let ends = sim.for_each_path(|v| v.x[v.x.len() - 1]).unwrap();
    let mut bins = [0usize; 20];
    for x in ends {
        bins[(((x + 1.0) / 0.1) as usize).min(19)] += 1;
    }
    let expected = 500.0;
    let chi2: f64 = bins.iter().map(|&b| (b as f64 - expected).powi(2) / expected).sum();
    assert!(chi2 < 30.1435, "chi2 {chi2}");
}

#[test]
fn mean_reversion_shrinks_variance() {
    let map = zero_map(1.0);
    let peg = PegSpec::linear(map.zone(), 0.0).unwrap();
    let p = ProcessParams::new(1.0, 1e-3, 3.0, 300, 8).unwrap();
    let var = |d: &DriftSpec| {
        let sq = Simulator::new(p, d, &map, &peg)
            .unwrap()
            .for_each_path(|v| v.x[1000..].iter().map(|x| x * x).sum::<f64>() / (v.x.len() - 1000) as f64)
            .unwrap();
        sq.iter().sum::<f64>() / sq.len() as f64
    };
    let free = var(&DriftSpec::Zero);
    let pulled = var(&DriftSpec::Linear {
        alpha: 8.0,
        direction: Direction::MeanReverting,
    });
    assert!((free - 1.0 / 3.0).abs() < 0.03, "{free}");
    assert!(pulled < 0.5 * free, "{pulled} vs {free}");
}

#[test]
fn identical_seeds_reproduce_bit_for_bit() {
    let map = zero_map(1.0);
    let peg = PegSpec::no_arbitrage(map.zone());
    let p = ProcessParams::new(1.0, 1e-3, 0.5, 50, 99).unwrap();
    let a = simulate_reflected(p, &DriftSpec::Zero, &map, &peg).unwrap();
    let b = simulate_reflected(p, &DriftSpec::Zero, &map, &peg).unwrap();
    assert_eq!(a, b);
    // path 7 does not depend on how many paths are drawn
    let small = ProcessParams { n_paths: 10, ..p };
    let c = simulate_reflected(small, &DriftSpec::Zero, &map, &peg).unwrap();
    assert_eq!(a.path(7).x, c.path(7).x);
    let other = ProcessParams { seed: 100, ..p };
    let d = simulate_reflected(other, &DriftSpec::Zero, &map, &peg).unwrap();
    assert_ne!(a.path(7).x, d.path(7).x);
}

#[test]
fn paths_stay_in_band_and_rates_follow_peg() {
    let e = solve_linear_drift(1.0, Direction::Momentum, 1.5, 1.0, 2001).unwrap();
    let map = build_linearized(&e, &TargetZone::hkd()).unwrap();
    let d = e.drift().clone();
    let peg = PegSpec::linear(map.zone(), 0.03).unwrap();
    let ps = simulate_reflected(ProcessParams::new(1.5, 1e-3, 2.0, 200, 4).unwrap(), &d, &map, &peg).unwrap();
    for v in ps.paths() {
        assert!(v.x.iter().all(|x| x.abs() <= 1.0));
        for k in 0..v.x.len() {
            assert_eq!(v.s[k], map.value(v.x[k]).unwrap());
            assert!((v.r[k] - 0.03 * (1.0 - v.s[k] / 7.80)).abs() < 1e-18);
        }
    }
    assert!(ps.paths().any(|v| v.boundary_hits[0] + v.boundary_hits[1] > 0));
}

#[test]
fn step_bound_is_enforced() {
    let map = zero_map(1.0);
    let peg = PegSpec::no_arbitrage(map.zone());
    let p = ProcessParams::new(1.0, 0.5, 1.0, 10, 1).unwrap();
    match Simulator::new(p, &DriftSpec::Zero, &map, &peg) {
        Err(Error::StepTooLarge { bound }) => assert!(bound.contains("L/2")),
        other => panic!("{other:?}"),
    }
    // no-arbitrage rate from a map built at another sigma is refused
    let p = ProcessParams::new(2.0, 1e-3, 1.0, 10, 1).unwrap();
    assert!(Simulator::new(p, &DriftSpec::Zero, &map, &peg).is_err());
}

#[test]
fn halving_dt_is_weakly_consistent() {
    let map = zero_map(1.0);
    let peg = PegSpec::no_arbitrage(map.zone());
    let run = |dt: f64, seed: u64| {
        let p = ProcessParams::new(1.0, dt, 0.5, 4000, seed).unwrap();
        let sim = Simulator::new(p, &DriftSpec::Zero, &map, &peg).unwrap().with_start(0.6).unwrap();
        Estimate::from_samples(&sim.for_each_path(|v| v.s[v.s.len() - 1]).unwrap())
    };
    let a = run(2e-3, 1);
    let b = run(1e-3, 2);
    let se = (a.se * a.se + b.se * b.se).sqrt();
    assert!((a.mean - b.mean).abs() < 2.0 * se, "{a:?} {b:?}");
}

#[test]
fn swings_track_volatility() {
    let map = zero_map(3.0);
    let peg = PegSpec::no_arbitrage(map.zone());
    let p = ProcessParams::new(3.0, 1e-4, 1.0, 1000, 17).unwrap();
    let ps = simulate_reflected(p, &DriftSpec::Zero, &map, &peg).unwrap();
    let stats = count_swings(&ps);
    assert!((stats.beta - 3.0).abs() < 1e-15);
    assert!((stats.k_implied - 9.0).abs() < 1e-12);
    let l_sqrt_k = stats.median_k.sqrt();
    assert!((l_sqrt_k - 3.0).abs() < 0.5 * 3.0, "median K {}", stats.median_k);
}

#[test]
fn intervention_excursions_shrink_with_xi() {
    let zone = TargetZone::hkd();
    let p = ProcessParams::new(1.0, 1e-4, 1.0, 100, 2).unwrap();
    let means: Vec<f64> = [20.0, 50.0, 100.0]
        .iter()
        .map(|&xi| {
            let sol = solve_intervention(xi, 1.0, 1.0, 201).unwrap();
            simulate_intervention(p, &sol, &zone, false).unwrap().mean_excursion()
        })
        .collect();
    assert!(means[0] > means[1] && means[1] > means[2], "{means:?}");
    let sol = solve_intervention(100.0, 1.0, 1.0, 201).unwrap();
    let run = simulate_intervention(p, &sol, &zone, false).unwrap();
    assert_eq!(run.escapes(10.0 / 100.0), 0);
}

#[test]
fn strong_intervention_barely_leaves_band() {
    let zone = TargetZone::hkd();
    let sol = solve_intervention(1e4, 1.0, 1.0, 201).unwrap();
    let p = ProcessParams::new(1.0, 1e-5, 1.0, 20, 3).unwrap();
    let run = simulate_intervention(p, &sol, &zone, true).unwrap();
    assert!(run.mean_outside_fraction() < 0.01, "{}", run.mean_outside_fraction());
    let ps = run.paths.unwrap();
    assert_eq!(ps.n_paths(), 20);
    // the kick bound rejects steps where the push-back overshoots the band
    let coarse = ProcessParams::new(1.0, 1e-4, 1.0, 20, 3).unwrap();
    assert!(matches!(
        simulate_intervention(coarse, &sol, &zone, false),
        Err(Error::StepTooLarge { .. })
    ));
}

#[test]
fn uirp_peg_makes_z_a_martingale() {
    let map = zero_map(1.0);
    let p = ProcessParams::new(1.0, 1e-3, 1.0, 20_000, 31).unwrap();
    let fair = Simulator::new(p, &DriftSpec::Zero, &map, &PegSpec::no_arbitrage(map.zone()))
        .unwrap()
        .with_start_rate(7.85)
        .unwrap();
    let rep = fair.martingale_check().unwrap();
    assert!(rep.consistent_with_zero(3.0), "{:?}", rep.slope);
    let half = PegSpec::linear(map.zone(), 0.5 * map.r_star()).unwrap();
    let cheap = Simulator::new(p, &DriftSpec::Zero, &map, &half).unwrap().with_start_rate(7.85).unwrap();
    let rep = cheap.martingale_check().unwrap();
    assert!(rep.slope.mean < -3.0 * rep.slope.se, "{:?}", rep.slope);
}

#[test]
fn frozen_process_has_flat_z() {
    let map = zero_map(1.0);
    let peg = PegSpec::linear(map.zone(), 0.3).unwrap();
    let ps = simulate_reflected(ProcessParams::new(1e-200, 1e-2, 1.0, 5, 0).unwrap(), &DriftSpec::Zero, &map, &peg).unwrap();
    let rep = martingale_check(&ps);
    assert_eq!(rep.slope.mean, 0.0);
}

#[test]
fn carry_pnl_signs() {
    let map = zero_map(1.0);
    let r = map.r_star();
    let p = ProcessParams::new(1.0, 1e-3, 1.0, 300, 12).unwrap();
    let fair = simulate_reflected(p, &DriftSpec::Zero, &map, &PegSpec::linear(map.zone(), r).unwrap()).unwrap();
    let rep = carry_strategy_pnl(&fair, r, r);
    assert!(rep.pnl.iter().all(|&v| v == 0.0));
    let mut means = Vec::new();
    for frac in [0.9, 0.7, 0.5] {
        let ps = simulate_reflected(p, &DriftSpec::Zero, &map, &PegSpec::linear(map.zone(), frac * r).unwrap()).unwrap();
        let rep = carry_strategy_pnl(&ps, r, frac * r);
        assert!(rep.summary.mean > 5.0 * rep.summary.se);
        means.push(rep.summary.mean);
    }
    assert!(means[0] < means[1] && means[1] < means[2]);
}
