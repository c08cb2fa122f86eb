//! Library results checked against independent reimplementations.

use ldpc_waterfall::channel::{normal_cdf, q_func, q_inv, ChannelKind, ChannelSpec};
use ldpc_waterfall::de::{find_threshold, DEConfig};
use ldpc_waterfall::ensemble::Ensemble;
use ldpc_waterfall::predictor::{
    predict, predict_curve, realization_grid_awgn, realization_grid_discrete, threshold_baseline, GridOptions,
    RealizationSource,
};
use ldpc_waterfall::sim::{run_monte_carlo, SimConfig};
use ldpc_waterfall::sweep::{sweep_points, Axis, SweepRange};
use statrs::distribution::{Binomial, ContinuousCDF, Discrete, Normal};

/// Regular-ensemble erasure recursion run for exactly `iters` iterations.
fn bec_pb(dv: i32, dc: i32, eps: f64, iters: usize) -> f64 {
    let mut x = eps;
    let mut y = 1.0;
    for _ in 0..iters {
        y = 1.0 - (1.0 - x).powi(dc - 1);
        x = eps * y.powi(dv - 1);
    }
    let pb = eps * y.powi(dv);
    if pb < 1e-12 {
        0.0
    } else {
        pb
    }
}

fn gallager_a_pb(dv: i32, dc: i32, p: f64, iters: usize) -> f64 {
    let mut x = p;
    let mut c = 0.0;
    for _ in 0..iters {
        c = (1.0 - (1.0 - 2.0 * x).powi(dc - 1)) / 2.0;
        x = p * (1.0 - (1.0 - c).powi(dv - 1)) + (1.0 - p) * c.powi(dv - 1);
    }
    p * (1.0 - (1.0 - c).powi(dv)) + (1.0 - p) * c.powi(dv)
}

/// Last parameter on a `step` grid at which the recursion still goes below the floor.
fn scan(pb: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> f64 {
    let mut last_good = lo;
    let mut x = lo;
    while x <= hi {
        if pb(x) < 1e-12 {
            last_good = x;
        }
        x += step;
    }
    last_good
}

#[test]
fn thresholds_match_grid_scans() {
    let cfg = DEConfig::default();
    let e = Ensemble::regular(3, 6, 1000).unwrap();
    let bec = find_threshold(&e, ChannelKind::Bec, &cfg, 1e-7).unwrap();
    let bec_scan = scan(|x| bec_pb(3, 6, x, cfg.l_max), 0.40, 0.45, 1e-4);
    assert!((bec - bec_scan).abs() <= 1e-4 + 1e-7, "{bec} vs {bec_scan}");

    let bsc = find_threshold(&e, ChannelKind::Bsc, &cfg, 1e-7).unwrap();
    let bsc_scan = scan(|x| gallager_a_pb(3, 6, x, cfg.l_max), 0.03, 0.05, 1e-4);
    assert!((bsc - bsc_scan).abs() <= 1e-4 + 1e-7, "{bsc} vs {bsc_scan}");
}

/// Full binomial marginalization with statrs masses and the test recursion.
fn reference_prediction(n: u64, eps: f64, l_max: usize) -> f64 {
    let dist = Binomial::new(eps, n).unwrap();
    (0..=n)
        .map(|k| {
            let mass = dist.pmf(k);
            if mass < 1e-300 {
                0.0
            } else {
                mass * bec_pb(3, 6, k as f64 / n as f64, l_max)
            }
        })
        .sum()
}

#[test]
fn bec_prediction_matches_reference_marginalization() {
    let cfg = DEConfig::default();
    let e = Ensemble::regular(3, 6, 1024).unwrap();
    let opts = GridOptions::default();
    let low = predict(&e, &ChannelSpec::bec(0.35).unwrap(), &cfg, &opts).unwrap().p_b;
    let high = predict(&e, &ChannelSpec::bec(0.42).unwrap(), &cfg, &opts).unwrap().p_b;
    assert!(low > 0.0 && low < high);
    for (got, eps) in [(low, 0.35), (high, 0.42)] {
        let want = reference_prediction(1024, eps, cfg.l_max);
        assert!((got - want).abs() <= 1e-3 * want + 1e-10, "eps={eps}: {got} vs {want}");
    }
}

#[test]
fn exact_and_gaussian_grids_are_close_in_total_variation() {
    let bec = ChannelSpec::bec(0.4).unwrap();
    let exact = realization_grid_discrete(&bec, 1024, RealizationSource::ExactBinomial, 1e-10).unwrap();
    let gauss = realization_grid_discrete(&bec, 1024, RealizationSource::GaussianApprox, 1e-10).unwrap();
    assert_eq!(exact.cells.len(), gauss.cells.len());
    let tv: f64 = 0.5 * exact.cells.iter().zip(&gauss.cells).map(|(a, b)| (a.mass - b.mass).abs()).sum::<f64>();
    assert!(tv < 0.02, "tv = {tv}");

    let binom = Binomial::new(0.4, 1024).unwrap();
    for c in &exact.cells {
        let k = (c.e * 1024.0).round() as u64;
        assert!((c.mass - binom.pmf(k)).abs() <= 1e-12 + 1e-9 * c.mass);
    }
}

#[test]
fn baseline_closed_forms() {
    let e = Ensemble::regular(3, 6, 1024).unwrap();
    let cfg = DEConfig::default();
    let star = find_threshold(&e, ChannelKind::Bec, &cfg, 1e-9).unwrap();
    let gauss = GridOptions { discrete: RealizationSource::GaussianApprox, ..GridOptions::default() };

    let at_star = threshold_baseline(&e, &ChannelSpec::bec(star).unwrap(), star, &gauss).unwrap();
    assert!((at_star - 0.5).abs() < 1e-12);

    let got = threshold_baseline(&e, &ChannelSpec::bec(0.40).unwrap(), star, &gauss).unwrap();
    let std = (0.4f64 * 0.6 / 1024.0).sqrt();
    let want = 1.0 - Normal::new(0.0, 1.0).unwrap().cdf((star - 0.40) / std);
    assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");

    let far = e.with_block_length(1 << 20).unwrap();
    assert!(threshold_baseline(&far, &ChannelSpec::bec(0.30).unwrap(), star, &gauss).unwrap() < 1e-100);
}

#[test]
fn awgn_grid_statistics() {
    // Q(1) maps back to a mean LLR of 2
    assert!((2.0 * q_inv(q_func(1.0)).unwrap().powi(2) - 2.0).abs() < 1e-12);
    let x = q_inv(0.5 - 1e-12).unwrap();
    assert!(2.0 * x * x < 1e-20);

    let c = ChannelSpec::awgn_sigma(0.85).unwrap();
    let grid = realization_grid_awgn(&c, 1024, 512, 6.0).unwrap();
    assert!((grid.total_mass() - 1.0).abs() < 1e-9);
    let p_c = q_func(1.0 / 0.85);
    let mean: f64 = grid.cells.iter().map(|c| c.e * c.mass).sum();
    assert!((mean - p_c).abs() < 1e-6 * p_c);
    let var: f64 = grid.cells.iter().map(|c| (c.e - p_c).powi(2) * c.mass).sum();
    let want = p_c * (1.0 - p_c) / 1024.0;
    assert!((var - want).abs() < 0.01 * want, "{var} vs {want}");
    // 30-digit references
    for (x, want) in [
        (-8.0, 6.22096057427174e-16),
        (-4.0, 3.16712418331199212537707567e-5),
        (-1.3, 9.68004845856103255417155607e-2),
        (1.3, 9.03199515414389674458284439e-1),
    ] {
        assert!((normal_cdf(x) / want - 1.0).abs() < 1e-13, "{x}");
    }
}

#[test]
fn prediction_edge_cases() {
    let cfg = DEConfig::default();
    let opts = GridOptions::default();
    for n in [1, 64, 4096] {
        let e = Ensemble::regular(3, 6, n).unwrap();
        assert_eq!(predict(&e, &ChannelSpec::bec(0.0).unwrap(), &cfg, &opts).unwrap().p_b, 0.0);
    }
    let e = Ensemble::regular(3, 6, 1024).unwrap();
    let empty = predict_curve(&e, &[], &cfg, &opts).unwrap();
    assert!(empty.points.is_empty());
    let pts = sweep_points(ChannelKind::Bec, Axis::Epsilon, &[0.41], 0.5).unwrap();
    let curve = predict_curve(&e, &pts, &cfg, &opts).unwrap();
    let single = predict(&e, &ChannelSpec::bec(0.41).unwrap(), &cfg, &opts).unwrap();
    assert_eq!(curve.points[0].p_b, single.p_b);
}

#[test]
fn sweeps_are_monotone() {
    let cfg = DEConfig::default();
    let opts = GridOptions::default();
    let e = Ensemble::regular(3, 6, 1024).unwrap();
    let values = "0.30:0.44:0.01".parse::<SweepRange>().unwrap().values();
    let curve = predict_curve(&e, &sweep_points(ChannelKind::Bec, Axis::Epsilon, &values, 0.5).unwrap(), &cfg, &opts)
        .unwrap();
    assert_eq!(curve.points.len(), 15);
    for w in curve.points.windows(2) {
        assert!(w[0].p_b <= w[1].p_b, "{:?}", w);
    }

    let values = "1.0:2.5:0.25".parse::<SweepRange>().unwrap().values();
    let curve = predict_curve(&e, &sweep_points(ChannelKind::Awgn, Axis::EbN0, &values, 0.5).unwrap(), &cfg, &opts)
        .unwrap();
    for w in curve.points.windows(2) {
        assert!(w[0].p_b >= w[1].p_b, "{:?}", w);
    }
}

#[test]
fn predictions_concentrate_with_block_length() {
    let cfg = DEConfig::default();
    let opts = GridOptions::default();
    // well below threshold minus three realization standard deviations at n = 256
    let c = ChannelSpec::bec(0.33).unwrap();
    let p: Vec<f64> = [256, 1024, 4096]
        .iter()
        .map(|&n| predict(&Ensemble::regular(3, 6, n).unwrap(), &c, &cfg, &opts).unwrap().p_b)
        .collect();
    assert!(p[0] > p[1] && p[1] >= p[2], "{p:?}");
}

#[test]
fn awgn_refinement_is_stable() {
    let cfg = DEConfig::default();
    let e = Ensemble::regular(3, 6, 1024).unwrap();
    for db in [1.5, 1.75, 2.0] {
        let c = ChannelSpec::awgn_ebn0(db, 0.5).unwrap();
        let coarse = predict(&e, &c, &cfg, &GridOptions { awgn_cells: 256, ..GridOptions::default() }).unwrap().p_b;
        let fine = predict(&e, &c, &cfg, &GridOptions::default()).unwrap().p_b;
        assert!(((coarse - fine) / fine).abs() < 0.01, "{db} dB: {coarse} vs {fine}");
    }
}

#[test]
fn simulation_below_waterfall_is_clean() {
    let e = Ensemble::regular(3, 6, 1024).unwrap();
    let cfg = SimConfig { max_frames: 2000, min_bit_errors: 100, l_max: 200, seed: 11, ..SimConfig::default() };
    let r = run_monte_carlo(&e, &ChannelSpec::bec(0.30).unwrap(), &cfg).unwrap();
    assert!(r.ber < 1e-4, "{r:?}");
}
