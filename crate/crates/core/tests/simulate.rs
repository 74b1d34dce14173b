//! Monte Carlo sampler and episode playback.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Beta, ChiSquared, Continuous, ContinuousCDF};

use twoperiod::first_mover::{first_mover_prob, FirstMoverModel};
use twoperiod::pricing::{
    beta_quantile, marginal_pdf, reference_market, BetaShape, MarketModel, Seller,
};
use twoperiod::quadrature::{integrate_1d, integrate_2d, QuadratureSettings};
use twoperiod::simulate::{
    compare_strategies, estimate_expected_price, sample_first_mover, sample_prices,
    SimulationReport,
};
use twoperiod::strategy::{AcceptanceTable, DecisionModel, StrategySpec};

fn model() -> DecisionModel {
    let market = reference_market();
    let fm = FirstMoverModel::new(10.0, market.range).unwrap();
    DecisionModel::new(market, fm, QuadratureSettings::default()).unwrap()
}

fn statrs_beta(shape: &BetaShape) -> Beta {
    Beta::new(shape.alpha(), shape.beta()).unwrap()
}

/// `P(X_L <= a, X_H <= b)` in standardized units, conditioning on the
/// background factor and using an independent beta implementation.
fn joint_cdf(market: &MarketModel, a: f64, b: f64) -> f64 {
    let (low, high, z) = (
        statrs_beta(&market.low),
        statrs_beta(&market.high),
        statrs_beta(&market.background),
    );
    let f = |t: f64| {
        let fl = if t <= a { 1.0 } else { low.cdf(a / t) };
        let fh = if t <= b { 1.0 } else { high.cdf(b / t) };
        fl * fh * z.pdf(t)
    };
    let s = QuadratureSettings::new(1e-12, 1e-12, 60, 0.0).unwrap();
    let mut knots = vec![0.0, a, b, 1.0];
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    knots
        .windows(2)
        .map(|w| integrate_1d(f, w[0], w[1], &s).unwrap())
        .sum()
}

fn draw_prices(market: &MarketModel, n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| sample_prices(market, &mut rng).unwrap())
        .collect()
}

#[test]
fn low_price_mean_and_support() {
    let market = reference_market();
    let xs = draw_prices(&market, 1_000_000, 7);
    let n = xs.len() as f64;
    let mean = xs.iter().map(|p| p.0).sum::<f64>() / n;
    let var = xs.iter().map(|p| (p.0 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let expected = 1400.0 + 200.0 * (2.5 / 7.0) * 0.5;
    assert!(
        (mean - expected).abs() <= 3.0 * (var / n).sqrt(),
        "{mean} vs {expected}"
    );
    assert!(xs
        .iter()
        .all(|&(l, h)| (1400.0..=1600.0).contains(&l) && (1400.0..=1600.0).contains(&h)));

    // Empirical cdf of X_L against the conditioning formula, on a fine grid.
    let mut sorted: Vec<f64> = xs.iter().map(|p| p.0).collect();
    sorted.sort_by(f64::total_cmp);
    let mut ks: f64 = 0.0;
    for i in 1..200 {
        let x = 1400.0 + i as f64;
        let empirical = sorted.partition_point(|&s| s <= x) as f64 / n;
        let exact = joint_cdf(&market, (x - 1400.0) / 200.0, 1.0);
        ks = ks.max((empirical - exact).abs());
    }
    assert!(ks < 0.005, "KS distance {ks}");

    // Histogram density around 1450 against the quadrature marginal.
    let (lo, hi) = (1445.0, 1455.0);
    let hist = sorted.iter().filter(|&&x| x > lo && x <= hi).count() as f64 / n / (hi - lo);
    let s = QuadratureSettings::default();
    let exact = integrate_1d(
        |x| marginal_pdf(x, Seller::Low, &market, &s).unwrap(),
        lo,
        hi,
        &s,
    )
    .unwrap()
        / (hi - lo);
    assert!((hist - exact).abs() <= 0.02 * exact, "{hist} vs {exact}");
    let point = marginal_pdf(1450.0, Seller::Low, &market, &s).unwrap();
    assert!((hist - point).abs() <= 0.02 * point);
}

#[test]
fn beta_sampler_passes_ks_for_each_shape() {
    let n = 20_000;
    let critical = 1.628 / (n as f64).sqrt(); // 1% level
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &(a, b) in &[(2.5, 4.5), (4.5, 1.5), (2.5, 2.5), (10.0, 10.0), (0.5, 0.5)] {
        let shape = BetaShape::new(a, b).unwrap();
        let reference = Beta::new(a, b).unwrap();
        let mut xs: Vec<f64> = (0..n)
            .map(|_| beta_quantile(rand::Rng::random::<f64>(&mut rng), &shape).unwrap())
            .collect();
        xs.sort_by(f64::total_cmp);
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let c = reference.cdf(x);
                (c - i as f64 / n as f64)
                    .abs()
                    .max(((i + 1) as f64 / n as f64 - c).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < critical, "({a},{b}): D = {d}");
    }
}

#[test]
fn joint_histogram_is_chi_square_consistent() {
    let market = reference_market();
    let n = 400_000;
    let xs = draw_prices(&market, n, 3);
    let k = 8;
    let mut counts = vec![0.0; k * k];
    for &(l, h) in &xs {
        let i = (((l - 1400.0) / 200.0 * k as f64) as usize).min(k - 1);
        let j = (((h - 1400.0) / 200.0 * k as f64) as usize).min(k - 1);
        counts[i * k + j] += 1.0;
    }
    let edges: Vec<f64> = (0..=k).map(|i| i as f64 / k as f64).collect();
    let cdf: Vec<Vec<f64>> = edges
        .iter()
        .map(|&a| edges.iter().map(|&b| joint_cdf(&market, a, b)).collect())
        .collect();
    let mass = |i: usize, j: usize| cdf[i + 1][j + 1] - cdf[i][j + 1] - cdf[i + 1][j] + cdf[i][j];
    assert!((cdf[k][k] - 1.0).abs() < 1e-9);

    // Pool sparse cells so every bin expects at least five draws.
    let (mut stat, mut bins) = (0.0, 0usize);
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for i in 0..k {
        for j in 0..k {
            let expected = mass(i, j) * n as f64;
            if expected < 5.0 {
                pooled_obs += counts[i * k + j];
                pooled_exp += expected;
            } else {
                stat += (counts[i * k + j] - expected).powi(2) / expected;
                bins += 1;
            }
        }
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp.max(1e-12);
        bins += 1;
    }
    let critical = ChiSquared::new((bins - 1) as f64)
        .unwrap()
        .inverse_cdf(0.99);
    assert!(
        stat < critical,
        "chi2 = {stat} on {} dof (critical {critical})",
        bins - 1
    );

    // The density-based cell masses agree with the cdf-based ones.
    let s = QuadratureSettings::default_2d();
    for &(i, j) in &[(1usize, 4usize), (3, 3)] {
        let rect = |c: usize| (1400.0 + 25.0 * c as f64, 1425.0 + 25.0 * c as f64);
        let via_pdf = integrate_2d(
            |x, y| {
                twoperiod::pricing::joint_pdf(x, y, &market, &QuadratureSettings::default())
                    .unwrap()
            },
            rect(i),
            rect(j),
            &s,
        )
        .unwrap();
        assert!(
            (via_pdf - mass(i, j)).abs() < 1e-5,
            "cell ({i},{j}): {via_pdf} vs {}",
            mass(i, j)
        );
    }
}

#[test]
fn first_mover_frequencies() {
    let fm = FirstMoverModel::new(10.0, reference_market().range).unwrap();
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let freq = |x: f64, y: f64, rng: &mut ChaCha8Rng| {
        (0..n)
            .filter(|_| sample_first_mover(x, y, &fm, rng).unwrap() == Seller::Low)
            .count() as f64
            / n as f64
    };
    let tie = freq(1480.0, 1480.0, &mut rng);
    assert!((tie - 0.5).abs() <= 3.0 * (0.25 / n as f64).sqrt(), "{tie}");
    assert_eq!(freq(1600.0, 1400.0, &mut rng), 1.0);
    assert_eq!(freq(1400.0, 1600.0, &mut rng), 0.0);
    let p = first_mover_prob(1500.0, 1450.0, &fm).unwrap();
    let f = freq(1500.0, 1450.0, &mut rng);
    assert!(
        (f - p).abs() <= 3.0 * (p * (1.0 - p) / n as f64).sqrt(),
        "{f} vs {p}"
    );
}

#[test]
fn acceptance_rates_and_paid_prices() {
    let m = model();
    let reports = compare_strategies(
        &[StrategySpec::AlwaysAccept, StrategySpec::AlwaysReject],
        &m,
        20_000,
        9,
    )
    .unwrap();
    assert_eq!(reports[0].accept_rate, 1.0);
    assert_eq!(reports[1].accept_rate, 0.0);
    for r in &reports {
        assert_eq!(r.n, 20_000);
        assert_eq!(r.seed, 9);
        assert!((1400.0..=1600.0).contains(&r.mean_paid));
    }
}

// Independent numpy simulation, 2e7 episodes (mean, standard error).
const NUMPY: [(f64, f64); 4] = [
    (1440.227_445_509_294, 0.005_822_954_536_053_751),
    (1470.461_193_618_692, 0.008_464_757_952_993_188),
    (1438.175_677_983_600_3, 0.005_710_341_408_956_067),
    (1435.008_311_258_766, 0.005_053_865_575_790_177),
];

#[test]
fn agrees_with_independent_simulation() {
    let m = model();
    let strategies = [
        StrategySpec::AlwaysReject,
        StrategySpec::AlwaysAccept,
        StrategySpec::Threshold(1434.424),
        StrategySpec::GuessingSurface,
    ];
    let reports = compare_strategies(&strategies, &m, 200_000, 2016).unwrap();
    for (r, &(mean, se)) in reports.iter().zip(&NUMPY) {
        let combined = (r.std_err.powi(2) + se * se).sqrt();
        assert!(
            (r.mean_paid - mean).abs() <= 3.0 * combined,
            "{r:?} vs {mean}"
        );
    }
    assert!(
        reports[2].mean_paid < reports[0].mean_paid && reports[2].mean_paid < reports[1].mean_paid
    );
    assert!(reports[3].mean_paid <= reports[2].mean_paid);
}

#[test]
fn reproducible_and_worker_count_independent() {
    let m = model();
    let s = StrategySpec::Threshold(1434.424);
    let n = 3 * twoperiod::simulate::BLOCK_SIZE + 17;
    let run = |threads: usize| -> SimulationReport {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_expected_price(&s, &m, n, 77).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, estimate_expected_price(&s, &m, n, 77).unwrap());
    assert_ne!(one, estimate_expected_price(&s, &m, n, 78).unwrap());
    assert_eq!(one.n, n);
}

#[test]
fn common_random_numbers() {
    let m = model();
    let n = 30_000;
    let twice = compare_strategies(
        &[StrategySpec::AlwaysAccept, StrategySpec::AlwaysAccept],
        &m,
        n,
        1,
    )
    .unwrap();
    assert_eq!(twice[0], twice[1]);

    let table = AcceptanceTable::new(2, 2, vec![1.0, 0.3, 0.7, 0.0]).unwrap();
    let list = vec![
        StrategySpec::Threshold(1434.424),
        StrategySpec::GuessingSurface,
        StrategySpec::Tabulated(table),
        StrategySpec::AlwaysReject,
    ];
    let forward = compare_strategies(&list, &m, n, 4).unwrap();
    let reversed: Vec<StrategySpec> = list.iter().rev().cloned().collect();
    let backward = compare_strategies(&reversed, &m, n, 4).unwrap();
    for (a, b) in forward.iter().zip(backward.iter().rev()) {
        assert_eq!(a, b);
    }
    // Each strategy alone sees the same stream as in the batch.
    let alone = estimate_expected_price(&list[1], &m, n, 4).unwrap();
    assert_eq!(alone, forward[1]);
}
