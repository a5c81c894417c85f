//! Hand-derived and Monte Carlo oracles, computed independently of the
//! library code paths they check.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use mscorr_core::association::{kendall_tau, partial_correlation, simple_ols};
use mscorr_core::crosscorr::{correlation_matrix, pearson, pearson_pvalue, SignificanceMode};
use mscorr_core::panel::{compute_returns, load_prices, preprocess, RawPriceSeries};
use mscorr_core::pipeline::{execute, run, PipelineConfig, RunMode};
use mscorr_core::scaling::{aggregate_returns, structure_function, ScalingConfig, ScalingTable};
use mscorr_core::surrogates::marginal_gaussianize;
use mscorr_core::synth::{evenly_spaced, generate, MarketKind, MarketRecipe, Tail};

fn d(day: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(2023, 3, day).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

#[test]
fn disjoint_files_add_up() {
    let a = "AAA,2023-03-01,1\nAAA,2023-03-02,2\nBBB,2023-03-01,3\n";
    let b = "CCC,2023-03-01,1\nDDD,2023-03-02,2\nEEE,2023-03-01,3\n";
    assert_eq!(load_prices(&[a, b]).unwrap().len(), 2 + 3);
}

#[test]
fn single_gap_is_dragged() {
    // the second ticker only supplies the middle date to the axis
    let s = vec![
        RawPriceSeries::new("X", vec![(d(1), 100.0), (d(3), 110.0)]).unwrap(),
        RawPriceSeries::new("Y", vec![(d(1), 1.0), (d(2), 1.0), (d(3), 1.0)]).unwrap(),
    ];
    let p = preprocess(&s, 0.5).unwrap();
    assert_eq!(p.dates, vec![d(1), d(2), d(3)]);
    assert_eq!(p.prices[0], vec![100.0, 100.0, 110.0]);
    assert_eq!(p.fill_mask[0], vec![false, true, false]);
    assert_eq!(p.fill_mask[1], vec![false; 3]);
}

#[test]
fn short_series_is_cut() {
    let long: Vec<_> = (0..100).map(|i| (d(1) + chrono::Days::new(i), 10.0)).collect();
    let short: Vec<_> = (0..85).map(|i| (d(1) + chrono::Days::new(i), 20.0)).collect();
    let s = vec![
        RawPriceSeries::new("L", long).unwrap(),
        RawPriceSeries::new("S", short).unwrap(),
    ];
    assert_eq!(preprocess(&s, 0.90).unwrap().tickers, vec!["L"]);
}

#[test]
fn returns_by_hand() {
    let s = vec![
        RawPriceSeries::new("X", vec![(d(1), 100.0), (d(2), 100.0), (d(3), 110.0)]).unwrap(),
    ];
    let r = compute_returns(&preprocess(&s, 1.0).unwrap()).unwrap();
    let h = 1.1f64.ln() / 2.0;
    assert!((r.returns[0][0] + h).abs() < 1e-15);
    assert!((r.returns[0][1] - h).abs() < 1e-15);
    assert!((r.column_means_removed[0] - h).abs() < 1e-15);
}

#[test]
fn aggregation_by_hand() {
    assert_eq!(aggregate_returns(&[1.0, -1.0, 2.0], 2).unwrap(), vec![0.0, 1.0]);
}

#[test]
fn constant_series_moments_are_powers() {
    let ones = vec![1.0; 200];
    let q = [0.1, 0.5, 1.0];
    let taus: Vec<usize> = (1..=19).collect();
    for c in structure_function(&ones, &q, &taus).unwrap() {
        for (tau, m) in c.points {
            let want = (tau as f64).powf(c.q);
            assert!((m - want).abs() <= 1e-12 * want, "q {} tau {}: {} vs {}", c.q, tau, m, want);
        }
    }
}

#[test]
fn pearson_by_hand() {
    // means 2.5 and 2.75; sxy = 6.5, sxx = 5, syy = 8.75
    let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 5.0]).unwrap();
    assert!((r - 6.5 / (5.0f64 * 8.75).sqrt()).abs() < 1e-15);
    assert!((r - 0.9827).abs() < 1e-4);
}

/// Two-sided tail of Student-t(df) by composite Simpson integration of
/// the density over [|t|, 400] (the remaining tail is below 1e-30).
fn t_tail_by_simpson(t: f64, df: f64) -> f64 {
    let ln_c = statrs::function::gamma::ln_gamma((df + 1.0) / 2.0)
        - statrs::function::gamma::ln_gamma(df / 2.0)
        - 0.5 * (df * std::f64::consts::PI).ln();
    let f = |x: f64| (ln_c - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
    let (a, b, n) = (t.abs(), 400.0, 400_000);
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    2.0 * s * h / 3.0
}

#[test]
fn pvalue_against_integrated_density() {
    let t = 0.5 * (18.0f64 / 0.75).sqrt();
    assert!((t - 2.4495).abs() < 1e-4);
    let want = t_tail_by_simpson(t, 18.0);
    let got = pearson_pvalue(0.5, 20).unwrap();
    assert!((got - want).abs() < 1e-9, "{} vs {}", got, want);
    assert!((got - 0.0246).abs() < 5e-4);
}

#[test]
fn kendall_five_points_by_enumeration() {
    let x: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 5.0];
    let y: [f64; 5] = [3.0, 1.0, 2.0, 5.0, 4.0];
    let mut s = 0i32;
    for i in 0..5 {
        for j in i + 1..5 {
            s += ((x[j] - x[i]) * (y[j] - y[i])).signum() as i32;
        }
    }
    assert_eq!(s, 4);
    assert_eq!(kendall_tau(&x, &y).unwrap().value, s as f64 / 10.0);
}

#[test]
fn independent_regression_has_small_r2() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = normals(&mut rng, 4096);
    let y = normals(&mut rng, 4096);
    assert!(simple_ols(&x, &y).unwrap().r2 < 0.05);
}

#[test]
fn partial_correlation_monte_carlo() {
    // a, b, c share one factor with loading 1: all pairwise correlations 0.5
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 4096;
    let f = normals(&mut rng, n);
    let mk = |rng: &mut ChaCha8Rng| -> Vec<f64> { f.iter().map(|f| f + rng.sample::<f64, _>(StandardNormal)).collect() };
    let (a, b, c) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
    let p = partial_correlation(&a, &b, &c).unwrap().value;
    assert!((p - 1.0 / 3.0).abs() < 0.05, "{}", p);
    let (rab, rac, rbc) = (pearson(&a, &b).unwrap(), pearson(&a, &c).unwrap(), pearson(&b, &c).unwrap());
    let closed = (rab - rac * rbc) / ((1.0 - rac * rac) * (1.0 - rbc * rbc)).sqrt();
    assert!((p - closed).abs() < 1e-10);

    let (a, b, c) = (normals(&mut rng, n), normals(&mut rng, n), normals(&mut rng, n));
    assert!(partial_correlation(&a, &b, &c).unwrap().value.abs() < 0.05);
}

#[test]
fn independent_columns_have_small_rho_bar() {
    for seed in 0..20 {
        let p = generate(&MarketRecipe::new(20, 4096, seed, MarketKind::GaussianIid)).unwrap();
        let s = correlation_matrix(&p, 0.05, SignificanceMode::Filtered).unwrap();
        for rb in &s.rho_bar {
            assert!(rb.abs() < 0.01, "seed {}: {}", seed, rb);
        }
    }
}

#[test]
fn gaussianized_moments() {
    let p = generate(&MarketRecipe::new(5, 4096, 4, MarketKind::StudentT { nu: 3.0 })).unwrap();
    let g = marginal_gaussianize(&p, 4).unwrap();
    for col in &g.returns {
        let m = col.iter().sum::<f64>() / col.len() as f64;
        let v = col.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / col.len() as f64;
        assert!(m.abs() < 0.05 && (v - 1.0).abs() < 0.05, "mean {} var {}", m, v);
    }
}

#[test]
fn one_factor_matches_population_correlation() {
    let betas = evenly_spaced(0.2, 1.5, 20);
    for seed in 0..5 {
        let recipe = MarketRecipe::new(
            20,
            4096,
            seed,
            MarketKind::OneFactor {
                betas: betas.clone(),
                tail: Tail::Gaussian,
            },
        );
        let p = generate(&recipe).unwrap();
        let s = correlation_matrix(&p, 0.05, SignificanceMode::All).unwrap();
        let mut worst = 0.0f64;
        for i in 0..20 {
            for j in 0..20 {
                if i != j {
                    let (bi, bj) = (betas[i], betas[j]);
                    let want = bi * bj / ((bi * bi + 1.0) * (bj * bj + 1.0)).sqrt();
                    worst = worst.max((s.rho(i, j) - want).abs());
                }
            }
        }
        assert!(worst < 0.05, "seed {}: {}", seed, worst);
        let filtered = correlation_matrix(&p, 0.05, SignificanceMode::Filtered).unwrap();
        let tau = kendall_tau(&betas, &filtered.rho_bar).unwrap();
        assert!(tau.value > 0.9, "seed {}: {}", seed, tau.value);
        // all significant coefficients are positive here, so dropping the
        // rest cannot lift rho_bar above its all-mode value
        assert!((0..400).all(|k| s.pvalue[k] >= 0.05 || s.rho[k] > 0.0));
        for (f, a) in filtered.rho_bar.iter().zip(&s.rho_bar) {
            assert!(f.abs() <= a.abs() + 1e-15);
        }
    }
}

#[test]
fn student_t_is_concave_with_a_above_half() {
    let cfg = ScalingConfig::default();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for seed in 0..50 {
        let p = generate(&MarketRecipe::new(4, 4096, seed, MarketKind::StudentT { nu: 3.0 })).unwrap();
        let t = ScalingTable::compute(&p, &cfg).unwrap();
        a.extend(t.a_hat());
        b.extend(t.b_hat());
    }
    assert!(median(b) < 0.0 && median(a) > 0.5);
}

#[test]
fn cascade_is_concave() {
    let cfg = ScalingConfig::default();
    let mut margins = Vec::new();
    for seed in 0..50 {
        let p = generate(&MarketRecipe::new(4, 4096, seed, MarketKind::Cascade { depth: 12, spread: 0.3 })).unwrap();
        for r in ScalingTable::compute(&p, &cfg).unwrap().results {
            margins.push(r.zeta[4] / 0.5 - r.zeta[9]);
        }
    }
    let m = median(margins);
    assert!(m > 0.01, "{}", m);
}

fn synth_config(kind: &str, mode: RunMode) -> PipelineConfig {
    let mut cfg = PipelineConfig::from_text(&format!(
        "synth.kind = {}\nsynth.stocks = 16\nsynth.days = 1024\nseed = 9\n",
        kind
    ))
    .unwrap();
    cfg.mode = mode;
    cfg
}

#[test]
fn shuffled_run_keeps_rho_bar_column() {
    let column = |mode| -> Vec<f64> {
        run(&synth_config("coupled", mode)).unwrap().files["scatter_B.csv"]
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect()
    };
    let (raw, shuffled) = (column(RunMode::Raw), column(RunMode::Shuffled));
    assert_eq!(raw.len(), 16);
    for (a, b) in raw.iter().zip(&shuffled) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn raw_and_shuffled_reports_carry_kendall_blocks() {
    for mode in [RunMode::Raw, RunMode::Shuffled] {
        let (res, _) = execute(&synth_config("coupled", mode)).unwrap();
        assert!(res.report.kendall_b_rho_bar.value.is_finite());
        assert!(res.report.kendall_a_rho_bar.value.is_finite());
        assert!(res.report.capitalization.is_some());
    }
}
