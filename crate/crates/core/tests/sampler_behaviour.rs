mod common;

use active_gsp::inference::HyperParams;
use active_gsp::model::{beta_for_snr, expected_signal_power, observe, sample_prior, NoiseModel};
use active_gsp::sampler::{run_active, run_random, FirstNodeRule, HyperMode, SamplerConfig, SamplingContext, StopReason};
use active_gsp::spectral::GraphFilter;
use common::small_filter;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn setup(n: usize, seed: u64) -> (GraphFilter, SamplingContext) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = small_filter(&mut rng, n, 1e-3);
    let ctx = SamplingContext::new(&f);
    (f, ctx)
}

fn fixed(alpha: f64, beta: f64, m_max: usize) -> SamplerConfig {
    SamplerConfig {
        m_max,
        hyper: HyperMode::Fixed {
            params: HyperParams::new(alpha, beta).unwrap(),
        },
        ..Default::default()
    }
}

#[test]
fn trace_is_numbered_and_bounded() {
    let (f, ctx) = setup(15, 1);
    let truth = sample_prior(&f, 2.0, 10).unwrap();
    let noise = NoiseModel::new(50.0).unwrap();
    let config = SamplerConfig {
        m_max: 25,
        ..Default::default()
    };
    for trace in [
        run_active(&ctx, &truth, noise, &config, 3).unwrap(),
        run_random(&ctx, &truth, noise, &config, 3).unwrap(),
    ] {
        assert_eq!(trace.records.len(), 25);
        assert_eq!(trace.stop_reason, StopReason::Budget);
        for (i, r) in trace.records.iter().enumerate() {
            assert_eq!(r.t, i + 1);
            assert!(r.node < 15);
            assert!(r.alpha_hat > 0.0 && r.beta_hat > 0.0);
            assert!(r.rel_error.is_finite() && r.trace_c > 0.0);
        }
    }
}

#[test]
fn noise_free_active_visits_every_node_first() {
    let (f, ctx) = setup(12, 2);
    let truth = sample_prior(&f, 1.0, 4).unwrap();
    let noise = NoiseModel::new(1e12).unwrap();
    let trace = run_active(&ctx, &truth, noise, &fixed(1.0, 1e12, 12), 5).unwrap();
    let mut nodes: Vec<usize> = trace.records.iter().map(|r| r.node).collect();
    nodes.sort();
    nodes.dedup();
    assert_eq!(nodes.len(), 12);
}

#[test]
fn trace_of_c_never_grows_with_fixed_hyperparameters() {
    let (f, ctx) = setup(20, 3);
    let truth = sample_prior(&f, 3.0, 1).unwrap();
    let noise = NoiseModel::new(10.0).unwrap();
    let config = fixed(3.0, 10.0, 40);
    for trace in [
        run_active(&ctx, &truth, noise, &config, 8).unwrap(),
        run_random(&ctx, &truth, noise, &config, 8).unwrap(),
    ] {
        for w in trace.records.windows(2) {
            assert!(w[1].trace_c <= w[0].trace_c * (1.0 + 1e-12));
            assert_eq!(w[1].em_iters, 0);
        }
    }
}

#[test]
fn final_error_rarely_exceeds_first() {
    let (f, ctx) = setup(20, 4);
    let beta = beta_for_snr(&f, 2.0, 15.0).unwrap();
    let noise = NoiseModel::new(beta).unwrap();
    let config = SamplerConfig {
        m_max: 40,
        ..Default::default()
    };
    let mut ok = 0;
    for trial in 0..100 {
        let truth = sample_prior(&f, 2.0, 1000 + trial).unwrap();
        let trace = run_active(&ctx, &truth, noise, &config, trial).unwrap();
        let first = trace.records[0].rel_error;
        let last = trace.records.last().unwrap().rel_error;
        ok += (last <= first) as usize;
    }
    assert!(ok >= 95, "{ok}/100");
}

#[test]
fn random_baseline_is_uniform() {
    let (f, ctx) = setup(8, 5);
    let truth = sample_prior(&f, 1.0, 2).unwrap();
    let noise = NoiseModel::new(5.0).unwrap();
    let config = fixed(1.0, 5.0, 1000);
    let mut counts = [0usize; 8];
    for seed in 0..10 {
        for r in run_random(&ctx, &truth, noise, &config, seed).unwrap().records {
            counts[r.node] += 1;
        }
    }
    let expected = 10_000.0 / 8.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 7 degrees of freedom, 0.999 quantile
    assert!(chi2 < 24.32, "chi2 {chi2}, counts {counts:?}");
}

#[test]
fn runs_are_reproducible() {
    let (f, ctx) = setup(15, 6);
    let truth = sample_prior(&f, 1.0, 3).unwrap();
    let noise = NoiseModel::new(20.0).unwrap();
    let config = SamplerConfig {
        m_max: 30,
        ..Default::default()
    };
    assert_eq!(
        run_active(&ctx, &truth, noise, &config, 11).unwrap(),
        run_active(&ctx, &truth, noise, &config, 11).unwrap()
    );
    assert_eq!(
        run_random(&ctx, &truth, noise, &config, 11).unwrap(),
        run_random(&ctx, &truth, noise, &config, 11).unwrap()
    );
    assert_ne!(
        run_random(&ctx, &truth, noise, &config, 11).unwrap(),
        run_random(&ctx, &truth, noise, &config, 12).unwrap()
    );
}

#[test]
fn random_first_node_matches_baseline_step_one() {
    let (f, ctx) = setup(15, 7);
    let truth = sample_prior(&f, 1.0, 9).unwrap();
    let noise = NoiseModel::new(20.0).unwrap();
    let config = SamplerConfig {
        m_max: 10,
        first_node_rule: FirstNodeRule::Random,
        ..Default::default()
    };
    for seed in 0..20 {
        let a = run_active(&ctx, &truth, noise, &config, seed).unwrap();
        let r = run_random(&ctx, &truth, noise, &config, seed).unwrap();
        assert_eq!(a.records[0], r.records[0]);
    }
}

#[test]
fn default_first_node_is_max_prior_variance() {
    let (f, ctx) = setup(15, 8);
    let truth = sample_prior(&f, 1.0, 9).unwrap();
    let noise = NoiseModel::new(20.0).unwrap();
    let trace = run_active(&ctx, &truth, noise, &SamplerConfig::default(), 0).unwrap();
    let v = ctx.prior_variances();
    assert!(v.iter().all(|&x| x <= v[trace.records[0].node]));
}

#[test]
fn threshold_stops_early() {
    let (f, ctx) = setup(10, 9);
    let truth = sample_prior(&f, 1.0, 5).unwrap();
    let noise = NoiseModel::new(1e6).unwrap();
    let config = SamplerConfig {
        m_max: 200,
        stop_c: Some(0.05),
        hyper: HyperMode::Fixed {
            params: HyperParams::new(1.0, 1e6).unwrap(),
        },
        ..Default::default()
    };
    let trace = run_active(&ctx, &truth, noise, &config, 1).unwrap();
    assert_eq!(trace.stop_reason, StopReason::Threshold);
    let n = trace.records.len();
    assert!((5..200).contains(&n), "{n}");
    let last = trace.records.last().unwrap();
    assert!(last.trace_c / trace.estimate.norm_squared() <= 0.05);
}

#[test]
fn snr_calibration_matches_simulated_noise() {
    let (f, _) = setup(20, 10);
    let alpha = 10.0;
    let beta = beta_for_snr(&f, alpha, 15.0).unwrap();
    let noise = NoiseModel::new(beta).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut signal, mut err) = (0.0, 0.0);
    for seed in 0..2000 {
        let truth = sample_prior(&f, alpha, seed).unwrap();
        for node in 0..20 {
            let y = observe(&truth, node, noise, &mut rng).unwrap();
            signal += truth.values()[node].powi(2);
            err += (y - truth.values()[node]).powi(2);
        }
    }
    let snr_db = 10.0 * (signal / err).log10();
    assert!((snr_db - 15.0).abs() < 15.0 * 0.05, "{snr_db}");
    assert!((signal / 40_000.0 / expected_signal_power(&f, alpha) - 1.0).abs() < 0.05);
}
