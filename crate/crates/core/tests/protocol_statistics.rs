use vncert_core::discrim::{Mode, Scheme};
use vncert_core::protocol::{
    run_trial_both_unknown, run_trial_both_unknown_with_pair, run_trial_one_fixed, sample_outcome,
    simulate, simulate_with_threads, Decision, Estimate, Hypothesis, ScenarioConfig,
};
use vncert_core::qcore::{vn_measure_channel, QState, Unitary, VonNeumannMeasurement};
use vncert_core::rng::RngStream;

fn band(p: f64, n: u64) -> f64 {
    4.0 * (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn uniform_sampling_frequencies() {
    let d = 5;
    let n = 100_000u64;
    let mut rng = RngStream::new(1, 0);
    let probs = vec![1.0 / d as f64; d];
    let mut hist = vec![0u64; d];
    for _ in 0..n {
        hist[sample_outcome(&probs, &mut rng).unwrap()] += 1;
    }
    let p = 1.0 / d as f64;
    for h in hist {
        assert!((h as f64 / n as f64 - p).abs() <= band(p, n), "{h}");
    }
}

#[test]
fn hadamard_basis_outcomes_are_fair() {
    let h = Unitary::fourier(2);
    let rho = QState::new(vncert_core::qcore::CMatrix::from_real_diag(&[1.0, 0.0])).unwrap();
    let out = vn_measure_channel(&VonNeumannMeasurement::new(h), &rho).unwrap();
    let probs: Vec<f64> = out.matrix().diagonal().iter().map(|z| z.re).collect();
    let n = 100_000u64;
    let mut rng = RngStream::new(2, 0);
    let zeros = (0..n)
        .filter(|_| sample_outcome(&probs, &mut rng).unwrap() == 0)
        .count();
    assert!((zeros as f64 / n as f64 - 0.5).abs() <= band(0.5, n));
}

#[test]
fn null_hypothesis_never_rejected_in_single_trials() {
    let mut rng = RngStream::new(3, 0);
    for d in [2, 3, 6] {
        for _ in 0..2_000 {
            let t = run_trial_both_unknown(d, Hypothesis::H0, &mut rng).unwrap();
            assert_ne!(t.labels[0], t.labels[1]);
            assert_eq!(t.decision, Decision::AcceptH0);
            assert!(t.labels.iter().all(|&l| l < d));
        }
        let u = vncert_core::haar::sample_haar_unitary(d, &mut rng);
        for _ in 0..2_000 {
            let t = run_trial_one_fixed(d, &u, Hypothesis::H0, &mut rng).unwrap();
            assert_eq!(t.click, Some(true));
            assert_eq!(t.decision, Decision::AcceptH0);
        }
    }
}

#[test]
fn one_fixed_click_rate_under_alternative() {
    let d = 4;
    let n = 100_000u64;
    let mut rng = RngStream::new(4, 0);
    let u = Unitary::identity(d);
    let clicks = (0..n)
        .filter(|_| {
            run_trial_one_fixed(d, &u, Hypothesis::H1, &mut rng)
                .unwrap()
                .click
                == Some(true)
        })
        .count();
    assert!((clicks as f64 / n as f64 - 0.25).abs() <= band(0.25, n));
}

#[test]
fn probe_pair_does_not_matter() {
    let d = 4;
    let n = 40_000u64;
    let rate = |pair: (usize, usize), stream: u64| {
        let mut rng = RngStream::new(5, stream);
        let accepted = (0..n)
            .filter(|_| {
                run_trial_both_unknown_with_pair(d, pair, Hypothesis::H1, &mut rng)
                    .unwrap()
                    .decision
                    == Decision::AcceptH0
            })
            .count();
        accepted as f64 / n as f64
    };
    let a = rate((0, 1), 0);
    let b = rate((1, 3), 1);
    let p = 0.75;
    let se = (2.0 * p * (1.0 - p) / n as f64).sqrt();
    assert!((a - b).abs() <= 4.0 * se, "{a} vs {b}");
    assert!((a - p).abs() <= band(p, n));
}

#[test]
fn symmetric_estimates_hit_closed_forms() {
    for (mode, d) in [
        (Mode::BothUnknown, 3),
        (Mode::OneFixed, 3),
        (Mode::OneFixed, 4),
    ] {
        let r = simulate(&ScenarioConfig::new(
            mode,
            Scheme::Symmetric,
            d,
            100_000,
            21,
        ))
        .unwrap();
        let e = r.p_succ.unwrap();
        assert!(e.within(4.0), "{mode} d={d}: {e:?}");
    }
    let r = simulate(&ScenarioConfig::new(
        Mode::OneFixed,
        Scheme::Symmetric,
        4,
        100_000,
        22,
    ))
    .unwrap();
    assert!((r.analytic.p_succ - 0.875).abs() < 1e-15);
}

#[test]
fn asymmetric_estimates_and_structural_zero() {
    let cfg = ScenarioConfig::new(Mode::BothUnknown, Scheme::Asymmetric, 3, 100_000, 23);
    let r = simulate(&cfg).unwrap();
    assert_eq!(r.p1.unwrap().count, 0);
    assert_eq!(r.p1.unwrap().value, 0.0);
    assert!(r.p2.unwrap().within(4.0));
    assert_eq!(r.n_trials, 200_000);

    let cfg = ScenarioConfig::new(Mode::OneFixed, Scheme::Asymmetric, 3, 100_000, 24)
        .with_fixed_u(Unitary::fourier(3));
    let r = simulate(&cfg).unwrap();
    assert_eq!(r.p1.unwrap().count, 0);
    assert!(r.p2.unwrap().within(4.0));
}

#[test]
fn symmetric_matches_mean_of_asymmetric_errors() {
    let d = 3;
    for mode in Mode::ALL {
        let s = simulate(&ScenarioConfig::new(
            mode,
            Scheme::Symmetric,
            d,
            100_000,
            31,
        ))
        .unwrap();
        let a = simulate(&ScenarioConfig::new(
            mode,
            Scheme::Asymmetric,
            d,
            100_000,
            32,
        ))
        .unwrap();
        let (p1, p2, ps) = (a.p1.unwrap(), a.p2.unwrap(), s.p_succ.unwrap());
        let predicted = 1.0 - (p1.value + p2.value) / 2.0;
        let se = (ps.stderr.powi(2) + (p1.stderr.powi(2) + p2.stderr.powi(2)) / 4.0).sqrt();
        assert!((ps.value - predicted).abs() <= 4.0 * se, "{mode}");
    }
}

#[test]
fn success_is_monotone_in_dimension() {
    let run = |mode, d| {
        simulate(&ScenarioConfig::new(
            mode,
            Scheme::Symmetric,
            d,
            100_000,
            40 + d as u64,
        ))
        .unwrap()
        .p_succ
        .unwrap()
    };
    let both: Vec<Estimate> = [2, 4, 8]
        .iter()
        .map(|&d| run(Mode::BothUnknown, d))
        .collect();
    let fixed: Vec<Estimate> = [2, 4, 8].iter().map(|&d| run(Mode::OneFixed, d)).collect();
    for w in both.windows(2) {
        assert!(w[0].value > w[1].value);
        assert!(w[1].value > 0.5);
    }
    for w in fixed.windows(2) {
        assert!(w[0].value < w[1].value);
    }
    for e in both.iter().chain(&fixed) {
        assert!(e.within(4.0), "{e:?}");
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    for (mode, scheme) in [
        (Mode::BothUnknown, Scheme::Symmetric),
        (Mode::OneFixed, Scheme::Asymmetric),
    ] {
        let cfg = ScenarioConfig::new(mode, scheme, 3, 12_345, 77);
        let one = simulate_with_threads(&cfg, 1).unwrap();
        let four = simulate_with_threads(&cfg, 4).unwrap();
        assert_eq!(one, four);
        assert_eq!(one, simulate(&cfg).unwrap());
    }
    let a = simulate(&ScenarioConfig::new(
        Mode::BothUnknown,
        Scheme::Symmetric,
        3,
        5_000,
        1,
    ))
    .unwrap();
    let b = simulate(&ScenarioConfig::new(
        Mode::BothUnknown,
        Scheme::Symmetric,
        3,
        5_000,
        2,
    ))
    .unwrap();
    assert_ne!(a.counts, b.counts);
}

#[test]
fn invalid_configs_name_the_field() {
    let e = simulate(&ScenarioConfig::new(
        Mode::BothUnknown,
        Scheme::Symmetric,
        1,
        10,
        0,
    ))
    .unwrap_err();
    assert!(e.to_string().contains('d'), "{e}");
    let e = simulate(&ScenarioConfig::new(
        Mode::BothUnknown,
        Scheme::Symmetric,
        2,
        0,
        0,
    ))
    .unwrap_err();
    assert!(e.to_string().contains("trials"), "{e}");
    let cfg = ScenarioConfig::new(Mode::OneFixed, Scheme::Symmetric, 3, 10, 0)
        .with_fixed_u(Unitary::identity(2));
    let e = simulate(&cfg).unwrap_err();
    assert!(e.to_string().contains("fixed_u"), "{e}");
}
