use vncert_core::haar::{
    avg_choi_meas_uu, avg_choi_meas_uv, avg_choi_unitary_uu, choi_two_measurements,
    choi_two_unitaries, mc_average_choi, sample_haar_unitary,
};
use vncert_core::qcore::{CMatrix, Unitary};
use vncert_core::rng::RngStream;

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn samples_are_unitary() {
    let mut rng = RngStream::new(11, 0);
    for d in 1..=6 {
        for _ in 0..20 {
            let u = sample_haar_unitary(d, &mut rng);
            assert!(u.matrix().unitarity_defect() < 1e-12);
        }
    }
}

#[test]
fn first_moment_vanishes() {
    let mut rng = RngStream::new(12, 0);
    let n = 10_000;
    let mut acc = CMatrix::zeros(2, 2);
    for _ in 0..n {
        acc = &acc + sample_haar_unitary(2, &mut rng).matrix();
    }
    let mean = acc.scale(1.0 / n as f64);
    assert!(mean.max_abs() < 0.05, "{mean:?}");
}

#[test]
fn entry_modulus_second_moment() {
    // E|u00|² = 1/d for Haar measure; 1/3 at d = 3.
    let mut rng = RngStream::new(13, 0);
    let xs: Vec<f64> = (0..10_000)
        .map(|_| sample_haar_unitary(3, &mut rng).matrix()[(0, 0)].norm_sqr())
        .collect();
    let (mean, _) = mean_and_se(&xs);
    assert!((mean - 1.0 / 3.0).abs() < 0.02, "{mean}");
}

#[test]
fn phases_are_not_biased() {
    // Without the phase fix the diagonal of Q has a positive-real bias.
    let mut rng = RngStream::new(14, 0);
    let xs: Vec<f64> = (0..20_000)
        .map(|_| sample_haar_unitary(2, &mut rng).matrix()[(0, 0)].re)
        .collect();
    let (mean, se) = mean_and_se(&xs);
    assert!(mean.abs() < 4.0 * se, "{mean} ± {se}");
}

#[test]
fn left_invariance_of_entry_statistic() {
    let d = 3;
    let mut rng = RngStream::new(15, 0);
    let fixed = sample_haar_unitary(d, &mut rng);
    let n = 20_000;
    let plain: Vec<f64> = (0..n)
        .map(|_| sample_haar_unitary(d, &mut rng).matrix()[(0, 0)].norm_sqr())
        .collect();
    let shifted: Vec<f64> = (0..n)
        .map(|_| {
            let u = sample_haar_unitary(d, &mut rng);
            fixed.compose(&u).unwrap().matrix()[(0, 0)].norm_sqr()
        })
        .collect();
    let (m1, s1) = mean_and_se(&plain);
    let (m2, s2) = mean_and_se(&shifted);
    assert!(
        (m1 - m2).abs() <= 3.0 * (s1 * s1 + s2 * s2).sqrt(),
        "{m1} vs {m2}"
    );
}

#[test]
fn closed_forms_match_monte_carlo() {
    let d = 2;
    let n = 20_000;
    let mut rng = RngStream::new(16, 0);
    let uu = mc_average_choi(
        |r| {
            let u = sample_haar_unitary(d, r);
            Ok(choi_two_unitaries(&u, &u))
        },
        n,
        &mut rng,
    )
    .unwrap();
    let dist = uu
        .matrix()
        .frobenius_distance(avg_choi_unitary_uu(d).unwrap().value.matrix());
    assert!(dist <= 0.05, "unitary uu {dist}");

    let muu = mc_average_choi(
        |r| {
            let u = sample_haar_unitary(d, r);
            Ok(choi_two_measurements(&u, &u))
        },
        n,
        &mut rng,
    )
    .unwrap();
    let dist = muu
        .matrix()
        .frobenius_distance(avg_choi_meas_uu(d).unwrap().value.matrix());
    assert!(dist <= 0.05, "meas uu {dist}");

    let muv = mc_average_choi(
        |r| {
            let u = sample_haar_unitary(d, r);
            let v = sample_haar_unitary(d, r);
            Ok(choi_two_measurements(&u, &v))
        },
        n,
        &mut rng,
    )
    .unwrap();
    let dist = muv
        .matrix()
        .frobenius_distance(&CMatrix::identity(16).scale(0.25));
    assert!(dist <= 0.05, "meas uv {dist}");
    let dist = muv
        .matrix()
        .frobenius_distance(avg_choi_meas_uv(d).unwrap().value.matrix());
    assert!(dist <= 0.05);
}

#[test]
fn adjoint_average_matches_forward_average() {
    // Φ_{U†}⊗Φ_{U†} averages to the same twirl as Φ_U⊗Φ_U.
    let d = 2;
    let n = 20_000;
    let mut rng = RngStream::new(17, 0);
    let adj = mc_average_choi(
        |r| {
            let u: Unitary = sample_haar_unitary(d, r).adjoint();
            Ok(choi_two_unitaries(&u, &u))
        },
        n,
        &mut rng,
    )
    .unwrap();
    let dist = adj
        .matrix()
        .frobenius_distance(avg_choi_unitary_uu(d).unwrap().value.matrix());
    assert!(dist <= 0.05, "{dist}");
}

#[test]
fn reproducible_for_fixed_stream() {
    let a = sample_haar_unitary(4, &mut RngStream::new(3, 9));
    let b = sample_haar_unitary(4, &mut RngStream::new(3, 9));
    assert_eq!(a, b);
    let c = sample_haar_unitary(4, &mut RngStream::new(3, 10));
    assert_ne!(a.matrix()[(0, 0)], c.matrix()[(0, 0)]);
}
