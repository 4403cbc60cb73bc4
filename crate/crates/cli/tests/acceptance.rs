//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p vncert-cli --test acceptance`.

use std::process::Command;
use std::time::{Duration, Instant};

use vncert_core::discrim::{
    achieved_distance, analytic_table, antisymmetric_state, both_unknown_output_states,
    diamond_bounds, error_mean_inequality, fixed_vs_random_difference, lemma_wj_check,
    omega_both_unknown, omega_one_fixed, one_fixed_output_states, Mode, Scheme,
};
use vncert_core::haar::{
    avg_choi_meas_uu, avg_choi_meas_uv, avg_choi_unitary_uu, choi_difference_j,
    choi_two_measurements, choi_two_unitaries, mc_average_choi, sample_haar_unitary,
};
use vncert_core::protocol::{simulate, ScenarioConfig};
use vncert_core::qcore::Unitary;
use vncert_core::rng::RngStream;
use vncert_core::verify::min_random_margin;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within_budget(o: Outcome, elapsed: Duration, budget: Option<Duration>) -> Outcome {
    match budget {
        Some(b) if elapsed > b => outcome(
            false,
            format!(
                "{}; took {:.1}s, budget {:.0}s",
                o.detail,
                elapsed.as_secs_f64(),
                b.as_secs_f64()
            ),
        ),
        _ => o,
    }
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    for d in 2..=16 {
        let x = d as f64;
        let both = analytic_table(Mode::BothUnknown, d).unwrap();
        let fixed = analytic_table(Mode::OneFixed, d).unwrap();
        let pairs = [
            (both.p_succ, 0.5 + 1.0 / (2.0 * x)),
            (both.p_err, 0.5 - 1.0 / (2.0 * x)),
            (both.p1, 0.0),
            (both.p2, 1.0 - 1.0 / x),
            (fixed.p_succ, 1.0 - 1.0 / (2.0 * x)),
            (fixed.p_err, 1.0 / (2.0 * x)),
            (fixed.p1, 0.0),
            (fixed.p2, 1.0 / x),
        ];
        for (got, want) in pairs {
            worst = worst.max((got - want).abs());
        }
        if both.ancilla_needed || !fixed.ancilla_needed {
            return outcome(false, format!("ancilla flags wrong at d={d}"));
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max deviation {worst:.1e} over d=2..16"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for d in 2..=8 {
        let target = 2.0 / d as f64;
        let j = choi_difference_j(d).unwrap().value;
        let b = diamond_bounds(&j).unwrap();
        let anti = antisymmetric_state(d, 0, 1).unwrap().projector();
        let got = achieved_distance(&j, &anti).unwrap();
        worst = worst
            .max((b.upper - target).abs())
            .max((got - target).abs());
    }
    outcome(
        worst <= 1e-10,
        format!("max |bound − 2/d|, |achieved − 2/d| = {worst:.1e}, d=2..8"),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    for d in 2..=8 {
        let target = 2.0 - 2.0 / d as f64;
        let b =
            diamond_bounds(&fixed_vs_random_difference(&Unitary::identity(d)).unwrap()).unwrap();
        worst = worst
            .max((b.lower - target).abs())
            .max((b.upper - target).abs());
    }
    outcome(
        worst <= 1e-10,
        format!("max |bound − (2 − 2/d)| = {worst:.1e}, d=2..8"),
    )
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut worst_rel = 0.0f64;
    let mut worst_w = 0.0f64;
    for d in 2..=8 {
        let r = lemma_wj_check(d).unwrap();
        let rel = r.residual / r.tolerance * 1e-10;
        worst_rel = worst_rel.max(rel);
        worst_w = worst_w
            .max(r.w_unitarity_defect)
            .max(r.w_hermiticity_defect);
        ok &= r.residual <= r.tolerance
            && r.w_unitarity_defect <= 1e-12
            && r.w_hermiticity_defect <= 1e-12;
    }
    outcome(
        ok,
        format!("max relative residual {worst_rel:.1e}, max W defect {worst_w:.1e}, d=2..8"),
    )
}

fn criterion_5() -> Outcome {
    let d = 2;
    let n = 20_000;
    let mut rng = RngStream::new(2024, 5);
    let uu = mc_average_choi(
        |r| {
            let u = sample_haar_unitary(d, r);
            Ok(choi_two_unitaries(&u, &u))
        },
        n,
        &mut rng,
    )
    .unwrap();
    let muu = mc_average_choi(
        |r| {
            let u = sample_haar_unitary(d, r);
            Ok(choi_two_measurements(&u, &u))
        },
        n,
        &mut rng,
    )
    .unwrap();
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
    let dists = [
        uu.matrix()
            .frobenius_distance(avg_choi_unitary_uu(d).unwrap().value.matrix()),
        muu.matrix()
            .frobenius_distance(avg_choi_meas_uu(d).unwrap().value.matrix()),
        muv.matrix()
            .frobenius_distance(avg_choi_meas_uv(d).unwrap().value.matrix()),
    ];
    outcome(
        dists.iter().all(|&x| x <= 0.05),
        format!(
            "frobenius distances {:.4} / {:.4} / {:.4} (n={n})",
            dists[0], dists[1], dists[2]
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut zs = Vec::new();
    for mode in Mode::ALL {
        for d in [2, 3, 5] {
            let cfg = ScenarioConfig::new(mode, Scheme::Symmetric, d, 200_000, 600 + d as u64);
            let e = simulate(&cfg).unwrap().p_succ.unwrap();
            ok &= e.within(4.0);
            zs.push(format!("{}:{d} z={:+.2}", mode, e.z.unwrap_or(f64::NAN)));
        }
    }
    outcome(ok, zs.join(", "))
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for mode in Mode::ALL {
        for d in [2, 3, 5] {
            let cfg = ScenarioConfig::new(mode, Scheme::Asymmetric, d, 200_000, 700 + d as u64);
            let r = simulate(&cfg).unwrap();
            let (p1, p2) = (r.p1.unwrap(), r.p2.unwrap());
            ok &= p1.count == 0 && p1.n == 200_000 && p2.n == 200_000 && p2.within(4.0);
            notes.push(format!(
                "{}:{d} p1={}/{} p2 z={:+.2}",
                mode,
                p1.count,
                p1.n,
                p2.z.unwrap_or(f64::NAN)
            ));
        }
    }
    outcome(ok, notes.join(", "))
}

fn criterion_8() -> Outcome {
    let mut worst_random = f64::INFINITY;
    for d in 2..=4 {
        let mut rng = RngStream::new(8080, d as u64);
        worst_random = worst_random.min(min_random_margin(d, 1000, &mut rng).unwrap());
    }
    let mut worst_eq = 0.0f64;
    let mut rng = RngStream::new(8081, 0);
    for d in 2..=8 {
        let (r0, r1) = both_unknown_output_states(d, 0, 1).unwrap();
        let m = error_mean_inequality(&r0, &r1, &omega_both_unknown(d).unwrap()).unwrap();
        worst_eq = worst_eq.max(m.abs());
        let u = sample_haar_unitary(d, &mut rng);
        let (r0, r1) = one_fixed_output_states(&u).unwrap();
        let m = error_mean_inequality(&r0, &r1, &omega_one_fixed(&u).unwrap()).unwrap();
        worst_eq = worst_eq.max(m.abs());
    }
    outcome(
        worst_random >= -1e-12 && worst_eq <= 1e-10,
        format!(
            "min random margin {worst_random:.3e} (3×1000), max |margin| at optimum {worst_eq:.1e}"
        ),
    )
}

fn simulate_payload(threads: &str, mode: &str, scheme: &str) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_vncert"))
        .args([
            "simulate",
            "--mode",
            mode,
            "--scheme",
            scheme,
            "--dim",
            "3",
            "--trials",
            "50000",
            "--seed",
            "7",
            "--threads",
            threads,
        ])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"duration_s\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn criterion_9() -> Outcome {
    let mut ok = true;
    for (mode, scheme) in [("both-unknown", "symmetric"), ("one-fixed", "asymmetric")] {
        let a = simulate_payload("1", mode, scheme);
        let b = simulate_payload("1", mode, scheme);
        let c = simulate_payload("4", mode, scheme);
        ok &= a == b && a.replace("\"threads\": 1", "\"threads\": 4") == c;
        let strip = |s: &str| s.split("\"result\"").nth(1).map(str::to_string);
        ok &= strip(&a).is_some() && strip(&a) == strip(&c);
    }
    outcome(
        ok,
        "simulate --seed 7 payloads identical across runs and 1 vs 4 threads",
    )
}

fn main() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check, Option<u64>); 9] = [
        ("closed forms for d=2..16", criterion_1, None),
        (
            "both-unknown bound 2/d and saturation, d=2..8",
            criterion_2,
            Some(10),
        ),
        ("one-fixed bounds 2-2/d, d=2..8", criterion_3, None),
        (
            "(WJ)^2 = J^2 with W unitary and Hermitian, d=2..8",
            criterion_4,
            None,
        ),
        (
            "closed-form averages vs Monte Carlo, d=2",
            criterion_5,
            Some(30),
        ),
        ("symmetric simulation within 4 sigma", criterion_6, Some(60)),
        ("asymmetric simulation, exact zero p1", criterion_7, None),
        (
            "error-mean inequality and equality cases",
            criterion_8,
            None,
        ),
        ("reproducibility of simulate", criterion_9, None),
    ];
    let mut failed = Vec::new();
    for (i, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let elapsed = start.elapsed();
        let o = within_budget(o, elapsed, budget.map(Duration::from_secs));
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag} criterion {}: {name} ({}) [{:.2}s]",
            i + 1,
            o.detail,
            elapsed.as_secs_f64()
        );
        if !o.passed {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
