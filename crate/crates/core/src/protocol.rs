//! Outcome-level Monte Carlo simulation of the black-box discrimination games.
//!
//! Each trial samples the hidden unitaries, samples measurement labels from
//! the exact Born probabilities and applies a classical decision rule:
//!
//! - both unknown: antisymmetric probe on `X ⊗ Y`, accept `H0` iff the two
//!   box labels differ (the effect `1 − T`);
//! - one fixed: maximally entangled probe, the box measures `X`, the ancilla
//!   collapses to `v̄_i` and is tested against `ū_i` (the block effect
//!   `Σ_i |i⟩⟨i| ⊗ |ū_i⟩⟨ū_i|`); accept `H0` iff that test clicks.
//!
//! Trials are grouped in fixed-size batches; batch `b` always draws from the
//! same RNG stream, so results do not depend on the number of workers.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrim::{analytic_table, AnalyticRow, Mode, Scheme};
use crate::error::{Error, Result};
use crate::haar::sample_haar_unitary;
use crate::qcore::{Unitary, C64};
use crate::rng::RngStream;

/// Trials per RNG stream.
pub const BATCH_SIZE: u64 = 1000;

/// Probability masses at or below this are rounding residue and never sampled.
pub const MASS_FLOOR: f64 = 1e-14;

const STREAM_SYMMETRIC: u64 = 0;
const STREAM_H0: u64 = 1 << 40;
const STREAM_H1: u64 = 2 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    H0,
    H1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    AcceptH0,
    AcceptH1,
}

impl Decision {
    pub fn matches(self, h: Hypothesis) -> bool {
        matches!(
            (self, h),
            (Decision::AcceptH0, Hypothesis::H0) | (Decision::AcceptH1, Hypothesis::H1)
        )
    }
}

/// Decision procedure applied to the sampled labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionRule {
    /// Accept `H0` iff the two box labels differ.
    LabelsEqual,
    /// Accept `H0` iff the conditioned ancilla test clicks.
    AncillaClick,
}

impl DecisionRule {
    pub fn for_mode(mode: Mode) -> Self {
        match mode {
            Mode::BothUnknown => DecisionRule::LabelsEqual,
            Mode::OneFixed => DecisionRule::AncillaClick,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub hypothesis: Hypothesis,
    /// Box labels: `(i, j)` for both-unknown, `(i)` for one-fixed.
    pub labels: Vec<usize>,
    /// Ancilla test result (one-fixed only).
    pub click: Option<bool>,
    pub decision: Decision,
}

/// Draws an index from `probs`.
///
/// Entries down to `-1e-12` are clipped to zero, masses at or below
/// [`MASS_FLOOR`] are dropped, and the rest is renormalized. Total mass more
/// than `1e-9` away from one is rejected.
pub fn sample_outcome(probs: &[f64], rng: &mut RngStream) -> Result<usize> {
    if probs.is_empty() {
        return Err(Error::Probability("empty distribution".into()));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < -1e-12) {
        return Err(Error::Probability(format!("invalid mass {p}")));
    }
    let total: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Probability(format!("masses sum to {total}")));
    }
    let kept: Vec<f64> = probs
        .iter()
        .map(|&p| if p > MASS_FLOOR { p } else { 0.0 })
        .collect();
    let kept_total: f64 = kept.iter().sum();
    let r = rng.random::<f64>() * kept_total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in kept.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if r < acc {
            return Ok(i);
        }
    }
    Ok(last)
}

/// One both-unknown trial with the antisymmetric probe `(|01⟩ − |10⟩)/√2`.
pub fn run_trial_both_unknown(
    d: usize,
    hypothesis: Hypothesis,
    rng: &mut RngStream,
) -> Result<TrialOutcome> {
    run_trial_both_unknown_with_pair(d, (0, 1), hypothesis, rng)
}

/// As [`run_trial_both_unknown`] with the probe `(|pq⟩ − |qp⟩)/√2`.
pub fn run_trial_both_unknown_with_pair(
    d: usize,
    (p, q): (usize, usize),
    hypothesis: Hypothesis,
    rng: &mut RngStream,
) -> Result<TrialOutcome> {
    if d < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: d });
    }
    if p >= q || q >= d {
        return Err(Error::InvalidIndex(format!(
            "probe pair ({p}, {q}) for d={d}"
        )));
    }
    let u = sample_haar_unitary(d, rng);
    let w = match hypothesis {
        Hypothesis::H0 => u.clone(),
        Hypothesis::H1 => sample_haar_unitary(d, rng),
    };
    let probs = pair_label_distribution(&u, &w, p, q);
    let k = sample_outcome(&probs, rng)?;
    let (i, j) = (k / d, k % d);
    let decision = if i != j {
        Decision::AcceptH0
    } else {
        Decision::AcceptH1
    };
    Ok(TrialOutcome {
        hypothesis,
        labels: vec![i, j],
        click: None,
        decision,
    })
}

/// `p(i, j) = |⟨u_i ⊗ w_j|a⟩|²` for `|a⟩ = (|pq⟩ − |qp⟩)/√2`.
fn pair_label_distribution(u: &Unitary, w: &Unitary, p: usize, q: usize) -> Vec<f64> {
    let d = u.dim();
    let (um, wm) = (u.matrix(), w.matrix());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut probs = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            // Column i of U evaluated at components p, q; same for W.
            let amp =
                (um[(p, i)].conj() * wm[(q, j)].conj() - um[(q, i)].conj() * wm[(p, j)].conj()) * h;
            probs.push(amp.norm_sqr());
        }
    }
    probs
}

/// One one-fixed trial with reference `fixed_u`.
pub fn run_trial_one_fixed(
    d: usize,
    fixed_u: &Unitary,
    hypothesis: Hypothesis,
    rng: &mut RngStream,
) -> Result<TrialOutcome> {
    if d < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: d });
    }
    if fixed_u.dim() != d {
        return Err(Error::dims(format!(
            "fixed unitary on {} dims for d={d}",
            fixed_u.dim()
        )));
    }
    let sampled;
    let box_u = match hypothesis {
        Hypothesis::H0 => fixed_u,
        Hypothesis::H1 => {
            sampled = sample_haar_unitary(d, rng);
            &sampled
        }
    };
    // Box label on the first half of (1/√d) Σ_k |kk⟩: p(i) = ‖b_i‖²/d.
    let label_probs: Vec<f64> = (0..d)
        .map(|i| box_u.column(i).iter().map(|z| z.norm_sqr()).sum::<f64>() / d as f64)
        .collect();
    let i = sample_outcome(&label_probs, rng)?;

    // (⟨b_i| ⊗ 1) Σ_k |kk⟩ = Σ_k conj(b_i[k]) |k⟩, so the ancilla holds b̄_i.
    let ancilla: Vec<C64> = box_u.column(i).iter().map(|z| z.conj()).collect();
    let effect: Vec<C64> = fixed_u.column(i).iter().map(|z| z.conj()).collect();
    let p_click = click_probability(&effect, &ancilla);
    let click = sample_outcome(&[p_click, 1.0 - p_click], rng)? == 0;
    let decision = if click {
        Decision::AcceptH0
    } else {
        Decision::AcceptH1
    };
    Ok(TrialOutcome {
        hypothesis,
        labels: vec![i],
        click: Some(click),
        decision,
    })
}

/// `|⟨e|ψ⟩|² / ‖ψ‖²` for a unit vector `e`.
fn click_probability(effect: &[C64], ancilla: &[C64]) -> f64 {
    let overlap: C64 = effect.iter().zip(ancilla).map(|(e, a)| e.conj() * a).sum();
    let norm: f64 = ancilla.iter().map(|z| z.norm_sqr()).sum();
    (overlap.norm_sqr() / norm).min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub scheme: Scheme,
    pub d: usize,
    /// Total trials (symmetric) or trials per hypothesis (asymmetric).
    pub trials: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_u: Option<Unitary>,
}

impl ScenarioConfig {
    pub fn new(mode: Mode, scheme: Scheme, d: usize, trials: u64, seed: u64) -> Self {
        ScenarioConfig {
            mode,
            scheme,
            d,
            trials,
            seed,
            fixed_u: None,
        }
    }

    pub fn with_fixed_u(mut self, u: Unitary) -> Self {
        self.fixed_u = Some(u);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidConfig {
                field: "d",
                reason: format!("dimension must be ≥ 2, got {}", self.d),
            });
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig {
                field: "trials",
                reason: "need at least one trial".into(),
            });
        }
        if let Some(u) = &self.fixed_u {
            if self.mode != Mode::OneFixed {
                return Err(Error::InvalidConfig {
                    field: "fixed_u",
                    reason: "only meaningful in one-fixed mode".into(),
                });
            }
            if u.dim() != self.d {
                return Err(Error::InvalidConfig {
                    field: "fixed_u",
                    reason: format!("unitary is {}-dimensional, d is {}", u.dim(), self.d),
                });
            }
        }
        Ok(())
    }

    fn reference(&self) -> Unitary {
        self.fixed_u
            .clone()
            .unwrap_or_else(|| Unitary::identity(self.d))
    }
}

/// Empirical probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    #[serde(rename = "p_hat")]
    pub value: f64,
    pub stderr: f64,
    pub analytic: f64,
    /// `(value − analytic)/stderr`; `0` when both sides agree exactly and
    /// absent when the standard error vanishes without agreement.
    pub z: Option<f64>,
    pub count: u64,
    pub n: u64,
}

impl Estimate {
    pub fn from_counts(count: u64, n: u64, analytic: f64) -> Self {
        let value = count as f64 / n as f64;
        let stderr = (value * (1.0 - value) / n as f64).sqrt();
        let z = if stderr > 0.0 {
            Some((value - analytic) / stderr)
        } else if value == analytic {
            Some(0.0)
        } else {
            None
        };
        Estimate {
            value,
            stderr,
            analytic,
            z,
            count,
            n,
        }
    }

    /// `|value − analytic| ≤ k · stderr`, with exact agreement required when
    /// the standard error is zero.
    pub fn within(&self, k: f64) -> bool {
        (self.value - self.analytic).abs() <= k * self.stderr
    }
}

/// Raw tallies, summed across batches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub h0_trials: u64,
    /// Type I events: `H0` true, `H1` accepted.
    pub h0_rejected: u64,
    pub h1_trials: u64,
    /// Type II events: `H1` true, `H0` accepted.
    pub h1_accepted: u64,
}

impl Counts {
    fn record(&mut self, outcome: &TrialOutcome) {
        match outcome.hypothesis {
            Hypothesis::H0 => {
                self.h0_trials += 1;
                if outcome.decision == Decision::AcceptH1 {
                    self.h0_rejected += 1;
                }
            }
            Hypothesis::H1 => {
                self.h1_trials += 1;
                if outcome.decision == Decision::AcceptH0 {
                    self.h1_accepted += 1;
                }
            }
        }
    }

    fn merge(self, o: Counts) -> Counts {
        Counts {
            h0_trials: self.h0_trials + o.h0_trials,
            h0_rejected: self.h0_rejected + o.h0_rejected,
            h1_trials: self.h1_trials + o.h1_trials,
            h1_accepted: self.h1_accepted + o.h1_accepted,
        }
    }

    pub fn total(&self) -> u64 {
        self.h0_trials + self.h1_trials
    }

    pub fn correct(&self) -> u64 {
        self.total() - self.h0_rejected - self.h1_accepted
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub config: ScenarioConfig,
    pub rule: DecisionRule,
    pub n_trials: u64,
    pub counts: Counts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_succ: Option<Estimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1: Option<Estimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2: Option<Estimate>,
    pub analytic: AnalyticRow,
}

fn run_trial(
    config: &ScenarioConfig,
    reference: &Unitary,
    h: Hypothesis,
    rng: &mut RngStream,
) -> Result<TrialOutcome> {
    match config.mode {
        Mode::BothUnknown => run_trial_both_unknown(config.d, h, rng),
        Mode::OneFixed => run_trial_one_fixed(config.d, reference, h, rng),
    }
}

/// Runs `n` trials in batches; `pick` chooses each trial's hypothesis.
fn run_batches<F>(
    config: &ScenarioConfig,
    reference: &Unitary,
    n: u64,
    stream_base: u64,
    pick: F,
) -> Result<Counts>
where
    F: Fn(&mut RngStream) -> Hypothesis + Sync,
{
    let batches = n.div_ceil(BATCH_SIZE);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = RngStream::new(config.seed, stream_base + b);
            let size = BATCH_SIZE.min(n - b * BATCH_SIZE);
            let mut counts = Counts::default();
            for _ in 0..size {
                let h = pick(&mut rng);
                counts.record(&run_trial(config, reference, h, &mut rng)?);
            }
            Ok(counts)
        })
        .try_reduce(Counts::default, |a, b| Ok(a.merge(b)))
}

/// Runs the scenario on the current rayon pool.
pub fn simulate(config: &ScenarioConfig) -> Result<SimResult> {
    config.validate()?;
    let reference = config.reference();
    let analytic = analytic_table(config.mode, config.d)?;
    let n = config.trials;
    let mut result = SimResult {
        config: config.clone(),
        rule: DecisionRule::for_mode(config.mode),
        n_trials: 0,
        counts: Counts::default(),
        p_succ: None,
        p1: None,
        p2: None,
        analytic,
    };
    match config.scheme {
        Scheme::Symmetric => {
            let counts = run_batches(config, &reference, n, STREAM_SYMMETRIC, |rng| {
                if rng.random::<bool>() {
                    Hypothesis::H1
                } else {
                    Hypothesis::H0
                }
            })?;
            result.p_succ = Some(Estimate::from_counts(counts.correct(), n, analytic.p_succ));
            result.counts = counts;
            result.n_trials = n;
        }
        Scheme::Asymmetric => {
            let c0 = run_batches(config, &reference, n, STREAM_H0, |_| Hypothesis::H0)?;
            let c1 = run_batches(config, &reference, n, STREAM_H1, |_| Hypothesis::H1)?;
            result.p1 = Some(Estimate::from_counts(c0.h0_rejected, n, analytic.p1));
            result.p2 = Some(Estimate::from_counts(c1.h1_accepted, n, analytic.p2));
            result.counts = c0.merge(c1);
            result.n_trials = 2 * n;
        }
    }
    Ok(result)
}

/// Runs the scenario on a dedicated pool with `threads` workers.
pub fn simulate_with_threads(config: &ScenarioConfig, threads: usize) -> Result<SimResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig {
            field: "threads",
            reason: e.to_string(),
        })?;
    pool.install(|| simulate(config))
}
