//! Seeded sampling of uniformly random elections and Monte Carlo estimates
//! of how often the greedy heuristics have to answer `maybe`.
//!
//! Each trial draws from its own ChaCha stream keyed by `(seed, trial)`, so
//! results do not depend on how trials are split across threads.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::election::{is_nice, CandidateId, DodgsonTriple, Election, Vote};
use crate::solvers::greedy_score;

/// Random stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform ranking of `0..m` by Fisher–Yates.
pub fn sample_vote<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vote {
    let mut ranking: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        // gen_range is unbiased (rejection on the widening multiply)
        let j = rng.gen_range(0..=i);
        ranking.swap(i, j);
    }
    Vote::new(ranking).expect("shuffle of 0..m")
}

fn sample_from<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Election {
    let votes = (0..n).map(|_| sample_vote(m, rng)).collect();
    Election::new(m, votes).expect("m, n ≥ 1")
}

/// `n` independent uniform rankings over `m` candidates, fully determined
/// by `(seed, trial)`.
pub fn sample_election(m: usize, n: usize, seed: u64, trial: u64) -> Election {
    assert!(m >= 1 && n >= 1, "need m ≥ 1 and n ≥ 1");
    sample_from(m, n, &mut trial_rng(seed, trial))
}

/// Uniform Dodgson triple: an election as in [`sample_election`] followed by
/// a uniform designated candidate drawn from the same stream.
pub fn sample_triple(m: usize, n: usize, seed: u64, trial: u64) -> DodgsonTriple {
    let mut rng = trial_rng(seed, trial);
    let election = sample_from(m, n, &mut rng);
    let c = CandidateId(rng.gen_range(0..m));
    DodgsonTriple { election, c }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    /// A uniformly drawn triple is not nice.
    NotNice,
    /// Some candidate's greedy score is not definite.
    AnyCandidateMaybe,
}

impl Event {
    pub const ALL: [Event; 2] = [Event::NotNice, Event::AnyCandidateMaybe];

    pub fn name(&self) -> &'static str {
        match self {
            Event::NotNice => "not_nice",
            Event::AnyCandidateMaybe => "any_candidate_maybe",
        }
    }

    /// Analytic upper bound on the event's probability.
    pub fn bound(&self, m: usize, n: usize) -> f64 {
        match self {
            Event::NotNice => bound_lemma_a3(m, n),
            Event::AnyCandidateMaybe => bound_thm_a4(m, n),
        }
    }

    fn occurs(&self, m: usize, n: usize, seed: u64, trial: u64) -> bool {
        match self {
            Event::NotNice => !is_nice(&sample_triple(m, n, seed, trial)).nice,
            Event::AnyCandidateMaybe => {
                let e = sample_election(m, n, seed, trial);
                e.candidates().any(|c| {
                    !greedy_score(&DodgsonTriple {
                        election: e.clone(),
                        c,
                    })
                    .is_definite()
                })
            }
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Event {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "not_nice" => Ok(Event::NotNice),
            "any_candidate_maybe" => Ok(Event::AnyCandidateMaybe),
            other => Err(format!("unknown event {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencyEstimate {
    pub event: Event,
    pub m: usize,
    pub n: usize,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub seed: u64,
}

/// Counts how many of `trials` seeded trials exhibit `event`.
pub fn estimate_event(event: Event, m: usize, n: usize, trials: u64, seed: u64) -> FrequencyEstimate {
    assert!(trials >= 1, "need at least one trial");
    let successes = (0..trials)
        .into_par_iter()
        .filter(|&t| event.occurs(m, n, seed, t))
        .count() as u64;
    FrequencyEstimate {
        event,
        m,
        n,
        trials,
        successes,
        p_hat: successes as f64 / trials as f64,
        seed,
    }
}

/// `2(m−1)·e^(−n/(8m²))`: bound on the probability that a uniform triple is not nice.
pub fn bound_lemma_a3(m: usize, n: usize) -> f64 {
    assert!(m >= 2, "the bound needs m ≥ 2");
    let m = m as f64;
    2.0 * (m - 1.0) * (-(n as f64) / (8.0 * m * m)).exp()
}

/// `2(m²−m)·e^(−n/(8m²))`: bound on the probability that some candidate gets `maybe`.
pub fn bound_thm_a4(m: usize, n: usize) -> f64 {
    assert!(m >= 2, "the bound needs m ≥ 2");
    let mf = m as f64;
    2.0 * (mf * mf - mf) * (-(n as f64) / (8.0 * mf * mf)).exp()
}

/// One-sided Hoeffding upper confidence limit, clamped to `[0, 1]`.
pub fn confidence_upper(est: &FrequencyEstimate, level: f64) -> f64 {
    assert!(est.trials >= 1);
    assert!((0.0..1.0).contains(&level), "level must lie in [0, 1)");
    let slack = ((1.0 / (1.0 - level)).ln() / (2.0 * est.trials as f64)).sqrt();
    (est.p_hat + slack).clamp(0.0, 1.0)
}

/// A bound comparison for one `(event, m, n)` grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McRow {
    pub event: Event,
    pub m: usize,
    pub n: usize,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci99_upper: f64,
    /// `None` when m = 1 (no opponent, the event cannot occur).
    pub bound: Option<f64>,
    pub pass: bool,
}

pub fn mc_row(event: Event, m: usize, n: usize, trials: u64, seed: u64) -> McRow {
    let est = estimate_event(event, m, n, trials, seed);
    let ci = confidence_upper(&est, 0.99);
    let bound = (m >= 2).then(|| event.bound(m, n));
    let pass = match bound {
        Some(b) => ci <= b,
        None => est.successes == 0,
    };
    McRow {
        event,
        m,
        n,
        trials,
        successes: est.successes,
        p_hat: est.p_hat,
        ci99_upper: ci,
        bound,
        pass,
    }
}
