//! Dodgson scores and winners.
//!
//! Two exact routes are provided. [`exact_score_bfs`] is the literal
//! definition: breadth-first search over profiles, one adjacent swap per
//! edge. [`exact_score_lift`] uses the fact that only swaps moving the
//! designated candidate `c` upward change contests involving `c`, so an
//! optimal sequence lifts `c` by some amount in each vote; lifting by `ℓ`
//! passes exactly the `ℓ` candidates directly above it. A dynamic program
//! over clamped residual deficits then finds the cheapest combination.
//!
//! [`greedy_score`] and [`greedy_winner`] are the fast self-knowingly correct
//! heuristics: on nice triples the score is the deficit sum.

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::election::{deficits, is_nice, CandidateId, DodgsonTriple, Election};
use crate::skc::SkcOutput;

/// Largest residual-deficit state space the lift solver will allocate.
pub const LIFT_STATE_LIMIT: u128 = 10_000_000;
/// Largest profile space, `(m!)^n`, the breadth-first oracle will explore.
pub const BFS_STATE_LIMIT: u128 = 1_000_000;

/// Number of adjacent swaps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Score(pub u64);

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("{solver} state space of {states} exceeds the limit {limit} (m={m}, n={n})")]
    GuardExceeded {
        solver: &'static str,
        states: u128,
        limit: u128,
        m: usize,
        n: usize,
    },
}

/// Minimum total lift of the designated candidate that clears every deficit.
pub fn exact_score_lift(t: &DodgsonTriple) -> Result<Score, SolverError> {
    let e = &t.election;
    let c = t.c;
    let def = deficits(t);
    let opponents: Vec<(CandidateId, usize)> = def.iter().filter(|&(_, k)| k > 0).collect();
    if opponents.is_empty() {
        return Ok(Score(0));
    }

    // Mixed-radix encoding of the remaining deficit per opponent.
    let mut slot = vec![usize::MAX; e.m()];
    let mut stride = Vec::with_capacity(opponents.len());
    let mut states: u128 = 1;
    for (i, &(d, k)) in opponents.iter().enumerate() {
        slot[d.index()] = i;
        stride.push(states as usize);
        states *= k as u128 + 1;
        if states > LIFT_STATE_LIMIT {
            return Err(SolverError::GuardExceeded {
                solver: "lift",
                states: opponents.iter().fold(1u128, |acc, &(_, k)| acc.saturating_mul(k as u128 + 1)),
                limit: LIFT_STATE_LIMIT,
                m: e.m(),
                n: e.n(),
            });
        }
    }
    let states = states as usize;
    let start: usize = opponents.iter().zip(&stride).map(|(&(_, k), &s)| k * s).sum();

    const UNREACHED: u64 = u64::MAX;
    let mut cost = vec![UNREACHED; states];
    cost[start] = 0;
    let mut next = vec![UNREACHED; states];
    let mut hi = start;

    for vote in e.votes() {
        // Slots of the candidates above c, closest first; None for opponents
        // whose deficit is already zero.
        let above: Vec<Option<usize>> = vote.ranking()[..vote.position(c)]
            .iter()
            .rev()
            .map(|d| Some(slot[d.index()]).filter(|&s| s != usize::MAX))
            .collect();
        next[..=hi].copy_from_slice(&cost[..=hi]);
        for (s, &base) in cost[..=hi].iter().enumerate() {
            if base == UNREACHED {
                continue;
            }
            let mut state = s;
            for (lift, passed) in above.iter().enumerate() {
                if let Some(i) = *passed {
                    if (state / stride[i]) % (opponents[i].1 + 1) > 0 {
                        state -= stride[i];
                    }
                }
                let total = base + lift as u64 + 1;
                if total < next[state] {
                    next[state] = total;
                }
            }
        }
        std::mem::swap(&mut cost, &mut next);
        hi = (0..=hi).rev().find(|&s| cost[s] != UNREACHED).unwrap_or(0);
    }
    debug_assert_ne!(cost[0], UNREACHED, "lifting c to the top of every vote always wins");
    Ok(Score(cost[0]))
}

fn factorial(m: usize) -> u128 {
    (1..=m as u128).product()
}

/// All permutations of `0..m` in lexicographic order.
fn permutations(m: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..m as u8).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..m.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..m).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
}

/// Breadth-first distance, one adjacent swap in one vote per step, from the
/// given profile to the nearest profile where `c` is the Condorcet winner.
pub fn exact_score_bfs(t: &DodgsonTriple) -> Result<Score, SolverError> {
    let e = &t.election;
    let (m, n) = (e.m(), e.n());
    let fact = factorial(m);
    let total = fact.checked_pow(n as u32).filter(|&s| s <= BFS_STATE_LIMIT);
    let Some(total) = total else {
        return Err(SolverError::GuardExceeded {
            solver: "bfs",
            states: fact.saturating_pow(n as u32),
            limit: BFS_STATE_LIMIT,
            m,
            n,
        });
    };
    let total = total as usize;
    let fact = fact as usize;
    let c = t.c.index();

    let perms = permutations(m);
    let index_of = |p: &[u8]| perms.binary_search_by(|q| q.as_slice().cmp(p)).unwrap();
    // beats[p] = bitmask of opponents that c outranks in permutation p
    let beats: Vec<u64> = perms
        .iter()
        .map(|p| {
            let pc = p.iter().position(|&x| x as usize == c).unwrap();
            p[pc + 1..].iter().fold(0u64, |acc, &d| acc | 1 << d)
        })
        .collect();
    let swaps: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            (0..m.saturating_sub(1))
                .map(|k| {
                    let mut q = p.clone();
                    q.swap(k, k + 1);
                    index_of(&q)
                })
                .collect()
        })
        .collect();

    let need = e.majority();
    let decode = |mut s: usize, digits: &mut Vec<usize>| {
        for d in digits.iter_mut() {
            *d = s % fact;
            s /= fact;
        }
    };
    let accepts = |digits: &[usize]| {
        (0..m).filter(|&d| d != c).all(|d| {
            digits.iter().filter(|&&p| beats[p] >> d & 1 == 1).count() >= need
        })
    };

    let start = e
        .votes()
        .iter()
        .rev()
        .fold(0usize, |acc, v| {
            let p: Vec<u8> = v.ranking().iter().map(|x| x.index() as u8).collect();
            acc * fact + index_of(&p)
        });
    let mut dist = vec![u32::MAX; total];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut digits = vec![0usize; n];
    let mut place = vec![1usize; n];
    for i in 1..n {
        place[i] = place[i - 1] * fact;
    }
    while let Some(s) = queue.pop_front() {
        decode(s, &mut digits);
        if accepts(&digits) {
            return Ok(Score(dist[s] as u64));
        }
        for (v, &p) in digits.iter().enumerate() {
            for &q in &swaps[p] {
                let next = s - p * place[v] + q * place[v];
                if dist[next] == u32::MAX {
                    dist[next] = dist[s] + 1;
                    queue.push_back(next);
                }
            }
        }
    }
    unreachable!("some profile always makes c the Condorcet winner")
}

/// All candidates of minimum exact Dodgson score, in index order.
pub fn dodgson_winners_exact(e: &Election) -> Result<Vec<CandidateId>, SolverError> {
    let scores = exact_scores(e)?;
    let best = scores.iter().min().copied().expect("at least one candidate");
    Ok(e.candidates().filter(|c| scores[c.index()] == best).collect())
}

/// Exact score of every candidate, indexed by candidate.
pub fn exact_scores(e: &Election) -> Result<Vec<Score>, SolverError> {
    (0..e.m())
        .into_par_iter()
        .map(|c| exact_score_lift(&DodgsonTriple { election: e.clone(), c: CandidateId(c) }))
        .collect()
}

/// Deficit sum, flagged definite exactly when the triple is nice. On
/// non-nice triples the deficit sum is only a placeholder.
pub fn greedy_score(t: &DodgsonTriple) -> SkcOutput<Score> {
    let nice = is_nice(t);
    let value = Score(nice.deficits.sum() as u64);
    if nice.nice {
        SkcOutput::definitely(value)
    } else {
        SkcOutput::maybe(value)
    }
}

/// Whether `c` is a Dodgson winner, decided from the greedy scores of all
/// candidates; definite only when every one of them is.
pub fn greedy_winner(e: &Election, c: CandidateId) -> SkcOutput<bool> {
    let outs: Vec<SkcOutput<Score>> = e
        .candidates()
        .map(|d| greedy_score(&DodgsonTriple { election: e.clone(), c: d }))
        .collect();
    let best = outs.iter().map(|o| o.value).min().expect("at least one candidate");
    let member = outs[c.index()].value <= best;
    if outs.iter().all(SkcOutput::is_definite) {
        SkcOutput::definitely(member)
    } else {
        SkcOutput::maybe(member)
    }
}
