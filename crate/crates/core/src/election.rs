//! Elections over strict rankings: parsing, pairwise tallies, Condorcet
//! winners, deficits and the niceness test used by the greedy scorer.
//!
//! Candidates are plain indices `0..m`. Candidate names only exist at the
//! parsing layer (see [`parse_soc`]).

use std::fmt;

use thiserror::Error;

/// Index of a candidate, always below the election's candidate count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateId(pub usize);

impl CandidateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ElectionError {
    #[error("an election needs at least one candidate")]
    NoCandidates,
    #[error("an election needs at least one vote")]
    NoVotes,
    #[error("vote {vote} is not a permutation of 0..{m}")]
    NotPermutation { vote: usize, m: usize },
    #[error("candidate {c} out of range for {m} candidates")]
    CandidateOutOfRange { c: usize, m: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: vote is not a permutation of 0..{m}")]
    NotPermutation { line: usize, m: usize },
    #[error("line {line}: expected {expected} votes, found {found}")]
    WrongVoteCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: malformed ranking line: {reason}")]
    MalformedVote { line: usize, reason: String },
    #[error("missing header line")]
    MissingHeader,
}

/// A strict ranking of all candidates, most preferred first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vote {
    ranking: Vec<CandidateId>,
    // position[c] = place of candidate c in `ranking`
    position: Vec<usize>,
}

impl Vote {
    /// Builds a vote, returning `None` unless `ranking` is a permutation of `0..ranking.len()`.
    pub fn new(ranking: Vec<usize>) -> Option<Vote> {
        let m = ranking.len();
        let mut position = vec![usize::MAX; m];
        for (place, &c) in ranking.iter().enumerate() {
            if c >= m || position[c] != usize::MAX {
                return None;
            }
            position[c] = place;
        }
        Some(Vote {
            ranking: ranking.into_iter().map(CandidateId).collect(),
            position,
        })
    }

    pub fn ranking(&self) -> &[CandidateId] {
        &self.ranking
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    /// Zero-based place of `c`; 0 is the top.
    pub fn position(&self, c: CandidateId) -> usize {
        self.position[c.0]
    }

    pub fn prefers(&self, a: CandidateId, b: CandidateId) -> bool {
        self.position[a.0] < self.position[b.0]
    }

    /// The candidate ranked immediately above `c`, if any.
    pub fn directly_above(&self, c: CandidateId) -> Option<CandidateId> {
        let p = self.position(c);
        (p > 0).then(|| self.ranking[p - 1])
    }
}

/// A profile of `n ≥ 1` strict rankings over `m ≥ 1` candidates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Election {
    m: usize,
    votes: Vec<Vote>,
}

impl Election {
    pub fn new(m: usize, votes: Vec<Vote>) -> Result<Election, ElectionError> {
        if m == 0 {
            return Err(ElectionError::NoCandidates);
        }
        if votes.is_empty() {
            return Err(ElectionError::NoVotes);
        }
        if let Some(vote) = votes.iter().position(|v| v.len() != m) {
            return Err(ElectionError::NotPermutation { vote, m });
        }
        Ok(Election { m, votes })
    }

    /// Convenience constructor from raw index rankings.
    pub fn from_rankings(m: usize, rankings: &[Vec<usize>]) -> Result<Election, ElectionError> {
        let votes = rankings
            .iter()
            .enumerate()
            .map(|(i, r)| {
                if r.len() != m {
                    return Err(ElectionError::NotPermutation { vote: i, m });
                }
                Vote::new(r.clone()).ok_or(ElectionError::NotPermutation { vote: i, m })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Election::new(m, votes)
    }

    /// Number of candidates.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of voters.
    pub fn n(&self) -> usize {
        self.votes.len()
    }

    pub fn votes(&self) -> &[Vote] {
        &self.votes
    }

    pub fn candidates(&self) -> impl Iterator<Item = CandidateId> {
        (0..self.m).map(CandidateId)
    }

    /// Votes needed to strictly beat an opponent: `⌊n/2⌋ + 1`.
    pub fn majority(&self) -> usize {
        self.n() / 2 + 1
    }

    /// Serializes in the native text format.
    pub fn to_native(&self) -> String {
        let mut out = format!("{} {}\n", self.m, self.n());
        for v in &self.votes {
            let line: Vec<String> = v.ranking.iter().map(|c| c.0.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// An election together with a designated candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DodgsonTriple {
    pub election: Election,
    pub c: CandidateId,
}

impl DodgsonTriple {
    pub fn new(election: Election, c: CandidateId) -> Result<DodgsonTriple, ElectionError> {
        if c.0 >= election.m() {
            return Err(ElectionError::CandidateOutOfRange {
                c: c.0,
                m: election.m(),
            });
        }
        Ok(DodgsonTriple { election, c })
    }
}

/// `wins[i][j]` = number of voters ranking `i` above `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairwiseTally {
    m: usize,
    wins: Vec<usize>,
}

impl PairwiseTally {
    pub fn wins(&self, i: CandidateId, j: CandidateId) -> usize {
        self.wins[i.0 * self.m + j.0]
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

pub fn pairwise_tally(e: &Election) -> PairwiseTally {
    let m = e.m();
    let mut wins = vec![0usize; m * m];
    for v in e.votes() {
        let r = v.ranking();
        for (a, &hi) in r.iter().enumerate() {
            for &lo in &r[a + 1..] {
                wins[hi.0 * m + lo.0] += 1;
            }
        }
    }
    PairwiseTally { m, wins }
}

/// The candidate beating every other by a strict majority, if one exists.
pub fn condorcet_winner(e: &Election) -> Option<CandidateId> {
    let tally = pairwise_tally(e);
    let need = e.majority();
    e.candidates()
        .find(|&i| e.candidates().all(|j| i == j || tally.wins(i, j) >= need))
}

/// Extra pairwise votes the designated candidate needs against each opponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeficitVector {
    c: CandidateId,
    deficits: Vec<usize>,
}

impl DeficitVector {
    pub fn designated(&self) -> CandidateId {
        self.c
    }

    /// Deficit against `d`; zero for the designated candidate itself.
    pub fn get(&self, d: CandidateId) -> usize {
        self.deficits[d.0]
    }

    /// `(d, deficit[d])` for every opponent `d`.
    pub fn iter(&self) -> impl Iterator<Item = (CandidateId, usize)> + '_ {
        let c = self.c;
        self.deficits
            .iter()
            .enumerate()
            .filter(move |&(d, _)| d != c.0)
            .map(|(d, &k)| (CandidateId(d), k))
    }

    pub fn sum(&self) -> usize {
        self.deficits.iter().sum()
    }

    pub fn all_zero(&self) -> bool {
        self.deficits.iter().all(|&k| k == 0)
    }
}

pub fn deficits(t: &DodgsonTriple) -> DeficitVector {
    deficits_with(&pairwise_tally(&t.election), t)
}

fn deficits_with(tally: &PairwiseTally, t: &DodgsonTriple) -> DeficitVector {
    let need = t.election.majority();
    let deficits = t
        .election
        .candidates()
        .map(|d| {
            if d == t.c {
                0
            } else {
                need.saturating_sub(tally.wins(t.c, d))
            }
        })
        .collect();
    DeficitVector { c: t.c, deficits }
}

/// Outcome of the niceness test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Niceness {
    pub nice: bool,
    /// `witness[d]` = votes placing the designated candidate exactly one
    /// position below `d` (zero at the designated candidate's own index).
    pub witness: Vec<usize>,
    pub deficits: DeficitVector,
}

/// A triple is nice when, for every opponent `d`, at least `deficit[d]`
/// votes rank the designated candidate directly below `d`.
pub fn is_nice(t: &DodgsonTriple) -> Niceness {
    let deficits = deficits(t);
    let mut witness = vec![0usize; t.election.m()];
    for v in t.election.votes() {
        if let Some(d) = v.directly_above(t.c) {
            witness[d.0] += 1;
        }
    }
    let nice = deficits.iter().all(|(d, k)| witness[d.0] >= k);
    Niceness {
        nice,
        witness,
        deficits,
    }
}

/// Parses the native format: optional `#` comment lines, a header `m n`,
/// then exactly `n` rankings of `0..m`, most preferred first.
pub fn parse_election(text: &str) -> Result<Election, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let bad_header = |reason: &str| ParseError::MalformedHeader {
        line: header_line,
        reason: reason.to_string(),
    };
    if fields.len() != 2 {
        return Err(bad_header("expected two integers \"m n\""));
    }
    let m: usize = fields[0].parse().map_err(|_| bad_header("candidate count is not an integer"))?;
    let n: usize = fields[1].parse().map_err(|_| bad_header("vote count is not an integer"))?;
    if m == 0 {
        return Err(bad_header("candidate count must be at least 1"));
    }
    if n == 0 {
        return Err(bad_header("vote count must be at least 1"));
    }

    let mut votes = Vec::with_capacity(n);
    let mut last_line = header_line;
    for (line, body) in lines {
        if votes.len() == n {
            return Err(ParseError::WrongVoteCount {
                line,
                expected: n,
                found: n + 1,
            });
        }
        let ranking = body
            .split_whitespace()
            .map(|tok| tok.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ParseError::NotPermutation { line, m })?;
        if ranking.len() != m {
            return Err(ParseError::NotPermutation { line, m });
        }
        votes.push(Vote::new(ranking).ok_or(ParseError::NotPermutation { line, m })?);
        last_line = line;
    }
    if votes.len() != n {
        return Err(ParseError::WrongVoteCount {
            line: last_line,
            expected: n,
            found: votes.len(),
        });
    }
    Ok(Election::new(m, votes).expect("validated during parsing"))
}

/// Reads a PrefLib strict-complete-order (SOC) file. Alternatives are
/// 1-indexed in the file and mapped to `0..m`; each `count: a,b,c` line is
/// expanded into `count` identical votes. Returns the election and the
/// candidate names (empty strings where the file names none).
pub fn parse_soc(text: &str) -> Result<(Election, Vec<String>), ParseError> {
    let mut m: Option<(usize, usize)> = None;
    let mut named: Vec<(usize, usize, String)> = Vec::new();
    let mut votes = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() {
            continue;
        }
        if let Some(meta) = body.strip_prefix('#') {
            let meta = meta.trim();
            if let Some(rest) = meta.strip_prefix("NUMBER ALTERNATIVES:") {
                let k = rest.trim().parse::<usize>().map_err(|_| ParseError::MalformedHeader {
                    line,
                    reason: "NUMBER ALTERNATIVES is not an integer".into(),
                })?;
                if k == 0 {
                    return Err(ParseError::MalformedHeader {
                        line,
                        reason: "NUMBER ALTERNATIVES must be at least 1".into(),
                    });
                }
                m = Some((k, line));
            } else if let Some(rest) = meta.strip_prefix("ALTERNATIVE NAME") {
                let (num, name) = rest.split_once(':').ok_or_else(|| ParseError::MalformedHeader {
                    line,
                    reason: "ALTERNATIVE NAME line lacks ':'".into(),
                })?;
                let num = num.trim().parse::<usize>().map_err(|_| ParseError::MalformedHeader {
                    line,
                    reason: "alternative number is not an integer".into(),
                })?;
                named.push((line, num, name.trim().to_string()));
            }
            continue;
        }
        let (k, _) = m.ok_or_else(|| ParseError::MalformedHeader {
            line,
            reason: "ranking before NUMBER ALTERNATIVES".into(),
        })?;
        let (count, ranking) = body.split_once(':').ok_or_else(|| ParseError::MalformedVote {
            line,
            reason: "expected \"count: ranking\"".into(),
        })?;
        let count = count.trim().parse::<usize>().map_err(|_| ParseError::MalformedVote {
            line,
            reason: "multiplicity is not an integer".into(),
        })?;
        let ranking = ranking
            .split(',')
            .map(|tok| match tok.trim().parse::<usize>() {
                Ok(a) if a >= 1 => Ok(a - 1),
                _ => Err(ParseError::NotPermutation { line, m: k }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if ranking.len() != k {
            return Err(ParseError::NotPermutation { line, m: k });
        }
        let vote = Vote::new(ranking).ok_or(ParseError::NotPermutation { line, m: k })?;
        votes.extend(std::iter::repeat_n(vote, count));
        last_line = line;
    }

    let (k, _) = m.ok_or(ParseError::MissingHeader)?;
    let mut names = vec![String::new(); k];
    for (line, num, name) in named {
        if num == 0 || num > k {
            return Err(ParseError::MalformedHeader {
                line,
                reason: format!("alternative {num} out of range 1..={k}"),
            });
        }
        names[num - 1] = name;
    }
    if votes.is_empty() {
        return Err(ParseError::WrongVoteCount {
            line: last_line,
            expected: 1,
            found: 0,
        });
    }
    Ok((Election::new(k, votes).expect("validated during parsing"), names))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(m: usize, r: &[&[usize]]) -> Election {
        Election::from_rankings(m, &r.iter().map(|v| v.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    const CYCLE: &[&[usize]] = &[&[0, 1, 2], &[1, 2, 0], &[2, 0, 1]];

    #[test]
    fn parse_native_examples() {
        let one = parse_election("3 1\n0 1 2").unwrap();
        assert_eq!(one, e(3, &[&[0, 1, 2]]));
        let two = parse_election("2 2\n0 1\n1 0").unwrap();
        assert_eq!(two, e(2, &[&[0, 1], &[1, 0]]));
        let commented = parse_election("# a comment\n\n2 1\n# inner\n1 0\n").unwrap();
        assert_eq!(commented, e(2, &[&[1, 0]]));
    }

    #[test]
    fn parse_errors_are_distinct_and_name_lines() {
        assert_eq!(
            parse_election("3 1\n0 0 2"),
            Err(ParseError::NotPermutation { line: 2, m: 3 })
        );
        assert!(matches!(
            parse_election("3\n0 1 2"),
            Err(ParseError::MalformedHeader { line: 1, .. })
        ));
        assert!(matches!(
            parse_election("x 1\n0"),
            Err(ParseError::MalformedHeader { line: 1, .. })
        ));
        assert_eq!(
            parse_election("2 3\n0 1\n1 0"),
            Err(ParseError::WrongVoteCount {
                line: 3,
                expected: 3,
                found: 2
            })
        );
        assert_eq!(
            parse_election("2 1\n0 1\n1 0"),
            Err(ParseError::WrongVoteCount {
                line: 3,
                expected: 1,
                found: 2
            })
        );
        assert_eq!(
            parse_election("3 1\n0 1"),
            Err(ParseError::NotPermutation { line: 2, m: 3 })
        );
        assert_eq!(parse_election("# only\n"), Err(ParseError::MissingHeader));
    }

    #[test]
    fn native_roundtrip() {
        let text = "3 3\n0 1 2\n1 2 0\n2 0 1\n";
        assert_eq!(parse_election(text).unwrap().to_native(), text);
    }

    #[test]
    fn soc_expands_multiplicities() {
        let text = "# FILE NAME: toy.soc\n# NUMBER ALTERNATIVES: 3\n\
                    # ALTERNATIVE NAME 1: Ann\n# ALTERNATIVE NAME 2: Bo\n# ALTERNATIVE NAME 3: Cy\n\
                    2: 1,2,3\n1: 3,1,2\n";
        let (el, names) = parse_soc(text).unwrap();
        assert_eq!(el, e(3, &[&[0, 1, 2], &[0, 1, 2], &[2, 0, 1]]));
        assert_eq!(names, ["Ann", "Bo", "Cy"]);
        assert_eq!(
            parse_soc("# NUMBER ALTERNATIVES: 2\n1: 1,1\n").unwrap_err(),
            ParseError::NotPermutation { line: 2, m: 2 }
        );
    }

    #[test]
    fn tallies() {
        let t = pairwise_tally(&e(2, &[&[0, 1], &[1, 0]]));
        assert_eq!((t.wins(CandidateId(0), CandidateId(1)), t.wins(CandidateId(1), CandidateId(0))), (1, 1));

        let u = pairwise_tally(&e(3, &[&[0, 1, 2], &[0, 1, 2], &[0, 1, 2]]));
        assert_eq!(u.wins(CandidateId(0), CandidateId(1)), 3);
        assert_eq!(u.wins(CandidateId(0), CandidateId(2)), 3);
        assert_eq!(u.wins(CandidateId(1), CandidateId(2)), 3);
        assert_eq!(u.wins(CandidateId(1), CandidateId(1)), 0);

        let c = pairwise_tally(&e(3, CYCLE));
        assert_eq!(c.wins(CandidateId(0), CandidateId(1)), 2);
        assert_eq!(c.wins(CandidateId(1), CandidateId(2)), 2);
        assert_eq!(c.wins(CandidateId(2), CandidateId(0)), 2);
    }

    #[test]
    fn condorcet_examples() {
        assert_eq!(condorcet_winner(&e(3, &[&[0, 1, 2][..]; 3])), Some(CandidateId(0)));
        assert_eq!(condorcet_winner(&e(2, &[&[0, 1], &[1, 0]])), None);
        assert_eq!(condorcet_winner(&e(3, CYCLE)), None);
        assert_eq!(condorcet_winner(&e(1, &[&[0], &[0]])), Some(CandidateId(0)));
    }

    #[test]
    fn deficit_examples() {
        let winner = DodgsonTriple::new(e(3, &[&[0, 1, 2][..]; 3]), CandidateId(0)).unwrap();
        assert!(deficits(&winner).all_zero());

        // n = 3: candidate 2 has 1 of the 2 needed votes against 0.
        let t = DodgsonTriple::new(e(3, &[&[0, 2, 1], &[0, 2, 1], &[2, 0, 1]]), CandidateId(2)).unwrap();
        assert_eq!(deficits(&t).get(CandidateId(0)), 1);

        // n = 4: zero of the 3 needed.
        let t4 = DodgsonTriple::new(e(2, &[&[1, 0][..]; 4]), CandidateId(0)).unwrap();
        assert_eq!(deficits(&t4).get(CandidateId(1)), 3);
    }

    #[test]
    fn niceness_examples() {
        let nice = DodgsonTriple::new(e(3, &[&[0, 2, 1], &[0, 2, 1], &[2, 0, 1]]), CandidateId(2)).unwrap();
        let r = is_nice(&nice);
        assert!(r.nice);
        assert_eq!((r.witness[0], r.witness[1]), (2, 0));

        let not = DodgsonTriple::new(e(3, &[&[0, 1, 2], &[0, 1, 2], &[2, 0, 1]]), CandidateId(2)).unwrap();
        let r = is_nice(&not);
        assert!(!r.nice);
        assert_eq!((r.witness[0], r.witness[1]), (0, 2));

        let winner = DodgsonTriple::new(e(3, &[&[0, 1, 2][..]; 3]), CandidateId(0)).unwrap();
        assert!(is_nice(&winner).nice);
    }

    #[test]
    fn triple_rejects_out_of_range_candidate() {
        assert_eq!(
            DodgsonTriple::new(e(2, &[&[0, 1]]), CandidateId(2)),
            Err(ElectionError::CandidateOutOfRange { c: 2, m: 2 })
        );
    }
}
