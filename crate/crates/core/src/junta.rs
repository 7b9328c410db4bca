//! Per-length probability ensembles over binary strings and checkers for the
//! basic junta conditions (balance, dichotomy), almost-uniformity, and the
//! error weight of decision heuristics.
//!
//! Masses are exact rationals. A [`LengthDistribution`] stores a few explicit
//! masses plus one residual mass shared by every other string of the length,
//! which is all the constructions here need.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;
use thiserror::Error;

use crate::bits::BitString;

/// Longest length any checker will enumerate.
pub const ENUM_MAX_LEN: usize = 16;

pub type Predicate = Arc<dyn Fn(&BitString) -> bool + Send + Sync>;
pub type Designator = Arc<dyn Fn(usize) -> BitString + Send + Sync>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum JuntaError {
    #[error("length {len} exceeds the enumeration limit {ENUM_MAX_LEN}")]
    Guard { len: usize },
    #[error("slice at length {len} has a negative mass")]
    NegativeMass { len: usize },
    #[error("slice at length {len} sums to {total}, not 1")]
    NotNormalized { len: usize, total: String },
    #[error("explicit entry {x} has length {got}, expected {len}")]
    WrongLength { x: String, got: usize, len: usize },
    #[error("pierced set invariant broken at length {len}: {reason}")]
    BadPiercedSet { len: usize, reason: String },
}

fn guard(n: usize) -> Result<(), JuntaError> {
    if n > ENUM_MAX_LEN {
        Err(JuntaError::Guard { len: n })
    } else {
        Ok(())
    }
}

fn pow2(k: usize) -> BigRational {
    BigRational::from_integer(BigInt::one() << k)
}

fn inv_pow2(k: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << k)
}

/// A probability distribution over the strings of one length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthDistribution {
    n: usize,
    explicit: BTreeMap<BitString, BigRational>,
    residual: BigRational,
}

impl LengthDistribution {
    /// Every string not listed in `explicit` gets `residual`. Fails unless
    /// all masses are nonnegative and the slice sums to exactly 1.
    pub fn new(
        n: usize,
        explicit: BTreeMap<BitString, BigRational>,
        residual: BigRational,
    ) -> Result<Self, JuntaError> {
        assert!(n < 64, "slice length {n} too long");
        if let Some(x) = explicit.keys().find(|x| x.len() != n) {
            return Err(JuntaError::WrongLength {
                x: x.to_string(),
                got: x.len(),
                len: n,
            });
        }
        if residual.is_negative() || explicit.values().any(Signed::is_negative) {
            return Err(JuntaError::NegativeMass { len: n });
        }
        let d = LengthDistribution {
            n,
            explicit,
            residual,
        };
        let total = d.total();
        if !total.is_one() {
            return Err(JuntaError::NotNormalized {
                len: n,
                total: total.to_string(),
            });
        }
        Ok(d)
    }

    pub fn uniform(n: usize) -> Self {
        LengthDistribution::new(n, BTreeMap::new(), inv_pow2(n)).expect("uniform slice is normalized")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mass(&self, x: &BitString) -> BigRational {
        debug_assert_eq!(x.len(), self.n);
        self.explicit.get(x).cloned().unwrap_or_else(|| self.residual.clone())
    }

    fn residual_count(&self) -> BigInt {
        (BigInt::one() << self.n) - BigInt::from(self.explicit.len())
    }

    /// Sum of all masses, computed from the representation.
    pub fn total(&self) -> BigRational {
        let listed: BigRational = self.explicit.values().sum();
        listed + &self.residual * BigRational::from_integer(self.residual_count())
    }

    /// Total mass of strings satisfying `pred`, by enumeration.
    pub fn mass_where(&self, pred: impl Fn(&BitString) -> bool) -> Result<BigRational, JuntaError> {
        guard(self.n)?;
        let mut listed = BigRational::zero();
        let mut residual_hits: u64 = 0;
        for x in BitString::all_of_length(self.n) {
            if !pred(&x) {
                continue;
            }
            match self.explicit.get(&x) {
                Some(w) => listed += w,
                None => residual_hits += 1,
            }
        }
        Ok(listed + &self.residual * BigRational::from_integer(residual_hits.into()))
    }

    /// Smallest and largest nonzero masses, if any string has nonzero mass.
    pub fn nonzero_extremes(&self) -> Option<(BigRational, BigRational)> {
        let residual_present = self.residual_count().is_positive() && self.residual.is_positive();
        self.explicit
            .values()
            .filter(|w| w.is_positive())
            .chain(residual_present.then_some(&self.residual))
            .fold(None, |acc, w| match acc {
                None => Some((w.clone(), w.clone())),
                Some((lo, hi)) => Some((lo.min(w.clone()), hi.max(w.clone()))),
            })
    }

    /// Number of strings with nonzero mass.
    pub fn support_size(&self) -> BigInt {
        let listed = self.explicit.values().filter(|w| w.is_positive()).count();
        let rest = if self.residual.is_positive() {
            self.residual_count()
        } else {
            BigInt::zero()
        };
        rest + BigInt::from(listed)
    }
}

/// One distribution per length, produced on demand.
#[derive(Clone)]
pub struct DistributionEnsemble {
    pub name: String,
    generator: Arc<dyn Fn(usize) -> LengthDistribution + Send + Sync>,
}

impl DistributionEnsemble {
    pub fn new(name: impl Into<String>, generator: impl Fn(usize) -> LengthDistribution + Send + Sync + 'static) -> Self {
        DistributionEnsemble {
            name: name.into(),
            generator: Arc::new(generator),
        }
    }

    pub fn slice(&self, n: usize) -> LengthDistribution {
        (self.generator)(n)
    }
}

impl fmt::Debug for DistributionEnsemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistributionEnsemble").field("name", &self.name).finish()
    }
}

/// A language with a designated member and non-member at every length from
/// `threshold` on.
#[derive(Clone)]
pub struct PiercedSet {
    pub member: Predicate,
    pub pos: Designator,
    pub neg: Designator,
    pub threshold: usize,
}

impl PiercedSet {
    pub fn contains(&self, x: &BitString) -> bool {
        (self.member)(x)
    }

    /// Checks the designator invariants at every length in `range` at or
    /// above the threshold.
    pub fn validate(&self, range: RangeInclusive<usize>) -> Result<(), JuntaError> {
        for n in range.filter(|&n| n >= self.threshold) {
            let (p, q) = ((self.pos)(n), (self.neg)(n));
            let fail = |reason: &str| {
                Err(JuntaError::BadPiercedSet {
                    len: n,
                    reason: reason.to_string(),
                })
            };
            if p.len() != n || q.len() != n {
                return fail("designator has the wrong length");
            }
            if p == q {
                return fail("designated member equals designated non-member");
            }
            if !self.contains(&p) {
                return fail("designated member is not in the set");
            }
            if self.contains(&q) {
                return fail("designated non-member is in the set");
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PiercedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiercedSet").field("threshold", &self.threshold).finish()
    }
}

/// Every length-`n` string gets `1/2^n`.
pub fn uniform_ensemble() -> DistributionEnsemble {
    DistributionEnsemble::new("uniform", LengthDistribution::uniform)
}

/// Concentrates almost all weight on the two designated strings: from the
/// threshold on, every other string gets `1/2^(n²)` and each designated
/// string gets `(1 − (2^n − 2)/2^(n²))/2`. Below the threshold the slice is
/// uniform.
pub fn junta_nu(ps: &PiercedSet) -> DistributionEnsemble {
    let ps = ps.clone();
    DistributionEnsemble::new("nu", move |n| {
        if n < ps.threshold {
            return LengthDistribution::uniform(n);
        }
        let (residual, pierced) = junta_nu_masses(n);
        let explicit = BTreeMap::from([((ps.pos)(n), pierced.clone()), ((ps.neg)(n), pierced)]);
        LengthDistribution::new(n, explicit, residual).expect("junta slice is normalized")
    })
}

/// `(other-string mass, designated-string mass)` of the junta slice at length `n`.
pub fn junta_nu_masses(n: usize) -> (BigRational, BigRational) {
    let residual = inv_pow2(n * n);
    let others = (pow2(n) - BigRational::from_integer(2.into())) * &residual;
    let pierced = (BigRational::one() - others) / BigRational::from_integer(2.into());
    (residual, pierced)
}

/// Polynomial with nonnegative integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<u64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<u64>) -> Self {
        Polynomial { coeffs }
    }

    /// `coef · n^degree`.
    pub fn monomial(coef: u64, degree: usize) -> Self {
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = coef;
        Polynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0).unwrap_or(0)
    }

    pub fn eval(&self, n: usize) -> BigUint {
        self.coeffs
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &c| acc * BigUint::from(n) + BigUint::from(c))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|&(_, &c)| c != 0)
            .map(|(d, &c)| {
                let var = match d {
                    0 => String::new(),
                    1 => "n".to_string(),
                    _ => format!("n^{d}"),
                };
                match (c, d) {
                    (_, 0) => c.to_string(),
                    (1, _) => var,
                    _ => format!("{c}*{var}"),
                }
            })
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join("+"))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// First failing length.
    Fail { at: usize },
    /// No length was checked.
    Vacuous,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        !matches!(self, Verdict::Fail { .. })
    }

    fn from_lengths(checked: usize, first_failure: Option<usize>) -> Verdict {
        match (checked, first_failure) {
            (_, Some(at)) => Verdict::Fail { at },
            (0, None) => Verdict::Vacuous,
            _ => Verdict::Pass,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("pass"),
            Verdict::Fail { at } => write!(f, "fail at n={at}"),
            Verdict::Vacuous => f.write_str("vacuous"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceCheck {
    pub verdict: Verdict,
    /// `(n, P_n, margin)`; the margin is the distance of `P_n` inside
    /// `[1/c, 1 − 1/c]`, negative when outside.
    pub per_length: Vec<(usize, BigRational, BigRational)>,
}

/// Checks `1/c ≤ P_n ≤ 1 − 1/c`, where `P_n` is the mass of members at length `n`.
pub fn check_balance(
    e: &DistributionEnsemble,
    member: impl Fn(&BitString) -> bool,
    c: &BigRational,
    range: RangeInclusive<usize>,
) -> Result<BalanceCheck, JuntaError> {
    assert!(*c > BigRational::one(), "balance constant must exceed 1");
    let lo = c.recip();
    let hi = BigRational::one() - &lo;
    let mut per_length = Vec::new();
    let mut first_failure = None;
    for n in range {
        let p = e.slice(n).mass_where(&member)?;
        let margin = (&p - &lo).min(&hi - &p);
        if margin.is_negative() && first_failure.is_none() {
            first_failure = Some(n);
        }
        per_length.push((n, p, margin));
    }
    Ok(BalanceCheck {
        verdict: Verdict::from_lengths(per_length.len(), first_failure),
        per_length,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DichotomyCheck {
    pub verdict: Verdict,
    /// `(n, smallest nonzero mass)`.
    pub per_length: Vec<(usize, BigRational)>,
}

/// Checks that every nonzero mass at length `n` is at least `2^(−p(n))`.
pub fn check_dichotomy(
    e: &DistributionEnsemble,
    p: &Polynomial,
    range: RangeInclusive<usize>,
) -> Result<DichotomyCheck, JuntaError> {
    let mut per_length = Vec::new();
    let mut first_failure = None;
    for n in range {
        guard(n)?;
        let slice = e.slice(n);
        let Some((min, _)) = slice.nonzero_extremes() else {
            continue;
        };
        let floor = BigRational::new(BigInt::one(), BigInt::one() << p.eval(n).to_usize().expect("exponent fits in usize"));
        if min < floor && first_failure.is_none() {
            first_failure = Some(n);
        }
        per_length.push((n, min));
    }
    Ok(DichotomyCheck {
        verdict: Verdict::from_lengths(per_length.len(), first_failure),
        per_length,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformityCheck {
    pub verdict: Verdict,
    /// `(n, max nonzero mass / min nonzero mass)`.
    pub per_length: Vec<(usize, BigRational)>,
    pub worst_ratio: Option<BigRational>,
}

/// Checks that at every length `n > n0` the nonzero masses differ by at
/// most a factor of `k`. Slices with fewer than two nonzero masses pass.
pub fn check_almost_uniformity(
    e: &DistributionEnsemble,
    k: &BigRational,
    n0: usize,
    range: RangeInclusive<usize>,
) -> Result<UniformityCheck, JuntaError> {
    assert!(k.is_positive(), "uniformity constant must be positive");
    let mut per_length = Vec::new();
    let mut first_failure = None;
    let mut worst: Option<BigRational> = None;
    for n in range.filter(|&n| n > n0) {
        guard(n)?;
        let ratio = match e.slice(n).nonzero_extremes() {
            Some((lo, hi)) => hi / lo,
            None => BigRational::one(),
        };
        if ratio > *k && first_failure.is_none() {
            first_failure = Some(n);
        }
        if worst.as_ref().is_none_or(|w| ratio > *w) {
            worst = Some(ratio.clone());
        }
        per_length.push((n, ratio));
    }
    Ok(UniformityCheck {
        verdict: Verdict::from_lengths(per_length.len(), first_failure),
        per_length,
        worst_ratio: worst,
    })
}

/// Accepts the designated member, rejects the designated non-member, and
/// accepts everything else.
pub fn pierced_heuristic(ps: &PiercedSet) -> Predicate {
    let ps = ps.clone();
    Arc::new(move |x: &BitString| {
        let n = x.len();
        if n < ps.threshold {
            return true;
        }
        *x != (ps.neg)(n)
    })
}

/// Mass of length-`n` strings the decision procedure gets wrong.
pub fn error_weight(
    alg: impl Fn(&BitString) -> bool,
    e: &DistributionEnsemble,
    member: impl Fn(&BitString) -> bool,
    n: usize,
) -> Result<BigRational, JuntaError> {
    e.slice(n).mass_where(|x| alg(x) != member(x))
}

/// Closed-form ceiling on the pierced heuristic's error under the junta,
/// `(2^n − 2)/2^(n²)`.
pub fn junta_error_ceiling(n: usize) -> BigRational {
    (pow2(n) - BigRational::from_integer(2.into())) * inv_pow2(n * n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeuristicBoundCheck {
    pub verdict: Verdict,
    pub warning: Option<String>,
}

/// Checks `error(n) < 1/q(n)` at every supplied length `n ≥ threshold`.
pub fn check_heuristic_bound(
    weights: &[(usize, BigRational)],
    q: &Polynomial,
    threshold: usize,
) -> HeuristicBoundCheck {
    assert!(q.degree() >= 1, "q must have degree at least 1");
    let mut checked = 0;
    let mut first_failure = None;
    for (n, w) in weights.iter().filter(|(n, _)| *n >= threshold) {
        let qn = q.eval(*n);
        assert!(!qn.is_zero(), "q({n}) must be positive");
        checked += 1;
        let limit = BigRational::new(BigInt::one(), BigInt::from(qn));
        if *w >= limit && first_failure.is_none() {
            first_failure = Some(*n);
        }
    }
    let verdict = Verdict::from_lengths(checked, first_failure);
    let warning = (verdict == Verdict::Vacuous).then(|| "no length at or above the threshold was checked".to_string());
    HeuristicBoundCheck { verdict, warning }
}

/// Membership in `{00x : x any string} ∪ {1 x 1^(|x|²+2) : x ∈ A}`.
pub fn pad_set(member: Predicate) -> Predicate {
    Arc::new(move |s: &BitString| {
        let n = s.len();
        if n >= 2 && !s.bit(0) && !s.bit(1) {
            return true;
        }
        if n == 0 || !s.bit(0) {
            return false;
        }
        // n = 1 + k + k² + 2 for the inner length k
        let Some(k) = (0..n).find(|k| 3 + k + k * k >= n).filter(|k| 3 + k + k * k == n) else {
            return false;
        };
        let tail = n - 1 - k;
        s.field(1 + k, tail) == (1u64 << tail) - 1 && member(&s.slice(1, k))
    })
}

/// Thresholds used by [`build_report`].
#[derive(Clone, Debug)]
pub struct JuntaParams {
    pub balance_c: BigRational,
    pub dichotomy_p: Polynomial,
    pub uniformity_k: BigRational,
    pub uniformity_n0: usize,
    pub heuristic_q: Polynomial,
}

impl Default for JuntaParams {
    fn default() -> Self {
        JuntaParams {
            balance_c: BigRational::from_integer(3.into()),
            dichotomy_p: Polynomial::monomial(1, 2),
            uniformity_k: BigRational::from_integer(256.into()),
            uniformity_n0: 0,
            heuristic_q: Polynomial::monomial(1, 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthRecord {
    pub n: usize,
    pub in_mass: BigRational,
    pub balance_margin: BigRational,
    pub min_nonzero: BigRational,
    pub max_ratio: BigRational,
    pub error_weight: BigRational,
}

/// Per-length measurements and verdicts for one ensemble and pierced set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JuntaReport {
    pub ensemble: String,
    pub set: String,
    pub threshold: usize,
    pub lengths: (usize, usize),
    pub params: String,
    pub records: Vec<LengthRecord>,
    pub balance: Verdict,
    pub dichotomy: Verdict,
    pub almost_uniformity: Verdict,
    pub worst_ratio: Option<BigRational>,
    pub heuristic_bound: Verdict,
    /// NP-hardness of the set is assumed, never checked.
    pub hardness_checked: bool,
}

pub const REPORT_VERSION: &str = "junta-report v1";

/// Runs every checker over `range`. Balance and the heuristic bound only
/// apply from the pierced set's threshold on; almost-uniformity only above
/// `uniformity_n0`.
pub fn build_report(
    e: &DistributionEnsemble,
    set_name: &str,
    ps: &PiercedSet,
    params: &JuntaParams,
    range: RangeInclusive<usize>,
) -> Result<JuntaReport, JuntaError> {
    let (start, end) = (*range.start(), *range.end());
    guard(end)?;
    ps.validate(range.clone())?;
    let member = ps.member.clone();
    let heuristic = pierced_heuristic(ps);

    let from_threshold = start.max(ps.threshold)..=end;
    let balance = check_balance(e, &*member, &params.balance_c, from_threshold.clone())?;
    let dichotomy = check_dichotomy(e, &params.dichotomy_p, range.clone())?;
    let uniformity = check_almost_uniformity(e, &params.uniformity_k, params.uniformity_n0, range.clone())?;

    let mut records = Vec::new();
    let mut weights = Vec::new();
    for n in range.clone() {
        let slice = e.slice(n);
        let in_mass = slice.mass_where(&*member)?;
        let lo = params.balance_c.recip();
        let margin = (&in_mass - &lo).min(BigRational::one() - &lo - &in_mass);
        let (min_nonzero, max_ratio) = match slice.nonzero_extremes() {
            Some((lo, hi)) => (lo.clone(), hi / lo),
            None => (BigRational::zero(), BigRational::one()),
        };
        let err = error_weight(&*heuristic, e, &*member, n)?;
        weights.push((n, err.clone()));
        records.push(LengthRecord {
            n,
            in_mass,
            balance_margin: margin,
            min_nonzero,
            max_ratio,
            error_weight: err,
        });
    }
    let heuristic_bound = check_heuristic_bound(&weights, &params.heuristic_q, ps.threshold);

    Ok(JuntaReport {
        ensemble: e.name.clone(),
        set: set_name.to_string(),
        threshold: ps.threshold,
        lengths: (start, end),
        params: format!(
            "c={} p={} K={} n0={} q={}",
            params.balance_c, params.dichotomy_p, params.uniformity_k, params.uniformity_n0, params.heuristic_q
        ),
        records,
        balance: balance.verdict,
        dichotomy: dichotomy.verdict,
        almost_uniformity: uniformity.verdict,
        worst_ratio: uniformity.worst_ratio,
        heuristic_bound: heuristic_bound.verdict,
        hardness_checked: false,
    })
}

fn frac(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

impl JuntaReport {
    /// The construction's checkable claims: balance, dichotomy and the
    /// heuristic error bound. Almost-uniformity is reported, not gated.
    pub fn construction_holds(&self) -> bool {
        self.balance.passed() && self.dichotomy.passed() && self.heuristic_bound.passed()
    }

    fn hardness(&self) -> &'static str {
        if self.hardness_checked {
            "checked"
        } else {
            "unchecked-assumption"
        }
    }

    fn verdict_lines(&self) -> Vec<(&'static str, String)> {
        let worst = self.worst_ratio.as_ref().map_or("none".to_string(), frac);
        vec![
            ("balance", self.balance.to_string()),
            ("dichotomy", self.dichotomy.to_string()),
            ("almost_uniformity", format!("{} worst_ratio={worst}", self.almost_uniformity)),
            ("heuristic_bound", self.heuristic_bound.to_string()),
        ]
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{REPORT_VERSION}\nensemble={} set={} threshold={} lengths={}..{} {}\n",
            self.ensemble, self.set, self.threshold, self.lengths.0, self.lengths.1, self.params
        );
        for r in &self.records {
            out.push_str(&format!(
                "record n={} in_mass={} balance_margin={} min_nonzero={} max_ratio={} error_weight={}\n",
                r.n,
                frac(&r.in_mass),
                frac(&r.balance_margin),
                frac(&r.min_nonzero),
                frac(&r.max_ratio),
                frac(&r.error_weight)
            ));
        }
        for (name, v) in self.verdict_lines() {
            out.push_str(&format!("verdict {name} {v}\n"));
        }
        out.push_str(&format!("hardness {}\n", self.hardness()));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# {REPORT_VERSION}\n# ensemble={} set={} threshold={} lengths={}..{} {}\n",
            self.ensemble, self.set, self.threshold, self.lengths.0, self.lengths.1, self.params
        );
        out.push_str(
            "n,in_mass_num,in_mass_den,balance_margin_num,balance_margin_den,min_nonzero_num,min_nonzero_den,\
             max_ratio_num,max_ratio_den,error_weight_num,error_weight_den\n",
        );
        for r in &self.records {
            let cells: Vec<String> = [&r.in_mass, &r.balance_margin, &r.min_nonzero, &r.max_ratio, &r.error_weight]
                .iter()
                .flat_map(|q| [q.numer().to_string(), q.denom().to_string()])
                .collect();
            out.push_str(&format!("{},{}\n", r.n, cells.join(",")));
        }
        for (name, v) in self.verdict_lines() {
            out.push_str(&format!("# verdict {name} {v}\n"));
        }
        out.push_str(&format!("# hardness {}\n", self.hardness()));
        out
    }

    pub fn to_json_lines(&self) -> String {
        let mut lines = vec![json!({
            "record": "header",
            "version": REPORT_VERSION,
            "ensemble": self.ensemble,
            "set": self.set,
            "threshold": self.threshold,
            "lengths": [self.lengths.0, self.lengths.1],
            "params": self.params,
        })];
        for r in &self.records {
            lines.push(json!({
                "record": "length",
                "n": r.n,
                "in_mass": frac(&r.in_mass),
                "balance_margin": frac(&r.balance_margin),
                "min_nonzero": frac(&r.min_nonzero),
                "max_ratio": frac(&r.max_ratio),
                "error_weight": frac(&r.error_weight),
            }));
        }
        for (name, v) in self.verdict_lines() {
            lines.push(json!({ "record": "verdict", "check": name, "result": v }));
        }
        lines.push(json!({ "record": "trailer", "hardness": self.hardness() }));
        lines.iter().map(|l| format!("{l}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::toy_pierced_sat;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn uniform_slices() {
        let u = uniform_ensemble();
        let s1 = u.slice(1);
        assert_eq!(s1.mass(&bs("0")), q(1, 2));
        assert_eq!(s1.mass(&bs("1")), q(1, 2));
        let s3 = u.slice(3);
        assert!(BitString::all_of_length(3).all(|x| s3.mass(&x) == q(1, 8)));
        for n in 1..=16 {
            let (lo, hi) = u.slice(n).nonzero_extremes().unwrap();
            assert_eq!(hi / lo, q(1, 1));
        }
    }

    #[test]
    fn rejects_unnormalized_slices() {
        let err = LengthDistribution::new(1, BTreeMap::new(), q(1, 4)).unwrap_err();
        assert!(matches!(err, JuntaError::NotNormalized { len: 1, .. }));
        let err = LengthDistribution::new(1, BTreeMap::from([(bs("0"), q(-1, 2))]), q(3, 2)).unwrap_err();
        assert_eq!(err, JuntaError::NegativeMass { len: 1 });
    }

    #[test]
    fn junta_masses_match_construction() {
        let ps = toy_pierced_sat();
        let nu = junta_nu(&ps);
        let s3 = nu.slice(3);
        assert_eq!(s3.mass(&(ps.pos)(3)), q(253, 512));
        assert_eq!(s3.mass(&(ps.neg)(3)), q(253, 512));
        let other = BitString::all_of_length(3).find(|x| *x != (ps.pos)(3) && *x != (ps.neg)(3)).unwrap();
        assert_eq!(s3.mass(&other), q(1, 512));
        let s2 = nu.slice(2);
        assert_eq!(s2.mass(&(ps.pos)(2)), q(7, 16));
        assert_eq!(s2.mass(&bs("11")), q(1, 16));
        assert_eq!(nu.slice(1), LengthDistribution::uniform(1));
    }

    #[test]
    fn balance_examples() {
        let ps = toy_pierced_sat();
        let nu = junta_nu(&ps);
        let c3 = q(3, 1);
        let b = check_balance(&nu, &*ps.member, &c3, 2..=10).unwrap();
        assert_eq!(b.verdict, Verdict::Pass);
        for (n, p, _) in &b.per_length {
            let slack = inv_pow2(n * n - n - 1);
            assert!(*p >= q(1, 2) - &slack && *p <= q(1, 2) + &slack);
        }
        let none = check_balance(&nu, |_| false, &c3, 2..=4).unwrap();
        assert_eq!(none.verdict, Verdict::Fail { at: 2 });

        let half = check_balance(&uniform_ensemble(), |x: &BitString| !x.bit(0), &q(2, 1), 1..=6).unwrap();
        assert_eq!(half.verdict, Verdict::Pass);
        assert!(half.per_length.iter().all(|(_, _, m)| m.is_zero()));
    }

    #[test]
    fn dichotomy_examples() {
        let nu = junta_nu(&toy_pierced_sat());
        let square = Polynomial::monomial(1, 2);
        let linear = Polynomial::monomial(1, 1);
        assert_eq!(check_dichotomy(&nu, &square, 1..=10).unwrap().verdict, Verdict::Pass);
        assert_eq!(check_dichotomy(&nu, &linear, 1..=10).unwrap().verdict, Verdict::Fail { at: 2 });
        assert_eq!(check_dichotomy(&uniform_ensemble(), &linear, 1..=12).unwrap().verdict, Verdict::Pass);
        assert!(check_dichotomy(&nu, &square, 1..=17).is_err());
    }

    #[test]
    fn almost_uniformity_examples() {
        let nu = junta_nu(&toy_pierced_sat());
        let r3 = check_almost_uniformity(&nu, &q(253, 1), 2, 3..=3).unwrap();
        assert_eq!(r3.verdict, Verdict::Pass);
        assert_eq!(r3.worst_ratio, Some(q(253, 1)));
        assert_eq!(
            check_almost_uniformity(&nu, &q(252, 1), 2, 3..=3).unwrap().verdict,
            Verdict::Fail { at: 3 }
        );
        let r4 = check_almost_uniformity(&nu, &q(1, 1), 3, 1..=4).unwrap();
        assert_eq!(r4.per_length, vec![(4, q(32761, 1))]);
        assert_eq!(
            check_almost_uniformity(&uniform_ensemble(), &q(1, 1), 0, 1..=10).unwrap().verdict,
            Verdict::Pass
        );
    }

    #[test]
    fn heuristic_behaviour() {
        let ps = toy_pierced_sat();
        let h = pierced_heuristic(&ps);
        for n in 2..=10 {
            assert!(h(&(ps.pos)(n)));
            assert!(!h(&(ps.neg)(n)));
        }
        assert!(h(&bs("111")));
    }

    #[test]
    fn error_weight_examples() {
        let ps = toy_pierced_sat();
        let nu = junta_nu(&ps);
        let member = ps.member.clone();
        assert_eq!(error_weight(&*member, &nu, &*member, 5).unwrap(), q(0, 1));
        assert_eq!(error_weight(|_| true, &nu, |_| true, 5).unwrap(), q(0, 1));
        let h = pierced_heuristic(&ps);
        for n in 2..=8 {
            assert!(error_weight(&*h, &nu, &*member, n).unwrap() <= junta_error_ceiling(n));
        }
    }

    #[test]
    fn heuristic_bound_examples() {
        let q1 = Polynomial::monomial(1, 1);
        let good: Vec<_> = (2..=10).map(|n| (n, inv_pow2(n * n - n))).collect();
        assert_eq!(check_heuristic_bound(&good, &q1, 2).verdict, Verdict::Pass);
        let half: Vec<_> = (2..=5).map(|n| (n, q(1, 2))).collect();
        assert_eq!(check_heuristic_bound(&half, &q1, 2).verdict, Verdict::Fail { at: 2 });
        let empty = check_heuristic_bound(&[], &q1, 2);
        assert_eq!(empty.verdict, Verdict::Vacuous);
        assert!(empty.warning.is_some());
    }

    #[test]
    fn pad_set_examples() {
        let only_zero: Predicate = Arc::new(|x: &BitString| *x == bs("0"));
        let pad = pad_set(only_zero);
        assert!(pad(&bs("00")));
        assert!(pad(&bs("00101")));
        assert!(!pad(&bs("01")));
        assert!(!pad(&bs("0111")));
        assert!(pad(&bs("10111")));
        assert!(!pad(&bs("11111")));
        assert!(!pad(&bs("10110")));
        // k = 0: "1" followed by 1^2
        assert!(!pad(&bs("111")));
        let everything: Predicate = Arc::new(|_| true);
        assert!(pad_set(everything)(&bs("111")));
        // k = 2: 1 x 1^6
        assert!(!pad(&bs("101111111")));
    }

    #[test]
    fn polynomial_display_and_eval() {
        let p = Polynomial::new(vec![1, 0, 3]);
        assert_eq!(p.to_string(), "3*n^2+1");
        assert_eq!(p.eval(4), BigUint::from(49u32));
        assert_eq!(Polynomial::monomial(1, 2).to_string(), "n^2");
        assert_eq!(Polynomial::monomial(1, 1).degree(), 1);
    }

    #[test]
    fn report_below_threshold_is_vacuous() {
        let ps = toy_pierced_sat();
        let r = build_report(&junta_nu(&ps), "toy-sat", &ps, &JuntaParams::default(), 1..=1).unwrap();
        assert_eq!(r.balance, Verdict::Vacuous);
        assert_eq!(r.heuristic_bound, Verdict::Vacuous);
        assert!(r.to_text().contains("verdict balance vacuous"));
    }
}
