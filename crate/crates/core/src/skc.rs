//! Self-knowingly correct algorithms, benign algorithm schemes, and the
//! standard uniform distribution on binary strings.
//!
//! A self-knowingly correct algorithm answers `(value, flag)`; whenever the
//! flag is [`Flag::Definitely`] the value is the true function value. The
//! [`BenignWrapper`] turns a benign algorithm scheme `A(x, δ)` into such an
//! algorithm by running it with tolerance `1/(|x|+1)^3`, which keeps the
//! per-length fraction of `maybe` answers at or below `n/(n+1)^2`.
//!
//! Probabilities here are exact rationals throughout.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::bits::BitString;

/// Longest length swept exhaustively by [`maybe_fraction`].
pub const MAYBE_FRACTION_MAX_LEN: usize = 24;
/// Longest length summed by [`prob_of_event`].
pub const PROB_MAX_LEN: usize = 20;
/// Longest length summed by [`poly_on_average_partial_sum`].
pub const PARTIAL_SUM_MAX_LEN: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flag {
    Definitely,
    Maybe,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::Definitely => "definitely",
            Flag::Maybe => "maybe",
        })
    }
}

/// A value paired with a definitely/maybe flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkcOutput<T> {
    pub value: T,
    pub flag: Flag,
}

impl<T> SkcOutput<T> {
    pub fn definitely(value: T) -> Self {
        SkcOutput {
            value,
            flag: Flag::Definitely,
        }
    }

    pub fn maybe(value: T) -> Self {
        SkcOutput {
            value,
            flag: Flag::Maybe,
        }
    }

    pub fn is_definite(&self) -> bool {
        self.flag == Flag::Definitely
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SkcError {
    #[error("length {len} exceeds the enumeration limit {limit}")]
    Guard { len: usize, limit: usize },
    #[error("conditioning on length {len}, which has probability weight zero")]
    ZeroMass { len: usize },
    #[error("line {line}: {reason}")]
    Table { line: usize, reason: String },
}

/// An algorithm on binary strings that flags its own reliability.
pub trait SkcAlgorithm<T> {
    fn run(&self, x: &BitString) -> SkcOutput<T>;
}

/// Output of a benign scheme: an answer, or `?`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BenignOutput<T> {
    Value(T),
    Unknown,
}

/// An algorithm `A(x, δ)` whose non-`?` answers are correct and whose `?`
/// probability under the standard uniform distribution restricted to lengths
/// `≤ n` is at most `δ`, for every `n ≥ 1`.
pub trait BenignScheme<T> {
    fn run(&self, x: &BitString, tolerance: &BigRational) -> BenignOutput<T>;
}

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Weight of a single string under the standard uniform distribution:
/// `1/(n(n+1)2^n)` for length `n ≥ 1`, zero for the empty string.
pub fn std_uniform_density(x: &BitString) -> BigRational {
    let n = x.len();
    if n == 0 {
        return BigRational::zero();
    }
    let den = BigUint::from((n * (n + 1)) as u64) << n;
    BigRational::new(BigInt::one(), BigInt::from(den))
}

/// Total weight of the length-`n` slice, `1/(n(n+1))`.
pub fn std_uniform_length_mass(n: usize) -> BigRational {
    if n == 0 {
        BigRational::zero()
    } else {
        ratio(1, (n * (n + 1)) as u64)
    }
}

/// Total weight of lengths `1..=n`, which telescopes to `n/(n+1)`.
pub fn std_uniform_prefix_mass(n: usize) -> BigRational {
    ratio(n as u64, n as u64 + 1)
}

/// Tolerance handed to the wrapped scheme on inputs of length `n`: `1/(n+1)^3`.
pub fn wrapper_tolerance(n: usize) -> BigRational {
    let k = n as u64 + 1;
    ratio(1, k * k * k)
}

/// Per-length bound on the wrapper's maybe-fraction, `n(n+1)/(n+1)^3 = n/(n+1)^2`.
pub fn wrapper_maybe_bound(n: usize) -> BigRational {
    let k = n as u64 + 1;
    ratio(n as u64, k * k)
}

/// Self-knowingly correct algorithm built from a benign scheme.
pub struct BenignWrapper<S, T> {
    scheme: S,
    placeholder: T,
}

impl<S, T> BenignWrapper<S, T> {
    pub fn scheme(&self) -> &S {
        &self.scheme
    }
}

/// Wraps `scheme`; `?` answers become `(placeholder, maybe)`.
pub fn wrap_benign<S, T>(scheme: S, placeholder: T) -> BenignWrapper<S, T>
where
    S: BenignScheme<T>,
{
    BenignWrapper {
        scheme,
        placeholder,
    }
}

impl<S, T> SkcAlgorithm<T> for BenignWrapper<S, T>
where
    S: BenignScheme<T>,
    T: Clone,
{
    fn run(&self, x: &BitString) -> SkcOutput<T> {
        match self.scheme.run(x, &wrapper_tolerance(x.len())) {
            BenignOutput::Value(y) => SkcOutput::definitely(y),
            BenignOutput::Unknown => SkcOutput::maybe(self.placeholder.clone()),
        }
    }
}

/// Fraction of length-`n` strings on which `alg` answers `maybe`.
pub fn maybe_fraction<T, A>(alg: &A, n: usize) -> Result<BigRational, SkcError>
where
    A: SkcAlgorithm<T> + Sync,
{
    if n > MAYBE_FRACTION_MAX_LEN {
        return Err(SkcError::Guard {
            len: n,
            limit: MAYBE_FRACTION_MAX_LEN,
        });
    }
    let maybes: u64 = (0..1u64 << n)
        .into_par_iter()
        .filter(|&bits| !alg.run(&BitString::new(n, bits)).is_definite())
        .count() as u64;
    Ok(BigRational::new(BigInt::from(maybes), BigInt::one() << n))
}

/// A total function given as a table of `bitstring value` lines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FunctionTable<T> {
    entries: std::collections::BTreeMap<BitString, T>,
}

impl<T> FunctionTable<T> {
    pub fn from_fn(max_len: usize, f: impl Fn(&BitString) -> T) -> Self {
        let entries = (0..=max_len)
            .flat_map(BitString::all_of_length)
            .map(|x| {
                let y = f(&x);
                (x, y)
            })
            .collect();
        FunctionTable { entries }
    }

    pub fn get(&self, x: &BitString) -> Option<&T> {
        self.entries.get(x)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when every string of length `1..=top` has an entry.
    pub fn covers(&self, top: usize) -> bool {
        (1..=top).all(|n| BitString::all_of_length(n).all(|x| self.entries.contains_key(&x)))
    }

    pub fn insert(&mut self, x: BitString, y: T) {
        self.entries.insert(x, y);
    }
}

impl<T: FromStr> FunctionTable<T> {
    /// Parses `bitstring value` pairs, one per line. Blank lines and `#`
    /// comments are skipped; the empty string is written as `-`.
    pub fn parse(text: &str) -> Result<Self, SkcError> {
        let mut entries = std::collections::BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let mut parts = body.split_whitespace();
            let (Some(key), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(SkcError::Table {
                    line,
                    reason: "expected \"bitstring value\"".into(),
                });
            };
            let key = if key == "-" { "" } else { key };
            let x = key.parse::<BitString>().map_err(|e| SkcError::Table {
                line,
                reason: e.to_string(),
            })?;
            let y = value.parse::<T>().map_err(|_| SkcError::Table {
                line,
                reason: format!("cannot parse value {value:?}"),
            })?;
            if entries.insert(x, y).is_some() {
                return Err(SkcError::Table {
                    line,
                    reason: format!("duplicate entry for {x}"),
                });
            }
        }
        Ok(FunctionTable { entries })
    }
}

/// A scheme that never answers `?`.
pub struct ExactScheme<F>(pub F);

impl<T, F: Fn(&BitString) -> T> BenignScheme<T> for ExactScheme<F> {
    fn run(&self, x: &BitString, _tolerance: &BigRational) -> BenignOutput<T> {
        BenignOutput::Value((self.0)(x))
    }
}

/// Worst-case benign scheme: given `δ`, answers `?` on the lexicographically
/// first strings of length `top`, taking as many as fit while their weight
/// stays within `δ` times the total weight of lengths `1..=top`. Every other
/// input gets the true answer.
///
/// Because all `?` answers sit at a single length, the restricted `?`
/// probability for any `n ≥ top` only shrinks as `n` grows, and is zero for
/// `n < top`, so the scheme is benign.
pub struct AdversarialScheme<F> {
    f: F,
    top: usize,
}

pub fn adversarial_benign_scheme<F>(f: F, top: usize) -> AdversarialScheme<F> {
    assert!((1..64).contains(&top), "top length must be in 1..64");
    AdversarialScheme { f, top }
}

impl<F> AdversarialScheme<F> {
    pub fn top(&self) -> usize {
        self.top
    }

    /// Number of length-`top` strings answered with `?` under tolerance `δ`.
    pub fn unknown_count(&self, tolerance: &BigRational) -> u64 {
        if !tolerance.is_positive() {
            return 0;
        }
        let budget = tolerance * std_uniform_prefix_mass(self.top);
        let each = std_uniform_density(&BitString::zeros(self.top));
        let fit = (budget / each).floor().to_integer();
        let all = 1u64 << self.top;
        fit.to_u64().map_or(all, |k| k.min(all))
    }
}

impl<T, F: Fn(&BitString) -> T> BenignScheme<T> for AdversarialScheme<F> {
    fn run(&self, x: &BitString, tolerance: &BigRational) -> BenignOutput<T> {
        if x.len() == self.top && x.rank() < self.unknown_count(tolerance) {
            BenignOutput::Unknown
        } else {
            BenignOutput::Value((self.f)(x))
        }
    }
}

/// Which slice of the distribution an event is measured on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LengthMode {
    /// Renormalized within length `n`.
    At,
    /// Renormalized over lengths `1..=n`.
    UpTo,
}

/// Exact probability of `event` under `density`, conditioned on length `n`
/// or on lengths `1..=n`. The empty string is never included.
pub fn prob_of_event<D, E>(density: D, event: E, n: usize, mode: LengthMode) -> Result<BigRational, SkcError>
where
    D: Fn(&BitString) -> BigRational,
    E: Fn(&BitString) -> bool,
{
    if n > PROB_MAX_LEN {
        return Err(SkcError::Guard {
            len: n,
            limit: PROB_MAX_LEN,
        });
    }
    let lengths = match mode {
        LengthMode::At => n..=n,
        LengthMode::UpTo => 1..=n,
    };
    let mut total = BigRational::zero();
    let mut hit = BigRational::zero();
    for len in lengths {
        for x in BitString::all_of_length(len) {
            let w = density(&x);
            if event(&x) {
                hit += &w;
            }
            total += w;
        }
    }
    if total.is_zero() {
        return Err(SkcError::ZeroMass { len: n });
    }
    Ok(hit / total)
}

/// Prefix of the average-polynomial series, `Σ μ'(x)·t(x)^ε / |x|` over
/// `1 ≤ |x| ≤ maxlen`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialSum {
    pub value: BigRational,
    /// False when some `t(x)^ε` was irrational and went through `f64`.
    pub exact: bool,
}

impl PartialSum {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

/// `t^ε` exactly when it is rational, else `None`.
fn exact_power(t: u64, eps: &BigRational) -> Option<BigRational> {
    let p = eps.numer().to_u32()?;
    let q = eps.denom().to_u32()?;
    let base = BigUint::from(t).pow(p);
    if q == 1 {
        return Some(BigRational::from_integer(base.into()));
    }
    let root = base.nth_root(q);
    (root.pow(q) == base).then(|| BigRational::from_integer(root.into()))
}

/// Evaluates a finite prefix of the series; diagnostic only.
pub fn poly_on_average_partial_sum<R, D>(
    runtime: R,
    density: D,
    eps: &BigRational,
    maxlen: usize,
) -> Result<PartialSum, SkcError>
where
    R: Fn(&BitString) -> u64,
    D: Fn(&BitString) -> BigRational,
{
    assert!(eps.is_positive(), "epsilon must be positive");
    if maxlen > PARTIAL_SUM_MAX_LEN {
        return Err(SkcError::Guard {
            len: maxlen,
            limit: PARTIAL_SUM_MAX_LEN,
        });
    }
    let eps_f = eps.to_f64().expect("finite epsilon");
    let mut exact = true;
    let mut value = BigRational::zero();
    for len in 1..=maxlen {
        let len_r = BigRational::from_integer(BigInt::from(len));
        for x in BitString::all_of_length(len) {
            let w = density(&x);
            if w.is_zero() {
                continue;
            }
            let t = runtime(&x);
            let powered = exact_power(t, eps).unwrap_or_else(|| {
                exact = false;
                BigRational::from_float((t as f64).powf(eps_f)).unwrap_or_else(BigRational::zero)
            });
            value += w * powered / &len_r;
        }
    }
    Ok(PartialSum { value, exact })
}

/// One row of the per-length wrapper report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrapperRow {
    pub n: usize,
    pub fraction: BigRational,
    pub bound: BigRational,
    /// Definitely-flagged outputs that disagreed with the target.
    pub wrong_definite: u64,
}

impl WrapperRow {
    pub fn pass(&self) -> bool {
        self.fraction <= self.bound && self.wrong_definite == 0
    }

    pub fn csv_header() -> &'static str {
        "n,fraction_numerator,fraction_denominator,bound_numerator,bound_denominator,pass"
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n,
            self.fraction.numer(),
            self.fraction.denom(),
            self.bound.numer(),
            self.bound.denom(),
            self.pass()
        )
    }
}

/// Exhaustively checks a wrapped algorithm at length `n`: its maybe-fraction
/// against `n/(n+1)^2`, and every definite answer against `target`.
pub fn wrapper_row<T, A, F>(alg: &A, target: F, n: usize) -> Result<WrapperRow, SkcError>
where
    A: SkcAlgorithm<T> + Sync,
    F: Fn(&BitString) -> T + Sync,
    T: PartialEq,
{
    let fraction = maybe_fraction(alg, n)?;
    let wrong_definite = (0..1u64 << n)
        .into_par_iter()
        .filter(|&bits| {
            let x = BitString::new(n, bits);
            let out = alg.run(&x);
            out.is_definite() && out.value != target(&x)
        })
        .count() as u64;
    Ok(WrapperRow {
        n,
        fraction,
        bound: wrapper_maybe_bound(n),
        wrong_definite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn density_examples() {
        assert_eq!(std_uniform_density(&bs("0")), q(1, 4));
        assert_eq!(std_uniform_density(&bs("01")), q(1, 24));
        assert_eq!(std_uniform_density(&BitString::EMPTY), q(0, 1));
    }

    #[test]
    fn slice_masses_telescope() {
        let mut acc = BigRational::zero();
        for n in 1..=24usize {
            let slice = std_uniform_density(&BitString::zeros(n)) * BigRational::from_integer(BigInt::one() << n);
            assert_eq!(slice, std_uniform_length_mass(n));
            acc += slice;
            assert_eq!(acc, q(n as i64, n as i64 + 1));
        }
    }

    #[test]
    fn tolerance_at_length_three() {
        assert_eq!(wrapper_tolerance(3), q(1, 64));
    }

    struct Always(Flag);
    impl SkcAlgorithm<u8> for Always {
        fn run(&self, _x: &BitString) -> SkcOutput<u8> {
            SkcOutput { value: 0, flag: self.0 }
        }
    }

    #[test]
    fn maybe_fraction_extremes() {
        assert_eq!(maybe_fraction(&Always(Flag::Definitely), 5).unwrap(), q(0, 1));
        assert_eq!(maybe_fraction(&Always(Flag::Maybe), 5).unwrap(), q(1, 1));
        assert_eq!(
            maybe_fraction(&Always(Flag::Maybe), 25),
            Err(SkcError::Guard { len: 25, limit: 24 })
        );
    }

    #[test]
    fn exact_scheme_never_maybe() {
        let w = wrap_benign(ExactScheme(|x: &BitString| x.count_ones()), u32::MAX);
        for n in 1..=8 {
            assert_eq!(maybe_fraction(&w, n).unwrap(), q(0, 1));
        }
        assert_eq!(w.run(&bs("1101")), SkcOutput::definitely(3));
    }

    #[test]
    fn adversarial_scheme_saturation_and_zero() {
        let s = adversarial_benign_scheme(|x: &BitString| x.count_ones(), 3);
        // cap: slice mass / prefix mass at length 3 = (1/12)/(3/4) = 1/9
        assert_eq!(s.unknown_count(&q(1, 9)), 8);
        assert_eq!(s.unknown_count(&q(1, 2)), 8);
        assert_eq!(s.unknown_count(&q(0, 1)), 0);
        assert_eq!(s.run(&bs("000"), &q(0, 1)), BenignOutput::Value(0));
    }

    #[test]
    fn adversarial_unknown_mass_within_budget() {
        let s = adversarial_benign_scheme(|x: &BitString| x.count_ones(), 3);
        let delta = q(1, 64);
        let k = s.unknown_count(&delta);
        let mass = std_uniform_density(&bs("000")) * BigRational::from_integer(k.into());
        let budget = &delta * (q(1, 2) + q(1, 6) + q(1, 12));
        assert!(mass <= budget);
        // one more string would exceed it
        let over = std_uniform_density(&bs("000")) * BigRational::from_integer((k + 1).into());
        assert!(over > budget);
    }

    #[test]
    fn prob_of_event_examples() {
        assert_eq!(prob_of_event(std_uniform_density, |_| true, 4, LengthMode::At).unwrap(), q(1, 1));
        assert_eq!(prob_of_event(std_uniform_density, |_| true, 4, LengthMode::UpTo).unwrap(), q(1, 1));
        for n in 1..=8usize {
            let p = prob_of_event(std_uniform_density, |x| x.len() == n, n, LengthMode::UpTo).unwrap();
            assert_eq!(p, q(1, (n * n) as i64));
        }
        assert_eq!(
            prob_of_event(std_uniform_density, |x| *x == bs("0"), 1, LengthMode::At).unwrap(),
            q(1, 2)
        );
    }

    #[test]
    fn zero_mass_conditioning_is_an_error() {
        let density = |x: &BitString| if x.len() == 2 { q(0, 1) } else { std_uniform_density(x) };
        assert_eq!(
            prob_of_event(density, |_| true, 2, LengthMode::At),
            Err(SkcError::ZeroMass { len: 2 })
        );
    }

    #[test]
    fn partial_sum_examples() {
        let s = poly_on_average_partial_sum(|x| x.len() as u64, std_uniform_density, &q(1, 1), 2).unwrap();
        assert_eq!(s.value, q(2, 3));
        assert!(s.exact);

        // t ≡ 1 reduces to Σ μ'(x)/|x| = Σ_n 1/(n·n(n+1))
        let s = poly_on_average_partial_sum(|_| 1, std_uniform_density, &q(1, 2), 3).unwrap();
        assert_eq!(s.value, q(1, 2) + q(1, 12) + q(1, 36));
        assert!(s.exact);

        // perfect squares stay exact under ε = 1/2
        let s = poly_on_average_partial_sum(|_| 4, std_uniform_density, &q(1, 2), 1).unwrap();
        assert_eq!(s.value, q(1, 1));
        assert!(s.exact);

        let s = poly_on_average_partial_sum(|_| 2, std_uniform_density, &q(1, 2), 1).unwrap();
        assert!(!s.exact);
        assert!((s.to_f64() - 2f64.sqrt() / 2.0).abs() < 1e-12);

        assert!(poly_on_average_partial_sum(|_| 1, std_uniform_density, &q(1, 1), 17).is_err());
    }

    #[test]
    fn function_table_parsing() {
        let t: FunctionTable<i64> = FunctionTable::parse("# f\n0 1\n1 -2\n\n- 7\n").unwrap();
        assert_eq!(t.get(&bs("1")), Some(&-2));
        assert_eq!(t.get(&BitString::EMPTY), Some(&7));
        assert!(t.covers(1));
        assert!(!t.covers(2));
        assert!(matches!(
            FunctionTable::<i64>::parse("0 1\n0 2\n"),
            Err(SkcError::Table { line: 2, .. })
        ));
        assert!(matches!(
            FunctionTable::<i64>::parse("02 1\n"),
            Err(SkcError::Table { line: 1, .. })
        ));
    }
}
