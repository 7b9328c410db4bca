//! A small CNF language over binary strings, decided by exhaustive
//! assignment search, with designated members and non-members per length.
//!
//! # Encoding
//!
//! A string of length `n` encodes a CNF formula as follows.
//!
//! * `v = ⌈n/6⌉` variables, indexed with `b = ⌈log2 v⌉` bits (`b = 0` when `v = 1`).
//! * A literal occupies `1 + b` bits: a polarity bit (`1` = negated) followed
//!   by the variable index, most significant bit first.
//! * The string is read left to right as `ℓ = ⌊n/(1+b)⌋` literals. The
//!   `n mod (1+b)` trailing padding bits must all be `0`.
//! * Literals are grouped into consecutive clauses of width
//!   `k = max(1, min(3, ⌊ℓ/2⌋))`; a final group of fewer than `k` literals
//!   forms a shorter clause.
//!
//! A string is a member when it decodes (padding is zero and every index is
//! below `v`) and the formula is satisfiable. Strings that fail to decode are
//! non-members.
//!
//! The designated member at length `n` is `0^n` (every literal is `x0`). The
//! designated non-member is `0^n` with the polarity bits of the second clause
//! set, giving `(x0 ∨ …) ∧ (¬x0 ∨ …)` with both clauses over `x0` alone.
//! Both exist as soon as `ℓ ≥ 2`.

use std::sync::Arc;

use crate::bits::{BitString, MAX_BITS};
use crate::junta::PiercedSet;

/// A literal: variable index and polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<Literal>>,
}

impl Cnf {
    pub fn eval(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|clause| {
            clause
                .iter()
                .any(|lit| ((assignment >> lit.var) & 1 == 1) != lit.negated)
        })
    }

    /// Tries all `2^vars` assignments.
    pub fn satisfiable(&self) -> bool {
        assert!(self.vars < 64);
        (0..1u64 << self.vars).any(|a| self.eval(a))
    }
}

/// Layout parameters for strings of length `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub vars: usize,
    pub index_bits: usize,
    pub literals: usize,
    pub clause_width: usize,
}

impl Layout {
    pub fn for_length(n: usize) -> Layout {
        let vars = n.div_ceil(6).max(1);
        let index_bits = if vars <= 1 {
            0
        } else {
            (usize::BITS - (vars - 1).leading_zeros()) as usize
        };
        let literals = n / (1 + index_bits);
        let clause_width = (literals / 2).clamp(1, 3);
        Layout {
            vars,
            index_bits,
            literals,
            clause_width,
        }
    }

    pub fn literal_width(&self) -> usize {
        1 + self.index_bits
    }
}

/// Decodes `x`, or `None` when padding is nonzero or an index is out of range.
pub fn decode(x: &BitString) -> Option<Cnf> {
    let layout = Layout::for_length(x.len());
    let w = layout.literal_width();
    let used = layout.literals * w;
    if x.field(used, x.len() - used) != 0 {
        return None;
    }
    let mut literals = Vec::with_capacity(layout.literals);
    for i in 0..layout.literals {
        let negated = x.bit(i * w);
        let var = x.field(i * w + 1, layout.index_bits) as usize;
        if var >= layout.vars {
            return None;
        }
        literals.push(Literal { var, negated });
    }
    let clauses = literals
        .chunks(layout.clause_width)
        .map(<[Literal]>::to_vec)
        .collect();
    Some(Cnf {
        vars: layout.vars,
        clauses,
    })
}

pub fn is_member(x: &BitString) -> bool {
    decode(x).is_some_and(|f| f.satisfiable())
}

/// Designated member `0^n`.
pub fn designated_member(n: usize) -> BitString {
    BitString::zeros(n)
}

/// Designated non-member, or `None` when fewer than two clauses fit.
pub fn designated_non_member(n: usize) -> Option<BitString> {
    let layout = Layout::for_length(n);
    if layout.literals < 2 {
        return None;
    }
    let w = layout.literal_width();
    let k = layout.clause_width;
    let bits = (k..2 * k).fold(0u64, |acc, i| acc | 1u64 << (n - 1 - i * w));
    Some(BitString::new(n, bits))
}

/// First length from which both designated strings exist at every longer
/// length representable as a [`BitString`].
pub fn threshold() -> usize {
    let ok = |n: usize| designated_non_member(n).is_some();
    (1..=MAX_BITS)
        .find(|&n| (n..=MAX_BITS).all(ok))
        .expect("designators exist at the longest representable length")
}

/// The toy satisfiability language as a pierced set.
pub fn toy_pierced_sat() -> PiercedSet {
    PiercedSet {
        member: Arc::new(is_member),
        pos: Arc::new(designated_member),
        neg: Arc::new(|n| designated_non_member(n).expect("length at or above the threshold")),
        threshold: threshold(),
    }
}
