//! Eventually periodic bi-infinite sequences in canonical form.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::ShiftError;

use super::Alphabet;

/// A point `… left left | core | right right …` of a full shift.
///
/// Coordinates `i < offset` follow the left word repeated towards `-∞`
/// (so `x_{offset-1}` is the last letter of `left`), `offset ≤ i < offset+|core|`
/// read the core, and the right word repeats from `offset+|core|` onwards.
///
/// Canonical form: both tail words are primitive, the core is as short as
/// possible, an empty core sits at the leftmost admissible boundary, and a
/// purely periodic point has `left == right` and `offset == 0`. Two points are
/// equal iff their canonical forms are identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EPPoint {
    arity: u8,
    left: Vec<u8>,
    core: Vec<u8>,
    right: Vec<u8>,
    offset: i64,
}

/// JSON form `{ "left": word, "core": word, "right": word }` with optional `offset`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EPPointDoc {
    pub left: String,
    #[serde(default)]
    pub core: String,
    pub right: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub offset: i64,
}

fn is_zero(v: &i64) -> bool {
    *v == 0
}

/// Length of the primitive root of `word`.
fn primitive_period(word: &[u8]) -> usize {
    let n = word.len();
    // Failure function; the smallest period is n - border when it divides n.
    let mut fail = vec![0usize; n + 1];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && word[i] != word[k] {
            k = fail[k];
        }
        if word[i] == word[k] {
            k += 1;
        }
        fail[i + 1] = k;
    }
    let period = n - fail[n];
    if n % period == 0 {
        period
    } else {
        n
    }
}

impl EPPoint {
    /// Builds a point from raw words and brings it to canonical form.
    pub fn new(
        arity: u8,
        left: Vec<u8>,
        core: Vec<u8>,
        right: Vec<u8>,
        offset: i64,
    ) -> Result<Self, ShiftError> {
        if left.is_empty() || right.is_empty() {
            return Err(ShiftError::InvalidPoint(
                "tail words must be nonempty".into(),
            ));
        }
        if arity == 0 || left.iter().chain(&core).chain(&right).any(|&s| s >= arity) {
            return Err(ShiftError::InvalidPoint(
                "symbol outside the alphabet".into(),
            ));
        }
        let mut point = Self {
            arity,
            left,
            core,
            right,
            offset,
        };
        point.canonicalize();
        Ok(point)
    }

    /// The constant point `a^∞`.
    pub fn constant(arity: u8, symbol: u8) -> Result<Self, ShiftError> {
        Self::new(arity, vec![symbol], Vec::new(), vec![symbol], 0)
    }

    /// The periodic point with `x_i = word[i mod |word|]`.
    pub fn periodic(arity: u8, word: Vec<u8>) -> Result<Self, ShiftError> {
        Self::new(arity, word.clone(), Vec::new(), word, 0)
    }

    fn canonicalize(&mut self) {
        let p = primitive_period(&self.left);
        self.left.truncate(p);
        let p = primitive_period(&self.right);
        self.right.truncate(p);

        while !self.core.is_empty() && self.core[0] == self.left[0] {
            self.core.remove(0);
            self.left.rotate_left(1);
            self.offset += 1;
        }
        while let Some(&last) = self.core.last() {
            if last != *self.right.last().expect("nonempty") {
                break;
            }
            self.core.pop();
            self.right.rotate_right(1);
        }
        if !self.core.is_empty() {
            return;
        }
        if self.left == self.right {
            let p = self.right.len() as i64;
            let word = (0..p)
                .map(|j| self.right[(j - self.offset).rem_euclid(p) as usize])
                .collect::<Vec<_>>();
            self.left = word.clone();
            self.right = word;
            self.offset = 0;
            return;
        }
        // Overlapping tails: slide the boundary as far left as it goes. Two
        // distinct primitive periods cannot agree on more than |L|+|R| letters.
        let limit = self.left.len() + self.right.len();
        for _ in 0..limit {
            if self.left.last() != self.right.last() {
                break;
            }
            self.left.rotate_right(1);
            self.right.rotate_right(1);
            self.offset -= 1;
        }
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn left(&self) -> &[u8] {
        &self.left
    }

    pub fn core(&self) -> &[u8] {
        &self.core
    }

    pub fn right(&self) -> &[u8] {
        &self.right
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// `|left| + |core| + |right|` of the canonical form.
    pub fn description_size(&self) -> usize {
        self.left.len() + self.core.len() + self.right.len()
    }

    pub fn is_periodic(&self) -> bool {
        self.core.is_empty() && self.left == self.right
    }

    /// First coordinate of the right tail.
    pub(crate) fn right_start(&self) -> i64 {
        self.offset + self.core.len() as i64
    }

    /// Symbol at coordinate `i`.
    pub fn at(&self, i: i64) -> u8 {
        if i < self.offset {
            let p = self.left.len() as i64;
            self.left[(i - self.offset).rem_euclid(p) as usize]
        } else if i < self.right_start() {
            self.core[(i - self.offset) as usize]
        } else {
            let p = self.right.len() as i64;
            self.right[(i - self.right_start()).rem_euclid(p) as usize]
        }
    }

    /// Symbols at coordinates `from..to`.
    pub fn window(&self, from: i64, to: i64) -> Vec<u8> {
        (from..to).map(|i| self.at(i)).collect()
    }

    /// `σ^n(x)`, with `σ^n(x)_i = x_{i+n}`.
    pub fn shift(&self, n: i64) -> Self {
        let mut out = self.clone();
        if self.is_periodic() {
            let p = self.right.len() as i64;
            out.right = (0..p)
                .map(|j| self.right[(j + n).rem_euclid(p) as usize])
                .collect();
            out.left = out.right.clone();
        } else {
            out.offset -= n;
        }
        out
    }

    pub(crate) fn check_same_alphabet(&self, other: &Self) -> Result<(), ShiftError> {
        if self.arity != other.arity {
            return Err(ShiftError::AlphabetMismatch(format!(
                "alphabets of size {} and {}",
                self.arity, other.arity
            )));
        }
        Ok(())
    }

    pub fn from_doc(alphabet: &Alphabet, doc: &EPPointDoc) -> Result<Self, ShiftError> {
        Self::new(
            alphabet.size(),
            alphabet.encode(&doc.left)?,
            alphabet.encode(&doc.core)?,
            alphabet.encode(&doc.right)?,
            doc.offset,
        )
    }

    pub fn to_doc(&self, alphabet: &Alphabet) -> EPPointDoc {
        EPPointDoc {
            left: alphabet.decode(&self.left),
            core: alphabet.decode(&self.core),
            right: alphabet.decode(&self.right),
            offset: self.offset,
        }
    }

    /// Size-lexicographic order on canonical descriptions.
    pub fn description_cmp(&self, other: &Self) -> Ordering {
        (
            self.description_size(),
            &self.left,
            &self.core,
            &self.right,
            self.offset,
        )
            .cmp(&(
                other.description_size(),
                &other.left,
                &other.core,
                &other.right,
                other.offset,
            ))
    }
}

impl fmt::Display for EPPoint {
    /// `(left)^∞ · core · (right)^∞ @offset`, symbols as indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = |w: &[u8]| w.iter().map(|s| s.to_string()).collect::<String>();
        write!(
            f,
            "({})^inf.{}.({})^inf@{}",
            word(&self.left),
            word(&self.core),
            word(&self.right),
            self.offset
        )
    }
}

/// Where two points are both inside their tails: coordinates `< left_end`
/// lie in both left tails and `≥ right_start` in both right tails; the
/// periods are the least common periods of the respective tails.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Span {
    pub left_end: i64,
    pub left_period: i64,
    pub right_start: i64,
    pub right_period: i64,
}

pub(crate) fn comparison_span(x: &EPPoint, y: &EPPoint) -> Span {
    Span {
        left_end: x.offset.min(y.offset),
        left_period: x.left.len().lcm(&y.left.len()) as i64,
        right_start: x.right_start().max(y.right_start()),
        right_period: x.right.len().lcm(&y.right.len()) as i64,
    }
}
