use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::ShiftError;

use super::{stable_equiv, Alphabet, EPPoint, Side};

/// A subshift of finite type given by forbidden words.
#[derive(Clone, Debug)]
pub struct Subshift {
    alphabet: Alphabet,
    forbidden: Vec<Vec<u8>>,
}

#[derive(Serialize, Deserialize)]
pub struct SubshiftDoc {
    pub alphabet: Vec<String>,
    #[serde(default)]
    pub forbidden: Vec<String>,
}

impl Subshift {
    pub fn new(alphabet: Alphabet, forbidden: Vec<Vec<u8>>) -> Result<Self, ShiftError> {
        if forbidden.iter().any(Vec::is_empty) {
            return Err(ShiftError::Malformed(
                "forbidden words must be nonempty".into(),
            ));
        }
        Ok(Self {
            alphabet,
            forbidden,
        })
    }

    pub fn full(alphabet: Alphabet) -> Self {
        Self {
            alphabet,
            forbidden: Vec::new(),
        }
    }

    /// Binary shift without the word `11`.
    pub fn golden_mean() -> Self {
        Self {
            alphabet: Alphabet::binary(),
            forbidden: vec![vec![1, 1]],
        }
    }

    pub fn parse(document: &str) -> Result<Self, ShiftError> {
        let doc: SubshiftDoc = serde_json::from_str(document)?;
        let alphabet = Alphabet::from_strings(&doc.alphabet)?;
        let forbidden = doc
            .forbidden
            .iter()
            .map(|w| alphabet.encode(w))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(alphabet, forbidden)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Whether no forbidden word occurs anywhere in `x`.
    pub fn admits(&self, x: &EPPoint) -> bool {
        let longest = self.forbidden.iter().map(Vec::len).max().unwrap_or(0) as i64;
        if longest == 0 {
            return true;
        }
        // Every window of length ≤ longest already occurs within one tail
        // period plus `longest` of the core.
        let from = x.offset() - x.left().len() as i64 - longest;
        let to = x.offset() + x.core().len() as i64 + x.right().len() as i64 + longest;
        let text = x.window(from, to);
        !self
            .forbidden
            .iter()
            .any(|word| text.windows(word.len()).any(|w| w == word.as_slice()))
    }
}

fn words(arity: u8, len: usize) -> impl Iterator<Item = Vec<u8>> {
    let count = (arity as usize).pow(len as u32);
    (0..count).map(move |mut code| {
        let mut word = vec![0u8; len];
        for slot in word.iter_mut().rev() {
            *slot = (code % arity as usize) as u8;
            code /= arity as usize;
        }
        word
    })
}

/// Every distinct point whose raw description `(left, core, right)` at
/// offset 0 has total size `≤ bound`, in size-lexicographic order of the
/// raw descriptions (first occurrence wins).
pub fn enumerate_points(arity: u8, bound: usize) -> Vec<EPPoint> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for size in 2..=bound {
        for left_len in 1..size {
            for right_len in 1..=(size - left_len) {
                let core_len = size - left_len - right_len;
                for left in words(arity, left_len) {
                    for core in words(arity, core_len) {
                        for right in words(arity, right_len) {
                            let p = EPPoint::new(arity, left.clone(), core.clone(), right, 0)
                                .expect("enumerated words are valid");
                            if seen.insert(p.clone()) {
                                out.push(p);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Searches for distinct `x`, `y` with `y ∈ W^s(x)`: `x` ranges over periodic
/// points in size-lexicographic order and `y` replaces a finite window of `x`
/// by a core word, so the pair is asymptotic in both time directions.
pub fn find_asymptotic_pair(
    subshift: &Subshift,
    bound: usize,
) -> Result<(EPPoint, EPPoint), ShiftError> {
    let arity = subshift.alphabet.size();
    for period in 1..=bound / 2 {
        for word in words(arity, period) {
            let x = EPPoint::periodic(arity, word.clone())?;
            if x.left().len() != period || !subshift.admits(&x) {
                continue;
            }
            for core_len in 1..=(bound - 2 * period) {
                for core in words(arity, core_len) {
                    let y = EPPoint::new(arity, word.clone(), core, word.clone(), 0)?;
                    if y != x && subshift.admits(&y) && stable_equiv(&x, &y, Side::S)? {
                        return Ok((x, y));
                    }
                }
            }
        }
    }
    Err(ShiftError::NoPairFound(bound))
}
