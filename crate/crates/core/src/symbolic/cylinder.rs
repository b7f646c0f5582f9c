use serde::{Deserialize, Serialize};

use crate::error::ShiftError;
use crate::scalar::GaussianRational;

use super::{Alphabet, EPPoint};

/// An observable depending only on coordinates `[-w, w]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderObservable {
    arity: u8,
    radius: usize,
    /// Indexed by the window word read as a base-`arity` number, most significant first.
    table: Vec<GaussianRational>,
}

#[derive(Serialize, Deserialize)]
pub struct CylinderDoc {
    pub window: usize,
    pub table: serde_json::Map<String, serde_json::Value>,
}

impl CylinderObservable {
    pub fn from_fn(arity: u8, radius: usize, f: impl Fn(&[u8]) -> GaussianRational) -> Self {
        let width = 2 * radius + 1;
        let count = (arity as usize).pow(width as u32);
        let table = (0..count)
            .map(|code| f(&Self::decode_word(arity, width, code)))
            .collect();
        Self {
            arity,
            radius,
            table,
        }
    }

    /// `x ↦ value_of(x_0)`.
    pub fn coordinate(arity: u8, value_of: impl Fn(u8) -> GaussianRational) -> Self {
        Self::from_fn(arity, 0, |w| value_of(w[0]))
    }

    /// Assigns the value `code` to the window word with that code: separates all windows.
    pub fn injective(arity: u8, radius: usize) -> Self {
        Self::from_fn(arity, radius, |w| {
            GaussianRational::from_ints(Self::encode_word(arity, w) as i64, 0)
        })
    }

    pub fn from_table(
        arity: u8,
        radius: usize,
        table: Vec<GaussianRational>,
    ) -> Result<Self, ShiftError> {
        let expected = (arity as usize).pow((2 * radius + 1) as u32);
        if table.len() != expected {
            return Err(ShiftError::InvalidObservable(format!(
                "table has {} entries, expected {expected}",
                table.len()
            )));
        }
        Ok(Self {
            arity,
            radius,
            table,
        })
    }

    fn encode_word(arity: u8, word: &[u8]) -> usize {
        word.iter()
            .fold(0, |acc, &s| acc * arity as usize + s as usize)
    }

    fn decode_word(arity: u8, width: usize, mut code: usize) -> Vec<u8> {
        let mut word = vec![0u8; width];
        for slot in word.iter_mut().rev() {
            *slot = (code % arity as usize) as u8;
            code /= arity as usize;
        }
        word
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn table(&self) -> &[GaussianRational] {
        &self.table
    }

    /// `φ(σ^n x)`, read off the window `x_{n-w..=n+w}`.
    pub fn eval_at(&self, x: &EPPoint, n: i64) -> &GaussianRational {
        let r = self.radius as i64;
        let word = x.window(n - r, n + r + 1);
        &self.table[Self::encode_word(self.arity, &word)]
    }

    /// Parses `{ "window": w, "table": { word: ["re","im"] } }`; missing words default to 0.
    pub fn parse(alphabet: &Alphabet, document: &str) -> Result<Self, ShiftError> {
        let doc: CylinderDoc = serde_json::from_str(document)?;
        let width = 2 * doc.window + 1;
        let mut table =
            vec![GaussianRational::zero(); (alphabet.size() as usize).pow(width as u32)];
        for (word, value) in doc.table {
            let symbols = alphabet.encode(&word)?;
            if symbols.len() != width {
                return Err(ShiftError::InvalidObservable(format!(
                    "word `{word}` does not have length {width}"
                )));
            }
            let pair: Vec<String> = serde_json::from_value(value)?;
            table[Self::encode_word(alphabet.size(), &symbols)] =
                GaussianRational::from_text_pair(&pair)
                    .map_err(|e| ShiftError::InvalidObservable(e.to_string()))?;
        }
        Self::from_table(alphabet.size(), doc.window, table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_lookup() {
        let phi = CylinderObservable::injective(2, 1);
        let x = EPPoint::new(2, vec![0], vec![1, 1], vec![0], 0).unwrap();
        // x_{-1..=1} = 0 1 1 -> code 3
        assert_eq!(phi.eval_at(&x, 0), &GaussianRational::from_ints(3, 0));
        assert_eq!(phi.eval_at(&x, 2), &GaussianRational::from_ints(4, 0));
    }

    #[test]
    fn parse_defaults_to_zero() {
        let alphabet = Alphabet::binary();
        let phi = CylinderObservable::parse(&alphabet, r#"{"window":0,"table":{"1":["1","0"]}}"#)
            .unwrap();
        assert_eq!(
            phi,
            CylinderObservable::coordinate(2, |s| GaussianRational::from_ints(s as i64, 0))
        );
        assert!(
            CylinderObservable::parse(&alphabet, r#"{"window":1,"table":{"1":["1","0"]}}"#)
                .is_err()
        );
    }
}
