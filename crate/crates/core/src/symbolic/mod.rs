//! The shift map on eventually periodic bi-infinite sequences.
//!
//! Eventually periodic points are dense in every full shift and closed under
//! the shift, and on them equality, the metric, tails and limits are all
//! decidable from finite data. The metric is the standard
//! `d(x,y) = 2^{-m}`, `m = min { |i| : x_i ≠ y_i }`.

mod cylinder;
mod point;
mod subshift;

use serde::Serialize;

use crate::error::ShiftError;
use crate::scalar::{pow2_neg, ExactScalar};

pub use cylinder::{CylinderDoc, CylinderObservable};
pub use point::{EPPoint, EPPointDoc};
pub use subshift::{enumerate_points, find_asymptotic_pair, Subshift, SubshiftDoc};

use num_traits::{One, Zero};
use point::comparison_span;

/// Finite alphabet of single-character symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: Vec<char>) -> Result<Self, ShiftError> {
        if symbols.is_empty() || symbols.len() > u8::MAX as usize {
            return Err(ShiftError::Malformed(
                "alphabet must have 1..=255 symbols".into(),
            ));
        }
        for (i, c) in symbols.iter().enumerate() {
            if symbols[..i].contains(c) {
                return Err(ShiftError::Malformed(format!("duplicate symbol `{c}`")));
            }
        }
        Ok(Self { symbols })
    }

    pub fn binary() -> Self {
        Self {
            symbols: vec!['0', '1'],
        }
    }

    pub fn from_strings(symbols: &[String]) -> Result<Self, ShiftError> {
        let chars = symbols
            .iter()
            .map(|s| {
                let mut it = s.chars();
                match (it.next(), it.next()) {
                    (Some(c), None) => Ok(c),
                    _ => Err(ShiftError::Malformed(format!(
                        "symbol `{s}` is not a single character"
                    ))),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(chars)
    }

    pub fn size(&self) -> u8 {
        self.symbols.len() as u8
    }

    pub fn encode(&self, word: &str) -> Result<Vec<u8>, ShiftError> {
        word.chars()
            .map(|c| {
                self.symbols
                    .iter()
                    .position(|&s| s == c)
                    .map(|i| i as u8)
                    .ok_or_else(|| {
                        ShiftError::AlphabetMismatch(format!("symbol `{c}` is not in the alphabet"))
                    })
            })
            .collect()
    }

    pub fn decode(&self, word: &[u8]) -> String {
        word.iter().map(|&s| self.symbols[s as usize]).collect()
    }
}

/// Which half-orbit a dynamical ball or stable set constrains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Forward orbit (`n ≥ 0`).
    S,
    /// Backward orbit (`n ≤ 0`).
    U,
}

impl std::str::FromStr for Side {
    type Err = ShiftError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "s" => Ok(Side::S),
            "u" => Ok(Side::U),
            other => Err(ShiftError::Malformed(format!(
                "side must be `s` or `u`, got `{other}`"
            ))),
        }
    }
}

/// Smallest coordinate magnitude where the points differ, `None` when equal.
fn first_difference(x: &EPPoint, y: &EPPoint) -> Option<u64> {
    if x == y {
        return None;
    }
    let span = comparison_span(x, y);
    let reach = (span.left_end - span.left_period)
        .unsigned_abs()
        .max((span.right_start + span.right_period).unsigned_abs());
    (0..=reach).find(|&m| {
        let m = m as i64;
        x.at(m) != y.at(m) || x.at(-m) != y.at(-m)
    })
}

/// `d(x,y) = 2^{-m}` with `m = min { |i| : x_i ≠ y_i }`, `0` when equal.
pub fn sym_distance(x: &EPPoint, y: &EPPoint) -> Result<ExactScalar, ShiftError> {
    x.check_same_alphabet(y)?;
    Ok(first_difference(x, y).map_or_else(ExactScalar::zero, pow2_neg))
}

/// `sup_i d(σ^i x, σ^i y)`: any disagreement can be shifted to coordinate 0.
pub fn sym_orbit_sup(x: &EPPoint, y: &EPPoint) -> Result<ExactScalar, ShiftError> {
    x.check_same_alphabet(y)?;
    Ok(if x == y {
        ExactScalar::zero()
    } else {
        ExactScalar::one()
    })
}

/// Requested and effective radius of a dynamical ball; the effective radius
/// is the requested one snapped down to `2^{-k}`, `k ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radius {
    pub requested: ExactScalar,
    pub k: u64,
}

impl Radius {
    pub fn snap(eps: &ExactScalar) -> Result<Self, ShiftError> {
        if eps <= &ExactScalar::zero() {
            return Err(ShiftError::Malformed("radius must be positive".into()));
        }
        let mut k = 0;
        while &pow2_neg(k) > eps {
            k += 1;
        }
        Ok(Self {
            requested: eps.clone(),
            k,
        })
    }

    pub fn effective(&self) -> ExactScalar {
        pow2_neg(self.k)
    }
}

/// Open dynamical ball: `d(σ^n x, σ^n y) < 2^{-k}` for all `n ≥ 0` (side `s`)
/// or all `n ≤ 0` (side `u`). Equivalently `x_i = y_i` for all `i ≥ -k`
/// (resp. all `i ≤ k`).
pub fn in_dynamical_ball(
    x: &EPPoint,
    y: &EPPoint,
    radius: &Radius,
    side: Side,
) -> Result<bool, ShiftError> {
    x.check_same_alphabet(y)?;
    let k = radius.k as i64;
    let span = comparison_span(x, y);
    Ok(match side {
        Side::S => (-k..span.right_start.max(-k) + span.right_period).all(|i| x.at(i) == y.at(i)),
        Side::U => (span.left_end.min(k + 1) - span.left_period..=k).all(|i| x.at(i) == y.at(i)),
    })
}

/// `y ∈ W^s(x)` (resp. `W^u`): the right (resp. left) tails eventually agree.
pub fn stable_equiv(x: &EPPoint, y: &EPPoint, side: Side) -> Result<bool, ShiftError> {
    x.check_same_alphabet(y)?;
    let span = comparison_span(x, y);
    Ok(match side {
        Side::S => {
            (span.right_start..span.right_start + span.right_period).all(|i| x.at(i) == y.at(i))
        }
        Side::U => (span.left_end - span.left_period..span.left_end).all(|i| x.at(i) == y.at(i)),
    })
}

/// `y ∈ W^s(x, φ)` (resp. `W^u`): `|φ(σ^n x) − φ(σ^n y)|` is eventually zero.
///
/// Once the window of `φ` lies inside both tails the difference sequence is
/// periodic with the common tail period, so one period decides it.
pub fn obs_stable_equiv(
    x: &EPPoint,
    y: &EPPoint,
    phi: &CylinderObservable,
    side: Side,
) -> Result<bool, ShiftError> {
    x.check_same_alphabet(y)?;
    if phi.arity() != x.arity() {
        return Err(ShiftError::AlphabetMismatch(
            "observable and points use different alphabets".into(),
        ));
    }
    let span = comparison_span(x, y);
    let w = phi.radius() as i64;
    let same = |n: i64| phi.eval_at(x, n) == phi.eval_at(y, n);
    Ok(match side {
        Side::S => {
            let start = span.right_start + w;
            (start..start + span.right_period).all(same)
        }
        Side::U => {
            let end = span.left_end - w;
            (end - span.left_period..end).all(same)
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BallInclusionReport {
    #[serde(with = "crate::scalar::as_text")]
    pub requested_epsilon: ExactScalar,
    #[serde(with = "crate::scalar::as_text")]
    pub effective_epsilon: ExactScalar,
    pub side: Side,
    pub enumerated: usize,
    pub in_ball: usize,
    pub counterexamples: Vec<EPPointDoc>,
    pub passed: bool,
}

/// Checks `W_ε(x) ⊆ W(x, φ)` over `candidates` (plus `x` itself).
pub fn check_ball_inclusion_in(
    candidates: &[EPPoint],
    x: &EPPoint,
    phi: &CylinderObservable,
    eps: &ExactScalar,
    side: Side,
    alphabet: &Alphabet,
) -> Result<BallInclusionReport, ShiftError> {
    let radius = Radius::snap(eps)?;
    let mut in_ball = 0;
    let mut counterexamples = Vec::new();
    let mut checked_self = false;
    for y in candidates.iter().chain(std::iter::once(x)) {
        if y == x {
            if checked_self {
                continue;
            }
            checked_self = true;
        }
        if in_dynamical_ball(x, y, &radius, side)? {
            in_ball += 1;
            if !obs_stable_equiv(x, y, phi, side)? {
                counterexamples.push(y.to_doc(alphabet));
            }
        }
    }
    let enumerated = candidates.len() + usize::from(!candidates.contains(x));
    Ok(BallInclusionReport {
        requested_epsilon: radius.requested.clone(),
        effective_epsilon: radius.effective(),
        side,
        enumerated,
        in_ball,
        passed: counterexamples.is_empty(),
        counterexamples,
    })
}

/// Enumerates every point of description size `≤ bound` and checks that the
/// dynamical ball around `x` lies in the observable's stable set.
pub fn check_ball_inclusion(
    x: &EPPoint,
    phi: &CylinderObservable,
    eps: &ExactScalar,
    side: Side,
    bound: usize,
    alphabet: &Alphabet,
) -> Result<BallInclusionReport, ShiftError> {
    let candidates = enumerate_points(x.arity(), bound);
    check_ball_inclusion_in(&candidates, x, phi, eps, side, alphabet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn zero() -> EPPoint {
        EPPoint::constant(2, 0).unwrap()
    }

    fn spike() -> EPPoint {
        EPPoint::new(2, vec![0], vec![1], vec![0], 0).unwrap()
    }

    fn alternating() -> EPPoint {
        EPPoint::periodic(2, vec![0, 1]).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(sym_distance(&zero(), &spike()).unwrap(), int(1));
        assert_eq!(
            sym_distance(&zero(), &spike().shift(-3)).unwrap(),
            ratio(1, 8)
        );
        assert_eq!(sym_distance(&spike(), &spike()).unwrap(), int(0));
        let ternary = EPPoint::constant(3, 0).unwrap();
        assert!(matches!(
            sym_distance(&zero(), &ternary),
            Err(ShiftError::AlphabetMismatch(_))
        ));
    }

    #[test]
    fn orbit_sup_examples() {
        assert_eq!(sym_orbit_sup(&zero(), &spike().shift(-9)).unwrap(), int(1));
        assert_eq!(sym_orbit_sup(&zero(), &zero()).unwrap(), int(0));
        assert_eq!(sym_orbit_sup(&zero(), &alternating()).unwrap(), int(1));
    }

    #[test]
    fn radius_snaps_down() {
        assert_eq!(Radius::snap(&ratio(3, 16)).unwrap().k, 3);
        assert_eq!(Radius::snap(&ratio(1, 4)).unwrap().k, 2);
        assert_eq!(Radius::snap(&int(5)).unwrap().k, 0);
        assert!(Radius::snap(&int(0)).is_err());
    }

    #[test]
    fn dynamical_ball_examples() {
        let y = spike().shift(5); // single 1 at coordinate -5
        assert_eq!(y.at(-5), 1);
        let r = Radius::snap(&ratio(1, 8)).unwrap();
        assert!(in_dynamical_ball(&zero(), &y, &r, Side::S).unwrap());
        assert!(!in_dynamical_ball(&zero(), &y, &r, Side::U).unwrap());
        let r1 = Radius::snap(&int(1)).unwrap();
        for side in [Side::S, Side::U] {
            assert!(in_dynamical_ball(&spike(), &spike(), &r1, side).unwrap());
        }
    }

    #[test]
    fn ball_matches_its_definition() {
        // d(σ^n x, σ^n y) < 2^{-k} for 0 ≤ n ≤ span, checked directly.
        let x = zero();
        let points = enumerate_points(2, 6);
        for k in 0..3u64 {
            let r = Radius {
                requested: pow2_neg(k),
                k,
            };
            for y in &points {
                let direct =
                    (0..40).all(|n| sym_distance(&x.shift(n), &y.shift(n)).unwrap() < pow2_neg(k));
                assert_eq!(
                    in_dynamical_ball(&x, y, &r, Side::S).unwrap(),
                    direct,
                    "{y} k={k}"
                );
                let direct_u = (0..40)
                    .all(|n| sym_distance(&x.shift(-n), &y.shift(-n)).unwrap() < pow2_neg(k));
                assert_eq!(
                    in_dynamical_ball(&x, y, &r, Side::U).unwrap(),
                    direct_u,
                    "{y} k={k}"
                );
            }
        }
    }

    #[test]
    fn stable_examples() {
        for side in [Side::S, Side::U] {
            assert!(stable_equiv(&zero(), &spike(), side).unwrap());
            assert!(!stable_equiv(&zero(), &alternating(), side).unwrap());
            assert!(stable_equiv(&alternating(), &alternating(), side).unwrap());
        }
        let step = EPPoint::new(2, vec![0], vec![], vec![1], 0).unwrap();
        assert!(stable_equiv(&zero(), &step, Side::U).unwrap());
        assert!(!stable_equiv(&zero(), &step, Side::S).unwrap());
    }

    #[test]
    fn observable_stable_examples() {
        let phi = CylinderObservable::injective(2, 2);
        assert!(obs_stable_equiv(&zero(), &spike(), &phi, Side::S).unwrap());
        let coord = CylinderObservable::coordinate(2, |s| {
            crate::scalar::GaussianRational::from_ints(s as i64, 0)
        });
        assert!(!obs_stable_equiv(&zero(), &alternating(), &coord, Side::S).unwrap());
        assert!(obs_stable_equiv(&alternating(), &alternating(), &coord, Side::U).unwrap());
        // Constant observable cannot tell tails apart.
        let flat = CylinderObservable::from_fn(2, 1, |_| crate::scalar::GaussianRational::one());
        assert!(obs_stable_equiv(&zero(), &alternating(), &flat, Side::S).unwrap());
    }

    #[test]
    fn ball_inclusion_examples() {
        let alphabet = Alphabet::binary();
        let phi = CylinderObservable::injective(2, 1);
        let report =
            check_ball_inclusion(&zero(), &phi, &ratio(1, 2), Side::S, 6, &alphabet).unwrap();
        assert!(report.passed);
        assert!(report.in_ball > 1);
        let report = check_ball_inclusion(&zero(), &phi, &int(1), Side::S, 6, &alphabet).unwrap();
        assert!(report.passed);
        let report = check_ball_inclusion(&zero(), &phi, &int(1), Side::S, 0, &alphabet).unwrap();
        assert_eq!((report.enumerated, report.in_ball), (1, 1));
        assert!(report.passed);
    }
}
