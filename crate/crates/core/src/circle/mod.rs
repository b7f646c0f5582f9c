//! Piecewise-linear circle and interval homeomorphisms with rational data.

mod certificate;
mod pl;

pub use certificate::{
    certify, certify_with, interval_pipeline, separation_gap, verify, verify_with_delta,
    Certificate, CheckLine, PlObservable, Tail, TailPiece, VerifyReport,
};
pub use pl::{Arc, ArcSet, Lift, PlFn};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::CircleError;
use crate::examples::cyclic_grid;
use crate::relation::{chain_components, omega_map, OrbitDistanceTable};
use crate::scalar::{format_scalar, parse_scalar, ratio, ExactScalar};

pub const DEFAULT_Q_MAX: u32 = 64;
pub const DEFAULT_N_MAX: u64 = 100_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircleMapDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub breakpoints: Vec<String>,
    pub lift_values: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntervalMapDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub breakpoints: Vec<String>,
    #[serde(alias = "lift_values")]
    pub values: Vec<String>,
}

fn parse_all(texts: &[String]) -> Result<Vec<ExactScalar>, CircleError> {
    Ok(texts
        .iter()
        .map(|t| parse_scalar(t))
        .collect::<Result<_, _>>()?)
}

fn text_all(values: &[ExactScalar]) -> Vec<String> {
    values.iter().map(format_scalar).collect()
}

/// An orientation-preserving PL circle homeomorphism given by its lift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLCircleMap {
    pub id: String,
    pub lift: Lift,
}

impl PLCircleMap {
    pub fn new(
        id: impl Into<String>,
        breakpoints: Vec<ExactScalar>,
        lift_values: Vec<ExactScalar>,
    ) -> Result<Self, CircleError> {
        Ok(Self {
            id: id.into(),
            lift: Lift::new(breakpoints, lift_values)?,
        })
    }

    pub fn rigid(rho: ExactScalar) -> Self {
        Self {
            id: format!("rotation {}", format_scalar(&rho)),
            lift: Lift::translation(rho),
        }
    }

    pub fn from_doc(doc: &CircleMapDoc) -> Result<Self, CircleError> {
        Self::new(
            doc.id.clone().unwrap_or_else(|| "map".into()),
            parse_all(&doc.breakpoints)?,
            parse_all(&doc.lift_values)?,
        )
    }

    pub fn parse(document: &str) -> Result<Self, CircleError> {
        Self::from_doc(&serde_json::from_str(document)?)
    }

    pub fn to_doc(&self) -> CircleMapDoc {
        CircleMapDoc {
            id: Some(self.id.clone()),
            breakpoints: text_all(self.lift.breakpoints()),
            lift_values: text_all(self.lift.values()),
        }
    }
}

/// A PL homeomorphism of `[0,1]`, increasing or decreasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLIntervalMap {
    pub id: String,
    pub f: PlFn,
}

impl PLIntervalMap {
    pub fn new(
        id: impl Into<String>,
        breakpoints: Vec<ExactScalar>,
        values: Vec<ExactScalar>,
    ) -> Result<Self, CircleError> {
        let f = PlFn::new(breakpoints, values)?;
        let (zero, one) = (ExactScalar::zero(), ExactScalar::one());
        let (a, b) = f.domain();
        let ends = (&f.ys()[0], f.ys().last().expect("nonempty"));
        let ok_domain = *a == zero && *b == one;
        let ok_range = ends == (&zero, &one) || ends == (&one, &zero);
        if !ok_domain || !ok_range {
            return Err(CircleError::InvalidMap(
                "expected a homeomorphism of [0,1]".into(),
            ));
        }
        Ok(Self { id: id.into(), f })
    }

    pub fn identity() -> Self {
        Self::new(
            "identity",
            vec![ratio(0, 1), ratio(1, 1)],
            vec![ratio(0, 1), ratio(1, 1)],
        )
        .expect("valid")
    }

    pub fn reflection() -> Self {
        Self::new(
            "reflection",
            vec![ratio(0, 1), ratio(1, 1)],
            vec![ratio(1, 1), ratio(0, 1)],
        )
        .expect("valid")
    }

    pub fn from_doc(doc: &IntervalMapDoc) -> Result<Self, CircleError> {
        Self::new(
            doc.id.clone().unwrap_or_else(|| "map".into()),
            parse_all(&doc.breakpoints)?,
            parse_all(&doc.values)?,
        )
    }

    pub fn parse(document: &str) -> Result<Self, CircleError> {
        Self::from_doc(&serde_json::from_str(document)?)
    }

    pub fn to_doc(&self) -> IntervalMapDoc {
        IntervalMapDoc {
            id: Some(self.id.clone()),
            breakpoints: text_all(self.f.xs()),
            values: text_all(self.f.ys()),
        }
    }

    /// The increasing map analysed for this one and its power: `(F, 1)` or `(F∘F, 2)`.
    pub fn increasing_power(&self) -> (Lift, u32) {
        if self.f.is_increasing() {
            (Lift::from_interval(&self.f).expect("validated"), 1)
        } else {
            let square = self.f.compose(&self.f);
            (
                Lift::from_interval(&square).expect("square of a reversal fixes the endpoints"),
                2,
            )
        }
    }
}

/// The reference map `M0`: breakpoints `(0,1/4,1/2,3/4)`, lift values `(0,3/8,1/2,7/8)`.
pub fn m0() -> PLCircleMap {
    PLCircleMap::new(
        "M0",
        vec![ratio(0, 1), ratio(1, 4), ratio(1, 2), ratio(3, 4)],
        vec![ratio(0, 1), ratio(3, 8), ratio(1, 2), ratio(7, 8)],
    )
    .expect("M0 is valid")
}

/// `M0` read as a homeomorphism of `[0,1]`: fixed set `{0, 1/2, 1}`, pushing right on both gaps.
pub fn m0_interval() -> PLIntervalMap {
    PLIntervalMap::new(
        "M0-interval",
        vec![
            ratio(0, 1),
            ratio(1, 4),
            ratio(1, 2),
            ratio(3, 4),
            ratio(1, 1),
        ],
        vec![
            ratio(0, 1),
            ratio(3, 8),
            ratio(1, 2),
            ratio(7, 8),
            ratio(1, 1),
        ],
    )
    .expect("valid")
}

/// A rotation number `p/q` with a periodic orbit realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationNumber {
    pub p: BigInt,
    pub q: u32,
}

impl RotationNumber {
    pub fn value(&self) -> ExactScalar {
        ExactScalar::new(self.p.clone(), BigInt::from(self.q))
    }
}

/// Smallest `q ≤ q_max` such that `F^q(x) - x - p` has a zero for an integer `p`.
pub fn rotation_number(f: &Lift, q_max: u32) -> Option<RotationNumber> {
    let mut power = f.clone();
    for q in 1..=q_max {
        let (lo, hi) = power.displacement_range();
        let p = lo.ceil();
        if p <= hi {
            return Some(RotationNumber {
                p: p.to_integer(),
                q,
            });
        }
        power = f.compose(&power);
    }
    None
}

/// Solution set of `F^q(x) = x + p`.
pub fn periodic_points(f: &Lift, p: &BigInt, q: u32) -> Result<ArcSet, CircleError> {
    let set = f
        .power(q as i64)
        .solve_translation(&ExactScalar::from_integer(p.clone()));
    match &set {
        ArcSet::Arcs(arcs) if arcs.is_empty() => {
            Err(CircleError::InconsistentRotationNumber(format!("{p}/{q}")))
        }
        _ => Ok(set),
    }
}

/// `g = F^q - p` together with its fixed set and wandering components.
#[derive(Clone, Debug)]
pub struct WanderingAnalysis {
    pub rotation: RotationNumber,
    pub g: Lift,
    pub fixed: ArcSet,
    pub components: Vec<Arc>,
}

impl WanderingAnalysis {
    pub fn from_reduced(g: Lift, rotation: RotationNumber) -> Self {
        let fixed = g.solve_translation(&ExactScalar::zero());
        let components = fixed.complement();
        Self {
            rotation,
            g,
            fixed,
            components,
        }
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.rotation.p.to_string(),
            "q": self.rotation.q,
            "fixed_set": self.fixed.to_value(),
            "components": self.components.iter().map(Arc::to_text).collect::<Vec<_>>(),
        })
    }

    /// `+1` if `g` pushes points of the component to the right, `-1` otherwise.
    pub fn direction(&self, component: &Arc) -> i32 {
        let mid = (&component.start + &component.end) / ratio(2, 1);
        if self.g.eval(&mid) > mid {
            1
        } else {
            -1
        }
    }
}

pub fn wandering_intervals(f: &Lift, q_max: u32) -> Result<WanderingAnalysis, CircleError> {
    let rotation = rotation_number(f, q_max).ok_or(CircleError::NoPeriodicOrbit(q_max))?;
    let g = f
        .power(rotation.q as i64)
        .shifted(&-ExactScalar::from_integer(rotation.p.clone()));
    Ok(WanderingAnalysis::from_reduced(g, rotation))
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyPReport {
    pub q: u32,
    pub n_max: u64,
    pub disjoint: bool,
    #[serde(with = "crate::scalar::as_text")]
    pub total_length: ExactScalar,
    pub total_length_bounded: bool,
    /// First `n` from which diameters are nonincreasing for `n → +∞` and `n → -∞`.
    pub forward_monotone_from: u64,
    pub backward_monotone_from: u64,
    pub passed: bool,
}

/// Exact check of pairwise disjointness and shrinking of `g^n(U)`, `|n| ≤ n_max`.
pub fn property_p_check(
    f: &Lift,
    component: &Arc,
    probe: &Arc,
    n_max: u64,
) -> Result<PropertyPReport, CircleError> {
    let analysis = wandering_intervals(f, DEFAULT_Q_MAX)?;
    let g = &analysis.g;
    if probe.start >= probe.end {
        return Err(CircleError::InvalidArgument(
            "probe must be a nondegenerate closed interval".into(),
        ));
    }
    if g.eval(&probe.start) <= probe.end && g.eval(&probe.end) >= probe.start {
        return Err(CircleError::NotWandering(format!(
            "[{}, {}] meets its image",
            format_scalar(&probe.start),
            format_scalar(&probe.end)
        )));
    }
    if !analysis.components.contains(component) {
        return Err(CircleError::InvalidArgument(
            "J is not a wandering component".into(),
        ));
    }
    if probe.start <= component.start || probe.end >= component.end {
        return Err(CircleError::InvalidArgument("probe is not inside J".into()));
    }
    let ginv = g.inverse();
    let orbit = |map: &Lift| {
        let (mut a, mut b) = (probe.start.clone(), probe.end.clone());
        let mut out = vec![(a.clone(), b.clone())];
        for _ in 0..n_max {
            a = map.eval(&a);
            b = map.eval(&b);
            out.push((a.clone(), b.clone()));
        }
        out
    };
    let forward = orbit(g);
    let backward = orbit(&ginv);
    // Orbit order along the line: backward reversed, then forward.
    let mut chain: Vec<&(ExactScalar, ExactScalar)> = backward.iter().skip(1).rev().collect();
    chain.extend(forward.iter());
    let rightward = analysis.direction(component) > 0;
    let disjoint = chain.windows(2).all(|w| {
        if rightward {
            w[1].0 > w[0].1
        } else {
            w[1].1 < w[0].0
        }
    });
    let diam = |v: &[(ExactScalar, ExactScalar)]| v.iter().map(|(a, b)| b - a).collect::<Vec<_>>();
    let (fd, bd) = (diam(&forward), diam(&backward));
    let total_length: ExactScalar = fd.iter().chain(bd.iter().skip(1)).sum();
    let monotone_from = |d: &[ExactScalar]| {
        let mut start = d.len() - 1;
        while start > 0 && d[start - 1] >= d[start] {
            start -= 1;
        }
        start as u64
    };
    let total_length_bounded = total_length <= component.length();
    let report = PropertyPReport {
        q: analysis.rotation.q,
        n_max,
        disjoint,
        total_length,
        total_length_bounded,
        forward_monotone_from: monotone_from(&fd),
        backward_monotone_from: monotone_from(&bd),
        passed: disjoint && total_length_bounded,
    };
    Ok(report)
}

/// Equicontinuous verdict for a rigid rotation, checked on a finite orbit grid.
#[derive(Clone, Debug, Serialize)]
pub struct RotationCaseReport {
    #[serde(with = "crate::scalar::as_text")]
    pub rho: ExactScalar,
    pub p: i64,
    pub q: u32,
    pub grid_size: usize,
    pub grid_step: usize,
    #[serde(with = "crate::scalar::as_text")]
    pub threshold: ExactScalar,
    /// `ω_f(t) = t` for every realized distance `t` on the grid.
    pub isometry: bool,
    pub blocks: Vec<Vec<String>>,
    pub single_block: bool,
    pub equals_chain_components: bool,
}

pub fn analyze_rotation_case(f: &Lift) -> Result<RotationCaseReport, CircleError> {
    if !f.is_rigid() {
        return Err(CircleError::NotRigid);
    }
    let rho = f.offset().clone();
    let frac = &rho - rho.floor();
    let q = frac
        .denom()
        .to_u32()
        .filter(|q| *q <= 1 << 16)
        .ok_or_else(|| {
            CircleError::InvalidArgument(format!(
                "rotation denominator of {} is too large",
                format_scalar(&rho)
            ))
        })?;
    let p = frac.numer().to_i64().expect("numerator below denominator");
    // At least eight grid points so that the identity case is not trivial.
    let n = q as usize * (8usize.div_ceil(q as usize));
    let step = (p as usize) * (n / q as usize);
    let grid = cyclic_grid(n, step % n);
    let threshold = ratio(1, n as i64);
    let table = OrbitDistanceTable::new(&grid);
    let isometry = grid
        .realized_distances()
        .iter()
        .all(|t| omega_map(&grid, t) == *t);
    let quotient = table.quotient(&threshold);
    let chains = chain_components(&grid, &threshold);
    Ok(RotationCaseReport {
        rho,
        p,
        q,
        grid_size: n,
        grid_step: step % n,
        threshold,
        isometry,
        single_block: quotient.is_single_block(),
        equals_chain_components: quotient.blocks == chains,
        blocks: quotient.labelled(&grid),
    })
}
