//! Replayable witnesses that every δ-expansive observable is constant on an interval.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::CircleError;
use crate::scalar::{format_scalar, parse_scalar, ratio, ExactScalar};

use super::pl::{Arc, Lift};
use super::{
    wandering_intervals, CircleMapDoc, IntervalMapDoc, PLCircleMap, PLIntervalMap, RotationNumber,
    WanderingAnalysis, DEFAULT_N_MAX, DEFAULT_Q_MAX,
};

const MAX_HALVINGS: u32 = 256;

/// Where an endpoint orbit settles: `g` (or `g⁻¹` for the backward tail) is
/// affine with ratio `slope ∈ (0,1)` on the piece between `far` and the fixed point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailPiece {
    pub fixed: ExactScalar,
    pub far: ExactScalar,
    pub slope: ExactScalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    /// The whole wandering component has diameter at most δ.
    Contained,
    Affine {
        forward: TailPiece,
        backward: TailPiece,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub map_id: String,
    pub map: MapSource,
    pub p: BigInt,
    pub q: u32,
    pub delta: ExactScalar,
    /// Threshold for observables of the original map: `δ · max(1, Lip F)^(q-1)`.
    pub f_threshold: ExactScalar,
    pub component: Arc,
    pub probe: Arc,
    pub horizon: u64,
    pub halvings: u32,
    /// `+1` if `g` moves the component to the right.
    pub direction: i32,
    /// `diam(g^n U)` for `n = -N..=N`.
    pub diameters: Vec<ExactScalar>,
    pub tail: Tail,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapSource {
    Circle(PLCircleMap),
    Interval(PLIntervalMap),
}

impl MapSource {
    /// `g = F^q - p` and the Lipschitz constant of `F`.
    fn reduced(&self, p: &BigInt, q: u32) -> Result<(Lift, ExactScalar), CircleError> {
        match self {
            MapSource::Circle(m) => {
                let g = m
                    .lift
                    .power(q as i64)
                    .shifted(&-ExactScalar::from_integer(p.clone()));
                Ok((g, m.lift.lipschitz()))
            }
            MapSource::Interval(m) => {
                let (g, power) = m.increasing_power();
                if power != q || !p.is_zero() {
                    return Err(CircleError::InvalidArgument(format!(
                        "interval certificate must use p = 0, q = {power}"
                    )));
                }
                Ok((g, m.f.lipschitz()))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TailPieceDoc {
    fixed: String,
    far: String,
    slope: String,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TailDoc {
    Contained,
    Affine {
        forward: TailPieceDoc,
        backward: TailPieceDoc,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", content = "map", rename_all = "snake_case")]
enum MapDoc {
    Circle(CircleMapDoc),
    Interval(IntervalMapDoc),
}

#[derive(Serialize, Deserialize)]
struct TraceEntry {
    n: i64,
    diameter: String,
}

#[derive(Serialize, Deserialize)]
struct CertificateDoc {
    map_id: String,
    #[serde(flatten)]
    map: MapDoc,
    p: String,
    q: u32,
    delta: String,
    f_threshold: String,
    wandering_component: [String; 2],
    probe: [String; 2],
    horizon: u64,
    halvings: u32,
    direction: i32,
    trace: Vec<TraceEntry>,
    tail: TailDoc,
}

fn piece_doc(p: &TailPiece) -> TailPieceDoc {
    TailPieceDoc {
        fixed: format_scalar(&p.fixed),
        far: format_scalar(&p.far),
        slope: format_scalar(&p.slope),
    }
}

fn piece_from(doc: &TailPieceDoc) -> Result<TailPiece, CircleError> {
    Ok(TailPiece {
        fixed: parse_scalar(&doc.fixed)?,
        far: parse_scalar(&doc.far)?,
        slope: parse_scalar(&doc.slope)?,
    })
}

fn arc_from(pair: &[String; 2]) -> Result<Arc, CircleError> {
    Ok(Arc::new(parse_scalar(&pair[0])?, parse_scalar(&pair[1])?))
}

impl Certificate {
    pub fn to_value(&self) -> serde_json::Value {
        let n = self.horizon as i64;
        let doc = CertificateDoc {
            map_id: self.map_id.clone(),
            map: match &self.map {
                MapSource::Circle(m) => MapDoc::Circle(m.to_doc()),
                MapSource::Interval(m) => MapDoc::Interval(m.to_doc()),
            },
            p: self.p.to_string(),
            q: self.q,
            delta: format_scalar(&self.delta),
            f_threshold: format_scalar(&self.f_threshold),
            wandering_component: self.component.to_text(),
            probe: self.probe.to_text(),
            horizon: self.horizon,
            halvings: self.halvings,
            direction: self.direction,
            trace: self
                .diameters
                .iter()
                .zip(-n..)
                .map(|(d, n)| TraceEntry {
                    n,
                    diameter: format_scalar(d),
                })
                .collect(),
            tail: match &self.tail {
                Tail::Contained => TailDoc::Contained,
                Tail::Affine { forward, backward } => TailDoc::Affine {
                    forward: piece_doc(forward),
                    backward: piece_doc(backward),
                },
            },
        };
        serde_json::to_value(doc).expect("certificate serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("certificate serializes")
    }

    pub fn parse(document: &str) -> Result<Self, CircleError> {
        let doc: CertificateDoc = serde_json::from_str(document)?;
        let map = match &doc.map {
            MapDoc::Circle(m) => MapSource::Circle(PLCircleMap::from_doc(m)?),
            MapDoc::Interval(m) => MapSource::Interval(PLIntervalMap::from_doc(m)?),
        };
        let n = doc.horizon as i64;
        if doc.trace.len() as i64 != 2 * n + 1 || doc.trace.iter().zip(-n..).any(|(e, k)| e.n != k)
        {
            return Err(CircleError::Malformed(
                "trace must list n = -N..=N in order".into(),
            ));
        }
        Ok(Self {
            map_id: doc.map_id,
            map,
            p: doc
                .p
                .parse()
                .map_err(|_| CircleError::Malformed(format!("bad integer `{}`", doc.p)))?,
            q: doc.q,
            delta: parse_scalar(&doc.delta)?,
            f_threshold: parse_scalar(&doc.f_threshold)?,
            component: arc_from(&doc.wandering_component)?,
            probe: arc_from(&doc.probe)?,
            horizon: doc.horizon,
            halvings: doc.halvings,
            direction: doc.direction,
            diameters: doc
                .trace
                .iter()
                .map(|e| parse_scalar(&e.diameter))
                .collect::<Result<_, _>>()?,
            tail: match &doc.tail {
                TailDoc::Contained => Tail::Contained,
                TailDoc::Affine { forward, backward } => Tail::Affine {
                    forward: piece_from(forward)?,
                    backward: piece_from(backward)?,
                },
            },
        })
    }
}

fn f_threshold(delta: &ExactScalar, lipschitz: &ExactScalar, q: u32) -> ExactScalar {
    let l = lipschitz.clone().max(ExactScalar::one());
    (1..q).fold(delta.clone(), |acc, _| acc * &l)
}

/// Endpoint orbits `g^n(U)` for `n = 0..=len` (`forward`) and `g^{-n}(U)`.
fn orbit(map: &Lift, probe: &Arc, len: u64) -> Vec<Arc> {
    let mut out = Vec::with_capacity(len as usize + 1);
    out.push(probe.clone());
    for _ in 0..len {
        let last = out.last().expect("nonempty");
        out.push(Arc::new(map.eval(&last.start), map.eval(&last.end)));
    }
    out
}

/// The orbit `g^n(U)` for `n = -N..=N`, leftmost index first.
fn trace(g: &Lift, ginv: &Lift, probe: &Arc, horizon: u64) -> Vec<Arc> {
    let mut chain: Vec<Arc> = orbit(ginv, probe, horizon)
        .into_iter()
        .skip(1)
        .rev()
        .collect();
    chain.extend(orbit(g, probe, horizon));
    chain
}

/// The linear piece of `g` adjacent to `fixed` on the side towards `inside`.
fn adjacent_piece(g: &Lift, fixed: &ExactScalar, inside: &ExactScalar) -> ExactScalar {
    let one = ExactScalar::one();
    if inside > fixed {
        g.nodes_between(fixed, &(fixed + &one))
            .into_iter()
            .find(|x| x > fixed)
            .expect("a node within one period")
    } else {
        g.nodes_between(&(fixed - &one), fixed)
            .into_iter()
            .rev()
            .find(|x| x < fixed)
            .expect("a node within one period")
    }
}

fn steps_until(
    map: &Lift,
    start: &ExactScalar,
    done: impl Fn(&ExactScalar) -> bool,
    n_max: u64,
) -> Result<u64, CircleError> {
    let mut x = start.clone();
    for n in 0..=n_max {
        if done(&x) {
            return Ok(n);
        }
        x = map.eval(&x);
    }
    Err(CircleError::HorizonExceeded(n_max))
}

fn build(
    map_id: String,
    map: MapSource,
    analysis: &WanderingAnalysis,
    lipschitz: &ExactScalar,
    delta: &ExactScalar,
    n_max: u64,
) -> Result<Certificate, CircleError> {
    if !delta.is_positive() {
        return Err(CircleError::InvalidArgument(
            "delta must be positive".into(),
        ));
    }
    let component = analysis
        .components
        .first()
        .ok_or(CircleError::NoWanderingInterval)?
        .clone();
    let direction = analysis.direction(&component);
    let g = &analysis.g;
    let ginv = g.inverse();
    let third = component.length() / ratio(3, 1);
    let mut probe = Arc::new(&component.start + &third, &component.end - &third);
    let base =
        |probe: Arc, horizon: u64, halvings: u32, diameters: Vec<ExactScalar>, tail: Tail| {
            Certificate {
                map_id: map_id.clone(),
                map: map.clone(),
                p: analysis.rotation.p.clone(),
                q: analysis.rotation.q,
                delta: delta.clone(),
                f_threshold: f_threshold(delta, lipschitz, analysis.rotation.q),
                component: component.clone(),
                probe,
                horizon,
                halvings,
                direction,
                diameters,
                tail,
            }
        };
    if component.length() <= *delta {
        let diameters = vec![probe.length()];
        return Ok(base(probe, 0, 0, diameters, Tail::Contained));
    }

    let (ahead, behind) = if direction > 0 {
        (&component.end, &component.start)
    } else {
        (&component.start, &component.end)
    };
    let far_forward = adjacent_piece(g, ahead, behind);
    let far_backward = adjacent_piece(g, behind, ahead);
    let slope_of = |fixed: &ExactScalar, far: &ExactScalar, map: &Lift| {
        (map.eval(far) - fixed) / (far - fixed)
    };
    let forward = TailPiece {
        fixed: ahead.clone(),
        slope: slope_of(ahead, &far_forward, g),
        far: far_forward,
    };
    let backward = TailPiece {
        fixed: behind.clone(),
        slope: slope_of(behind, &far_backward, &ginv),
        far: far_backward,
    };

    for halvings in 0..=MAX_HALVINGS {
        // The trailing endpoint enters the affine piece last.
        let (lead_fwd, lead_bwd) = if direction > 0 {
            (&probe.start, &probe.end)
        } else {
            (&probe.end, &probe.start)
        };
        let in_piece = |piece: &TailPiece| {
            let piece = piece.clone();
            move |x: &ExactScalar| {
                if piece.far < piece.fixed {
                    *x >= piece.far
                } else {
                    *x <= piece.far
                }
            }
        };
        let nf = steps_until(g, lead_fwd, in_piece(&forward), n_max)?;
        let nb = steps_until(&ginv, lead_bwd, in_piece(&backward), n_max)?;
        let horizon = nf.max(nb);
        let diameters: Vec<ExactScalar> = trace(g, &ginv, &probe, horizon)
            .iter()
            .map(Arc::length)
            .collect();
        if diameters.iter().all(|d| d <= delta) {
            let tail = Tail::Affine {
                forward: forward.clone(),
                backward: backward.clone(),
            };
            return Ok(base(probe, horizon, halvings, diameters, tail));
        }
        let mid = (&probe.start + &probe.end) / ratio(2, 1);
        let quarter = probe.length() / ratio(4, 1);
        probe = Arc::new(&mid - &quarter, &mid + &quarter);
    }
    Err(CircleError::HorizonExceeded(n_max))
}

pub fn certify(f: &PLCircleMap, delta: &ExactScalar) -> Result<Certificate, CircleError> {
    certify_with(f, delta, DEFAULT_Q_MAX, DEFAULT_N_MAX)
}

/// Certificate on the first wandering component of `g = F^q - p`.
pub fn certify_with(
    f: &PLCircleMap,
    delta: &ExactScalar,
    q_max: u32,
    n_max: u64,
) -> Result<Certificate, CircleError> {
    let analysis = wandering_intervals(&f.lift, q_max)?;
    build(
        f.id.clone(),
        MapSource::Circle(f.clone()),
        &analysis,
        &f.lift.lipschitz(),
        delta,
        n_max,
    )
}

/// Certificate for `g = F` (or `F∘F` when `F` reverses orientation).
pub fn interval_pipeline(
    f: &PLIntervalMap,
    delta: &ExactScalar,
) -> Result<Certificate, CircleError> {
    let (g, q) = f.increasing_power();
    if g.is_rigid() {
        return Err(CircleError::AllFixed(q));
    }
    let analysis = WanderingAnalysis::from_reduced(
        g,
        RotationNumber {
            p: BigInt::zero(),
            q,
        },
    );
    build(
        f.id.clone(),
        MapSource::Interval(f.clone()),
        &analysis,
        &f.f.lipschitz(),
        delta,
        DEFAULT_N_MAX,
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub map_id: String,
    #[serde(with = "crate::scalar::as_text")]
    pub delta: ExactScalar,
    pub checks: Vec<CheckLine>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn violations(&self) -> impl Iterator<Item = &CheckLine> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn verify(cert: &Certificate) -> Result<VerifyReport, CircleError> {
    verify_with_delta(cert, &cert.delta)
}

fn check_piece(
    g: &Lift,
    map: &Lift,
    piece: &TailPiece,
    end: &Arc,
    label: &str,
) -> Result<(), String> {
    if map.eval(&piece.fixed) != piece.fixed {
        return Err(format!(
            "{label}: {} is not fixed",
            format_scalar(&piece.fixed)
        ));
    }
    let (lo, hi) = if piece.far < piece.fixed {
        (&piece.far, &piece.fixed)
    } else {
        (&piece.fixed, &piece.far)
    };
    if let Some(node) = g.nodes_between(lo, hi).iter().find(|x| *x > lo && *x < hi) {
        return Err(format!(
            "{label}: breakpoint {} inside the tail piece",
            format_scalar(node)
        ));
    }
    let slope = (map.eval(&piece.far) - &piece.fixed) / (&piece.far - &piece.fixed);
    if slope != piece.slope || !slope.is_positive() || slope >= ExactScalar::one() {
        return Err(format!(
            "{label}: ratio {} is not a contraction",
            format_scalar(&slope)
        ));
    }
    if end.start < *lo || end.end > *hi {
        return Err(format!("{label}: g^±N(U) leaves the tail piece"));
    }
    Ok(())
}

/// Replays a certificate against threshold `delta` without trusting its construction.
pub fn verify_with_delta(
    cert: &Certificate,
    delta: &ExactScalar,
) -> Result<VerifyReport, CircleError> {
    let (g, lipschitz) = cert.map.reduced(&cert.p, cert.q)?;
    let ginv = g.inverse();
    let mut checks = Vec::new();
    let mut check = |name: &'static str, result: Result<(), String>| {
        checks.push(CheckLine {
            name,
            passed: result.is_ok(),
            detail: result.err().unwrap_or_default(),
        });
    };

    let (j, u) = (&cert.component, &cert.probe);
    check(
        "component_fixed_ends",
        if g.eval(&j.start) == j.start && g.eval(&j.end) == j.end && j.start < j.end {
            Ok(())
        } else {
            Err("endpoints of J are not fixed by g".into())
        },
    );
    check(
        "probe_inside_component",
        if j.start < u.start && u.start < u.end && u.end < j.end {
            Ok(())
        } else {
            Err("U is not a closed interval inside J".into())
        },
    );
    let chain = trace(&g, &ginv, u, cert.horizon);
    let diameters: Vec<ExactScalar> = chain.iter().map(Arc::length).collect();
    check(
        "trace_replay",
        if diameters == cert.diameters {
            Ok(())
        } else {
            Err("recorded diameters differ from the replay".into())
        },
    );
    let worst = diameters.iter().max().expect("nonempty trace");
    check(
        "diameter_bound",
        if worst <= delta {
            Ok(())
        } else {
            Err(format!("diameter {} exceeds delta", format_scalar(worst)))
        },
    );
    let rightward = cert.direction > 0;
    let ordered = chain.windows(2).all(|w| {
        if rightward {
            w[1].start > w[0].end
        } else {
            w[1].end < w[0].start
        }
    });
    check(
        "disjoint_iterates",
        if ordered {
            Ok(())
        } else {
            Err("consecutive iterates overlap".into())
        },
    );
    let tail = match &cert.tail {
        Tail::Contained => {
            if j.length() <= *delta {
                Ok(())
            } else {
                Err("J is longer than delta".into())
            }
        }
        Tail::Affine { forward, backward } => {
            let (first, last) = (
                chain.first().expect("nonempty"),
                chain.last().expect("nonempty"),
            );
            let ahead = if rightward { &j.end } else { &j.start };
            let behind = if rightward { &j.start } else { &j.end };
            if forward.fixed != *ahead || backward.fixed != *behind {
                Err("tail pieces are not at the ends of J".into())
            } else {
                check_piece(&g, &g, forward, last, "forward")
                    .and_then(|_| check_piece(&g, &ginv, backward, first, "backward"))
            }
        }
    };
    check("monotone_tail", tail);
    let threshold = f_threshold(&cert.delta, &lipschitz, cert.q);
    check(
        "f_threshold",
        if threshold == cert.f_threshold {
            Ok(())
        } else {
            Err(format!("expected {}", format_scalar(&threshold)))
        },
    );
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        map_id: cert.map_id.clone(),
        delta: delta.clone(),
        checks,
        passed,
    })
}

/// A real piecewise-linear function on `[0,1]`, read on each unit chart of the line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlObservable {
    nodes: Vec<ExactScalar>,
    values: Vec<ExactScalar>,
}

#[derive(Serialize, Deserialize)]
struct PlObservableDoc {
    nodes: Vec<String>,
    values: Vec<String>,
}

impl PlObservable {
    pub fn new(nodes: Vec<ExactScalar>, values: Vec<ExactScalar>) -> Result<Self, CircleError> {
        let ok = nodes.len() == values.len()
            && nodes.len() >= 2
            && nodes[0].is_zero()
            && nodes.last().is_some_and(|x| x.is_one())
            && nodes.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(CircleError::InvalidArgument(
                "observable nodes must increase from 0 to 1".into(),
            ));
        }
        Ok(Self { nodes, values })
    }

    pub fn identity() -> Self {
        Self::new(
            vec![ratio(0, 1), ratio(1, 1)],
            vec![ratio(0, 1), ratio(1, 1)],
        )
        .expect("valid")
    }

    pub fn constant(c: ExactScalar) -> Self {
        Self::new(vec![ratio(0, 1), ratio(1, 1)], vec![c.clone(), c]).expect("valid")
    }

    pub fn parse(document: &str) -> Result<Self, CircleError> {
        let doc: PlObservableDoc = serde_json::from_str(document)?;
        let all = |v: &[String]| {
            v.iter()
                .map(|t| parse_scalar(t))
                .collect::<Result<Vec<_>, _>>()
        };
        Self::new(all(&doc.nodes)?, all(&doc.values)?)
    }

    fn eval(&self, x: &ExactScalar) -> ExactScalar {
        let i = self
            .nodes
            .partition_point(|n| n <= x)
            .saturating_sub(1)
            .min(self.nodes.len() - 2);
        let (x0, x1, y0, y1) = (
            &self.nodes[i],
            &self.nodes[i + 1],
            &self.values[i],
            &self.values[i + 1],
        );
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// `max - min` over the lift interval `[a, b]`.
    pub fn oscillation(&self, a: &ExactScalar, b: &ExactScalar) -> ExactScalar {
        let mut samples = Vec::new();
        let mut k = a.floor();
        while k < *b || (k == *b && a == b) {
            let lo = a.clone().max(k.clone()) - &k;
            let hi = b.clone().min(&k + ExactScalar::one()) - &k;
            samples.push(self.eval(&lo));
            samples.push(self.eval(&hi));
            samples.extend(
                self.nodes
                    .iter()
                    .filter(|x| **x > lo && **x < hi)
                    .map(|x| self.eval(x)),
            );
            k += ExactScalar::one();
        }
        samples.iter().max().expect("nonempty") - samples.iter().min().expect("nonempty")
    }
}

/// `osc_U(φ)/2`: sup-distance from `φ` to the functions constant on the certified interval.
pub fn separation_gap(cert: &Certificate, target: &PlObservable) -> ExactScalar {
    target.oscillation(&cert.probe.start, &cert.probe.end) / ratio(2, 1)
}
