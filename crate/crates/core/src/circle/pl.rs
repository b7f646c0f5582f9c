//! Exact piecewise-linear homeomorphisms of an interval and degree-one lifts.

use num_traits::{One, Signed, Zero};

use crate::error::CircleError;
use crate::scalar::{format_scalar, ExactScalar};

/// A strictly monotone piecewise-linear function on `[xs[0], xs[last]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlFn {
    xs: Vec<ExactScalar>,
    ys: Vec<ExactScalar>,
}

impl PlFn {
    pub fn new(xs: Vec<ExactScalar>, ys: Vec<ExactScalar>) -> Result<Self, CircleError> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(CircleError::InvalidMap(
                "need at least two nodes and one value per node".into(),
            ));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CircleError::InvalidMap(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        let increasing = ys[1] > ys[0];
        let monotone = ys
            .windows(2)
            .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] });
        if !monotone {
            return Err(CircleError::InvalidMap(
                "map is not strictly monotone".into(),
            ));
        }
        Ok(Self { xs, ys })
    }

    pub fn xs(&self) -> &[ExactScalar] {
        &self.xs
    }

    pub fn ys(&self) -> &[ExactScalar] {
        &self.ys
    }

    pub fn is_increasing(&self) -> bool {
        self.ys[1] > self.ys[0]
    }

    pub fn domain(&self) -> (&ExactScalar, &ExactScalar) {
        (&self.xs[0], self.xs.last().expect("nonempty"))
    }

    fn segment_of(nodes: &[ExactScalar], x: &ExactScalar) -> usize {
        // Index i with nodes[i] <= x <= nodes[i+1], clamped to the last segment.
        let i = nodes.partition_point(|n| n <= x);
        i.saturating_sub(1).min(nodes.len() - 2)
    }

    fn lerp(
        x0: &ExactScalar,
        x1: &ExactScalar,
        y0: &ExactScalar,
        y1: &ExactScalar,
        x: &ExactScalar,
    ) -> ExactScalar {
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Value at `x`; `x` must lie in the domain.
    pub fn eval(&self, x: &ExactScalar) -> ExactScalar {
        let i = Self::segment_of(&self.xs, x);
        Self::lerp(
            &self.xs[i],
            &self.xs[i + 1],
            &self.ys[i],
            &self.ys[i + 1],
            x,
        )
    }

    /// Slope of the linear piece containing `[xs[i], xs[i+1]]`.
    pub fn slope(&self, i: usize) -> ExactScalar {
        (&self.ys[i + 1] - &self.ys[i]) / (&self.xs[i + 1] - &self.xs[i])
    }

    pub fn inverse(&self) -> Self {
        let (mut xs, mut ys) = (self.ys.clone(), self.xs.clone());
        if !self.is_increasing() {
            xs.reverse();
            ys.reverse();
        }
        Self { xs, ys }
    }

    /// `self ∘ inner`; the range of `inner` must lie in the domain of `self`.
    pub fn compose(&self, inner: &PlFn) -> PlFn {
        let inv = inner.inverse();
        let (lo, hi) = inv.domain();
        let mut nodes: Vec<ExactScalar> = inner.xs.clone();
        nodes.extend(
            self.xs
                .iter()
                .filter(|b| *b > lo && *b < hi)
                .map(|b| inv.eval(b)),
        );
        nodes.sort();
        nodes.dedup();
        let ys = nodes.iter().map(|x| self.eval(&inner.eval(x))).collect();
        Self { xs: nodes, ys }.simplified()
    }

    /// Drops nodes where the slope does not change.
    pub fn simplified(mut self) -> Self {
        let mut i = 1;
        while i + 1 < self.xs.len() {
            if self.slope(i - 1) == self.slope(i) {
                self.xs.remove(i);
                self.ys.remove(i);
            } else {
                i += 1;
            }
        }
        self
    }

    /// Largest slope in absolute value.
    pub fn lipschitz(&self) -> ExactScalar {
        (0..self.xs.len() - 1)
            .map(|i| self.slope(i).abs())
            .max()
            .expect("at least one segment")
    }
}

/// A closed arc `[start, end]` in lift coordinates with `0 ≤ start < 1` and
/// `end < start + 1`; a single point has `start == end`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub start: ExactScalar,
    pub end: ExactScalar,
}

impl Arc {
    pub fn new(start: ExactScalar, end: ExactScalar) -> Self {
        Self { start, end }
    }

    pub fn is_point(&self) -> bool {
        self.start == self.end
    }

    pub fn length(&self) -> ExactScalar {
        &self.end - &self.start
    }

    pub fn to_text(&self) -> [String; 2] {
        [format_scalar(&self.start), format_scalar(&self.end)]
    }

    /// Whether the circle point `x` (any lift) lies in the arc.
    pub fn contains_mod1(&self, x: &ExactScalar) -> bool {
        let mut y = x - x.floor() + self.start.floor();
        if y < self.start {
            y += ExactScalar::one();
        }
        y <= self.end
    }
}

/// Solution set of `G(x) = x + p` on the circle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArcSet {
    Whole,
    Arcs(Vec<Arc>),
}

impl ArcSet {
    pub fn contains_mod1(&self, x: &ExactScalar) -> bool {
        match self {
            ArcSet::Whole => true,
            ArcSet::Arcs(arcs) => arcs.iter().any(|a| a.contains_mod1(x)),
        }
    }

    pub fn to_value(&self) -> serde_json::Value {
        match self {
            ArcSet::Whole => serde_json::json!("whole"),
            ArcSet::Arcs(arcs) => {
                serde_json::json!(arcs.iter().map(Arc::to_text).collect::<Vec<_>>())
            }
        }
    }

    /// Open arcs between consecutive components, in lift coordinates.
    pub fn complement(&self) -> Vec<Arc> {
        let ArcSet::Arcs(arcs) = self else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for (i, arc) in arcs.iter().enumerate() {
            let next_start = match arcs.get(i + 1) {
                Some(next) => next.start.clone(),
                None => &arcs[0].start + ExactScalar::one(),
            };
            if arc.end < next_start {
                let k = arc.end.floor();
                out.push(Arc::new(&arc.end - &k, next_start - k));
            }
        }
        out.sort_by(|a, b| a.start.cmp(&b.start));
        out
    }
}

/// A lift `F: R → R` of a degree-one circle map, stored on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    base: PlFn,
}

impl Lift {
    /// From breakpoints in `[0,1)` starting at 0 and the lift values there.
    pub fn new(
        breakpoints: Vec<ExactScalar>,
        values: Vec<ExactScalar>,
    ) -> Result<Self, CircleError> {
        if breakpoints.first().map_or(true, |b| !b.is_zero()) {
            return Err(CircleError::InvalidMap(
                "breakpoints must start at 0".into(),
            ));
        }
        if breakpoints.last().is_some_and(|b| *b >= ExactScalar::one()) {
            return Err(CircleError::InvalidMap(
                "breakpoints must lie in [0,1)".into(),
            ));
        }
        if breakpoints.len() != values.len() {
            return Err(CircleError::InvalidMap(
                "one lift value per breakpoint".into(),
            ));
        }
        let (mut xs, mut ys) = (breakpoints, values);
        let end = &ys[0] + ExactScalar::one();
        xs.push(ExactScalar::one());
        ys.push(end);
        let base = PlFn::new(xs, ys)?;
        if !base.is_increasing() {
            return Err(CircleError::InvalidMap(
                "lift must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            base: base.simplified(),
        })
    }

    pub fn translation(t: ExactScalar) -> Self {
        let base = PlFn {
            xs: vec![ExactScalar::zero(), ExactScalar::one()],
            ys: vec![t.clone(), t + ExactScalar::one()],
        };
        Self { base }
    }

    /// Wraps an increasing homeomorphism of `[0,1]` fixing both endpoints.
    pub fn from_interval(f: &PlFn) -> Result<Self, CircleError> {
        let (zero, one) = (ExactScalar::zero(), ExactScalar::one());
        if f.domain() != (&zero, &one) || f.ys[0] != zero || f.ys.last() != Some(&one) {
            return Err(CircleError::InvalidMap(
                "expected an increasing self-map of [0,1] fixing 0 and 1".into(),
            ));
        }
        Ok(Self { base: f.clone() })
    }

    pub fn base(&self) -> &PlFn {
        &self.base
    }

    /// Breakpoints in `[0,1)`.
    pub fn breakpoints(&self) -> &[ExactScalar] {
        &self.base.xs[..self.base.xs.len() - 1]
    }

    pub fn values(&self) -> &[ExactScalar] {
        &self.base.ys[..self.base.ys.len() - 1]
    }

    pub fn eval(&self, x: &ExactScalar) -> ExactScalar {
        let k = x.floor();
        self.base.eval(&(x - &k)) + k
    }

    pub fn eval_inverse(&self, y: &ExactScalar) -> ExactScalar {
        let k = (y - &self.base.ys[0]).floor();
        let inv = self.base.inverse();
        inv.eval(&(y - &k)) + k
    }

    /// `F(x) - x` is constant.
    pub fn is_rigid(&self) -> bool {
        self.base.slope(0).is_one() && self.base.xs.len() == 2
    }

    /// `F(0)`; the translation amount when rigid.
    pub fn offset(&self) -> &ExactScalar {
        &self.base.ys[0]
    }

    /// `F ∘ inner`.
    pub fn compose(&self, inner: &Lift) -> Lift {
        // F restricted to the image window [inner(0), inner(0) + 1].
        let lo = inner.base.ys[0].clone();
        let hi = &lo + ExactScalar::one();
        let mut nodes = vec![lo.clone(), hi.clone()];
        let k = lo.floor();
        for shift in [&k - ExactScalar::one(), k.clone(), k + ExactScalar::one()] {
            nodes.extend(
                self.base
                    .xs
                    .iter()
                    .map(|b| b + &shift)
                    .filter(|b| *b > lo && *b < hi),
            );
        }
        nodes.sort();
        nodes.dedup();
        let ys = nodes.iter().map(|x| self.eval(x)).collect();
        let window = PlFn { xs: nodes, ys };
        Lift {
            base: window.compose(&inner.base),
        }
    }

    pub fn inverse(&self) -> Lift {
        let y0 = self.base.ys[0].clone();
        let k = y0.floor();
        let mut nodes: Vec<ExactScalar> = vec![ExactScalar::zero(), ExactScalar::one()];
        for shift in [&k - ExactScalar::one(), k.clone(), k + ExactScalar::one()] {
            nodes.extend(
                self.base
                    .ys
                    .iter()
                    .map(|y| y - &shift)
                    .filter(|y| y.is_positive() && *y < ExactScalar::one()),
            );
        }
        nodes.sort();
        nodes.dedup();
        let ys = nodes.iter().map(|y| self.eval_inverse(y)).collect();
        Lift {
            base: PlFn { xs: nodes, ys }.simplified(),
        }
    }

    /// `F^n` for any integer `n`.
    pub fn power(&self, n: i64) -> Lift {
        let step = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Lift::translation(ExactScalar::zero());
        for _ in 0..n.unsigned_abs() {
            out = step.compose(&out);
        }
        out
    }

    /// `x ↦ F(x) + t`.
    pub fn shifted(&self, t: &ExactScalar) -> Lift {
        let ys = self.base.ys.iter().map(|y| y + t).collect();
        Lift {
            base: PlFn {
                xs: self.base.xs.clone(),
                ys,
            },
        }
    }

    /// `R_t ∘ F ∘ R_{-t}`.
    pub fn conjugate_by_rotation(&self, t: &ExactScalar) -> Lift {
        let back = Lift::translation(-t.clone());
        Lift::translation(t.clone()).compose(&self.compose(&back))
    }

    /// Range `[min, max]` of `F(x) - x`.
    pub fn displacement_range(&self) -> (ExactScalar, ExactScalar) {
        let d: Vec<ExactScalar> = self
            .base
            .xs
            .iter()
            .zip(&self.base.ys)
            .map(|(x, y)| y - x)
            .collect();
        (
            d.iter().min().expect("nodes").clone(),
            d.iter().max().expect("nodes").clone(),
        )
    }

    /// Solution set of `F(x) = x + p`.
    pub fn solve_translation(&self, p: &ExactScalar) -> ArcSet {
        let xs = &self.base.xs;
        let h: Vec<ExactScalar> = xs
            .iter()
            .zip(&self.base.ys)
            .map(|(x, y)| y - x - p)
            .collect();
        let mut pieces: Vec<Arc> = Vec::new();
        let push = |arc: Arc, pieces: &mut Vec<Arc>| match pieces.last_mut() {
            Some(last) if arc.start <= last.end => {
                if arc.end > last.end {
                    last.end = arc.end;
                }
            }
            _ => pieces.push(arc),
        };
        for i in 0..xs.len() - 1 {
            let (h0, h1) = (&h[i], &h[i + 1]);
            if h0.is_zero() {
                let end = if h1.is_zero() {
                    xs[i + 1].clone()
                } else {
                    xs[i].clone()
                };
                push(Arc::new(xs[i].clone(), end), &mut pieces);
            } else if h1.is_zero() {
                push(Arc::new(xs[i + 1].clone(), xs[i + 1].clone()), &mut pieces);
            } else if h0.is_positive() != h1.is_positive() {
                let root = &xs[i] + (&xs[i + 1] - &xs[i]) * h0 / (h0 - h1);
                push(Arc::new(root.clone(), root), &mut pieces);
            }
        }
        let one = ExactScalar::one();
        if pieces.len() == 1 && pieces[0].start.is_zero() && pieces[0].end == one {
            return ArcSet::Whole;
        }
        // Points at 1 coincide with points at 0.
        if let Some(last) = pieces.last().cloned() {
            if last.end == one {
                pieces.pop();
                if !last.is_point() {
                    let first = pieces.remove(0);
                    pieces.push(Arc::new(last.start, first.end + one));
                }
            }
        }
        ArcSet::Arcs(pieces)
    }

    /// Breakpoints of the lift, shifted by every integer in `[lo - 1, hi + 1]`.
    pub fn nodes_between(&self, lo: &ExactScalar, hi: &ExactScalar) -> Vec<ExactScalar> {
        let mut out = Vec::new();
        let mut k = lo.floor() - ExactScalar::one();
        while k <= hi.floor() + ExactScalar::one() {
            out.extend(
                self.breakpoints()
                    .iter()
                    .map(|b| b + &k)
                    .filter(|b| b >= lo && b <= hi),
            );
            k += ExactScalar::one();
        }
        out.sort();
        out
    }

    /// Largest slope.
    pub fn lipschitz(&self) -> ExactScalar {
        self.base.lipschitz()
    }
}
