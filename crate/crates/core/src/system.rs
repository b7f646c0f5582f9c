//! Finite metric systems `(X, d, f)` and exact observables on them.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::scalar::{format_scalar, parse_scalar, ExactScalar, GaussianRational};

/// A finite metric space together with a bijection of its points.
///
/// Points keep their document order; every iteration in the crate follows it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSystem {
    points: Vec<String>,
    index: HashMap<String, usize>,
    metric: Vec<Vec<ExactScalar>>,
    map: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SystemDoc {
    points: Vec<String>,
    metric: Vec<Vec<String>>,
    map: serde_json::Map<String, serde_json::Value>,
}

impl FiniteSystem {
    /// Builds and validates a system. `map[i]` is the index of `f(points[i])`.
    pub fn new(
        points: Vec<String>,
        metric: Vec<Vec<ExactScalar>>,
        map: Vec<usize>,
    ) -> Result<Self, ModelError> {
        let n = points.len();
        let mut index = HashMap::with_capacity(n);
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(ModelError::Malformed(format!("duplicate point `{p}`")));
            }
        }
        if metric.len() != n || metric.iter().any(|row| row.len() != n) {
            return Err(ModelError::MetricViolation(format!(
                "metric must be a {n}x{n} matrix"
            )));
        }
        if map.len() != n {
            return Err(ModelError::NotABijection(format!(
                "map has {} entries for {n} points",
                map.len()
            )));
        }
        let system = Self {
            points,
            index,
            metric,
            map,
        };
        system.check_metric()?;
        system.check_bijection()?;
        Ok(system)
    }

    /// Builds a system from a metric function over indices.
    pub fn from_fn(
        points: Vec<String>,
        metric: impl Fn(usize, usize) -> ExactScalar,
        map: Vec<usize>,
    ) -> Result<Self, ModelError> {
        let n = points.len();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| metric(i, j)).collect())
            .collect();
        Self::new(points, matrix, map)
    }

    fn check_metric(&self) -> Result<(), ModelError> {
        let n = self.len();
        let d = &self.metric;
        for i in 0..n {
            if !d[i][i].is_zero() {
                return Err(ModelError::MetricViolation(format!(
                    "d({0},{0}) = {1} is not zero",
                    self.points[i], d[i][i]
                )));
            }
            for j in (i + 1)..n {
                if d[i][j] != d[j][i] {
                    return Err(ModelError::MetricViolation(format!(
                        "asymmetric pair ({},{}): {} != {}",
                        self.points[i], self.points[j], d[i][j], d[j][i]
                    )));
                }
                if !d[i][j].is_positive() {
                    return Err(ModelError::MetricViolation(format!(
                        "non-positive distance d({},{}) = {}",
                        self.points[i], self.points[j], d[i][j]
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if d[i][k] > &d[i][j] + &d[j][k] {
                        return Err(ModelError::MetricViolation(format!(
                            "triangle inequality fails for ({},{},{}): {} > {} + {}",
                            self.points[i],
                            self.points[j],
                            self.points[k],
                            d[i][k],
                            d[i][j],
                            d[j][k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_bijection(&self) -> Result<(), ModelError> {
        let mut preimage: Vec<Option<usize>> = vec![None; self.len()];
        for (i, &image) in self.map.iter().enumerate() {
            if image >= self.len() {
                return Err(ModelError::NotABijection(format!(
                    "image index {image} out of range"
                )));
            }
            if let Some(prev) = preimage[image] {
                return Err(ModelError::NotABijection(format!(
                    "`{}` and `{}` both map to `{}`",
                    self.points[prev], self.points[i], self.points[image]
                )));
            }
            preimage[image] = Some(i);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn metric(&self) -> &[Vec<ExactScalar>] {
        &self.metric
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn d(&self, i: usize, j: usize) -> &ExactScalar {
        &self.metric[i][j]
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize, ModelError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| ModelError::UnknownPoint(id.to_string()))
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Same points and metric with a different bijection.
    pub fn with_map(&self, map: Vec<usize>) -> Result<Self, ModelError> {
        let system = Self {
            map,
            ..self.clone()
        };
        if system.map.len() != system.len() {
            return Err(ModelError::NotABijection("wrong map length".into()));
        }
        system.check_bijection()?;
        Ok(system)
    }

    /// Same points and map with a different metric.
    pub fn with_metric(&self, metric: Vec<Vec<ExactScalar>>) -> Result<Self, ModelError> {
        Self::new(self.points.clone(), metric, self.map.clone())
    }

    /// `f^{-1}` as an index table.
    pub fn inverse_map(&self) -> Vec<usize> {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        inv
    }

    /// `f^k` for any integer `k` (negative powers iterate the inverse).
    pub fn power_map(&self, k: i64) -> Vec<usize> {
        let step = if k < 0 {
            self.inverse_map()
        } else {
            self.map.clone()
        };
        let mut result: Vec<usize> = (0..self.len()).collect();
        for _ in 0..k.unsigned_abs() {
            for slot in result.iter_mut() {
                *slot = step[*slot];
            }
        }
        result
    }

    /// Sorted distinct positive distances realized by the metric.
    pub fn realized_distances(&self) -> Vec<ExactScalar> {
        let mut values: Vec<ExactScalar> = (0..self.len())
            .flat_map(|i| ((i + 1)..self.len()).map(move |j| (i, j)))
            .map(|(i, j)| self.metric[i][j].clone())
            .collect();
        values.sort();
        values.dedup();
        values
    }

    /// Parses the JSON system schema.
    pub fn parse(document: &str) -> Result<Self, ModelError> {
        let doc: SystemDoc = serde_json::from_str(document)?;
        let n = doc.points.len();
        let metric = doc
            .metric
            .iter()
            .map(|row| {
                row.iter()
                    .map(|t| parse_scalar(t))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let index: HashMap<&str, usize> = doc
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), i))
            .collect();
        let mut map = vec![usize::MAX; n];
        for (src, dst) in &doc.map {
            let dst = dst.as_str().ok_or_else(|| {
                ModelError::Malformed(format!("image of `{src}` is not a string"))
            })?;
            let i = *index
                .get(src.as_str())
                .ok_or_else(|| ModelError::UnknownPoint(src.clone()))?;
            let j = *index
                .get(dst)
                .ok_or_else(|| ModelError::UnknownPoint(dst.to_string()))?;
            map[i] = j;
        }
        if let Some(i) = map.iter().position(|&j| j == usize::MAX) {
            return Err(ModelError::NotABijection(format!(
                "`{}` has no image",
                doc.points[i]
            )));
        }
        Self::new(doc.points, metric, map)
    }

    /// Serializes to the JSON system schema (map keys in point order).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("system serializes")
    }

    pub fn to_value(&self) -> serde_json::Value {
        let map = self
            .points
            .iter()
            .zip(&self.map)
            .map(|(p, &j)| (p.clone(), serde_json::Value::String(self.points[j].clone())))
            .collect();
        let doc = SystemDoc {
            points: self.points.clone(),
            metric: self
                .metric
                .iter()
                .map(|row| row.iter().map(format_scalar).collect())
                .collect(),
            map,
        };
        serde_json::to_value(doc).expect("system serializes")
    }
}

/// `min_{x≠y} d(x,y)`.
pub fn mesh(system: &FiniteSystem) -> Result<ExactScalar, ModelError> {
    system
        .realized_distances()
        .into_iter()
        .next()
        .ok_or(ModelError::DegenerateSpace)
}

/// `z ↦ d(x, z)`, the observable separating `x` from every other point.
pub fn distance_observable(system: &FiniteSystem, x: &str) -> Result<Observable, ModelError> {
    let i = system.index_of(x)?;
    Ok(Observable::new(
        system.metric()[i]
            .iter()
            .map(|v| GaussianRational::real(v.clone()))
            .collect(),
    ))
}

/// An exact complex-valued function on the points of a system, stored in
/// point order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Observable {
    values: Vec<GaussianRational>,
}

#[derive(Serialize, Deserialize)]
struct ObservableDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    system: Option<String>,
    values: serde_json::Map<String, serde_json::Value>,
}

impl Observable {
    pub fn new(values: Vec<GaussianRational>) -> Self {
        Self { values }
    }

    pub fn real(values: impl IntoIterator<Item = ExactScalar>) -> Self {
        Self::new(values.into_iter().map(GaussianRational::real).collect())
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Self::real(values.iter().map(|&v| crate::scalar::int(v)))
    }

    pub fn constant(n: usize, value: GaussianRational) -> Self {
        Self::new(vec![value; n])
    }

    pub fn values(&self) -> &[GaussianRational] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &GaussianRational {
        &self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Whether the observable takes a single value (vacuously true when empty).
    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    pub fn is_injective(&self) -> bool {
        let mut sorted: Vec<&GaussianRational> = self.values.iter().collect();
        sorted.sort();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// Distinct values in order of first appearance.
    pub fn distinct_values(&self) -> Vec<GaussianRational> {
        let mut seen = Vec::new();
        for v in &self.values {
            if !seen.contains(v) {
                seen.push(v.clone());
            }
        }
        seen
    }

    pub fn check_domain(&self, system: &FiniteSystem) -> Result<(), ModelError> {
        if self.len() != system.len() {
            return Err(ModelError::DomainMismatch(format!(
                "observable has {} values, system has {} points",
                self.len(),
                system.len()
            )));
        }
        Ok(())
    }

    /// Parses the JSON observable schema against `system`.
    pub fn parse(system: &FiniteSystem, document: &str) -> Result<Self, ModelError> {
        let doc: ObservableDoc = serde_json::from_str(document)?;
        Self::from_doc(system, doc)
    }

    pub fn from_value(system: &FiniteSystem, value: serde_json::Value) -> Result<Self, ModelError> {
        let doc: ObservableDoc = serde_json::from_value(value)?;
        Self::from_doc(system, doc)
    }

    fn from_doc(system: &FiniteSystem, doc: ObservableDoc) -> Result<Self, ModelError> {
        let mut values: Vec<Option<GaussianRational>> = vec![None; system.len()];
        for (id, raw) in doc.values {
            let i = system.index_of(&id).map_err(|_| {
                ModelError::DomainMismatch(format!("`{id}` is not a point of the system"))
            })?;
            let pair: Vec<String> = serde_json::from_value(raw)?;
            values[i] = Some(GaussianRational::from_text_pair(&pair)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    ModelError::DomainMismatch(format!("no value for `{}`", system.points()[i]))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(values))
    }

    pub fn to_value(&self, system: &FiniteSystem, system_id: Option<&str>) -> serde_json::Value {
        let values = system
            .points()
            .iter()
            .zip(&self.values)
            .map(|(p, v)| {
                (
                    p.clone(),
                    serde_json::to_value(v).expect("value serializes"),
                )
            })
            .collect();
        serde_json::to_value(ObservableDoc {
            system: system_id.map(str::to_string),
            values,
        })
        .expect("observable serializes")
    }
}
