//! Pointwise algebra of observables, closure laws of the expansive
//! observables, limit stability, and transport along conjugacies.

use serde::Serialize;

use crate::corpus::{self, CorpusRng};
use crate::error::ModelError;
use crate::relation::{OrbitDistanceTable, Quotient};
use crate::scalar::{ExactScalar, Extended, GaussianRational};
use crate::system::{FiniteSystem, Observable};

fn same_domain(phi: &Observable, psi: &Observable) -> Result<(), ModelError> {
    if phi.len() != psi.len() {
        return Err(ModelError::DomainMismatch(format!(
            "observables have {} and {} values",
            phi.len(),
            psi.len()
        )));
    }
    Ok(())
}

pub fn add(phi: &Observable, psi: &Observable) -> Result<Observable, ModelError> {
    same_domain(phi, psi)?;
    Ok(Observable::new(
        phi.values()
            .iter()
            .zip(psi.values())
            .map(|(a, b)| a + b)
            .collect(),
    ))
}

pub fn multiply(phi: &Observable, psi: &Observable) -> Result<Observable, ModelError> {
    same_domain(phi, psi)?;
    Ok(Observable::new(
        phi.values()
            .iter()
            .zip(psi.values())
            .map(|(a, b)| a * b)
            .collect(),
    ))
}

pub fn scale(lambda: &GaussianRational, phi: &Observable) -> Observable {
    Observable::new(phi.values().iter().map(|v| lambda * v).collect())
}

pub fn conjugate(phi: &Observable) -> Observable {
    Observable::new(phi.values().iter().map(GaussianRational::conj).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Sum,
    Product,
    Scale,
    Conjugate,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawViolation {
    pub trial: usize,
    pub law: Law,
    pub phi: Vec<GaussianRational>,
    pub psi: Vec<GaussianRational>,
    pub lambda: GaussianRational,
    pub expected: String,
    pub observed: Extended,
    /// Separated pair realizing the observed constant.
    pub witness: Option<(String, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawTally {
    pub law: Law,
    pub checked: usize,
    pub violations: usize,
}

/// A trial where `σ*(φ+ψ) < min(σ*(φ), σ*(ψ))` (squared). Recorded, not a failure.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaSumObservation {
    pub trial: usize,
    pub sigma_phi: Extended,
    pub sigma_psi: Extended,
    pub sigma_sum: Extended,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawSuiteReport {
    pub seed: u64,
    pub trials: usize,
    pub tallies: Vec<LawTally>,
    pub violations: Vec<LawViolation>,
    pub sigma_sum_observations: Vec<SigmaSumObservation>,
    pub passed: bool,
}

fn min_separated_pair(table: &OrbitDistanceTable<'_>, phi: &Observable) -> Option<(usize, usize)> {
    let n = phi.len();
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| phi.value(i) != phi.value(j))
        .min_by(|&(a, b), &(c, d)| table.get(a, b).cmp(table.get(c, d)))
}

/// Samples `(φ, ψ, λ)` and checks the closure laws of `δ*`:
/// sums and products never drop below the smaller constant, nonzero scalars
/// and conjugation preserve it exactly, and `0·φ` is constant.
pub fn law_suite(
    system: &FiniteSystem,
    seed: u64,
    trials: usize,
) -> Result<LawSuiteReport, ModelError> {
    if trials == 0 {
        return Err(ModelError::InvalidArgument(
            "trials must be at least 1".into(),
        ));
    }
    let table = OrbitDistanceTable::new(system);
    let mut rng: CorpusRng = corpus::rng(seed);
    let laws = [Law::Sum, Law::Product, Law::Scale, Law::Conjugate];
    let mut tallies: Vec<LawTally> = laws
        .iter()
        .map(|&law| LawTally {
            law,
            checked: 0,
            violations: 0,
        })
        .collect();
    let mut violations = Vec::new();
    let mut sigma_sum_observations = Vec::new();
    let labels = |pair: Option<(usize, usize)>| {
        pair.map(|(i, j)| (system.points()[i].clone(), system.points()[j].clone()))
    };

    for trial in 0..trials {
        let phi = corpus::random_observable(&mut rng, system.len());
        let psi = corpus::random_observable(&mut rng, system.len());
        let lambda = corpus::random_scalar(&mut rng);
        let dphi = table.delta_star(&phi)?;
        let dpsi = table.delta_star(&psi)?;
        let floor = dphi.clone().min(dpsi.clone());

        let sum = add(&phi, &psi)?;
        let product = multiply(&phi, &psi)?;
        let scaled = scale(&lambda, &phi);
        let conj = conjugate(&phi);
        let cases = [
            (Law::Sum, &sum, floor.clone(), format!(">= {floor}")),
            (Law::Product, &product, floor.clone(), format!(">= {floor}")),
            (
                Law::Scale,
                &scaled,
                if lambda.is_zero() {
                    Extended::Infinity
                } else {
                    dphi.clone()
                },
                if lambda.is_zero() {
                    "= inf".to_string()
                } else {
                    format!("= {dphi}")
                },
            ),
            (Law::Conjugate, &conj, dphi.clone(), format!("= {dphi}")),
        ];
        for (slot, (law, combined, bound, expected)) in cases.into_iter().enumerate() {
            let observed = table.delta_star(combined)?;
            let ok = match law {
                Law::Sum | Law::Product => observed >= bound,
                Law::Scale | Law::Conjugate => observed == bound,
            };
            tallies[slot].checked += 1;
            if !ok {
                tallies[slot].violations += 1;
                violations.push(LawViolation {
                    trial,
                    law,
                    phi: phi.values().to_vec(),
                    psi: psi.values().to_vec(),
                    lambda: lambda.clone(),
                    expected,
                    observed,
                    witness: labels(min_separated_pair(&table, combined)),
                });
            }
        }

        let sigma_phi = crate::relation::sigma_star(system, &phi)?;
        let sigma_psi = crate::relation::sigma_star(system, &psi)?;
        let sigma_sum = crate::relation::sigma_star(system, &sum)?;
        if sigma_sum < sigma_phi.clone().min(sigma_psi.clone()) {
            sigma_sum_observations.push(SigmaSumObservation {
                trial,
                sigma_phi,
                sigma_psi,
                sigma_sum,
            });
        }
    }
    Ok(LawSuiteReport {
        seed,
        trials,
        passed: violations.is_empty(),
        tallies,
        violations,
        sigma_sum_observations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    #[serde(with = "crate::scalar::as_text")]
    pub threshold: ExactScalar,
    pub sequence_length: usize,
    /// Indices whose `δ*` does not exceed the threshold (precondition failures).
    pub precondition_failures: Vec<usize>,
    pub limit: Vec<GaussianRational>,
    pub limit_delta_star: Extended,
    pub constant_on_blocks: bool,
    pub stable: bool,
}

fn separated_pairs(phi: &Observable) -> Vec<(usize, usize)> {
    let n = phi.len();
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| phi.value(i) != phi.value(j))
        .collect()
}

/// Checks that the limit of `δ`-expansive observables is again `δ`-expansive.
///
/// Without an explicit limit the last element is taken as the limit, which
/// requires the final two elements to separate the same pairs. With
/// `explicit = Some((φ, tol))` the last element must be within squared
/// sup-distance `tol` of `φ` and share its separation pattern.
pub fn limit_stability_check(
    system: &FiniteSystem,
    sequence: &[Observable],
    delta: &ExactScalar,
    explicit: Option<(&Observable, &ExactScalar)>,
) -> Result<LimitReport, ModelError> {
    let last = sequence
        .last()
        .ok_or_else(|| ModelError::NonConvergent("empty sequence".into()))?;
    let table = OrbitDistanceTable::new(system);
    let mut precondition_failures = Vec::new();
    for (i, phi) in sequence.iter().enumerate() {
        if !table.delta_star(phi)?.exceeds(delta) {
            precondition_failures.push(i);
        }
    }
    let limit = match explicit {
        None => {
            if let [.., prev, last] = sequence {
                if separated_pairs(prev) != separated_pairs(last) {
                    return Err(ModelError::NonConvergent(
                        "the final two elements separate different pairs".into(),
                    ));
                }
            }
            last.clone()
        }
        Some((limit, tol)) => {
            limit.check_domain(system)?;
            let gap = last
                .values()
                .iter()
                .zip(limit.values())
                .map(|(a, b)| a.dist_sqr(b))
                .max()
                .unwrap_or_default();
            if &gap > tol {
                return Err(ModelError::NonConvergent(format!(
                    "last element is at squared distance {gap} > {tol} from the limit"
                )));
            }
            if separated_pairs(last) != separated_pairs(limit) {
                return Err(ModelError::NonConvergent(
                    "separation pattern of the last element differs from the limit".into(),
                ));
            }
            limit.clone()
        }
    };
    let quotient: Quotient = table.quotient(delta);
    let limit_delta_star = table.delta_star(&limit)?;
    let constant_on_blocks = quotient.is_constant_on_blocks(&limit);
    Ok(LimitReport {
        threshold: delta.clone(),
        sequence_length: sequence.len(),
        stable: precondition_failures.is_empty()
            && constant_on_blocks
            && limit_delta_star.exceeds(delta),
        precondition_failures,
        limit: limit.values().to_vec(),
        limit_delta_star,
        constant_on_blocks,
    })
}

/// A conjugacy `h : Y → X` with `f ∘ h = h ∘ g`, checked on construction.
#[derive(Clone, Debug)]
pub struct Conjugacy {
    source: FiniteSystem,
    target: FiniteSystem,
    h: Vec<usize>,
}

impl Conjugacy {
    /// `source` carries `g` on `Y`, `target` carries `f` on `X`, `h[y]` is the image index.
    pub fn new(
        source: FiniteSystem,
        target: FiniteSystem,
        h: Vec<usize>,
    ) -> Result<Self, ModelError> {
        if source.len() != target.len() || h.len() != source.len() {
            return Err(ModelError::NotAConjugacy("h is not a bijection".into()));
        }
        let mut hit = vec![false; target.len()];
        for &x in &h {
            if x >= target.len() || std::mem::replace(&mut hit[x], true) {
                return Err(ModelError::NotAConjugacy("h is not a bijection".into()));
            }
        }
        for y in 0..source.len() {
            if target.apply(h[y]) != h[source.apply(y)] {
                return Err(ModelError::NotAConjugacy(format!(
                    "f(h({0})) != h(g({0}))",
                    source.points()[y]
                )));
            }
        }
        Ok(Self { source, target, h })
    }

    /// Parses `{ "source": system, "target": system, "h": { y: x } }`.
    pub fn parse(document: &str) -> Result<Self, ModelError> {
        let value: serde_json::Value = serde_json::from_str(document)?;
        let field = |name: &str| {
            value
                .get(name)
                .ok_or_else(|| ModelError::Malformed(format!("missing `{name}`")))
        };
        let source = FiniteSystem::parse(&field("source")?.to_string())?;
        let target = FiniteSystem::parse(&field("target")?.to_string())?;
        let pairs = field("h")?
            .as_object()
            .ok_or_else(|| ModelError::Malformed("`h` must be an object".into()))?;
        let mut h = vec![usize::MAX; source.len()];
        for (y, x) in pairs {
            let x = x
                .as_str()
                .ok_or_else(|| ModelError::Malformed(format!("image of `{y}` is not a string")))?;
            h[source.index_of(y)?] = target.index_of(x)?;
        }
        Self::new(source, target, h)
    }

    pub fn to_value(&self) -> serde_json::Value {
        let h: serde_json::Map<String, serde_json::Value> = self
            .source
            .points()
            .iter()
            .zip(&self.h)
            .map(|(y, &x)| {
                (
                    y.clone(),
                    serde_json::Value::String(self.target.points()[x].clone()),
                )
            })
            .collect();
        serde_json::json!({
            "source": self.source.to_value(),
            "target": self.target.to_value(),
            "h": h,
        })
    }

    pub fn source(&self) -> &FiniteSystem {
        &self.source
    }

    pub fn target(&self) -> &FiniteSystem {
        &self.target
    }

    pub fn h(&self) -> &[usize] {
        &self.h
    }

    /// `ω_h(t) = max { d_X(h a, h b) : d_Y(a,b) ≤ t }`.
    pub fn modulus(&self, t: &ExactScalar) -> ExactScalar {
        let n = self.source.len();
        (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.source.d(a, b) <= t)
            .map(|(a, b)| self.target.d(self.h[a], self.h[b]).clone())
            .max()
            .unwrap_or_default()
    }

    pub fn is_isometry(&self) -> bool {
        let n = self.source.len();
        (0..n).all(|a| (0..n).all(|b| self.source.d(a, b) == self.target.d(self.h[a], self.h[b])))
    }
}

/// `H(φ) = φ ∘ h`, carrying observables on `X` to observables on `Y`.
pub fn transport(c: &Conjugacy, phi: &Observable) -> Result<Observable, ModelError> {
    phi.check_domain(&c.target)?;
    Ok(Observable::new(
        c.h.iter().map(|&x| phi.value(x).clone()).collect(),
    ))
}

/// `H⁻¹(ψ) = ψ ∘ h⁻¹`.
pub fn transport_back(c: &Conjugacy, psi: &Observable) -> Result<Observable, ModelError> {
    psi.check_domain(&c.source)?;
    let mut values = vec![GaussianRational::zero(); psi.len()];
    for (y, &x) in c.h.iter().enumerate() {
        values[x] = psi.value(y).clone();
    }
    Ok(Observable::new(values))
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportSample {
    pub phi: Vec<GaussianRational>,
    pub delta_star_target: Extended,
    pub delta_star_source: Extended,
    /// Realized `t` with `ω_h(t) < δ*_f(φ)` where `δ*_g(Hφ) > t` failed.
    #[serde(with = "crate::scalar::vec_as_text")]
    pub failed_thresholds: Vec<ExactScalar>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugacyReport {
    pub isometry: bool,
    #[serde(with = "crate::scalar::pairs_as_text")]
    pub modulus: Vec<(ExactScalar, ExactScalar)>,
    pub samples: Vec<TransportSample>,
    /// Realized `t` where a `Y`-block at `t` is not inside one `X`-block at `ω_h(t)`.
    #[serde(with = "crate::scalar::vec_as_text")]
    pub refinement_failures: Vec<ExactScalar>,
    pub isometry_mismatches: usize,
    pub passed: bool,
}

/// Quantitative transport of expansivity constants along a conjugacy, checked
/// on `samples` seeded random observables of the target.
pub fn conjugacy_invariance_report(
    c: &Conjugacy,
    seed: u64,
    samples: usize,
) -> Result<ConjugacyReport, ModelError> {
    let table_x = OrbitDistanceTable::new(&c.target);
    let table_y = OrbitDistanceTable::new(&c.source);
    let realized = c.source.realized_distances();
    let modulus: Vec<(ExactScalar, ExactScalar)> =
        realized.iter().map(|t| (t.clone(), c.modulus(t))).collect();
    let isometry = c.is_isometry();

    let mut rng = corpus::rng(seed);
    let mut out = Vec::with_capacity(samples);
    let mut isometry_mismatches = 0;
    for _ in 0..samples {
        let phi = corpus::random_observable(&mut rng, c.target.len());
        let hphi = transport(c, &phi)?;
        let delta_star_target = table_x.delta_star(&phi)?;
        let delta_star_source = table_y.delta_star(&hphi)?;
        let failed_thresholds = modulus
            .iter()
            .filter(|(t, w)| delta_star_target.exceeds(w) && !delta_star_source.exceeds(t))
            .map(|(t, _)| t.clone())
            .collect();
        if isometry && delta_star_source != delta_star_target {
            isometry_mismatches += 1;
        }
        out.push(TransportSample {
            phi: phi.values().to_vec(),
            delta_star_target,
            delta_star_source,
            failed_thresholds,
        });
    }

    let mut refinement_failures = Vec::new();
    for (t, w) in &modulus {
        let blocks_x = table_x.quotient(w).block_of();
        let qy = table_y.quotient(t);
        let refines = qy.blocks.iter().all(|block| {
            block
                .windows(2)
                .all(|p| blocks_x[c.h[p[0]]] == blocks_x[c.h[p[1]]])
        });
        if !refines {
            refinement_failures.push(t.clone());
        }
    }

    let passed = isometry_mismatches == 0
        && refinement_failures.is_empty()
        && out.iter().all(|s| s.failed_thresholds.is_empty());
    Ok(ConjugacyReport {
        isometry,
        modulus,
        samples: out,
        refinement_failures,
        isometry_mismatches,
        passed,
    })
}

/// Relabels every point of `system` via `rename`, transporting metric and map.
pub fn relabel(
    system: &FiniteSystem,
    rename: impl Fn(&str) -> String,
) -> Result<FiniteSystem, ModelError> {
    FiniteSystem::new(
        system.points().iter().map(|p| rename(p)).collect(),
        system.metric().to_vec(),
        system.map().to_vec(),
    )
}
