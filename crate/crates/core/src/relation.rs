//! Orbit sup-distances and every expansivity constant derived from them.
//!
//! For a pair `(x, y)` the orbit sup-distance is
//! `D(x,y) = max_i d(f^i x, f^i y)`. Because `(a,b) ↦ (f a, f b)` permutes the
//! (unordered) pairs, the forward cycle of a pair is its full `Z`-orbit, so
//! `D` is constant on pair-cycles and each cycle is walked exactly once.
//!
//! Threshold convention: an observable `φ` satisfies the expansivity
//! implication with constant `δ` (pairs whose orbits stay within `δ`, with
//! `≤`, share a value) iff `δ < δ*(φ)`. Every `*_star` function returns the
//! supremal failing value, never a witness constant.

use serde::Serialize;

use crate::error::ModelError;
use crate::scalar::{ExactScalar, Extended, GaussianRational};
use crate::system::{FiniteSystem, Observable};
use crate::union_find::DisjointSet;

use num_traits::Zero;

/// Calls `visit` once per cycle of the unordered pair map, with the cycle's members.
fn for_each_pair_cycle(system: &FiniteSystem, mut visit: impl FnMut(&[(usize, usize)])) {
    let n = system.len();
    let mut seen = vec![false; n * n];
    let mut members = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if seen[i * n + j] {
                continue;
            }
            members.clear();
            let (mut a, mut b) = (i, j);
            loop {
                seen[a * n + b] = true;
                members.push((a, b));
                let (fa, fb) = (system.apply(a), system.apply(b));
                (a, b) = if fa < fb { (fa, fb) } else { (fb, fa) };
                if (a, b) == (i, j) {
                    break;
                }
            }
            visit(&members);
        }
    }
}

/// `max_i d(f^i x, f^i y)` for one pair, by walking its cycle.
pub fn pair_orbit_sup(system: &FiniteSystem, x: &str, y: &str) -> Result<ExactScalar, ModelError> {
    let (i, j) = (system.index_of(x)?, system.index_of(y)?);
    Ok(pair_orbit_sup_idx(system, i, j))
}

pub fn pair_orbit_sup_idx(system: &FiniteSystem, i: usize, j: usize) -> ExactScalar {
    let (mut a, mut b) = (i, j);
    let mut best = system.d(a, b).clone();
    loop {
        (a, b) = (system.apply(a), system.apply(b));
        if (a, b) == (i, j) {
            return best;
        }
        if system.d(a, b) > &best {
            best = system.d(a, b).clone();
        }
    }
}

/// The full table of orbit sup-distances of a system.
#[derive(Clone, Debug)]
pub struct OrbitDistanceTable<'a> {
    system: &'a FiniteSystem,
    table: Vec<Vec<ExactScalar>>,
}

impl<'a> OrbitDistanceTable<'a> {
    pub fn new(system: &'a FiniteSystem) -> Self {
        let n = system.len();
        let mut table = vec![vec![ExactScalar::zero(); n]; n];
        for_each_pair_cycle(system, |members| {
            let sup = members
                .iter()
                .map(|&(a, b)| system.d(a, b))
                .max()
                .expect("cycles are nonempty")
                .clone();
            for &(a, b) in members {
                table[a][b] = sup.clone();
                table[b][a] = sup.clone();
            }
        });
        Self { system, table }
    }

    pub fn system(&self) -> &'a FiniteSystem {
        self.system
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactScalar {
        &self.table[i][j]
    }

    pub fn rows(&self) -> &[Vec<ExactScalar>] {
        &self.table
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.system.len();
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
    }

    /// Sorted distinct values of `D` over distinct pairs.
    pub fn realized_values(&self) -> Vec<ExactScalar> {
        let mut values: Vec<ExactScalar> = self
            .pairs()
            .map(|(i, j)| self.table[i][j].clone())
            .collect();
        values.sort();
        values.dedup();
        values
    }

    /// `e* = min_{x≠y} D(x,y)`; the system is expansive at resolution `h` iff `e* > h`.
    pub fn e_star(&self) -> Result<ExactScalar, ModelError> {
        self.pairs()
            .map(|(i, j)| &self.table[i][j])
            .min()
            .cloned()
            .ok_or(ModelError::DegenerateSpace)
    }

    /// `δ*(φ) = min { D(x,y) : φ(x) ≠ φ(y) }`, `+∞` for constants.
    pub fn delta_star(&self, phi: &Observable) -> Result<Extended, ModelError> {
        phi.check_domain(self.system)?;
        Ok(Extended::min_of(
            self.pairs()
                .filter(|&(i, j)| phi.value(i) != phi.value(j))
                .map(|(i, j)| self.table[i][j].clone()),
        ))
    }

    /// `δ_x = min_{y≠x} D(x,y)` for every point.
    pub fn pointwise_constants(&self) -> Result<Vec<ExactScalar>, ModelError> {
        let n = self.system.len();
        if n < 2 {
            return Err(ModelError::DegenerateSpace);
        }
        Ok((0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| &self.table[i][j])
                    .min()
                    .expect("n >= 2")
                    .clone()
            })
            .collect())
    }

    /// `ω_f(t) = max { D(x,y) : d(x,y) ≤ t }`, `0` when no pair qualifies.
    pub fn omega_map(&self, t: &ExactScalar) -> ExactScalar {
        self.pairs()
            .filter(|&(i, j)| self.system.d(i, j) <= t)
            .map(|(i, j)| &self.table[i][j])
            .max()
            .cloned()
            .unwrap_or_else(ExactScalar::zero)
    }

    /// `(t, ω_f(t))` at every realized distance `t`.
    pub fn omega_table(&self) -> Vec<(ExactScalar, ExactScalar)> {
        self.system
            .realized_distances()
            .into_iter()
            .map(|t| {
                let w = self.omega_map(&t);
                (t, w)
            })
            .collect()
    }

    /// Components of the graph with an edge wherever `D(x,y) ≤ δ`.
    ///
    /// An observable has `δ*(φ) > δ` exactly when it is constant on every block.
    pub fn quotient(&self, delta: &ExactScalar) -> Quotient {
        let mut ds = DisjointSet::new(self.system.len());
        for (i, j) in self.pairs() {
            if &self.table[i][j] <= delta {
                ds.union(i, j);
            }
        }
        Quotient {
            threshold: delta.clone(),
            blocks: ds.components(),
        }
    }
}

/// Partition of the points into blocks of a threshold graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    pub threshold: ExactScalar,
    pub blocks: Vec<Vec<usize>>,
}

impl Quotient {
    pub fn is_single_block(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn block_of(&self) -> Vec<usize> {
        let n = self.blocks.iter().map(Vec::len).sum();
        let mut out = vec![0; n];
        for (k, block) in self.blocks.iter().enumerate() {
            for &i in block {
                out[i] = k;
            }
        }
        out
    }

    /// Whether `phi` takes one value on each block.
    pub fn is_constant_on_blocks(&self, phi: &Observable) -> bool {
        self.blocks
            .iter()
            .all(|block| block.windows(2).all(|w| phi.value(w[0]) == phi.value(w[1])))
    }

    /// Blocks rendered with point identifiers.
    pub fn labelled(&self, system: &FiniteSystem) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&i| system.points()[i].clone()).collect())
            .collect()
    }
}

pub fn orbit_distance_table(system: &FiniteSystem) -> OrbitDistanceTable<'_> {
    OrbitDistanceTable::new(system)
}

pub fn e_star(system: &FiniteSystem) -> Result<ExactScalar, ModelError> {
    OrbitDistanceTable::new(system).e_star()
}

pub fn delta_star(system: &FiniteSystem, phi: &Observable) -> Result<Extended, ModelError> {
    OrbitDistanceTable::new(system).delta_star(phi)
}

/// Strong expansivity constant, reported as a squared modulus:
/// `min` over `φ`-separated pairs of `max_i |φ(f^i x) − φ(f^i y)|²`.
pub fn sigma_star(system: &FiniteSystem, phi: &Observable) -> Result<Extended, ModelError> {
    phi.check_domain(system)?;
    let mut best = Extended::Infinity;
    for_each_pair_cycle(system, |members| {
        if members.iter().all(|&(a, b)| phi.value(a) == phi.value(b)) {
            return;
        }
        let spread = members
            .iter()
            .map(|&(a, b)| phi.value(a).dist_sqr(phi.value(b)))
            .max()
            .expect("cycles are nonempty");
        let spread = Extended::Finite(spread);
        if spread < best {
            best = spread;
        }
    });
    Ok(best)
}

pub fn omega_map(system: &FiniteSystem, t: &ExactScalar) -> ExactScalar {
    OrbitDistanceTable::new(system).omega_map(t)
}

/// `ω_φ(t) = max { |φ(a)−φ(b)|² : d(a,b) ≤ t }` (squared), `0` when vacuous.
pub fn omega_obs(
    system: &FiniteSystem,
    phi: &Observable,
    t: &ExactScalar,
) -> Result<ExactScalar, ModelError> {
    phi.check_domain(system)?;
    let n = system.len();
    Ok((0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| system.d(i, j) <= t)
        .map(|(i, j)| phi.value(i).dist_sqr(phi.value(j)))
        .max()
        .unwrap_or_else(ExactScalar::zero))
}

pub fn indistinguishability_quotient(system: &FiniteSystem, delta: &ExactScalar) -> Quotient {
    OrbitDistanceTable::new(system).quotient(delta)
}

/// Components of the metric threshold graph `d(x,y) ≤ t` (the map plays no role).
pub fn chain_components(system: &FiniteSystem, t: &ExactScalar) -> Vec<Vec<usize>> {
    let n = system.len();
    let mut ds = DisjointSet::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if system.d(i, j) <= t {
                ds.union(i, j);
            }
        }
    }
    ds.components()
}

pub fn pointwise_constants(system: &FiniteSystem) -> Result<Vec<ExactScalar>, ModelError> {
    OrbitDistanceTable::new(system).pointwise_constants()
}

/// `{ x : f^k(x) = x }` as indices in point order.
pub fn fixed_points(system: &FiniteSystem, k: u32) -> Vec<usize> {
    let power = system.power_map(i64::from(k));
    (0..system.len()).filter(|&i| power[i] == i).collect()
}

/// Same points and metric, map `f^k`.
pub fn power_system(system: &FiniteSystem, k: i64) -> Result<FiniteSystem, ModelError> {
    if k == 0 {
        return Err(ModelError::InvalidArgument("power must be nonzero".into()));
    }
    system.with_map(system.power_map(k))
}

/// Largest realized distance `t` such that every pair with `d(x,y) ≤ t` stays
/// within `e` for the first `k` steps; `0` if no realized `t` qualifies.
pub fn gamma_k(system: &FiniteSystem, k: u32, e: &ExactScalar) -> Result<ExactScalar, ModelError> {
    if k == 0 {
        return Err(ModelError::InvalidArgument("k must be positive".into()));
    }
    let n = system.len();
    // Smallest metric distance among pairs whose k-step spread exceeds e.
    let mut blocking: Option<ExactScalar> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let (mut a, mut b) = (i, j);
            let mut spread_ok = true;
            for _ in 0..k {
                if system.d(a, b) > e {
                    spread_ok = false;
                    break;
                }
                (a, b) = (system.apply(a), system.apply(b));
            }
            if !spread_ok && blocking.as_ref().map_or(true, |v| system.d(i, j) < v) {
                blocking = Some(system.d(i, j).clone());
            }
        }
    }
    Ok(system
        .realized_distances()
        .into_iter()
        .take_while(|t| blocking.as_ref().map_or(true, |b| t < b))
        .last()
        .unwrap_or_else(ExactScalar::zero))
}

/// Level-set statistics of an observable on `Fix(f^k)`.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodicLevelReport {
    pub k: u32,
    pub fixed_points: Vec<String>,
    pub distinct_values: Vec<GaussianRational>,
    /// `δ*` of the observable for the power map `f^k`.
    pub delta_star_power: Extended,
    pub checked_pairs: usize,
    /// Fixed pairs closer than `delta_star_power` with different values.
    pub violations: Vec<(String, String)>,
    pub flag_holds: bool,
}

pub fn periodic_level_report(
    system: &FiniteSystem,
    phi: &Observable,
    k: u32,
) -> Result<PeriodicLevelReport, ModelError> {
    if k == 0 {
        return Err(ModelError::InvalidArgument("k must be positive".into()));
    }
    phi.check_domain(system)?;
    let power = power_system(system, i64::from(k))?;
    let delta_star_power = OrbitDistanceTable::new(&power).delta_star(phi)?;
    let fixed = fixed_points(system, k);
    let mut distinct_values = Vec::new();
    for &i in &fixed {
        if !distinct_values.contains(phi.value(i)) {
            distinct_values.push(phi.value(i).clone());
        }
    }
    let mut checked_pairs = 0;
    let mut violations = Vec::new();
    for (a, &i) in fixed.iter().enumerate() {
        for &j in &fixed[a + 1..] {
            if delta_star_power.exceeds(system.d(i, j)) {
                checked_pairs += 1;
                if phi.value(i) != phi.value(j) {
                    violations.push((system.points()[i].clone(), system.points()[j].clone()));
                }
            }
        }
    }
    Ok(PeriodicLevelReport {
        k,
        fixed_points: fixed.iter().map(|&i| system.points()[i].clone()).collect(),
        distinct_values,
        delta_star_power,
        checked_pairs,
        flag_holds: violations.is_empty(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{cat5, identity_of, l4, r8};
    use crate::scalar::{int, ratio};
    use crate::system::distance_observable;

    fn ints(rows: &[[i64; 4]]) -> Vec<Vec<ExactScalar>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect()
    }

    #[test]
    fn pair_orbit_sup_examples() {
        let s = l4();
        assert_eq!(pair_orbit_sup(&s, "0", "2").unwrap(), int(2));
        assert_eq!(pair_orbit_sup(&s, "0", "3").unwrap(), int(3));
        let r = r8();
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(&pair_orbit_sup_idx(&r, i, j), r.d(i, j));
            }
        }
        assert!(matches!(
            pair_orbit_sup(&s, "0", "q"),
            Err(ModelError::UnknownPoint(_))
        ));
    }

    #[test]
    fn l4_table() {
        let s = l4();
        let table = OrbitDistanceTable::new(&s);
        assert_eq!(
            table.rows(),
            ints(&[[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]])
        );
        let id = identity_of(&s);
        assert_eq!(OrbitDistanceTable::new(&id).rows(), s.metric());
        let r = r8();
        assert_eq!(OrbitDistanceTable::new(&r).rows(), r.metric());
    }

    #[test]
    fn e_star_examples() {
        assert_eq!(e_star(&l4()).unwrap(), int(1));
        assert_eq!(e_star(&r8()).unwrap(), ratio(1, 8));
        assert_eq!(e_star(&cat5()).unwrap(), ratio(2, 5));
    }

    #[test]
    fn delta_star_examples() {
        let s = l4();
        assert_eq!(
            delta_star(&s, &Observable::from_ints(&[0, 0, 1, 1])).unwrap(),
            int(2).into()
        );
        assert_eq!(
            delta_star(&s, &Observable::from_ints(&[0, 1, 2, 3])).unwrap(),
            int(1).into()
        );
        assert_eq!(
            delta_star(&s, &Observable::from_ints(&[5, 5, 5, 5])).unwrap(),
            Extended::Infinity
        );
        assert!(matches!(
            delta_star(&s, &Observable::from_ints(&[1, 2])),
            Err(ModelError::DomainMismatch(_))
        ));
    }

    #[test]
    fn sigma_star_examples() {
        let s = l4();
        assert_eq!(
            sigma_star(&s, &Observable::from_ints(&[0, 0, 1, 1])).unwrap(),
            int(1).into()
        );
        assert_eq!(
            sigma_star(&s, &Observable::from_ints(&[0, 1, 2, 3])).unwrap(),
            int(1).into()
        );
        assert_eq!(
            sigma_star(&s, &Observable::from_ints(&[2, 2, 2, 2])).unwrap(),
            Extended::Infinity
        );
    }

    #[test]
    fn omega_examples() {
        let r = r8();
        assert_eq!(omega_map(&r, &ratio(1, 8)), ratio(1, 8));
        let s = l4();
        assert_eq!(omega_map(&s, &int(1)), int(3));
        assert_eq!(omega_map(&s, &ratio(1, 2)), int(0));
        let phi = Observable::from_ints(&[0, 0, 1, 1]);
        assert_eq!(omega_obs(&s, &phi, &int(1)).unwrap(), int(1));
        assert_eq!(omega_obs(&s, &phi, &ratio(1, 2)).unwrap(), int(0));
        assert_eq!(
            omega_obs(&s, &Observable::from_ints(&[3, 3, 3, 3]), &int(3)).unwrap(),
            int(0)
        );
    }

    #[test]
    fn quotient_examples() {
        let s = l4();
        assert_eq!(
            indistinguishability_quotient(&s, &int(1)).blocks,
            vec![vec![0, 1], vec![2, 3]]
        );
        assert!(indistinguishability_quotient(&r8(), &ratio(1, 8)).is_single_block());
        assert!(indistinguishability_quotient(&s, &ratio(1, 2)).is_discrete());
    }

    #[test]
    fn chain_component_examples() {
        assert_eq!(chain_components(&r8(), &ratio(1, 8)).len(), 1);
        assert_eq!(chain_components(&l4(), &int(1)).len(), 1);
        assert_eq!(chain_components(&l4(), &ratio(1, 2)).len(), 4);
    }

    #[test]
    fn pointwise_examples() {
        assert_eq!(pointwise_constants(&l4()).unwrap(), vec![int(1); 4]);
        assert_eq!(pointwise_constants(&r8()).unwrap(), vec![ratio(1, 8); 8]);
        assert_eq!(pointwise_constants(&cat5()).unwrap(), vec![ratio(2, 5); 25]);
    }

    #[test]
    fn fixed_point_examples() {
        let s = l4();
        assert!(fixed_points(&s, 1).is_empty());
        assert_eq!(fixed_points(&s, 2), vec![0, 1, 2, 3]);
        assert_eq!(fixed_points(&r8(), 8).len(), 8);
        assert!(fixed_points(&r8(), 3).is_empty());
        assert_eq!(fixed_points(&identity_of(&s), 1).len(), 4);
    }

    #[test]
    fn periodic_level_examples() {
        let s = l4();
        let rep = periodic_level_report(&s, &Observable::from_ints(&[0, 0, 1, 1]), 2).unwrap();
        assert_eq!(rep.distinct_values.len(), 2);
        assert!(rep.flag_holds);
        let rep = periodic_level_report(&s, &Observable::from_ints(&[7, 7, 7, 7]), 3).unwrap();
        assert!(rep.flag_holds);
        assert!(rep.distinct_values.len() <= 1);
        let r = r8();
        let phi = distance_observable(&r, "0").unwrap();
        let rep = periodic_level_report(&r, &phi, 8).unwrap();
        let expected: Vec<_> = (0..5)
            .map(|k| GaussianRational::real(ratio(k, 8)))
            .collect();
        assert_eq!(rep.distinct_values, expected);
        assert!(rep.flag_holds);
        assert_eq!(rep.checked_pairs, 0);
    }

    #[test]
    fn power_system_examples() {
        let r = r8();
        assert_eq!(
            power_system(&r, 2).unwrap().map(),
            crate::examples::cyclic_grid(8, 2).map()
        );
        assert!(power_system(&l4(), 2).unwrap().is_identity());
        let inv = power_system(&l4(), -1).unwrap();
        assert_eq!(inv.map(), l4().inverse_map().as_slice());
        assert!(power_system(&r, 0).is_err());
    }

    #[test]
    fn gamma_k_examples() {
        assert_eq!(gamma_k(&r8(), 3, &ratio(1, 8)).unwrap(), ratio(1, 8));
        assert_eq!(gamma_k(&l4(), 2, &int(1)).unwrap(), int(0));
        assert_eq!(gamma_k(&l4(), 1, &ratio(5, 2)).unwrap(), int(2));
    }
}
