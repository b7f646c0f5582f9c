//! Seeded random systems and observables.
//!
//! All sampling goes through `ChaCha8Rng`, so a seed fully determines the output.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{int, ratio, ExactScalar, GaussianRational};
use crate::system::{FiniteSystem, Observable};

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Values used by the observable sampler: `{0, 1, i, 1+i, 1/2}`.
pub fn palette() -> Vec<GaussianRational> {
    vec![
        GaussianRational::zero(),
        GaussianRational::one(),
        GaussianRational::from_ints(0, 1),
        GaussianRational::from_ints(1, 1),
        GaussianRational::real(ratio(1, 2)),
    ]
}

/// Random metric on `n` points: random positive rational weights, repaired
/// into a metric by taking shortest-path distances.
pub fn random_metric(rng: &mut CorpusRng, n: usize) -> Vec<Vec<ExactScalar>> {
    let mut d = vec![vec![int(0); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = ratio(rng.gen_range(1..=12), rng.gen_range(1..=4));
            d[i][j] = w.clone();
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let through = &d[i][k] + &d[k][j];
                if through < d[i][j] {
                    d[i][j] = through;
                }
            }
        }
    }
    d
}

pub fn random_permutation(rng: &mut CorpusRng, n: usize) -> Vec<usize> {
    let mut map: Vec<usize> = (0..n).collect();
    map.shuffle(rng);
    map
}

/// A random valid system with `2 ≤ |X| ≤ max_points`.
pub fn random_system(rng: &mut CorpusRng, max_points: usize) -> FiniteSystem {
    let n = rng.gen_range(2..=max_points.max(2));
    let metric = random_metric(rng, n);
    let map = random_permutation(rng, n);
    let points = (0..n).map(|i| format!("p{i}")).collect();
    FiniteSystem::new(points, metric, map).expect("shortest-path metrics are valid")
}

/// `count` systems from one seed, in generation order.
pub fn random_corpus(seed: u64, count: usize, max_points: usize) -> Vec<FiniteSystem> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| random_system(&mut rng, max_points))
        .collect()
}

/// Palette values over a random partition of the points.
pub fn random_observable(rng: &mut CorpusRng, n: usize) -> Observable {
    let palette = palette();
    let classes = rng.gen_range(1..=n.max(1));
    let class_values: Vec<GaussianRational> = (0..classes)
        .map(|_| palette[rng.gen_range(0..palette.len())].clone())
        .collect();
    Observable::new(
        (0..n)
            .map(|_| class_values[rng.gen_range(0..classes)].clone())
            .collect(),
    )
}

pub fn random_scalar(rng: &mut CorpusRng) -> GaussianRational {
    let palette = palette();
    palette[rng.gen_range(0..palette.len())].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_seed_deterministic() {
        let a = random_corpus(7, 5, 12);
        let b = random_corpus(7, 5, 12);
        assert_eq!(a, b);
        assert!(a.iter().all(|s| (2..=12).contains(&s.len())));
    }
}
