//! Named reference systems used throughout the docs, tests and CLI.

use crate::scalar::{int, ratio, ExactScalar};
use crate::system::FiniteSystem;

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Four points on a line, `d(i,j) = |i-j|`, map `(0 1)(2 3)`.
pub fn l4() -> FiniteSystem {
    FiniteSystem::from_fn(
        labels(4),
        |i, j| int((i as i64 - j as i64).abs()),
        vec![1, 0, 3, 2],
    )
    .expect("L4 is valid")
}

/// `Z/n` with the normalized cyclic metric `min(|i-j|, n-|i-j|)/n` and map `i ↦ i + step`.
pub fn cyclic_grid(n: usize, step: usize) -> FiniteSystem {
    let map = (0..n).map(|i| (i + step) % n).collect();
    FiniteSystem::from_fn(labels(n), |i, j| cyclic_distance(i, j, n), map).expect("grid is valid")
}

pub fn cyclic_distance(i: usize, j: usize, n: usize) -> ExactScalar {
    let diff = (i as i64 - j as i64).rem_euclid(n as i64);
    ratio(diff.min(n as i64 - diff), n as i64)
}

/// The rotation grid `R8 = cyclic_grid(8, 1)`.
pub fn r8() -> FiniteSystem {
    cyclic_grid(8, 1)
}

/// The cat map `(x,y) ↦ (2x+y, x+y)` on `(Z/5)²` with the max-of-cyclic metric scaled by `1/5`.
pub fn cat5() -> FiniteSystem {
    let coords: Vec<(i64, i64)> = (0..5).flat_map(|a| (0..5).map(move |b| (a, b))).collect();
    let cyc = |t: i64| {
        let t = t.rem_euclid(5);
        t.min(5 - t)
    };
    let points = coords.iter().map(|(a, b)| format!("{a},{b}")).collect();
    let map = coords
        .iter()
        .map(|&(a, b)| {
            let (x, y) = ((2 * a + b).rem_euclid(5), (a + b).rem_euclid(5));
            (x * 5 + y) as usize
        })
        .collect();
    FiniteSystem::from_fn(
        points,
        |i, j| {
            let ((a, b), (c, d)) = (coords[i], coords[j]);
            ratio(cyc(a - c).max(cyc(b - d)), 5)
        },
        map,
    )
    .expect("CAT5 is valid")
}

/// `system` with the identity map.
pub fn identity_of(system: &FiniteSystem) -> FiniteSystem {
    system
        .with_map((0..system.len()).collect())
        .expect("identity is a bijection")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat5_shape() {
        let s = cat5();
        assert_eq!(s.len(), 25);
        assert_eq!(
            s.apply(s.index_of("1,0").unwrap()),
            s.index_of("2,1").unwrap()
        );
    }
}
