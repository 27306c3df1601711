//! Random matroids, bases and polytope points for tests and experiments.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::matroid::{ConcreteMatroid, GraphicMatroid, Matroid, MatroidExt, PartitionMatroid, UniformMatroid};
use crate::set::{ElementId, ElementSet};
use crate::values::{TieBroken, TieBrokenValue};

/// Multigraph with `edges` random edges on `vertices` vertices, no self-loops.
pub fn random_graphic<R: Rng + ?Sized>(rng: &mut R, vertices: usize, edges: usize) -> GraphicMatroid {
    assert!(vertices >= 2, "need two vertices for a non-loop edge");
    let list = (0..edges)
        .map(|_| {
            let u = rng.random_range(0..vertices);
            let mut v = rng.random_range(0..vertices - 1);
            if v >= u {
                v += 1;
            }
            (u.min(v), u.max(v))
        })
        .collect();
    GraphicMatroid::new(vertices, list).expect("endpoints in range")
}

/// A uniform, partition or graphic matroid on `n` elements (`n >= 1`).
pub fn random_matroid<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ConcreteMatroid {
    match rng.random_range(0..3) {
        0 => UniformMatroid::new(n, rng.random_range(1..=n)).expect("rank within range").into(),
        1 => {
            let mut sizes = Vec::new();
            let mut left = n;
            while left > 0 {
                let s = rng.random_range(1..=left);
                sizes.push(s);
                left -= s;
            }
            let caps = sizes.iter().map(|&s| rng.random_range(1..=s)).collect();
            PartitionMatroid::with_block_sizes(&sizes, caps).expect("valid blocks").into()
        }
        _ => {
            let vertices = rng.random_range(2..=n.max(2) + 1);
            random_graphic(rng, vertices, n).into()
        }
    }
}

/// Greedy basis along a uniformly random order.
pub fn random_basis<M: Matroid + ?Sized, R: Rng + ?Sized>(m: &M, rng: &mut R) -> ElementSet {
    let mut order: Vec<ElementId> = (0..m.ground_size()).collect();
    order.shuffle(rng);
    m.greedy(order)
}

/// Independent uniform values with uniform tiebreakers.
pub fn random_values<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<TieBrokenValue> {
    (0..n).map(|_| TieBroken::new(rng.random(), rng.random())).collect()
}

/// Values drawn from a small grid, so base ties are common.
pub fn random_tied_values<R: Rng + ?Sized>(rng: &mut R, n: usize, levels: u32) -> Vec<TieBrokenValue> {
    (0..n)
        .map(|_| TieBroken::new(f64::from(rng.random_range(0..levels)), rng.random()))
        .collect()
}

/// `scale` times a random convex combination of `count` basis indicators.
///
/// Convex combinations of bases lie in the base polytope, so the result is
/// in `scale * P`. Coordinates are clamped to `[0, 1]` against rounding.
pub fn random_polytope_point<M: Matroid + ?Sized, R: Rng + ?Sized>(
    m: &M,
    rng: &mut R,
    count: usize,
    scale: f64,
) -> Vec<f64> {
    let weights: Vec<f64> = (0..count.max(1)).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut x = vec![0.0; m.ground_size()];
    for w in &weights {
        for e in &random_basis(m, rng) {
            x[e] += w / total;
        }
    }
    x.iter().map(|v| (v * scale).clamp(0.0, 1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::in_polytope;
    use crate::rng::Streams;

    #[test]
    fn generated_objects_are_valid() {
        let mut rng = Streams::new(5).rng(0);
        for n in 1..=8 {
            let m = random_matroid(&mut rng, n);
            assert_eq!(m.ground_size(), n);
            let b = random_basis(&m, &mut rng);
            assert!(m.is_basis(&b).unwrap());
            let x = random_polytope_point(&m, &mut rng, 4, 0.5);
            assert!(in_polytope(&m, &x).unwrap());
        }
    }
}
