//! The complete-bipartite hard instance.
//!
//! Ground set: edges of `K_{N,M}`, edge `i * M + j` joining left vertex
//! `u_i` to right vertex `v_j`. Point `x^i` puts mass 1 on the star of `u_i`
//! and `1/M` on every other edge.

use sampled_prophet_core::matroid::GraphicMatroid;
use sampled_prophet_core::ElementId;

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug)]
pub struct HardInstance {
    pub left: usize,
    pub right: usize,
    pub matroid: GraphicMatroid,
    /// `points[i]` is `x^i`.
    pub points: Vec<Vec<f64>>,
}

impl HardInstance {
    /// Edges of the star of left vertex `i`, ordered by right endpoint.
    pub fn star(&self, i: usize) -> Vec<ElementId> {
        (i * self.right..(i + 1) * self.right).collect()
    }

    /// Every edge outside the star of `i`, then the star.
    pub fn hidden_last_order(&self, i: usize) -> Vec<ElementId> {
        let star = i * self.right..(i + 1) * self.right;
        (0..self.left * self.right)
            .filter(|e| !star.contains(e))
            .chain(star.clone())
            .collect()
    }
}

pub fn gen_hard_instance(left: usize, right: usize, edge_cap: usize) -> Result<HardInstance> {
    if left == 0 || right == 0 {
        return Err(HarnessError::Config("both sides need at least one vertex".into()));
    }
    if left * right > edge_cap {
        return Err(HarnessError::Config(format!(
            "K_{{{left},{right}}} has {} edges, cap is {edge_cap}",
            left * right
        )));
    }
    let matroid = GraphicMatroid::complete_bipartite(left, right);
    let spread = 1.0 / right as f64;
    let points = (0..left)
        .map(|i| {
            (0..left * right)
                .map(|e| if e / right == i { 1.0 } else { spread })
                .collect()
        })
        .collect();
    Ok(HardInstance {
        left,
        right,
        matroid,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use sampled_prophet_core::matroid::in_polytope;
    use sampled_prophet_core::Matroid;

    #[test]
    fn small_cases() {
        let one = gen_hard_instance(1, 1, 10).unwrap();
        assert_eq!(one.matroid.ground_size(), 1);
        assert_eq!(one.points, vec![vec![1.0]]);

        let two = gen_hard_instance(2, 2, 10).unwrap();
        assert_eq!(two.points[0], vec![1.0, 1.0, 0.5, 0.5]);
        assert_eq!(two.points[1], vec![0.5, 0.5, 1.0, 1.0]);
        assert_eq!(two.hidden_last_order(0), vec![2, 3, 0, 1]);

        let three = gen_hard_instance(3, 2, 10).unwrap();
        for x in &three.points {
            assert!(in_polytope(&three.matroid, x).unwrap());
        }
        assert!(gen_hard_instance(4, 4, 15).is_err());
        assert!(gen_hard_instance(0, 4, 15).is_err());
    }
}
