use smallvec::{smallvec, SmallVec};

use super::{Matroid, MatroidExt, MatroidSpec};
use crate::error::{invalid, Error, Result};
use crate::set::{ElementId, ElementSet};

/// Every set of at most `rank` elements is independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformMatroid {
    n: usize,
    rank: usize,
}

impl UniformMatroid {
    pub fn new(n: usize, rank: usize) -> Result<Self> {
        if rank > n {
            return invalid(format!("uniform rank {rank} exceeds ground size {n}"));
        }
        Ok(Self { n, rank })
    }

    /// The free matroid: every subset is independent.
    pub fn free(n: usize) -> Self {
        Self { n, rank: n }
    }

    pub fn rank_bound(&self) -> usize {
        self.rank
    }
}

impl Matroid for UniformMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn independent(&self, set: &ElementSet) -> bool {
        set.len() <= self.rank
    }
}

/// Disjoint blocks covering the ground set, each with a capacity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionMatroid {
    blocks: Vec<Vec<ElementId>>,
    capacities: Vec<usize>,
    block_of: Vec<usize>,
}

impl PartitionMatroid {
    /// Blocks must partition `[0, n)` where `n` is the total block size.
    pub fn new(blocks: Vec<Vec<ElementId>>, capacities: Vec<usize>) -> Result<Self> {
        if blocks.len() != capacities.len() {
            return Err(Error::LengthMismatch {
                expected: blocks.len(),
                got: capacities.len(),
            });
        }
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &e in block {
                if e >= n {
                    return Err(Error::OutOfRange { element: e, size: n });
                }
                if block_of[e] != usize::MAX {
                    return invalid(format!("element {e} appears in two blocks"));
                }
                block_of[e] = b;
            }
        }
        Ok(Self {
            blocks,
            capacities,
            block_of,
        })
    }

    /// Consecutive blocks of the given sizes.
    pub fn with_block_sizes(sizes: &[usize], capacities: Vec<usize>) -> Result<Self> {
        let mut next = 0;
        let blocks = sizes
            .iter()
            .map(|&s| {
                let block: Vec<_> = (next..next + s).collect();
                next += s;
                block
            })
            .collect();
        Self::new(blocks, capacities)
    }

    pub fn blocks(&self) -> &[Vec<ElementId>] {
        &self.blocks
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }
}

impl Matroid for PartitionMatroid {
    fn ground_size(&self) -> usize {
        self.block_of.len()
    }
    fn independent(&self, set: &ElementSet) -> bool {
        let mut used: SmallVec<[usize; 16]> = smallvec![0; self.blocks.len()];
        for e in set {
            let b = self.block_of[e];
            used[b] += 1;
            if used[b] > self.capacities[b] {
                return false;
            }
        }
        true
    }
}

/// Cycle matroid of a multigraph. Self-loops are matroid loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphicMatroid {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphicMatroid {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(u, v) in &edges {
            let w = u.max(v);
            if w >= vertices {
                return invalid(format!("edge endpoint {w} outside {vertices} vertices"));
            }
        }
        Ok(Self { vertices, edges })
    }

    /// The complete graph on `vertices` vertices, edges in lexicographic order.
    pub fn complete(vertices: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..vertices {
            for v in u + 1..vertices {
                edges.push((u, v));
            }
        }
        Self { vertices, edges }
    }

    /// `K_{left,right}` with edge `i * right + j` joining left `i` to right `j`.
    pub fn complete_bipartite(left: usize, right: usize) -> Self {
        let mut edges = Vec::with_capacity(left * right);
        for i in 0..left {
            for j in 0..right {
                edges.push((i, left + j));
            }
        }
        Self {
            vertices: left + right,
            edges,
        }
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let up = parent[parent[x as usize] as usize];
        parent[x as usize] = up;
        x = up;
    }
    x
}

impl Matroid for GraphicMatroid {
    fn ground_size(&self) -> usize {
        self.edges.len()
    }
    fn independent(&self, set: &ElementSet) -> bool {
        let mut parent: SmallVec<[u32; 64]> = (0..self.vertices as u32).collect();
        for e in set {
            let (u, v) = self.edges[e];
            let (ru, rv) = (find(&mut parent, u as u32), find(&mut parent, v as u32));
            if ru == rv {
                return false;
            }
            parent[ru as usize] = rv;
        }
        true
    }
}

/// `M|S`, relabelled so that element `i` is parent element `elements[i]`.
#[derive(Clone, Debug)]
pub struct Restriction<M> {
    parent: M,
    elements: Vec<ElementId>,
}

impl<M: Matroid> Restriction<M> {
    pub fn new(parent: M, subset: &ElementSet) -> Result<Self> {
        parent.check_set(subset)?;
        Ok(Self {
            elements: subset.to_vec(),
            parent,
        })
    }

    pub fn parent(&self) -> &M {
        &self.parent
    }

    /// Parent id of each local element.
    pub fn parent_ids(&self) -> &[ElementId] {
        &self.elements
    }

    pub fn to_parent(&self, set: &ElementSet) -> ElementSet {
        let mut out = self.parent.empty_set();
        for e in set {
            out.insert(self.elements[e]);
        }
        out
    }
}

impl<M: Matroid> Matroid for Restriction<M> {
    fn ground_size(&self) -> usize {
        self.elements.len()
    }
    fn independent(&self, set: &ElementSet) -> bool {
        self.parent.independent(&self.to_parent(set))
    }
}

/// `M/S` on the complement of `S`, relabelled in ascending parent order.
///
/// `I` is independent iff `I` together with a fixed basis of `S` is
/// independent in the parent.
#[derive(Clone, Debug)]
pub struct Contraction<M> {
    parent: M,
    elements: Vec<ElementId>,
    contracted: ElementSet,
    contracted_basis: ElementSet,
}

impl<M: Matroid> Contraction<M> {
    pub fn new(parent: M, contracted: &ElementSet) -> Result<Self> {
        parent.check_set(contracted)?;
        let elements = parent.ground_set().difference(contracted).to_vec();
        let contracted_basis = parent.basis_of(contracted);
        Ok(Self {
            parent,
            elements,
            contracted: contracted.clone(),
            contracted_basis,
        })
    }

    pub fn parent(&self) -> &M {
        &self.parent
    }

    pub fn parent_ids(&self) -> &[ElementId] {
        &self.elements
    }

    pub fn contracted(&self) -> &ElementSet {
        &self.contracted
    }

    pub fn to_parent(&self, set: &ElementSet) -> ElementSet {
        let mut out = self.parent.empty_set();
        for e in set {
            out.insert(self.elements[e]);
        }
        out
    }
}

impl<M: Matroid> Matroid for Contraction<M> {
    fn ground_size(&self) -> usize {
        self.elements.len()
    }
    fn independent(&self, set: &ElementSet) -> bool {
        let mut lifted = self.to_parent(set);
        lifted.union_with(&self.contracted_basis);
        self.parent.independent(&lifted)
    }
}

/// Disjoint union; part `p` occupies a consecutive id range.
#[derive(Clone, Debug)]
pub struct DirectSum<M> {
    parts: Vec<M>,
    offsets: Vec<usize>,
}

impl<M: Matroid> DirectSum<M> {
    pub fn new(parts: Vec<M>) -> Self {
        let mut offsets = Vec::with_capacity(parts.len() + 1);
        let mut total = 0;
        offsets.push(0);
        for p in &parts {
            total += p.ground_size();
            offsets.push(total);
        }
        Self { parts, offsets }
    }

    pub fn parts(&self) -> &[M] {
        &self.parts
    }

    /// First global id of part `p`.
    pub fn offset(&self, p: usize) -> usize {
        self.offsets[p]
    }
}

impl<M: Matroid> Matroid for DirectSum<M> {
    fn ground_size(&self) -> usize {
        *self.offsets.last().expect("offsets start with zero")
    }
    fn independent(&self, set: &ElementSet) -> bool {
        self.parts.iter().enumerate().all(|(p, part)| {
            let (lo, hi) = (self.offsets[p], self.offsets[p + 1]);
            let mut local = ElementSet::empty(hi - lo);
            for e in set.iter().filter(|&e| e >= lo && e < hi) {
                local.insert(e - lo);
            }
            part.independent(&local)
        })
    }
}

/// Closed set of built-in families, buildable from a [`MatroidSpec`].
#[derive(Clone, Debug)]
pub enum ConcreteMatroid {
    Uniform(UniformMatroid),
    Partition(PartitionMatroid),
    Graphic(GraphicMatroid),
    Restriction(Box<Restriction<ConcreteMatroid>>),
    Contraction(Box<Contraction<ConcreteMatroid>>),
    DirectSum(DirectSum<ConcreteMatroid>),
}

impl ConcreteMatroid {
    pub fn from_spec(spec: &MatroidSpec) -> Result<Self> {
        spec.build()
    }

    pub fn restrict(self, subset: &ElementSet) -> Result<Self> {
        Ok(Self::Restriction(Box::new(Restriction::new(self, subset)?)))
    }

    pub fn contract(self, subset: &ElementSet) -> Result<Self> {
        Ok(Self::Contraction(Box::new(Contraction::new(self, subset)?)))
    }

    pub fn to_spec(&self) -> MatroidSpec {
        match self {
            Self::Uniform(u) => MatroidSpec::Uniform {
                n: u.ground_size(),
                rank: u.rank_bound(),
            },
            Self::Partition(p) => MatroidSpec::Partition {
                blocks: p.blocks().to_vec(),
                capacities: p.capacities().to_vec(),
            },
            Self::Graphic(g) => MatroidSpec::Graphic {
                vertices: g.vertices(),
                edges: g.edges().to_vec(),
            },
            Self::Restriction(r) => MatroidSpec::Restriction {
                parent: Box::new(r.parent().to_spec()),
                elements: r.parent_ids().to_vec(),
            },
            Self::Contraction(c) => MatroidSpec::Contraction {
                parent: Box::new(c.parent().to_spec()),
                elements: c.contracted().to_vec(),
            },
            Self::DirectSum(d) => MatroidSpec::DirectSum {
                parts: d.parts().iter().map(Self::to_spec).collect(),
            },
        }
    }
}

impl From<UniformMatroid> for ConcreteMatroid {
    fn from(m: UniformMatroid) -> Self {
        Self::Uniform(m)
    }
}

impl From<PartitionMatroid> for ConcreteMatroid {
    fn from(m: PartitionMatroid) -> Self {
        Self::Partition(m)
    }
}

impl From<GraphicMatroid> for ConcreteMatroid {
    fn from(m: GraphicMatroid) -> Self {
        Self::Graphic(m)
    }
}

impl Matroid for ConcreteMatroid {
    fn ground_size(&self) -> usize {
        match self {
            Self::Uniform(m) => m.ground_size(),
            Self::Partition(m) => m.ground_size(),
            Self::Graphic(m) => m.ground_size(),
            Self::Restriction(m) => m.ground_size(),
            Self::Contraction(m) => m.ground_size(),
            Self::DirectSum(m) => m.ground_size(),
        }
    }
    fn independent(&self, set: &ElementSet) -> bool {
        match self {
            Self::Uniform(m) => m.independent(set),
            Self::Partition(m) => m.independent(set),
            Self::Graphic(m) => m.independent(set),
            Self::Restriction(m) => m.independent(set),
            Self::Contraction(m) => m.independent(set),
            Self::DirectSum(m) => m.independent(set),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_subsets(n: usize) -> impl Iterator<Item = ElementSet> {
        (0u64..1 << n).map(move |m| ElementSet::from_mask(n, m))
    }

    #[test]
    fn contraction_of_uniform_is_uniform() {
        let u = UniformMatroid::new(4, 2).unwrap();
        let c = Contraction::new(&u, &ElementSet::from_indices(4, [0]).unwrap()).unwrap();
        let expect = UniformMatroid::new(3, 1).unwrap();
        for s in all_subsets(3) {
            assert_eq!(c.independent(&s), expect.independent(&s));
        }
    }

    #[test]
    fn contraction_by_empty_is_identity() {
        let g = GraphicMatroid::complete(4);
        let c = Contraction::new(&g, &g.empty_set()).unwrap();
        for s in all_subsets(6) {
            assert_eq!(c.independent(&s), g.independent(&s));
        }
    }

    #[test]
    fn restriction_to_single_edge_is_free() {
        let g = GraphicMatroid::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let r = Restriction::new(&g, &ElementSet::from_indices(3, [0]).unwrap()).unwrap();
        assert_eq!(r.ground_size(), 1);
        assert!(r.independent(&r.ground_set()));
    }

    #[test]
    fn partition_validation() {
        assert!(PartitionMatroid::new(vec![vec![0, 1], vec![1]], vec![1, 1]).is_err());
        assert!(PartitionMatroid::new(vec![vec![0, 5]], vec![1]).is_err());
        assert!(PartitionMatroid::new(vec![vec![0]], vec![]).is_err());
        let p = PartitionMatroid::with_block_sizes(&[2, 2, 2], vec![1, 1, 1]).unwrap();
        assert_eq!(p.full_rank(), 3);
    }

    #[test]
    fn graphic_self_loop_and_parallel_edges() {
        let g = GraphicMatroid::new(2, vec![(0, 0), (0, 1), (0, 1)]).unwrap();
        assert_eq!(g.loops().to_vec(), vec![0]);
        assert!(!g.independent(&ElementSet::from_indices(3, [1, 2]).unwrap()));
        assert!(GraphicMatroid::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn direct_sum_splits() {
        let d = DirectSum::new(vec![
            ConcreteMatroid::from(UniformMatroid::new(2, 1).unwrap()),
            ConcreteMatroid::from(UniformMatroid::free(2)),
        ]);
        assert_eq!(d.ground_size(), 4);
        assert!(d.independent(&ElementSet::from_indices(4, [0, 2, 3]).unwrap()));
        assert!(!d.independent(&ElementSet::from_indices(4, [0, 1]).unwrap()));
        assert_eq!(d.full_rank(), 3);
    }

    #[test]
    fn bipartite_layout() {
        let g = GraphicMatroid::complete_bipartite(2, 3);
        assert_eq!(g.ground_size(), 6);
        assert_eq!(g.edges()[4], (1, 3));
        assert_eq!(g.full_rank(), 4);
    }
}
