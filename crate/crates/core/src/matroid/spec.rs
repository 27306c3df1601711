use serde::{Deserialize, Serialize};

use super::families::{
    ConcreteMatroid, Contraction, DirectSum, GraphicMatroid, PartitionMatroid, Restriction,
    UniformMatroid,
};
use crate::error::Result;
use crate::set::{ElementId, ElementSet};
use crate::matroid::Matroid;

/// Serializable description of a [`ConcreteMatroid`].
///
/// ```json
/// {"kind": "graphic", "vertices": 4, "edges": [[0, 1], [1, 2], [2, 3]]}
/// {"kind": "contraction", "parent": {"kind": "uniform", "n": 4, "rank": 2}, "elements": [0]}
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatroidSpec {
    Uniform {
        n: usize,
        #[serde(alias = "r")]
        rank: usize,
    },
    Partition {
        blocks: Vec<Vec<ElementId>>,
        capacities: Vec<usize>,
    },
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    /// Restriction to `elements` (parent ids).
    Restriction {
        parent: Box<MatroidSpec>,
        elements: Vec<ElementId>,
    },
    /// Contraction by `elements` (parent ids).
    Contraction {
        parent: Box<MatroidSpec>,
        elements: Vec<ElementId>,
    },
    DirectSum { parts: Vec<MatroidSpec> },
}

impl MatroidSpec {
    pub fn build(&self) -> Result<ConcreteMatroid> {
        Ok(match self {
            Self::Uniform { n, rank } => UniformMatroid::new(*n, *rank)?.into(),
            Self::Partition { blocks, capacities } => {
                PartitionMatroid::new(blocks.clone(), capacities.clone())?.into()
            }
            Self::Graphic { vertices, edges } => {
                GraphicMatroid::new(*vertices, edges.clone())?.into()
            }
            Self::Restriction { parent, elements } => {
                let parent = parent.build()?;
                let subset = ElementSet::from_indices(parent.ground_size(), elements.iter().copied())?;
                ConcreteMatroid::Restriction(Box::new(Restriction::new(parent, &subset)?))
            }
            Self::Contraction { parent, elements } => {
                let parent = parent.build()?;
                let subset = ElementSet::from_indices(parent.ground_size(), elements.iter().copied())?;
                ConcreteMatroid::Contraction(Box::new(Contraction::new(parent, &subset)?))
            }
            Self::DirectSum { parts } => ConcreteMatroid::DirectSum(DirectSum::new(
                parts.iter().map(Self::build).collect::<Result<_>>()?,
            )),
        })
    }
}
