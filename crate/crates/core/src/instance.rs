//! The instance file format.
//!
//! ```json
//! {"n": 4, "m": 4, "graphs": [[[0,1],[0,2]], ...],
//!  "forest": {"components": [[2,3]], "colors": [[2,3,1]]},
//!  "u": 0, "v": 1, "k": 1}
//! ```
//!
//! Edges are written as sorted `[lo, hi]` pairs in ascending order so that a
//! parse/serialize round trip is byte-stable. `forest` is omitted when empty.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::RainbowLinearForest;
use crate::graph::Edge;
use crate::model::{GraphCollection, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestJson {
    pub components: Vec<Vec<usize>>,
    pub colors: Vec<[usize; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub n: usize,
    pub m: usize,
    pub graphs: Vec<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forest: Option<ForestJson>,
    pub u: usize,
    pub v: usize,
    #[serde(default)]
    pub k: usize,
}

/// A collection together with a prescribed forest and terminal pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub collection: GraphCollection,
    pub forest: RainbowLinearForest,
    pub u: Vertex,
    pub v: Vertex,
    pub k: usize,
}

impl Instance {
    pub fn new(collection: GraphCollection, forest: RainbowLinearForest, u: Vertex, v: Vertex) -> Self {
        let k = forest.edge_count();
        Instance {
            collection,
            forest,
            u,
            v,
            k,
        }
    }

    /// A bare collection with placeholder terminals `0, 1` and no forest.
    pub fn bare(collection: GraphCollection) -> Self {
        Instance::new(collection, RainbowLinearForest::empty(), 0, 1)
    }

    pub fn to_json(&self) -> InstanceJson {
        let c = &self.collection;
        let forest = (!self.forest.components().is_empty()).then(|| ForestJson {
            components: self.forest.components().to_vec(),
            colors: self
                .forest
                .colored_edges()
                .map(|(e, col)| [e.lo(), e.hi(), col])
                .collect(),
        });
        InstanceJson {
            n: c.vertex_count(),
            m: c.color_count(),
            graphs: c
                .graphs()
                .iter()
                .map(|g| g.edges().map(|e| [e.lo(), e.hi()]).collect())
                .collect(),
            forest,
            u: self.u,
            v: self.v,
            k: self.k,
        }
    }

    pub fn from_json(j: &InstanceJson) -> Result<Instance> {
        if j.graphs.len() != j.m {
            return Err(Error::Input(format!(
                "\"m\" is {} but {} graphs are listed",
                j.m,
                j.graphs.len()
            )));
        }
        let lists: Vec<Vec<(usize, usize)>> = j
            .graphs
            .iter()
            .map(|g| g.iter().map(|&[a, b]| (a, b)).collect())
            .collect();
        let collection = GraphCollection::from_edge_lists(j.n, &lists)?;
        let forest = match &j.forest {
            None => RainbowLinearForest::empty(),
            Some(f) => {
                let mut colors = BTreeMap::new();
                for &[a, b, c] in &f.colors {
                    if a == b {
                        return Err(Error::Input(format!("forest loop at {a}")));
                    }
                    if colors.insert(Edge::new(a, b), c).is_some() {
                        return Err(Error::Input(format!("forest edge {a}-{b} colored twice")));
                    }
                }
                RainbowLinearForest::new(f.components.clone(), colors)?
            }
        };
        forest.validate_against(&collection)?;
        if j.u >= j.n || j.v >= j.n {
            return Err(Error::Input(format!("terminals {}, {} out of range", j.u, j.v)));
        }
        Ok(Instance {
            collection,
            forest,
            u: j.u,
            v: j.v,
            k: j.k,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("instance serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Instance> {
        let j: InstanceJson =
            serde_json::from_str(s).map_err(|e| Error::Input(format!("malformed instance JSON: {e}")))?;
        Instance::from_json(&j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn round_trip_is_byte_stable() {
        let c = GraphCollection::identical(Graph::complete(4), 4);
        let f = RainbowLinearForest::from_colored_paths(&[&[3, 2]], &[1]).unwrap();
        let inst = Instance::new(c, f, 0, 1);
        let s = inst.to_json_string();
        assert_eq!(
            s,
            r#"{"n":4,"m":4,"graphs":[[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]],[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]],[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]],[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]],"forest":{"components":[[3,2]],"colors":[[2,3,1]]},"u":0,"v":1,"k":1}"#
        );
        let back = Instance::from_json_str(&s).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_json_string(), s);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(Instance::from_json_str("{not json").is_err());
        assert!(Instance::from_json_str(r#"{"n":2,"m":1,"graphs":[[[0,0]]],"u":0,"v":1}"#).is_err());
        assert!(Instance::from_json_str(r#"{"n":2,"m":2,"graphs":[[[0,1]]],"u":0,"v":1}"#).is_err());
        assert!(
            Instance::from_json_str(r#"{"n":2,"m":1,"graphs":[[[0,1],[1,0]]],"u":0,"v":1}"#).is_err()
        );
        // forest edge missing from its color
        assert!(Instance::from_json_str(
            r#"{"n":3,"m":1,"graphs":[[[0,1]]],"forest":{"components":[[1,2]],"colors":[[1,2,0]]},"u":0,"v":1}"#
        )
        .is_err());
    }
}
