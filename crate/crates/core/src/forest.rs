//! Rainbow linear forests and the deletion-set reduction.
//!
//! The reduction keeps one endpoint of every nontrivial component that does
//! not contain a terminal, deletes the remaining forest vertices (terminals
//! included) together with the forest's colors, and leaves a collection whose
//! Ore sums drop by at most `2(k + 2)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::Edge;
use crate::model::{sigma2_of, Color, GraphCollection, Vertex};

/// Vertex-disjoint paths with a fixed injective coloring of their edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RainbowLinearForest {
    components: Vec<Vec<Vertex>>,
    colors: BTreeMap<Edge, Color>,
}

impl RainbowLinearForest {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Checks the structural invariants: nonempty disjoint vertex paths, and a
    /// coloring that covers exactly the path edges and is injective.
    pub fn new(components: Vec<Vec<Vertex>>, colors: BTreeMap<Edge, Color>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (i, comp) in components.iter().enumerate() {
            if comp.is_empty() {
                return Err(Error::Input(format!("forest component {i} is empty")));
            }
            for &x in comp {
                if seen.insert(x, i).is_some() {
                    return Err(Error::Input(format!("vertex {x} appears twice in the forest")));
                }
            }
        }
        let edges: Vec<Edge> = components
            .iter()
            .flat_map(|c| c.windows(2).map(|w| Edge::new(w[0], w[1])))
            .collect();
        if edges.len() != colors.len() || edges.iter().any(|e| !colors.contains_key(e)) {
            return Err(Error::Input(
                "forest colors must cover exactly the forest edges".into(),
            ));
        }
        let f = RainbowLinearForest { components, colors };
        let mut used: Vec<Color> = f.colors.values().copied().collect();
        used.sort_unstable();
        if used.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Input("forest coloring is not injective".into()));
        }
        Ok(f)
    }

    /// Builds a forest from vertex paths and one color per edge, in path order.
    pub fn from_colored_paths(paths: &[&[Vertex]], colors: &[Color]) -> Result<Self> {
        let comps: Vec<Vec<Vertex>> = paths.iter().map(|p| p.to_vec()).collect();
        let edges: Vec<Edge> = comps
            .iter()
            .flat_map(|c| c.windows(2).map(|w| Edge::new(w[0], w[1])))
            .collect();
        if edges.len() != colors.len() {
            return Err(Error::Input("one color per forest edge is required".into()));
        }
        Self::new(comps, edges.into_iter().zip(colors.iter().copied()).collect())
    }

    /// Every edge lies in the graph of its fixed color and all vertices are in range.
    pub fn validate_against(&self, collection: &GraphCollection) -> Result<()> {
        let n = collection.vertex_count();
        if let Some(&x) = self.components.iter().flatten().find(|&&x| x >= n) {
            return Err(Error::Input(format!("forest vertex {x} out of range")));
        }
        for (&e, &c) in &self.colors {
            if c >= collection.color_count() || !collection.graph(c).contains(e) {
                return Err(Error::Input(format!("forest edge {e} is absent from color {c}")));
            }
        }
        Ok(())
    }

    pub fn components(&self) -> &[Vec<Vertex>] {
        &self.components
    }

    pub fn edge_count(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn colored_edges(&self) -> impl Iterator<Item = (Edge, Color)> + '_ {
        self.colors.iter().map(|(&e, &c)| (e, c))
    }

    pub fn color_of(&self, e: Edge) -> Option<Color> {
        self.colors.get(&e).copied()
    }

    pub fn used_colors(&self) -> Vec<Color> {
        let mut c: Vec<Color> = self.colors.values().copied().collect();
        c.sort_unstable();
        c
    }

    pub fn component_of(&self, x: Vertex) -> Option<usize> {
        self.components.iter().position(|c| c.contains(&x))
    }

    pub fn degree(&self, x: Vertex) -> usize {
        self.components
            .iter()
            .find_map(|c| {
                let p = c.iter().position(|&y| y == x)?;
                Some(usize::from(p > 0) + usize::from(p + 1 < c.len()))
            })
            .unwrap_or(0)
    }

    /// Vertices of nontrivial components, sorted.
    pub fn covered_vertices(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = self
            .components
            .iter()
            .filter(|c| c.len() > 1)
            .flatten()
            .copied()
            .collect();
        v.sort_unstable();
        v
    }

    /// `u, v` both have forest degree at most one and lie in different
    /// components; a vertex outside the forest is its own component.
    pub fn is_h_compatible(&self, u: Vertex, v: Vertex) -> bool {
        if u == v || self.degree(u) > 1 || self.degree(v) > 1 {
            return false;
        }
        match (self.component_of(u), self.component_of(v)) {
            (Some(a), Some(b)) => a != b,
            _ => true,
        }
    }
}

/// Bookkeeping for the deletion-set reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionPlan {
    pub n: usize,
    pub k: usize,
    pub u: Vertex,
    pub v: Vertex,
    /// Component of `u`, oriented `u, .., w_u` (a singleton when `u` is outside the forest).
    pub terminal_u: Vec<Vertex>,
    /// Component of `v`, oriented `v, .., w_v`.
    pub terminal_v: Vec<Vertex>,
    /// Remaining nontrivial components, each oriented `v_i, .., w_i`, sorted by minimum vertex.
    pub inner: Vec<Vec<Vertex>>,
    /// The deletion set, sorted.
    pub deleted: Vec<Vertex>,
    /// Surviving vertices, sorted; position is the reduced vertex id.
    pub kept: Vec<Vertex>,
    /// Colors fixed by the forest, sorted.
    pub forest_colors: Vec<Color>,
}

impl ReductionPlan {
    pub fn q(&self) -> usize {
        self.inner.len()
    }

    /// `v_1, .., v_q`.
    pub fn kept_endpoints(&self) -> Vec<Vertex> {
        self.inner.iter().map(|c| c[0]).collect()
    }

    /// `w_1, .., w_q, w_u, w_v`.
    pub fn dropped_endpoints(&self) -> Vec<Vertex> {
        let mut w: Vec<Vertex> = self.inner.iter().map(|c| *c.last().unwrap()).collect();
        w.push(*self.terminal_u.last().unwrap());
        w.push(*self.terminal_v.last().unwrap());
        w
    }

    /// Colors not fixed by the forest, sorted.
    pub fn free_colors(&self) -> Vec<Color> {
        (0..self.n)
            .filter(|c| self.forest_colors.binary_search(c).is_err())
            .collect()
    }
}

fn oriented_from(comp: &[Vertex], start: Vertex) -> Vec<Vertex> {
    if comp[0] == start {
        comp.to_vec()
    } else {
        comp.iter().rev().copied().collect()
    }
}

/// Builds the deletion set for an `H`-compatible pair.
pub fn select_deletion_set(
    forest: &RainbowLinearForest,
    u: Vertex,
    v: Vertex,
    n: usize,
) -> Result<ReductionPlan> {
    if u >= n || v >= n {
        return Err(Error::Input(format!("terminal out of range (n = {n})")));
    }
    if !forest.is_h_compatible(u, v) {
        return Err(Error::Contract(format!("{u}, {v} is not a compatible pair for the forest")));
    }
    let terminal = |x: Vertex| match forest.component_of(x) {
        Some(i) => oriented_from(&forest.components()[i], x),
        None => vec![x],
    };
    let terminal_u = terminal(u);
    let terminal_v = terminal(v);
    let mut inner: Vec<Vec<Vertex>> = forest
        .components()
        .iter()
        .filter(|c| c.len() > 1 && !c.contains(&u) && !c.contains(&v))
        .map(|c| {
            let (a, b) = (c[0], *c.last().unwrap());
            oriented_from(c, a.min(b))
        })
        .collect();
    inner.sort_by_key(|c| *c.iter().min().unwrap());

    let mut deleted: Vec<Vertex> = terminal_u
        .iter()
        .chain(&terminal_v)
        .chain(inner.iter().flat_map(|c| &c[1..]))
        .copied()
        .collect();
    deleted.sort_unstable();
    let k = forest.edge_count();
    if deleted.len() != k + 2 || deleted.len() > n {
        return Err(Error::internal(format!(
            "deletion set has {} vertices, expected k + 2 = {}",
            deleted.len(),
            k + 2
        )));
    }
    let kept = (0..n).filter(|x| deleted.binary_search(x).is_err()).collect();
    Ok(ReductionPlan {
        n,
        k,
        u,
        v,
        terminal_u,
        terminal_v,
        inner,
        deleted,
        kept,
        forest_colors: forest.used_colors(),
    })
}

/// The collection after deleting the deletion set and the forest's colors.
#[derive(Clone, Debug)]
pub struct ReducedCollection {
    pub collection: GraphCollection,
    /// Reduced vertex id to original vertex.
    pub vertex_map: Vec<Vertex>,
    /// Reduced color id to original color.
    pub color_map: Vec<Color>,
}

/// Deletes the plan's vertex set and forest colors, then asserts that every
/// remaining color has Ore sum at least `|V'| - 2`.
pub fn reduce_collection(collection: &GraphCollection, plan: &ReductionPlan) -> Result<ReducedCollection> {
    let colors: Vec<Color> = (0..collection.color_count())
        .filter(|c| plan.forest_colors.binary_search(c).is_err())
        .collect();
    let reduced = collection.restrict(&plan.kept, &colors);
    let bound = plan.kept.len().saturating_sub(2);
    for (i, g) in reduced.graphs().iter().enumerate() {
        let s = sigma2_of(g);
        if !s.at_least(bound) {
            return Err(Error::internal(format!(
                "reduced color {} has Ore sum {s} < {bound}; the input violates the degree hypothesis",
                colors[i]
            )));
        }
    }
    Ok(ReducedCollection {
        collection: reduced,
        vertex_map: plan.kept.clone(),
        color_map: colors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn single_edge(a: Vertex, b: Vertex, c: Color) -> RainbowLinearForest {
        RainbowLinearForest::from_colored_paths(&[&[a, b]], &[c]).unwrap()
    }

    #[test]
    fn rejects_malformed_forests() {
        assert!(RainbowLinearForest::from_colored_paths(&[&[0, 1], &[1, 2]], &[0, 1]).is_err());
        assert!(RainbowLinearForest::from_colored_paths(&[&[0, 1], &[2, 3]], &[4, 4]).is_err());
        assert!(RainbowLinearForest::from_colored_paths(&[&[0, 1, 2]], &[4]).is_err());
    }

    #[test]
    fn compatibility_examples() {
        assert!(single_edge(5, 6, 0).is_h_compatible(0, 1));
        let p = RainbowLinearForest::from_colored_paths(&[&[0, 2, 1]], &[0, 1]).unwrap();
        assert!(!p.is_h_compatible(0, 1));
        assert!(!p.is_h_compatible(2, 3));
        let two = RainbowLinearForest::from_colored_paths(&[&[0, 2], &[1, 3]], &[0, 1]).unwrap();
        assert!(two.is_h_compatible(0, 1));
        assert!(!two.is_h_compatible(0, 2));
        assert!(!RainbowLinearForest::empty().is_h_compatible(3, 3));
    }

    #[test]
    fn deletion_set_single_edge() {
        let plan = select_deletion_set(&single_edge(5, 6, 6), 0, 1, 7).unwrap();
        assert_eq!(plan.deleted, vec![0, 1, 6]);
        assert_eq!(plan.kept_endpoints(), vec![5]);
        assert_eq!(plan.dropped_endpoints(), vec![6, 0, 1]);
        assert_eq!(plan.kept, vec![2, 3, 4, 5]);
    }

    #[test]
    fn deletion_set_empty_forest() {
        let plan = select_deletion_set(&RainbowLinearForest::empty(), 0, 1, 5).unwrap();
        assert_eq!(plan.deleted, vec![0, 1]);
        assert_eq!(plan.q(), 0);
        assert_eq!(plan.terminal_u, vec![0]);
    }

    #[test]
    fn deletion_set_two_components() {
        let h = RainbowLinearForest::from_colored_paths(&[&[2, 3, 4], &[5, 6]], &[7, 8, 9]).unwrap();
        let plan = select_deletion_set(&h, 0, 1, 10).unwrap();
        assert_eq!(plan.deleted.len(), 5);
        assert_eq!(plan.q(), 2);
        assert_eq!(plan.kept_endpoints(), vec![2, 5]);
        assert_eq!(plan.inner[0], vec![2, 3, 4]);
    }

    #[test]
    fn terminal_components_are_oriented_from_the_terminal() {
        let h = RainbowLinearForest::from_colored_paths(&[&[7, 0], &[1, 8, 9]], &[0, 1, 2]).unwrap();
        let plan = select_deletion_set(&h, 0, 1, 12).unwrap();
        assert_eq!(plan.terminal_u, vec![0, 7]);
        assert_eq!(plan.terminal_v, vec![1, 8, 9]);
        assert_eq!(plan.deleted, vec![0, 1, 7, 8, 9]);
    }

    #[test]
    fn incompatible_pair_is_a_contract_error() {
        let p = RainbowLinearForest::from_colored_paths(&[&[0, 2, 1]], &[0, 1]).unwrap();
        assert!(matches!(select_deletion_set(&p, 0, 1, 5), Err(Error::Contract(_))));
    }

    #[test]
    fn reduce_complete_collection() {
        let c = GraphCollection::identical(Graph::complete(7), 7);
        let plan = select_deletion_set(&single_edge(5, 6, 6), 0, 1, 7).unwrap();
        let r = reduce_collection(&c, &plan).unwrap();
        assert_eq!(r.collection.color_count(), 6);
        assert_eq!(r.collection.vertex_count(), 4);
        assert_eq!(r.color_map, vec![0, 1, 2, 3, 4, 5]);
        assert!(r.collection.graphs().iter().all(|g| g.edge_count() == 6));
    }
}
