//! Extremal structures: detection, certificate verification, and the rainbow
//! Hamiltonian cycles that the blocked-pair structures always carry.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::RainbowLinearForest;
use crate::graph::{Edge, Graph};
use crate::model::{rainbow_assignment, Color, CycleCertificate, GraphCollection, Vertex};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtremalKind {
    /// All colors identical, each a disjoint union of two cliques.
    A2p,
    /// A side of size `n/2 + 1` independent in every color.
    A3p,
    /// Blocked pair: two cliques joined only through `u` and `v`.
    B2,
    /// Blocked pair: both terminals on one side of a balanced complete bipartite split.
    B3,
    /// Forest version of `B2`, constraining only colors the forest leaves unused.
    C2,
    /// Forest version of `B3` with an independent small side.
    C3,
}

impl fmt::Display for ExtremalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalCertificate {
    pub kind: ExtremalKind,
    #[serde(rename = "X")]
    pub x: Vec<Vertex>,
    #[serde(rename = "Y")]
    pub y: Vec<Vertex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<[Vertex; 2]>,
}

impl ExtremalCertificate {
    pub fn new(kind: ExtremalKind, mut x: Vec<Vertex>, mut y: Vec<Vertex>) -> Self {
        x.sort_unstable();
        y.sort_unstable();
        ExtremalCertificate {
            kind,
            x,
            y,
            l: None,
            pair: None,
        }
    }

    pub fn with_pair(mut self, u: Vertex, v: Vertex) -> Self {
        self.pair = Some([u, v]);
        self
    }

    /// The same structure under the pair-only name (`C2` to `B2`, `C3` to `B3`).
    pub fn retag_for_pair(mut self) -> Self {
        self.kind = match self.kind {
            ExtremalKind::C2 => ExtremalKind::B2,
            ExtremalKind::C3 => ExtremalKind::B3,
            k => k,
        };
        self
    }
}

/// The clique split `(l, X, Y)` when every color is the same disjoint union of
/// two nonempty cliques covering all vertices. `X` holds vertex 0.
pub fn detect_identical_split(collection: &GraphCollection) -> Option<(usize, Vec<Vertex>, Vec<Vertex>)> {
    let first = collection.graphs().first()?;
    if collection.graphs().iter().any(|g| g != first) {
        return None;
    }
    let comps = first.components();
    if comps.len() != 2 || !comps.iter().all(|c| first.is_clique(c)) {
        return None;
    }
    let x = comps[0].clone();
    Some((x.len(), x, comps[1].clone()))
}

/// A split with `|Y| = n/2 + 1` and `Y` independent in every color, taking the
/// lexicographically smallest such `Y`.
pub fn detect_independent_heavy_side(collection: &GraphCollection) -> Option<(Vec<Vertex>, Vec<Vertex>)> {
    let n = collection.vertex_count();
    if n % 2 == 1 || n == 0 {
        return None;
    }
    let want = n / 2 + 1;
    let union = collection.union_graph();
    // a vertex of Y sees only X, so its union degree is at most n/2 - 1
    let cands: Vec<Vertex> = (0..n).filter(|&x| union.degree(x) < n / 2).collect();
    if cands.len() < want {
        return None;
    }
    let mut chosen = Vec::with_capacity(want);
    if !independent_extend(&union, &cands, 0, want, &mut chosen) {
        return None;
    }
    let x = (0..n).filter(|v| !chosen.contains(v)).collect();
    Some((x, chosen))
}

fn independent_extend(g: &Graph, cands: &[Vertex], from: usize, want: usize, chosen: &mut Vec<Vertex>) -> bool {
    if chosen.len() == want {
        return true;
    }
    for i in from..cands.len() {
        if cands.len() - i < want - chosen.len() {
            return false;
        }
        let c = cands[i];
        if chosen.iter().all(|&y| !g.has_edge(c, y)) {
            chosen.push(c);
            if independent_extend(g, cands, i + 1, want, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

fn check_partition(n: usize, parts: &[&[Vertex]], excluded: &[Vertex]) -> Result<()> {
    let mut seen = vec![false; n];
    for &x in excluded {
        if x >= n || std::mem::replace(&mut seen[x], true) {
            return Err(Error::Input(format!("certificate vertex {x} repeated or out of range")));
        }
    }
    for part in parts {
        for &x in *part {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Input(format!("certificate vertex {x} repeated or out of range")));
            }
        }
    }
    if let Some(x) = seen.iter().position(|s| !s) {
        return Err(Error::Input(format!("certificate does not cover vertex {x}")));
    }
    Ok(())
}

fn complete_between(g: &Graph, a: &[Vertex], b: &[Vertex]) -> bool {
    a.iter().all(|&x| b.iter().all(|&y| g.has_edge(x, y)))
}

fn empty_between(g: &Graph, a: &[Vertex], b: &[Vertex]) -> bool {
    a.iter().all(|&x| b.iter().all(|&y| !g.has_edge(x, y)))
}

fn pair_of(cert: &ExtremalCertificate) -> Result<[Vertex; 2]> {
    match cert.pair {
        Some([u, v]) if u != v => Ok([u, v]),
        _ => Err(Error::Input(format!("{} certificate needs a pair of distinct terminals", cert.kind))),
    }
}

/// Checks every clause of the certificate's kind against the collection. The
/// forest matters only for `C2`/`C3`, which constrain the colors it leaves unused.
pub fn verify_certificate(
    collection: &GraphCollection,
    forest: &RainbowLinearForest,
    cert: &ExtremalCertificate,
) -> Result<bool> {
    let n = collection.vertex_count();
    let (x, y) = (&cert.x[..], &cert.y[..]);
    let all: Vec<Color> = (0..collection.color_count()).collect();
    let graphs = |colors: &[Color]| -> Vec<&Graph> { colors.iter().map(|&c| collection.graph(c)).collect() };
    match cert.kind {
        ExtremalKind::A2p => {
            check_partition(n, &[x, y], &[])?;
            let first = match collection.graphs().first() {
                Some(g) => g,
                None => return Ok(false),
            };
            Ok(!x.is_empty()
                && !y.is_empty()
                && cert.l.is_none_or(|l| l == x.len())
                && collection.graphs().iter().all(|g| g == first)
                && first.is_clique(x)
                && first.is_clique(y)
                && empty_between(first, x, y))
        }
        ExtremalKind::A3p => {
            check_partition(n, &[x, y], &[])?;
            Ok(n.is_multiple_of(2)
                && x.len() + 1 == n / 2
                && y.len() == n / 2 + 1
                && collection.graphs().iter().all(|g| g.is_independent(y)))
        }
        ExtremalKind::B2 => {
            let [u, v] = pair_of(cert)?;
            check_partition(n, &[x, y], &[u, v])?;
            let xy: Vec<Vertex> = x.iter().chain(y).copied().collect();
            Ok(!x.is_empty()
                && !y.is_empty()
                && graphs(&all).iter().all(|g| {
                    g.is_clique(x)
                        && g.is_clique(y)
                        && empty_between(g, x, y)
                        && complete_between(g, &[u, v], &xy)
                }))
        }
        ExtremalKind::B3 => {
            let [u, v] = pair_of(cert)?;
            check_partition(n, &[x, y], &[])?;
            Ok(n.is_multiple_of(2)
                && x.len() == n / 2
                && y.len() == n / 2
                && x.contains(&u)
                && x.contains(&v)
                && graphs(&all).iter().all(|g| complete_between(g, x, y)))
        }
        ExtremalKind::C2 => {
            let [u, v] = pair_of(cert)?;
            if !forest.is_h_compatible(u, v) {
                return Ok(false);
            }
            // exactly the two terminal components
            if forest
                .components()
                .iter()
                .any(|c| c.len() > 1 && !c.contains(&u) && !c.contains(&v))
            {
                return Ok(false);
            }
            let mut hv = forest.covered_vertices();
            for t in [u, v] {
                if !hv.contains(&t) {
                    hv.push(t);
                }
            }
            check_partition(n, &[x, y], &hv)?;
            let xy: Vec<Vertex> = x.iter().chain(y).copied().collect();
            let unused = unused_colors(collection, forest);
            Ok(!x.is_empty()
                && !y.is_empty()
                && graphs(&unused).iter().all(|g| {
                    g.is_clique(x) && g.is_clique(y) && empty_between(g, x, y) && complete_between(g, &hv, &xy)
                }))
        }
        ExtremalKind::C3 => {
            check_partition(n, &[x, y], &[])?;
            let k = forest.edge_count();
            let mut hv = forest.covered_vertices();
            if let Some([u, v]) = cert.pair {
                hv.extend([u, v]);
            }
            let unused = unused_colors(collection, forest);
            Ok((n + k).is_multiple_of(2)
                && 2 * x.len() == n + k
                && 2 * y.len() + k == n
                && hv.iter().all(|h| x.contains(h))
                && graphs(&unused)
                    .iter()
                    .all(|g| complete_between(g, x, y) && g.is_independent(y)))
        }
    }
}

fn unused_colors(collection: &GraphCollection, forest: &RainbowLinearForest) -> Vec<Color> {
    let used = forest.used_colors();
    (0..collection.color_count())
        .filter(|c| used.binary_search(c).is_err())
        .collect()
}

/// The rainbow Hamiltonian cycle carried by a verified `B2` or `B3` structure.
pub fn cycle_from_extremal(collection: &GraphCollection, cert: &ExtremalCertificate) -> Result<CycleCertificate> {
    if !verify_certificate(collection, &RainbowLinearForest::empty(), cert)? {
        return Err(Error::Contract(format!("{} certificate does not verify", cert.kind)));
    }
    let order: Vec<Vertex> = match cert.kind {
        ExtremalKind::B2 => {
            let [u, v] = pair_of(cert)?;
            std::iter::once(u)
                .chain(cert.x.iter().copied())
                .chain(std::iter::once(v))
                .chain(cert.y.iter().copied())
                .collect()
        }
        ExtremalKind::B3 => cert.x.iter().zip(&cert.y).flat_map(|(&a, &b)| [a, b]).collect(),
        k => return Err(Error::Contract(format!("no cycle construction for {k}"))),
    };
    let n = order.len();
    let edges: Vec<Edge> = (0..n).map(|i| Edge::new(order[i], order[(i + 1) % n])).collect();
    let assignment = rainbow_assignment(collection, &edges, &[])?
        .ok_or_else(|| Error::internal(format!("no rainbow coloring of the {} cycle", cert.kind)))?;
    let colors = edges.iter().map(|&e| assignment.get(e).unwrap()).collect();
    Ok(CycleCertificate { order, colors })
}
