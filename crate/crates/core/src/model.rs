//! Graph collections, Ore sums, rainbow color assignments and path certificates.
//!
//! A collection is a sequence of `m` simple graphs on the vertex set `0..n`;
//! graph `i` is color `i`. Colors are 0-based everywhere.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::RainbowLinearForest;
use crate::graph::{Edge, Graph};

pub type Vertex = usize;
pub type Color = usize;

/// Ore sum of a graph. `Infinite` when no non-adjacent pair exists.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sigma2 {
    Finite(usize),
    Infinite,
}

impl Sigma2 {
    pub fn at_least(self, bound: usize) -> bool {
        match self {
            Sigma2::Finite(v) => v >= bound,
            Sigma2::Infinite => true,
        }
    }
}

impl fmt::Display for Sigma2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma2::Finite(v) => write!(f, "{v}"),
            Sigma2::Infinite => write!(f, "inf"),
        }
    }
}

/// Minimum of `d(a) + d(b)` over non-adjacent distinct pairs.
pub fn sigma2_of(g: &Graph) -> Sigma2 {
    sigma2_witness(g).map_or(Sigma2::Infinite, |(_, _, s)| Sigma2::Finite(s))
}

/// The lexicographically first non-adjacent pair attaining the Ore sum.
pub fn sigma2_witness(g: &Graph) -> Option<(Vertex, Vertex, usize)> {
    let n = g.vertex_count();
    let deg: Vec<usize> = (0..n).map(|x| g.degree(x)).collect();
    let mut best: Option<(Vertex, Vertex, usize)> = None;
    for a in 0..n {
        for b in a + 1..n {
            if !g.has_edge(a, b) {
                let s = deg[a] + deg[b];
                if best.is_none_or(|(_, _, t)| s < t) {
                    best = Some((a, b, s));
                }
            }
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphCollection {
    n: usize,
    graphs: Vec<Graph>,
}

impl GraphCollection {
    pub fn new(n: usize, graphs: Vec<Graph>) -> Result<GraphCollection> {
        if let Some((i, g)) = graphs.iter().enumerate().find(|(_, g)| g.vertex_count() != n) {
            return Err(Error::Input(format!(
                "color {i} is on {} vertices, expected {n}",
                g.vertex_count()
            )));
        }
        Ok(GraphCollection { n, graphs })
    }

    /// `m` copies of `g`.
    pub fn identical(g: Graph, m: usize) -> GraphCollection {
        GraphCollection {
            n: g.vertex_count(),
            graphs: vec![g; m],
        }
    }

    pub fn from_edge_lists(n: usize, lists: &[Vec<(usize, usize)>]) -> Result<GraphCollection> {
        let graphs = lists
            .iter()
            .enumerate()
            .map(|(i, l)| {
                Graph::from_edges(n, l.iter().copied()).map_err(|(a, b)| {
                    Error::Input(format!("color {i}: bad or repeated edge {a}-{b}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GraphCollection::new(n, graphs)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn color_count(&self) -> usize {
        self.graphs.len()
    }

    pub fn graph(&self, color: Color) -> &Graph {
        &self.graphs[color]
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn graph_mut(&mut self, color: Color) -> &mut Graph {
        &mut self.graphs[color]
    }

    pub fn into_graphs(self) -> Vec<Graph> {
        self.graphs
    }

    fn check_color(&self, color: Color) -> Result<()> {
        if color >= self.graphs.len() {
            return Err(Error::Input(format!(
                "color {color} out of range (m = {})",
                self.graphs.len()
            )));
        }
        Ok(())
    }

    fn check_vertex(&self, x: Vertex) -> Result<()> {
        if x >= self.n {
            return Err(Error::Input(format!("vertex {x} out of range (n = {})", self.n)));
        }
        Ok(())
    }

    pub fn degree(&self, color: Color, x: Vertex) -> Result<usize> {
        self.check_color(color)?;
        self.check_vertex(x)?;
        Ok(self.graphs[color].degree(x))
    }

    pub fn sigma2(&self, color: Color) -> Result<Sigma2> {
        self.check_color(color)?;
        Ok(sigma2_of(&self.graphs[color]))
    }

    /// Whether every color has Ore sum at least `n + k`. Requires exactly `n` colors.
    pub fn check_hypothesis(&self, k: usize) -> Result<bool> {
        if self.graphs.len() != self.n {
            return Err(Error::Shape {
                expected: self.n,
                found: self.graphs.len(),
            });
        }
        let bound = self.n + k;
        Ok(self.graphs.iter().all(|g| sigma2_of(g).at_least(bound)))
    }

    pub fn has_edge(&self, color: Color, a: Vertex, b: Vertex) -> bool {
        self.graphs[color].has_edge(a, b)
    }

    /// Colors whose graph contains `e`.
    pub fn colors_of(&self, e: Edge) -> impl Iterator<Item = Color> + '_ {
        (0..self.graphs.len()).filter(move |&c| self.graphs[c].contains(e))
    }

    /// The graph whose edges appear in at least one color.
    pub fn union_graph(&self) -> Graph {
        let mut u = Graph::empty(self.n);
        for g in &self.graphs {
            u.union_with(g);
        }
        u
    }

    /// Restricts to `colors` (in the given order) and `vertices` (relabelled in the given order).
    pub fn restrict(&self, vertices: &[Vertex], colors: &[Color]) -> GraphCollection {
        GraphCollection {
            n: vertices.len(),
            graphs: colors.iter().map(|&c| self.graphs[c].induced(vertices)).collect(),
        }
    }
}

/// Map from edges to colors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ColorAssignment(pub BTreeMap<Edge, Color>);

impl ColorAssignment {
    pub fn get(&self, e: Edge) -> Option<Color> {
        self.0.get(&e).copied()
    }

    pub fn is_injective(&self) -> bool {
        let mut seen: Vec<Color> = self.0.values().copied().collect();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// Injective, and every edge lies in the graph of its color.
    pub fn is_rainbow_in(&self, collection: &GraphCollection) -> bool {
        self.is_injective()
            && self.0.iter().all(|(&e, &c)| {
                c < collection.color_count()
                    && e.hi() < collection.vertex_count()
                    && collection.graph(c).contains(e)
            })
    }
}

/// Incremental bipartite matching between edges and colors (augmenting paths).
///
/// Removing an edge leaves the remaining matching valid, so the structure
/// supports push/pop style search as well as arbitrary swaps.
#[derive(Clone)]
pub struct ColorMatcher<'a> {
    collection: &'a GraphCollection,
    allowed: Vec<bool>,
    owner: Vec<Option<usize>>,
    slots: Vec<Option<(Edge, Color)>>,
    free: Vec<usize>,
    live: usize,
}

impl<'a> ColorMatcher<'a> {
    pub fn new(collection: &'a GraphCollection, forbidden: &[Color]) -> Self {
        let m = collection.color_count();
        let mut allowed = vec![true; m];
        for &c in forbidden {
            if c < m {
                allowed[c] = false;
            }
        }
        ColorMatcher {
            collection,
            allowed,
            owner: vec![None; m],
            slots: Vec::new(),
            free: Vec::new(),
            live: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// Adds `e`, re-coloring earlier edges if needed. Returns its slot id, or
    /// `None` (with the matching unchanged) when no injective extension exists.
    pub fn try_add(&mut self, e: Edge) -> Option<usize> {
        let slot = match self.free.pop() {
            Some(s) => {
                self.slots[s] = Some((e, usize::MAX));
                s
            }
            None => {
                self.slots.push(Some((e, usize::MAX)));
                self.slots.len() - 1
            }
        };
        let mut visited = vec![false; self.allowed.len()];
        if self.augment(slot, &mut visited) {
            self.live += 1;
            Some(slot)
        } else {
            self.slots[slot] = None;
            self.free.push(slot);
            None
        }
    }

    fn augment(&mut self, slot: usize, visited: &mut [bool]) -> bool {
        let (e, _) = self.slots[slot].expect("live slot");
        for c in 0..self.allowed.len() {
            if !self.allowed[c] || visited[c] || !self.collection.graph(c).contains(e) {
                continue;
            }
            visited[c] = true;
            let take = match self.owner[c] {
                None => true,
                Some(other) => self.augment(other, visited),
            };
            if take {
                self.owner[c] = Some(slot);
                self.slots[slot] = Some((e, c));
                return true;
            }
        }
        false
    }

    pub fn remove(&mut self, slot: usize) {
        let (_, c) = self.slots[slot].take().expect("live slot");
        self.owner[c] = None;
        self.free.push(slot);
        self.live -= 1;
    }

    pub fn color_of(&self, slot: usize) -> Color {
        self.slots[slot].expect("live slot").1
    }

    pub fn assignment(&self) -> ColorAssignment {
        ColorAssignment(self.slots.iter().flatten().map(|&(e, c)| (e, c)).collect())
    }
}

/// Decides exactly whether `edges` can be colored injectively with colors
/// outside `forbidden`, each edge in a color that contains it.
pub fn rainbow_assignment(
    collection: &GraphCollection,
    edges: &[Edge],
    forbidden: &[Color],
) -> Result<Option<ColorAssignment>> {
    let mut sorted = edges.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Input("repeated edge in rainbow_assignment".into()));
    }
    if let Some(e) = edges.iter().find(|e| e.hi() >= collection.vertex_count()) {
        return Err(Error::Input(format!("edge {e} has a vertex out of range")));
    }
    let mut matcher = ColorMatcher::new(collection, forbidden);
    for &e in edges {
        if matcher.try_add(e).is_none() {
            return Ok(None);
        }
    }
    Ok(Some(matcher.assignment()))
}

/// A rainbow Hamiltonian `u,v`-path: `colors[i]` colors `order[i] order[i+1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCertificate {
    pub u: Vertex,
    pub v: Vertex,
    pub order: Vec<Vertex>,
    pub colors: Vec<Color>,
}

impl PathCertificate {
    pub fn coloring(&self) -> ColorAssignment {
        ColorAssignment(
            self.order
                .windows(2)
                .zip(&self.colors)
                .map(|(w, &c)| (Edge::new(w[0], w[1]), c))
                .collect(),
        )
    }
}

/// A rainbow Hamiltonian cycle: `colors[i]` colors `order[i] order[(i+1) % n]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCertificate {
    pub order: Vec<Vertex>,
    pub colors: Vec<Color>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotAPermutation,
    WrongEndpoints { first: Vertex, last: Vertex },
    WrongLength { expected: usize, found: usize },
    ColorOutOfRange { position: usize, color: Color },
    MissingEdge { edge: Edge, color: Color },
    RepeatedColor { color: Color },
    ForestEdgeNotOnPath { edge: Edge },
    ForestColorChanged { edge: Edge, fixed: Color, found: Color },
    ForestInvalid(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotAPermutation => write!(f, "order is not a permutation of the vertex set"),
            Violation::WrongEndpoints { first, last } => {
                write!(f, "path runs {first}..{last}, not between the stated endpoints")
            }
            Violation::WrongLength { expected, found } => {
                write!(f, "expected {expected} colors, found {found}")
            }
            Violation::ColorOutOfRange { position, color } => {
                write!(f, "edge {position} uses unknown color {color}")
            }
            Violation::MissingEdge { edge, color } => write!(f, "edge {edge} is absent from color {color}"),
            Violation::RepeatedColor { color } => write!(f, "color {color} is used twice"),
            Violation::ForestEdgeNotOnPath { edge } => write!(f, "forest edge {edge} is not on the path"),
            Violation::ForestColorChanged { edge, fixed, found } => {
                write!(f, "forest edge {edge} has color {found}, fixed color is {fixed}")
            }
            Violation::ForestInvalid(msg) => write!(f, "forest invalid: {msg}"),
        }
    }
}

fn is_permutation(order: &[Vertex], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    order
        .iter()
        .all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
}

fn check_colored_edges(
    collection: &GraphCollection,
    edges: impl Iterator<Item = (Edge, Color)>,
    out: &mut Vec<Violation>,
) {
    let mut used = vec![false; collection.color_count()];
    for (pos, (e, c)) in edges.enumerate() {
        if c >= collection.color_count() {
            out.push(Violation::ColorOutOfRange { position: pos, color: c });
            continue;
        }
        if !collection.graph(c).contains(e) {
            out.push(Violation::MissingEdge { edge: e, color: c });
        }
        if std::mem::replace(&mut used[c], true) {
            out.push(Violation::RepeatedColor { color: c });
        }
    }
}

/// All violated invariants of a path certificate; empty means valid.
pub fn path_violations(
    collection: &GraphCollection,
    cert: &PathCertificate,
    forest: Option<&RainbowLinearForest>,
) -> Vec<Violation> {
    let n = collection.vertex_count();
    let mut out = Vec::new();
    if !is_permutation(&cert.order, n) {
        out.push(Violation::NotAPermutation);
        return out;
    }
    if n > 0 && (cert.order[0] != cert.u || cert.order[n - 1] != cert.v) {
        out.push(Violation::WrongEndpoints {
            first: cert.order[0],
            last: cert.order[n - 1],
        });
    }
    let expected = n.saturating_sub(1);
    if cert.colors.len() != expected {
        out.push(Violation::WrongLength {
            expected,
            found: cert.colors.len(),
        });
        return out;
    }
    check_colored_edges(
        collection,
        cert.order
            .windows(2)
            .zip(&cert.colors)
            .map(|(w, &c)| (Edge::new(w[0], w[1]), c)),
        &mut out,
    );
    if let Some(h) = forest {
        if let Err(e) = h.validate_against(collection) {
            out.push(Violation::ForestInvalid(e.to_string()));
        }
        let coloring = cert.coloring();
        for (e, fixed) in h.colored_edges() {
            match coloring.get(e) {
                None => out.push(Violation::ForestEdgeNotOnPath { edge: e }),
                Some(c) if c != fixed => out.push(Violation::ForestColorChanged {
                    edge: e,
                    fixed,
                    found: c,
                }),
                Some(_) => {}
            }
        }
    }
    out
}

pub fn validate_path_certificate(
    collection: &GraphCollection,
    cert: &PathCertificate,
    forest: Option<&RainbowLinearForest>,
) -> bool {
    path_violations(collection, cert, forest).is_empty()
}

pub fn cycle_violations(collection: &GraphCollection, cert: &CycleCertificate) -> Vec<Violation> {
    let n = collection.vertex_count();
    let mut out = Vec::new();
    if n < 3 || !is_permutation(&cert.order, n) {
        out.push(Violation::NotAPermutation);
        return out;
    }
    if cert.colors.len() != n {
        out.push(Violation::WrongLength {
            expected: n,
            found: cert.colors.len(),
        });
        return out;
    }
    check_colored_edges(
        collection,
        (0..n).map(|i| (Edge::new(cert.order[i], cert.order[(i + 1) % n]), cert.colors[i])),
        &mut out,
    );
    out
}

pub fn validate_cycle_certificate(collection: &GraphCollection, cert: &CycleCertificate) -> bool {
    cycle_violations(collection, cert).is_empty()
}
