//! Exhaustive decision procedures for rainbow Hamiltonian paths and cycles.
//!
//! These are exponential-time ground truth for small instances. They share no
//! search or matching code with the constructive solver: the depth-first
//! search extends a vertex order, keeps forest edges contiguous, and every few
//! levels checks that the free path edges still admit a system of distinct
//! colors via its own augmenting-path routine.

use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::forest::RainbowLinearForest;
use crate::graph::{Edge, Graph};
use crate::model::{Color, CycleCertificate, GraphCollection, PathCertificate, Vertex};

/// Largest vertex count the oracle accepts (one machine word per row).
pub const MAX_ORACLE_VERTICES: usize = 64;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub node_limit: u64,
    pub time_limit: Duration,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            node_limit: 200_000_000,
            time_limit: Duration::from_secs(120),
        }
    }
}

impl OracleBudget {
    pub fn nodes(node_limit: u64) -> Self {
        OracleBudget {
            node_limit,
            ..OracleBudget::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision<C> {
    Found(C),
    NotFound,
    /// The budget ran out first. Never to be read as `NotFound`.
    Unknown,
}

impl<C> Decision<C> {
    pub fn is_found(&self) -> bool {
        matches!(self, Decision::Found(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Decision::Found(_) => "found",
            Decision::NotFound => "not_found",
            Decision::Unknown => "unknown",
        }
    }
}

#[derive(Copy, Clone, Debug)]
pub struct OracleOptions {
    pub budget: OracleBudget,
    /// Run the color-matchability test every this many levels (and at leaves).
    pub match_interval: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            budget: OracleBudget::default(),
            match_interval: 4,
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
}

enum Goal {
    EndAt(Vertex),
    CloseTo(Vertex),
}

struct Abort;

struct Search<'a> {
    n: usize,
    full: u64,
    collection: &'a GraphCollection,
    free_colors: Vec<Color>,
    /// Adjacency over colors the forest does not fix.
    free_adj: Vec<u64>,
    forest_nbrs: Vec<Vec<(Vertex, Color)>>,
    goal: Goal,
    interval: usize,

    order: Vec<Vertex>,
    visited: u64,
    /// Per path edge: `Some(color)` for forest edges, `None` for free edges.
    fixed: Vec<Option<Color>>,
    free_edges: Vec<Edge>,
    free_color_of: Vec<Option<Color>>,
    owner: Vec<Option<usize>>,

    nodes: u64,
    budget: OracleBudget,
    started: Option<Instant>,
}

impl<'a> Search<'a> {
    fn new(
        collection: &'a GraphCollection,
        forest: &RainbowLinearForest,
        goal: Goal,
        opts: &OracleOptions,
    ) -> Self {
        let n = collection.vertex_count();
        let fixed_colors = forest.used_colors();
        let free_colors: Vec<Color> = (0..collection.color_count())
            .filter(|c| fixed_colors.binary_search(c).is_err())
            .collect();
        let mut free_adj = vec![0u64; n];
        for &c in &free_colors {
            let g = collection.graph(c);
            for (x, row) in free_adj.iter_mut().enumerate() {
                *row |= g.row_word(x);
            }
        }
        let mut forest_nbrs = vec![Vec::new(); n];
        for (e, c) in forest.colored_edges() {
            forest_nbrs[e.lo()].push((e.hi(), c));
            forest_nbrs[e.hi()].push((e.lo(), c));
        }
        Search {
            n,
            full: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
            collection,
            free_colors,
            free_adj,
            forest_nbrs,
            goal,
            interval: opts.match_interval.max(1),
            order: Vec::with_capacity(n),
            visited: 0,
            fixed: Vec::with_capacity(n),
            free_edges: Vec::with_capacity(n),
            free_color_of: Vec::with_capacity(n),
            owner: vec![None; collection.color_count()],
            nodes: 0,
            budget: opts.budget,
            started: crate::clock::start(),
        }
    }

    fn tick(&mut self) -> std::result::Result<(), Abort> {
        self.nodes += 1;
        if self.nodes > self.budget.node_limit {
            return Err(Abort);
        }
        if self.nodes.is_multiple_of(4096) && crate::clock::exceeded(self.started, self.budget.time_limit) {
            return Err(Abort);
        }
        Ok(())
    }

    fn try_match(&mut self, idx: usize, seen: &mut u128) -> bool {
        let e = self.free_edges[idx];
        for i in 0..self.free_colors.len() {
            let c = self.free_colors[i];
            if *seen >> i & 1 == 1 || !self.collection.graph(c).contains(e) {
                continue;
            }
            *seen |= 1 << i;
            let ok = match self.owner[c] {
                None => true,
                Some(j) => self.try_match(j, seen),
            };
            if ok {
                self.owner[c] = Some(idx);
                self.free_color_of[idx] = Some(c);
                return true;
            }
        }
        false
    }

    /// Augments every unmatched free edge; false if some edge cannot be colored.
    fn matchable(&mut self) -> bool {
        for idx in 0..self.free_edges.len() {
            if self.free_color_of[idx].is_none() {
                let mut seen = 0u128;
                if !self.try_match(idx, &mut seen) {
                    return false;
                }
            }
        }
        true
    }

    fn push_free(&mut self, e: Edge) {
        self.fixed.push(None);
        self.free_edges.push(e);
        self.free_color_of.push(None);
    }

    fn pop_free(&mut self) {
        self.fixed.pop();
        self.free_edges.pop();
        if let Some(Some(c)) = self.free_color_of.pop() {
            self.owner[c] = None;
        }
    }

    fn visit(&mut self, x: Vertex) {
        self.order.push(x);
        self.visited |= 1 << x;
    }

    fn unvisit(&mut self) {
        let x = self.order.pop().unwrap();
        self.visited &= !(1 << x);
    }

    /// Cheap necessary conditions on the unvisited part.
    fn feasible(&self, x: Vertex) -> bool {
        let remaining = self.full & !self.visited;
        if remaining == 0 {
            return true;
        }
        let anchor = match self.goal {
            Goal::EndAt(_) => 1u64 << x,
            Goal::CloseTo(s) => (1u64 << x) | (1u64 << s),
        };
        let pool = remaining | anchor;
        let mut r = remaining;
        while r != 0 {
            let w = r.trailing_zeros() as usize;
            r &= r - 1;
            let need = match self.goal {
                Goal::EndAt(t) if t == w => 1,
                _ => 2,
            };
            let forced = self.forest_nbrs[w].len();
            if (self.free_adj[w] & pool).count_ones() as usize + forced < need {
                return false;
            }
        }
        // every unvisited vertex must be reachable from x through unvisited vertices
        let mut seen = 1u64 << x;
        let mut frontier = seen;
        while frontier != 0 {
            let y = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let mut nb = self.free_adj[y];
            for &(z, _) in &self.forest_nbrs[y] {
                nb |= 1 << z;
            }
            let fresh = nb & remaining & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        remaining & !seen == 0
    }

    fn dfs(&mut self) -> std::result::Result<bool, Abort> {
        self.tick()?;
        let x = *self.order.last().unwrap();
        let depth = self.order.len();
        if depth == self.n {
            return Ok(self.finish(x));
        }
        let prev = depth.checked_sub(2).map(|i| self.order[i]);
        let pending: Vec<(Vertex, Color)> = self.forest_nbrs[x]
            .iter()
            .copied()
            .filter(|&(y, _)| Some(y) != prev)
            .collect();
        if pending.iter().any(|&(y, _)| self.visited >> y & 1 == 1) || pending.len() > 1 {
            return Ok(false);
        }
        if let Some(&(y, c)) = pending.first() {
            if !self.may_enter(y, depth + 1) {
                return Ok(false);
            }
            self.visit(y);
            self.fixed.push(Some(c));
            let found = self.feasible(y) && self.dfs()?;
            if found {
                return Ok(true);
            }
            self.fixed.pop();
            self.unvisit();
            return Ok(false);
        }

        let remaining = self.full & !self.visited;
        let mut cands: Vec<(u32, Vertex)> = Vec::new();
        let mut r = self.free_adj[x] & remaining;
        while r != 0 {
            let y = r.trailing_zeros() as usize;
            r &= r - 1;
            if self.may_enter(y, depth + 1) {
                let cont = (self.free_adj[y] & remaining).count_ones();
                cands.push((cont, y));
            }
        }
        cands.sort_unstable();
        for (_, y) in cands {
            self.visit(y);
            self.push_free(Edge::new(x, y));
            let ok = (!self.order.len().is_multiple_of(self.interval) || self.matchable()) && self.feasible(y);
            if ok && self.dfs()? {
                return Ok(true);
            }
            self.pop_free();
            self.unvisit();
        }
        Ok(false)
    }

    /// Whether `y` may become the `len`-th vertex of the order.
    fn may_enter(&self, y: Vertex, len: usize) -> bool {
        match self.goal {
            Goal::EndAt(t) => (y == t) == (len == self.n),
            Goal::CloseTo(_) => true,
        }
    }

    fn finish(&mut self, x: Vertex) -> bool {
        match self.goal {
            Goal::EndAt(t) => x == t && self.matchable(),
            Goal::CloseTo(s) => {
                if self.free_adj[x] >> s & 1 == 0 {
                    return false;
                }
                self.push_free(Edge::new(x, s));
                if self.matchable() {
                    return true;
                }
                self.pop_free();
                false
            }
        }
    }

    fn edge_colors(&self) -> Vec<Color> {
        let mut free = self.free_color_of.iter();
        self.fixed
            .iter()
            .map(|f| match f {
                Some(c) => *c,
                None => free.next().unwrap().expect("matched"),
            })
            .collect()
    }
}

fn check_size(collection: &GraphCollection) -> Result<()> {
    let n = collection.vertex_count();
    if n > MAX_ORACLE_VERTICES {
        return Err(Error::Input(format!(
            "oracle handles at most {MAX_ORACLE_VERTICES} vertices, got {n}"
        )));
    }
    if collection.color_count() > 128 {
        return Err(Error::Input("oracle handles at most 128 colors".into()));
    }
    Ok(())
}

/// Decides whether a rainbow Hamiltonian `u,v`-path containing `forest` (with
/// its fixed colors) exists.
pub fn exact_rainbow_ham_path(
    collection: &GraphCollection,
    u: Vertex,
    v: Vertex,
    forest: &RainbowLinearForest,
    opts: &OracleOptions,
) -> Result<(Decision<PathCertificate>, SearchStats)> {
    check_size(collection)?;
    let n = collection.vertex_count();
    if u == v || u >= n || v >= n {
        return Err(Error::Input(format!("terminals {u}, {v} invalid for n = {n}")));
    }
    forest.validate_against(collection)?;
    let mut s = Search::new(collection, forest, Goal::EndAt(v), opts);
    s.visit(u);
    let outcome = if !s.may_enter(u, 1) && n > 1 || !s.feasible(u) {
        Ok(false)
    } else {
        s.dfs()
    };
    let stats = SearchStats { nodes: s.nodes };
    let decision = match outcome {
        Err(Abort) => Decision::Unknown,
        Ok(false) => Decision::NotFound,
        Ok(true) => Decision::Found(PathCertificate {
            u,
            v,
            order: s.order.clone(),
            colors: s.edge_colors(),
        }),
    };
    Ok((decision, stats))
}

/// Decides whether a rainbow Hamiltonian cycle exists. Requires `m >= n`.
pub fn exact_rainbow_ham_cycle(
    collection: &GraphCollection,
    opts: &OracleOptions,
) -> Result<(Decision<CycleCertificate>, SearchStats)> {
    check_size(collection)?;
    let n = collection.vertex_count();
    if collection.color_count() < n {
        return Err(Error::Shape {
            expected: n,
            found: collection.color_count(),
        });
    }
    if n < 3 {
        return Ok((Decision::NotFound, SearchStats::default()));
    }
    let none = RainbowLinearForest::empty();
    let mut s = Search::new(collection, &none, Goal::CloseTo(0), opts);
    s.visit(0);
    let outcome = if s.feasible(0) { s.dfs() } else { Ok(false) };
    let stats = SearchStats { nodes: s.nodes };
    let decision = match outcome {
        Err(Abort) => Decision::Unknown,
        Ok(false) => Decision::NotFound,
        Ok(true) => Decision::Found(CycleCertificate {
            order: s.order.clone(),
            colors: s.edge_colors(),
        }),
    };
    Ok((decision, stats))
}

/// Largest vertex count accepted by [`enumerate_collections`].
pub const MAX_ENUMERATION_VERTICES: usize = 5;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct EnumerationSummary {
    pub visited: u64,
    pub aborted: bool,
}

/// Every graph on `0..n`, in order of its edge bitmask over the sorted pair list.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    (0..1u64 << pairs.len())
        .map(|mask| {
            let mut g = Graph::empty(n);
            for (i, &(a, b)) in pairs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    g.add_edge(a, b);
                }
            }
            g
        })
        .collect()
}

/// Visits every ordered collection of `n` graphs on `n` vertices whose colors
/// all satisfy `keep`. The visitor may stop early with `ControlFlow::Break`.
pub fn enumerate_collections<P, V>(n: usize, keep: P, mut visit: V) -> Result<EnumerationSummary>
where
    P: Fn(&Graph) -> bool,
    V: FnMut(&GraphCollection) -> ControlFlow<()>,
{
    if n > MAX_ENUMERATION_VERTICES {
        return Err(Error::Input(format!(
            "full enumeration is limited to n <= {MAX_ENUMERATION_VERTICES}, got {n}"
        )));
    }
    let pool: Vec<Graph> = all_graphs(n).into_iter().filter(|g| keep(g)).collect();
    let mut summary = EnumerationSummary {
        visited: 0,
        aborted: false,
    };
    if pool.is_empty() && n > 0 {
        return Ok(summary);
    }
    let mut idx = vec![0usize; n];
    loop {
        let graphs = idx.iter().map(|&i| pool[i].clone()).collect();
        let c = GraphCollection::new(n, graphs)?;
        summary.visited += 1;
        if visit(&c).is_break() {
            summary.aborted = true;
            return Ok(summary);
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(summary);
            }
            idx[pos] += 1;
            if idx[pos] < pool.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_cycle_certificate, validate_path_certificate};

    fn bip(n: usize, left: usize) -> Graph {
        let mut g = Graph::empty(n);
        for a in 0..left {
            for b in left..n {
                g.add_edge(a, b);
            }
        }
        g
    }

    fn b2_five() -> GraphCollection {
        let g = Graph::from_edges(
            5,
            [(2, 3), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)],
        )
        .unwrap();
        GraphCollection::identical(g, 5)
    }

    fn opts() -> OracleOptions {
        OracleOptions::default()
    }

    #[test]
    fn path_on_complete_collection() {
        let c = GraphCollection::identical(Graph::complete(4), 4);
        let (d, _) = exact_rainbow_ham_path(&c, 0, 3, &RainbowLinearForest::empty(), &opts()).unwrap();
        let Decision::Found(cert) = d else { panic!("expected a path") };
        assert!(validate_path_certificate(&c, &cert, None));
    }

    #[test]
    fn no_same_side_path_in_k22() {
        let g = Graph::from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let c = GraphCollection::identical(g, 4);
        let (d, _) = exact_rainbow_ham_path(&c, 0, 1, &RainbowLinearForest::empty(), &opts()).unwrap();
        assert_eq!(d, Decision::NotFound);
    }

    #[test]
    fn no_path_in_b2_family() {
        let (d, _) =
            exact_rainbow_ham_path(&b2_five(), 0, 1, &RainbowLinearForest::empty(), &opts()).unwrap();
        assert_eq!(d, Decision::NotFound);
    }

    #[test]
    fn forest_edges_keep_their_colors() {
        let c = GraphCollection::identical(Graph::complete(6), 6);
        let h = RainbowLinearForest::from_colored_paths(&[&[2, 4, 3]], &[5, 0]).unwrap();
        let (d, _) = exact_rainbow_ham_path(&c, 0, 1, &h, &opts()).unwrap();
        let Decision::Found(cert) = d else { panic!() };
        assert!(validate_path_certificate(&c, &cert, Some(&h)));
    }

    #[test]
    fn incompatible_forest_has_no_path() {
        let c = GraphCollection::identical(Graph::complete(5), 5);
        let h = RainbowLinearForest::from_colored_paths(&[&[0, 2, 1]], &[0, 1]).unwrap();
        let (d, _) = exact_rainbow_ham_path(&c, 0, 1, &h, &opts()).unwrap();
        assert_eq!(d, Decision::NotFound);
    }

    #[test]
    fn cycle_examples() {
        let (d, _) = exact_rainbow_ham_cycle(&GraphCollection::identical(bip(5, 2), 5), &opts()).unwrap();
        assert_eq!(d, Decision::NotFound);
        let k4 = GraphCollection::identical(Graph::complete(4), 4);
        assert!(exact_rainbow_ham_cycle(&k4, &opts()).unwrap().0.is_found());
        let k22 = GraphCollection::identical(bip(4, 2), 4);
        let (d, _) = exact_rainbow_ham_cycle(&k22, &opts()).unwrap();
        let Decision::Found(cert) = d else { panic!() };
        assert!(validate_cycle_certificate(&k22, &cert));
    }

    #[test]
    fn cycle_needs_distinct_colors() {
        // a single color holding a 4-cycle, the rest empty
        let mut graphs = vec![Graph::empty(4); 4];
        graphs[0] = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let c = GraphCollection::new(4, graphs).unwrap();
        assert_eq!(exact_rainbow_ham_cycle(&c, &opts()).unwrap().0, Decision::NotFound);
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let c = GraphCollection::identical(bip(9, 4), 9);
        let tight = OracleOptions {
            budget: OracleBudget::nodes(10),
            ..opts()
        };
        assert_eq!(exact_rainbow_ham_cycle(&c, &tight).unwrap().0, Decision::Unknown);
    }

    #[test]
    fn enumeration_counts() {
        let mut count = 0;
        let s = enumerate_collections(3, |_| true, |_| {
            count += 1;
            ControlFlow::Continue(())
        })
        .unwrap();
        assert_eq!((s.visited, count), (512, 512));
        assert!(!s.aborted);

        let s = enumerate_collections(3, |_| true, |_| ControlFlow::Break(())).unwrap();
        assert_eq!(s.visited, 1);
        assert!(s.aborted);

        assert!(enumerate_collections(6, |_| true, |_| ControlFlow::Continue(())).is_err());
    }

    #[test]
    fn enumeration_with_min_degree_filter_matches_recount() {
        let min_deg2 = |g: &Graph| (0..4).all(|x| g.degree(x) >= 2);
        // independent recount: brute-force over edge masks of K4
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let good = (0u32..64)
            .filter(|m| {
                (0..4).all(|x| {
                    pairs
                        .iter()
                        .enumerate()
                        .filter(|(i, &(a, b))| m >> i & 1 == 1 && (a == x || b == x))
                        .count()
                        >= 2
                })
            })
            .count() as u64;
        let s = enumerate_collections(4, min_deg2, |_| ControlFlow::Continue(())).unwrap();
        assert_eq!(s.visited, good.pow(4));
    }
}
