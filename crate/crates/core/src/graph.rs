//! Simple undirected graphs on dense vertex ids, stored as bitset rows.

use std::fmt;

use serde::{Deserialize, Serialize};

/// An unordered vertex pair, always stored as `(min, max)`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge(usize, usize);

impl Edge {
    /// Canonicalizes `{a, b}`. Panics on a loop.
    pub fn new(a: usize, b: usize) -> Edge {
        assert_ne!(a, b, "loop {a}-{a} is not an edge");
        if a < b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn lo(self) -> usize {
        self.0
    }

    pub fn hi(self) -> usize {
        self.1
    }

    pub fn contains(self, x: usize) -> bool {
        self.0 == x || self.1 == x
    }

    /// The endpoint that is not `x`.
    pub fn other(self, x: usize) -> usize {
        if self.0 == x {
            self.1
        } else {
            debug_assert_eq!(self.1, x);
            self.0
        }
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD).max(1)
}

/// Iterator over the set bits of a word slice.
pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl<'a> Ones<'a> {
    pub fn new(words: &'a [u64]) -> Self {
        Ones {
            words,
            idx: 0,
            cur: words.first().copied().unwrap_or(0),
        }
    }
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let bit = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * WORD + bit);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

/// A simple graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl Graph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Graph {
        let words = words_for(n);
        Graph {
            n,
            words,
            rows: vec![0; n * words],
        }
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for a in 0..n {
            for b in a + 1..n {
                g.add_edge(a, b);
            }
        }
        g
    }

    /// Builds a graph from an edge list. Returns the offending pair on a loop,
    /// an out-of-range endpoint or a repeated edge.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph, (usize, usize)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (a, b) in edges {
            if a == b || a >= n || b >= n || g.has_edge(a, b) {
                return Err((a, b));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn row(&self, x: usize) -> &[u64] {
        &self.rows[x * self.words..(x + 1) * self.words]
    }

    /// First 64 adjacency bits of `x`; only meaningful when `n <= 64`.
    pub fn row_word(&self, x: usize) -> u64 {
        self.rows[x * self.words]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && (self.rows[a * self.words + b / WORD] >> (b % WORD)) & 1 == 1
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.has_edge(e.lo(), e.hi())
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b && a < self.n && b < self.n);
        self.rows[a * self.words + b / WORD] |= 1 << (b % WORD);
        self.rows[b * self.words + a / WORD] |= 1 << (a % WORD);
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.rows[a * self.words + b / WORD] &= !(1 << (b % WORD));
        self.rows[b * self.words + a / WORD] &= !(1 << (a % WORD));
    }

    pub fn degree(&self, x: usize) -> usize {
        self.row(x).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, x: usize) -> Ones<'_> {
        Ones::new(self.row(x))
    }

    /// Edges in canonical sorted order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.n).flat_map(move |a| {
            self.neighbors(a)
                .filter(move |&b| b > a)
                .map(move |b| Edge(a, b))
        })
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|x| self.degree(x)).sum::<usize>() / 2
    }

    /// Subgraph induced on `vertices`, relabelled `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::empty(vertices.len());
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Adds every edge of `other` to `self`.
    pub fn union_with(&mut self, other: &Graph) {
        assert_eq!(self.n, other.n);
        for (w, o) in self.rows.iter_mut().zip(&other.rows) {
            *w |= o;
        }
    }

    /// Connected components, each sorted, ordered by minimum vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for y in self.neighbors(x) {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &a)| vertices[i + 1..].iter().all(|&b| self.has_edge(a, b)))
    }

    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &a)| vertices[i + 1..].iter().all(|&b| !self.has_edge(a, b)))
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_is_canonical() {
        assert_eq!(Edge::new(5, 2), Edge::new(2, 5));
        assert_eq!(Edge::new(5, 2).lo(), 2);
        assert_eq!(Edge::new(5, 2).other(5), 2);
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        assert_eq!(Graph::from_edges(3, [(0, 0)]), Err((0, 0)));
        assert_eq!(Graph::from_edges(3, [(0, 1), (1, 0)]), Err((1, 0)));
        assert_eq!(Graph::from_edges(3, [(0, 3)]), Err((0, 3)));
    }

    #[test]
    fn wide_rows_work_past_one_word() {
        let mut g = Graph::empty(130);
        g.add_edge(3, 129);
        g.add_edge(64, 65);
        assert!(g.has_edge(129, 3));
        assert_eq!(g.neighbors(3).collect::<Vec<_>>(), vec![129]);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![Edge::new(3, 129), Edge::new(64, 65)]);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn components_and_induced() {
        let g = Graph::from_edges(5, [(0, 1), (2, 3), (3, 4)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1], vec![2, 3, 4]]);
        let h = g.induced(&[4, 3, 0]);
        assert!(h.has_edge(0, 1));
        assert!(!h.has_edge(1, 2));
        assert!(Graph::complete(4).is_clique(&[0, 1, 2, 3]));
    }
}
