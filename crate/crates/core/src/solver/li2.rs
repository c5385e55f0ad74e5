//! Splitting the reduced collection into a rainbow Hamiltonian path or one of
//! the two obstructions (identical two-clique split, heavy independent side).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SolverConfig;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::model::{Color, ColorMatcher, GraphCollection, Vertex};
use crate::structures::{detect_identical_split, detect_independent_heavy_side};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Li2Outcome {
    /// `colors[i]` colors `order[i] order[i+1]`; ids are those of the reduced collection.
    A1 { order: Vec<Vertex>, colors: Vec<Color> },
    A2 { l: usize, x: Vec<Vertex>, y: Vec<Vertex> },
    A3 { x: Vec<Vertex>, y: Vec<Vertex> },
}

impl Li2Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Li2Outcome::A1 { .. } => "A1",
            Li2Outcome::A2 { .. } => "A2",
            Li2Outcome::A3 { .. } => "A3",
        }
    }
}

/// Both obstructions hold only for two isolated vertices; the heavy side wins then.
pub fn li2_dispatch(collection: &GraphCollection, cfg: &SolverConfig) -> Result<Li2Outcome> {
    if let Some((x, y)) = detect_independent_heavy_side(collection) {
        return Ok(Li2Outcome::A3 { x, y });
    }
    if let Some((l, x, y)) = detect_identical_split(collection) {
        return Ok(Li2Outcome::A2 { l, x, y });
    }
    let n = collection.vertex_count();
    if cfg.heuristic {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.restarts.max(1) {
            if let Some((order, colors)) = rotation_extension(collection, &mut rng, 30 * n * n + 100) {
                return Ok(Li2Outcome::A1 { order, colors });
            }
        }
    }
    if n > cfg.fallback_limit {
        return Err(Error::Budget(format!(
            "rotation-extension found no spanning rainbow path on {n} vertices and exhaustive search is capped at {}",
            cfg.fallback_limit
        )));
    }
    match exhaustive_rainbow_path(collection, cfg.fallback_nodes)? {
        Some((order, colors)) => Ok(Li2Outcome::A1 { order, colors }),
        None => Err(Error::internal(
            "reduced collection has no spanning rainbow path and matches neither obstruction",
        )),
    }
}

struct Walk<'a> {
    matcher: ColorMatcher<'a>,
    path: Vec<Vertex>,
    slots: Vec<usize>,
    on: Vec<bool>,
}

impl Walk<'_> {
    fn flip(&mut self) {
        self.path.reverse();
        self.slots.reverse();
    }

    fn finish(&self) -> (Vec<Vertex>, Vec<Color>) {
        (
            self.path.clone(),
            self.slots.iter().map(|&s| self.matcher.color_of(s)).collect(),
        )
    }
}

/// Randomized rotation-extension over the union graph, keeping the edge-to-color
/// matching valid after every move.
fn rotation_extension(
    collection: &GraphCollection,
    rng: &mut ChaCha8Rng,
    max_steps: usize,
) -> Option<(Vec<Vertex>, Vec<Color>)> {
    let n = collection.vertex_count();
    if n == 0 {
        return None;
    }
    let union = collection.union_graph();
    let start = rng.gen_range(0..n);
    let mut w = Walk {
        matcher: ColorMatcher::new(collection, &[]),
        path: vec![start],
        slots: Vec::new(),
        on: vec![false; n],
    };
    w.on[start] = true;
    for _ in 0..max_steps {
        if w.path.len() == n {
            return Some(w.finish());
        }
        let end = *w.path.last().unwrap();
        let mut next: Vec<Vertex> = union.neighbors(end).filter(|&y| !w.on[y]).collect();
        next.shuffle(rng);
        let mut grown = false;
        for y in next {
            if let Some(s) = w.matcher.try_add(Edge::new(end, y)) {
                w.path.push(y);
                w.slots.push(s);
                w.on[y] = true;
                grown = true;
                break;
            }
        }
        if grown {
            continue;
        }
        let len = w.path.len();
        if len < 3 || rng.gen_bool(0.15) {
            w.flip();
            continue;
        }
        let pivots: Vec<usize> = (0..len - 2).filter(|&i| union.has_edge(w.path[i], end)).collect();
        let Some(&i) = pivots.choose(rng) else {
            w.flip();
            continue;
        };
        rotate(&mut w, i);
    }
    (w.path.len() == n).then(|| w.finish())
}

/// Replaces edge `(i, i+1)` by `(i, end)` and reverses the tail, when the
/// coloring allows it.
fn rotate(w: &mut Walk<'_>, i: usize) {
    let end = *w.path.last().unwrap();
    w.matcher.remove(w.slots[i]);
    match w.matcher.try_add(Edge::new(w.path[i], end)) {
        Some(s) => {
            w.path[i + 1..].reverse();
            let mut tail = w.slots[i + 1..].to_vec();
            tail.reverse();
            w.slots.truncate(i);
            w.slots.push(s);
            w.slots.extend(tail);
        }
        None => {
            let e = Edge::new(w.path[i], w.path[i + 1]);
            w.slots[i] = w.matcher.try_add(e).expect("a just-removed edge fits back");
        }
    }
}

/// Depth-first search over all spanning paths with incremental color matching.
/// `Err(Budget)` after `node_limit` search nodes.
pub fn exhaustive_rainbow_path(
    collection: &GraphCollection,
    node_limit: u64,
) -> Result<Option<(Vec<Vertex>, Vec<Color>)>> {
    let n = collection.vertex_count();
    if n == 0 {
        return Ok(None);
    }
    let union = collection.union_graph();
    let mut nodes = 0u64;
    for start in 0..n {
        let mut w = Walk {
            matcher: ColorMatcher::new(collection, &[]),
            path: vec![start],
            slots: Vec::new(),
            on: vec![false; n],
        };
        w.on[start] = true;
        if extend(&union, &mut w, &mut nodes, node_limit)? {
            return Ok(Some(w.finish()));
        }
    }
    Ok(None)
}

fn extend(union: &Graph, w: &mut Walk<'_>, nodes: &mut u64, limit: u64) -> Result<bool> {
    *nodes += 1;
    if *nodes > limit {
        return Err(Error::Budget(format!("exhaustive path search exceeded {limit} nodes")));
    }
    let n = w.on.len();
    if w.path.len() == n {
        return Ok(true);
    }
    let end = *w.path.last().unwrap();
    let next: Vec<Vertex> = union.neighbors(end).filter(|&y| !w.on[y]).collect();
    for y in next {
        if let Some(s) = w.matcher.try_add(Edge::new(end, y)) {
            w.path.push(y);
            w.slots.push(s);
            w.on[y] = true;
            if extend(union, w, nodes, limit)? {
                return Ok(true);
            }
            w.on[y] = false;
            w.slots.pop();
            w.path.pop();
            w.matcher.remove(s);
        }
    }
    Ok(false)
}
