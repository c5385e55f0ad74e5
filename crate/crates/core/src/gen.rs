//! Seeded instance generators: canonical extremal families, random collections
//! repaired up to the Ore bound, and embedded rainbow forests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::RainbowLinearForest;
use crate::graph::{Edge, Graph};
use crate::instance::Instance;
use crate::model::{rainbow_assignment, sigma2_witness, Color, GraphCollection, Vertex};
use crate::structures::{ExtremalCertificate, ExtremalKind};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuilderKind {
    B2,
    B3,
    C2,
    C3,
    /// Identical copies of the unbalanced complete bipartite graph; Ore sum `n - 1`.
    DiracControl,
}

impl std::str::FromStr for BuilderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "b2" => BuilderKind::B2,
            "b3" => BuilderKind::B3,
            "c2" => BuilderKind::C2,
            "c3" => BuilderKind::C3,
            "dirac" | "dirac_control" | "dirac-control" => BuilderKind::DiracControl,
            _ => return Err(Error::Input(format!("unknown builder {s:?}"))),
        })
    }
}

/// A canonical instance and, except for the Dirac control, the certificate it realizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalBuild {
    pub kind: BuilderKind,
    pub instance: Instance,
    pub certificate: Option<ExtremalCertificate>,
}

fn identical(g: Graph, n: usize) -> GraphCollection {
    GraphCollection::identical(g, n)
}

fn clique_on(g: &mut Graph, vs: &[Vertex]) {
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            g.add_edge(a, b);
        }
    }
}

fn join(g: &mut Graph, a: &[Vertex], b: &[Vertex]) {
    for &x in a {
        for &y in b {
            g.add_edge(x, y);
        }
    }
}

/// Splits `k` forest edges into a `u`-path `0, 2, ..` and a `v`-path `1, ..`,
/// colored with the top `k` colors.
fn terminal_paths(n: usize, k: usize) -> Result<(RainbowLinearForest, Vec<Vertex>)> {
    let ku = k.div_ceil(2);
    let hu: Vec<Vertex> = std::iter::once(0).chain(2..2 + ku).collect();
    let hv: Vec<Vertex> = std::iter::once(1).chain(2 + ku..2 + k).collect();
    let colors: Vec<Color> = (n - k..n).collect();
    let forest = RainbowLinearForest::from_colored_paths(&[&hu, &hv], &colors)?;
    let mut h: Vec<Vertex> = hu.into_iter().chain(hv).collect();
    h.sort_unstable();
    Ok((forest, h))
}

/// The canonical build of `kind`. `B2`, `B3` and the Dirac control ignore `k`.
pub fn build_extremal(kind: BuilderKind, n: usize, k: usize) -> Result<ExtremalBuild> {
    match kind {
        BuilderKind::B2 => build_b2(n, (n - 2.min(n)).div_ceil(2)),
        BuilderKind::B3 => {
            if n % 2 == 1 || n < 4 {
                return Err(Error::Input(format!("B3 needs an even n >= 4, got {n}")));
            }
            let x: Vec<Vertex> = (0..n / 2).collect();
            let y: Vec<Vertex> = (n / 2..n).collect();
            let mut g = Graph::empty(n);
            join(&mut g, &x, &y);
            let cert = ExtremalCertificate::new(ExtremalKind::B3, x, y).with_pair(0, 1);
            Ok(ExtremalBuild {
                kind,
                instance: Instance::bare(identical(g, n)),
                certificate: Some(cert),
            })
        }
        BuilderKind::C2 => {
            if n < 3 * k + 4 {
                return Err(Error::Input(format!("C2 needs n >= 3k + 4, got n = {n}, k = {k}")));
            }
            let (forest, h) = terminal_paths(n, k)?;
            let rest: Vec<Vertex> = (k + 2..n).collect();
            let (x, y) = rest.split_at(rest.len().div_ceil(2));
            let mut g = Graph::empty(n);
            clique_on(&mut g, &h);
            clique_on(&mut g, x);
            clique_on(&mut g, y);
            join(&mut g, &h, &rest);
            let cert = ExtremalCertificate::new(ExtremalKind::C2, x.to_vec(), y.to_vec()).with_pair(0, 1);
            Ok(ExtremalBuild {
                kind,
                instance: Instance::new(identical(g, n), forest, 0, 1),
                certificate: Some(cert),
            })
        }
        BuilderKind::C3 => {
            if (n + k) % 2 == 1 || n < 3 * k + 4 {
                return Err(Error::Input(format!("C3 needs n + k even and n >= 3k + 4, got n = {n}, k = {k}")));
            }
            let (forest, _) = terminal_paths(n, k)?;
            let x: Vec<Vertex> = (0..(n + k) / 2).collect();
            let y: Vec<Vertex> = ((n + k) / 2..n).collect();
            let mut g = Graph::empty(n);
            clique_on(&mut g, &x);
            join(&mut g, &x, &y);
            let cert = ExtremalCertificate::new(ExtremalKind::C3, x, y).with_pair(0, 1);
            Ok(ExtremalBuild {
                kind,
                instance: Instance::new(identical(g, n), forest, 0, 1),
                certificate: Some(cert),
            })
        }
        BuilderKind::DiracControl => {
            if n < 2 {
                return Err(Error::Input("the Dirac control needs n >= 2".into()));
            }
            let small = (n - 1) / 2;
            let x: Vec<Vertex> = (0..small).collect();
            let y: Vec<Vertex> = (small..n).collect();
            let mut g = Graph::empty(n);
            join(&mut g, &x, &y);
            Ok(ExtremalBuild {
                kind,
                instance: Instance::bare(identical(g, n)),
                certificate: None,
            })
        }
    }
}

/// `B2` with terminals `0, 1`, cliques `2..2+a` and `2+a..n`.
pub fn build_b2(n: usize, a: usize) -> Result<ExtremalBuild> {
    if n < 4 || a == 0 || a + 3 > n {
        return Err(Error::Input(format!("B2 needs n >= 4 and 1 <= a <= n - 3, got n = {n}, a = {a}")));
    }
    let x: Vec<Vertex> = (2..2 + a).collect();
    let y: Vec<Vertex> = (2 + a..n).collect();
    let mut g = Graph::empty(n);
    clique_on(&mut g, &x);
    clique_on(&mut g, &y);
    join(&mut g, &[0, 1], &(2..n).collect::<Vec<_>>());
    let cert = ExtremalCertificate::new(ExtremalKind::B2, x, y).with_pair(0, 1);
    Ok(ExtremalBuild {
        kind: BuilderKind::B2,
        instance: Instance::bare(identical(g, n)),
        certificate: Some(cert),
    })
}

/// An instance whose reduction has a heavy independent side `Y = 0..(n-k)/2`,
/// with `q` one-edge inner components of which `in_y` are anchored in `Y` and the
/// rest in `X'`; leftover forest edges extend the `u`-path. `u = |Y|`, `v = |Y| + 1`.
/// With `sparse_core` the vertices of `X'` are pairwise non-adjacent.
pub fn case3_probe(n: usize, k: usize, q: usize, in_y: usize, sparse_core: bool) -> Result<Instance> {
    let bad = || Error::Input(format!("no heavy-side probe for n = {n}, k = {k}, q = {q}, in_y = {in_y}"));
    if (n + k) % 2 == 1 || n < 3 * k + 4 || q > k || in_y > q {
        return Err(bad());
    }
    let ny = (n - k) / 2;
    let nxp = ny - 2;
    if in_y > ny || q - in_y > nxp {
        return Err(bad());
    }
    let y: Vec<Vertex> = (0..ny).collect();
    let (u, v) = (ny, ny + 1);
    let xp: Vec<Vertex> = (ny + 2..ny + 2 + nxp).collect();
    let mut next = ny + 2 + nxp;
    let mut paths: Vec<Vec<Vertex>> = Vec::new();
    for i in 0..q {
        let anchor = if i < in_y { y[i] } else { xp[i - in_y] };
        paths.push(vec![anchor, next]);
        next += 1;
    }
    let mut hu = vec![u];
    hu.extend(next..next + (k - q));
    paths.push(hu);
    let d: Vec<Vertex> = (ny + 2 + nxp..n).chain([u, v]).collect();
    let x: Vec<Vertex> = xp.iter().chain(&d).copied().collect();
    let mut g = Graph::empty(n);
    clique_on(&mut g, &d);
    join(&mut g, &x, &y);
    join(&mut g, &d, &xp);
    if !sparse_core {
        clique_on(&mut g, &xp);
    }
    let refs: Vec<&[Vertex]> = paths.iter().map(|p| p.as_slice()).collect();
    let colors: Vec<Color> = (n - k..n).collect();
    let forest = RainbowLinearForest::from_colored_paths(&refs, &colors)?;
    Ok(Instance::new(identical(g, n), forest, u, v))
}

/// An instance whose reduction is two cliques `2..2+a` and `2+a..n-k`, every
/// deleted vertex joined to all of them. `q` one-edge inner components are
/// anchored at the first `q - in_y` vertices of the first clique and the first
/// `in_y` of the second; leftover forest edges extend the `u`-path. `u = 0`, `v = 1`.
pub fn case2_probe(n: usize, k: usize, a: usize, q: usize, in_y: usize) -> Result<Instance> {
    let bad = || Error::Input(format!("no clique-split probe for n = {n}, k = {k}, a = {a}, q = {q}, in_y = {in_y}"));
    if n < 3 * k + 4 || q > k || in_y > q || a == 0 {
        return Err(bad());
    }
    let core = n - k - 2;
    if a >= core || q - in_y > a || in_y > core - a {
        return Err(bad());
    }
    let x: Vec<Vertex> = (2..2 + a).collect();
    let y: Vec<Vertex> = (2 + a..2 + core).collect();
    let mut next = 2 + core;
    let mut paths: Vec<Vec<Vertex>> = Vec::new();
    for i in 0..q {
        let anchor = if i < q - in_y { x[i] } else { y[i - (q - in_y)] };
        paths.push(vec![anchor, next]);
        next += 1;
    }
    let mut hu = vec![0];
    hu.extend(next..next + (k - q));
    paths.push(hu);
    let d: Vec<Vertex> = [0, 1].into_iter().chain(2 + core..n).collect();
    let mut g = Graph::empty(n);
    clique_on(&mut g, &x);
    clique_on(&mut g, &y);
    clique_on(&mut g, &d);
    join(&mut g, &d, &(2..2 + core).collect::<Vec<_>>());
    let refs: Vec<&[Vertex]> = paths.iter().map(|p| p.as_slice()).collect();
    let colors: Vec<Color> = (n - k..n).collect();
    let forest = RainbowLinearForest::from_colored_paths(&refs, &colors)?;
    Ok(Instance::new(identical(g, n), forest, 0, 1))
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Base {
    Complete,
    Random { p: f64 },
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Independent `G(n, p)` per color, then repaired.
    UniformSupergraph { p: f64 },
    /// A canonical build with `flips` random pair toggles, then repaired.
    PerturbedExtremal { kind: BuilderKind, flips: usize },
    /// One base graph copied into every color, then repaired.
    Identical { base: Base },
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub k: usize,
    pub model: Model,
    pub seed: u64,
}

const FOREST_ATTEMPTS: usize = 200;

/// Adds edges between the first non-adjacent pair of least degree sum until the
/// Ore sum reaches `bound`.
pub fn repair_sigma2(g: &mut Graph, bound: usize) {
    while let Some((a, b, s)) = sigma2_witness(g) {
        if s >= bound {
            break;
        }
        g.add_edge(a, b);
    }
}

fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::empty(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p.clamp(0.0, 1.0)) {
                g.add_edge(a, b);
            }
        }
    }
    g
}

/// `m` independent `G(n, p)` colors, each repaired to Ore sum at least `bound`.
pub fn random_ore_collection(n: usize, m: usize, bound: usize, p: f64, seed: u64) -> Result<GraphCollection> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graphs = (0..m)
        .map(|_| {
            let mut g = random_graph(n, p, &mut rng);
            repair_sigma2(&mut g, bound);
            g
        })
        .collect();
    GraphCollection::new(n, graphs)
}

/// A collection passing the hypothesis for `k`, a `k`-edge rainbow forest and a
/// compatible pair, all determined by the spec.
pub fn random_instance(spec: &GenSpec) -> Result<Instance> {
    let GenSpec { n, k, model, seed } = *spec;
    if n < 2 {
        return Err(Error::Input(format!("n = {n} is too small")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = n + k;
    match model {
        Model::UniformSupergraph { p } => {
            let graphs = (0..n)
                .map(|_| {
                    let mut g = random_graph(n, p, &mut rng);
                    repair_sigma2(&mut g, bound);
                    g
                })
                .collect();
            let c = GraphCollection::new(n, graphs)?;
            embed_forest(c, k, &mut rng)
        }
        Model::Identical { base } => {
            let mut g = match base {
                Base::Complete => Graph::complete(n),
                Base::Random { p } => random_graph(n, p, &mut rng),
            };
            repair_sigma2(&mut g, bound);
            embed_forest(identical(g, n), k, &mut rng)
        }
        Model::PerturbedExtremal { kind, flips } => {
            let build = build_extremal(kind, n, k)?;
            let Instance { collection, forest, u, v, .. } = build.instance;
            if forest.edge_count() != k {
                return Err(Error::Input(format!("{kind:?} builds carry no {k}-edge forest")));
            }
            let fixed: Vec<(Edge, Color)> = forest.colored_edges().collect();
            let mut graphs = collection.into_graphs();
            for _ in 0..flips {
                let c = rng.gen_range(0..n);
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a == b || fixed.iter().any(|&(e, fc)| fc == c && e == Edge::new(a, b)) {
                    continue;
                }
                if graphs[c].has_edge(a, b) {
                    graphs[c].remove_edge(a, b);
                } else {
                    graphs[c].add_edge(a, b);
                }
            }
            for g in &mut graphs {
                repair_sigma2(g, bound);
            }
            Ok(Instance::new(GraphCollection::new(n, graphs)?, forest, u, v))
        }
    }
}

/// Samples vertex-disjoint paths with `k` edges in the union graph, colors them
/// injectively, and picks a compatible pair; resamples on failure.
fn embed_forest(collection: GraphCollection, k: usize, rng: &mut ChaCha8Rng) -> Result<Instance> {
    let n = collection.vertex_count();
    let union = collection.union_graph();
    for _ in 0..FOREST_ATTEMPTS {
        let comps = if k == 0 { 0 } else { rng.gen_range(1..=k) };
        if k + comps > n {
            continue;
        }
        // split k edges into `comps` positive parts
        let mut sizes = vec![1usize; comps];
        for _ in comps..k {
            let i = rng.gen_range(0..comps);
            sizes[i] += 1;
        }
        let mut verts: Vec<Vertex> = (0..n).collect();
        verts.shuffle(rng);
        let mut paths: Vec<Vec<Vertex>> = Vec::with_capacity(comps);
        let mut at = 0;
        for &s in &sizes {
            paths.push(verts[at..at + s + 1].to_vec());
            at += s + 1;
        }
        let edges: Vec<Edge> = paths
            .iter()
            .flat_map(|p| p.windows(2).map(|w| Edge::new(w[0], w[1])))
            .collect();
        if edges.iter().any(|e| !union.contains(*e)) {
            continue;
        }
        let Some(colors) = random_coloring(&collection, &edges, rng)? else {
            continue;
        };
        let colored: Vec<Color> = edges.iter().map(|&e| colors[&e]).collect();
        let refs: Vec<&[Vertex]> = paths.iter().map(|p| p.as_slice()).collect();
        let forest = RainbowLinearForest::from_colored_paths(&refs, &colored)?;

        let mut ends: Vec<Vertex> = paths.iter().flat_map(|p| [p[0], *p.last().unwrap()]).collect();
        ends.extend(&verts[at..]);
        ends.sort_unstable();
        ends.shuffle(rng);
        let pair = ends
            .iter()
            .flat_map(|&a| ends.iter().map(move |&b| (a, b)))
            .find(|&(a, b)| forest.is_h_compatible(a, b));
        if let Some((u, v)) = pair {
            return Ok(Instance::new(collection, forest, u, v));
        }
    }
    Err(Error::Input(format!(
        "could not embed a {k}-edge rainbow forest in {FOREST_ATTEMPTS} attempts"
    )))
}

/// Random greedy coloring, falling back to exact matching.
fn random_coloring(
    collection: &GraphCollection,
    edges: &[Edge],
    rng: &mut ChaCha8Rng,
) -> Result<Option<std::collections::BTreeMap<Edge, Color>>> {
    let mut order: Vec<Color> = (0..collection.color_count()).collect();
    order.shuffle(rng);
    let mut used = vec![false; collection.color_count()];
    let mut out = std::collections::BTreeMap::new();
    for &e in edges {
        match order.iter().find(|&&c| !used[c] && collection.graph(c).contains(e)) {
            Some(&c) => {
                used[c] = true;
                out.insert(e, c);
            }
            None => return Ok(rainbow_assignment(collection, edges, &[])?.map(|a| a.0)),
        }
    }
    Ok(Some(out))
}

/// Vertices with degree below `n/2` in every color.
pub fn globally_small_vertices(collection: &GraphCollection) -> Vec<Vertex> {
    let n = collection.vertex_count();
    (0..n)
        .filter(|&x| collection.graphs().iter().all(|g| 2 * g.degree(x) < n))
        .collect()
}

/// `n` colors in which vertex 0 is the only vertex of degree below `n/2`, every
/// color keeping Ore sum at least `n`.
pub fn small_vertex_probe_family(n: usize, seed: u64) -> Result<GraphCollection> {
    let d0 = n.div_ceil(2) - 1;
    // a non-neighbor of 0 needs degree n - d0 without using 0
    if n < 5 || n - d0 > n - 2 {
        return Err(Error::Input(format!("no single-small-vertex family on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let others: Vec<Vertex> = (1..n).collect();
    let mut graphs = Vec::with_capacity(n);
    for _ in 0..n {
        let mut g = random_graph(n, 0.5, &mut rng);
        for &x in &others {
            g.remove_edge(0, x);
        }
        for &x in others.choose_multiple(&mut rng, d0) {
            g.add_edge(0, x);
        }
        for &x in &others {
            let need = if g.has_edge(0, x) { n.div_ceil(2) } else { n - d0 };
            let mut cand: Vec<Vertex> = others.iter().copied().filter(|&y| y != x && !g.has_edge(x, y)).collect();
            cand.shuffle(&mut rng);
            for y in cand {
                if g.degree(x) >= need {
                    break;
                }
                g.add_edge(x, y);
            }
            if g.degree(x) < need {
                return Err(Error::internal(format!("vertex {x} stuck below degree {need}")));
            }
        }
        if !crate::model::sigma2_of(&g).at_least(n) {
            return Err(Error::internal("small-vertex probe lost the Ore bound"));
        }
        graphs.push(g);
    }
    GraphCollection::new(n, graphs)
}
