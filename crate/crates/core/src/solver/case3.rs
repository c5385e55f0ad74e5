//! The heavy-independent-side case. `X = X' ∪ D` is complete to `Y` in every
//! retained color. Either the forest avoids `Y` (a `C3` certificate) or it is
//! extended inside `X'` until contracting its `X`-parts leaves one more `X`-vertex
//! than `Y`-vertices, and the path alternates sides.

use std::collections::BTreeMap;

use super::{Context, Move, Stage, StageRecord};
use crate::error::{Error, Result};
use crate::graph::Edge;
use crate::model::{Color, PathCertificate, Vertex};
use crate::structures::{ExtremalCertificate, ExtremalKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedForest {
    /// `X' ∪ D`, sorted.
    pub x: Vec<Vertex>,
    pub y: Vec<Vertex>,
    pub x_prime: Vec<Vertex>,
    /// Edges added to the forest: inside `X'`, or from `X'` to a dropped endpoint.
    pub added: Vec<(Edge, Color)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Case3Start {
    Blocked(ExtremalCertificate),
    Extended(ExtendedForest),
}

#[derive(Clone)]
struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            y = std::mem::replace(&mut self.0[y], r);
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

fn record(ctx: &Context<'_>, path_len: usize, expected_len: usize, unused: usize, note: String) -> StageRecord {
    StageRecord {
        stage: Stage::Case3,
        mv: Move::Structure,
        component: None,
        slide: None,
        slide_on_forest: None,
        colors: Vec::new(),
        path_len,
        expected_len,
        unused,
        expected_unused: if expected_len == ctx.n { 1 } else { unused },
        note: Some(note),
    }
}

/// `x_prime`, `y` are original ids. Emits `C3` when no kept endpoint lies in `Y`,
/// otherwise extends the forest so that exactly `q - 1` of its edges meet `X'`.
pub(crate) fn case3_extend_forest(
    ctx: &Context<'_>,
    x_prime: &[Vertex],
    y: &[Vertex],
    trace: &mut Vec<StageRecord>,
) -> Result<Case3Start> {
    let plan = &ctx.plan;
    let mut x: Vec<Vertex> = x_prime.iter().chain(&plan.deleted).copied().collect();
    x.sort_unstable();
    let y = y.to_vec();
    for &c in ctx.retained() {
        let g = ctx.collection.graph(c);
        if let Some((a, b)) = x
            .iter()
            .flat_map(|&a| y.iter().map(move |&b| (a, b)))
            .find(|&(a, b)| !g.has_edge(a, b))
        {
            return Err(Error::internal(format!("{a}-{b} missing from retained color {c} across the heavy split")));
        }
    }
    let anchors = plan.kept_endpoints();
    if !anchors.iter().any(|a| y.contains(a)) {
        trace.push(record(ctx, 0, 0, ctx.n - ctx.k, "C3".into()));
        let cert = ExtremalCertificate::new(ExtremalKind::C3, x, y).with_pair(plan.u, plan.v);
        return Ok(Case3Start::Blocked(cert));
    }

    let q = plan.q();
    let target = q - 1;
    let in_xp = |z: Vertex| x_prime.contains(&z);
    let mut dsu = Dsu::new(ctx.n);
    for (e, _) in ctx.forest.colored_edges() {
        dsu.union(e.lo(), e.hi());
    }
    let mut deg = vec![0usize; ctx.n];
    for comp in &plan.inner {
        if in_xp(comp[0]) {
            deg[comp[0]] += 1;
        }
    }
    let mut t = deg.iter().sum::<usize>();
    let mut used = vec![false; ctx.n];
    let mut added: Vec<(Edge, Color)> = Vec::new();

    // greedy maximal extension inside X'; one pass suffices since rejections are permanent
    'pairs: for (i, &a) in x_prime.iter().enumerate() {
        for &b in &x_prime[i + 1..] {
            if t >= target {
                break 'pairs;
            }
            if deg[a] > 1 || deg[b] > 1 || dsu.find(a) == dsu.find(b) {
                continue;
            }
            if let Some(&c) = ctx.retained().iter().find(|&&c| !used[c] && ctx.has_edge(c, a, b)) {
                used[c] = true;
                deg[a] += 1;
                deg[b] += 1;
                dsu.union(a, b);
                added.push((Edge::new(a, b), c));
                t += 1;
            }
        }
    }

    let mut matched = 0;
    if t < target {
        let need = target - t;
        let mut reps: BTreeMap<usize, Vertex> = BTreeMap::new();
        for &z in x_prime.iter().filter(|&&z| deg[z] <= 1) {
            reps.entry(dsu.find(z)).or_insert(z);
        }
        let mut zs: Vec<Vertex> = reps.into_values().collect();
        zs.sort_unstable();
        if zs.len() < need + 1 {
            return Err(Error::internal(format!(
                "only {} components offer usable vertices, {} needed",
                zs.len(),
                need + 1
            )));
        }
        zs.truncate(need + 1);
        let free: Vec<Color> = ctx.retained().iter().copied().filter(|&c| !used[c]).take(need).collect();
        if free.len() < need {
            return Err(Error::internal("too few unused colors for the robust vertices"));
        }
        let ends = plan.dropped_endpoints();
        let mut robust: Vec<(Vertex, Color)> = Vec::with_capacity(need);
        for &c in &free {
            let g = ctx.collection.graph(c);
            let deg_x = |z: Vertex| x.iter().filter(|&&o| g.has_edge(z, o)).count();
            let pick = (0..2)
                .find(|&p| deg_x(zs[p]) >= ctx.k)
                .ok_or_else(|| Error::internal(format!("neither usable vertex has X-degree k in color {c}")))?;
            let z = zs.remove(pick);
            let hits = ends.iter().filter(|&&w| g.has_edge(z, w)).count();
            if hits < q - t {
                return Err(Error::internal(format!(
                    "vertex {z} has {hits} dropped-endpoint neighbors in color {c}, below q - t = {}",
                    q - t
                )));
            }
            robust.push((z, c));
        }
        let mut chosen = Vec::with_capacity(need);
        if !match_robust(ctx, &robust, &ends, dsu.clone(), &mut Vec::new(), &mut chosen) {
            return Err(Error::internal("no rainbow matching from the robust vertices to the dropped endpoints"));
        }
        for (e, c) in chosen {
            used[c] = true;
            added.push((e, c));
            matched += 1;
        }
    }

    let meeting_xp = plan.inner.iter().filter(|c| in_xp(c[0])).count() + added.len();
    if meeting_xp != target {
        return Err(Error::internal(format!(
            "extended forest has {meeting_xp} edges meeting X', expected q - 1 = {target}"
        )));
    }
    trace.push(record(
        ctx,
        0,
        0,
        ctx.n - ctx.k - added.len(),
        format!("extended by {} edges ({matched} to dropped endpoints)", added.len()),
    ));
    Ok(Case3Start::Extended(ExtendedForest {
        x,
        y,
        x_prime: x_prime.to_vec(),
        added,
    }))
}

/// Backtracking over endpoint choices: no endpoint twice, no cycle, and `u`, `v`
/// kept in different components.
fn match_robust(
    ctx: &Context<'_>,
    robust: &[(Vertex, Color)],
    ends: &[Vertex],
    dsu: Dsu,
    taken: &mut Vec<Vertex>,
    out: &mut Vec<(Edge, Color)>,
) -> bool {
    let Some(&(z, c)) = robust.first() else {
        return true;
    };
    for &w in ends {
        if taken.contains(&w) || !ctx.has_edge(c, z, w) {
            continue;
        }
        let mut d = dsu.clone();
        if d.find(z) == d.find(w) {
            continue;
        }
        d.union(z, w);
        if d.find(ctx.plan.u) == d.find(ctx.plan.v) {
            continue;
        }
        taken.push(w);
        out.push((Edge::new(z, w), c));
        if match_robust(ctx, &robust[1..], ends, d, taken, out) {
            return true;
        }
        out.pop();
        taken.pop();
    }
    false
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
enum Side {
    X,
    Y,
}

/// Contracts each `X`-part of the extended forest, then links the resulting
/// chains by alternating `X`/`Y` edges from `u` to `v`.
pub(crate) fn case3_contract_and_route(
    ctx: &Context<'_>,
    ext: &ExtendedForest,
    trace: &mut Vec<StageRecord>,
) -> Result<PathCertificate> {
    let n = ctx.n;
    let (u, v) = (ctx.plan.u, ctx.plan.v);
    let side = |z: Vertex| if ext.y.contains(&z) { Side::Y } else { Side::X };
    let mut color: BTreeMap<Edge, Color> = ctx.forest.colored_edges().collect();
    for &(e, c) in &ext.added {
        if color.insert(e, c).is_some() {
            return Err(Error::internal(format!("added edge {e} is already a forest edge")));
        }
    }
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for e in color.keys() {
        adj[e.lo()].push(e.hi());
        adj[e.hi()].push(e.lo());
    }
    if let Some(z) = (0..n).find(|&z| adj[z].len() > 2) {
        return Err(Error::internal(format!("extended forest has degree 3 at {z}")));
    }

    let x_edges = color.keys().filter(|e| side(e.lo()) == Side::X && side(e.hi()) == Side::X).count();
    if ext.x.len() - x_edges != ext.y.len() + 1 {
        return Err(Error::internal(format!(
            "contraction leaves {} X-vertices against {} Y-vertices",
            ext.x.len() - x_edges,
            ext.y.len()
        )));
    }

    let mut seen = vec![false; n];
    let mut chains: Vec<Vec<Vertex>> = Vec::new();
    for s in 0..n {
        if seen[s] || adj[s].len() > 1 {
            continue;
        }
        let mut chain = vec![s];
        seen[s] = true;
        let mut prev = usize::MAX;
        let mut cur = s;
        while let Some(&nx) = adj[cur].iter().find(|&&z| z != prev) {
            chain.push(nx);
            seen[nx] = true;
            prev = cur;
            cur = nx;
        }
        chains.push(chain);
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::internal("extended forest contains a cycle"));
    }
    for c in &chains {
        if c.len() > 2 && c[1..c.len() - 1].iter().any(|&z| side(z) == Side::Y) {
            return Err(Error::internal("a Y-vertex is interior to a forest chain"));
        }
    }

    let take = |chains: &mut Vec<Vec<Vertex>>, t: Vertex| -> Result<Vec<Vertex>> {
        let i = chains
            .iter()
            .position(|c| c.contains(&t))
            .ok_or_else(|| Error::internal("terminal missing from the chains"))?;
        Ok(chains.remove(i))
    };
    let mut ku = take(&mut chains, u)?;
    if ku[0] != u {
        ku.reverse();
    }
    let mut kv = take(&mut chains, v)?;
    if *kv.last().unwrap() != v {
        kv.reverse();
    }
    if ku[0] != u || *kv.last().unwrap() != v {
        return Err(Error::internal("a terminal is interior to its chain"));
    }

    let ends = |c: &Vec<Vertex>| (side(c[0]), side(*c.last().unwrap()));
    let (mut xx, mut yy, mut xy) = (Vec::new(), Vec::new(), Vec::new());
    for c in chains {
        match ends(&c) {
            (Side::X, Side::X) => xx.push(c),
            (Side::Y, Side::Y) => yy.push(c),
            _ => xy.push(c),
        }
    }
    let is_xx = |c: &Vec<Vertex>| ends(c) == (Side::X, Side::X);
    let balance = xx.len() as isize - yy.len() as isize + isize::from(is_xx(&ku)) + isize::from(is_xx(&kv));
    if balance != 1 {
        return Err(Error::internal(format!("chain balance is {balance}, expected 1")));
    }

    let mut seq: Vec<Vec<Vertex>> = vec![ku];
    let mut state = side(*seq[0].last().unwrap());
    for mut c in xy {
        // leave the side unchanged: enter on the opposite side
        if side(c[0]) == state {
            c.reverse();
        }
        seq.push(c);
    }
    xx.reverse();
    yy.reverse();
    while !xx.is_empty() || !yy.is_empty() {
        let next = match state {
            Side::X => yy.pop(),
            Side::Y => xx.pop(),
        }
        .ok_or_else(|| Error::internal("alternation ran out of chains of the needed type"))?;
        state = side(*next.last().unwrap());
        seq.push(next);
    }
    if side(kv[0]) == state {
        return Err(Error::internal("cannot enter the v-chain from the current side"));
    }
    seq.push(kv);

    let mut spare = ctx.retained().iter().copied().filter(|c| !ext.added.iter().any(|&(_, a)| a == *c));
    let mut order = Vec::with_capacity(n);
    let mut colors = Vec::with_capacity(n - 1);
    for chain in &seq {
        if let Some(&last) = order.last() {
            let first = chain[0];
            if side(last) == side(first) {
                return Err(Error::internal(format!("link {last}-{first} stays on one side")));
            }
            let c = spare.next().ok_or_else(|| Error::internal("routing ran out of retained colors"))?;
            if !ctx.has_edge(c, last, first) {
                return Err(Error::internal(format!("link {last}-{first} is absent from color {c}")));
            }
            colors.push(c);
        }
        for w in chain.windows(2) {
            colors.push(color[&Edge::new(w[0], w[1])]);
        }
        order.extend(chain);
    }
    if order.len() != n {
        return Err(Error::internal(format!("routed path has {} vertices", order.len())));
    }
    trace.push(record(ctx, order.len(), n, spare.count(), "routed".into()));
    Ok(PathCertificate { u, v, order, colors })
}
