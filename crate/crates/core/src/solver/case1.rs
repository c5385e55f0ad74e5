//! Growing the reduced spanning path back over the deleted forest vertices:
//! absorb every inner component, then hang the two terminal components off the
//! ends. Each step either joins directly at a path end or first re-roots the path
//! at an interior edge that is not a forest edge.

use super::{Context, Move, Stage, StageRecord};
use crate::error::{Error, Result};
use crate::graph::Edge;
use crate::model::{Color, PathCertificate, Vertex};

/// A rainbow path under construction. `colors[i]` colors `order[i] order[i+1]`
/// and `on_forest[i]` marks forest edges, which are never cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkingPath {
    pub order: Vec<Vertex>,
    pub colors: Vec<Color>,
    pub on_forest: Vec<bool>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TerminalRole {
    U,
    V,
}

impl WorkingPath {
    pub(crate) fn from_reduced(ctx: &Context<'_>, order: &[Vertex], colors: &[Color]) -> Result<WorkingPath> {
        if order.len() != colors.len() + 1 {
            return Err(Error::internal("reduced path has mismatched colors"));
        }
        let path = WorkingPath {
            order: order.iter().map(|&x| ctx.reduced.vertex_map[x]).collect(),
            colors: colors.iter().map(|&c| ctx.reduced.color_map[c]).collect(),
            on_forest: vec![false; colors.len()],
        };
        path.check(ctx)?;
        Ok(path)
    }

    /// A forest component as a path of its fixed colors.
    fn component(ctx: &Context<'_>, comp: &[Vertex]) -> Result<WorkingPath> {
        let colors = comp
            .windows(2)
            .map(|w| {
                ctx.forest
                    .color_of(Edge::new(w[0], w[1]))
                    .ok_or_else(|| Error::internal(format!("{}-{} is not a forest edge", w[0], w[1])))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WorkingPath {
            order: comp.to_vec(),
            on_forest: vec![true; colors.len()],
            colors,
        })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn reversed(&self) -> WorkingPath {
        let mut p = self.clone();
        p.order.reverse();
        p.colors.reverse();
        p.on_forest.reverse();
        p
    }

    fn position(&self, x: Vertex) -> Option<usize> {
        self.order.iter().position(|&y| y == x)
    }

    /// Colors of `[0, n)` used neither by the path nor by the forest.
    fn unused(&self, ctx: &Context<'_>) -> Vec<Color> {
        let mut used = vec![false; ctx.n];
        for &c in self.colors.iter().chain(&ctx.plan.forest_colors) {
            used[c] = true;
        }
        (0..ctx.n).filter(|&c| !used[c]).collect()
    }

    fn check(&self, ctx: &Context<'_>) -> Result<()> {
        let mut seen_v = vec![false; ctx.n];
        for &x in &self.order {
            if std::mem::replace(&mut seen_v[x], true) {
                return Err(Error::internal(format!("vertex {x} repeated on the working path")));
            }
        }
        let mut seen_c = vec![false; ctx.n];
        for (i, &c) in self.colors.iter().enumerate() {
            let (a, b) = (self.order[i], self.order[i + 1]);
            if !ctx.has_edge(c, a, b) {
                return Err(Error::internal(format!("working path edge {a}-{b} is absent from color {c}")));
            }
            if std::mem::replace(&mut seen_c[c], true) {
                return Err(Error::internal(format!("color {c} repeated on the working path")));
            }
            let fixed = ctx.forest.color_of(Edge::new(a, b));
            if self.on_forest[i] && fixed != Some(c) {
                return Err(Error::internal(format!("forest edge {a}-{b} lost its color")));
            }
        }
        Ok(())
    }

    pub fn into_certificate(self, u: Vertex, v: Vertex) -> Result<PathCertificate> {
        if self.order.first() != Some(&u) || self.order.last() != Some(&v) {
            return Err(Error::internal("finished path does not run from u to v"));
        }
        Ok(PathCertificate {
            u,
            v,
            order: self.order,
            colors: self.colors,
        })
    }
}

struct Build {
    path: WorkingPath,
}

impl Build {
    fn new() -> Self {
        Build {
            path: WorkingPath {
                order: Vec::new(),
                colors: Vec::new(),
                on_forest: Vec::new(),
            },
        }
    }

    /// Appends `p[from..=to]`, walking in either direction. With `link` the first
    /// vertex is joined by a new edge of that color; without it the first vertex
    /// must repeat the current last vertex and is shared.
    fn seg(mut self, p: &WorkingPath, from: usize, to: usize, link: Option<Color>) -> Self {
        let out = &mut self.path;
        match link {
            Some(c) => {
                out.colors.push(c);
                out.on_forest.push(false);
                out.order.push(p.order[from]);
            }
            None if out.order.is_empty() => out.order.push(p.order[from]),
            None => debug_assert_eq!(out.order.last(), Some(&p.order[from])),
        }
        let mut a = from;
        while a != to {
            let (b, e) = if to > a { (a + 1, a) } else { (a - 1, a - 1) };
            out.order.push(p.order[b]);
            out.colors.push(p.colors[e]);
            out.on_forest.push(p.on_forest[e]);
            a = b;
        }
        self
    }

    fn all(self, p: &WorkingPath, link: Option<Color>) -> Self {
        self.seg(p, 0, p.len() - 1, link)
    }

    fn all_rev(self, p: &WorkingPath, link: Option<Color>) -> Self {
        self.seg(p, p.len() - 1, 0, link)
    }

    fn done(self) -> WorkingPath {
        self.path
    }
}

struct Step {
    path: WorkingPath,
    mv: Move,
    slide: Option<usize>,
    slide_on_forest: Option<bool>,
    colors: Vec<Color>,
}

/// First ordered pair `(a1, a2)` of distinct unused colors meeting the degree sum.
fn rotation_colors(ctx: &Context<'_>, s: &[Color], end: Vertex, w: Vertex) -> Option<(Color, Color)> {
    s.iter()
        .flat_map(|&a1| s.iter().map(move |&a2| (a1, a2)))
        .find(|&(a1, a2)| a1 != a2 && ctx.degree(a2, end) + ctx.degree(a1, w) >= ctx.bound())
}

/// Smallest interior `i` with `x_i ~ w` in `a1`, `x_{i+1} ~ x_0` in `a2`, and
/// `x_i x_{i+1}` not a forest edge.
fn slide_index(ctx: &Context<'_>, p: &WorkingPath, w: Vertex, a1: Color, a2: Color) -> Option<usize> {
    let len = p.len();
    (1..len.saturating_sub(1)).find(|&i| {
        !p.on_forest[i] && ctx.has_edge(a1, p.order[i], w) && ctx.has_edge(a2, p.order[i + 1], p.order[0])
    })
}

/// Splices the inner component `h` (oriented `v_t .. w_t`, `v_t` on the path)
/// into `p` using the path end `x_0`.
fn absorb_at_start(ctx: &Context<'_>, p: &WorkingPath, h: &WorkingPath, s: &[Color]) -> Result<Option<Step>> {
    let w = *h.order.last().unwrap();
    let j = p
        .position(h.order[0])
        .ok_or_else(|| Error::internal("kept endpoint is missing from the working path"))?;
    let last = p.len() - 1;
    if j == 0 || j == last {
        let path = if j == 0 {
            Build::new().all_rev(h, None).all(p, None).done()
        } else {
            Build::new().all(p, None).all(h, None).done()
        };
        return Ok(Some(Step {
            path,
            mv: Move::Free,
            slide: None,
            slide_on_forest: None,
            colors: Vec::new(),
        }));
    }
    if let Some(&a) = s.iter().find(|&&a| ctx.has_edge(a, p.order[0], w)) {
        return Ok(Some(Step {
            path: Build::new()
                .seg(p, j - 1, 0, None)
                .all_rev(h, Some(a))
                .seg(p, j, last, None)
                .done(),
            mv: Move::Direct,
            slide: None,
            slide_on_forest: None,
            colors: vec![a],
        }));
    }
    let Some((a1, a2)) = rotation_colors(ctx, s, p.order[0], w) else {
        return Ok(None);
    };
    let Some(i) = slide_index(ctx, p, w, a1, a2) else {
        return Ok(None);
    };
    let b = Build::new();
    let (path, colors) = if i + 2 <= j {
        let path = b
            .seg(p, j - 1, i + 1, None)
            .seg(p, 0, i, Some(a2))
            .all_rev(h, Some(a1))
            .seg(p, j, last, None)
            .done();
        (path, vec![a1, a2])
    } else if i + 1 == j {
        (b.seg(p, 0, i, None).all_rev(h, Some(a1)).seg(p, j, last, None).done(), vec![a1])
    } else if i == j {
        (b.all_rev(h, None).seg(p, i, 0, None).seg(p, i + 1, last, Some(a2)).done(), vec![a2])
    } else {
        let path = b
            .seg(p, j + 1, i, None)
            .all_rev(h, Some(a1))
            .seg(p, j, 0, None)
            .seg(p, i + 1, last, Some(a2))
            .done();
        (path, vec![a1, a2])
    };
    Ok(Some(Step {
        path,
        mv: Move::Rotation,
        slide: Some(i),
        slide_on_forest: Some(p.on_forest[i]),
        colors,
    }))
}

/// Prepends the terminal component `h` (oriented `t .. w_t`) to `p` at `x_0`.
fn attach_at_start(ctx: &Context<'_>, p: &WorkingPath, h: &WorkingPath, s: &[Color]) -> Option<Step> {
    let w = *h.order.last().unwrap();
    if let Some(&a) = s.iter().find(|&&a| ctx.has_edge(a, p.order[0], w)) {
        return Some(Step {
            path: Build::new().all(h, None).all(p, Some(a)).done(),
            mv: Move::Direct,
            slide: None,
            slide_on_forest: None,
            colors: vec![a],
        });
    }
    let (a1, a2) = rotation_colors(ctx, s, p.order[0], w)?;
    let i = slide_index(ctx, p, w, a1, a2)?;
    let path = Build::new()
        .all(h, None)
        .seg(p, i, 0, Some(a1))
        .seg(p, i + 1, p.len() - 1, Some(a2))
        .done();
    Some(Step {
        path,
        mv: Move::Rotation,
        slide: Some(i),
        slide_on_forest: Some(p.on_forest[i]),
        colors: vec![a1, a2],
    })
}

fn record(
    ctx: &Context<'_>,
    stage: Stage,
    component: Option<usize>,
    step: &Step,
    expected_len: usize,
    expected_unused: usize,
) -> Result<StageRecord> {
    step.path.check(ctx)?;
    let rec = StageRecord {
        stage,
        mv: step.mv,
        component,
        slide: step.slide,
        slide_on_forest: step.slide_on_forest,
        colors: step.colors.clone(),
        path_len: step.path.len(),
        expected_len,
        unused: step.path.unused(ctx).len(),
        expected_unused,
        note: None,
    };
    if !rec.holds() {
        return Err(Error::internal(format!(
            "{stage:?} step broke its accounting: length {} (want {}), unused {} (want {}), slide on forest {:?}",
            rec.path_len, rec.expected_len, rec.unused, rec.expected_unused, rec.slide_on_forest
        )));
    }
    Ok(rec)
}

/// Absorbs every inner forest component, smallest id first, keeping exactly
/// three colors unused.
pub(crate) fn absorb_components(
    ctx: &Context<'_>,
    mut path: WorkingPath,
    trace: &mut Vec<StageRecord>,
) -> Result<WorkingPath> {
    let mut expected_len = ctx.n - ctx.k - 2;
    for (t, comp) in ctx.plan.inner.iter().enumerate() {
        let h = WorkingPath::component(ctx, comp)?;
        let s = path.unused(ctx);
        let step = match absorb_at_start(ctx, &path, &h, &s)? {
            Some(step) if step.mv != Move::Rotation => Some(step),
            first => {
                // a direct join at the far end beats rotating at the near one
                let rev = path.reversed();
                let w = *h.order.last().unwrap();
                if let Some(&a) = s.iter().find(|&&a| ctx.has_edge(a, rev.order[0], w)) {
                    absorb_at_start(ctx, &rev, &h, &[a])?
                } else {
                    match first {
                        Some(step) => Some(step),
                        None => absorb_at_start(ctx, &rev, &h, &s)?,
                    }
                }
            }
        };
        let step = step.ok_or_else(|| {
            Error::internal(format!("no slide position for component {t}; the rotation bound failed"))
        })?;
        expected_len += h.len() - 1;
        trace.push(record(ctx, Stage::Absorb, Some(t), &step, expected_len, 3)?);
        path = step.path;
    }
    Ok(path)
}

/// Hangs `H_u` (role `U`) or `H_v` (role `V`) off the path. After `U` the path
/// ends at `u`; after `V` it runs from `u` to `v`.
pub(crate) fn attach_terminal_component(
    ctx: &Context<'_>,
    path: WorkingPath,
    role: TerminalRole,
    trace: &mut Vec<StageRecord>,
) -> Result<WorkingPath> {
    let (comp, stage) = match role {
        TerminalRole::U => (&ctx.plan.terminal_u, Stage::AttachU),
        TerminalRole::V => (&ctx.plan.terminal_v, Stage::AttachV),
    };
    let h = WorkingPath::component(ctx, comp)?;
    let s = path.unused(ctx);
    let step = match role {
        TerminalRole::U => {
            let rev = path.reversed();
            let w = *h.order.last().unwrap();
            let far = s.iter().any(|&a| ctx.has_edge(a, rev.order[0], w));
            let near = s.iter().any(|&a| ctx.has_edge(a, path.order[0], w));
            if !near && far {
                attach_at_start(ctx, &rev, &h, &s)
            } else {
                attach_at_start(ctx, &path, &h, &s).or_else(|| attach_at_start(ctx, &rev, &h, &s))
            }
        }
        // the far end is u, which must stay an end
        TerminalRole::V => attach_at_start(ctx, &path, &h, &s),
    };
    let step = step.ok_or_else(|| {
        Error::internal(format!("no slide position while attaching the {role:?} terminal component"))
    })?;
    let (expected_len, expected_unused) = match role {
        TerminalRole::U => (path.len() + h.len(), 2),
        TerminalRole::V => (ctx.n, 1),
    };
    trace.push(record(ctx, stage, None, &step, expected_len, expected_unused)?);
    Ok(step.path.reversed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{reduce_collection, select_deletion_set, RainbowLinearForest};
    use crate::graph::Graph;
    use crate::model::GraphCollection;

    fn context<'a>(c: &'a GraphCollection, h: &'a RainbowLinearForest, u: Vertex, v: Vertex) -> Context<'a> {
        let n = c.vertex_count();
        let plan = select_deletion_set(h, u, v, n).unwrap();
        let reduced = reduce_collection(c, &plan).unwrap();
        Context {
            collection: c,
            forest: h,
            plan,
            reduced,
            n,
            k: h.edge_count(),
        }
    }

    #[test]
    fn builder_walks_both_directions() {
        let p = WorkingPath {
            order: vec![10, 11, 12, 13],
            colors: vec![0, 1, 2],
            on_forest: vec![false, true, false],
        };
        let q = Build::new().seg(&p, 2, 0, None).seg(&p, 3, 3, Some(7)).done();
        assert_eq!(q.order, vec![12, 11, 10, 13]);
        assert_eq!(q.colors, vec![1, 0, 7]);
        assert_eq!(q.on_forest, vec![true, false, false]);
        let r = Build::new().seg(&p, 0, 1, None).seg(&p, 1, 3, None).done();
        assert_eq!(r, p);
    }

    #[test]
    fn direct_absorption_on_complete_collection() {
        let c = GraphCollection::identical(Graph::complete(7), 7);
        let h = RainbowLinearForest::from_colored_paths(&[&[5, 6]], &[6]).unwrap();
        let ctx = context(&c, &h, 0, 1);
        let p = WorkingPath::from_reduced(&ctx, &[0, 1, 2, 3], &[0, 1, 2]).unwrap();
        assert_eq!(p.order, vec![2, 3, 4, 5]);
        let mut trace = Vec::new();
        let p = absorb_components(&ctx, p, &mut trace).unwrap();
        assert_eq!(p.order, vec![2, 3, 4, 5, 6]);
        assert_eq!(trace[0].mv, Move::Free);
        let p = attach_terminal_component(&ctx, p, TerminalRole::U, &mut trace).unwrap();
        assert_eq!(*p.order.last().unwrap(), 0);
        let p = attach_terminal_component(&ctx, p, TerminalRole::V, &mut trace).unwrap();
        assert_eq!((p.order[0], *p.order.last().unwrap()), (0, 1));
        assert!(trace.iter().all(StageRecord::holds));
        assert_eq!(trace.last().unwrap().unused, 1);
    }

    #[test]
    fn rotation_absorbs_a_component_far_from_the_ends() {
        // 5-6 hangs off the middle vertex 5; w = 6 sees only interior vertices in the path colors
        let n = 7;
        let mut g = Graph::complete(n);
        for x in [2, 4] {
            g.remove_edge(6, x);
        }
        let mut graphs = vec![g; n];
        graphs[6] = Graph::from_edges(n, [(5, 6)]).unwrap();
        let c = GraphCollection::new(n, graphs).unwrap();
        let h = RainbowLinearForest::from_colored_paths(&[&[5, 6]], &[6]).unwrap();
        let ctx = context(&c, &h, 0, 1);
        let p = WorkingPath::from_reduced(&ctx, &[0, 3, 1, 2], &[0, 1, 2]).unwrap();
        assert_eq!(p.order, vec![2, 5, 3, 4]);
        let mut trace = Vec::new();
        let p = absorb_components(&ctx, p, &mut trace).unwrap();
        p.check(&ctx).unwrap();
        assert!(p.order.windows(2).any(|w| Edge::new(w[0], w[1]) == Edge::new(5, 6)));
        assert_eq!(trace[0].mv, Move::Rotation);
        assert!(trace[0].holds());
    }
}
