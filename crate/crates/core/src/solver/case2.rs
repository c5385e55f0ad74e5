//! The clique-split case: the reduced vertices form two cliques in every
//! retained color and every deleted vertex sees all of them.

use super::{Context, Move, SolverOutcome, Stage, StageRecord};
use crate::error::{Error, Result};
use crate::graph::Edge;
use crate::model::{Color, PathCertificate, Vertex};
use crate::structures::{ExtremalCertificate, ExtremalKind};

/// `x`, `y` are reduced ids. Returns the `C2` certificate when the forest has no
/// inner components, else a path through one side, then the other.
pub(crate) fn case2_construct(
    ctx: &Context<'_>,
    x: &[Vertex],
    y: &[Vertex],
    trace: &mut Vec<StageRecord>,
) -> Result<SolverOutcome> {
    let map = |s: &[Vertex]| -> Vec<Vertex> { s.iter().map(|&i| ctx.reduced.vertex_map[i]).collect() };
    let (x, y) = (map(x), map(y));
    let plan = &ctx.plan;
    if plan.q() == 0 {
        trace.push(StageRecord {
            stage: Stage::Case2,
            mv: Move::Structure,
            component: None,
            slide: None,
            slide_on_forest: None,
            colors: Vec::new(),
            path_len: 0,
            expected_len: 0,
            unused: ctx.n - ctx.k,
            expected_unused: ctx.n - ctx.k,
            note: Some("C2".into()),
        });
        let cert = ExtremalCertificate::new(ExtremalKind::C2, x, y).with_pair(plan.u, plan.v);
        return Ok(SolverOutcome::Extremal(cert));
    }

    let anchors = plan.kept_endpoints();
    let in_w = |z: &Vertex| anchors.contains(z);
    let (a, b) = if x.iter().any(in_w) && !y.iter().all(in_w) {
        (x, y)
    } else {
        (y, x)
    };
    if !a.iter().any(in_w) || b.iter().all(in_w) {
        return Err(Error::internal("neither clique side can end the first run at an anchor"));
    }
    // the first run ends at an anchor, the second does not
    let run_a: Vec<Vertex> = a.iter().filter(|z| !in_w(z)).chain(a.iter().filter(|z| in_w(z))).copied().collect();
    let run_b: Vec<Vertex> = b.iter().filter(|z| in_w(z)).chain(b.iter().filter(|z| !in_w(z))).copied().collect();

    let mut order: Vec<Vertex> = plan.terminal_u.clone();
    for &z in run_a.iter().chain(&run_b) {
        match plan.inner.iter().find(|c| c[0] == z) {
            Some(comp) => order.extend(comp),
            None => order.push(z),
        }
    }
    order.extend(plan.terminal_v.iter().rev());
    if order.len() != ctx.n {
        return Err(Error::internal(format!("clique-split path has {} vertices", order.len())));
    }

    let mut spare = ctx.retained().iter().copied();
    let mut colors: Vec<Color> = Vec::with_capacity(ctx.n - 1);
    for w in order.windows(2) {
        let e = Edge::new(w[0], w[1]);
        let c = match ctx.forest.color_of(e) {
            Some(c) => c,
            None => spare
                .next()
                .ok_or_else(|| Error::internal("clique-split path ran out of retained colors"))?,
        };
        if !ctx.has_edge(c, w[0], w[1]) {
            return Err(Error::internal(format!("clique-split edge {e} is absent from color {c}")));
        }
        colors.push(c);
    }
    trace.push(StageRecord {
        stage: Stage::Case2,
        mv: Move::Structure,
        component: None,
        slide: None,
        slide_on_forest: None,
        colors: Vec::new(),
        path_len: order.len(),
        expected_len: ctx.n,
        unused: spare.count(),
        expected_unused: 1,
        note: None,
    });
    Ok(SolverOutcome::Path(PathCertificate {
        u: plan.u,
        v: plan.v,
        order,
        colors,
    }))
}
