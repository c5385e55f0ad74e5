//! The constructive pipeline: delete most of the forest, split the remainder
//! into a spanning rainbow path or one of two rigid structures, then rebuild a
//! rainbow Hamiltonian `u,v`-path through the forest or certify that none exists.

mod case1;
mod case2;
mod case3;
mod li2;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{reduce_collection, select_deletion_set, RainbowLinearForest, ReducedCollection, ReductionPlan};
use crate::instance::Instance;
use crate::model::{path_violations, Color, CycleCertificate, GraphCollection, PathCertificate, Vertex};
use crate::structures::{cycle_from_extremal, verify_certificate, ExtremalCertificate};

pub(crate) use case1::{absorb_components, attach_terminal_component};
pub use case1::{TerminalRole, WorkingPath};
pub(crate) use case2::case2_construct;
pub(crate) use case3::{case3_contract_and_route, case3_extend_forest};
pub use case3::{Case3Start, ExtendedForest};
pub use li2::{exhaustive_rainbow_path, li2_dispatch, Li2Outcome};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Try rotation-extension before exhaustive search for the reduced path.
    pub heuristic: bool,
    pub restarts: usize,
    /// Largest reduced vertex count handed to exhaustive search.
    pub fallback_limit: usize,
    pub fallback_nodes: u64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            heuristic: true,
            restarts: 12,
            fallback_limit: 14,
            fallback_nodes: 50_000_000,
            seed: 0x5eed,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Dispatch,
    Absorb,
    AttachU,
    AttachV,
    Case2,
    Case3,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    /// The component already touches a path end.
    Free,
    /// Joined to a path end by one new edge.
    Direct,
    /// Path re-rooted at an interior edge first.
    Rotation,
    Structure,
}

/// One step of the construction, with the accounting it is required to meet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    #[serde(rename = "move")]
    pub mv: Move,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    /// Index `i` of the removed path edge `x_i x_{i+1}` for rotations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slide: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slide_on_forest: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub colors: Vec<Color>,
    pub path_len: usize,
    pub expected_len: usize,
    pub unused: usize,
    pub expected_unused: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl StageRecord {
    pub fn holds(&self) -> bool {
        self.path_len == self.expected_len
            && self.unused == self.expected_unused
            && self.slide_on_forest != Some(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolverOutcome {
    Path(PathCertificate),
    Extremal(ExtremalCertificate),
}

impl SolverOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            SolverOutcome::Path(_) => "path",
            SolverOutcome::Extremal(_) => "extremal",
        }
    }

    pub fn is_path(&self) -> bool {
        matches!(self, SolverOutcome::Path(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub outcome: SolverOutcome,
    pub trace: Vec<StageRecord>,
}

impl Solution {
    pub fn to_json(&self) -> serde_json::Value {
        let cert = match &self.outcome {
            SolverOutcome::Path(p) => serde_json::to_value(p),
            SolverOutcome::Extremal(e) => serde_json::to_value(e),
        }
        .expect("certificate serializes");
        serde_json::json!({
            "outcome": self.outcome.label(),
            "certificate": cert,
            "trace": self.trace,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Solution> {
        let bad = |m: &str| Error::Input(format!("malformed outcome: {m}"));
        let cert = value.get("certificate").cloned().ok_or_else(|| bad("no certificate"))?;
        let outcome = match value.get("outcome").and_then(|o| o.as_str()) {
            Some("path") => SolverOutcome::Path(serde_json::from_value(cert).map_err(|e| bad(&e.to_string()))?),
            Some("extremal") => {
                SolverOutcome::Extremal(serde_json::from_value(cert).map_err(|e| bad(&e.to_string()))?)
            }
            _ => return Err(bad("unknown outcome tag")),
        };
        let trace = match value.get("trace") {
            Some(t) => serde_json::from_value(t.clone()).map_err(|e| bad(&e.to_string()))?,
            None => Vec::new(),
        };
        Ok(Solution { outcome, trace })
    }
}

/// Largest forest size the construction supports on `n` vertices.
pub fn max_forest_edges(n: usize) -> Option<usize> {
    n.checked_sub(4).map(|m| m / 3)
}

/// Rejects inputs outside the theorem's hypotheses.
pub fn check_preconditions(
    collection: &GraphCollection,
    forest: &RainbowLinearForest,
    u: Vertex,
    v: Vertex,
    k: usize,
) -> Result<()> {
    let n = collection.vertex_count();
    if collection.color_count() != n {
        return Err(Error::Shape {
            expected: n,
            found: collection.color_count(),
        });
    }
    if u >= n || v >= n || u == v {
        return Err(Error::Input(format!("terminals {u}, {v} invalid for n = {n}")));
    }
    forest.validate_against(collection)?;
    if forest.edge_count() != k {
        return Err(Error::Input(format!(
            "k = {k} but the forest has {} edges",
            forest.edge_count()
        )));
    }
    if max_forest_edges(n).is_none_or(|m| k > m) {
        return Err(Error::Contract(format!(
            "k = {k} exceeds (n - 4) / 3 for n = {n}; decide this instance with the exact oracle"
        )));
    }
    if !collection.check_hypothesis(k)? {
        return Err(Error::Contract(format!("some color has Ore sum below n + k = {}", n + k)));
    }
    if !forest.is_h_compatible(u, v) {
        return Err(Error::Contract(format!("{u}, {v} is not a compatible pair for the forest")));
    }
    Ok(())
}

/// Shared state of one construction.
pub(crate) struct Context<'a> {
    pub collection: &'a GraphCollection,
    pub forest: &'a RainbowLinearForest,
    pub plan: ReductionPlan,
    pub reduced: ReducedCollection,
    pub n: usize,
    pub k: usize,
}

impl Context<'_> {
    /// The Ore bound `n + k`.
    pub fn bound(&self) -> usize {
        self.n + self.k
    }

    pub fn degree(&self, color: Color, x: Vertex) -> usize {
        self.collection.graph(color).degree(x)
    }

    pub fn has_edge(&self, color: Color, a: Vertex, b: Vertex) -> bool {
        self.collection.graph(color).has_edge(a, b)
    }

    /// Colors outside the forest, sorted.
    pub fn retained(&self) -> &[Color] {
        &self.reduced.color_map
    }
}

fn with_bundle(err: Error, collection: &GraphCollection, forest: &RainbowLinearForest, u: Vertex, v: Vertex) -> Error {
    match err {
        Error::Internal { message, bundle: None } => {
            let inst = Instance::new(collection.clone(), forest.clone(), u, v);
            let bundle = serde_json::json!({
                "message": message,
                "instance": inst.to_json(),
            });
            Error::Internal {
                message,
                bundle: Some(bundle.to_string()),
            }
        }
        e => e,
    }
}

/// Finds a rainbow Hamiltonian `u,v`-path containing the forest with its fixed
/// colors, or a `C2`/`C3` certificate that none exists.
pub fn solve(
    collection: &GraphCollection,
    forest: &RainbowLinearForest,
    u: Vertex,
    v: Vertex,
    k: usize,
) -> Result<Solution> {
    solve_with(collection, forest, u, v, k, &SolverConfig::default())
}

pub fn solve_with(
    collection: &GraphCollection,
    forest: &RainbowLinearForest,
    u: Vertex,
    v: Vertex,
    k: usize,
    cfg: &SolverConfig,
) -> Result<Solution> {
    check_preconditions(collection, forest, u, v, k)?;
    solve_inner(collection, forest, u, v, k, cfg).map_err(|e| with_bundle(e, collection, forest, u, v))
}

fn solve_inner(
    collection: &GraphCollection,
    forest: &RainbowLinearForest,
    u: Vertex,
    v: Vertex,
    k: usize,
    cfg: &SolverConfig,
) -> Result<Solution> {
    let n = collection.vertex_count();
    let plan = select_deletion_set(forest, u, v, n)?;
    let reduced = reduce_collection(collection, &plan)?;
    let dispatch = li2_dispatch(&reduced.collection, cfg)?;
    let ctx = Context {
        collection,
        forest,
        plan,
        reduced,
        n,
        k,
    };
    let mut trace = vec![StageRecord {
        stage: Stage::Dispatch,
        mv: Move::Structure,
        component: None,
        slide: None,
        slide_on_forest: None,
        colors: Vec::new(),
        path_len: ctx.reduced.collection.vertex_count(),
        expected_len: n - k - 2,
        unused: ctx.reduced.collection.color_count(),
        expected_unused: n - k,
        note: Some(dispatch.label().to_string()),
    }];
    let outcome = match dispatch {
        Li2Outcome::A1 { order, colors } => {
            let path = WorkingPath::from_reduced(&ctx, &order, &colors)?;
            let path = absorb_components(&ctx, path, &mut trace)?;
            let path = attach_terminal_component(&ctx, path, TerminalRole::U, &mut trace)?;
            let path = attach_terminal_component(&ctx, path, TerminalRole::V, &mut trace)?;
            SolverOutcome::Path(path.into_certificate(u, v)?)
        }
        Li2Outcome::A2 { x, y, .. } => case2_construct(&ctx, &x, &y, &mut trace)?,
        Li2Outcome::A3 { x, y } => {
            let x: Vec<Vertex> = x.iter().map(|&i| ctx.reduced.vertex_map[i]).collect();
            let y: Vec<Vertex> = y.iter().map(|&i| ctx.reduced.vertex_map[i]).collect();
            match case3_extend_forest(&ctx, &x, &y, &mut trace)? {
                Case3Start::Blocked(cert) => SolverOutcome::Extremal(cert),
                Case3Start::Extended(ext) => {
                    SolverOutcome::Path(case3_contract_and_route(&ctx, &ext, &mut trace)?)
                }
            }
        }
    };
    match &outcome {
        SolverOutcome::Path(cert) => {
            let bad = path_violations(collection, cert, Some(forest));
            if !bad.is_empty() {
                let list: Vec<String> = bad.iter().map(|b| b.to_string()).collect();
                return Err(Error::internal(format!("constructed path is invalid: {}", list.join("; "))));
            }
        }
        SolverOutcome::Extremal(cert) => {
            if !verify_certificate(collection, forest, cert)? {
                return Err(Error::internal(format!("{} certificate fails verification", cert.kind)));
            }
        }
    }
    Ok(Solution { outcome, trace })
}

/// The forest-free case: a rainbow Hamiltonian `u,v`-path or a `B2`/`B3` certificate.
pub fn solve_pair(collection: &GraphCollection, u: Vertex, v: Vertex) -> Result<Solution> {
    solve_pair_with(collection, u, v, &SolverConfig::default())
}

pub fn solve_pair_with(collection: &GraphCollection, u: Vertex, v: Vertex, cfg: &SolverConfig) -> Result<Solution> {
    let empty = RainbowLinearForest::empty();
    let mut sol = solve_with(collection, &empty, u, v, 0, cfg)?;
    if let SolverOutcome::Extremal(cert) = sol.outcome {
        let cert = cert.retag_for_pair();
        if !verify_certificate(collection, &empty, &cert)? {
            return Err(with_bundle(
                Error::internal(format!("{} certificate fails verification", cert.kind)),
                collection,
                &empty,
                u,
                v,
            ));
        }
        sol.outcome = SolverOutcome::Extremal(cert);
    }
    Ok(sol)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CycleOrConnected {
    /// A rainbow Hamiltonian cycle, built from the first blocked pair's structure.
    Cycle {
        cycle: CycleCertificate,
        source: ExtremalCertificate,
    },
    /// A rainbow Hamiltonian path for every pair `u < v`.
    Connected(BTreeMap<(Vertex, Vertex), PathCertificate>),
}

/// Either a rainbow Hamiltonian cycle or a path between every pair of vertices.
pub fn hamiltonian_or_connected(collection: &GraphCollection) -> Result<CycleOrConnected> {
    hamiltonian_or_connected_with(collection, &SolverConfig::default())
}

pub fn hamiltonian_or_connected_with(collection: &GraphCollection, cfg: &SolverConfig) -> Result<CycleOrConnected> {
    let n = collection.vertex_count();
    let mut paths = BTreeMap::new();
    for u in 0..n {
        for v in u + 1..n {
            match solve_pair_with(collection, u, v, cfg)?.outcome {
                SolverOutcome::Path(p) => {
                    paths.insert((u, v), p);
                }
                SolverOutcome::Extremal(cert) => {
                    let cycle = cycle_from_extremal(collection, &cert)?;
                    return Ok(CycleOrConnected::Cycle { cycle, source: cert });
                }
            }
        }
    }
    Ok(CycleOrConnected::Connected(paths))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::model::validate_path_certificate;
    use crate::structures::ExtremalKind;

    fn complete(n: usize) -> GraphCollection {
        GraphCollection::identical(Graph::complete(n), n)
    }

    #[test]
    fn complete_collection_with_one_edge_forest() {
        let c = complete(7);
        let h = RainbowLinearForest::from_colored_paths(&[&[5, 6]], &[6]).unwrap();
        let sol = solve(&c, &h, 0, 1, 1).unwrap();
        let SolverOutcome::Path(p) = &sol.outcome else { panic!("expected a path") };
        assert!(validate_path_certificate(&c, p, Some(&h)));
        assert!(sol.trace.iter().all(StageRecord::holds));
    }

    #[test]
    fn blocked_pairs() {
        let k22 = GraphCollection::identical(Graph::from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap(), 4);
        let sol = solve_pair(&k22, 0, 1).unwrap();
        let SolverOutcome::Extremal(cert) = &sol.outcome else { panic!() };
        assert_eq!(cert.kind, ExtremalKind::B3);

        let b2 = GraphCollection::identical(
            Graph::from_edges(5, [(2, 3), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap(),
            5,
        );
        let sol = solve_pair(&b2, 0, 1).unwrap();
        let SolverOutcome::Extremal(cert) = &sol.outcome else { panic!() };
        assert_eq!(cert.kind, ExtremalKind::B2);
        assert_eq!((cert.x.clone(), cert.y.clone()), (vec![2, 3], vec![4]));
    }

    #[test]
    fn cycle_or_connected_examples() {
        let k22 = GraphCollection::identical(Graph::from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap(), 4);
        assert!(matches!(hamiltonian_or_connected(&k22).unwrap(), CycleOrConnected::Cycle { .. }));
        let CycleOrConnected::Connected(map) = hamiltonian_or_connected(&complete(6)).unwrap() else {
            panic!()
        };
        assert_eq!(map.len(), 15);
    }

    #[test]
    fn precondition_errors() {
        let c = complete(6);
        let h = RainbowLinearForest::from_colored_paths(&[&[0, 2, 1]], &[0, 1]).unwrap();
        assert!(matches!(solve(&c, &h, 0, 1, 2), Err(Error::Contract(_))));
        let e = RainbowLinearForest::empty();
        assert!(matches!(solve(&c, &e, 0, 1, 1), Err(Error::Input(_))));
        let short = GraphCollection::identical(Graph::complete(6), 5);
        assert!(matches!(solve(&short, &e, 0, 1, 0), Err(Error::Shape { .. })));
        let sparse = GraphCollection::identical(Graph::empty(6), 6);
        assert!(matches!(solve(&sparse, &e, 0, 1, 0), Err(Error::Contract(_))));
    }

    #[test]
    fn outcome_json_round_trip() {
        let sol = solve_pair(&complete(5), 0, 4).unwrap();
        let j = sol.to_json();
        assert_eq!(j["outcome"], "path");
        assert_eq!(Solution::from_json(&j).unwrap(), sol);
    }
}
