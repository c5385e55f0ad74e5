//! The theorem verification suite: canonical builds, random instances solved
//! and cross-checked against the exact oracle, and all-pairs runs.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use rainbow_ham::gen::{BuilderKind, GenSpec, Model};
use rainbow_ham::oracle::{exact_rainbow_ham_cycle, exact_rainbow_ham_path, Decision, OracleBudget, OracleOptions};
use rainbow_ham::solver::{
    hamiltonian_or_connected_with, max_forest_edges, solve_pair_with, solve_with, CycleOrConnected, Solution,
    SolverConfig, SolverOutcome,
};
use rainbow_ham::{Error, ExtremalKind, Instance, Result};

use crate::pool::{density, item_seed, run_indexed};
use crate::report::{certificate_valid, Record, Report, Source, Status, Task};

/// Deliberate corruption of solver output, to confirm the suite notices.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Paths reuse their first color; extremal certificates lose their first side.
    CorruptCertificates,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub n_min: usize,
    pub n_max: usize,
    /// Largest forest size drawn for random instances.
    pub k_max: usize,
    pub samples: usize,
    pub all_pairs_samples: usize,
    /// Instances up to this size are cross-checked with the oracle.
    pub oracle_max_n: usize,
    pub builders: bool,
    pub seed: u64,
    pub node_limit: u64,
    pub seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
    pub timing: bool,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec {
            n_min: 5,
            n_max: 9,
            k_max: 1,
            samples: 400,
            all_pairs_samples: 50,
            oracle_max_n: 8,
            builders: true,
            seed: 1,
            node_limit: OracleBudget::default().node_limit,
            seconds: OracleBudget::default().time_limit.as_secs_f64(),
            fault: None,
            timing: false,
        }
    }
}

impl SuiteSpec {
    pub fn oracle_options(&self) -> OracleOptions {
        OracleOptions {
            budget: OracleBudget {
                node_limit: self.node_limit,
                time_limit: Duration::from_secs_f64(self.seconds),
            },
            ..OracleOptions::default()
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            seed: self.seed,
            ..SolverConfig::default()
        }
    }

    /// Every item of the suite, in report order.
    pub fn items(&self) -> Vec<(Task, Source)> {
        let mut items = Vec::new();
        if self.builders {
            for n in [4, 6, 8] {
                items.push((Task::Solve, Source::Builder { kind: BuilderKind::B3, n, k: 0 }));
            }
            for n in 4..=8 {
                items.push((Task::Solve, Source::Builder { kind: BuilderKind::B2, n, k: 0 }));
            }
            for (kind, n, k) in [
                (BuilderKind::C2, 7, 1),
                (BuilderKind::C2, 10, 2),
                (BuilderKind::C3, 7, 1),
                (BuilderKind::C3, 10, 2),
            ] {
                items.push((Task::Solve, Source::Builder { kind, n, k }));
            }
            for n in [5, 7, 9] {
                items.push((Task::Control, Source::Builder { kind: BuilderKind::DiracControl, n, k: 0 }));
            }
        }
        let span = self.n_max + 1 - self.n_min;
        for i in 0..self.samples {
            let seed = item_seed(self.seed, i);
            let n = self.n_min + i % span;
            let kmax = max_forest_edges(n).unwrap_or(0).min(self.k_max);
            let k = (i / span) % (kmax + 1);
            items.push((Task::Solve, Source::Random { spec: random_spec(n, k, i, seed) }));
        }
        for i in 0..self.all_pairs_samples {
            let seed = item_seed(self.seed ^ 0xc0, i);
            let n = self.n_min + i % span;
            let p = density(seed, 0.1, 0.7);
            items.push((Task::AllPairs, Source::Ore { n, bound: n, p, seed }));
        }
        items
    }
}

/// Rotates through the generator models; perturbed builds fall back to uniform
/// sampling at sizes their builder rejects.
pub fn random_spec(n: usize, k: usize, i: usize, seed: u64) -> GenSpec {
    let p = density(seed, 0.1, 0.9);
    let model = match i % 5 {
        0 | 1 => Model::UniformSupergraph { p },
        2 => Model::Identical {
            base: rainbow_ham::gen::Base::Random { p },
        },
        _ => {
            let kind = match (k, i % 2) {
                (0, 0) => BuilderKind::B2,
                (0, _) => BuilderKind::B3,
                (_, 0) => BuilderKind::C2,
                _ => BuilderKind::C3,
            };
            Model::PerturbedExtremal {
                kind,
                flips: 1 + (seed % 4) as usize,
            }
        }
    };
    let spec = GenSpec { n, k, model, seed };
    match rainbow_ham::gen::random_instance(&spec) {
        Ok(_) => spec,
        Err(_) => GenSpec {
            model: Model::UniformSupergraph { p },
            ..spec
        },
    }
}

/// Certificate kinds a canonical build may be reported as. On four vertices
/// the `B2` build is the `B3` build.
fn expected_kinds(source: &Source) -> Option<Vec<ExtremalKind>> {
    match *source {
        Source::Builder { kind, n, .. } => match kind {
            BuilderKind::B2 if n == 4 => Some(vec![ExtremalKind::B2, ExtremalKind::B3]),
            BuilderKind::B2 => Some(vec![ExtremalKind::B2]),
            BuilderKind::B3 => Some(vec![ExtremalKind::B3]),
            BuilderKind::C2 => Some(vec![ExtremalKind::C2]),
            BuilderKind::C3 => Some(vec![ExtremalKind::C3]),
            BuilderKind::DiracControl => None,
        },
        _ => None,
    }
}

fn inject(fault: Option<Fault>, sol: &mut Solution) {
    if fault != Some(Fault::CorruptCertificates) {
        return;
    }
    match &mut sol.outcome {
        SolverOutcome::Path(p) if p.colors.len() > 1 => p.colors[1] = p.colors[0],
        SolverOutcome::Path(p) => p.order.reverse(),
        SolverOutcome::Extremal(e) => e.x.clear(),
    }
}

/// Solves an instance the way the suite and the CLI do: forest-free instances
/// go through the pair solver so `B2`/`B3` shapes are reported as such.
pub fn solve_instance(inst: &Instance, cfg: &SolverConfig) -> Result<Solution> {
    if inst.k == 0 && inst.forest.is_empty() {
        solve_pair_with(&inst.collection, inst.u, inst.v, cfg)
    } else {
        solve_with(&inst.collection, &inst.forest, inst.u, inst.v, inst.k, cfg)
    }
}

fn outcome_fields(rec: &mut Record, sol: &Solution) {
    match &sol.outcome {
        SolverOutcome::Path(p) => {
            rec.outcome = "path".into();
            rec.set_certificate(serde_json::to_value(p).expect("path serializes"));
        }
        SolverOutcome::Extremal(e) => {
            rec.outcome = "extremal".into();
            rec.kind = Some(e.kind.to_string());
            rec.set_certificate(serde_json::to_value(e).expect("certificate serializes"));
        }
    }
}

fn run_solve(spec: &SuiteSpec, rec: &mut Record, inst: &Instance) -> Result<()> {
    if !inst.collection.check_hypothesis(inst.k)? {
        rec.note = Some("instance fails the hypothesis".into());
        return Ok(());
    }
    let mut sol = match solve_instance(inst, &spec.solver_config()) {
        Ok(sol) => sol,
        Err(e) if e.is_budget() => {
            rec.outcome = "unknown".into();
            rec.status = Status::Unknown;
            rec.note = Some(e.to_string());
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    inject(spec.fault, &mut sol);
    outcome_fields(rec, &sol);
    let valid = certificate_valid(inst, &rec.outcome, rec.certificate.as_ref().expect("set above"))?;
    rec.valid = Some(valid);
    let mut ok = valid && sol.trace.iter().all(|r| r.holds());
    if let Some(want) = expected_kinds(&rec.source) {
        let got = match &sol.outcome {
            SolverOutcome::Extremal(e) => Some(e.kind),
            SolverOutcome::Path(_) => None,
        };
        if !got.is_some_and(|g| want.contains(&g)) {
            ok = false;
            rec.note = Some(format!("expected a {} certificate", want[0]));
        }
    }
    let mut unknown = false;
    if inst.collection.vertex_count() <= spec.oracle_max_n {
        let (d, _) = exact_rainbow_ham_path(&inst.collection, inst.u, inst.v, &inst.forest, &spec.oracle_options())?;
        rec.oracle = Some(d.label().into());
        match d {
            Decision::Unknown => unknown = true,
            d => {
                let agree = d.is_found() == sol.outcome.is_path();
                rec.agree = Some(agree);
                ok &= agree;
            }
        }
    }
    rec.status = match (ok, unknown) {
        (false, _) => Status::Violation,
        (true, true) => Status::Unknown,
        (true, false) => Status::Pass,
    };
    Ok(())
}

fn run_all_pairs(spec: &SuiteSpec, rec: &mut Record, inst: &Instance) -> Result<()> {
    let c = &inst.collection;
    if !c.check_hypothesis(0)? {
        rec.outcome = "excluded".into();
        rec.status = Status::Excluded;
        return Ok(());
    }
    match hamiltonian_or_connected_with(c, &spec.solver_config())? {
        CycleOrConnected::Cycle { cycle, source } => {
            rec.outcome = "cycle".into();
            rec.kind = Some(source.kind.to_string());
            rec.set_certificate(serde_json::to_value(&cycle).expect("cycle serializes"));
        }
        CycleOrConnected::Connected(map) => {
            rec.outcome = "connected".into();
            let paths: Vec<_> = map.into_values().collect();
            rec.set_certificate(serde_json::to_value(&paths).expect("paths serialize"));
        }
    }
    let valid = certificate_valid(inst, &rec.outcome, rec.certificate.as_ref().expect("set above"))?;
    rec.valid = Some(valid);
    rec.status = if valid { Status::Pass } else { Status::Violation };
    if valid && rec.outcome == "cycle" && c.vertex_count() <= spec.oracle_max_n {
        let (d, _) = exact_rainbow_ham_cycle(c, &spec.oracle_options())?;
        rec.oracle = Some(d.label().into());
        match d {
            Decision::Found(_) => rec.agree = Some(true),
            Decision::NotFound => {
                rec.agree = Some(false);
                rec.status = Status::Violation;
            }
            Decision::Unknown => rec.status = Status::Unknown,
        }
    }
    Ok(())
}

fn run_control(spec: &SuiteSpec, rec: &mut Record, inst: &Instance) -> Result<()> {
    let c = &inst.collection;
    let holds = c.check_hypothesis(0)?;
    let (d, _) = exact_rainbow_ham_cycle(c, &spec.oracle_options())?;
    rec.outcome = d.label().into();
    rec.oracle = Some(d.label().into());
    rec.status = match (holds, &d) {
        (false, Decision::NotFound) => Status::Pass,
        (_, Decision::Unknown) => Status::Unknown,
        _ => Status::Violation,
    };
    if holds {
        rec.note = Some("control satisfies the hypothesis".into());
    }
    Ok(())
}

/// Writes the instance and record of a failing item; returns the file path.
pub fn write_bundle(dir: &Path, rec: &Record, inst: Option<&Instance>, error: Option<&str>) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?;
    let path = dir.join(format!("bundle-{:05}.json", rec.index));
    let body = serde_json::json!({
        "record": rec,
        "instance": inst.map(|i| i.to_json()),
        "error": error,
    });
    std::fs::write(&path, serde_json::to_string_pretty(&body).expect("bundle serializes"))
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn run_item(spec: &SuiteSpec, index: usize, task: Task, source: Source, bundles: Option<&Path>) -> Record {
    let start = Instant::now();
    let inst = source.instance();
    let mut rec = Record::new(index, task, source, inst.as_ref().ok());
    let result = match &inst {
        Ok(inst) => match task {
            Task::Solve => run_solve(spec, &mut rec, inst),
            Task::AllPairs => run_all_pairs(spec, &mut rec, inst),
            Task::Control => run_control(spec, &mut rec, inst),
            Task::Cycle => Err(Error::Input("cycle items belong to sweeps".into())),
        },
        Err(e) => Err(Error::Input(format!("generation failed: {e}"))),
    };
    let mut error = None;
    if let Err(e) = result {
        rec.outcome = "error".into();
        rec.status = Status::Violation;
        rec.note = Some(e.to_string());
        if let Error::Internal { bundle: Some(b), .. } = &e {
            error = Some(b.clone());
        }
    }
    if spec.timing {
        rec.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    if rec.status == Status::Violation {
        if let Some(dir) = bundles {
            let msg = error.or_else(|| rec.note.clone());
            if let Ok(path) = write_bundle(dir, &rec, inst.as_ref().ok(), msg.as_deref()) {
                rec.bundle = Some(path.display().to_string());
            }
        }
    }
    rec
}

/// Runs the suite on `workers` threads. Violations write bundles into `bundles`.
pub fn run_suite(spec: &SuiteSpec, workers: usize, bundles: Option<&Path>) -> Report {
    let items = spec.items();
    let records = run_indexed(items.len(), workers, |i| {
        let (task, source) = items[i].clone();
        run_item(spec, i, task, source, bundles)
    });
    let config = serde_json::json!({ "command": "verify", "suite": spec });
    Report::new(config, records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteSpec {
        SuiteSpec {
            n_min: 5,
            n_max: 7,
            samples: 30,
            all_pairs_samples: 6,
            ..SuiteSpec::default()
        }
    }

    #[test]
    fn small_suite_passes() {
        let rep = run_suite(&small(), 2, None);
        assert_eq!(rep.summary.count(Status::Pass), rep.summary.total, "{:?}", rep.summary);
    }

    #[test]
    fn corrupted_certificates_are_caught() {
        let spec = SuiteSpec {
            fault: Some(Fault::CorruptCertificates),
            builders: false,
            all_pairs_samples: 0,
            ..small()
        };
        let rep = run_suite(&spec, 2, None);
        assert_eq!(rep.summary.count(Status::Violation), spec.samples);
    }

    #[test]
    fn report_is_deterministic_across_worker_counts() {
        let spec = SuiteSpec {
            samples: 12,
            all_pairs_samples: 3,
            builders: false,
            ..small()
        };
        assert_eq!(run_suite(&spec, 1, None).to_jsonl(), run_suite(&spec, 3, None).to_jsonl());
    }
}
