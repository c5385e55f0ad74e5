//! Cycle-existence sweeps over collections with Ore sum at least `n + k`.
//! A cycle-free verdict is re-checked and, if it stands, minimized and written
//! out as a counterexample bundle.

use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use rainbow_ham::gen::BuilderKind;
use rainbow_ham::model::{sigma2_of, validate_cycle_certificate};
use rainbow_ham::oracle::{exact_rainbow_ham_cycle, Decision, OracleBudget, OracleOptions};
use rainbow_ham::solver::{hamiltonian_or_connected, CycleOrConnected};
use rainbow_ham::{Error, GraphCollection, Instance, Result};

use crate::pool::{density, item_seed, run_indexed};
use crate::report::{Record, Report, Source, Status, Task};
use crate::verify::write_bundle;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Independent random colors repaired to the Ore bound.
    Random,
    /// One vertex below half degree in every color.
    SmallVertex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub samples: usize,
    /// Sampled collections have Ore sum at least `n + k`.
    pub k: usize,
    pub family: Family,
    /// Append a Dirac control per size; the hypothesis filter must drop it.
    pub controls: bool,
    pub seed: u64,
    pub node_limit: u64,
    pub seconds: f64,
    pub timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_min: 5,
            n_max: 8,
            samples: 1000,
            k: 0,
            family: Family::Random,
            controls: false,
            seed: 1,
            node_limit: OracleBudget::default().node_limit,
            seconds: OracleBudget::default().time_limit.as_secs_f64(),
            timing: false,
        }
    }
}

impl SweepConfig {
    pub fn oracle_options(&self) -> OracleOptions {
        OracleOptions {
            budget: OracleBudget {
                node_limit: self.node_limit,
                time_limit: Duration::from_secs_f64(self.seconds),
            },
            ..OracleOptions::default()
        }
    }

    pub fn items(&self) -> Vec<Source> {
        let span = self.n_max + 1 - self.n_min;
        let mut items: Vec<Source> = (0..self.samples)
            .map(|i| {
                let seed = item_seed(self.seed, i);
                let n = self.n_min + i % span;
                match self.family {
                    Family::Random => Source::Ore {
                        n,
                        bound: n + self.k,
                        p: density(seed, 0.05, 0.6),
                        seed,
                    },
                    Family::SmallVertex => Source::SmallVertex { n, seed },
                }
            })
            .collect();
        if self.controls {
            items.extend((self.n_min..=self.n_max).map(|n| Source::Builder {
                kind: BuilderKind::DiracControl,
                n,
                k: 0,
            }));
        }
        items
    }
}

fn meets_bound(c: &GraphCollection, bound: usize) -> bool {
    c.graphs().iter().all(|g| sigma2_of(g).at_least(bound))
}

/// Greedily deletes edges, color by color, while every color keeps Ore sum at
/// least `bound` and the oracle still finds no rainbow Hamiltonian cycle.
/// Repeats until no edge can go. Edges whose removal makes the oracle give up
/// are kept.
pub fn minimize_counterexample(c: &GraphCollection, bound: usize, opts: &OracleOptions) -> Result<GraphCollection> {
    if !meets_bound(c, bound) {
        return Err(Error::Contract("collection is below the Ore bound".into()));
    }
    if exact_rainbow_ham_cycle(c, opts)?.0 != Decision::NotFound {
        return Err(Error::Contract("collection has a rainbow Hamiltonian cycle or is undecided".into()));
    }
    let mut cur = c.clone();
    loop {
        let mut changed = false;
        for col in 0..cur.color_count() {
            let edges: Vec<_> = cur.graph(col).edges().collect();
            for e in edges {
                cur.graph_mut(col).remove_edge(e.lo(), e.hi());
                let keep_removed = sigma2_of(cur.graph(col)).at_least(bound)
                    && exact_rainbow_ham_cycle(&cur, opts)?.0 == Decision::NotFound;
                if keep_removed {
                    changed = true;
                } else {
                    cur.graph_mut(col).add_edge(e.lo(), e.hi());
                }
            }
        }
        if !changed {
            return Ok(cur);
        }
    }
}

/// A second opinion on a cycle-free verdict: the all-pairs solver, then the
/// oracle with a denser pruning schedule and four times the node budget.
fn recheck(c: &GraphCollection, k: usize, opts: &OracleOptions) -> Result<Option<String>> {
    if k == 0 && c.color_count() == c.vertex_count() {
        if let CycleOrConnected::Cycle { cycle, .. } = hamiltonian_or_connected(c)? {
            if validate_cycle_certificate(c, &cycle) {
                return Ok(Some("all-pairs solver produced a cycle".into()));
            }
        }
    }
    let strict = OracleOptions {
        match_interval: 1,
        budget: OracleBudget {
            node_limit: opts.budget.node_limit.saturating_mul(4),
            ..opts.budget
        },
    };
    if let Decision::Found(cycle) = exact_rainbow_ham_cycle(c, &strict)?.0 {
        if validate_cycle_certificate(c, &cycle) {
            return Ok(Some("second oracle pass found a cycle".into()));
        }
    }
    Ok(None)
}

fn run_item(cfg: &SweepConfig, index: usize, source: Source, bundles: Option<&Path>) -> Record {
    let start = Instant::now();
    let inst = source.instance();
    let mut rec = Record::new(index, Task::Cycle, source, inst.as_ref().ok());
    let mut bundle_body: Option<Instance> = None;
    let result = (|| -> Result<()> {
        let inst = inst.as_ref().map_err(|e| Error::Input(format!("generation failed: {e}")))?;
        let c = &inst.collection;
        let bound = c.vertex_count() + cfg.k;
        if !meets_bound(c, bound) {
            rec.outcome = "excluded".into();
            rec.status = Status::Excluded;
            return Ok(());
        }
        let opts = cfg.oracle_options();
        let (d, _) = exact_rainbow_ham_cycle(c, &opts)?;
        rec.outcome = d.label().into();
        rec.oracle = Some(d.label().into());
        match d {
            Decision::Found(cycle) => {
                let valid = validate_cycle_certificate(c, &cycle);
                rec.set_certificate(serde_json::to_value(&cycle).expect("cycle serializes"));
                rec.valid = Some(valid);
                rec.status = if valid { Status::Pass } else { Status::Violation };
            }
            Decision::Unknown => rec.status = Status::Unknown,
            Decision::NotFound => match recheck(c, cfg.k, &opts)? {
                Some(why) => {
                    rec.status = Status::Refuted;
                    rec.note = Some(why);
                }
                None => {
                    let min = minimize_counterexample(c, bound, &opts)?;
                    rec.status = Status::Candidate;
                    rec.note = Some(format!(
                        "minimized from {} to {} edges",
                        c.graphs().iter().map(|g| g.edge_count()).sum::<usize>(),
                        min.graphs().iter().map(|g| g.edge_count()).sum::<usize>()
                    ));
                    bundle_body = Some(Instance::bare(min));
                }
            },
        }
        Ok(())
    })();
    if let Err(e) = result {
        rec.outcome = "error".into();
        rec.status = Status::Violation;
        rec.note = Some(e.to_string());
    }
    if cfg.timing {
        rec.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    if matches!(rec.status, Status::Candidate | Status::Violation) {
        if let Some(dir) = bundles {
            let body = bundle_body.as_ref().or(inst.as_ref().ok());
            if let Ok(path) = write_bundle(dir, &rec, body, rec.note.as_deref()) {
                rec.bundle = Some(path.display().to_string());
            }
        }
    }
    rec
}

pub fn run_sweep(cfg: &SweepConfig, workers: usize, bundles: Option<&Path>) -> Report {
    let items = cfg.items();
    let records = run_indexed(items.len(), workers, |i| run_item(cfg, i, items[i].clone(), bundles));
    let config = serde_json::json!({ "command": "sweep", "sweep": cfg });
    Report::new(config, records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rainbow_ham::gen::build_extremal;

    #[test]
    fn small_sweep_is_all_clear() {
        let cfg = SweepConfig {
            samples: 40,
            controls: true,
            ..SweepConfig::default()
        };
        let rep = run_sweep(&cfg, 2, None);
        assert_eq!(rep.summary.count(Status::Pass), 40);
        assert_eq!(rep.summary.count(Status::Excluded), 4);
        assert!(rep.revalidate().unwrap().is_empty());
    }

    #[test]
    fn minimization_keeps_bound_and_verdict() {
        let c = build_extremal(BuilderKind::DiracControl, 5, 0).unwrap().instance.collection;
        let opts = OracleOptions::default();
        let min = minimize_counterexample(&c, 4, &opts).unwrap();
        assert!(meets_bound(&min, 4));
        assert_eq!(exact_rainbow_ham_cycle(&min, &opts).unwrap().0, Decision::NotFound);
        assert!(minimize_counterexample(&c, 5, &opts).is_err());
    }

    #[test]
    fn small_vertex_family_sweeps() {
        let cfg = SweepConfig {
            samples: 8,
            n_min: 5,
            n_max: 8,
            family: Family::SmallVertex,
            ..SweepConfig::default()
        };
        let rep = run_sweep(&cfg, 2, None);
        assert_eq!(rep.summary.count(Status::Pass), 8, "{:?}", rep.summary);
    }
}
