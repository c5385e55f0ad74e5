//! JSON-lines experiment reports: a config line, one record per instance in
//! index order, then a summary line.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use rainbow_ham::gen::{build_extremal, random_instance, random_ore_collection, small_vertex_probe_family};
use rainbow_ham::gen::{BuilderKind, GenSpec};
use rainbow_ham::model::{validate_cycle_certificate, validate_path_certificate};
use rainbow_ham::structures::verify_certificate;
use rainbow_ham::{CycleCertificate, Error, ExtremalCertificate, Instance, PathCertificate, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn hash_json<T: Serialize>(value: &T) -> String {
    sha256_hex(serde_json::to_string(value).expect("serializable").as_bytes())
}

pub fn instance_hash(inst: &Instance) -> String {
    sha256_hex(inst.to_json_string().as_bytes())
}

/// How to regenerate a record's instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "from", rename_all = "snake_case")]
pub enum Source {
    Random { spec: GenSpec },
    Builder { kind: BuilderKind, n: usize, k: usize },
    /// A bare collection of `n` colors with Ore sum at least `bound`.
    Ore { n: usize, bound: usize, p: f64, seed: u64 },
    SmallVertex { n: usize, seed: u64 },
}

impl Source {
    pub fn instance(&self) -> Result<Instance> {
        match *self {
            Source::Random { spec } => random_instance(&spec),
            Source::Builder { kind, n, k } => Ok(build_extremal(kind, n, k)?.instance),
            Source::Ore { n, bound, p, seed } => Ok(Instance::bare(random_ore_collection(n, n, bound, p, seed)?)),
            Source::SmallVertex { n, seed } => Ok(Instance::bare(small_vertex_probe_family(n, seed)?)),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match *self {
            Source::Random { spec } => Some(spec.seed),
            Source::Ore { seed, .. } | Source::SmallVertex { seed, .. } => Some(seed),
            Source::Builder { .. } => None,
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            Source::Random { spec } => spec.n,
            Source::Builder { n, .. } | Source::Ore { n, .. } | Source::SmallVertex { n, .. } => n,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Path through the forest, or an extremal certificate.
    Solve,
    /// A rainbow Hamiltonian cycle or paths between all pairs.
    AllPairs,
    /// Exact cycle existence.
    Cycle,
    /// A negative control: the hypothesis must fail and no cycle may exist.
    Control,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Violation,
    Unknown,
    /// A cycle-free collection that survived re-checking.
    Candidate,
    /// A cycle-free verdict overturned on re-check.
    Refuted,
    /// Outside the hypothesis region.
    Excluded,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("status serializes");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub index: usize,
    pub task: Task,
    pub source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub n: usize,
    pub instance_hash: String,
    /// `path`, `extremal`, `cycle`, `connected`, `found`, `not_found`, `unknown`, `excluded` or `error`.
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate_hash: Option<String>,
    /// Whether the certificate validated; absent when there is none.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valid: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle: Option<String>,
}

impl Record {
    pub fn new(index: usize, task: Task, source: Source, inst: Option<&Instance>) -> Record {
        Record {
            index,
            task,
            seed: source.seed(),
            n: source.n(),
            source,
            instance_hash: inst.map(instance_hash).unwrap_or_default(),
            outcome: "error".into(),
            kind: None,
            certificate: None,
            certificate_hash: None,
            valid: None,
            oracle: None,
            agree: None,
            status: Status::Violation,
            wall_ms: None,
            note: None,
            bundle: None,
        }
    }

    pub fn set_certificate(&mut self, cert: Value) {
        self.certificate_hash = Some(hash_json(&cert));
        self.certificate = Some(cert);
    }
}

/// Re-checks a certificate of the given outcome against its instance.
pub fn certificate_valid(inst: &Instance, outcome: &str, cert: &Value) -> Result<bool> {
    let parse = |e: serde_json::Error| Error::Input(format!("malformed {outcome} certificate: {e}"));
    let c = &inst.collection;
    Ok(match outcome {
        "path" => {
            let p: PathCertificate = serde_json::from_value(cert.clone()).map_err(parse)?;
            p.u == inst.u && p.v == inst.v && validate_path_certificate(c, &p, Some(&inst.forest))
        }
        "extremal" => {
            let e: ExtremalCertificate = serde_json::from_value(cert.clone()).map_err(parse)?;
            verify_certificate(c, &inst.forest, &e)?
        }
        "cycle" | "found" => {
            let z: CycleCertificate = serde_json::from_value(cert.clone()).map_err(parse)?;
            validate_cycle_certificate(c, &z)
        }
        "connected" => {
            let paths: Vec<PathCertificate> = serde_json::from_value(cert.clone()).map_err(parse)?;
            let n = c.vertex_count();
            let mut pairs: Vec<(usize, usize)> = paths.iter().map(|p| (p.u.min(p.v), p.u.max(p.v))).collect();
            pairs.sort_unstable();
            pairs.dedup();
            pairs.len() == n * (n - 1) / 2 && paths.iter().all(|p| validate_path_certificate(c, p, None))
        }
        other => return Err(Error::Input(format!("no certificate check for outcome {other:?}"))),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub by_outcome: BTreeMap<String, usize>,
    pub by_status: BTreeMap<Status, usize>,
}

impl Summary {
    pub fn of(records: &[Record]) -> Summary {
        let mut s = Summary {
            total: records.len(),
            ..Summary::default()
        };
        for r in records {
            let key = match &r.kind {
                Some(k) => format!("{}:{}", r.outcome, k),
                None => r.outcome.clone(),
            };
            *s.by_outcome.entry(key).or_default() += 1;
            *s.by_status.entry(r.status).or_default() += 1;
        }
        s
    }

    pub fn count(&self, status: Status) -> usize {
        self.by_status.get(&status).copied().unwrap_or(0)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Config { config: Value },
    Record(Box<Record>),
    Summary(Summary),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub config: Value,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config: Value, records: Vec<Record>) -> Report {
        let summary = Summary::of(&records);
        Report {
            config,
            records,
            summary,
        }
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |line: &Line| {
            out.push_str(&serde_json::to_string(line).expect("report line serializes"));
            out.push('\n');
        };
        push(&Line::Config {
            config: self.config.clone(),
        });
        for r in &self.records {
            push(&Line::Record(Box::new(r.clone())));
        }
        push(&Line::Summary(self.summary.clone()));
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Report> {
        let mut config = None;
        let mut records = Vec::new();
        let mut summary = None;
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let parsed: Line =
                serde_json::from_str(line).map_err(|e| Error::Input(format!("report line {}: {e}", i + 1)))?;
            match parsed {
                Line::Config { config: c } => config = Some(c),
                Line::Record(r) => records.push(*r),
                Line::Summary(s) => summary = Some(s),
            }
        }
        let config = config.ok_or_else(|| Error::Input("report has no config line".into()))?;
        let summary = summary.ok_or_else(|| Error::Input("report has no summary line".into()))?;
        if summary != Summary::of(&records) {
            return Err(Error::Input("report summary does not match its records".into()));
        }
        Ok(Report {
            config,
            records,
            summary,
        })
    }

    /// Regenerates every instance and re-checks every certificate. Returns the
    /// indices whose instance hash or validity bit does not reproduce.
    pub fn revalidate(&self) -> Result<Vec<usize>> {
        let mut bad = Vec::new();
        for r in &self.records {
            let inst = r.source.instance()?;
            let hash_ok = instance_hash(&inst) == r.instance_hash;
            let valid = match &r.certificate {
                Some(cert) => Some(certificate_valid(&inst, &r.outcome, cert)?),
                None => None,
            };
            let cert_hash_ok = r.certificate.as_ref().map(hash_json) == r.certificate_hash;
            if !hash_ok || valid != r.valid || !cert_hash_ok {
                bad.push(r.index);
            }
        }
        Ok(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rainbow_ham::gen::Model;

    fn sample() -> Report {
        let spec = GenSpec {
            n: 6,
            k: 0,
            model: Model::UniformSupergraph { p: 0.4 },
            seed: 3,
        };
        let src = Source::Random { spec };
        let inst = src.instance().unwrap();
        let mut r = Record::new(0, Task::Solve, src, Some(&inst));
        r.outcome = "not_found".into();
        r.status = Status::Unknown;
        Report::new(serde_json::json!({"suite": "t"}), vec![r])
    }

    #[test]
    fn jsonl_round_trip() {
        let rep = sample();
        let text = rep.to_jsonl();
        assert_eq!(text.lines().count(), 3);
        let back = Report::from_jsonl(&text).unwrap();
        assert_eq!(back, rep);
        assert!(back.revalidate().unwrap().is_empty());
    }

    #[test]
    fn tampered_hash_is_reported() {
        let mut rep = sample();
        rep.records[0].instance_hash = "00".into();
        assert_eq!(rep.revalidate().unwrap(), vec![0]);
    }

    #[test]
    fn summary_mismatch_is_rejected() {
        let rep = sample();
        let text = rep.to_jsonl().replace("\"total\":1", "\"total\":2");
        assert!(Report::from_jsonl(&text).is_err());
    }

    #[test]
    fn status_names() {
        assert_eq!(Status::Candidate.to_string(), "candidate");
    }
}
