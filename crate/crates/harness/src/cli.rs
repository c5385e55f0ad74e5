use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rainbow_ham::gen::{build_extremal, random_instance, small_vertex_probe_family, Base, BuilderKind, GenSpec, Model};
use rainbow_ham::oracle::{exact_rainbow_ham_cycle, exact_rainbow_ham_path, Decision, OracleBudget, OracleOptions};
use rainbow_ham::solver::{SolverConfig, SolverOutcome};
use rainbow_ham::{Error, Instance};

use crate::exit;
use crate::report::{instance_hash, Report, Status};
use crate::sweep::{run_sweep, Family, SweepConfig};
use crate::verify::{run_suite, solve_instance, Fault, SuiteSpec};

#[derive(Parser, Debug)]
#[command(name = "rainbow-ham", version, about = "Rainbow Hamiltonian paths in graph collections")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Node limit for exact searches.
    #[arg(long, global = true)]
    pub budget_nodes: Option<u64>,
    /// Wall-clock limit in seconds for each exact search.
    #[arg(long, global = true)]
    pub budget_seconds: Option<f64>,
    /// Worker threads for suites and sweeps (0 = one per core).
    #[arg(long, global = true, env = "RAINBOW_HAM_WORKERS", default_value_t = 0)]
    pub workers: usize,
    /// Output file. Outcomes and reports are also written to standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Record wall times in reports (makes them run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Find a rainbow Hamiltonian path through the instance's forest, or an extremal certificate.
    Solve { instance: PathBuf },
    /// Decide path (or cycle) existence by exhaustive search.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        cycle: bool,
    },
    /// Emit an instance: a canonical build or a seeded random one.
    Gen(GenArgs),
    /// Run the verification suite, or re-check a saved report.
    Verify(VerifyArgs),
    /// Sweep random collections for rainbow Hamiltonian cycles.
    Sweep(SweepArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum ModelArg {
    Uniform,
    IdenticalComplete,
    IdenticalRandom,
    Perturbed,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Canonical build: b2, b3, c2, c3 or dirac.
    #[arg(long, conflicts_with_all = ["model", "small_vertex"])]
    pub builder: Option<BuilderKind>,
    #[arg(long, value_enum, default_value = "uniform")]
    pub model: ModelArg,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Build perturbed by the `perturbed` model.
    #[arg(long, default_value = "c3")]
    pub kind: BuilderKind,
    #[arg(long, default_value_t = 2)]
    pub flips: usize,
    /// A bare collection with one vertex below half degree in every color.
    #[arg(long)]
    pub small_vertex: bool,
    /// Metadata sidecar path; defaults to `<out>.meta.json` when --out is given.
    #[arg(long)]
    pub meta: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Re-check a saved report instead of running the suite.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub n_min: usize,
    #[arg(long, default_value_t = 9)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1)]
    pub k_max: usize,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[arg(long, default_value_t = 50)]
    pub all_pairs_samples: usize,
    #[arg(long, default_value_t = 8)]
    pub oracle_max_n: usize,
    #[arg(long)]
    pub no_builders: bool,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum FamilyArg {
    Random,
    SmallVertex,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 5)]
    pub n_min: usize,
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Sample collections with Ore sum at least n + k.
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "random")]
    pub family: FamilyArg,
    /// Include a Dirac control per size (dropped by the hypothesis filter).
    #[arg(long)]
    pub controls: bool,
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn say(&mut self, s: &str) {
        let _ = writeln!(self.err, "{s}");
    }

    fn emit(&mut self, s: &str) {
        let _ = writeln!(self.out, "{s}");
    }
}

fn input_error(io: &mut Io, e: &Error) -> i32 {
    io.emit(&json!({ "outcome": "input_error", "error": e.to_string() }).to_string());
    io.say(&format!("error: {e}"));
    exit::INPUT
}

fn read_instance(path: &Path) -> Result<Instance, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    Instance::from_json_str(&text)
}

fn write_file(path: &Path, body: &str) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, body).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

impl Cli {
    fn oracle_options(&self) -> OracleOptions {
        let d = OracleBudget::default();
        OracleOptions {
            budget: OracleBudget {
                node_limit: self.budget_nodes.unwrap_or(d.node_limit),
                time_limit: self.budget_seconds.map_or(d.time_limit, Duration::from_secs_f64),
            },
            ..OracleOptions::default()
        }
    }

    fn solver_config(&self) -> SolverConfig {
        let d = SolverConfig::default();
        SolverConfig {
            seed: self.seed,
            fallback_nodes: self.budget_nodes.unwrap_or(d.fallback_nodes),
            ..d
        }
    }

    fn bundle_dir(&self) -> PathBuf {
        match &self.out {
            Some(p) => sibling(p, ".bundles"),
            None => PathBuf::from("rainbow-ham-bundles"),
        }
    }

    /// Writes `body` to --out when given, otherwise to standard output.
    fn deliver(&self, io: &mut Io, body: &str) -> Result<(), Error> {
        match &self.out {
            Some(p) => write_file(p, body),
            None => {
                let _ = write!(io.out, "{body}");
                Ok(())
            }
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut io = Io { out, err };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT } else { exit::PATH };
            let text = e.render().to_string();
            if e.use_stderr() {
                io.say(text.trim_end());
            } else {
                io.emit(text.trim_end());
            }
            return code;
        }
    };
    match &cli.command {
        Command::Solve { instance } => cmd_solve(&cli, &mut io, instance),
        Command::Oracle { instance, cycle } => cmd_oracle(&cli, &mut io, instance, *cycle),
        Command::Gen(args) => cmd_gen(&cli, &mut io, args),
        Command::Verify(args) => cmd_verify(&cli, &mut io, args),
        Command::Sweep(args) => cmd_sweep(&cli, &mut io, args),
    }
}

fn cmd_solve(cli: &Cli, io: &mut Io, path: &Path) -> i32 {
    let inst = match read_instance(path) {
        Ok(i) => i,
        Err(e) => return input_error(io, &e),
    };
    let start = Instant::now();
    let result = solve_instance(&inst, &cli.solver_config());
    let elapsed = start.elapsed();
    let (mut body, code) = match result {
        Ok(sol) => {
            let code = match sol.outcome {
                SolverOutcome::Path(_) => exit::PATH,
                SolverOutcome::Extremal(_) => exit::EXTREMAL,
            };
            (sol.to_json(), code)
        }
        Err(e) if e.is_budget() => (json!({ "outcome": "unknown", "error": e.to_string() }), exit::UNKNOWN),
        Err(Error::Internal { message, bundle }) => {
            let target = match &cli.out {
                Some(p) => sibling(p, ".bundle.json"),
                None => PathBuf::from(format!("rainbow-ham-bundle-{}.json", &instance_hash(&inst)[..12])),
            };
            let body = bundle.unwrap_or_else(|| json!({ "message": message, "instance": inst.to_json() }).to_string());
            let written = write_file(&target, &body).is_ok();
            io.say(&format!("internal error: {message}"));
            if written {
                io.say(&format!("repro bundle: {}", target.display()));
            }
            (
                json!({ "outcome": "internal_error", "error": message, "bundle": written.then(|| target.display().to_string()) }),
                exit::VIOLATION,
            )
        }
        Err(e) => return input_error(io, &e),
    };
    if cli.timing {
        body["wall_ms"] = json!(elapsed.as_secs_f64() * 1e3);
    }
    let text = body.to_string();
    if let Some(p) = &cli.out {
        if let Err(e) = write_file(p, &text) {
            return input_error(io, &e);
        }
    }
    io.emit(&text);
    code
}

fn cmd_oracle(cli: &Cli, io: &mut Io, path: &Path, cycle: bool) -> i32 {
    let inst = match read_instance(path) {
        Ok(i) => i,
        Err(e) => return input_error(io, &e),
    };
    let opts = cli.oracle_options();
    let result = if cycle {
        exact_rainbow_ham_cycle(&inst.collection, &opts).map(|(d, s)| {
            let cert = match &d {
                Decision::Found(c) => serde_json::to_value(c).ok(),
                _ => None,
            };
            (d.label(), cert, s.nodes)
        })
    } else {
        exact_rainbow_ham_path(&inst.collection, inst.u, inst.v, &inst.forest, &opts).map(|(d, s)| {
            let cert = match &d {
                Decision::Found(c) => serde_json::to_value(c).ok(),
                _ => None,
            };
            (d.label(), cert, s.nodes)
        })
    };
    let (label, cert, nodes) = match result {
        Ok(r) => r,
        Err(e) => return input_error(io, &e),
    };
    let body = json!({ "decision": label, "certificate": cert, "nodes": nodes }).to_string();
    if let Some(p) = &cli.out {
        if let Err(e) = write_file(p, &body) {
            return input_error(io, &e);
        }
    }
    io.emit(&body);
    match label {
        "found" => exit::PATH,
        "not_found" => exit::EXTREMAL,
        _ => exit::UNKNOWN,
    }
}

fn cmd_gen(cli: &Cli, io: &mut Io, args: &GenArgs) -> i32 {
    let (inst, meta) = match generate(cli, args) {
        Ok(r) => r,
        Err(e) => return input_error(io, &e),
    };
    let text = inst.to_json_string();
    let meta_path = args.meta.clone().or_else(|| cli.out.as_ref().map(|p| sibling(p, ".meta.json")));
    let mut meta = meta;
    meta["instance_hash"] = json!(instance_hash(&inst));
    let written = cli
        .deliver(io, &format!("{text}\n"))
        .and_then(|_| match &meta_path {
            Some(p) => write_file(p, &serde_json::to_string_pretty(&meta).expect("metadata serializes")),
            None => Ok(()),
        });
    match written {
        Ok(()) => exit::PATH,
        Err(e) => input_error(io, &e),
    }
}

fn generate(cli: &Cli, args: &GenArgs) -> Result<(Instance, Value), Error> {
    if let Some(kind) = args.builder {
        let b = build_extremal(kind, args.n, args.k)?;
        let meta = json!({ "builder": kind, "n": args.n, "k": args.k, "certificate": b.certificate });
        return Ok((b.instance, meta));
    }
    if args.small_vertex {
        let c = small_vertex_probe_family(args.n, cli.seed)?;
        let meta = json!({ "family": "small_vertex", "n": args.n, "seed": cli.seed });
        return Ok((Instance::bare(c), meta));
    }
    let model = match args.model {
        ModelArg::Uniform => Model::UniformSupergraph { p: args.p },
        ModelArg::IdenticalComplete => Model::Identical { base: Base::Complete },
        ModelArg::IdenticalRandom => Model::Identical {
            base: Base::Random { p: args.p },
        },
        ModelArg::Perturbed => Model::PerturbedExtremal {
            kind: args.kind,
            flips: args.flips,
        },
    };
    let spec = GenSpec {
        n: args.n,
        k: args.k,
        model,
        seed: cli.seed,
    };
    let inst = random_instance(&spec)?;
    Ok((inst, json!({ "spec": spec })))
}

fn finish_report(cli: &Cli, io: &mut Io, rep: &Report) -> Result<(), Error> {
    cli.deliver(io, &rep.to_jsonl())?;
    let counts: Vec<String> = rep.summary.by_status.iter().map(|(s, c)| format!("{s}={c}")).collect();
    io.say(&format!("{} records: {}", rep.summary.total, counts.join(" ")));
    for r in rep.records.iter().filter(|r| r.bundle.is_some()) {
        io.say(&format!("  #{} {}: {}", r.index, r.status, r.bundle.as_deref().unwrap_or_default()));
    }
    Ok(())
}

fn cmd_verify(cli: &Cli, io: &mut Io, args: &VerifyArgs) -> i32 {
    if let Some(path) = &args.report {
        let loaded = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("{}: {e}", path.display())))
            .and_then(|t| Report::from_jsonl(&t));
        let rep = match loaded {
            Ok(r) => r,
            Err(e) => return input_error(io, &e),
        };
        return match rep.revalidate() {
            Ok(bad) if bad.is_empty() => {
                io.say(&format!("{} records re-validated", rep.records.len()));
                exit::PATH
            }
            Ok(bad) => {
                io.say(&format!("records that do not reproduce: {bad:?}"));
                exit::VIOLATION
            }
            Err(e) => input_error(io, &e),
        };
    }
    if args.n_min > args.n_max || args.n_min < 2 {
        return input_error(io, &Error::Input(format!("bad size range {}..={}", args.n_min, args.n_max)));
    }
    let opts = cli.oracle_options();
    let spec = SuiteSpec {
        n_min: args.n_min,
        n_max: args.n_max,
        k_max: args.k_max,
        samples: args.samples,
        all_pairs_samples: args.all_pairs_samples,
        oracle_max_n: args.oracle_max_n,
        builders: !args.no_builders,
        seed: cli.seed,
        node_limit: opts.budget.node_limit,
        seconds: opts.budget.time_limit.as_secs_f64(),
        fault: args.inject_fault.then_some(Fault::CorruptCertificates),
        timing: cli.timing,
    };
    let rep = run_suite(&spec, cli.workers, Some(&cli.bundle_dir()));
    if let Err(e) = finish_report(cli, io, &rep) {
        return input_error(io, &e);
    }
    if rep.summary.count(Status::Violation) > 0 {
        exit::VIOLATION
    } else if rep.summary.count(Status::Unknown) > 0 {
        exit::UNKNOWN
    } else {
        exit::PATH
    }
}

fn cmd_sweep(cli: &Cli, io: &mut Io, args: &SweepArgs) -> i32 {
    if args.n_min > args.n_max || args.n_min < 3 {
        return input_error(io, &Error::Input(format!("bad size range {}..={}", args.n_min, args.n_max)));
    }
    let opts = cli.oracle_options();
    let cfg = SweepConfig {
        n_min: args.n_min,
        n_max: args.n_max,
        samples: args.samples,
        k: args.k,
        family: match args.family {
            FamilyArg::Random => Family::Random,
            FamilyArg::SmallVertex => Family::SmallVertex,
        },
        controls: args.controls,
        seed: cli.seed,
        node_limit: opts.budget.node_limit,
        seconds: opts.budget.time_limit.as_secs_f64(),
        timing: cli.timing,
    };
    let rep = run_sweep(&cfg, cli.workers, Some(&cli.bundle_dir()));
    if let Err(e) = finish_report(cli, io, &rep) {
        return input_error(io, &e);
    }
    if rep.summary.count(Status::Violation) > 0 {
        exit::VIOLATION
    } else if rep.summary.count(Status::Candidate) > 0 {
        exit::EXTREMAL
    } else if rep.summary.count(Status::Unknown) > 0 {
        exit::UNKNOWN
    } else {
        exit::PATH
    }
}
