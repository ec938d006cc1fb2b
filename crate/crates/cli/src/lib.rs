//! Command-line front end: argument parsing, command execution and JSON
//! reports.
//!
//! Exit codes: 0 when the property holds or the command succeeded, 1 when
//! it fails (the report then carries a witness), 2 on usage or input
//! errors.

pub mod counterexample;
pub mod validate;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use pcoeq::clone::{find_term, TermKind};
use pcoeq::coeq::{
    coequalizer, cokernel, normal_epi_comparison, p_instance_comparison, KernelComparison,
};
use pcoeq::congruence::all_congruences;
use pcoeq::decide::{concretize_p_failure, decide_local_np, decide_p, Decision, Schema};
use pcoeq::io::{
    algebra_to_json, hom_from_json, pair_from_json, point_from_json, point_morphism_from_json,
    point_to_json, read_json, witness_to_json, Registry,
};
use pcoeq::points::{
    local_p_instance_comparison, pt_coequalizer, pt_normal_epi_comparison, pt_product,
};
use pcoeq::{congruence_generated, fixtures, Element, FiniteAlgebra, Limits};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::counterexample::{
    comparison_certificates, report_details, verify_counterexample, CounterexampleData,
};
use crate::validate::Certificate;

#[derive(Debug, Parser)]
#[command(
    name = "pcoeq",
    version,
    about = "Products, coequalizers and points in finitely generated varieties"
)]
pub struct Cli {
    /// Most elements a free algebra or clone slice may reach.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_free_size: u64,
    /// Largest target size for exhaustive morphism enumeration.
    #[arg(long, global = true, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_enum_size: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Register an algebra file (or builtin:NAME) for name resolution.
    #[arg(long = "algebra", global = true, value_name = "FILE")]
    pub algebras: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coequalizer of a parallel pair.
    Coeq {
        #[arg(long)]
        pair: PathBuf,
    },
    /// Whether a surjective homomorphism is a normal epimorphism.
    IsNormal {
        #[arg(long)]
        hom: PathBuf,
    },
    /// Cokernel of a homomorphism between pointed algebras.
    Cokernel {
        #[arg(long)]
        hom: PathBuf,
    },
    /// Whether the product of the coequalizers of two pairs is the
    /// coequalizer of their product.
    CheckPInstance {
        #[arg(long)]
        pair1: PathBuf,
        #[arg(long)]
        pair2: PathBuf,
    },
    /// Product of two points over a common base.
    PtProduct {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Coequalizer of two point morphisms.
    PtCoeq {
        #[arg(long)]
        pair: PathBuf,
    },
    /// Whether a surjective point morphism is a normal epimorphism.
    PtIsNormal {
        #[arg(long)]
        morphism: PathBuf,
    },
    /// Fibrewise version of check-p-instance for pairs of point morphisms.
    CheckLocalInstance {
        #[arg(long)]
        pair1: PathBuf,
        #[arg(long)]
        pair2: PathBuf,
    },
    /// Decide whether products commute with coequalizers in the variety.
    DecideP {
        algebra: String,
        #[arg(long, value_name = "FILE")]
        emit_terms: Option<PathBuf>,
    },
    /// Decide the fibrewise (local) version over every base algebra.
    DecideLocalNp {
        algebra: String,
        #[arg(long, value_name = "FILE")]
        emit_terms: Option<PathBuf>,
    },
    /// Search the clone for a Mal'tsev, majority or subtraction term.
    FindTerm {
        #[arg(long)]
        kind: TermKind,
        algebra: String,
    },
    /// Congruence generated by pairs `a,b` (indices or labels).
    Congruence {
        algebra: String,
        #[arg(long = "pair", value_name = "A,B")]
        pairs: Vec<String>,
        /// Include the derivation trace.
        #[arg(long)]
        trace: bool,
        /// List every congruence instead.
        #[arg(long, conflicts_with_all = ["pairs", "trace"])]
        all: bool,
    },
    /// Check the subtraction-algebra counterexample.
    VerifyPaperCounterexample {
        /// Relabel `X` first: element i moves to position PERM[i].
        #[arg(long, value_name = "PERM", value_delimiter = ',')]
        relabel: Option<Vec<usize>>,
    },
    /// Re-verify the certificates and terms of a report.
    ValidateWitness {
        #[arg(value_name = "REPORT")]
        file: PathBuf,
    },
    /// Print a built-in algebra.
    Fixture {
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Coeq { .. } => "coeq",
            Command::IsNormal { .. } => "is-normal",
            Command::Cokernel { .. } => "cokernel",
            Command::CheckPInstance { .. } => "check-p-instance",
            Command::PtProduct { .. } => "pt-product",
            Command::PtCoeq { .. } => "pt-coeq",
            Command::PtIsNormal { .. } => "pt-is-normal",
            Command::CheckLocalInstance { .. } => "check-local-instance",
            Command::DecideP { .. } => "decide-p",
            Command::DecideLocalNp { .. } => "decide-local-np",
            Command::FindTerm { .. } => "find-term",
            Command::Congruence { .. } => "congruence",
            Command::VerifyPaperCounterexample { .. } => "verify-paper-counterexample",
            Command::ValidateWitness { .. } => "validate-witness",
            Command::Fixture { .. } => "fixture",
        }
    }
}

/// Settings shared by every command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub max_free_size: usize,
    pub max_enumeration_size: usize,
    pub report_path: Option<PathBuf>,
    /// `None` means one thread per core.
    pub parallelism: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_free_size: 1_000_000,
            max_enumeration_size: 5,
            report_path: None,
            parallelism: None,
        }
    }
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Self {
        RunConfig {
            max_free_size: cli.max_free_size as usize,
            max_enumeration_size: cli.max_enum_size as usize,
            report_path: cli.report.clone(),
            parallelism: cli.threads.map(|t| t as usize),
        }
    }

    pub fn limits(&self) -> Limits {
        Limits {
            max_free_size: self.max_free_size,
            max_enumeration_size: self.max_enumeration_size,
            ..Limits::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Ok,
}

/// Output of one command. Apart from `elapsed_ms`, reports are a function
/// of the inputs and the configuration.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub result: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
    pub sizes: Value,
    pub elapsed_ms: u64,
}

impl Report {
    fn new(command: &str, inputs: Value, result: Verdict) -> Self {
        Report {
            command: command.to_string(),
            inputs,
            result,
            witness: None,
            terms: None,
            details: None,
            sizes: json!({}),
            elapsed_ms: 0,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.result {
            Verdict::Holds | Verdict::Ok => 0,
            Verdict::Fails => 1,
        }
    }

    /// The report without its timing, for comparisons.
    pub fn untimed(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("object").remove("elapsed_ms");
        v
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error(transparent)]
    Input(#[from] pcoeq::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) if !e.use_stderr() => 0,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `argv` and runs the command. Does not print.
pub fn execute<I, T>(argv: I) -> CliResult<Report>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let config = RunConfig::from_cli(&cli);
    run(&cli, &config)
}

/// Parses `argv`, runs the command, writes the report and returns the exit
/// code.
pub fn cmd_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return CliError::Usage(e).exit_code();
        }
    };
    let config = RunConfig::from_cli(&cli);
    match run(&cli, &config).and_then(|r| emit(&r, &config).map(|()| r)) {
        Ok(report) => report.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(report: &Report, config: &RunConfig) -> CliResult<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    match &config.report_path {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::Io(format!("cannot write report: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

pub fn run(cli: &Cli, config: &RunConfig) -> CliResult<Report> {
    if let Some(n) = config.parallelism {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let start = Instant::now();
    let mut reg = Registry::new(".");
    for spec in &cli.algebras {
        reg.load_algebra(spec)?;
    }
    let mut report = dispatch(&cli.command, config, &mut reg)?;
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Reads a JSON file, with a registry that resolves relative paths next
/// to it.
fn load_file(path: &Path, reg: &Registry) -> CliResult<(Value, Registry)> {
    let value = read_json(path)?;
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    Ok((value, reg.rebased(dir)))
}

fn load_algebra(spec: &str, reg: &mut Registry) -> CliResult<Arc<FiniteAlgebra>> {
    Ok(reg.load_algebra(spec)?)
}

fn certificates_value(certs: &[Certificate]) -> Value {
    serde_json::to_value(certs).expect("certificates serialize")
}

/// Report for a comparison: holds when the partitions agree, otherwise a
/// witness with the disagreeing pair (rendered by `show`) and certificates.
fn comparison_report(
    command: &str,
    inputs: Value,
    cmp: &KernelComparison,
    show: impl Fn(Element) -> Value,
) -> CliResult<Report> {
    let mut report = match cmp.difference() {
        None => Report::new(command, inputs, Verdict::Holds),
        Some((pair, in_kernel)) => {
            let mut r = Report::new(command, inputs, Verdict::Fails);
            r.witness = Some(json!({
                "pair": [show(pair.0), show(pair.1)],
                "in_kernel": in_kernel,
                "certificates": certificates_value(&comparison_certificates(cmp)?),
            }));
            r
        }
    };
    report.sizes = json!({
        "algebra": cmp.algebra.size(),
        "generators": cmp.generators.len(),
        "kernel_blocks": cmp.kernel.num_blocks(),
        "generated_blocks": cmp.generated.partition().num_blocks(),
    });
    Ok(report)
}

fn parse_pair(alg: &FiniteAlgebra, s: &str) -> CliResult<(Element, Element)> {
    let parse = |t: &str| -> CliResult<Element> {
        let t = t.trim();
        t.parse::<usize>()
            .ok()
            .filter(|&e| e < alg.size())
            .or_else(|| alg.element(t))
            .ok_or_else(|| {
                CliError::Io(format!(
                    "--pair {s}: `{t}` is not an element of `{}`",
                    alg.name()
                ))
            })
    };
    match s.split_once(',') {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => Err(CliError::Io(format!("--pair {s}: expected A,B"))),
    }
}

fn decision_report(
    command: &str,
    a: &Arc<FiniteAlgebra>,
    decision: &Decision,
    emit_terms: Option<&Path>,
    config: &RunConfig,
) -> CliResult<Report> {
    let inst = &decision.instance;
    let schema = inst.schema;
    let inputs = json!({"algebra": algebra_to_json(a)});
    let mut report = match &decision.witness {
        Some(w) => {
            let terms = witness_to_json(w, a, schema);
            if let Some(path) = emit_terms {
                let text = serde_json::to_string_pretty(&terms).expect("terms serialize");
                std::fs::write(path, text + "\n")
                    .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            }
            let mut r = Report::new(command, inputs, Verdict::Holds);
            r.terms = Some(terms);
            r
        }
        None => {
            let mut certs = vec![Certificate::NonMembership {
                algebra: algebra_to_json(&inst.algebra),
                generators: vec![inst.generator],
                pair: inst.target,
                kernel: None,
            }];
            let mut witness = json!({
                "generator": [inst.describe(inst.generator.0), inst.describe(inst.generator.1)],
                "target": [inst.describe(inst.target.0), inst.describe(inst.target.1)],
            });
            if schema == Schema::Global {
                let (p1, p2) = concretize_p_failure(a, decision, &config.limits())?;
                let (cmp, targets) = p_instance_comparison(&p1, &p2)?;
                if let Some((pair, _)) = cmp.difference() {
                    witness["concrete"] = json!({
                        "first": targets.split(pair.0),
                        "second": targets.split(pair.1),
                        "first_labels": labels_of(&targets, pair.0),
                        "second_labels": labels_of(&targets, pair.1),
                    });
                    certs.extend(comparison_certificates(&cmp)?);
                }
            }
            witness["certificates"] = certificates_value(&certs);
            let mut r = Report::new(command, inputs, Verdict::Fails);
            r.witness = Some(witness);
            r
        }
    };
    let mut sizes = json!({
        "algebra": a.size(),
        "free_rank2": inst.left.size(),
        "generic": inst.algebra.size(),
    });
    match schema {
        Schema::Global => sizes["free_rank1"] = json!(inst.right.size()),
        Schema::Local => {
            sizes["free_rank2_right"] = json!(inst.right.size());
            sizes["free_base"] = json!(inst.base_size);
        }
    }
    report.sizes = sizes;
    Ok(report)
}

fn labels_of(prod: &pcoeq::constructions::Product, e: Element) -> [String; 2] {
    let (x, y) = prod.split(e);
    [prod.left.label(x), prod.right.label(y)]
}

fn dispatch(command: &Command, config: &RunConfig, reg: &mut Registry) -> CliResult<Report> {
    let name = command.name();
    let limits = config.limits();
    match command {
        Command::Coeq { pair } => {
            let (value, mut local) = load_file(pair, reg)?;
            let pair_v = pair_from_json(&value, &mut local)?;
            let co = coequalizer(&pair_v)?;
            let mut r = Report::new(name, json!({"pair": pair}), Verdict::Ok);
            r.details = Some(json!({
                "congruence": co.congruence.blocks_json(),
                "map": co.q.map(),
                "quotient": algebra_to_json(&co.quotient),
            }));
            r.sizes = json!({
                "source": pair_v.source().size(),
                "target": pair_v.target().size(),
                "quotient": co.quotient.size(),
            });
            Ok(r)
        }
        Command::IsNormal { hom } => {
            let (value, mut local) = load_file(hom, reg)?;
            let f = hom_from_json(&value, &mut local)?;
            let cmp = normal_epi_comparison(&f)?;
            let src = f.source().clone();
            comparison_report(name, json!({"hom": hom}), &cmp, |e| json!(src.label(e)))
        }
        Command::Cokernel { hom } => {
            let (value, mut local) = load_file(hom, reg)?;
            let f = hom_from_json(&value, &mut local)?;
            let co = cokernel(&f)?;
            let mut r = Report::new(name, json!({"hom": hom}), Verdict::Ok);
            r.details = Some(json!({
                "congruence": co.congruence.blocks_json(),
                "map": co.q.map(),
                "quotient": algebra_to_json(&co.quotient),
            }));
            r.sizes = json!({
                "source": f.source().size(),
                "target": f.target().size(),
                "quotient": co.quotient.size(),
            });
            Ok(r)
        }
        Command::CheckPInstance { pair1, pair2 } => {
            let (v1, mut l1) = load_file(pair1, reg)?;
            let p1 = pair_from_json(&v1, &mut l1)?;
            let (v2, mut l2) = load_file(pair2, reg)?;
            let p2 = pair_from_json(&v2, &mut l2)?;
            let (cmp, targets) = p_instance_comparison(&p1, &p2)?;
            comparison_report(
                name,
                json!({"pair1": pair1, "pair2": pair2}),
                &cmp,
                |e| json!({"coords": targets.split(e), "labels": labels_of(&targets, e)}),
            )
        }
        Command::PtProduct { left, right } => {
            let (vl, mut ll) = load_file(left, reg)?;
            let pl = point_from_json(&vl, &mut ll)?;
            let (vr, mut lr) = load_file(right, reg)?;
            let pr = point_from_json(&vr, &mut lr)?;
            let prod = pt_product(&pl, &pr)?;
            let mut r = Report::new(name, json!({"left": left, "right": right}), Verdict::Ok);
            r.details = Some(json!({
                "point": point_to_json(&prod.point),
                "total": algebra_to_json(prod.point.total()),
                "pairs": prod.pullback.pairs,
                "pi1": prod.pi1.hom().map(),
                "pi2": prod.pi2.hom().map(),
            }));
            r.sizes = json!({
                "left": pl.total().size(),
                "right": pr.total().size(),
                "base": pl.base().size(),
                "product": prod.point.total().size(),
            });
            Ok(r)
        }
        Command::PtCoeq { pair } => {
            let (value, mut local) = load_file(pair, reg)?;
            let field = |k: &str| {
                value
                    .get(k)
                    .cloned()
                    .ok_or_else(|| CliError::Io(format!("{}: missing field `{k}`", pair.display())))
            };
            let u = point_morphism_from_json(&field("u")?, &mut local)?;
            let v = point_morphism_from_json(&field("v")?, &mut local)?;
            let co = pt_coequalizer(&u, &v)?;
            let mut r = Report::new(name, json!({"pair": pair}), Verdict::Ok);
            r.details = Some(json!({
                "congruence": co.congruence.blocks_json(),
                "map": co.q.hom().map(),
                "point": point_to_json(&co.point),
                "total": algebra_to_json(co.point.total()),
            }));
            r.sizes = json!({
                "source": u.from().total().size(),
                "target": u.to().total().size(),
                "quotient": co.point.total().size(),
            });
            Ok(r)
        }
        Command::PtIsNormal { morphism } => {
            let (value, mut local) = load_file(morphism, reg)?;
            let f = point_morphism_from_json(&value, &mut local)?;
            let cmp = pt_normal_epi_comparison(&f)?;
            let total = f.from().total().clone();
            comparison_report(name, json!({"morphism": morphism}), &cmp, |e| {
                json!(total.label(e))
            })
        }
        Command::CheckLocalInstance { pair1, pair2 } => {
            let pm_pair = |path: &PathBuf| -> CliResult<_> {
                let (value, mut local) = load_file(path, reg)?;
                let get = |k: &str| {
                    value.get(k).cloned().ok_or_else(|| {
                        CliError::Io(format!("{}: missing field `{k}`", path.display()))
                    })
                };
                let u = point_morphism_from_json(&get("u")?, &mut local)?;
                let v = point_morphism_from_json(&get("v")?, &mut local)?;
                Ok((u, v))
            };
            let (u1, v1) = pm_pair(pair1)?;
            let (u2, v2) = pm_pair(pair2)?;
            let (cmp, pb) = local_p_instance_comparison((&u1, &v1), (&u2, &v2))?;
            let (l, rgt) = (u1.to().total().clone(), u2.to().total().clone());
            comparison_report(name, json!({"pair1": pair1, "pair2": pair2}), &cmp, |e| {
                let (x, y) = pb.pair(e);
                json!({"coords": [x, y], "labels": [l.label(x), rgt.label(y)]})
            })
        }
        Command::DecideP {
            algebra,
            emit_terms,
        } => {
            let a = load_algebra(algebra, reg)?;
            let d = decide_p(&a, &limits)?;
            decision_report(name, &a, &d, emit_terms.as_deref(), config)
        }
        Command::DecideLocalNp {
            algebra,
            emit_terms,
        } => {
            let a = load_algebra(algebra, reg)?;
            let d = decide_local_np(&a, &limits)?;
            decision_report(name, &a, &d, emit_terms.as_deref(), config)
        }
        Command::FindTerm { kind, algebra } => {
            let a = load_algebra(algebra, reg)?;
            let inputs = json!({"algebra": algebra_to_json(&a), "kind": kind.name()});
            let vars: &[&str] = if kind.arity() == 2 {
                &["x", "y"]
            } else {
                &["x", "y", "z"]
            };
            let mut r = match find_term(&a, *kind, &limits)? {
                Some(t) => {
                    let mut r = Report::new(name, inputs, Verdict::Holds);
                    r.terms = Some(json!({
                        "kind": kind.name(),
                        "term": t.to_json(a.signature(), vars),
                        "rendered": t.render(a.signature(), vars),
                    }));
                    r
                }
                None => {
                    let mut r = Report::new(name, inputs, Verdict::Fails);
                    let cert = Certificate::NoTerm {
                        algebra: algebra_to_json(&a),
                        term_kind: kind.name().into(),
                    };
                    r.witness = Some(json!({"certificates": certificates_value(&[cert])}));
                    r
                }
            };
            r.sizes = json!({"algebra": a.size(), "arity": kind.arity()});
            Ok(r)
        }
        Command::Congruence {
            algebra,
            pairs,
            trace,
            all,
        } => {
            let a = load_algebra(algebra, reg)?;
            if *all {
                let list = all_congruences(&a, limits.max_congruence_enum_size)?;
                let mut r = Report::new(name, json!({"algebra": algebra_to_json(&a)}), Verdict::Ok);
                r.details = Some(json!({
                    "congruences": list.iter().map(|c| c.blocks_json()).collect::<Vec<_>>(),
                }));
                r.sizes = json!({"algebra": a.size(), "congruences": list.len()});
                return Ok(r);
            }
            let gens = pairs
                .iter()
                .map(|s| parse_pair(&a, s))
                .collect::<CliResult<Vec<_>>>()?;
            let (theta, tr) = congruence_generated(&a, &gens)?;
            let mut r = Report::new(
                name,
                json!({"algebra": algebra_to_json(&a), "pairs": gens}),
                Verdict::Ok,
            );
            let mut details = json!({"blocks": theta.blocks_json()});
            if *trace {
                details["trace"] = tr.to_json(&a);
            }
            r.details = Some(details);
            r.sizes = json!({
                "algebra": a.size(),
                "blocks": theta.partition().num_blocks(),
                "trace_steps": tr.steps().len(),
            });
            Ok(r)
        }
        Command::VerifyPaperCounterexample { relabel } => {
            let mut data = CounterexampleData::builtin();
            if let Some(perm) = relabel {
                data = data.relabelled(perm)?;
            }
            let out = verify_counterexample(&data, &limits)?;
            let inputs = json!({
                "X": algebra_to_json(&data.x),
                "Y": algebra_to_json(&data.y),
                "f": data.f,
            });
            let mut r = Report::new(
                name,
                inputs,
                if out.all_hold() {
                    Verdict::Holds
                } else {
                    Verdict::Fails
                },
            );
            if !out.all_hold() {
                let failed: Vec<_> = out.assertions.iter().filter(|a| !a.holds).collect();
                let certs: Vec<Certificate> =
                    failed.iter().flat_map(|a| a.certificates.clone()).collect();
                r.witness = Some(json!({
                    "pair": out.pair,
                    "failed": failed.iter().map(|a| a.name).collect::<Vec<_>>(),
                    "certificates": certificates_value(&certs),
                }));
            }
            r.details = Some(report_details(&out));
            r.sizes = Value::Object(
                out.sizes
                    .iter()
                    .map(|(k, v)| (k.to_string(), json!(v)))
                    .collect(),
            );
            Ok(r)
        }
        Command::ValidateWitness { file } => validate_report(file),
        Command::Fixture {
            name: fixture,
            list,
        } => {
            let mut r = Report::new(name, json!({"name": fixture}), Verdict::Ok);
            if *list {
                r.details = Some(json!({"fixtures": fixtures::BUILTIN_NAMES}));
                return Ok(r);
            }
            let key = fixture.as_deref().unwrap_or_default();
            let a = fixtures::builtin(key.strip_prefix("builtin:").unwrap_or(key)).ok_or_else(
                || {
                    CliError::Io(format!(
                        "unknown fixture `{key}` (known: {})",
                        fixtures::BUILTIN_NAMES.join(", ")
                    ))
                },
            )?;
            r.sizes = json!({"algebra": a.size()});
            r.details = Some(algebra_to_json(&a));
            Ok(r)
        }
    }
}

/// Checks every certificate in the report's witness (and in its
/// assertions, for the counterexample), and its terms if present.
fn validate_report(path: &Path) -> CliResult<Report> {
    let value = read_json(path)?;
    let mut certs: Vec<Certificate> = Vec::new();
    let mut parse = |v: &Value| -> CliResult<()> {
        for c in v.as_array().into_iter().flatten() {
            certs.push(
                serde_json::from_value(c.clone())
                    .map_err(|e| CliError::Io(format!("{}: certificate: {e}", path.display())))?,
            );
        }
        Ok(())
    };
    if let Some(c) = value.pointer("/witness/certificates") {
        parse(c)?;
    }
    if let (Some(term), Some(kind), Some(algebra)) = (
        value.pointer("/terms/term"),
        value.pointer("/terms/kind").and_then(Value::as_str),
        value.pointer("/inputs/algebra"),
    ) {
        certs.push(Certificate::Term {
            algebra: algebra.clone(),
            term_kind: kind.to_string(),
            term: term.clone(),
        });
    }
    if let Some(terms) = value.get("terms").filter(|t| t.get("schema").is_some()) {
        let algebra = value.pointer("/inputs/algebra").cloned().ok_or_else(|| {
            CliError::Io(format!("{}: terms without inputs.algebra", path.display()))
        })?;
        certs.push(Certificate::Terms {
            algebra,
            witness: terms.clone(),
        });
    }
    if certs.is_empty() {
        return Err(CliError::Io(format!(
            "{}: nothing to validate",
            path.display()
        )));
    }
    let results: Vec<Value> = certs
        .iter()
        .map(|c| {
            let kind = serde_json::to_value(c).expect("certificate serializes")["kind"].clone();
            match c.check() {
                Ok(()) => json!({"kind": kind, "valid": true}),
                Err(reason) => json!({"kind": kind, "valid": false, "reason": reason}),
            }
        })
        .collect();
    let all_valid = results.iter().all(|r| r["valid"] == json!(true));
    let mut r = Report::new(
        "validate-witness",
        json!({"report": path}),
        if all_valid {
            Verdict::Holds
        } else {
            Verdict::Fails
        },
    );
    r.sizes = json!({"certificates": results.len()});
    if all_valid {
        r.details = Some(json!({"certificates": results}));
    } else {
        r.witness = Some(json!({"certificates": results}));
    }
    Ok(r)
}
