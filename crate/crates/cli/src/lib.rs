//! Command-line front end: generators, searches, verifiers and the batch runner.
//!
//! Every artifact is a JSON envelope `{"kind": …, "payload": …}`. Exit codes: 0 on
//! success, 1 when a search honestly finds nothing, 2 for bad input or a rejected
//! artifact, 3 when one of our own results fails its verifier.

pub mod envelope;
pub mod experiment;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use immersion_core::budget::SearchBudget;
use immersion_core::connectivity::{edge_connectivity, edge_connectivity_violation, lambda, min_cut};
use immersion_core::decomposition::{avoid_u_window, build_ring, find_gates, heuristic_td, verify_linked, verify_linked_sampled, verify_ring, verify_td, GateWindow, RingDecomposition, TreeDecomposition};
use immersion_core::generators::{caterpillar_of_cliques, ladder, GenError};
use immersion_core::immersion::{find_double_cycle, verify_immersion, ImmersionCertificate};
use immersion_core::lifting::reduce_degrees;
use immersion_core::linegraph::{analyze_line_graph, immersion_to_minor, root_graph, verify_minor, MinorCertificate};
use immersion_core::oracle::{brute_immersion, brute_min_cut, brute_minor, OracleBudget};
use immersion_core::packing::{find_ctr_rooted, find_ctr_traced};
use immersion_core::{MultiGraph, VertexId};

use envelope::{read_as, read_graph, Envelope};
use experiment::{run_experiment, verify_report, ExperimentConfig, ExperimentReport, Family};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("rejected: {0}")]
    Rejected(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 3,
            _ => 2,
        }
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        CliError::Input(e.to_string())
    }
}

/// How a command that did not error ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    NotFound(String),
}

impl Status {
    pub fn exit_code(&self) -> u8 {
        match self {
            Status::Success => 0,
            Status::NotFound(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "immersion", version, about = "Find and check graph immersions, ring-decompositions and line-graph minors")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Seed for random generators and experiment trials.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Wall-clock budget for searches, in milliseconds.
    #[arg(long, global = true)]
    pub budget_ms: Option<u64>,
    /// Node-expansion budget for searches.
    #[arg(long, global = true)]
    pub budget_nodes: Option<u64>,
    /// Write the main artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write a Graphviz rendering of the result here.
    #[arg(long, global = true)]
    pub dot: Option<PathBuf>,
}

impl Global {
    fn budget(&self) -> SearchBudget {
        let d = SearchBudget::default();
        SearchBudget::new(self.budget_nodes.unwrap_or(d.max_nodes), self.budget_ms.unwrap_or(d.max_millis))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Grid,
    CycleMulti,
    PathMulti,
    Complete,
    CompleteBipartite,
    RandomK,
    Caterpillar,
    Ladder,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyKind,
    /// Grid side, clique order or rung count.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub extra: usize,
    #[arg(long)]
    pub max_degree: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub spine: usize,
    #[arg(long, default_value_t = 1)]
    pub overlap: usize,
    #[arg(long, default_value_t = 1)]
    pub legs: usize,
    /// Also write the known tree-decomposition (ladder and caterpillar only).
    #[arg(long)]
    pub td: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a graph from one of the instance families.
    Generate(GenerateArgs),
    /// Lift pairs until every degree is k or k + 1.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// Where to write the lifting script.
        #[arg(long)]
        script: Option<PathBuf>,
    },
    /// Edge connectivity, or λ(u, v) with a minimum cut.
    Connectivity {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        u: Option<u32>,
        #[arg(long)]
        v: Option<u32>,
        /// Check k-edge-connectivity and report a violating cut.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Min-fill tree-decomposition, optionally followed by gates and a ring.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        /// Where to write a ring-decomposition built from gates.
        #[arg(long)]
        ring: Option<PathBuf>,
        /// Number of gates to look for.
        #[arg(long, default_value_t = 6)]
        gates: usize,
    },
    /// Check W1–W5 for a tree-decomposition.
    VerifyTd {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        td: PathBuf,
        /// Above this many tree vertices the linkedness check samples pairs.
        #[arg(long, default_value_t = 200)]
        linked_ceiling: usize,
    },
    /// Check R1–R4 for a ring-decomposition.
    VerifyRing {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        ring: PathBuf,
    },
    /// Search for a C_{2,r} immersion.
    FindC2r {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        r: usize,
    },
    /// Search for a C_{t,r} immersion, optionally with terminals in a given set.
    FindCtr {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        r: usize,
        /// JSON list of allowed terminal vertices.
        #[arg(long)]
        rooted: Option<PathBuf>,
    },
    /// Line graphs: roots, minors from immersions, and the connectivity analysis.
    #[command(subcommand)]
    Linegraph(LinegraphCommand),
    /// Brute-force oracles for tiny instances.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Run a batch of seeded trials from a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Re-check any artifact written by this tool.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Host graph, for certificates and decompositions.
        #[arg(long)]
        host: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum LinegraphCommand {
    /// Look for an L(C_{t,r}) minor in a line graph.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        r: usize,
    },
    /// Turn an immersion certificate in a host into a minor certificate in its line graph.
    Transform {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Recover a root graph.
    Root {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    Immersion {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        pattern: PathBuf,
    },
    Minor {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        pattern: PathBuf,
    },
    Cut {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        a: Vec<u32>,
        #[arg(long, value_delimiter = ',')]
        b: Vec<u32>,
    },
}

struct Ctx<'a> {
    global: &'a Global,
    stdout: &'a mut dyn Write,
}

impl Ctx<'_> {
    /// The main artifact: to `--out` when given, otherwise to stdout.
    fn emit(&mut self, kind: &str, payload: &impl Serialize) -> Result<(), CliError> {
        let text = Envelope::wrap(kind, payload)?.to_json()?;
        match &self.global.out {
            Some(path) => {
                write_file(path, &text)?;
                self.say(&format!("wrote {kind} to {}", path.display()))
            }
            None => self.say(&text),
        }
    }

    fn say(&mut self, line: &str) -> Result<(), CliError> {
        writeln!(self.stdout, "{line}").map_err(|source| CliError::Io { path: "<stdout>".into(), source })
    }

    fn dot(&mut self, text: impl FnOnce() -> String) -> Result<(), CliError> {
        if let Some(path) = &self.global.dot {
            write_file(path, &text())?;
        }
        Ok(())
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write_envelope(path: &Path, kind: &str, payload: &impl Serialize) -> Result<(), CliError> {
    write_file(path, &Envelope::wrap(kind, payload)?.to_json()?)
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Input(format!("--{flag} is required for this family")))
}

fn family(args: &GenerateArgs) -> Result<Family, CliError> {
    Ok(match args.family {
        FamilyKind::Grid => Family::Grid { size: need(args.size, "size")? },
        FamilyKind::CycleMulti => Family::CycleMulti { t: need(args.t, "t")?, r: need(args.r, "r")? },
        FamilyKind::PathMulti => Family::PathMulti { t: need(args.t, "t")?, r: need(args.r, "r")? },
        FamilyKind::Complete => Family::Complete { size: need(args.size, "size")? },
        FamilyKind::CompleteBipartite => Family::CompleteBipartite { t: need(args.t, "t")?, r: need(args.r, "r")? },
        FamilyKind::RandomK => Family::RandomK { n: need(args.n, "n")?, k: need(args.k, "k")?, extra_edges: args.extra, max_degree: args.max_degree },
        FamilyKind::Caterpillar => Family::Caterpillar { spine: args.spine, size: need(args.size, "size")?, overlap: args.overlap, legs: args.legs },
        FamilyKind::Ladder => Family::Ladder { rungs: need(args.size, "size")? },
    })
}

fn vertex_set(ids: &[u32]) -> BTreeSet<VertexId> {
    ids.iter().map(|&v| VertexId(v)).collect()
}

/// Run one command, writing artifacts and messages to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let mut cx = Ctx { global: &cli.global, stdout };
    let budget = cli.global.budget();
    match &cli.command {
        Command::Generate(args) => {
            let fam = family(args)?;
            let g = fam.instance(cli.global.seed.unwrap_or(0))?;
            if let Some(path) = &args.td {
                let d = match fam {
                    Family::Ladder { rungs } => ladder(rungs)?,
                    Family::Caterpillar { spine, size, overlap, legs } => caterpillar_of_cliques(spine, size, overlap, legs)?,
                    _ => return Err(CliError::Input("--td is only available for ladder and caterpillar".into())),
                };
                let td = TreeDecomposition::from_decomposed(&d).map_err(|e| CliError::Internal(e.to_string()))?;
                write_envelope(path, envelope::TREE_DECOMPOSITION, &td)?;
            }
            cx.dot(|| g.to_dot(&BTreeMap::new(), &BTreeSet::new()))?;
            cx.emit(envelope::GRAPH, &g)?;
            Ok(Status::Success)
        }
        Command::Reduce { input, k, script } => {
            let g = read_graph(input)?;
            let red = reduce_degrees(&g, *k).map_err(|e| CliError::Input(e.to_string()))?;
            let replayed = red.script.replay(&g).map_err(|e| CliError::Internal(e.to_string()))?;
            if replayed != red.reduced {
                return Err(CliError::Internal("script does not replay to the reduced graph".into()));
            }
            if let Some(path) = script {
                write_envelope(path, envelope::SCRIPT, &red.script)?;
            }
            cx.emit(envelope::GRAPH, &red.reduced)?;
            Ok(Status::Success)
        }
        Command::Connectivity { input, u, v, k } => {
            let g = read_graph(input)?;
            let report = match (u, v) {
                (Some(u), Some(v)) => {
                    let (u, v) = (VertexId(*u), VertexId(*v));
                    let l = lambda(&g, u, v).map_err(|e| CliError::Input(e.to_string()))?;
                    let cut = min_cut(&g, u, v).map_err(|e| CliError::Input(e.to_string()))?;
                    json!({ "u": u, "v": v, "lambda": l, "cut": cut })
                }
                (None, None) => json!({ "edgeConnectivity": edge_connectivity(&g) }),
                _ => return Err(CliError::Input("give both --u and --v, or neither".into())),
            };
            let mut report = report;
            if let Some(k) = k {
                let violation = edge_connectivity_violation(&g, *k);
                report["k"] = json!(k);
                report["kEdgeConnected"] = json!(violation.is_none());
                report["violation"] = json!(violation);
            }
            cx.emit("connectivity-report", &report)?;
            Ok(Status::Success)
        }
        Command::Decompose { input, ring, gates } => {
            let g = read_graph(input)?;
            let td = heuristic_td(&g);
            cx.emit(envelope::TREE_DECOMPOSITION, &td)?;
            let Some(path) = ring else { return Ok(Status::Success) };
            let Some(report) = find_gates(&g, &td, *gates) else {
                return Ok(Status::NotFound(format!("no {gates} gates in the decomposition")));
            };
            let window = avoid_u_window(&report, &td, &g, *gates).unwrap_or(GateWindow { start: 0, len: report.gates.len() });
            let built = build_ring(&g, &td, &report, window).map_err(|e| CliError::Input(e.to_string()))?;
            let check = verify_ring(&g, &built);
            if !check.all() {
                return Ok(Status::NotFound(format!("ring from the gates fails: {}", check.problems.join("; "))));
            }
            write_envelope(path, envelope::RING, &built)?;
            Ok(Status::Success)
        }
        Command::VerifyTd { input, td, linked_ceiling } => {
            let g = read_graph(input)?;
            let td: TreeDecomposition = read_as(td, envelope::TREE_DECOMPOSITION)?;
            let report = verify_td(&g, &td).map_err(|e| CliError::Rejected(e.to_string()))?;
            let linked = match verify_linked(&g, &td, *linked_ceiling) {
                Ok(l) => l,
                Err(_) => verify_linked_sampled(&g, &td, 4 * linked_ceiling, cli.global.seed.unwrap_or(0)),
            };
            let ok = report.all() && linked.linked;
            cx.emit("td-report", &json!({ "properties": report, "linked": linked }))?;
            if ok {
                Ok(Status::Success)
            } else {
                Err(CliError::Rejected("decomposition fails at least one property".into()))
            }
        }
        Command::VerifyRing { input, ring } => {
            let g = read_graph(input)?;
            let ring: RingDecomposition = read_as(ring, envelope::RING)?;
            let report = verify_ring(&g, &ring);
            cx.emit("ring-report", &json!({ "report": report, "connected": ring.is_connected(&g) }))?;
            if report.all() {
                Ok(Status::Success)
            } else {
                Err(CliError::Rejected(report.problems.join("; ")))
            }
        }
        Command::FindC2r { input, r } => {
            let g = read_graph(input)?;
            match find_double_cycle(&g, *r, budget) {
                Some(cert) => {
                    verify_immersion(&g, &cert).map_err(|v| CliError::Internal(v.to_string()))?;
                    cx.dot(|| cert.to_dot(&g))?;
                    cx.emit(envelope::IMMERSION, &cert)?;
                    Ok(Status::Success)
                }
                None => Ok(Status::NotFound(format!("no C_{{2,{r}}} immersion within budget"))),
            }
        }
        Command::FindCtr { input, t, r, rooted } => {
            let g = read_graph(input)?;
            let (cert, note) = match rooted {
                Some(path) => {
                    let ids: Vec<u32> = read_as(path, envelope::VERTEX_SET)?;
                    let s = vertex_set(&ids);
                    (find_ctr_rooted(&g, &s, *t, *r, budget), format!("no C_{{{t},{r}}} with terminals in the given set"))
                }
                None => {
                    let run = find_ctr_traced(&g, *t, *r, budget);
                    let stage = run.failed_stage.clone().unwrap_or_default();
                    (run.certificate, format!("no C_{{{t},{r}}} immersion (stage {stage}): {}", run.log.join(" | ")))
                }
            };
            match cert {
                Some(cert) => {
                    verify_immersion(&g, &cert).map_err(|v| CliError::Internal(v.to_string()))?;
                    cx.dot(|| cert.to_dot(&g))?;
                    cx.emit(envelope::IMMERSION, &cert)?;
                    Ok(Status::Success)
                }
                None => Ok(Status::NotFound(note)),
            }
        }
        Command::Linegraph(LinegraphCommand::Root { input }) => {
            let g = read_graph(input)?;
            let h = root_graph(&g).map_err(|e| CliError::Input(e.to_string()))?;
            cx.emit(envelope::GRAPH, &h)?;
            Ok(Status::Success)
        }
        Command::Linegraph(LinegraphCommand::Transform { input, cert }) => {
            let host = read_graph(input)?;
            let cert: ImmersionCertificate = read_as(cert, envelope::IMMERSION)?;
            let minor = immersion_to_minor(&host, &cert).map_err(|e| CliError::Input(e.to_string()))?;
            verify_minor(&host.line_graph().graph, &minor).map_err(|v| CliError::Internal(v.to_string()))?;
            cx.emit(envelope::MINOR, &minor)?;
            Ok(Status::Success)
        }
        Command::Linegraph(LinegraphCommand::Analyze { input, t, r }) => {
            let g = read_graph(input)?;
            let analysis = analyze_line_graph(&g, *t, *r, budget).map_err(|e| CliError::Input(e.to_string()))?;
            let found = analysis.outcome.certificate().is_some();
            cx.emit("linegraph-analysis", &analysis)?;
            Ok(if found { Status::Success } else { Status::NotFound(analysis.diagnostics.join("; ")) })
        }
        Command::Oracle(cmd) => oracle(&mut cx, cmd),
        Command::Run { config, jobs } => {
            let mut config: ExperimentConfig = read_as(config, "experiment-config")?;
            if let Some(seed) = cli.global.seed {
                config.seed = seed;
            }
            if jobs.is_some() {
                config.jobs = *jobs;
            }
            let report = run_experiment(&config)?;
            if report.invalid > 0 {
                return Err(CliError::Internal(format!("{} trials returned certificates that fail verification", report.invalid)));
            }
            cx.emit(envelope::REPORT, &report)?;
            Ok(if report.found > 0 { Status::Success } else { Status::NotFound(format!("no certificate in {} trials", report.trials.len())) })
        }
        Command::Verify { input, host } => verify(&mut cx, input, host.as_deref()),
    }
}

fn oracle(cx: &mut Ctx<'_>, cmd: &OracleCommand) -> Result<Status, CliError> {
    let ob = OracleBudget { max_millis: cx.global.budget_ms.unwrap_or(OracleBudget::default().max_millis), ..OracleBudget::default() };
    let refuse = |e: immersion_core::oracle::OracleError| CliError::Input(e.to_string());
    match cmd {
        OracleCommand::Immersion { input, pattern } => {
            let (g, h) = (read_graph(input)?, read_graph(pattern)?);
            match brute_immersion(&g, &h, ob).map_err(refuse)? {
                Some(c) => {
                    cx.emit(envelope::IMMERSION, &c)?;
                    Ok(Status::Success)
                }
                None => Ok(Status::NotFound("pattern does not immerse".into())),
            }
        }
        OracleCommand::Minor { input, pattern } => {
            let (g, h) = (read_graph(input)?, read_graph(pattern)?);
            match brute_minor(&g, &h, ob).map_err(refuse)? {
                Some(c) => {
                    cx.emit(envelope::MINOR, &c)?;
                    Ok(Status::Success)
                }
                None => Ok(Status::NotFound("pattern is not a minor".into())),
            }
        }
        OracleCommand::Cut { input, a, b } => {
            let g = read_graph(input)?;
            let cut = brute_min_cut(&g, &vertex_set(a), &vertex_set(b)).map_err(refuse)?;
            cx.emit("edge-cut", &cut)?;
            Ok(Status::Success)
        }
    }
}

fn verify(cx: &mut Ctx<'_>, input: &Path, host: Option<&Path>) -> Result<Status, CliError> {
    let env = Envelope::read(input)?;
    let host = || -> Result<MultiGraph, CliError> {
        read_graph(host.ok_or_else(|| CliError::Input(format!("--host is needed to check a {}", env.kind)))?)
    };
    let verdict: Result<(), String> = match env.kind.as_str() {
        envelope::GRAPH => env.open::<MultiGraph>(envelope::GRAPH).map(|_| ()).map_err(|e| e.to_string()),
        envelope::IMMERSION => {
            let cert: ImmersionCertificate = env.open(envelope::IMMERSION)?;
            verify_immersion(&host()?, &cert).map_err(|v| v.to_string())
        }
        envelope::MINOR => {
            let cert: MinorCertificate = env.open(envelope::MINOR)?;
            verify_minor(&host()?, &cert).map_err(|v| v.to_string())
        }
        envelope::TREE_DECOMPOSITION => {
            let td: TreeDecomposition = env.open(envelope::TREE_DECOMPOSITION)?;
            match verify_td(&host()?, &td) {
                Ok(r) if r.w1 && r.w2 => Ok(()),
                Ok(r) => Err(r.problems.join("; ")),
                Err(e) => Err(e.to_string()),
            }
        }
        envelope::RING => {
            let ring: RingDecomposition = env.open(envelope::RING)?;
            let r = verify_ring(&host()?, &ring);
            if r.all() {
                Ok(())
            } else {
                Err(r.problems.join("; "))
            }
        }
        envelope::SCRIPT => {
            let script: immersion_core::LiftingScript = env.open(envelope::SCRIPT)?;
            script.replay(&host()?).map(|_| ()).map_err(|e| e.to_string())
        }
        envelope::REPORT => {
            let report: ExperimentReport = env.open(envelope::REPORT)?;
            verify_report(&report)
        }
        "" => return Err(CliError::Input("file has no kind; only enveloped artifacts can be verified".into())),
        other => return Err(CliError::Input(format!("unknown artifact kind {other}"))),
    };
    match verdict {
        Ok(()) => {
            cx.say(&format!("{}: valid", env.kind))?;
            Ok(Status::Success)
        }
        Err(why) => Err(CliError::Rejected(format!("{}: {why}", env.kind))),
    }
}
