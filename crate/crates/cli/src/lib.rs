//! The `nlpabs` command line: `graph`, `analyze`, `check` and `trace`.
//!
//! Exit codes: 0 success, 1 soundness violations, 2 usage or input errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nlpabs_core::oracle::Rule;
use nlpabs_core::pipeline::{check, explore};
use nlpabs_core::{
    analyze, annotations, parse_program, AbstractDomain, Analysis, AnalysisError, Exploration, Groundness, Limits,
    ParseError, ProgramGraph, SampleError, Samples, SemanticsKind, Slot, SolverOptions, StateKind,
};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Registered abstract domains.
pub const DOMAINS: &[&str] = &["groundness"];

/// Seed for randomized checks, from `NLPABS_SEED` when set.
pub fn seed() -> u64 {
    std::env::var("NLPABS_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(0x6e6c_7061)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Semantics {
    Flat,
    Diamond,
}

impl From<Semantics> for SemanticsKind {
    fn from(s: Semantics) -> Self {
        match s {
            Semantics::Flat => SemanticsKind::Flat,
            Semantics::Diamond => SemanticsKind::Diamond,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Graph,
    Analyze,
    Check,
    Trace,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Graph => "graph",
            Command::Analyze => "analyze",
            Command::Check => "check",
            Command::Trace => "trace",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nlpabs", version, about = "Abstract interpretation of normal logic programs")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Print the program graph.
    Graph(Opts),
    /// Solve the flat or diamond equation system.
    Analyze(Opts),
    /// Compare the analysis with a bounded concrete exploration.
    Check(Opts),
    /// List the reachable states of the transition system.
    Trace(Opts),
}

#[derive(Debug, clap::Args)]
struct Opts {
    /// Program file.
    file: PathBuf,
    #[arg(long, value_enum, default_value = "flat")]
    semantics: Semantics,
    #[arg(long, default_value = "groundness")]
    domain: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Sample fixture with concrete calling substitutions.
    #[arg(long, value_name = "FILE")]
    queries: Option<PathBuf>,
    /// Breadth-first levels explored by `check` and `trace`.
    #[arg(long, value_name = "N")]
    depth: Option<usize>,
    /// Cap on distinct states explored by `check` and `trace`.
    #[arg(long, value_name = "N")]
    max_states: Option<usize>,
    /// Add solver and exploration counters.
    #[arg(long)]
    stats: bool,
    /// Include the equation system as JSON.
    #[arg(long)]
    dump_equations: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub program: PathBuf,
    pub semantics: SemanticsKind,
    pub domain: String,
    pub format: Format,
    pub queries: Option<PathBuf>,
    pub limits: Limits,
    pub stats: bool,
    pub dump_equations: bool,
}

impl RunConfig {
    pub fn from_args<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args)?;
        let (command, o) = match cli.command {
            Sub::Graph(o) => (Command::Graph, o),
            Sub::Analyze(o) => (Command::Analyze, o),
            Sub::Check(o) => (Command::Check, o),
            Sub::Trace(o) => (Command::Trace, o),
        };
        let defaults = Limits::default();
        Ok(RunConfig {
            command,
            program: o.file,
            semantics: o.semantics.into(),
            domain: o.domain,
            format: o.format,
            queries: o.queries,
            limits: Limits {
                depth: o.depth.unwrap_or(defaults.depth),
                max_states: o.max_states.unwrap_or(defaults.max_states),
            },
            stats: o.stats,
            dump_equations: o.dump_equations,
        })
    }
}

/// What a run printed and its exit code.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(code: i32, stdout: String) -> Self {
        Output { code, stdout, stderr: String::new() }
    }

    fn error(message: impl std::fmt::Display) -> Self {
        Output { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

/// Parses arguments and runs the selected command with a registered domain.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::from_args(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Output::ok(EXIT_OK, text)
            };
        }
    };
    match cfg.domain.as_str() {
        "groundness" => execute(&cfg, &Groundness),
        other => Output::error(format!("unknown domain `{other}`; available: {}", DOMAINS.join(", "))),
    }
}

/// Runs a parsed configuration against `domain`.
pub fn execute<D: AbstractDomain>(cfg: &RunConfig, domain: &D) -> Output {
    let result = match cfg.command {
        Command::Graph => cmd_graph(cfg),
        Command::Analyze => cmd_analyze(cfg, domain),
        Command::Check => cmd_check(cfg, domain),
        Command::Trace => cmd_trace(cfg, domain),
    };
    result.unwrap_or_else(Output::error)
}

/// An input or usage error; exits with code 2.
#[derive(Debug)]
pub enum CliError {
    Read(PathBuf, std::io::Error),
    Parse(PathBuf, ParseError),
    Samples(PathBuf, SampleError),
    Analysis(PathBuf, AnalysisError),
    MissingQueries(Command),
    Format(Command, Format),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Read(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Parse(p, e) => located(f, p, e),
            CliError::Samples(p, e) => located(f, p, e),
            CliError::Analysis(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::MissingQueries(c) => write!(f, "`{}` needs a sample fixture (--queries FILE)", c.name()),
            CliError::Format(c, fmt) => write!(f, "`{}` does not support --format {fmt:?}", c.name()),
        }
    }
}

/// `file:line:col: message` when the message starts with a position.
fn located(f: &mut std::fmt::Formatter<'_>, path: &Path, e: &dyn std::fmt::Display) -> std::fmt::Result {
    let msg = e.to_string();
    let sep = if msg.starts_with(|c: char| c.is_ascii_digit()) { ":" } else { ": " };
    write!(f, "{}{sep}{msg}", path.display())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Read(path.to_path_buf(), e))
}

fn load_graph(cfg: &RunConfig) -> Result<ProgramGraph, CliError> {
    let text = read(&cfg.program)?;
    let program = parse_program(&text).map_err(|e| CliError::Parse(cfg.program.clone(), e))?;
    Ok(ProgramGraph::build(&program))
}

fn load_samples<D: AbstractDomain>(cfg: &RunConfig, domain: &D, graph: &ProgramGraph) -> Result<Samples, CliError> {
    let path = cfg.queries.as_ref().ok_or(CliError::MissingQueries(cfg.command))?;
    let text = read(path)?;
    let samples = Samples::parse(&text, graph.program()).map_err(|e| CliError::Samples(path.clone(), e))?;
    let ann = annotations(domain, graph.program()).map_err(|e| CliError::Analysis(cfg.program.clone(), e))?;
    samples.check_described(domain, &ann).map_err(|e| CliError::Samples(path.clone(), e))?;
    Ok(samples)
}

fn run_analysis<D: AbstractDomain>(
    cfg: &RunConfig,
    domain: &D,
    graph: &ProgramGraph,
) -> Result<Analysis<D::Elem>, CliError> {
    analyze(domain, graph, cfg.semantics, SolverOptions::default()).map_err(|e| CliError::Analysis(cfg.program.clone(), e))
}

fn text_only(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.format {
        Format::Dot => Err(CliError::Format(cfg.command, Format::Dot)),
        _ => Ok(()),
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn cmd_graph(cfg: &RunConfig) -> Result<Output, CliError> {
    let graph = load_graph(cfg)?;
    let stats = graph.stats();
    let out = match cfg.format {
        Format::Dot => graph.to_dot(),
        Format::Json => {
            let mut v = graph.to_json();
            if cfg.stats {
                v["stats"] = serde_json::to_value(stats).expect("serializable");
            }
            json_text(&v)
        }
        Format::Text => {
            let mut s = String::new();
            for e in graph.edges() {
                writeln!(s, "{e} {}", e.class).unwrap();
            }
            if cfg.stats {
                writeln!(
                    s,
                    "nodes {}, edges {} (E0 {}, E1 {}, E2 {}, E3 {}), pmax {}",
                    stats.nodes, stats.edges, stats.e0, stats.e1, stats.e2, stats.e3, stats.pmax
                )
                .unwrap();
            }
            s
        }
    };
    Ok(Output::ok(EXIT_OK, out))
}

fn slot_name(slot: &Slot) -> String {
    match slot {
        Slot::Edge(e) => e.to_string(),
        Slot::Point(p, _) => p.to_string(),
    }
}

pub fn cmd_analyze<D: AbstractDomain>(cfg: &RunConfig, domain: &D) -> Result<Output, CliError> {
    text_only(cfg)?;
    let graph = load_graph(cfg)?;
    let a = run_analysis(cfg, domain, &graph)?;
    let eqs = a.system.equations();
    let st = &a.solution.stats;
    let out = match cfg.format {
        Format::Json => {
            let values: Vec<Value> = eqs
                .iter()
                .zip(&a.solution.values)
                .map(|(eq, v)| json!({ "slot": slot_name(&eq.slot), "value": domain.render(v) }))
                .collect();
            let mut v = json!({
                "schema": 1,
                "command": "analyze",
                "semantics": cfg.semantics,
                "domain": domain.name(),
                "values": values,
            });
            if cfg.stats {
                v["stats"] = json!({
                    "equations": a.system.len(),
                    "unify_operands": a.system.count_unify_ops(),
                    "evaluations": st.evaluations,
                    "updates": st.updates,
                    "iterations": st.iterations,
                });
            }
            if cfg.dump_equations {
                v["equations"] = a.system.to_json(domain);
            }
            json_text(&v)
        }
        _ => {
            let mut s = String::new();
            for (eq, v) in eqs.iter().zip(&a.solution.values) {
                writeln!(s, "{}: {}", slot_name(&eq.slot), domain.render(v)).unwrap();
            }
            if cfg.stats {
                writeln!(
                    s,
                    "equations {}, unify operands {}, evaluations {}, updates {}, iterations {}",
                    a.system.len(),
                    a.system.count_unify_ops(),
                    st.evaluations,
                    st.updates,
                    st.iterations
                )
                .unwrap();
            }
            if cfg.dump_equations {
                s.push_str(&json_text(&a.system.to_json(domain)));
            }
            s
        }
    };
    Ok(Output::ok(EXIT_OK, out))
}

fn kind_counts(ex: &Exploration) -> Value {
    json!({
        "final": ex.count(StateKind::Final),
        "dead": ex.count(StateKind::Dead),
        "stuck": ex.count(StateKind::Stuck),
        "open": ex.count(StateKind::Open),
    })
}

fn kind_summary(ex: &Exploration) -> String {
    format!(
        "states {} (final {}, dead {}, stuck {}, open {}), levels {}, truncated {}",
        ex.states.len(),
        ex.count(StateKind::Final),
        ex.count(StateKind::Dead),
        ex.count(StateKind::Stuck),
        ex.count(StateKind::Open),
        ex.levels,
        if ex.truncated { "yes" } else { "no" }
    )
}

pub fn cmd_check<D: AbstractDomain>(cfg: &RunConfig, domain: &D) -> Result<Output, CliError> {
    text_only(cfg)?;
    let graph = load_graph(cfg)?;
    let samples = load_samples(cfg, domain, &graph)?;
    let a = run_analysis(cfg, domain, &graph)?;
    let ex = explore(&graph, &samples, cfg.limits);
    let violations = check(domain, &graph, &a, &ex);
    let code = if violations.is_empty() { EXIT_OK } else { EXIT_VIOLATIONS };
    let out = match cfg.format {
        Format::Json => {
            let mut v = json!({
                "schema": 1,
                "command": "check",
                "semantics": cfg.semantics,
                "domain": domain.name(),
                "samples": samples.len(),
                "states": ex.states.len(),
                "truncated": ex.truncated,
                "violations": violations,
            });
            if cfg.stats {
                v["kinds"] = kind_counts(&ex);
                v["levels"] = json!(ex.levels);
            }
            json_text(&v)
        }
        _ => {
            let mut s = String::new();
            writeln!(s, "{} semantics, {} samples, {} states explored", cfg.semantics, samples.len(), ex.states.len())
                .unwrap();
            if ex.truncated {
                writeln!(s, "exploration truncated by --depth or --max-states").unwrap();
            }
            if cfg.stats {
                writeln!(s, "{}", kind_summary(&ex)).unwrap();
            }
            for v in &violations {
                writeln!(s, "violation at {}: {} not described by {}", v.slot, v.substitution, v.abstract_value).unwrap();
            }
            writeln!(s, "{} violations", violations.len()).unwrap();
            s
        }
    };
    Ok(Output::ok(code, out))
}

fn rule_name(rule: Rule) -> &'static str {
    match rule {
        Rule::EnterPositive => "enter",
        Rule::EnterNegative => "enter-negative",
        Rule::Exit => "exit",
        Rule::Negation => "negation",
    }
}

fn kind_name(kind: StateKind) -> &'static str {
    match kind {
        StateKind::Final => "final",
        StateKind::Dead => "dead",
        StateKind::Stuck => "stuck",
        StateKind::Open => "open",
    }
}

pub fn cmd_trace<D: AbstractDomain>(cfg: &RunConfig, domain: &D) -> Result<Output, CliError> {
    text_only(cfg)?;
    let graph = load_graph(cfg)?;
    let samples = load_samples(cfg, domain, &graph)?;
    let ex = explore(&graph, &samples, cfg.limits);
    let program = graph.program();
    let answers: Vec<(usize, Vec<String>)> = ex
        .answers(&graph)
        .into_iter()
        .map(|(k, set)| {
            let vars = program.vars_of(k);
            let mut list: Vec<String> = set.iter().map(|t| t.restrict(vars).to_string()).collect();
            list.dedup();
            (k, list)
        })
        .collect();
    let out = match cfg.format {
        Format::Json => {
            let states: Vec<Value> = ex
                .states
                .iter()
                .enumerate()
                .map(|(n, s)| {
                    json!({
                        "id": n,
                        "from": ex.origins[n].map(|(m, _)| m),
                        "rule": ex.origins[n].map(|(_, r)| rule_name(r)),
                        "kind": kind_name(ex.kinds[n]),
                        "state": s.display(&graph).to_string(),
                    })
                })
                .collect();
            let answers: Vec<Value> =
                answers.iter().map(|(k, list)| json!({ "query": k, "answers": list })).collect();
            let mut v = json!({
                "schema": 1,
                "command": "trace",
                "truncated": ex.truncated,
                "levels": ex.levels,
                "states": states,
                "answers": answers,
            });
            if cfg.stats {
                v["kinds"] = kind_counts(&ex);
            }
            json_text(&v)
        }
        _ => {
            let mut s = String::new();
            for (n, st) in ex.states.iter().enumerate() {
                let origin = match ex.origins[n] {
                    None => "initial".to_string(),
                    Some((m, r)) => format!("{} from {m}", rule_name(r)),
                };
                writeln!(s, "{n} [{origin}; {}] {}", kind_name(ex.kinds[n]), st.display(&graph)).unwrap();
            }
            writeln!(s, "{}", kind_summary(&ex)).unwrap();
            for (k, list) in &answers {
                writeln!(s, "answers for query {k}:").unwrap();
                for a in list {
                    writeln!(s, "  {a}").unwrap();
                }
            }
            s
        }
    };
    Ok(Output::ok(EXIT_OK, out))
}
