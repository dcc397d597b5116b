//! The `linmu` command line.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 non-convergence or
//! an enumeration cap hit, 3 I/O error, 4 the path oracle disagrees with the
//! step-wise evaluator.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Map, Value as Json};

use crate::eval::{self, EvalConfig, EvalError, Evaluation};
use crate::logic::{parse_formula, Formula, FormulaError};
use crate::model::{parse_model, validate, Diagnostic, Model, StateId};
use crate::oracle::{compare_semantics, OracleError};
use crate::semiring::{parse_rational, Value};
use crate::traces::{self, EquivKind, TraceError, TraceFragment};

#[derive(Debug, Parser)]
#[command(name = "linmu", version, about = "Model checker for quantitative linear-time fixpoint formulas")]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Options {
    /// Probabilistic stop threshold, e.g. 1/1000000000 or 0.000000001
    #[arg(long, global = true, value_name = "RAT")]
    epsilon: Option<String>,
    /// Iteration limit per fixpoint
    #[arg(long = "max-iters", global = true, value_name = "NAT")]
    max_iters: Option<usize>,
    /// Tropical values growing past this bound are promoted to inf
    #[arg(long = "promote-bound", global = true, value_name = "NAT")]
    promote_bound: Option<u64>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest number of fragments an enumeration may visit
    #[arg(long = "enum-cap", global = true, value_name = "NAT", default_value_t = 1_000_000)]
    enum_cap: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Lt,
    Tr,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a model and list diagnostics
    Check { model: PathBuf },
    /// Evaluate a closed formula (inline or a file path) at every state
    Eval { model: PathBuf, formula: String },
    /// The ν-extent (default) or μ-extent
    Extent {
        model: PathBuf,
        #[arg(long, conflicts_with = "mu")]
        nu: bool,
        #[arg(long)]
        mu: bool,
    },
    /// Linear-time behaviour on a trace fragment such as `a(b(T), *)`
    Lt {
        model: PathBuf,
        fragment: String,
        #[arg(long, value_name = "NAME")]
        state: Option<String>,
    },
    /// The n-th approximant of the maximal-trace behaviour on a truncation
    Tr {
        model: PathBuf,
        fragment: String,
        #[arg(long, value_name = "NAT")]
        n: usize,
        #[arg(long, value_name = "NAME")]
        state: Option<String>,
    },
    /// Finite-trace behaviour on a completed trace
    Ftr {
        model: PathBuf,
        fragment: String,
        #[arg(long, value_name = "NAME")]
        state: Option<String>,
    },
    /// Compare two states on all trace fragments up to a depth
    Equiv {
        model: PathBuf,
        left: String,
        right: String,
        #[arg(long, value_enum, default_value_t = Kind::Lt)]
        kind: Kind,
        #[arg(long, value_name = "NAT", default_value_t = 3)]
        depth: usize,
    },
    /// Cross-check the evaluator against the path semantics on an unrolled formula
    Oracle {
        model: PathBuf,
        formula: String,
        #[arg(long, value_name = "NAT", default_value_t = 2)]
        unroll: usize,
    },
    /// Model statistics
    Info { model: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Eval { .. } => "eval",
            Command::Extent { .. } => "extent",
            Command::Lt { .. } => "lt",
            Command::Tr { .. } => "tr",
            Command::Ftr { .. } => "ftr",
            Command::Equiv { .. } => "equiv",
            Command::Oracle { .. } => "oracle",
            Command::Info { .. } => "info",
        }
    }

    fn model_path(&self) -> &Path {
        match self {
            Command::Check { model }
            | Command::Eval { model, .. }
            | Command::Extent { model, .. }
            | Command::Lt { model, .. }
            | Command::Tr { model, .. }
            | Command::Ftr { model, .. }
            | Command::Equiv { model, .. }
            | Command::Oracle { model, .. }
            | Command::Info { model } => model,
        }
    }
}

/// Result of one invocation: exit code and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let out = run(std::env::args_os());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut report = Report::new(cli.command.name());
    let code = match execute(&cli, &mut report) {
        Ok(code) => code,
        Err(failure) => {
            report.diagnostics.extend(failure.diagnostics);
            failure.code
        }
    };
    report.render(cli.opts.format, code)
}

/// Everything an invocation prints.
struct Report {
    command: &'static str,
    semiring: Option<String>,
    values: Vec<(String, Value)>,
    diagnostics: Vec<Diagnostic>,
    extra: Map<String, Json>,
    text: Vec<String>,
    /// Text output already lists the values.
    values_in_table: bool,
}

impl Report {
    fn new(command: &'static str) -> Self {
        Report {
            command,
            semiring: None,
            values: Vec::new(),
            diagnostics: Vec::new(),
            extra: Map::new(),
            text: Vec::new(),
            values_in_table: false,
        }
    }

    fn render(self, format: Format, code: i32) -> Outcome {
        match format {
            Format::Json => {
                let mut obj = Map::new();
                obj.insert("command".into(), json!(self.command));
                obj.insert("semiring".into(), json!(self.semiring));
                let values: Map<String, Json> =
                    self.values.iter().map(|(s, v)| (s.clone(), json!(v.to_string()))).collect();
                obj.insert("values".into(), Json::Object(values));
                obj.insert("diagnostics".into(), json!(self.diagnostics));
                obj.extend(self.extra);
                let mut stdout = serde_json::to_string_pretty(&Json::Object(obj)).expect("serializable");
                stdout.push('\n');
                Outcome { code, stdout, stderr: String::new() }
            }
            Format::Text => {
                let mut stdout = String::new();
                for line in &self.text {
                    stdout.push_str(line);
                    stdout.push('\n');
                }
                for (s, v) in self.values.iter().filter(|_| !self.values_in_table) {
                    stdout.push_str(&format!("{s}\t{v}\n"));
                }
                let mut stderr = String::new();
                for d in &self.diagnostics {
                    stderr.push_str(&format!("{d}\n"));
                }
                Outcome { code, stdout, stderr }
            }
        }
    }
}

struct Failure {
    code: i32,
    diagnostics: Vec<Diagnostic>,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, diagnostics: vec![Diagnostic::error(message, None)] }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        let code = match e {
            EvalError::NonConvergence { .. } => 2,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<FormulaError> for Failure {
    fn from(e: FormulaError) -> Self {
        let diagnostic = match e {
            FormulaError::Syntax { pos, message } => Diagnostic::error(format!("syntax error: {message}"), Some(pos)),
            e => Diagnostic::error(e.to_string(), None),
        };
        Failure { code: 1, diagnostics: vec![diagnostic] }
    }
}

impl From<TraceError> for Failure {
    fn from(e: TraceError) -> Self {
        match e {
            TraceError::Eval(inner) => inner.into(),
            TraceError::Sizing { .. } => Failure::new(2, e.to_string()),
            _ => Failure::new(1, e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Eval(inner) => inner.into(),
            OracleError::Formula(inner) => inner.into(),
            OracleError::Sizing { .. } => Failure::new(2, e.to_string()),
            _ => Failure::new(1, e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(3, format!("cannot read {}: {e}", path.display())))
}

/// A formula or fragment argument names a file if such a file exists.
fn inline_or_file(arg: &str) -> Result<String, Failure> {
    let p = Path::new(arg);
    if p.is_file() {
        read(p)
    } else {
        Ok(arg.to_string())
    }
}

fn config(opts: &Options) -> Result<EvalConfig, Failure> {
    let mut cfg = EvalConfig::default();
    if let Some(e) = &opts.epsilon {
        let r =
            parse_rational(e).map_err(|col| Failure::new(1, format!("malformed --epsilon `{e}` at column {col}")))?;
        if r <= BigRational::zero() {
            return Err(Failure::new(1, "--epsilon must be positive"));
        }
        cfg.epsilon = r;
    }
    if let Some(n) = opts.max_iters {
        if n == 0 {
            return Err(Failure::new(1, "--max-iters must be at least 1"));
        }
        cfg.max_iterations = n;
    }
    cfg.promote_bound = opts.promote_bound;
    Ok(cfg)
}

fn state(model: &Model, name: &str) -> Result<StateId, Failure> {
    model.state_id(name).ok_or_else(|| Failure::new(1, format!("unknown state `{name}`")))
}

fn per_state(model: &Model, values: &[Value], only: Option<StateId>) -> Vec<(String, Value)> {
    model
        .states()
        .filter(|c| only.is_none_or(|o| o == *c))
        .map(|c| (model.state_name(c).to_string(), values[c].clone()))
        .collect()
}

fn certificate(report: &mut Report, ev: &Evaluation) {
    report.extra.insert("certificate".into(), json!(ev.certificate));
    report.text.push(format!("# {}", ev.certificate));
}

fn execute(cli: &Cli, report: &mut Report) -> Result<i32, Failure> {
    let text = read(cli.command.model_path())?;
    let model = match parse_model(&text) {
        Ok(m) => m,
        Err(e) => {
            return Err(Failure { code: 1, diagnostics: e.diagnostics() });
        }
    };
    report.semiring = Some(model.semiring().to_string());
    report.diagnostics = validate(&model);
    let cfg = config(&cli.opts)?;
    let cap = cli.opts.enum_cap;
    let formula = |arg: &str| -> Result<Formula, Failure> {
        let f = parse_formula(&inline_or_file(arg)?, model.signature(), model.semiring())?;
        f.require_closed()?;
        Ok(f)
    };
    let fragment = |arg: &str| -> Result<TraceFragment, Failure> {
        Ok(traces::parse_fragment(inline_or_file(arg)?.trim(), model.signature())?)
    };
    let only = |name: &Option<String>| name.as_deref().map(|n| state(&model, n)).transpose();

    match &cli.command {
        Command::Check { .. } => {
            if report.diagnostics.is_empty() {
                report.text.push("ok".into());
            }
        }
        Command::Info { .. } => {
            let deadlocks: Vec<&str> = model.deadlocks().map(|c| model.state_name(c)).collect();
            let info = json!({
                "states": model.num_states(),
                "transitions": model.num_transitions(),
                "labels": model.signature().labels().iter().map(|l| format!("{}/{}", l.name, l.arity)).collect::<Vec<_>>(),
                "deadlocks": deadlocks,
                "plain": model.is_plain(),
            });
            report.text.push(format!("semiring\t{}", model.semiring()));
            report.text.push(format!("states\t{}", model.num_states()));
            report.text.push(format!("transitions\t{}", model.num_transitions()));
            report.text.push(format!("labels\t{}", info["labels"].as_array().map(|a| a.len()).unwrap_or(0)));
            report.text.push(format!("deadlocks\t{}", deadlocks.join(" ")));
            report.text.push(format!("offsets\t{}", if model.is_plain() { "none" } else { "present" }));
            report.extra.insert("info".into(), info);
        }
        Command::Extent { mu, .. } => {
            let ev = if *mu { eval::mu_extent(&model, &cfg)? } else { eval::nu_extent(&model, &cfg)? };
            report.values = per_state(&model, &ev.values, None);
            certificate(report, &ev);
        }
        Command::Eval { formula: f, .. } => {
            let ev = eval::eval(&model, &formula(f)?, &cfg)?;
            report.values = per_state(&model, &ev.values, None);
            certificate(report, &ev);
        }
        Command::Lt { fragment: b, state: s, .. } => {
            let b = fragment(b)?;
            let ext = eval::nu_extent(&model, &cfg)?;
            report.values = per_state(&model, &traces::lt_all(&model, &b, &ext.values), only(s)?);
        }
        Command::Ftr { fragment: t, state: s, .. } => {
            let t = fragment(t)?;
            let values: Vec<Value> =
                model.states().map(|c| traces::finite_tr(&model, c, &t)).collect::<Result<_, _>>()?;
            report.values = per_state(&model, &values, only(s)?);
        }
        Command::Tr { fragment: t, n, state: s, .. } => {
            let t = fragment(t)?;
            let values: Vec<Value> =
                model.states().map(|c| traces::tr_approx(&model, c, &t, *n)).collect::<Result<_, _>>()?;
            report.values = per_state(&model, &values, only(s)?);
        }
        Command::Equiv { left, right, kind, depth, .. } => {
            let (c, d) = (state(&model, left)?, state(&model, right)?);
            let kind = match kind {
                Kind::Lt => EquivKind::Lt,
                Kind::Tr => EquivKind::Tr,
            };
            let e = traces::equiv_upto(&model, c, d, *depth, kind, &cfg, cap)?;
            report.text.push(format!(
                "{} up to depth {depth} ({} fragments compared)",
                if e.equivalent { "equivalent" } else { "inequivalent" },
                e.checked
            ));
            if let Some(w) = &e.witness {
                report.text.push(format!("witness\t{}", w.fragment));
                report.values = vec![(left.clone(), w.left.clone()), (right.clone(), w.right.clone())];
            }
            if let Some((u, v)) = &e.envelope {
                report.text.push(format!("envelope\t{left}: {u}\t{right}: {v}"));
            }
            report.extra.insert("equivalence".into(), json!(e));
        }
        Command::Oracle { formula: f, unroll, .. } => {
            let r = compare_semantics(&model, &formula(f)?, *unroll, &cfg, cap)?;
            report.values = r.states.iter().map(|s| (s.state.clone(), s.stepwise.clone())).collect();
            report.text.push(format!("unrolled\t{}", r.unrolled));
            report.text.push(format!("depth\t{}", r.depth));
            report.text.push("state\tstepwise\toracle\tdifference\tverdict".into());
            for s in &r.states {
                report.text.push(format!(
                    "{}\t{}\t{}\t{}\t{}",
                    s.state,
                    s.stepwise,
                    s.oracle,
                    s.difference,
                    if s.agree { "agree" } else { "DISAGREE" }
                ));
            }
            report.text.push(format!("max discrepancy {} (tolerance {})", r.max_discrepancy, r.tolerance));
            report.values_in_table = true;
            let agree = r.agree;
            report.extra.insert("report".into(), json!(r));
            if !agree {
                return Ok(4);
            }
        }
    }
    let code = if report.diagnostics.iter().any(Diagnostic::is_error) { 1 } else { 0 };
    Ok(code)
}
