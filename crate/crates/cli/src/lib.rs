//! Command-line front end: `check`, `validate`, `traces` and `explain`.
//!
//! Exit codes: 0 green, 1 orange, 2 red, 3 input or validation error,
//! 4 enumeration limit exceeded. `validate`, `traces` and `explain` exit 0
//! on success.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use normcheck::compliance::{
    aggregate, check_trace, explain, AggregateVerdict, ComplianceReport, ReportMeta, TraceResult,
};
use normcheck::ddl::RuleSet;
use normcheck::process::{parse_annotations, parse_bpmn, AnnotationMap, ProcessGraph};
use normcheck::rules::{parse_ruleset_named, validate_merged, Diagnostic};
use normcheck::traces::{count_traces, enumerate_traces, EnumerationConfig, Trace};
use normcheck::TraceError;
use rayon::prelude::*;
use serde::Serialize;

pub const EXIT_GREEN: u8 = 0;
pub const EXIT_ORANGE: u8 = 1;
pub const EXIT_RED: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_LIMIT: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "normcheck", version, about = "Check BPMN processes against defeasible deontic rules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every trace of a process and print the compliance report.
    Check(CheckArgs),
    /// Validate rule files and, optionally, a process model and annotations.
    Validate(ValidateArgs),
    /// Count (and optionally list) the traces of a process.
    Traces(TracesArgs),
    /// Show the replay state and derivation proofs at one step of one trace.
    Explain(ExplainArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Bounds {
    /// Maximum executions of a cycle body per trace.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_loop: u64,
    /// Maximum interleavings of one parallel block.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_interleavings: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_traces: u64,
}

impl Bounds {
    fn config(&self) -> EnumerationConfig {
        EnumerationConfig {
            max_loop: self.max_loop as usize,
            max_interleavings: self.max_interleavings as usize,
            max_traces: self.max_traces as usize,
        }
    }
}

#[derive(Debug, Args)]
pub struct Inputs {
    #[arg(long)]
    pub bpmn: String,
    /// Rule file; repeat to merge several.
    #[arg(long = "rules", required = true)]
    pub rules: Vec<String>,
    /// JSON task annotations; without it no task asserts anything.
    #[arg(long)]
    pub annotations: Option<String>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub bounds: Bounds,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads used to check traces.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long = "rules")]
    pub rules: Vec<String>,
    #[arg(long)]
    pub bpmn: Option<String>,
    #[arg(long, requires = "bpmn")]
    pub annotations: Option<String>,
}

#[derive(Debug, Args)]
pub struct TracesArgs {
    #[arg(long)]
    pub bpmn: String,
    #[command(flatten)]
    pub bounds: Bounds,
    /// Print each trace's task names.
    #[arg(long)]
    pub list: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub bounds: Bounds,
    /// Trace index, in the order `traces --list` prints them.
    #[arg(long, default_value_t = 0)]
    pub trace: usize,
    #[arg(long)]
    pub step: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// A failure that ends the command with an exit code; `lines` are
/// printed verbatim to the error stream.
#[derive(Debug)]
struct Failure {
    code: u8,
    lines: Vec<String>,
}

impl Failure {
    fn input(msg: impl fmt::Display) -> Self {
        Self { code: EXIT_INPUT, lines: vec![format!("error: {msg}")] }
    }
}

impl From<TraceError> for Failure {
    fn from(e: TraceError) -> Self {
        let code = match e {
            TraceError::ExplosionLimit { .. } => EXIT_LIMIT,
            _ => EXIT_INPUT,
        };
        Self { code, lines: vec![format!("error: {e}")] }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_INPUT;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    let result = match &cli.command {
        Command::Check(a) => run_check(a, out, err),
        Command::Validate(a) => run_validate(a, out, err),
        Command::Traces(a) => run_traces(a, out),
        Command::Explain(a) => run_explain(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            for line in f.lines {
                let _ = writeln!(err, "{line}");
            }
            f.code
        }
    }
}

fn read(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{path}: {e}")))
}

/// Parses and merges rule files. Diagnostics are returned whether or not
/// the merge succeeded.
fn load_rules(paths: &[String]) -> Result<(Option<RuleSet>, Vec<Diagnostic>), Failure> {
    let mut docs = Vec::new();
    for p in paths {
        let text = read(p)?;
        docs.push(parse_ruleset_named(&text, p).map_err(|e| Failure::input(format!("{p}: {e}")))?);
    }
    Ok(validate_merged(&docs))
}

fn load_process(path: &str) -> Result<ProcessGraph, Failure> {
    parse_bpmn(&read(path)?).map_err(|e| Failure::input(format!("{path}: {e}")))
}

fn load_annotations(path: Option<&str>, g: &ProcessGraph, rs: &RuleSet) -> Result<AnnotationMap, Failure> {
    match path {
        None => Ok(AnnotationMap::new(g.process_id())),
        Some(p) => parse_annotations(&read(p)?, g, rs.vocabulary())
            .map_err(|e| Failure::input(format!("{p}: {e}"))),
    }
}

struct Loaded {
    rs: RuleSet,
    graph: ProcessGraph,
    ann: AnnotationMap,
}

fn load_all(inputs: &Inputs, err: &mut dyn Write) -> Result<Loaded, Failure> {
    let (rs, diags) = load_rules(&inputs.rules)?;
    let Some(rs) = rs else {
        return Err(Failure {
            code: EXIT_INPUT,
            lines: diags.iter().filter(|d| d.is_error()).map(ToString::to_string).collect(),
        });
    };
    for d in &diags {
        let _ = writeln!(err, "{d}");
    }
    let graph = load_process(&inputs.bpmn)?;
    let ann = load_annotations(inputs.annotations.as_deref(), &graph, &rs)?;
    Ok(Loaded { rs, graph, ann })
}

fn check_all(traces: &[Trace], l: &Loaded, jobs: usize) -> Result<Vec<TraceResult>, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(Failure::input)?;
    pool.install(|| {
        traces
            .par_iter()
            .map(|t| check_trace(t, &l.ann, &l.rs))
            .collect::<Result<Vec<_>, _>>()
    })
    .map_err(Failure::input)
}

fn run_check(a: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, Failure> {
    let l = load_all(&a.inputs, err)?;
    let cfg = a.bounds.config();
    let traces = enumerate_traces(&l.graph, &cfg)?;
    let results = check_all(&traces, &l, a.jobs as usize)?;
    let meta = ReportMeta {
        process_id: l.graph.process_id().to_string(),
        rule_files: a.inputs.rules.clone(),
        config: cfg,
    };
    let report = aggregate(results, meta).map_err(Failure::input)?;
    let text = match a.format {
        Format::Json => json(&JsonReport::new(&report, &a.inputs)),
        Format::Text => text_report(&report),
    };
    let _ = out.write_all(text.as_bytes());
    Ok(match report.verdict {
        AggregateVerdict::Green => EXIT_GREEN,
        AggregateVerdict::Orange => EXIT_ORANGE,
        AggregateVerdict::Red => EXIT_RED,
    })
}

fn run_validate(a: &ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, Failure> {
    if a.rules.is_empty() && a.bpmn.is_none() {
        return Err(Failure::input("nothing to validate: pass --rules and/or --bpmn"));
    }
    let mut failed = false;
    let mut rs = None;
    if !a.rules.is_empty() {
        let (merged, diags) = load_rules(&a.rules)?;
        for d in &diags {
            if d.is_error() {
                let _ = writeln!(err, "{d}");
            } else {
                let _ = writeln!(out, "{d}");
            }
        }
        failed |= merged.is_none();
        rs = merged;
    }
    if let Some(path) = &a.bpmn {
        match load_process(path) {
            Ok(g) => {
                if let Some(ann) = &a.annotations {
                    match &rs {
                        Some(rs) => {
                            if let Err(f) = load_annotations(Some(ann), &g, rs) {
                                f.lines.iter().for_each(|l| {
                                    let _ = writeln!(err, "{l}");
                                });
                                failed = true;
                            }
                        }
                        None if a.rules.is_empty() => {
                            let _ = writeln!(err, "error: annotations need --rules for the vocabulary");
                            failed = true;
                        }
                        None => {}
                    }
                }
            }
            Err(f) => {
                f.lines.iter().for_each(|l| {
                    let _ = writeln!(err, "{l}");
                });
                failed = true;
            }
        }
    }
    if failed {
        return Ok(EXIT_INPUT);
    }
    let _ = writeln!(out, "ok");
    Ok(0)
}

#[derive(Serialize)]
struct JsonTraces {
    count: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    traces: Option<Vec<Vec<String>>>,
}

fn run_traces(a: &TracesArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let g = load_process(&a.bpmn)?;
    let cfg = a.bounds.config();
    let count = count_traces(&g, &cfg)?;
    let listed = if a.list {
        Some(
            enumerate_traces(&g, &cfg)?
                .iter()
                .map(|t| t.steps.iter().map(|s| s.name.clone()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };
    let text = match a.format {
        Format::Json => json(&JsonTraces { count, traces: listed }),
        Format::Text => {
            let mut s = format!("{count}\n");
            for (i, names) in listed.iter().flatten().enumerate() {
                s.push_str(&format!("{i}: {}\n", names.join(" -> ")));
            }
            s
        }
    };
    let _ = out.write_all(text.as_bytes());
    Ok(0)
}

fn run_explain(a: &ExplainArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let l = load_all(&a.inputs, &mut std::io::sink())?;
    let traces = enumerate_traces(&l.graph, &a.bounds.config())?;
    let trace = traces.get(a.trace).ok_or_else(|| {
        Failure::input(format!("trace {} out of range for {} traces", a.trace, traces.len()))
    })?;
    let log = explain(trace, &l.ann, &l.rs, a.step).map_err(Failure::input)?;
    let text = match a.format {
        Format::Json => json(&log),
        Format::Text => format!("trace {}\n{log}", a.trace),
    };
    let _ = out.write_all(text.as_bytes());
    Ok(0)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct JsonViolation<'a> {
    rule: &'a str,
    task: &'a str,
    task_id: &'a str,
    step: usize,
    control_objective: &'a str,
    compensated: bool,
}

#[derive(Serialize)]
struct JsonWarning<'a> {
    code: &'a str,
    step: usize,
    message: &'a str,
}

#[derive(Serialize)]
struct JsonTrace<'a> {
    steps: Vec<&'a str>,
    verdict: normcheck::compliance::Verdict,
    violations: Vec<JsonViolation<'a>>,
    warnings: Vec<JsonWarning<'a>>,
    origin: &'a normcheck::traces::OriginPath,
}

#[derive(Serialize)]
struct JsonConfig<'a> {
    bpmn: &'a str,
    rules: &'a [String],
    annotations: Option<&'a str>,
    max_loop: usize,
    max_interleavings: usize,
    max_traces: usize,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    verdict: AggregateVerdict,
    process: &'a str,
    traces: Vec<JsonTrace<'a>>,
    explanations: &'a [normcheck::compliance::Explanation],
    config: JsonConfig<'a>,
}

impl<'a> JsonReport<'a> {
    fn new(r: &'a ComplianceReport, inputs: &'a Inputs) -> Self {
        let traces = r
            .trace_results
            .iter()
            .map(|t| JsonTrace {
                steps: t.trace.steps.iter().map(|s| s.name.as_str()).collect(),
                verdict: t.verdict,
                violations: t
                    .violations
                    .iter()
                    .map(|v| JsonViolation {
                        rule: &v.rule,
                        task: &v.task_name,
                        task_id: &v.task_id,
                        step: v.step,
                        control_objective: &v.control_objective,
                        compensated: v.compensated,
                    })
                    .collect(),
                warnings: t
                    .warnings
                    .iter()
                    .map(|w| JsonWarning { code: w.code, step: w.step, message: &w.message })
                    .collect(),
                origin: &t.trace.origin,
            })
            .collect();
        Self {
            verdict: r.verdict,
            process: &r.process_id,
            traces,
            explanations: &r.explanations,
            config: JsonConfig {
                bpmn: &inputs.bpmn,
                rules: &inputs.rules,
                annotations: inputs.annotations.as_deref(),
                max_loop: r.config.max_loop,
                max_interleavings: r.config.max_interleavings,
                max_traces: r.config.max_traces,
            },
        }
    }
}

fn text_report(r: &ComplianceReport) -> String {
    let mut s = String::new();
    let c = &r.config;
    s.push_str(&format!(
        "process {}: {} trace(s) checked (max-loop {}, max-interleavings {}, max-traces {})\n",
        r.process_id,
        r.trace_results.len(),
        c.max_loop,
        c.max_interleavings,
        c.max_traces
    ));
    for (i, t) in r.trace_results.iter().enumerate() {
        let names: Vec<&str> = t.trace.steps.iter().map(|s| s.name.as_str()).collect();
        s.push_str(&format!("trace {i}: {:?}\n  {}\n", t.verdict, names.join(" -> ")));
        for v in &t.violations {
            let tag = if v.compensated { "compensated violation" } else { "violation" };
            s.push_str(&format!("  {tag}: {} {} at step {} ({})\n", v.rule, v.element, v.step, v.task_name));
        }
        for w in &t.warnings {
            s.push_str(&format!("  warning[{}] at step {}: {}\n", w.code, w.step, w.message));
        }
    }
    if !r.explanations.is_empty() {
        s.push_str("explanations:\n");
        for e in &r.explanations {
            let traces: Vec<String> = e.traces.iter().map(ToString::to_string).collect();
            s.push_str(&format!(
                "  rule {} violated at task \"{}\" ({}){}: {}\n    traces: {}\n",
                e.rule,
                e.task_name,
                e.task_id,
                if e.compensated { ", compensated" } else { "" },
                e.control_objective,
                traces.join(", ")
            ));
        }
    }
    s.push_str(&format!("verdict: {}\n", r.verdict.as_str()));
    s
}
