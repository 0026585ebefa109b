//! `svet`: genuine tripartite nonlocality checks from the command line.
//!
//! Exit codes: `analyze` returns 0 (genuine), 1 (inconclusive) or
//! 2 (not applicable). Errors use 64 for unparsable input or usage, 65 for
//! input that parses but is not a valid state, 74 for I/O failures and 70
//! for anything else.

mod spec;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use svet_core::bounds::{detect_genuine, DetectOptions, Outcome, Verdict};
use svet_core::optimizer::{maximize_chsh, maximize_svetlichny, Backend, Optimum};
use svet_core::reproduce::{self, TableRow};
use svet_core::statefile::format_matrix;
use svet_core::states::reduce;
use svet_core::{Error, Execution, NonlocalityStrength, OptimizerConfig};

use spec::{parse_pair, StateArgs, WitnessSpec};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Invalid(String),
    Io(String),
    Other(String),
}

impl Failure {
    pub fn usage(e: impl ToString) -> Self {
        Failure::Usage(e.to_string())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Invalid(_) => 65,
            Failure::Other(_) => 70,
            Failure::Io(_) => 74,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Invalid(m) | Failure::Io(m) | Failure::Other(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Parse { .. } | Error::UnknownName(_) | Error::InvalidConfig(_) => Failure::Usage(msg),
            Error::NotSquare { .. }
            | Error::DimensionMismatch(_)
            | Error::NonFinite
            | Error::NotHermitian(_)
            | Error::TraceNotOne(_)
            | Error::NotPsd(_)
            | Error::QubitCount { .. }
            | Error::ParameterOutOfRange { .. } => Failure::Invalid(msg),
            Error::Io(_) => Failure::Io(msg),
            _ => Failure::Other(msg),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Svetlichny,
    Chsh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Gradient,
    Coordinate,
}

#[derive(Debug, Parser)]
#[command(name = "svet", version, about = "Genuine tripartite nonlocality from Svetlichny bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide genuine nonlocality of a three-qubit state.
    Analyze {
        #[command(flatten)]
        state: StateArgs,
        /// Restrict to one pair (AB, AC, BC).
        #[arg(long)]
        pair: Option<String>,
        /// Plane witness (xy, xz, yz) or a file holding a 4x4 witness.
        #[arg(long)]
        witness: Option<String>,
        /// Mixing weight `r` of the undetected strength; half the cap if omitted.
        #[arg(long)]
        r: Option<f64>,
        /// Also maximize `<S_v>` over measurement directions and report it.
        #[arg(long)]
        cross_check: bool,
        #[arg(long, env = "SVET_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Maximize the Svetlichny or CHSH value over measurement directions.
    Optimize {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, value_enum, default_value_t = Target::Svetlichny)]
        target: Target,
        /// Pair reduced to before a CHSH optimization of a three-qubit state.
        #[arg(long)]
        pair: Option<String>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        max_iterations: usize,
        #[arg(long, env = "SVET_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = BackendArg::Gradient)]
        backend: BackendArg,
        /// Run restarts on one thread.
        #[arg(long)]
        sequential: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Recompute the published tables of bounds.
    Reproduce {
        /// 1..5 or `all`.
        #[arg(long, default_value = "all")]
        table: String,
        /// Directory for the text, CSV and erratum reports.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also audit the printed closed forms.
        #[arg(long)]
        closed_forms: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write a state in the matrix file grammar.
    Export {
        #[command(flatten)]
        state: StateArgs,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Other(e.to_string()))
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Other(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Other(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Other(e.to_string()))
}

fn strength_text(s: &NonlocalityStrength) -> String {
    match *s {
        NonlocalityStrength::Detected { s_nl } => format!("S_NL = {s_nl:.6}"),
        NonlocalityStrength::Undetected { s_nl_new, k, p_max, r } => {
            format!("S^New = {s_nl_new:.6} (K = {k:.6}, P = {p_max:.6}, r = {r:.6})")
        }
    }
}

fn analyze_text(v: &Verdict) -> String {
    let mut out = String::new();
    for (pair, n) in &v.negativities {
        let _ = writeln!(out, "negativity {pair}: {n:.6}");
    }
    for c in &v.candidates {
        let regime = c.regime.map_or("-", |r| r.name());
        let fired: Vec<&str> = c.fired.iter().map(|f| f.name()).collect();
        let _ = write!(out, "{} {}: {regime}", c.pair, c.witness);
        if !fired.is_empty() {
            let _ = write!(out, ", fires {}", fired.join(" "));
        }
        if let Some(e) = &c.error {
            let _ = write!(out, " ({e})");
        }
        out.push('\n');
    }
    if let Some(e) = &v.evidence {
        let r = &e.report;
        let _ = writeln!(out, "strength: {}", strength_text(&r.strength));
        let w = &r.genuine_p_window;
        let _ = writeln!(out, "genuine p window: ({:.6}, {:.6})", w.lower, w.upper);
        let w = &r.genuine_q_window;
        let _ = writeln!(out, "genuine q window: ({:.6}, {:.6})", w.lower, w.upper);
        let _ = writeln!(
            out,
            "corollary {} on {} {}: {} = {:.6}, bound = {:.6}",
            e.corollary.name(),
            e.pair,
            e.witness,
            e.parameter,
            e.value,
            e.bound
        );
    }
    let _ = writeln!(out, "verdict: {}", v.outcome.name());
    out
}

fn analyze_csv(v: &Verdict) -> Result<String, Failure> {
    let neg = |p| v.negativities.iter().find(|(q, _)| *q == p).map_or(f64::NAN, |x| x.1);
    let rows = v
        .candidates
        .iter()
        .map(|c| {
            vec![
                v.outcome.name().to_string(),
                c.pair.to_string(),
                c.witness.clone(),
                c.regime.map_or(String::new(), |r| r.name().to_string()),
                neg(c.pair).to_string(),
                c.fired.iter().map(|f| f.name()).collect::<Vec<_>>().join(" "),
                c.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    csv_string(&["outcome", "pair", "witness", "regime", "negativity", "fired", "error"], rows)
}

struct AnalyzeArgs<'a> {
    pair: Option<&'a str>,
    witness: Option<&'a str>,
    r: Option<f64>,
    cross_check: Option<u64>,
    format: Format,
}

#[derive(serde::Serialize)]
struct CrossChecked<'a> {
    verdict: &'a Verdict,
    optimizer: &'a Optimum,
}

fn cmd_analyze(state: &StateArgs, a: AnalyzeArgs<'_>) -> Result<(String, Outcome), Failure> {
    let AnalyzeArgs {
        pair,
        witness,
        r,
        cross_check,
        format,
    } = a;
    let rho = state.resolve()?;
    rho.expect_qubits(3)?;
    let mut opts = DetectOptions {
        pair: pair.map(parse_pair).transpose()?,
        r,
        ..Default::default()
    };
    if let Some(w) = witness {
        opts.witness = Some(WitnessSpec::parse(w)?.matrix());
        opts.witness_only = true;
    }
    let v = detect_genuine(&rho, &opts)?;
    let optimum = match cross_check {
        Some(seed) => Some(maximize_svetlichny(
            &rho,
            &OptimizerConfig {
                seed,
                ..Default::default()
            },
        )?),
        None => None,
    };
    let text = match (format, &optimum) {
        (Format::Text, None) => analyze_text(&v),
        (Format::Text, Some(o)) => format!(
            "{}optimizer: max <S_v> = {:.6}, exceeds 4: {}\n",
            analyze_text(&v),
            o.value,
            if o.value > 4.0 + 1e-6 { "yes" } else { "no" }
        ),
        (Format::Json, None) => json(&v)?,
        (Format::Json, Some(o)) => json(&CrossChecked { verdict: &v, optimizer: o })?,
        (Format::Csv, _) => analyze_csv(&v)?,
    };
    Ok((text, v.outcome))
}

const SVETLICHNY_LABELS: [&str; 6] = ["A0", "A1", "B0", "B1", "C0", "C1"];
const CHSH_LABELS: [&str; 4] = ["A0", "A1", "B0", "B1"];

fn optimum_output(o: &Optimum, target: Target, format: Format) -> Result<String, Failure> {
    let labels: &[&str] = match target {
        Target::Svetlichny => &SVETLICHNY_LABELS,
        Target::Chsh => &CHSH_LABELS,
    };
    let dirs = o.directions();
    match format {
        Format::Json => json(o),
        Format::Csv => {
            let rows = labels
                .iter()
                .zip(&dirs)
                .map(|(l, d)| {
                    let (t, p) = d.angles();
                    vec![o.value.to_string(), l.to_string(), t.to_string(), p.to_string()]
                })
                .collect();
            csv_string(&["value", "setting", "theta", "phi"], rows)
        }
        Format::Text => {
            let mut out = format!("value: {:.6}\n", o.value);
            for (l, d) in labels.iter().zip(&dirs) {
                let (t, p) = d.angles();
                let _ = writeln!(out, "{l}: theta = {t:.6}, phi = {p:.6}");
            }
            let _ = writeln!(
                out,
                "iterations: {}, converged: {}, restart: {}",
                o.iterations_used, o.converged, o.restart
            );
            Ok(out)
        }
    }
}

fn cmd_optimize(
    state: &StateArgs,
    target: Target,
    pair: Option<&str>,
    cfg: OptimizerConfig,
    format: Format,
) -> Result<String, Failure> {
    cfg.validate()?;
    let rho = state.resolve()?;
    let o = match target {
        Target::Svetlichny => maximize_svetlichny(&rho, &cfg)?,
        Target::Chsh => match (rho.qubits(), pair) {
            (2, None) => maximize_chsh(&rho, &cfg)?,
            (3, Some(p)) => maximize_chsh(&reduce(&rho, parse_pair(p)?)?, &cfg)?,
            (3, None) => return Err(Failure::Usage("--target chsh on a three-qubit state needs --pair".into())),
            (n, _) => return Err(Failure::Invalid(format!("chsh needs a two- or three-qubit state, got {n} qubits"))),
        },
    };
    optimum_output(&o, target, format)
}

fn parse_tables(text: &str) -> Result<Vec<usize>, Failure> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(reproduce::TABLES.to_vec());
    }
    match text.parse::<usize>() {
        Ok(n) if (1..=5).contains(&n) => Ok(vec![n]),
        _ => Err(Failure::Usage(format!("--table expects 1..5 or all, got `{text}`"))),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn closed_form_text(families: &[usize]) -> Result<String, Failure> {
    let mut out = String::new();
    for &f in families {
        for c in reproduce::reproduce_closed_forms(f, 50)? {
            let dev = c.deviation_state.map_or("undefined".to_string(), |d| format!("{d:.3e}"));
            let _ = writeln!(out, "{} {:<28} {:<11} {dev}", c.family, c.name, c.agreement.name());
        }
    }
    Ok(out)
}

fn cmd_reproduce(table: &str, out: Option<&Path>, closed_forms: bool, format: Format) -> Result<String, Failure> {
    let tables = parse_tables(table)?;
    let mut per_table: Vec<(usize, Vec<TableRow>)> = Vec::new();
    for &t in &tables {
        per_table.push((t, reproduce::reproduce_table(t, reproduce::default_tolerance(t))?));
    }
    let all: Vec<TableRow> = per_table.iter().flat_map(|(_, r)| r.clone()).collect();
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        for (t, rows) in &per_table {
            write_file(&dir.join(format!("table_{t}.txt")), &reproduce::format_text(rows))?;
            write_file(&dir.join(format!("table_{t}.csv")), &reproduce::format_csv(rows)?)?;
        }
        write_file(&dir.join("erratum.json"), &json(&reproduce::erratum(&all))?)?;
        if closed_forms {
            write_file(&dir.join("closed_forms.txt"), &closed_form_text(&tables)?)?;
        }
    }
    let mut text = match format {
        Format::Text => reproduce::format_text(&all),
        Format::Csv => reproduce::format_csv(&all)?,
        Format::Json => json(&all)?,
    };
    if closed_forms && format == Format::Text {
        text.push_str(&closed_form_text(&tables)?);
    }
    Ok(text)
}

fn cmd_export(state: &StateArgs, out: Option<&Path>) -> Result<String, Failure> {
    let text = format_matrix(state.resolve()?.matrix());
    match out {
        Some(path) => write_file(path, &text).map(|_| String::new()),
        None => Ok(text),
    }
}

fn run(cli: Cli) -> Result<(String, u8), Failure> {
    match cli.command {
        Command::Analyze {
            state,
            pair,
            witness,
            r,
            cross_check,
            seed,
            format,
        } => {
            let args = AnalyzeArgs {
                pair: pair.as_deref(),
                witness: witness.as_deref(),
                r,
                cross_check: cross_check.then_some(seed),
                format,
            };
            let (text, outcome) = cmd_analyze(&state, args)?;
            let code = match outcome {
                Outcome::Genuine => 0,
                Outcome::Inconclusive => 1,
                Outcome::NotApplicable => 2,
            };
            Ok((text, code))
        }
        Command::Optimize {
            state,
            target,
            pair,
            restarts,
            max_iterations,
            seed,
            backend,
            sequential,
            format,
        } => {
            let cfg = OptimizerConfig {
                restarts,
                max_iterations,
                seed,
                backend: match backend {
                    BackendArg::Gradient => Backend::GradientAscent,
                    BackendArg::Coordinate => Backend::CoordinateAscent,
                },
                execution: if sequential { Execution::Sequential } else { Execution::Parallel },
                ..Default::default()
            };
            Ok((cmd_optimize(&state, target, pair.as_deref(), cfg, format)?, 0))
        }
        Command::Reproduce {
            table,
            out,
            closed_forms,
            format,
        } => Ok((cmd_reproduce(&table, out.as_deref(), closed_forms, format)?, 0)),
        Command::Export { state, out } => Ok((cmd_export(&state, out.as_deref())?, 0)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(cli) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
