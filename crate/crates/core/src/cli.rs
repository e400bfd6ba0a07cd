//! The `repairaf` command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 malformed input, 3 budget
//! exceeded, 4 route or equivalence mismatch, 5 unknown label.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::framework::{build, parse_apx, preprocess, Argument, Construction, Setaf};
use crate::model::{ConstraintProfile, Fact};
use crate::parser::{parse_instance, serialize_labeled, ParsedInstance};
use crate::reductions::{parse_dimacs, parse_qdimacs, qbf_to_instance, random_instance, sat_to_instance, SatMode};
use crate::repairs::{check_equivalence, in_all_repairs, in_some_repair, rep_nonempty, repairs_by, Budgets, Route};
use crate::semantics::{credulous, skeptical, SemanticsKind};

#[derive(Debug, Parser)]
#[command(name = "repairaf", version, about = "Subset repairs via argumentation frameworks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate subset repairs, or decide whether a non-empty one exists.
    Repairs {
        file: PathBuf,
        #[arg(long)]
        exists: bool,
        #[arg(long, default_value = "argumentation")]
        route: Route,
        #[arg(long, value_enum, default_value_t = Format::Pretty)]
        format: Format,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Print the argumentation framework of an instance.
    Translate {
        file: PathBuf,
        /// Use the SETAF constructions even for FD/ID-only inputs.
        #[arg(long)]
        force_setaf: bool,
        /// Apply support propagation and report the removed facts.
        #[arg(long)]
        preprocess: bool,
        #[arg(long, value_enum, default_value_t = FrameworkFormat::Apx)]
        format: FrameworkFormat,
    },
    /// Decide acceptance of one fact (or, for `.apx` input, one argument).
    Accept {
        file: PathBuf,
        label: String,
        /// Repair-based task; the default for `.cdb` input.
        #[arg(long, value_enum, conflicts_with = "semantics")]
        task: Option<Task>,
        /// Argumentation semantics; the default for `.apx` input is `pref`.
        #[arg(long)]
        semantics: Option<SemanticsKind>,
        #[arg(long, value_enum, default_value_t = Mode::Cred)]
        mode: Mode,
        #[arg(long, default_value = "argumentation")]
        route: Route,
        #[arg(long, value_enum, default_value_t = Format::Pretty)]
        format: Format,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Write an instance from a formula or a seed.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Check every `.cdb` file of a directory for repair/extension agreement.
    Verify {
        dir: PathBuf,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
}

#[derive(Debug, Subcommand)]
enum GenerateKind {
    /// From DIMACS CNF.
    Sat {
        input: PathBuf,
        #[arg(long, default_value = "sr")]
        mode: SatMode,
        #[command(flatten)]
        out: OutputArg,
    },
    /// From QDIMACS with a ∀∃ prefix.
    Qbf {
        input: PathBuf,
        #[command(flatten)]
        out: OutputArg,
    },
    /// A reproducible random instance.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Constraint classes, e.g. `fd+id`, `dc`, `lav`.
        #[arg(long, default_value = "dc")]
        profile: ConstraintProfile,
        #[arg(long, default_value_t = 6)]
        facts: usize,
        #[command(flatten)]
        out: OutputArg,
    },
}

#[derive(Debug, Args)]
struct OutputArg {
    /// Destination file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Copy)]
struct BudgetArgs {
    #[arg(long, default_value_t = crate::semantics::DEFAULT_MAX_ARGS)]
    max_args: usize,
    #[arg(long, default_value_t = crate::repairs::DEFAULT_MAX_FACTS)]
    max_facts: usize,
}

impl From<BudgetArgs> for Budgets {
    fn from(b: BudgetArgs) -> Self {
        Budgets {
            max_facts: b.max_facts,
            max_args: b.max_args,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Pretty,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FrameworkFormat {
    Apx,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Task {
    /// In some repair.
    Sr,
    /// In all repairs.
    Ar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Cred,
    Skep,
}

/// Maps an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 1,
        Error::Model(_) | Error::Source(_) | Error::Format { .. } | Error::Precondition(_) => 2,
        Error::BudgetExceeded { .. } => 3,
        Error::RouteMismatch(_) => 4,
        Error::UnknownLabel(_) => 5,
    }
}

/// Runs the CLI on the process arguments and standard streams.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI on `args` (including the program name).
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Repairs {
            file,
            exists,
            route,
            format,
            budgets,
        } => cmd_repairs(&file, exists, route, format, budgets.into(), out),
        Command::Translate {
            file,
            force_setaf,
            preprocess,
            format,
        } => cmd_translate(&file, force_setaf, preprocess, format, out),
        Command::Accept {
            file,
            label,
            task,
            semantics,
            mode,
            route,
            format,
            budgets,
        } => cmd_accept(&file, &label, task, semantics, mode, route, format, budgets.into(), out),
        Command::Generate { kind } => cmd_generate(kind, out, err),
        Command::Verify { dir, budgets } => cmd_verify(&dir, budgets.into(), out),
    }
}

fn load(path: &Path) -> Result<ParsedInstance> {
    let text = fs::read_to_string(path)?;
    Ok(parse_instance(&text)?)
}

fn route_name(route: Route) -> &'static str {
    match route {
        Route::Oracle => "oracle",
        Route::Argumentation => "argumentation",
        Route::Both => "both",
    }
}

fn sorted_labels<'a>(parsed: &ParsedInstance, facts: impl IntoIterator<Item = &'a Fact>) -> Vec<String> {
    let mut names = parsed.describe(facts);
    names.sort();
    names
}

fn emit_json(out: &mut dyn Write, value: serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(&value).expect("json values serialize");
    writeln!(out, "{text}")?;
    Ok(())
}

fn cmd_repairs(
    file: &Path,
    exists: bool,
    route: Route,
    format: Format,
    budgets: Budgets,
    out: &mut dyn Write,
) -> Result<i32> {
    let parsed = load(file)?;
    let cdb = &parsed.instance;
    if exists {
        let answer = rep_nonempty(cdb, route, budgets)?;
        match format {
            Format::Pretty => writeln!(out, "{answer}")?,
            Format::Json => emit_json(out, json!({"exists_nonempty": answer, "route": route_name(route)}))?,
        }
        return Ok(0);
    }
    let repairs = repairs_by(cdb, route, budgets)?;
    let mut rows: Vec<Vec<String>> = repairs.iter().map(|r| sorted_labels(&parsed, r)).collect();
    rows.sort();
    match format {
        Format::Pretty => {
            writeln!(out, "{} repair(s) via {}", rows.len(), route_name(route))?;
            for r in &rows {
                writeln!(out, "{{{}}}", r.join(", "))?;
            }
        }
        Format::Json => emit_json(out, json!({"route": route_name(route), "repairs": rows}))?,
    }
    Ok(0)
}

fn cmd_translate(
    file: &Path,
    force_setaf: bool,
    pre: bool,
    format: FrameworkFormat,
    out: &mut dyn Write,
) -> Result<i32> {
    let parsed = load(file)?;
    let cdb = &parsed.instance;
    let construction = Construction::for_profile(cdb.profile(), force_setaf);
    let setaf = build(cdb, construction)?;
    let names = parsed.names();
    let (framework, removed) = if pre {
        let p = preprocess(&setaf);
        let rounds: Vec<Vec<String>> = p.rounds.iter().map(|r| sorted_labels(&parsed, r)).collect();
        (p.reduced, Some(rounds))
    } else {
        (setaf, None)
    };
    match format {
        FrameworkFormat::Apx => {
            writeln!(out, "% {} for profile {}", construction.name(), cdb.profile())?;
            if let Some(rounds) = &removed {
                for (i, r) in rounds.iter().enumerate() {
                    writeln!(out, "% removed in round {}: {}", i + 1, r.join(" "))?;
                }
                if rounds.is_empty() {
                    writeln!(out, "% removed: none")?;
                }
            }
            out.write_all(framework.to_apx(&names).as_bytes())?;
        }
        FrameworkFormat::Json => {
            let mut v = json!({
                "construction": construction.name(),
                "profile": cdb.profile().to_string(),
                "framework": framework.to_json(&names),
            });
            if let Some(rounds) = removed {
                v["removed"] = json!(rounds);
            }
            emit_json(out, v)?;
        }
    }
    Ok(0)
}

fn argument_by_name(setaf: &Setaf, label: &str) -> Result<usize> {
    setaf
        .index_of_name(label)
        .ok_or_else(|| Error::UnknownLabel(label.to_string()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_accept(
    file: &Path,
    label: &str,
    task: Option<Task>,
    semantics: Option<SemanticsKind>,
    mode: Mode,
    route: Route,
    format: Format,
    budgets: Budgets,
    out: &mut dyn Write,
) -> Result<i32> {
    let is_apx = file.extension().is_some_and(|e| e == "apx");
    let (answer, how) = if is_apx {
        if task.is_some() {
            return Err(Error::Precondition("--task needs a .cdb instance".into()));
        }
        let setaf = parse_apx(&fs::read_to_string(file)?)?;
        let a = argument_by_name(&setaf, label)?;
        let sigma = semantics.unwrap_or(SemanticsKind::Preferred);
        (decide(&setaf, sigma, mode, a, budgets)?, describe_semantics(sigma, mode))
    } else {
        let parsed = load(file)?;
        let fact = parsed
            .fact(label)
            .cloned()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        let cdb = &parsed.instance;
        match semantics {
            Some(sigma) => {
                let construction = Construction::for_profile(cdb.profile(), false);
                let setaf = build(cdb, construction)?;
                let a = setaf
                    .index_of(&Argument::Fact(fact))
                    .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
                let how = format!("{} on {}", describe_semantics(sigma, mode), construction.name());
                (decide(&setaf, sigma, mode, a, budgets)?, how)
            }
            None => match task.unwrap_or(Task::Sr) {
                Task::Sr => (in_some_repair(cdb, &fact, route, budgets)?, format!("sr via {}", route_name(route))),
                Task::Ar => (in_all_repairs(cdb, &fact, route, budgets)?, format!("ar via {}", route_name(route))),
            },
        }
    };
    match format {
        Format::Pretty => writeln!(out, "{answer}")?,
        Format::Json => emit_json(out, json!({"label": label, "accepted": answer, "by": how}))?,
    }
    Ok(0)
}

fn describe_semantics(sigma: SemanticsKind, mode: Mode) -> String {
    let m = match mode {
        Mode::Cred => "cred",
        Mode::Skep => "skep",
    };
    format!("{m}-{}", sigma.short())
}

fn decide(setaf: &Setaf, sigma: SemanticsKind, mode: Mode, a: usize, budgets: Budgets) -> Result<bool> {
    match mode {
        Mode::Cred => credulous(setaf, sigma, a, budgets.limits()),
        Mode::Skep => skeptical(setaf, sigma, a, budgets.limits()),
    }
}

fn write_instance(text: &str, output: &Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_generate(kind: GenerateKind, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (reduction, output) = match kind {
        GenerateKind::Sat { input, mode, out: o } => {
            let phi = parse_dimacs(&fs::read_to_string(input)?)?;
            (sat_to_instance(&phi, mode)?, o.output)
        }
        GenerateKind::Qbf { input, out: o } => {
            let phi = parse_qdimacs(&fs::read_to_string(input)?)?;
            (qbf_to_instance(&phi)?, o.output)
        }
        GenerateKind::Random {
            seed,
            profile,
            facts,
            out: o,
        } => {
            let cdb = random_instance(seed, profile, facts);
            let labels = cdb
                .facts()
                .iter()
                .enumerate()
                .map(|(i, f)| (format!("f{}", i + 1), f.clone()))
                .collect();
            write_instance(&serialize_labeled(&cdb, &labels), &o.output, out)?;
            return Ok(0);
        }
    };
    let text = serialize_labeled(reduction.instance(), &reduction.parsed.labels);
    write_instance(&text, &output, out)?;
    // Keep stdout a valid instance when the instance itself goes there.
    let sink: &mut dyn Write = if output.is_some() { out } else { err };
    writeln!(sink, "{}", reduction.distinguished_label)?;
    Ok(0)
}

fn cmd_verify(dir: &Path, budgets: Budgets, out: &mut dyn Write) -> Result<i32> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e == "cdb"));
    files.sort();
    let mut worst = 0;
    let mut failed = BTreeSet::new();
    for path in &files {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let outcome = verify_one(path, budgets);
        let code = match outcome {
            Ok(report) => {
                writeln!(out, "{name}: {report}")?;
                if report.ends_with("PASS") {
                    0
                } else {
                    4
                }
            }
            Err(e) => {
                writeln!(out, "{name}: error: {e}")?;
                exit_code(&e)
            }
        };
        if code != 0 {
            failed.insert(name);
        }
        worst = merge_exit(worst, code);
    }
    writeln!(out, "{} file(s), {} failed", files.len(), failed.len())?;
    Ok(worst)
}

/// Mismatches dominate budget and input errors.
fn merge_exit(a: i32, b: i32) -> i32 {
    let rank = |c: i32| match c {
        0 => 0,
        4 => 3,
        3 => 1,
        _ => 2,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

fn verify_one(path: &Path, budgets: Budgets) -> Result<String> {
    let parsed = load(path)?;
    let cdb = &parsed.instance;
    let report = check_equivalence(cdb, budgets)?;
    let mut text = report.to_string();
    let apx = path.with_extension("apx");
    if apx.exists() {
        let exported = parse_apx(&fs::read_to_string(&apx)?)?;
        let construction = Construction::for_profile(cdb.profile(), false);
        let built = parse_apx(&build(cdb, construction)?.to_apx(&parsed.names()))?;
        let verdict = if exported == built { "equal" } else { "MISMATCH" };
        let status = if report.passed() && exported == built { "PASS" } else { "FAIL" };
        let body = text.rsplit_once('\n').map(|(b, _)| b.to_string()).unwrap_or_default();
        text = format!("{body}\n  exported framework {}  {verdict}\n  {status}", apx.file_name().map(|n| n.to_string_lossy()).unwrap_or_default());
    }
    Ok(text)
}
