use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use diffmod_cli::{corpus, run_source, run_spencer, Command, Report};

/// Exact linear PDE systems: completion, compatibility conditions, duality.
///
/// Exit status: 0 success, 1 error, 2 a result depends on an undecided
/// parameter (use --split or --assume). Set DIFFMOD_MAX_ORDER and
/// DIFFMOD_MAX_STEPS to bound completion work.
#[derive(Parser, Debug)]
#[command(name = "diffmod", version)]
struct Cli {
    /// Format printed on stdout.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Also write report.json and report.md into this directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// A .dms system description.
    file: PathBuf,
    /// Nonzero assumption `EXPR!=0`, or `PARAM=0` for a split parameter. Repeatable.
    #[arg(long)]
    assume: Vec<String>,
    /// Run every branch of the declared split parameters.
    #[arg(long)]
    split: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Janet basis of the system.
    Complete(InputArgs),
    /// Generating compatibility conditions.
    Cc(InputArgs),
    /// The chain of successive compatibility conditions.
    Sequence {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Formal adjoint and the analysis of its kernel.
    Adjoint(InputArgs),
    /// Differential rank of the operator and of its adjoint.
    Rank(InputArgs),
    /// Double duality test.
    Duality(InputArgs),
    /// Generators of the torsion submodule with annihilators.
    Torsion(InputArgs),
    /// ext^i of the presented module; all i when --i is absent.
    Ext {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long = "i")]
        index: Option<usize>,
    },
    /// Parametrization of the solutions, when torsion-free.
    Parametrize(InputArgs),
    /// Spencer cohomology and bundle dimensions of a classical family.
    Spencer {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
    },
    /// Runs the golden-file corpus.
    Corpus {
        #[arg(long, default_value = "corpus")]
        dir: PathBuf,
        /// Substring of the file stem; `3.2` matches `ex3_2`.
        #[arg(long)]
        filter: Option<String>,
        /// Rewrite the fixtures from the current output.
        #[arg(long)]
        bless: bool,
    },
}

fn file_report(input: &InputArgs, cmd: Command) -> anyhow::Result<Report> {
    let text = std::fs::read_to_string(&input.file)
        .with_context(|| format!("reading {}", input.file.display()))?;
    let path = input.file.display().to_string();
    Ok(run_source(Some(&path), &text, &cmd, &input.assume, input.split))
}

/// A closed pipe (`diffmod ... | head`) is not an error.
fn write_stdout(text: &str) -> anyhow::Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(cli: &Cli, report: &Report) -> anyhow::Result<()> {
    let text = match cli.format {
        Format::Json => report.to_json() + "\n",
        Format::Md => report.to_markdown(),
    };
    write_stdout(&text)?;
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), report.to_json() + "\n")?;
        std::fs::write(dir.join("report.md"), report.to_markdown())?;
    }
    for c in &report.cases {
        if let Some(e) = &c.error {
            eprintln!("diffmod: [{}] {}: {}", c.case, e.kind, e.message);
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<i32> {
    let report = match &cli.command {
        Cmd::Complete(i) => file_report(i, Command::Complete)?,
        Cmd::Cc(i) => file_report(i, Command::Cc)?,
        Cmd::Sequence { input, max_steps } => file_report(input, Command::Sequence { max_steps: *max_steps })?,
        Cmd::Adjoint(i) => file_report(i, Command::Adjoint)?,
        Cmd::Rank(i) => file_report(i, Command::Rank)?,
        Cmd::Duality(i) => file_report(i, Command::Duality)?,
        Cmd::Torsion(i) => file_report(i, Command::Torsion)?,
        Cmd::Ext { input, index } => file_report(input, Command::Ext { index: *index })?,
        Cmd::Parametrize(i) => file_report(i, Command::Parametrize)?,
        Cmd::Spencer { family, n } => run_spencer(family, *n),
        Cmd::Corpus { dir, filter, bless } => {
            let summary = corpus::run_corpus(dir, filter.as_deref(), *bless)
                .with_context(|| format!("reading corpus {}", dir.display()))?;
            write_stdout(&summary.render())?;
            return Ok(if summary.passed() { 0 } else { 1 });
        }
    };
    emit(cli, &report)?;
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("diffmod: {e:#}");
            ExitCode::from(1)
        }
    }
}
