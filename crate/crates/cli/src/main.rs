use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tangent_display::{run, Command, Options};

#[derive(Parser)]
#[command(name = "tdisp", version, about = "Decide tangent display properties of finite categories")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Cap on enumerations (fully-displayed search).
    #[arg(long, global = true, default_value_t = 100_000)]
    budget: usize,
    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a presentation.
    Validate { file: PathBuf },
    /// Check the tangent category axioms.
    TangentCheck { file: PathBuf },
    /// Classify morphisms.
    Classify {
        file: PathBuf,
        #[arg(long)]
        mor: Option<String>,
    },
    /// Compute and verify the maximal tangent display system.
    MaximalSystem { file: PathBuf },
    /// Split idempotents.
    Split { file: PathBuf },
    /// Build the display slice over an object.
    Slice {
        file: PathBuf,
        #[arg(long)]
        base: String,
    },
    /// Build partial maps over a named system of monics.
    Par {
        file: PathBuf,
        #[arg(long)]
        system: String,
    },
    /// Open subobjects and their restriction category.
    Open { file: PathBuf },
    /// Pushouts of finite algebras and their tangent images.
    RingDemo {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut opts = Options {
        budget: cli.budget,
        timing: cli.timing,
        ..Options::default()
    };
    let (cmd, file) = match cli.command {
        Cmd::Validate { file } => (Command::Validate, file),
        Cmd::TangentCheck { file } => (Command::TangentCheck, file),
        Cmd::Classify { file, mor } => {
            opts.mor = mor;
            (Command::Classify, file)
        }
        Cmd::MaximalSystem { file } => (Command::MaximalSystem, file),
        Cmd::Split { file } => (Command::Split, file),
        Cmd::Slice { file, base } => {
            opts.base = Some(base);
            (Command::Slice, file)
        }
        Cmd::Par { file, system } => {
            opts.system = Some(system);
            (Command::Par, file)
        }
        Cmd::Open { file } => (Command::Open, file),
        Cmd::RingDemo { file, depth } => {
            opts.depth = depth;
            (Command::RingDemo, file)
        }
    };
    let src = match std::fs::read_to_string(&file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            return ExitCode::from(2);
        }
    };
    let label = file
        .file_name()
        .map_or_else(|| file.display().to_string(), |n| n.to_string_lossy().into_owned());
    let out = run(cmd, &label, &src, &opts);
    if let Some(diags) = out.report.get("diagnostics").and_then(|d| d.as_array()) {
        for d in diags {
            eprintln!(
                "{}:{}:{}: {}: {}",
                label, d["line"], d["column"], d["kind"].as_str().unwrap_or(""), d["message"].as_str().unwrap_or("")
            );
        }
    }
    print!("{}", out.render());
    ExitCode::from(out.exit as u8)
}
