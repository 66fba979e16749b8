use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use han_cli::{cmd_degrade, cmd_eval, cmd_infer, cmd_train, CliError, EvalOptions, RunConfig};
use han_data::{DegradationKind, DegradationSpec};

#[derive(Parser)]
#[command(name = "han", version, about = "Holistic attention super-resolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Degradation {
    Bi,
    Bd,
}

impl Degradation {
    fn spec(self, scale: usize) -> DegradationSpec {
        match self {
            Degradation::Bi => DegradationSpec::new(DegradationKind::Bi, scale),
            Degradation::Bd => DegradationSpec::new(DegradationKind::Bd, scale),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train from a config file; HAN_SEED overrides its seed.
    Train { config: PathBuf },
    /// Score a checkpoint on a dataset directory.
    Eval {
        checkpoint: PathBuf,
        dir: PathBuf,
        #[arg(long)]
        scale: usize,
        #[arg(long, value_enum, default_value = "bi")]
        degradation: Degradation,
        /// Average over the 8 flips and rotations of each input.
        #[arg(long)]
        self_ensemble: bool,
        /// Border pixels ignored by the metrics; defaults to the scale.
        #[arg(long)]
        crop: Option<usize>,
        /// Also write a tab-separated per-image table here.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Upscale one PNG.
    Infer {
        checkpoint: PathBuf,
        input: PathBuf,
        output: PathBuf,
        #[arg(long)]
        self_ensemble: bool,
    },
    /// Write LR versions of every PNG in a directory.
    Degrade {
        hr_dir: PathBuf,
        out_dir: PathBuf,
        #[arg(long)]
        scale: usize,
        #[arg(long, value_enum, default_value = "bi")]
        degradation: Degradation,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train { config } => {
            let mut cfg = RunConfig::load(&config)?;
            cfg.apply_env()?;
            cmd_train(&cfg)?;
        }
        Command::Eval { checkpoint, dir, scale, degradation, self_ensemble, crop, table } => {
            let opts = EvalOptions { spec: degradation.spec(scale), self_ensemble, crop };
            let report = cmd_eval(&checkpoint, &dir, &opts)?;
            print!("{}", report.to_text());
            if let Some(path) = table {
                std::fs::write(&path, report.to_tsv()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            }
        }
        Command::Infer { checkpoint, input, output, self_ensemble } => {
            cmd_infer(&checkpoint, &input, &output, self_ensemble)?;
        }
        Command::Degrade { hr_dir, out_dir, scale, degradation } => {
            let n = cmd_degrade(&hr_dir, &out_dir, &degradation.spec(scale))?;
            println!("wrote {n} images to {}", out_dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
