use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sme::commands::{self, EvalOutputs, LogLevel};
use sme::config::{Overrides, Patience};
use sme::{exit, AppError, Result};
use sme_core::{CorruptionMode, Form};

#[derive(Parser)]
#[command(
    name = "sme",
    version,
    about = "Semantic matching energy link prediction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print entity, relation and record counts of a dataset.
    Inspect {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Train on one fold and save the best model.
    Train {
        #[command(flatten)]
        run: RunArgs,
        /// Fold whose train/validation split is used.
        #[arg(long, default_value_t = 0)]
        fold: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// K-fold cross-validation with AUC-PR per fold.
    Eval {
        #[command(flatten)]
        run: RunArgs,
        /// Number of folds trained in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output prefix; writes PREFIX.txt and PREFIX.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write PREFIX.pr.tsv with the precision-recall curves.
        #[arg(long, requires = "out")]
        curves: bool,
    },
    /// Score triples with a saved model (from --triple or tab-separated stdin).
    Score {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, num_args = 3, value_names = ["LHS", "REL", "RHS"], action = clap::ArgAction::Append)]
        triple: Vec<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Manifest (.toml) or labelled triple file.
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    form: Option<Form>,
    #[arg(long)]
    dim_d: Option<usize>,
    #[arg(long)]
    dim_p: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    margin: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Epochs without validation improvement before stopping, or `inf`.
    #[arg(long)]
    patience: Option<Patience>,
    #[arg(long)]
    batch: Option<usize>,
    /// Which slot to corrupt: lhs, rhs, both or all.
    #[arg(long)]
    corruption: Option<CorruptionMode>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            form: self.form,
            dim_d: self.dim_d,
            dim_p: self.dim_p,
            lr: self.lr,
            margin: self.margin,
            epochs: self.epochs,
            patience: self.patience,
            batch: self.batch,
            corruption: self.corruption,
            folds: self.folds,
            seed: self.seed,
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let level = LogLevel::from_env()?;
    let sink = commands::stdout_sink();
    match cli.command {
        Command::Inspect { dataset } => {
            println!("{}", commands::inspect(&dataset)?.line());
        }
        Command::Train { run, fold, out } => {
            let trace = commands::train(&run.dataset, &run.overrides(), fold, &out, level, &sink)?;
            if level > LogLevel::Quiet {
                eprintln!("best_epoch={} saved={}", trace.best_epoch, out.display());
            }
        }
        Command::Eval {
            run,
            jobs,
            out,
            curves,
        } => {
            if jobs == 0 {
                return Err(AppError::Usage("--jobs must be at least 1".into()));
            }
            let outputs = EvalOutputs {
                prefix: out,
                curves,
            };
            let (file, _) =
                commands::eval(&run.dataset, &run.overrides(), jobs, &outputs, level, &sink)?;
            print!("{}", file.to_text());
        }
        Command::Score { model, triple } => {
            let triples: Vec<[String; 3]> = if triple.is_empty() {
                let mut text = String::new();
                std::io::stdin()
                    .read_to_string(&mut text)
                    .map_err(|e| AppError::Usage(format!("reading stdin: {e}")))?;
                commands::parse_score_input(&text)?
            } else {
                triple
                    .chunks_exact(3)
                    .map(|c| [c[0].clone(), c[1].clone(), c[2].clone()])
                    .collect()
            };
            for (names, s) in triples.iter().zip(commands::score(&model, &triples)?) {
                println!("{}\t{}\t{}\t{s}", names[0], names[1], names[2]);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::SUCCESS
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
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
