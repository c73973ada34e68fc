use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eur_lab::asymptotics::constants_json;
use eur_lab::experiments::{
    csv_path, emit_plots, read_dir_records, read_records, read_run_config, replay_trial, run_experiment, summarize,
    write_records, Experiment, ExperimentConfig, SeedPath,
};
use eur_lab::{Error, Result};

#[derive(Parser)]
#[command(name = "eur-lab", version, about = "Entropic uncertainty bounds and submatrix norms of random unitaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment suite and write CSV, run metadata and plots.
    Run(RunArgs),
    /// Summarize every suite CSV in a directory; exits 2 if a verdict fails.
    Summarize {
        dir: PathBuf,
    },
    /// Regenerate one trial from its seed path and compare with the stored rows.
    Replay {
        /// `seed:suite:N:L:trial`, as in the `seed_path` column.
        #[arg(long)]
        record: String,
        /// Directory holding the original run.
        #[arg(long, env = "EUR_LAB_OUT")]
        dir: Option<PathBuf>,
    },
    /// Print the constants table as JSON.
    Constants,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    experiment: Experiment,
    /// Comma-separated dimensions; defaults depend on the suite.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of measurements for multi-measurement.
    #[arg(long = "L", default_value_t = 2)]
    l: usize,
    #[arg(long)]
    enum_budget: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_swaps: Option<usize>,
    #[arg(long)]
    allow_heuristic: bool,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, env = "EUR_LAB_OUT")]
    out: PathBuf,
}

impl RunArgs {
    fn config(self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(self.experiment);
        if let Some(d) = self.dims {
            cfg.dims = d;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        cfg.seed = self.seed;
        cfg.l = self.l;
        if let Some(b) = self.enum_budget {
            cfg.enum_budget = b;
        }
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        if let Some(s) = self.max_swaps {
            cfg.max_swaps = s;
        }
        cfg.allow_heuristic = self.allow_heuristic;
        cfg.workers = self.workers;
        cfg.output_dir = Some(self.out);
        cfg
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.config();
            let dir = cfg.output_dir.clone().expect("set from --out");
            let records = run_experiment(&cfg)?;
            emit_plots(&records, &dir)?;
            eprintln!("{} records written to {}", records.len(), csv_path(&dir, cfg.experiment).display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Summarize { dir } => {
            let records = read_dir_records(&dir)?;
            let summary = summarize(&records)?;
            let json = summary.to_json()?;
            std::fs::write(dir.join("summary.json"), &json)?;
            print!("{json}");
            if summary.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("{} verdict(s) failed", summary.failures());
                Ok(ExitCode::from(2))
            }
        }
        Command::Replay { record, dir } => {
            let path: SeedPath = record.parse()?;
            let cfg = match &dir {
                Some(d) => read_run_config(d, path.experiment)?,
                None => ExperimentConfig::new(path.experiment),
            };
            let fresh = replay_trial(&cfg, path)?;
            write_records(&mut io::stdout().lock(), &fresh)?;
            if let Some(d) = dir {
                let stored: Vec<_> =
                    read_records(&csv_path(&d, path.experiment))?.into_iter().filter(|r| r.seed_path == record).collect();
                let key = |r: &eur_lab::experiments::ExperimentRecord| (r.statistic.clone(), r.value.to_bits(), r.certified);
                if stored.iter().map(key).ne(fresh.iter().map(key)) {
                    return Err(Error::Numerical(format!("replayed values of {record} differ from the stored rows")));
                }
                eprintln!("replay of {record} matches {} stored rows", stored.len());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Constants => {
            println!("{}", serde_json::to_string_pretty(&constants_json())?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("eur-lab: {e}");
            ExitCode::from(1)
        }
    }
}
