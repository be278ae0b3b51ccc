use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dequant_lab::config::{config_schema, ExperimentConfig, ExperimentId};
use dequant_lab::LabError;

#[derive(Parser)]
#[command(name = "dequant-lab", version, about = "Run Fourier-regression and quantum-model experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment; exits 0 when every check passes, 2 when a check fails.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `output_dir` in the config file (default `results`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print experiment ids with their parameter schemas.
    List {
        /// Print the full config schema as JSON instead.
        #[arg(long)]
        schema: bool,
    },
    /// Parse and range-check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn list(schema: bool) {
    if schema {
        println!("{}", serde_json::to_string_pretty(&config_schema()).expect("schema serializes"));
        return;
    }
    for id in ExperimentId::ALL {
        println!("{id}  {}", id.description());
        let defaults = serde_json::to_value(id.default_params()).expect("params serialize");
        let schema = serde_json::to_value(id.params_schema()).expect("schema serializes");
        if let (Some(defaults), Some(props)) = (defaults.as_object(), schema["properties"].as_object()) {
            for (name, value) in defaults {
                let ty = props[name]
                    .get("type")
                    .map(|t| t.to_string().replace('"', ""))
                    .unwrap_or_else(|| "enum".into());
                let doc = props[name].get("description").and_then(|d| d.as_str()).unwrap_or("");
                println!("    {name}: {ty} = {value}  {doc}");
            }
        }
    }
}

fn run(config: PathBuf, seed: Option<u64>, out: Option<PathBuf>) -> Result<bool, LabError> {
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let out = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("results"));
    let report = dequant_lab::run(&cfg)?;
    let written = report.write(&out)?;
    for c in report.checks.iter().chain(&report.runtime_checks) {
        let tag = c.criterion.map(|n| format!("[{n}] ")).unwrap_or_default();
        println!("{tag}{}", c.line());
    }
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    eprintln!("{} finished in {:.2} s", cfg.experiment, report.wall_time_seconds);
    Ok(report.pass())
}

fn main() -> ExitCode {
    // Usage errors exit 1: exit code 2 is reserved for failed checks.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run { config, seed, out } => run(config, seed, out),
        Command::List { schema } => {
            list(schema);
            Ok(true)
        }
        Command::Validate { config } => ExperimentConfig::load(&config).map(|cfg| {
            println!("{}: ok ({}, seed {})", config.display(), cfg.experiment, cfg.seed);
            true
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
