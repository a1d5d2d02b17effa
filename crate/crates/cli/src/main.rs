use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cvqkd_cli::pipeline::run;
use cvqkd_cli::range::{parse_range, parse_values};
use cvqkd_cli::sweep::{sweep, SweepParam};
use cvqkd_cli::validate::validate;
use cvqkd_cli::{CliError, ExperimentConfig, Result};
use cvqkd_core::qknn::Mode;

#[derive(Parser)]
#[command(
    name = "cvqkd",
    version,
    about = "Quantum kNN CV-QKD experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage of a configuration.
    Run(Common),
    /// Run a configuration once per value of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// loss_db, v_m, k, m or delta.
        #[arg(long)]
        param: String,
        /// start:stop:step, inclusive.
        #[arg(long, conflicts_with = "values", required_unless_present = "values")]
        range: Option<String>,
        /// Comma-separated values.
        #[arg(long)]
        values: Option<String>,
    },
    /// Check a configuration and list findings.
    Validate(Common),
    /// Print the version.
    Version,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse()
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(mode) = self.mode {
            cfg.mode = mode;
        }
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(CliError::Config("--threads must be at least 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| CliError::Resource(e.to_string()))?;
        }
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(common) => {
            let cfg = common.load()?;
            let r = run(&cfg, &cfg.output_dir)?;
            println!(
                "wrote {} files to {}",
                r.manifest.outputs.len() + 1,
                cfg.output_dir.display()
            );
        }
        Command::Sweep {
            common,
            param,
            range,
            values,
        } => {
            let cfg = common.load()?;
            let param: SweepParam = param.parse()?;
            let values = match (range, values) {
                (Some(r), _) => parse_range(&r)?,
                (None, Some(v)) => parse_values(&v)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            let r = sweep(&cfg, param, &values, &cfg.output_dir)?;
            println!(
                "swept {param} over {} points into {}",
                r.manifest.stages.len(),
                cfg.output_dir.display()
            );
        }
        Command::Validate(common) => {
            let cfg = common.load()?;
            let findings = validate(&cfg);
            if findings.is_empty() {
                println!("ok: no findings");
            } else {
                for f in &findings {
                    println!("{f}");
                }
                return Err(CliError::Config(format!("{} finding(s)", findings.len())));
            }
        }
        Command::Version => println!("cvqkd {}", env!("CARGO_PKG_VERSION")),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
