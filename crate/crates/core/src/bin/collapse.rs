//! Thin command-line front end over `collapse_dynamics::runner`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use collapse_dynamics::runner::{self, CommandKind, OutputFormat, RunConfig};
use collapse_dynamics::Result;

/// Run a collapse-model simulation or analysis and write its table.
#[derive(Parser, Debug)]
#[command(name = "collapse", version)]
struct Cli {
    /// qmupl, measure, grw, csl, gravity, interferometer or bounds.
    command: String,
    /// View for `bounds` (table1 or map).
    view: Option<String>,
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of independent trajectories.
    #[arg(long)]
    trajectories: Option<usize>,
    /// Output file (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Worker threads (defaults to COLLAPSE_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Parameter override `key=value`; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let command = CommandKind::parse(&cli.command)?;
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_path(path, Some(command))?,
        None => RunConfig::new(command),
    };
    if let Some(view) = &cli.view {
        if command != CommandKind::Bounds {
            return Err(collapse_dynamics::Error::Config(format!(
                "unexpected argument '{view}' for command '{}'",
                command.as_str()
            )));
        }
        config.set_parameter(&format!("view={view}"))?;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(n) = cli.trajectories {
        if n == 0 {
            return Err(collapse_dynamics::Error::Config("--trajectories must be at least 1".into()));
        }
        config.n_trajectories = n;
    }
    if let Some(f) = &cli.format {
        config.output_format = OutputFormat::parse(f)?;
    }
    if let Some(out) = &cli.out {
        config.output_path = Some(out.to_string_lossy().into_owned());
    }
    for kv in &cli.set {
        config.set_parameter(kv)?;
    }
    Ok(config)
}

fn execute(cli: &Cli) -> Result<()> {
    let config = build_config(cli)?;
    let threads = match cli.threads {
        Some(t) => Some(t),
        None => runner::threads_from_env()?,
    };
    let output = match threads {
        Some(t) => runner::run_with_threads(&config, t)?,
        None => runner::run(&config)?,
    };
    match &config.output_path {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| collapse_dynamics::Error::Io(format!("cannot create {path}: {e}")))?;
            let mut w = std::io::BufWriter::new(file);
            output.write(config.output_format, &mut w)?;
            w.flush().map_err(|e| collapse_dynamics::Error::Io(format!("{path}: {e}")))?;
        }
        None => {
            let mut buffer = Vec::new();
            output.write(config.output_format, &mut buffer)?;
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(&buffer).and_then(|_| stdout.flush()) {
                Ok(()) => {}
                // A closed downstream pipe (e.g. `| head`) is not a failure.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("collapse: error: {e}");
            ExitCode::from(2)
        }
    }
}
