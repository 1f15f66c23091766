use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polysurf_cli::{
    cmd_extremal_sweep, cmd_params, cmd_surface, cmd_verify, CliError, ExperimentConfig,
    VerifyOptions,
};

#[derive(Parser)]
#[command(name = "polysurf", version, about = "Surface area of polytopes under log-concave measures")]
struct Cli {
    /// File of `key = value` settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Overrides {
    /// Comma-separated family tags: gaussian, power:<p>, ball.
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated dimensions.
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated facet counts, ascending.
    #[arg(long)]
    k_list: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Fine shell width (the coarse width is twice this).
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    c_range: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<String>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) -> Result<(), CliError> {
        let pairs = [
            ("family", &self.family),
            ("n", &self.n),
            ("k_list", &self.k_list),
            ("trials", &self.trials),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("epsilon", &self.epsilon),
            ("c_range", &self.c_range),
            ("out", &self.out),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Measure parameters as CSV.
    Params(Overrides),
    /// Surface estimates for a polytope file.
    Surface {
        polytope: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Extremal construction over a list of facet counts, with a scaling fit.
    ExtremalSweep(Overrides),
    /// Runs the invariant suite.
    Verify {
        #[command(flatten)]
        overrides: Overrides,
        /// Adds a polytope with a non-unit normal.
        #[arg(long)]
        inject_bad_normal: bool,
    },
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn emit(cfg: &ExperimentConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_text(&read(path)?)?,
        None => ExperimentConfig::default(),
    };
    match &cli.command {
        Command::Params(o) => {
            o.apply(&mut cfg)?;
            emit(&cfg, &cmd_params(&cfg)?)?;
        }
        Command::Surface { polytope, overrides } => {
            overrides.apply(&mut cfg)?;
            emit(&cfg, &cmd_surface(&cfg, &read(polytope)?)?)?;
        }
        Command::ExtremalSweep(o) => {
            o.apply(&mut cfg)?;
            let out = cmd_extremal_sweep(&cfg)?;
            emit(&cfg, &out.csv)?;
            eprint!("{}", out.summary());
        }
        Command::Verify {
            overrides,
            inject_bad_normal,
        } => {
            overrides.apply(&mut cfg)?;
            let report = cmd_verify(
                &cfg,
                VerifyOptions {
                    inject_bad_normal: *inject_bad_normal,
                },
            )?;
            emit(&cfg, &report.to_string())?;
            if !report.all_pass() {
                return Ok(2);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
