use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use radcoex_cli::commands;
use radcoex_cli::config::LoadedConfig;
use radcoex_cli::output::Table;
use radcoex_cli::validate::{self, Status};
use radcoex_cli::CliError;

#[derive(Parser, Debug)]
#[command(name = "radcoex", version, about = "Radar interference from 3D-beamforming cellular networks")]
struct Cli {
    /// Config file; the embedded reference config when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// section.key=value, repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Worst-case and nominal average interference over the sweep.
    AvgInterference,
    /// Dominant-interference CDF of the aggregate interference.
    InterferenceCdf,
    /// Spatial P_d and P_fa over the threshold grid.
    Roc,
    /// Minimum exclusion radius over the r_exc_m sweep values.
    MinExclusion,
    /// Analytic vs Monte Carlo comparison; exits 1 on any failure.
    Validate,
    /// Print the embedded default config.
    DefaultConfig,
}

fn overrides(cli: &Cli) -> Vec<String> {
    let mut o = cli.set.clone();
    if let Some(s) = cli.seed {
        o.push(format!("mc.seed={s}"));
    }
    if let Some(t) = cli.trials {
        o.push(format!("mc.trials={t}"));
    }
    if let Some(d) = &cli.out {
        o.push(format!("output.dir={}", toml::Value::String(d.display().to_string())));
    }
    o
}

fn write(cfg: &LoadedConfig, name: &str, t: &Table) -> Result<(), CliError> {
    let path = cfg.config.output.dir.join(name);
    t.write(&path)?;
    eprintln!("wrote {} ({} rows)", path.display(), t.rows.len());
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Command::DefaultConfig = cli.command {
        print!("{}", radcoex_cli::config::DEFAULT_CONFIG);
        return Ok(());
    }
    let cfg = LoadedConfig::from_path(cli.config.as_deref(), &overrides(cli))?;
    match cli.command {
        Command::AvgInterference => write(&cfg, "avg_interference.csv", &commands::avg_interference(&cfg)?),
        Command::InterferenceCdf => {
            let (t, s) = commands::interference_cdf(&cfg)?;
            write(&cfg, "interference_cdf.csv", &t)?;
            if !s.rows.is_empty() {
                write(&cfg, "interference_cdf_summary.csv", &s)?;
            }
            Ok(())
        }
        Command::Roc => write(&cfg, "roc.csv", &commands::roc(&cfg)?),
        Command::MinExclusion => write(&cfg, "min_exclusion.csv", &commands::min_exclusion(&cfg)?),
        Command::Validate => {
            let checks = validate::run(&cfg.config, &mut |c| {
                println!("[{}] criterion {} {}: metric {:.4e} tol {:.3e} {}", c.status, c.criterion, c.name, c.metric, c.tolerance, c.note);
            })?;
            write(&cfg, "validate.csv", &validate::table(&checks))?;
            let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
            if failed > 0 {
                return Err(CliError::Validation(failed));
            }
            Ok(())
        }
        Command::DefaultConfig => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
