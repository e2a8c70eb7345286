use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use san_core::costmodel::RatioKind;
use san_workbench::commands::with_seed;
use san_workbench::{
    cmd_entropy, cmd_export_net, cmd_gen_trace, cmd_ratio, cmd_run, resolve_workers, CliError,
    RunOptions, ScenarioConfig,
};

#[derive(Parser)]
#[command(name = "san-workbench", version, about = "Seeded experiments on demand-aware and self-adjusting networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    config: Option<PathBuf>,
    /// Bundled scenario id.
    #[arg(long)]
    scenario: Option<String>,
    /// Run only this seed instead of the configured list.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads; SAN_WORKBENCH_WORKERS takes precedence.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every algorithm for every seed; write ledgers and a summary.
    Run(Common),
    /// Entropy report of a trace or demand-graph file.
    Entropy {
        path: PathBuf,
        /// Also write entropy.csv here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Evaluate an optimality ratio (static, dynamic or learning).
    Ratio {
        kind: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Write the scenario's traces and demand graphs.
    GenTrace(Common),
    /// Write the scenario's networks and tree dumps.
    ExportNet(Common),
}

fn setup(c: &Common) -> Result<(ScenarioConfig, RunOptions), CliError> {
    let cfg = match (&c.config, &c.scenario) {
        (Some(p), _) => ScenarioConfig::load(p)?,
        (None, Some(id)) => ScenarioConfig::bundled(id)?,
        (None, None) => return Err(CliError::Config("pass --config or --scenario".into())),
    };
    let cfg = with_seed(&cfg, c.seed);
    let opts = RunOptions::resolve(c.out_dir.clone(), resolve_workers(c.workers)?, &cfg);
    Ok((cfg, opts))
}

fn list(files: &[PathBuf]) {
    for f in files {
        println!("{}", f.display());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(c) => {
            let (cfg, opts) = setup(&c)?;
            let rows = cmd_run(&cfg, &opts)?;
            println!("algorithm,seed,amortized");
            for r in rows {
                println!("{},{},{:.6}", r.algorithm, r.seed, r.amortized);
            }
            println!("wrote {}", opts.out_dir.join("summary.csv").display());
        }
        Command::Entropy { path, out_dir } => {
            let (_, csv) = cmd_entropy(&path, out_dir.as_deref())?;
            print!("{csv}");
        }
        Command::Ratio { kind, common } => {
            let kind = kind.map(|k| k.parse::<RatioKind>()).transpose()?;
            let (cfg, opts) = setup(&common)?;
            let report = cmd_ratio(&cfg, kind, &opts)?;
            println!(
                "{} ratio for {}: rho={:.6} beta={:.6} over {} instances",
                report.kind.as_str(),
                report.scenario,
                report.rho,
                report.beta,
                report.instances.len()
            );
            for i in report.instances.iter().filter(|i| i.ci95.is_some()) {
                let (lo, hi) = i.ci95.unwrap();
                println!("  instance {}: raw={:.6} ci95=[{lo:.6}, {hi:.6}]", i.id, i.raw);
            }
        }
        Command::GenTrace(c) => {
            let (cfg, opts) = setup(&c)?;
            list(&cmd_gen_trace(&cfg, &opts)?);
        }
        Command::ExportNet(c) => {
            let (cfg, opts) = setup(&c)?;
            list(&cmd_export_net(&cfg, &opts)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("san-workbench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
