use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use invflow::cli::curves::{cmd_analyze, cmd_roundtrip};
use invflow::cli::figures::cmd_loxodrome;
use invflow::cli::run::{run_single, run_sweep, RunSettings};
use invflow::cli::Config;
use invflow::{Error, Result};

/// Inversive curve invariants, Frenet reconstruction and the inversive
/// curve-lengthening flow.
#[derive(Parser, Debug)]
#[command(name = "invflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve (Q, rho) under the flow; `--seeds 0..10` sweeps seeds in parallel.
    Run(Common),
    /// Emit log-spiral figures and a winding family.
    Loxodrome(Common),
    /// Invariants, admissibility and monodromy of a sampled curve.
    Analyze(Common),
    /// Curve or Q profile -> Frenet reconstruction -> re-measured invariants.
    Roundtrip(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_grid: Option<usize>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Write SVG plots.
    #[arg(long)]
    svg: bool,
    /// Any other configuration key as `--key value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn config(&self) -> Result<Config> {
        let mut cfg = match &self.config {
            Some(p) => Config::parse(
                &std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
            )?,
            None => Config::default(),
        };
        cfg.apply_overrides(&self.overrides)?;
        if let Some(s) = self.seed {
            cfg.set("seed", s.to_string());
        }
        if let Some(n) = self.n_grid {
            cfg.set("n_grid", n.to_string());
        }
        if let Some(t) = self.t_end {
            cfg.set("t_end", t.to_string());
        }
        if self.svg {
            cfg.set("svg", "true");
        }
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(c) => {
            let cfg = c.config()?;
            let settings = RunSettings::from_config(&cfg)?;
            if cfg.contains("seeds") {
                let seeds: Vec<u64> = cfg.get_list("seeds", vec![])?;
                let threads = cfg.get("threads", std::thread::available_parallelism().map_or(1, |n| n.get()))?;
                for o in run_sweep(&settings, &seeds, threads, &c.out)? {
                    let last = o.trajectory.last_state();
                    println!(
                        "seed {}: {} at t = {:.4}, steps {}, predicted Q_inf {}",
                        o.seed,
                        o.trajectory.reason,
                        last.t,
                        o.trajectory.accepted,
                        o.predicted_q.map_or("n/a".into(), |q| format!("{q:.9}"))
                    );
                }
            } else {
                let o = run_single(&settings, cfg.get("seed", 0)?, &c.out)?;
                print!("{}", o.report);
            }
        }
        Command::Loxodrome(c) => print!("{}", cmd_loxodrome(&c.config()?, &c.out)?.report),
        Command::Analyze(c) => print!("{}", cmd_analyze(&c.config()?, &c.out)?.report),
        Command::Roundtrip(c) => print!("{}", cmd_roundtrip(&c.config()?, &c.out)?.report),
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::FAILURE
        }
    }
}
