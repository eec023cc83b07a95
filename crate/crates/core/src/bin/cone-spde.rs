use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use cone_spde::appendix::Suite;
use cone_spde::runner::{self, Overrides, EXIT_ERROR, EXIT_FINDING, EXIT_OK};

const AFTER_HELP: &str = "\
Exit codes: 0 ok / no violation found, 2 violation or failed property, 1 error.
`verify` exits 0 even when checker and simulation disagree.

Output files (all carry a config_hash column or field; manifest.json lists
the sha256 of every file):
  paths.csv, paths_<i>.csv   seed,exited,exit_time,min_margin,diverged_at,config_hash
  sweep.csv                  dt,paths,valid,diverged,exits,exit_fraction,stderr,config_hash
  trajectory.csv             t,r_0,...,r_{N-1},config_hash   (simulate with one path)
  check.json, simulate.json, verify.json, appendix.json, manifest.json

Presets: heat-positive, heat-positive-badvol, heat-positive-adversarial.
CONE_SPDE_THREADS caps the number of worker threads.";

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Check,
    Simulate,
    Verify,
    Appendix,
}

#[derive(Debug, Parser)]
#[command(name = "cone-spde", version, about = "Cone invariance checks and simulation for Galerkin jump-diffusion SPDEs", after_help = AFTER_HELP)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Experiment config (JSON). Optional when --preset is given.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Master seed of the noise.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    paths: Option<usize>,
    /// Time step; replaces the verification sweep with this single step.
    #[arg(long)]
    dt: Option<f64>,
    /// Preset the config is merged over.
    #[arg(long)]
    preset: Option<String>,
    /// Suite for `appendix`: phi, retraction, supinf, mollify, rho or all.
    #[arg(long, default_value = "all")]
    suite: String,
}

fn run(cli: Cli) -> cone_spde::Result<i32> {
    runner::init_threads_from_env()?;
    let ov = Overrides {
        preset: cli.preset,
        seed: cli.seed,
        paths: cli.paths,
        dt: cli.dt,
    };
    let exp = runner::load_experiment(cli.config.as_deref(), &ov)?;
    Ok(match cli.command {
        Command::Check => {
            let s = runner::cmd_check(&exp, &cli.out)?;
            println!("{}", s.verdict);
            for w in s.report.witnesses().take(5) {
                println!("  witness: {w:?}");
            }
            s.exit_code()
        }
        Command::Simulate => {
            let (s, _) = runner::cmd_simulate(&exp, &cli.out)?;
            let r = s.summary;
            println!(
                "dt={:e} paths={} exits={} exit_fraction={:.4} (se {:.4}) diverged={}",
                r.dt, r.paths, r.exits, r.exit_fraction, r.stderr, r.diverged
            );
            EXIT_OK
        }
        Command::Verify => {
            let v = runner::cmd_verify(&exp, &cli.out)?;
            println!("checker: {}", v.verdict);
            for r in &v.sweep {
                println!("  dt={:e} exit_fraction={:.4} (se {:.4})", r.dt, r.exit_fraction, r.stderr);
            }
            println!("agreement: {}", v.agreement);
            EXIT_OK
        }
        Command::Appendix => {
            let suite: Suite = cli.suite.parse()?;
            let rep = runner::cmd_appendix(&exp, suite, &cli.out)?;
            print!("{}", rep.table());
            for f in rep.failures() {
                println!(
                    "FAILED {} / {}: {}",
                    f.suite,
                    f.property,
                    f.counterexample.as_deref().unwrap_or("")
                );
            }
            if rep.passed() {
                EXIT_OK
            } else {
                EXIT_FINDING
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
