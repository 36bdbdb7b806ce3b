//! Command-line front end (`coopsim run | sweep | validate`).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::SimConfig;
use crate::engine::run_simulation;
use crate::error::Result;
use crate::output::{write_run_outputs, write_sweep_outputs};
use crate::sweep::{run_sweep, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "coopsim", version, about = "Cooperation by time-pressured group formation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one simulation and write its time series.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "coopsim-out")]
        out: PathBuf,
    },
    /// Run replicated simulations over an (alpha, beta) grid.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.4,0.6,0.8,1.0")]
        alphas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        betas: Vec<f64>,
        #[arg(long, default_value_t = 800)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        master_seed: u64,
        /// Worker threads (0 = one per core).
        #[arg(long, env = "COOPSIM_JOBS", default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value = "coopsim-out")]
        out: PathBuf,
    },
    /// Resolve a config against the defaults and print it as JSON.
    Validate {
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// JSON config file; missing fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Formation ticks per term.
    #[arg(long = "ticks", short = 'T')]
    ticks: Option<usize>,
    #[arg(long)]
    gamma0: Option<f64>,
    #[arg(long)]
    c0: Option<f64>,
    #[arg(long)]
    s0: Option<f64>,
    #[arg(long)]
    consumption: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    max_term: Option<usize>,
    #[arg(long)]
    d0: Option<f64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<SimConfig> {
        let mut cfg = match &self.config {
            Some(path) => SimConfig::from_path(path)?,
            None => SimConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        apply!(n, k, ticks, gamma0, c0, s0, consumption, alpha, beta, max_term, d0);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Run { config, seed, out } => {
            let mut cfg = config.resolve()?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let report = run_simulation(cfg)?;
            let files = write_run_outputs(&report, &out)?;
            let last = report.last();
            let _ = writeln!(
                stdout,
                "terms={} winner={:?} mean_complement={} mean_similar={}",
                report.terms.len(),
                report.final_winner,
                last.mean_savings_complement.map_or("-".into(), |v| format!("{v:.3}")),
                last.mean_savings_similar.map_or("-".into(), |v| format!("{v:.3}")),
            );
            for f in files {
                let _ = writeln!(stdout, "wrote {}", f.display());
            }
        }
        Command::Sweep {
            config,
            alphas,
            betas,
            reps,
            master_seed,
            jobs,
            out,
        } => {
            let spec = SweepSpec {
                alphas,
                betas,
                replications: reps,
                base: config.resolve()?,
                master_seed,
                jobs,
            };
            let report = run_sweep(&spec)?;
            for c in &report.cells {
                let _ = writeln!(
                    stdout,
                    "alpha={} beta={} win_rate={:.4} degenerate={}",
                    c.alpha, c.beta, c.win_rate, c.degenerate_runs
                );
            }
            for f in write_sweep_outputs(&report, &out)? {
                let _ = writeln!(stdout, "wrote {}", f.display());
            }
        }
        Command::Validate { config } => {
            let _ = writeln!(stdout, "{}", config.resolve()?.to_json_pretty());
        }
    }
    Ok(())
}

/// Parses `argv` (program name first) and runs the command. Returns the
/// process exit code.
pub fn cli_main<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("coopsim").chain(args.iter().copied());
        let code = cli_main(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn validate_echoes_defaults() {
        let (code, out, _) = call(&["validate"]);
        assert_eq!(code, 0);
        let cfg = SimConfig::from_json_str(&out).unwrap();
        assert_eq!(cfg, SimConfig::default());
        assert!(out.contains("\"n\": 200") && out.contains("\"k\": 40"));
        assert!(out.contains("\"T\": 8") && out.contains("\"gamma0\": 3.0"));
    }

    #[test]
    fn overrides_apply() {
        let (code, out, _) = call(&["validate", "--alpha", "0.4", "-T", "5"]);
        assert_eq!(code, 0);
        let cfg = SimConfig::from_json_str(&out).unwrap();
        assert_eq!((cfg.alpha, cfg.ticks), (0.4, 5));
    }

    #[test]
    fn bad_input_reports_field() {
        let (code, _, err) = call(&["validate", "--beta", "2"]);
        assert_ne!(code, 0);
        assert!(err.contains("beta"));
        let (code, _, err) = call(&["run", "--bogus"]);
        assert_ne!(code, 0);
        assert!(err.contains("--bogus"));
        let (code, _, err) = call(&["validate", "--config", "/nonexistent/cfg.json"]);
        assert_eq!(code, 1);
        assert!(err.contains("/nonexistent/cfg.json"));
    }
}
