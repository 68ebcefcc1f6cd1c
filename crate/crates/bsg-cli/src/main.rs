//! `bsg` — experiment runner for the deformed-Sasaki-metric library.
//!
//! Exit codes: 0 all checks passed, 1 a tolerance failed, 2 configuration
//! error, 3 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bsg::error::Error;
use bsg::experiment::{run_experiment, ExperimentConfig, Mode};
use bsg::registry;

#[derive(Parser)]
#[command(name = "bsg", version, about = "Berger-type deformed Sasaki metrics: experiments and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config file
    Run {
        /// path to the experiment config (JSON)
        config: PathBuf,
        /// override the deformation constant δ
        #[arg(long)]
        delta: Option<f64>,
        /// override the mode (total_space | unit_bundle | horizontal_lift |
        /// residual_check | oracle_check)
        #[arg(long)]
        mode: Option<String>,
        /// override the end of the integration window
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        /// override the integrator step
        #[arg(long)]
        step: Option<f64>,
        /// override the seed of randomized checks
        #[arg(long)]
        seed: Option<u64>,
        /// override the output directory (default: config, then $BSG_OUT_DIR)
        #[arg(long = "out-dir")]
        out_dir: Option<PathBuf>,
        /// renormalize the fiber to the unit bundle after every step
        #[arg(long)]
        renormalize: bool,
    },
    /// List the registered manifolds
    List {
        #[arg(long)]
        json: bool,
    },
    /// Describe one registered manifold
    Describe {
        id: String,
        #[arg(long)]
        json: bool,
    },
    /// Run the full invariant suite for one manifold
    Verify {
        id: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(passed) => {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ConfigInvalid(_) | Error::UnknownManifold(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn dispatch(cli: Cli) -> bsg::Result<bool> {
    match cli.command {
        Command::Run {
            config,
            delta,
            mode,
            t_end,
            step,
            seed,
            out_dir,
            renormalize,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::ConfigInvalid(vec![format!("cannot read {}: {e}", config.display())]))?;
            let mut config = ExperimentConfig::from_json(&text)?;
            if let Some(d) = delta {
                config.delta = d;
            }
            if let Some(m) = mode {
                config.mode = parse_mode(&m)?;
            }
            if let Some(t) = t_end {
                config.t_span[1] = t;
            }
            if let Some(h) = step {
                config.step = h;
            }
            if let Some(s) = seed {
                config.seed = s;
            }
            if let Some(dir) = out_dir {
                config.out_dir = Some(dir);
            }
            if renormalize {
                config.renormalize = true;
            }
            let report = run_experiment(&config)?;
            for line in &report.summary {
                println!("{line}");
            }
            for path in &report.outputs {
                println!("wrote {}", path.display());
            }
            println!("{}", if report.passed { "PASS" } else { "FAIL" });
            Ok(report.passed)
        }
        Command::List { json } => {
            if json {
                let entries: Vec<_> = registry::manifolds().iter().map(|e| e.describe()).collect();
                println!("{}", serde_json::to_string_pretty(&entries)?);
            } else {
                for entry in registry::manifolds() {
                    println!(
                        "{:24} dim={} kahler={} locally_symmetric={} flat={}",
                        entry.id, entry.dim, entry.kahler, entry.locally_symmetric, entry.flat
                    );
                }
            }
            Ok(true)
        }
        Command::Describe { id, json } => {
            let entry = registry::lookup(&id)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&entry.describe())?);
            } else {
                let d = entry.describe();
                println!("id:                 {}", d.id);
                println!("dim:                {}", d.dim);
                println!("kahler:             {}", d.kahler);
                println!("locally_symmetric:  {}", d.locally_symmetric);
                println!("flat:               {}", d.flat);
                println!("closed-form curves: {}", d.closed_form_geodesics);
                println!("chart domain:       {}", d.chart_domain);
                println!("description:        {}", d.description);
            }
            Ok(true)
        }
        Command::Verify { id, seed, json } => {
            let report = registry::verify_manifold(&id, seed)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                for check in &report.checks {
                    println!(
                        "[{}] {:32} value {:10.3e}  tolerance {:8.1e}",
                        if check.passed { "PASS" } else { "FAIL" },
                        check.name,
                        check.value,
                        check.tolerance
                    );
                }
                println!("{}: {}", report.manifold, if report.passed { "PASS" } else { "FAIL" });
            }
            Ok(report.passed)
        }
    }
}

fn parse_mode(text: &str) -> bsg::Result<Mode> {
    serde_json::from_value(serde_json::Value::String(text.to_string()))
        .map_err(|_| Error::ConfigInvalid(vec![format!("unknown mode `{text}`")]))
}
