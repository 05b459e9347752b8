use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use geogate::runner::{self, Experiment, Settings, KEYS};

#[derive(Parser)]
#[command(name = "geogate", about = "Nonadiabatic noncyclic geometric gate simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its CSV files.
    Run {
        experiment: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Resolve and check parameters without simulating.
    Validate {
        experiment: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// List experiments and manifest keys.
    ListExperiments,
}

#[derive(Args)]
struct Common {
    /// Manifest file (flat TOML, dotted keys).
    #[arg(long, short)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Single-qubit gate for `synth` and `sweep-custom`.
    #[arg(long)]
    gate: Option<String>,
    /// Override a manifest key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn resolve(experiment: Option<String>, c: Common) -> geogate::Result<Settings> {
    let mut s = match &c.manifest {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    if let Some(e) = experiment {
        s.experiment = e.parse()?;
    }
    if let Some(o) = c.out {
        s.out = o;
    }
    if let Some(n) = c.steps {
        s.steps = n;
    }
    if let Some(j) = c.jobs {
        s.jobs = j;
    }
    if let Some(g) = c.gate {
        s.gate = g.parse()?;
    }
    for kv in &c.set {
        s.set_str(kv)?;
    }
    Ok(s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ListExperiments => {
            for e in Experiment::ALL {
                println!("{:<13} {}", e.id(), e.description());
            }
            println!("\nmanifest keys:");
            for (k, d) in KEYS {
                println!("  {k:<26} {d}");
            }
            Ok(())
        }
        Command::Validate { experiment, common } => resolve(experiment, common).and_then(|s| {
            let d = runner::validate(&s)?;
            println!("valid: {}", s.experiment);
            for (k, v) in d {
                println!("  {k} = {v}");
            }
            Ok(())
        }),
        Command::Run { experiment, common } => resolve(experiment, common).and_then(|s| {
            let r = runner::run(&s)?;
            for f in &r.files {
                println!("wrote {}", f.display());
            }
            for (k, v) in &r.derived {
                println!("  {k} = {v}");
            }
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
