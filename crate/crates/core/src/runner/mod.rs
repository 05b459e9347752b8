//! Manifest-driven experiments that write each figure as CSV files.

mod experiments;
pub mod manifest;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

pub use manifest::{Settings, KEYS};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Fig2,
    Fig3,
    Fig5a,
    Fig5bcd,
    Fig6,
    Synth,
    SweepCustom,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Fig2,
        Experiment::Fig3,
        Experiment::Fig5a,
        Experiment::Fig5bcd,
        Experiment::Fig6,
        Experiment::Synth,
        Experiment::SweepCustom,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Fig5a => "fig5a",
            Experiment::Fig5bcd => "fig5bcd",
            Experiment::Fig6 => "fig6",
            Experiment::Synth => "synth",
            Experiment::SweepCustom => "sweep-custom",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::Fig2 => "F₁ against decoherence, geometric vs dynamical H and T gates",
            Experiment::Fig3 => "F₁ over detuning and amplitude errors at fixed decoherence",
            Experiment::Fig5a => "transmon F₁ against the drive cap Ω_M",
            Experiment::Fig5bcd => "transmon H and T gate dynamics: F₁(t), populations, state fidelity",
            Experiment::Fig6 => "two-qubit controlled-phase gate: populations, fidelities, effective model",
            Experiment::Synth => "control fields and gate matrix for one gate",
            Experiment::SweepCustom => "single-qubit F₁ over user-chosen axes",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.id() == s.trim())
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

impl Serialize for Experiment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

/// Derived quantities, keyed for stable output order.
pub type Derived = BTreeMap<String, f64>;

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub experiment: Experiment,
    pub files: Vec<PathBuf>,
    pub derived: Derived,
}

#[derive(Serialize)]
struct Metadata<'a> {
    settings: &'a Settings,
    validation: &'a Derived,
    results: &'a Derived,
    files: Vec<String>,
}

pub const METADATA_FILE: &str = "metadata.json";

/// Resolves and checks every parameter group without simulating.
pub fn validate(s: &Settings) -> Result<Derived> {
    experiments::validate(s)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Manifest {
            key: "jobs".into(),
            reason: e.to_string(),
        })
}

/// Runs the configured experiment, writing its CSV files and a metadata
/// record into `s.out`.
pub fn run(s: &Settings) -> Result<RunSummary> {
    let validation = validate(s)?;
    std::fs::create_dir_all(&s.out)?;
    let (files, derived) = pool(s.jobs)?.install(|| experiments::run(s))?;
    let meta = Metadata {
        settings: s,
        validation: &validation,
        results: &derived,
        files: files.iter().map(|p| p.display().to_string()).collect(),
    };
    let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(e.into()))?;
    std::fs::write(s.out.join(METADATA_FILE), json + "\n")?;
    Ok(RunSummary {
        experiment: s.experiment,
        files,
        derived,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experiment_ids_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.id().parse::<Experiment>().unwrap(), e);
        }
        assert!(matches!("fig4".parse::<Experiment>(), Err(Error::UnknownExperiment(_))));
    }

    #[test]
    fn validation_examples() {
        assert!(validate(&Settings::default()).is_ok());
        let mut s = Settings::default();
        s.set_str("two_qubit.beta=4.0").unwrap();
        assert!(matches!(validate(&s), Err(Error::InfeasibleDesign(_))));
        let mut s = Settings::default();
        s.set_str("synth.tau=-1.0").unwrap();
        assert!(validate(&s).is_err());
        let mut s = Settings::default();
        s.set_str("steps=0").unwrap();
        assert!(validate(&s).is_err());
    }
}
