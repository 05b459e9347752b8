//! Flat `key = value` manifests with dotted namespaces.
//!
//! Resolution order is defaults, then the manifest file, then `--set`
//! overrides. Every key is type-checked; unknown keys are rejected by name.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::control::Scheme;
use crate::gates::SingleQubitGate;
use crate::transmon::DragMode;
use crate::two_qubit::{CphaseFrame, TwoQubitParams};
use crate::units::{khz, mhz};
use crate::{Error, Result};

use super::Experiment;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig2Settings {
    /// Largest `κ` in units of `Ω̄/10⁴`.
    pub kappa_max: f64,
    pub kappa_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig3Settings {
    /// Fixed `κ₁ = κ₂` in units of `Ω̄/10⁴`.
    pub kappa: f64,
    pub error_min: f64,
    pub error_max: f64,
    pub error_points: usize,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransmonSettings {
    pub alpha_mhz: f64,
    pub kappa1_khz: f64,
    pub kappa2_khz: f64,
    pub drag: DragMode,
    pub scheme: Scheme,
    /// `Ω_M` used for the H and T gate dynamics.
    pub omega_h_mhz: f64,
    pub omega_t_mhz: f64,
    pub sweep_min_mhz: f64,
    pub sweep_max_mhz: f64,
    pub sweep_points: usize,
    pub series_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoQubitSettings {
    pub g12_mhz: f64,
    pub delta12_mhz: f64,
    pub alpha1_mhz: f64,
    pub alpha2_mhz: f64,
    pub beta: f64,
    pub nu_mhz: f64,
    pub kappa1_khz: f64,
    pub kappa2_khz: f64,
    pub kappa1p_khz: f64,
    pub kappa2p_khz: f64,
    pub gamma_g: f64,
    pub frame: CphaseFrame,
    pub series_points: usize,
}

impl TwoQubitSettings {
    pub fn params(&self) -> TwoQubitParams {
        TwoQubitParams {
            g12: mhz(self.g12_mhz),
            delta12: mhz(self.delta12_mhz),
            alpha1: mhz(self.alpha1_mhz),
            alpha2: mhz(self.alpha2_mhz),
            beta: self.beta,
            nu: mhz(self.nu_mhz),
            kappa1: khz(self.kappa1_khz),
            kappa2: khz(self.kappa2_khz),
            kappa1p: khz(self.kappa1p_khz),
            kappa2p: khz(self.kappa2p_khz),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthSettings {
    pub tau: f64,
    pub points: usize,
}

/// Axis of an ad-hoc single-qubit sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    /// `κ₁ = κ₂` in units of `Ω̄/10⁴`.
    Kappa,
    /// Detuning error `δ` as a fraction of `Ω̄`.
    Delta,
    /// Relative amplitude error `ε`.
    Eps,
}

impl FromStr for SweepVariable {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "kappa" => Ok(SweepVariable::Kappa),
            "delta" => Ok(SweepVariable::Delta),
            "eps" => Ok(SweepVariable::Eps),
            _ => Err("expected one of kappa, delta, eps".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CustomSettings {
    pub axis: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    /// Optional second axis; `"none"` gives a 1-D sweep.
    pub axis2: Option<SweepVariable>,
    pub min2: f64,
    pub max2: f64,
    pub points2: usize,
    /// Values of the variables not swept.
    pub kappa: f64,
    pub delta: f64,
    pub eps: f64,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub experiment: Experiment,
    pub out: PathBuf,
    pub steps: usize,
    /// Worker threads; 0 uses every available core.
    pub jobs: usize,
    pub gate: SingleQubitGate,
    pub scheme: Scheme,
    pub fig2: Fig2Settings,
    pub fig3: Fig3Settings,
    pub transmon: TransmonSettings,
    pub two_qubit: TwoQubitSettings,
    pub synth: SynthSettings,
    pub custom: CustomSettings,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            experiment: Experiment::Fig2,
            out: PathBuf::from("out"),
            steps: crate::dynamics::DEFAULT_STEPS,
            jobs: 0,
            gate: SingleQubitGate::H,
            scheme: Scheme::Npgqc,
            fig2: Fig2Settings {
                kappa_max: 10.0,
                kappa_points: 21,
            },
            fig3: Fig3Settings {
                kappa: 2.0,
                error_min: -0.1,
                error_max: 0.1,
                error_points: 41,
                threshold: crate::metrics::ROBUST_THRESHOLD,
            },
            transmon: TransmonSettings {
                alpha_mhz: 280.0,
                kappa1_khz: 2.0,
                kappa2_khz: 2.0,
                drag: DragMode::Corrected,
                scheme: Scheme::Npgqc,
                omega_h_mhz: 51.0,
                omega_t_mhz: 38.0,
                sweep_min_mhz: 10.0,
                sweep_max_mhz: 80.0,
                sweep_points: 15,
                series_points: crate::transmon::SERIES_POINTS,
            },
            two_qubit: TwoQubitSettings {
                g12_mhz: 5.0,
                delta12_mhz: 600.0,
                alpha1_mhz: 300.0,
                alpha2_mhz: 280.0,
                beta: 1.7,
                nu_mhz: 313.1,
                kappa1_khz: 2.0,
                kappa2_khz: 2.0,
                kappa1p_khz: 2.0,
                kappa2p_khz: 2.0,
                gamma_g: FRAC_PI_2,
                frame: CphaseFrame::Computational,
                series_points: crate::transmon::SERIES_POINTS,
            },
            synth: SynthSettings { tau: 1.0, points: 1001 },
            custom: CustomSettings {
                axis: SweepVariable::Kappa,
                min: 0.0,
                max: 10.0,
                points: 21,
                axis2: None,
                min2: -0.1,
                max2: 0.1,
                points2: 21,
                kappa: 0.0,
                delta: 0.0,
                eps: 0.0,
            },
        }
    }
}

/// Every accepted key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("experiment", "fig2 | fig3 | fig5a | fig5bcd | fig6 | synth | sweep-custom"),
    ("out", "output directory"),
    ("steps", "RK4 steps per gate"),
    ("jobs", "worker threads (0 = all cores)"),
    ("gate", "H | T | S (synth, sweep-custom)"),
    ("scheme", "npgqc | dg (sweep-custom)"),
    ("fig2.kappa_max", "largest κ in units of Ω̄/1e4"),
    ("fig2.kappa_points", "points on the κ grid"),
    ("fig3.kappa", "fixed κ in units of Ω̄/1e4"),
    ("fig3.error_min", "lower end of the δ and ε ranges"),
    ("fig3.error_max", "upper end of the δ and ε ranges"),
    ("fig3.error_points", "points per error axis"),
    ("fig3.threshold", "fidelity threshold for the area fraction"),
    ("transmon.alpha_mhz", "anharmonicity α/2π"),
    ("transmon.kappa1_khz", "decay rate κ₁/2π"),
    ("transmon.kappa2_khz", "dephasing rate κ₂/2π"),
    ("transmon.drag", "off | reversed | corrected"),
    ("transmon.scheme", "npgqc | dg"),
    ("transmon.omega_h_mhz", "Ω_M/2π for the H gate"),
    ("transmon.omega_t_mhz", "Ω_M/2π for the T gate"),
    ("transmon.sweep_min_mhz", "Ω_M sweep start"),
    ("transmon.sweep_max_mhz", "Ω_M sweep end"),
    ("transmon.sweep_points", "Ω_M sweep points"),
    ("transmon.series_points", "time samples along the gate"),
    ("two_qubit.g12_mhz", "coupling g₁₂/2π"),
    ("two_qubit.delta12_mhz", "detuning Δ₁₂/2π"),
    ("two_qubit.alpha1_mhz", "anharmonicity α₁/2π"),
    ("two_qubit.alpha2_mhz", "anharmonicity α₂/2π"),
    ("two_qubit.beta", "modulation index β"),
    ("two_qubit.nu_mhz", "modulation frequency ν/2π"),
    ("two_qubit.kappa1_khz", "qubit 1 decay κ₁/2π"),
    ("two_qubit.kappa2_khz", "qubit 1 dephasing κ₂/2π"),
    ("two_qubit.kappa1p_khz", "qubit 2 decay κ'₁/2π"),
    ("two_qubit.kappa2p_khz", "qubit 2 dephasing κ'₂/2π"),
    ("two_qubit.gamma_g", "target conditional phase (rad)"),
    ("two_qubit.frame", "computational | effective"),
    ("two_qubit.series_points", "time samples along the gate"),
    ("synth.tau", "gate duration (µs)"),
    ("synth.points", "control-field samples"),
    ("custom.axis", "kappa | delta | eps"),
    ("custom.min", "first axis start"),
    ("custom.max", "first axis end"),
    ("custom.points", "first axis points"),
    ("custom.axis2", "none | kappa | delta | eps"),
    ("custom.min2", "second axis start"),
    ("custom.max2", "second axis end"),
    ("custom.points2", "second axis points"),
    ("custom.kappa", "κ (Ω̄/1e4) when not swept"),
    ("custom.delta", "δ when not swept"),
    ("custom.eps", "ε when not swept"),
];

fn bad(key: &str, reason: impl Into<String>) -> Error {
    Error::Manifest {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn float(key: &str, v: &toml::Value) -> Result<f64> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        other => Err(bad(key, format!("expected a number, got {}", other.type_str()))),
    }
}

fn count(key: &str, v: &toml::Value) -> Result<usize> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        toml::Value::Integer(i) => Err(bad(key, format!("must be nonnegative, got {i}"))),
        other => Err(bad(key, format!("expected an integer, got {}", other.type_str()))),
    }
}

fn text<'a>(key: &str, v: &'a toml::Value) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| bad(key, format!("expected a string, got {}", v.type_str())))
}

fn parsed<T: FromStr>(key: &str, v: &toml::Value) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    text(key, v)?.parse().map_err(|e: T::Err| bad(key, e.to_string()))
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, toml::Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            _ => out.push((key, v.clone())),
        }
    }
}

impl Settings {
    /// Applies one typed value.
    pub fn set(&mut self, key: &str, v: &toml::Value) -> Result<()> {
        let t = &mut self.transmon;
        let q = &mut self.two_qubit;
        let c = &mut self.custom;
        match key {
            "experiment" => self.experiment = parsed(key, v)?,
            "out" => self.out = PathBuf::from(text(key, v)?),
            "steps" => self.steps = count(key, v)?,
            "jobs" => self.jobs = count(key, v)?,
            "gate" => self.gate = parsed(key, v)?,
            "scheme" => self.scheme = parsed(key, v)?,
            "fig2.kappa_max" => self.fig2.kappa_max = float(key, v)?,
            "fig2.kappa_points" => self.fig2.kappa_points = count(key, v)?,
            "fig3.kappa" => self.fig3.kappa = float(key, v)?,
            "fig3.error_min" => self.fig3.error_min = float(key, v)?,
            "fig3.error_max" => self.fig3.error_max = float(key, v)?,
            "fig3.error_points" => self.fig3.error_points = count(key, v)?,
            "fig3.threshold" => self.fig3.threshold = float(key, v)?,
            "transmon.alpha_mhz" => t.alpha_mhz = float(key, v)?,
            "transmon.kappa1_khz" => t.kappa1_khz = float(key, v)?,
            "transmon.kappa2_khz" => t.kappa2_khz = float(key, v)?,
            "transmon.drag" => t.drag = parsed(key, v)?,
            "transmon.scheme" => t.scheme = parsed(key, v)?,
            "transmon.omega_h_mhz" => t.omega_h_mhz = float(key, v)?,
            "transmon.omega_t_mhz" => t.omega_t_mhz = float(key, v)?,
            "transmon.sweep_min_mhz" => t.sweep_min_mhz = float(key, v)?,
            "transmon.sweep_max_mhz" => t.sweep_max_mhz = float(key, v)?,
            "transmon.sweep_points" => t.sweep_points = count(key, v)?,
            "transmon.series_points" => t.series_points = count(key, v)?,
            "two_qubit.g12_mhz" => q.g12_mhz = float(key, v)?,
            "two_qubit.delta12_mhz" => q.delta12_mhz = float(key, v)?,
            "two_qubit.alpha1_mhz" => q.alpha1_mhz = float(key, v)?,
            "two_qubit.alpha2_mhz" => q.alpha2_mhz = float(key, v)?,
            "two_qubit.beta" => q.beta = float(key, v)?,
            "two_qubit.nu_mhz" => q.nu_mhz = float(key, v)?,
            "two_qubit.kappa1_khz" => q.kappa1_khz = float(key, v)?,
            "two_qubit.kappa2_khz" => q.kappa2_khz = float(key, v)?,
            "two_qubit.kappa1p_khz" => q.kappa1p_khz = float(key, v)?,
            "two_qubit.kappa2p_khz" => q.kappa2p_khz = float(key, v)?,
            "two_qubit.gamma_g" => q.gamma_g = float(key, v)?,
            "two_qubit.frame" => q.frame = parsed(key, v)?,
            "two_qubit.series_points" => q.series_points = count(key, v)?,
            "synth.tau" => self.synth.tau = float(key, v)?,
            "synth.points" => self.synth.points = count(key, v)?,
            "custom.axis" => c.axis = parsed(key, v)?,
            "custom.min" => c.min = float(key, v)?,
            "custom.max" => c.max = float(key, v)?,
            "custom.points" => c.points = count(key, v)?,
            "custom.axis2" => {
                c.axis2 = match text(key, v)? {
                    "none" => None,
                    s => Some(s.parse().map_err(|e: String| bad(key, e))?),
                }
            }
            "custom.min2" => c.min2 = float(key, v)?,
            "custom.max2" => c.max2 = float(key, v)?,
            "custom.points2" => c.points2 = count(key, v)?,
            "custom.kappa" => c.kappa = float(key, v)?,
            "custom.delta" => c.delta = float(key, v)?,
            "custom.eps" => c.eps = float(key, v)?,
            _ => return Err(bad(key, "unknown key")),
        }
        Ok(())
    }

    /// Applies a `key=value` override. The value is read as a TOML value,
    /// falling back to a bare string (`--set gate=T`).
    pub fn set_str(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| bad(assignment, "expected key=value"))?;
        let key = key.trim();
        let raw = raw.trim();
        let value = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        self.set(key, &value)
    }

    /// Applies every key of a manifest document.
    pub fn merge_toml(&mut self, source: &str) -> Result<()> {
        let table: toml::Table = source.parse().map_err(|e: toml::de::Error| bad("<manifest>", e.message().to_string()))?;
        let mut flat = Vec::new();
        flatten("", &table, &mut flat);
        for (k, v) in &flat {
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_toml(source: &str) -> Result<Self> {
        let mut s = Settings::default();
        s.merge_toml(source)?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Settings::from_toml(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_keys() {
        let mut s = Settings::default();
        for (k, _) in KEYS {
            // every documented key is accepted by `set` with some value
            let ok = ["1", "0.5", "\"H\"", "\"fig2\"", "\"npgqc\"", "\"off\"", "\"effective\"", "\"kappa\"", "\"none\"", "\"x\""]
                .iter()
                .any(|v| s.clone().set_str(&format!("{k}={v}")).is_ok());
            assert!(ok, "{k}");
        }
        s.set_str("gate=T").unwrap();
        assert_eq!(s.gate, SingleQubitGate::T);
    }

    #[test]
    fn dotted_and_nested_forms_agree() {
        let a = Settings::from_toml("experiment = \"fig3\"\ntwo_qubit.beta = 1.2\n[fig3]\nerror_points = 5\n").unwrap();
        assert_eq!(a.experiment, Experiment::Fig3);
        assert_eq!(a.two_qubit.beta, 1.2);
        assert_eq!(a.fig3.error_points, 5);
    }

    #[test]
    fn rejects_unknown_and_mistyped() {
        let e = Settings::from_toml("transmon.alfa_mhz = 3.0").unwrap_err();
        assert!(e.to_string().contains("transmon.alfa_mhz"), "{e}");
        let e = Settings::from_toml("steps = 1.5").unwrap_err();
        assert!(e.to_string().contains("`steps`"), "{e}");
        let e = Settings::from_toml("steps = -3").unwrap_err();
        assert!(e.to_string().contains("`steps`"), "{e}");
        let e = Settings::from_toml("transmon.drag = \"sometimes\"").unwrap_err();
        assert!(e.to_string().contains("transmon.drag"), "{e}");
        assert!(Settings::default().set_str("gate").is_err());
        assert!(Settings::default().set_str("synth.tau=\"fast\"").is_err());
    }
}
