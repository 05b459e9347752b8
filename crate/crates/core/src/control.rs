//! Control fields: reverse-engineered geometric pulses, resonant
//! dynamical-gate pulses, and systematic-error injection.
//!
//! A [`ControlField`] is a piecewise description of the detuning `Δ(t)` and
//! complex drive `Ω(t)` entering `H(t) = ½[[−Δ, Ω], [Ω*, Δ]]`. Every piece has
//! a closed form, so fields and their time derivatives are exact at any `t`.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::Matrix2;
use serde::Serialize;

use crate::dynamics::Hamiltonian;
use crate::gates::SingleQubitGate;
use crate::path::{simpson, PathParams};
use crate::{CMatrix, Error, Result, C64};

/// Detuning and drive at one instant (or their time derivatives).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSample {
    pub delta: f64,
    pub omega: C64,
}

/// Closed-form pulse shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PulseShape {
    /// Reverse-engineered fields of a `θ̇ = 0` path with linear azimuth
    /// `φ(s) = φ₀ + φ̇ s`.
    Geometric {
        gamma_big: f64,
        xi: f64,
        theta: f64,
        phi0: f64,
        phi_rate: f64,
    },
    /// `Δ = 0`, `Ω(s) = Ω_m sin(πs/T) e^{−iφ_d}` on a segment of length `T`.
    Sine { omega_max: f64, phase: f64 },
    /// Constant fields.
    Constant { delta: f64, omega: C64 },
}

impl PulseShape {
    fn sample(&self, s: f64, duration: f64) -> ControlSample {
        match *self {
            PulseShape::Geometric {
                gamma_big,
                xi,
                theta,
                phi0,
                phi_rate,
            } => {
                let phi = phi0 + phi_rate * s;
                let (sg, cg) = gamma_big.sin_cos();
                let sin2t = (2.0 * theta).sin();
                let sin_t2 = theta.sin().powi(2);
                let delta = (0.5 * phi.cos() * sin2t * sg - cg * sin_t2) * phi_rate;
                let bracket = C64::new(1.0 + cg, 0.0) + C64::from_polar(cg - 1.0, 2.0 * phi);
                let omega = (C64::from_polar(0.25 * sin2t, -(xi + phi)) * bracket
                    + C64::from_polar(sg * sin_t2, -xi))
                    * phi_rate;
                ControlSample { delta, omega }
            }
            PulseShape::Sine { omega_max, phase } => ControlSample {
                delta: 0.0,
                omega: C64::from_polar(omega_max * (PI * s / duration).sin(), -phase),
            },
            PulseShape::Constant { delta, omega } => ControlSample { delta, omega },
        }
    }

    fn rate(&self, s: f64, duration: f64) -> ControlSample {
        match *self {
            PulseShape::Geometric {
                gamma_big,
                xi,
                theta,
                phi0,
                phi_rate,
            } => {
                let phi = phi0 + phi_rate * s;
                let (sg, cg) = gamma_big.sin_cos();
                let sin2t = (2.0 * theta).sin();
                let r2 = phi_rate * phi_rate;
                let delta = -0.5 * phi.sin() * sin2t * sg * r2;
                let i = C64::i();
                let omega = (-i * C64::from_polar(0.25 * sin2t * (1.0 + cg), -(xi + phi))
                    + i * C64::from_polar(0.25 * sin2t * (cg - 1.0), phi - xi))
                    * r2;
                ControlSample { delta, omega }
            }
            PulseShape::Sine { omega_max, phase } => ControlSample {
                delta: 0.0,
                omega: C64::from_polar(
                    omega_max * PI / duration * (PI * s / duration).cos(),
                    -phase,
                ),
            },
            PulseShape::Constant { .. } => ControlSample {
                delta: 0.0,
                omega: C64::new(0.0, 0.0),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start: f64,
    pub duration: f64,
    pub shape: PulseShape,
}

/// Qubit-frequency drift `δ` and drive-amplitude error `ε`, both as fractions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ErrorSetting {
    pub delta_frac: f64,
    pub eps_frac: f64,
}

/// Time-samplable `(Δ(t), Ω(t))` on `[0, τ]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlField {
    segments: Vec<Segment>,
    tau: f64,
    omega_bar: f64,
    delta_shift: f64,
    drive_scale: f64,
}

const AVERAGE_PANELS: usize = 4000;

impl ControlField {
    /// Concatenates shapes of the given durations into one field.
    pub fn from_pieces(pieces: &[(f64, PulseShape)]) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::param("pieces", "a control field needs at least one segment"));
        }
        let mut segments = Vec::with_capacity(pieces.len());
        let mut start = 0.0;
        for &(duration, shape) in pieces {
            if !(duration > 0.0 && duration.is_finite()) {
                return Err(Error::param("duration", format!("must be positive, got {duration}")));
            }
            segments.push(Segment {
                start,
                duration,
                shape,
            });
            start += duration;
        }
        let mut field = ControlField {
            segments,
            tau: start,
            omega_bar: 0.0,
            delta_shift: 0.0,
            drive_scale: 1.0,
        };
        field.omega_bar = field.average_drive(AVERAGE_PANELS);
        Ok(field)
    }

    /// Concatenates whole fields, preserving their injected errors only if
    /// none were applied.
    pub fn sequence(fields: &[ControlField]) -> Result<Self> {
        let mut pieces = Vec::new();
        for f in fields {
            if f.delta_shift != 0.0 || f.drive_scale != 1.0 {
                return Err(Error::param(
                    "fields",
                    "inject errors after composing a sequence, not before",
                ));
            }
            pieces.extend(f.segments.iter().map(|s| (s.duration, s.shape)));
        }
        Self::from_pieces(&pieces)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Time average of `|Ω(t)|` over the whole field.
    pub fn omega_bar(&self) -> f64 {
        self.omega_bar
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Interior segment boundaries.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.start).collect()
    }

    fn locate(&self, t: f64) -> usize {
        self.segments
            .iter()
            .rposition(|s| s.start <= t)
            .unwrap_or(0)
    }

    fn apply_errors(&self, raw: ControlSample) -> ControlSample {
        ControlSample {
            delta: raw.delta + self.delta_shift,
            omega: raw.omega * self.drive_scale,
        }
    }

    /// `(Δ(t), Ω(t))`; segments are closed on the left.
    pub fn sample(&self, t: f64) -> ControlSample {
        self.sample_in(t, self.locate(t))
    }

    /// Samples `t` using the closed form of segment `piece`, which lets an
    /// integrator evaluate a segment's own right endpoint.
    pub fn sample_in(&self, t: f64, piece: usize) -> ControlSample {
        let seg = &self.segments[piece.min(self.segments.len() - 1)];
        self.apply_errors(seg.shape.sample(t - seg.start, seg.duration))
    }

    /// `(Δ̇(t), Ω̇(t))`.
    pub fn rate(&self, t: f64) -> ControlSample {
        self.rate_in(t, self.locate(t))
    }

    pub fn rate_in(&self, t: f64, piece: usize) -> ControlSample {
        let seg = &self.segments[piece.min(self.segments.len() - 1)];
        let r = seg.shape.rate(t - seg.start, seg.duration);
        ControlSample {
            delta: r.delta,
            omega: r.omega * self.drive_scale,
        }
    }

    /// Numerical time average of `|Ω|` with `panels` Simpson panels per segment.
    pub fn average_drive(&self, panels: usize) -> f64 {
        let total: f64 = self
            .segments
            .iter()
            .enumerate()
            .map(|(k, s)| {
                simpson(
                    |t| self.sample_in(t, k).omega.norm(),
                    s.start,
                    s.start + s.duration,
                    panels,
                )
            })
            .sum();
        total / self.tau
    }

    /// Maximum of `|Ω(t)|`, from a dense scan refined by golden-section search.
    pub fn max_drive(&self) -> f64 {
        let mut best = 0.0f64;
        for (k, s) in self.segments.iter().enumerate() {
            let n = 4096;
            let h = s.duration / n as f64;
            let f = |t: f64| self.sample_in(t, k).omega.norm();
            let (mut arg, mut val) = (s.start, f(s.start));
            for j in 1..=n {
                let t = s.start + h * j as f64;
                let v = f(t);
                if v > val {
                    arg = t;
                    val = v;
                }
            }
            let (mut a, mut b) = ((arg - h).max(s.start), (arg + h).min(s.start + s.duration));
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..60 {
                let c = b - g * (b - a);
                let d = a + g * (b - a);
                if f(c) > f(d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            best = best.max(val).max(f(0.5 * (a + b)));
        }
        best
    }

    /// Writes `t, delta, omega_re, omega_im` at `points` uniform times.
    pub fn write_csv<W: Write>(&self, out: W, points: usize) -> Result<()> {
        let mut w = crate::output::csv_writer(out);
        w.write_record(["t", "delta", "omega_re", "omega_im"])?;
        for t in crate::output::linspace(0.0, self.tau, points.max(2)) {
            let s = self.sample(t);
            w.write_record(crate::output::fmt_row(&[t, s.delta, s.omega.re, s.omega.im]))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reverse-engineered controls of a scheduled `θ̇ = 0` path.
pub fn synthesize_controls(p: &PathParams) -> Result<ControlField> {
    let phi_rate = p.phi_rate()?;
    ControlField::from_pieces(&[(
        p.tau(),
        PulseShape::Geometric {
            gamma_big: p.gamma_big(),
            xi: p.xi(),
            theta: p.theta(),
            phi0: p.phi0(),
            phi_rate,
        },
    )])
}

/// `H(t) = ½[[−Δ, Ω], [Ω*, Δ]]`.
pub fn hamiltonian_from_controls(c: &ControlField, t: f64) -> Matrix2<C64> {
    two_level_matrix(c.sample(t))
}

pub(crate) fn two_level_matrix(s: ControlSample) -> Matrix2<C64> {
    let d = C64::new(0.5 * s.delta, 0.0);
    let o = s.omega * 0.5;
    Matrix2::new(-d, o, o.conj(), d)
}

/// `Δ → Δ + δΩ̄`, `Ω → (1 + ε)Ω`; the returned `Ω̄` is that of the scaled drive.
pub fn inject_errors(c: &ControlField, e: &ErrorSetting) -> ControlField {
    let mut out = c.clone();
    out.delta_shift += e.delta_frac * c.omega_bar;
    out.drive_scale *= 1.0 + e.eps_frac;
    out.omega_bar = c.omega_bar * (1.0 + e.eps_frac).abs();
    out
}

/// Resonant sine-envelope pulse with rotation angle `ϑ_d = 2Ω_m T/π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynamicalPulse {
    pub theta_d: f64,
    pub phi_d: f64,
    pub omega_max: f64,
}

impl DynamicalPulse {
    pub fn new(theta_d: f64, phi_d: f64, omega_max: f64) -> Result<Self> {
        if !(omega_max > 0.0) {
            return Err(Error::param("omega_max", format!("must be positive, got {omega_max}")));
        }
        if !(theta_d > 0.0) {
            return Err(Error::param("theta_d", format!("must be positive, got {theta_d}")));
        }
        Ok(DynamicalPulse {
            theta_d,
            phi_d,
            omega_max,
        })
    }

    /// Pulse of rotation `theta_d` lasting `tau`.
    pub fn with_duration(theta_d: f64, phi_d: f64, tau: f64) -> Result<Self> {
        Self::new(theta_d, phi_d, PI * theta_d / (2.0 * tau))
    }

    /// Segment length `T = πϑ_d/(2Ω_m)`.
    pub fn duration(&self) -> f64 {
        PI * self.theta_d / (2.0 * self.omega_max)
    }

    fn piece(&self) -> (f64, PulseShape) {
        (
            self.duration(),
            PulseShape::Sine {
                omega_max: self.omega_max,
                phase: self.phi_d,
            },
        )
    }
}

/// Controls of a single dynamical pulse.
pub fn dg_control(pulse: &DynamicalPulse) -> ControlField {
    ControlField::from_pieces(&[pulse.piece()]).expect("pulse duration is positive")
}

/// Controls of a pulse sequence, first element applied first.
pub fn dg_sequence(pulses: &[DynamicalPulse]) -> Result<ControlField> {
    let pieces: Vec<_> = pulses.iter().map(DynamicalPulse::piece).collect();
    ControlField::from_pieces(&pieces)
}

/// `U_d(ϑ_d, φ_d)`.
pub fn dg_operator(pulse: &DynamicalPulse) -> Matrix2<C64> {
    dg_matrix(pulse.theta_d, pulse.phi_d)
}

pub(crate) fn dg_matrix(theta_d: f64, phi_d: f64) -> Matrix2<C64> {
    let (s, c) = (theta_d / 2.0).sin_cos();
    let mi = -C64::i();
    Matrix2::new(
        C64::new(c, 0.0),
        mi * C64::from_polar(s, -phi_d),
        mi * C64::from_polar(s, phi_d),
        C64::new(c, 0.0),
    )
}

/// Dynamical-gate pulse program for a named gate, in application order.
///
/// `H = U_d(π, π) U_d(π/2, π/2)`; T and S use
/// `U_d(π/2, π) U_d(ϑ_z, −π/2) U_d(π/2, 0)` with `ϑ_z = π/4` for T and
/// `ϑ_z = π/2` for S (the assignment that reproduces `diag(1, e^{iπ/4})`
/// and `diag(1, i)` up to a global phase).
pub fn dg_program(gate: SingleQubitGate) -> Vec<(f64, f64)> {
    match gate {
        SingleQubitGate::H => vec![(PI / 2.0, PI / 2.0), (PI, PI)],
        SingleQubitGate::T => vec![(PI / 2.0, 0.0), (PI / 4.0, -PI / 2.0), (PI / 2.0, PI)],
        SingleQubitGate::S => vec![(PI / 2.0, 0.0), (PI / 2.0, -PI / 2.0), (PI / 2.0, PI)],
    }
}

/// Dynamical-gate controls with every segment at peak amplitude `omega_max`.
pub fn dg_gate_controls(gate: SingleQubitGate, omega_max: f64) -> Result<ControlField> {
    let pulses = dg_program(gate)
        .into_iter()
        .map(|(th, ph)| DynamicalPulse::new(th, ph, omega_max))
        .collect::<Result<Vec<_>>>()?;
    dg_sequence(&pulses)
}

/// Gate-construction scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Scheme {
    /// Nonadiabatic noncyclic geometric gate.
    Npgqc,
    /// Resonant sine-pulse dynamical gate.
    Dg,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Npgqc, Scheme::Dg];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Npgqc => "npgqc",
            Scheme::Dg => "dg",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "npgqc" | "geometric" => Ok(Scheme::Npgqc),
            "dg" | "dynamical" => Ok(Scheme::Dg),
            other => Err(Error::param("scheme", format!("unknown scheme `{other}`"))),
        }
    }
}

/// Controls for `gate` under `scheme`, lasting `tau` in total. Dynamical
/// segments share one peak amplitude.
pub fn gate_controls(scheme: Scheme, gate: SingleQubitGate, tau: f64) -> Result<ControlField> {
    match scheme {
        Scheme::Npgqc => synthesize_controls(&gate.path(tau)?),
        Scheme::Dg => {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::param("tau", format!("must be positive, got {tau}")));
            }
            let total: f64 = dg_program(gate).iter().map(|&(th, _)| th).sum();
            dg_gate_controls(gate, PI * total / (2.0 * tau))
        }
    }
}

/// Two-level Hamiltonian `t ↦ ½[[−Δ, Ω], [Ω*, Δ]]` driven by a control field.
#[derive(Debug, Clone, Copy)]
pub struct ControlHamiltonian<'a>(pub &'a ControlField);

impl Hamiltonian for ControlHamiltonian<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn at(&self, t: f64, piece: usize) -> CMatrix {
        let m = two_level_matrix(self.0.sample_in(t, piece));
        CMatrix::from_iterator(2, 2, m.iter().copied())
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints()
    }
}
