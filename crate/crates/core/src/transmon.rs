//! Three-level transmon driven by the single-qubit control fields, with a
//! first-order DRAG correction against leakage to `|2⟩`.
//!
//! The drive enters as `H_D = ½(B₀ + B_d)·S − α|2⟩⟨2|` with spin-1-like
//! ladder operators `S`. The field vector is fixed by requiring the qubit
//! block of `H_D` to equal `½[[−Δ, Ω], [Ω*, Δ]]`, giving
//! `B = (Re Ω, −Im Ω, −Δ)`.

use std::f64::consts::SQRT_2;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::control::{gate_controls, ControlField, ControlHamiltonian, Scheme};
use crate::dynamics::{evolve_basis_operators, propagator_snapshots, Collapse, Hamiltonian, LindbladModel};
use crate::gates::SingleQubitGate;
use crate::metrics::{embed, gate_fidelity_f1, state_fidelity, Axis, Channel, SweepGrid};
use crate::output::{csv_writer, fmt_row, linspace};
use crate::units::{khz, mhz};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Samples in the population / fidelity time series.
pub const SERIES_POINTS: usize = 501;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmonParams {
    /// Anharmonicity `α` (rad/µs).
    pub alpha: f64,
    /// Decay rate `κ₁` (rad/µs).
    pub kappa1: f64,
    /// Dephasing rate `κ₂` (rad/µs).
    pub kappa2: f64,
    /// Drive amplitude cap `Ω_M` (rad/µs).
    pub omega_max: f64,
}

impl TransmonParams {
    pub fn new(alpha: f64, kappa1: f64, kappa2: f64, omega_max: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", format!("must be positive, got {alpha}")));
        }
        if !(kappa1 >= 0.0 && kappa2 >= 0.0) {
            return Err(Error::param("kappa", "decoherence rates must be nonnegative"));
        }
        if !(omega_max > 0.0 && omega_max.is_finite()) {
            return Err(Error::param("omega_max", format!("must be positive, got {omega_max}")));
        }
        Ok(TransmonParams {
            alpha,
            kappa1,
            kappa2,
            omega_max,
        })
    }

    /// `α = 2π×280 MHz`, `κ₁ = κ₂ = 2π×2 kHz`.
    pub fn reference(omega_max: f64) -> Self {
        TransmonParams {
            alpha: mhz(280.0),
            kappa1: khz(2.0),
            kappa2: khz(2.0),
            omega_max,
        }
    }
}

/// How the leakage correction is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum DragMode {
    /// `B_d = 0`.
    Off,
    /// `B_dx = (Ḃ_y − B_z B_x)/2α`, `B_dy = −(Ḃ_x + B_z B_y)/2α`.
    ///
    /// With `B = (Re Ω, −Im Ω, −Δ)` this is the complex correction
    /// `+(iΩ̇ + ΔΩ)/2α`, which adds to the leakage it is meant to cancel.
    Reversed,
    /// The same vector with the opposite overall sign, i.e. the drive
    /// `Ω − (iΩ̇ + ΔΩ)/2α`; this is the sign that suppresses leakage.
    #[default]
    Corrected,
}

impl std::str::FromStr for DragMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "off" | "none" => Ok(DragMode::Off),
            "reversed" => Ok(DragMode::Reversed),
            "corrected" | "on" => Ok(DragMode::Corrected),
            other => Err(Error::param("drag", format!("unknown mode `{other}`"))),
        }
    }
}

impl DragMode {
    fn coefficient(self, alpha: f64) -> f64 {
        match self {
            DragMode::Off => 0.0,
            DragMode::Reversed => 1.0 / (2.0 * alpha),
            DragMode::Corrected => -1.0 / (2.0 * alpha),
        }
    }
}

/// `(B_x, B_y, B_z)` sampled from a control field, optionally as the DRAG
/// correction to that field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldVector {
    controls: ControlField,
    // 0 for the original field, ±1/2α for a correction
    drag: Option<f64>,
}

impl FieldVector {
    pub fn controls(&self) -> &ControlField {
        &self.controls
    }

    pub fn is_correction(&self) -> bool {
        self.drag.is_some()
    }

    pub fn sample_in(&self, t: f64, piece: usize) -> [f64; 3] {
        let s = self.controls.sample_in(t, piece);
        let b = [s.omega.re, -s.omega.im, -s.delta];
        match self.drag {
            None => b,
            Some(c) => {
                let r = self.controls.rate_in(t, piece);
                let (dbx, dby) = (r.omega.re, -r.omega.im);
                [c * (dby - b[2] * b[0]), -c * (dbx + b[2] * b[1]), 0.0]
            }
        }
    }

    pub fn sample(&self, t: f64) -> [f64; 3] {
        let piece = self.controls.breakpoints().iter().filter(|&&x| x <= t).count();
        self.sample_in(t, piece)
    }
}

/// `B₀(t) = (Re Ω, −Im Ω, −Δ)`.
pub fn b0_from_controls(c: &ControlField) -> FieldVector {
    FieldVector {
        controls: c.clone(),
        drag: None,
    }
}

/// DRAG correction of `b0` (with the default, leakage-suppressing sign).
pub fn drag_correction(b0: &FieldVector, alpha: f64) -> FieldVector {
    drag_correction_with(b0, alpha, DragMode::Corrected)
}

pub fn drag_correction_with(b0: &FieldVector, alpha: f64, mode: DragMode) -> FieldVector {
    FieldVector {
        controls: b0.controls.clone(),
        drag: Some(mode.coefficient(alpha)),
    }
}

pub fn spin_x() -> CMatrix {
    let mut m = CMatrix::zeros(3, 3);
    for (b, w) in [(1, 1.0), (2, SQRT_2)] {
        m[(b, b - 1)] = C64::new(w, 0.0);
        m[(b - 1, b)] = C64::new(w, 0.0);
    }
    m
}

pub fn spin_y() -> CMatrix {
    let mut m = CMatrix::zeros(3, 3);
    for (b, w) in [(1, 1.0), (2, SQRT_2)] {
        m[(b, b - 1)] = C64::new(0.0, w);
        m[(b - 1, b)] = C64::new(0.0, -w);
    }
    m
}

pub fn spin_z() -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(&[
        C64::new(1.0, 0.0),
        C64::new(-1.0, 0.0),
        C64::new(-3.0, 0.0),
    ]))
}

/// `½B·S − α|2⟩⟨2|` for a total field `B`.
pub fn three_level_matrix(b: [f64; 3], alpha: f64) -> CMatrix {
    let (x, y, z) = (0.5 * b[0], 0.5 * b[1], 0.5 * b[2]);
    let r2 = SQRT_2;
    let c = |re: f64, im: f64| C64::new(re, im);
    CMatrix::from_row_slice(
        3,
        3,
        &[
            c(z, 0.0),
            c(x, -y),
            c(0.0, 0.0),
            c(x, y),
            c(-z, 0.0),
            c(r2 * x, -r2 * y),
            c(0.0, 0.0),
            c(r2 * x, r2 * y),
            c(-3.0 * z - alpha, 0.0),
        ],
    )
}

/// `H_D(t)` from the original and correction fields.
pub fn build_three_level_hamiltonian(b0: &FieldVector, bd: &FieldVector, alpha: f64, t: f64) -> CMatrix {
    let (a, d) = (b0.sample(t), bd.sample(t));
    three_level_matrix([a[0] + d[0], a[1] + d[1], a[2] + d[2]], alpha)
}

/// Transmon Hamiltonian driven by one control field.
#[derive(Debug, Clone)]
pub struct TransmonHamiltonian {
    b0: FieldVector,
    bd: FieldVector,
    alpha: f64,
}

impl TransmonHamiltonian {
    pub fn new(controls: &ControlField, alpha: f64, drag: DragMode) -> Self {
        let b0 = b0_from_controls(controls);
        let bd = drag_correction_with(&b0, alpha, drag);
        TransmonHamiltonian { b0, bd, alpha }
    }
}

impl Hamiltonian for TransmonHamiltonian {
    fn dim(&self) -> usize {
        3
    }

    fn at(&self, t: f64, piece: usize) -> CMatrix {
        let a = self.b0.sample_in(t, piece);
        let d = self.bd.sample_in(t, piece);
        three_level_matrix([a[0] + d[0], a[1] + d[1], a[2] + d[2]], self.alpha)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.b0.controls.breakpoints()
    }
}

/// `c₋ = |0⟩⟨1| + √2|1⟩⟨2|` at `κ₁` and `c_z = |1⟩⟨1| + 2|2⟩⟨2|` at `κ₂`.
pub fn transmon_collapses(kappa1: f64, kappa2: f64) -> Result<Vec<Collapse>> {
    let mut lower = CMatrix::zeros(3, 3);
    lower[(0, 1)] = C64::new(1.0, 0.0);
    lower[(1, 2)] = C64::new(SQRT_2, 0.0);
    let z = CMatrix::from_diagonal(&CVector::from_column_slice(&[
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(2.0, 0.0),
    ]));
    Ok(vec![Collapse::new(lower, kappa1)?, Collapse::new(z, kappa2)?])
}

/// Controls for `gate` with peak drive `Ω_M`: the geometric path duration is
/// chosen so that `max|Ω| = Ω_M`; every dynamical segment peaks at `Ω_M`.
pub fn capped_controls(scheme: Scheme, gate: SingleQubitGate, omega_max: f64) -> Result<ControlField> {
    match scheme {
        Scheme::Npgqc => {
            let unit = gate_controls(scheme, gate, 1.0)?;
            gate_controls(scheme, gate, unit.max_drive() / omega_max)
        }
        Scheme::Dg => crate::control::dg_gate_controls(gate, omega_max),
    }
}

/// Options for [`simulate_single_qubit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmonOptions {
    pub scheme: Scheme,
    pub drag: DragMode,
    pub steps: usize,
    pub series_points: usize,
}

impl Default for TransmonOptions {
    fn default() -> Self {
        TransmonOptions {
            scheme: Scheme::Npgqc,
            drag: DragMode::Corrected,
            steps: crate::dynamics::DEFAULT_STEPS,
            series_points: SERIES_POINTS,
        }
    }
}

/// Time series of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub t: f64,
    pub populations: [f64; 3],
    /// State fidelity against the ideal two-level evolution at `t`.
    pub fidelity: f64,
}

/// Result of a transmon gate simulation.
#[derive(Debug, Clone)]
pub struct TransmonReport {
    pub gate: SingleQubitGate,
    pub params: TransmonParams,
    pub options: TransmonOptions,
    pub tau: f64,
    pub omega_bar: f64,
    /// `F₁` with the qubit embedded in levels `{0, 1}`.
    pub f1: f64,
    /// Channel images at each series time (final time last, repeated).
    snapshots: Vec<Channel>,
    /// Ideal two-level propagators at each series time.
    ideal: Vec<CMatrix>,
    times: Vec<f64>,
}

impl TransmonReport {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn final_channel(&self) -> &Channel {
        self.snapshots.last().expect("at least the final snapshot")
    }

    /// Populations and state fidelity along the gate for qubit input `psi0`.
    pub fn state_series(&self, psi0: &CVector) -> Result<Vec<SeriesPoint>> {
        self.times
            .iter()
            .zip(&self.snapshots)
            .zip(&self.ideal)
            .map(|((&t, ch), u)| {
                let rho = ch.apply(psi0)?;
                let ideal = embed(&(u * psi0), &[0, 1], 3);
                Ok(SeriesPoint {
                    t,
                    populations: [rho[(0, 0)].re, rho[(1, 1)].re, rho[(2, 2)].re],
                    fidelity: state_fidelity(&ideal, &rho)?,
                })
            })
            .collect()
    }

    /// Final state fidelity for qubit input `psi0` against `gate·psi0`.
    pub fn state_fidelity(&self, psi0: &CVector) -> Result<f64> {
        let rho = self.final_channel().apply(psi0)?;
        state_fidelity(&embed(&(self.gate.target() * psi0), &[0, 1], 3), &rho)
    }

    /// Largest `|2⟩` population along the series for input `psi0`.
    pub fn peak_leakage(&self, psi0: &CVector) -> Result<f64> {
        Ok(self
            .state_series(psi0)?
            .iter()
            .map(|p| p.populations[2])
            .fold(0.0, f64::max))
    }

    /// `F₁(t)` against the ideal two-level evolution, for every series time.
    pub fn fidelity_series(&self) -> Result<Vec<(f64, f64)>> {
        self.times
            .iter()
            .zip(&self.snapshots)
            .zip(&self.ideal)
            .map(|((&t, ch), u)| {
                let f = gate_fidelity_f1(u, |psi| {
                    let rho = ch.apply(psi)?;
                    Ok(rho.view((0, 0), (2, 2)).into_owned())
                })?;
                Ok((t, f))
            })
            .collect()
    }

    /// `t, p0, p1, p2, fs` rows.
    pub fn write_state_csv<W: Write>(&self, out: W, psi0: &CVector) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["t", "p0", "p1", "p2", "fs"])?;
        for p in self.state_series(psi0)? {
            let [a, b, c] = p.populations;
            w.write_record(fmt_row(&[p.t, a, b, c, p.fidelity]))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Simulates `gate` on the transmon with the duration fixed by `Ω_M`.
pub fn simulate_single_qubit(gate: SingleQubitGate, tp: &TransmonParams, opts: &TransmonOptions) -> Result<TransmonReport> {
    let controls = capped_controls(opts.scheme, gate, tp.omega_max)?;
    let tau = controls.tau();
    let ham = TransmonHamiltonian::new(&controls, tp.alpha, opts.drag);
    let model = LindbladModel::new(&ham, transmon_collapses(tp.kappa1, tp.kappa2)?)?;
    let times = if opts.series_points >= 2 {
        linspace(0.0, tau, opts.series_points)
    } else {
        vec![tau]
    };
    let snaps = evolve_basis_operators(&model, &[0, 1], tau, &times, opts.steps)?;
    let mut snapshots = snaps
        .into_iter()
        .map(|images| Channel::new(vec![0, 1], images))
        .collect::<Result<Vec<_>>>()?;
    // the final snapshot duplicates the last series time
    snapshots.pop();
    let ideal = {
        let mut u = propagator_snapshots(&ControlHamiltonian(&controls), tau, &times, opts.steps)?;
        u.pop();
        u
    };
    let final_ch = snapshots.last().expect("series is nonempty");
    let f1 = gate_fidelity_f1(&gate.target(), |psi| final_ch.apply(psi))?;
    Ok(TransmonReport {
        gate,
        params: *tp,
        options: *opts,
        tau,
        omega_bar: controls.omega_bar(),
        f1,
        snapshots,
        ideal,
        times,
    })
}

/// `F₁` over a grid of `Ω_M` values (the axis is in rad/µs).
pub fn sweep_omega_max(gate: SingleQubitGate, base: &TransmonParams, axis: &Axis, opts: &TransmonOptions) -> Result<SweepGrid> {
    let opts = TransmonOptions {
        series_points: 0,
        ..*opts
    };
    let values = axis
        .values()
        .into_par_iter()
        .map(|om| {
            let tp = TransmonParams { omega_max: om, ..*base };
            simulate_single_qubit(gate, &tp, &opts).map(|r| r.f1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepGrid {
        axes: vec![axis.clone()],
        values,
    })
}

/// Initial state `cosΘ|0⟩ + sinΘ|1⟩`.
pub fn qubit_state(theta: f64) -> CVector {
    let (s, c) = theta.sin_cos();
    CVector::from_column_slice(&[C64::new(c, 0.0), C64::new(s, 0.0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{dg_control, synthesize_controls, DynamicalPulse, PulseShape};
    use crate::control::hamiltonian_from_controls;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn constant(delta: f64, omega: C64) -> ControlField {
        ControlField::from_pieces(&[(1.0, PulseShape::Constant { delta, omega })]).unwrap()
    }

    #[test]
    fn field_examples() {
        let b = b0_from_controls(&constant(0.7, C64::new(0.0, 0.0))).sample(0.5);
        assert_eq!(b, [0.0, 0.0, -0.7]);
        let b = b0_from_controls(&constant(0.0, C64::new(2.0, 0.0))).sample(0.5);
        assert_eq!(b, [2.0, 0.0, 0.0]);
        let c = constant(0.3, C64::from_polar(1.7, 0.4));
        let b = b0_from_controls(&c).sample(0.2);
        assert!((b[0].hypot(b[1]) - 1.7).abs() < 1e-12);
    }

    #[test]
    fn qubit_block_reproduces_two_level_hamiltonian() {
        let p = SingleQubitGate::H.path(1.0).unwrap();
        let c = synthesize_controls(&p).unwrap();
        let b0 = b0_from_controls(&c);
        let off = drag_correction_with(&b0, 1.0, DragMode::Off);
        for t in [0.0, 0.37, 0.9] {
            let h3 = build_three_level_hamiltonian(&b0, &off, 5.0, t);
            let h2 = hamiltonian_from_controls(&c, t);
            for r in 0..2 {
                for k in 0..2 {
                    assert!((h3[(r, k)] - h2[(r, k)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn matrix_matches_spin_operators() {
        let b = [0.3, -1.1, 0.7];
        let alpha = 2.5;
        let mut proj2 = CMatrix::zeros(3, 3);
        proj2[(2, 2)] = C64::new(1.0, 0.0);
        let want = (spin_x() * C64::new(b[0], 0.0) + spin_y() * C64::new(b[1], 0.0) + spin_z() * C64::new(b[2], 0.0))
            * C64::new(0.5, 0.0)
            - proj2 * C64::new(alpha, 0.0);
        assert!((three_level_matrix(b, alpha) - want).norm() < 1e-14);
        assert!((spin_x()[(1, 2)] - SQRT_2).norm() < 1e-15);
        let zero = three_level_matrix([0.0; 3], alpha);
        assert!((zero[(2, 2)] + alpha).norm() < 1e-15 && zero[(0, 0)].norm() == 0.0);
    }

    #[test]
    fn drag_examples() {
        let b0 = b0_from_controls(&constant(0.0, C64::new(3.0, 1.0)));
        let bd = drag_correction(&b0, 7.0);
        assert_eq!(bd.sample(0.4), [0.0, 0.0, 0.0]);

        let c = synthesize_controls(&SingleQubitGate::H.path(1.0).unwrap()).unwrap();
        let b0 = b0_from_controls(&c);
        let small = drag_correction(&b0, 1.0).sample(0.3);
        let tiny = drag_correction(&b0, 1e6).sample(0.3);
        for k in 0..2 {
            assert!((tiny[k] * 1e6 - small[k]).abs() < 1e-9 * small[k].abs().max(1.0));
        }

        // resonant sine pulse: B_d ∝ derivative, cos envelope
        let pulse = DynamicalPulse::new(PI / 2.0, 0.3, 2.0).unwrap();
        let d = dg_control(&pulse);
        let alpha = 10.0;
        let bd = drag_correction_with(&b0_from_controls(&d), alpha, DragMode::Reversed);
        let tp = pulse.duration();
        for t in [0.1 * tp, 0.5 * tp, 0.8 * tp] {
            let env = pulse.omega_max * PI / tp * (PI * t / tp).cos();
            let (dbx, dby) = (env * 0.3f64.cos(), env * 0.3f64.sin());
            let got = bd.sample(t);
            assert!((got[0] - dby / (2.0 * alpha)).abs() < 1e-12);
            assert!((got[1] + dbx / (2.0 * alpha)).abs() < 1e-12);
        }
    }

    #[test]
    fn reversed_and_corrected_differ_by_sign() {
        let c = synthesize_controls(&SingleQubitGate::T.path(1.0).unwrap()).unwrap();
        let b0 = b0_from_controls(&c);
        let p = drag_correction_with(&b0, 3.0, DragMode::Reversed).sample(0.4);
        let q = drag_correction_with(&b0, 3.0, DragMode::Corrected).sample(0.4);
        assert!(p.iter().zip(&q).all(|(a, b)| (a + b).abs() < 1e-15));
    }

    #[test]
    fn capped_duration_hits_the_cap() {
        for scheme in Scheme::ALL {
            for g in [SingleQubitGate::H, SingleQubitGate::T] {
                let c = capped_controls(scheme, g, mhz(51.0)).unwrap();
                assert!((c.max_drive() - mhz(51.0)).abs() < 1e-6 * mhz(51.0), "{scheme} {g}");
            }
        }
    }

    #[test]
    fn large_anharmonicity_recovers_two_level_gates() {
        let opts = TransmonOptions {
            series_points: 0,
            steps: 20_000,
            ..Default::default()
        };
        for g in SingleQubitGate::ALL {
            let tp = TransmonParams::new(100.0 * mhz(280.0), 0.0, 0.0, mhz(51.0)).unwrap();
            let r = simulate_single_qubit(g, &tp, &opts).unwrap();
            assert!(r.f1 > 1.0 - 1e-4, "{g}: {}", r.f1);
        }
    }

    #[test]
    fn series_ends_at_final_state() {
        let tp = TransmonParams::reference(mhz(40.0));
        let opts = TransmonOptions {
            steps: 4000,
            series_points: 11,
            ..Default::default()
        };
        let r = simulate_single_qubit(SingleQubitGate::T, &tp, &opts).unwrap();
        let plus = qubit_state(FRAC_PI_4);
        let series = r.state_series(&plus).unwrap();
        assert_eq!(series.len(), 11);
        assert!((series[0].fidelity - 1.0).abs() < 1e-12);
        assert!((series[10].t - r.tau).abs() < 1e-15);
        assert!((series[10].fidelity - r.state_fidelity(&plus).unwrap()).abs() < 1e-9);
        let total: f64 = series[10].populations.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        let fs = r.fidelity_series().unwrap();
        assert!((fs[10].1 - r.f1).abs() < 1e-7);
    }

    #[test]
    fn parameter_validation() {
        assert!(TransmonParams::new(-1.0, 0.0, 0.0, 1.0).is_err());
        assert!(TransmonParams::new(1.0, -1.0, 0.0, 1.0).is_err());
        assert!(TransmonParams::new(1.0, 0.0, 0.0, 0.0).is_err());
    }
}
