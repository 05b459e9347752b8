//! Two capacitively coupled three-level transmons with parametric modulation
//! of the first one, and the geometric controlled-phase gate built on the
//! `{|02⟩, |11⟩}` sideband.
//!
//! Basis order is lexicographic `|q₁q₂⟩`, index `3·q₁ + q₂`. Dynamics are
//! integrated directly under the interaction-picture Hamiltonian with the
//! modulation factor `e^{−iβ sin(νt + η(t))}` kept exactly.

use std::f64::consts::{PI, SQRT_2};
use std::io::Write;

use serde::Serialize;

use crate::dynamics::{evolve_basis_operators, propagator, Collapse, Hamiltonian, LindbladModel};
use crate::gates::cphase_operator;
use crate::metrics::{embed, gate_fidelity_f2, state_fidelity, Channel, F2Lattice};
use crate::output::{csv_writer, fmt_row, linspace};
use crate::path::PathParams;
use crate::units::{khz, mhz};
use crate::{CMatrix, CVector, Error, Result, C64};

/// First positive zero of `J₁`.
pub const J1_FIRST_ZERO: f64 = 3.831_705_970_207_512;

/// Index of `|q₁q₂⟩`.
pub const fn level(q1: usize, q2: usize) -> usize {
    3 * q1 + q2
}

/// Levels of `|00⟩, |01⟩, |10⟩, |11⟩`.
pub const COMPUTATIONAL: [usize; 4] = [level(0, 0), level(0, 1), level(1, 0), level(1, 1)];

/// `J₁(x)` from its power series, summed until terms drop below 1e-16.
pub fn bessel_j1(x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h;
    let mut sum = term;
    let mut m = 0.0;
    while term.abs() > 1e-16 * sum.abs().max(1e-300) || m < 1.0 {
        m += 1.0;
        term *= -h * h / (m * (m + 1.0));
        sum += term;
        if m > 500.0 {
            break;
        }
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoQubitParams {
    /// Coupling `g₁₂` (rad/µs).
    pub g12: f64,
    /// `Δ₁₂ = ω₂ − ω₁` (rad/µs).
    pub delta12: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Modulation index `β`.
    pub beta: f64,
    /// Modulation frequency `ν` (rad/µs).
    pub nu: f64,
    /// Decay / dephasing of qubit 1.
    pub kappa1: f64,
    pub kappa2: f64,
    /// Decay / dephasing of qubit 2.
    pub kappa1p: f64,
    pub kappa2p: f64,
}

impl Default for TwoQubitParams {
    /// `g₁₂ = 2π×5 MHz`, `β = 1.7`, `Δ₁₂ = 2π×600 MHz`, `α₁ = 2π×300 MHz`,
    /// `α₂ = 2π×280 MHz`, `ν = 2π×313.1 MHz`, every rate `2π×2 kHz`.
    fn default() -> Self {
        TwoQubitParams {
            g12: mhz(5.0),
            delta12: mhz(600.0),
            alpha1: mhz(300.0),
            alpha2: mhz(280.0),
            beta: 1.7,
            nu: mhz(313.1),
            kappa1: khz(2.0),
            kappa2: khz(2.0),
            kappa1p: khz(2.0),
            kappa2p: khz(2.0),
        }
    }
}

impl TwoQubitParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.g12 > 0.0 && self.g12.is_finite()) {
            return Err(Error::param("g12", format!("must be positive, got {}", self.g12)));
        }
        if !(self.beta.abs() < J1_FIRST_ZERO && self.beta != 0.0) {
            return Err(Error::InfeasibleDesign(format!(
                "modulation index β = {} must satisfy 0 < |β| < {J1_FIRST_ZERO:.4} so that J₁(β) ≠ 0 keeps its sign",
                self.beta
            )));
        }
        for (name, v) in [
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("kappa1p", self.kappa1p),
            ("kappa2p", self.kappa2p),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be nonnegative, got {v}")));
            }
        }
        for (name, v) in [("delta12", self.delta12), ("alpha1", self.alpha1), ("alpha2", self.alpha2), ("nu", self.nu)] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        Ok(())
    }

    /// `Δ' = ν − Δ₁₂ + α₂`.
    pub fn delta_prime(&self) -> f64 {
        self.nu - self.delta12 + self.alpha2
    }

    /// Effective sideband Rabi amplitude `|Ω₁₂| = 2√2 g₁₂ J₁(β)`.
    pub fn effective_amplitude(&self) -> f64 {
        2.0 * SQRT_2 * self.g12 * bessel_j1(self.beta)
    }

    pub fn closed(&self) -> Self {
        TwoQubitParams {
            kappa1: 0.0,
            kappa2: 0.0,
            kappa1p: 0.0,
            kappa2p: 0.0,
            ..*self
        }
    }
}

/// Frame in which the target conditional phase is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum CphaseFrame {
    /// Phase of `|11⟩` in the interaction picture of the simulation, i.e. on
    /// the computational states themselves. The frame change that turns the
    /// constant sideband detuning into the path detuning adds `Δτ/2`, so
    /// the realised phase is `π(1 + cosθ)` and `φ₋ = 2π/cosθ` is solved from
    /// the target.
    #[default]
    Computational,
    /// Phase of `|11⟩` in the rotating frame of the path itself, `φ₋/2 + π`;
    /// `γ'_g = π/2` then gives `φ₋ = 3π`.
    Effective,
}

impl std::str::FromStr for CphaseFrame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "computational" => Ok(CphaseFrame::Computational),
            "effective" => Ok(CphaseFrame::Effective),
            other => Err(Error::param("frame", format!("unknown frame `{other}`"))),
        }
    }
}

/// Drive schedule realising a controlled phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CphaseSchedule {
    pub gamma_g: f64,
    pub frame: CphaseFrame,
    /// Geometric path (`Γ = ξ = 0`) in the `{|02⟩, |11⟩}` subspace.
    pub path: PathParams,
    /// `η(t) = eta0 + eta_rate·t`.
    pub eta0: f64,
    pub eta_rate: f64,
    /// Path detuning `Δ = −sin²θ·φ̇` matched by the frame change.
    pub target_delta: f64,
    pub nu: f64,
}

impl CphaseSchedule {
    pub fn tau(&self) -> f64 {
        self.path.tau()
    }

    pub fn eta(&self, t: f64) -> f64 {
        self.eta0 + self.eta_rate * t
    }
}

fn wrap_angle(x: f64) -> f64 {
    x.rem_euclid(2.0 * PI)
}

/// Maps the `Γ = ξ = 0` geometric path onto the modulated coupling.
///
/// In the `{|02⟩, |11⟩}` block the resonant harmonic gives the coupling
/// `½|Ω₁₂| e^{−iχ(t)}` with `χ = Δ't + η(t)` and no diagonal. The rotation
/// `diag(e^{iΔt/2}, e^{−iΔt/2})` turns it into the path Hamiltonian
/// `½[[−Δ, |Ω|e^{−iφ}], [c.c., Δ]]` iff `χ̇ = φ̇ + Δ` and `|Ω| = |Ω₁₂|`; the
/// latter fixes `τ`.
pub fn design_cphase(p: &TwoQubitParams, gamma_g: f64, frame: CphaseFrame) -> Result<CphaseSchedule> {
    p.validate()?;
    let amp = p.effective_amplitude();
    let g = wrap_angle(gamma_g);
    let span = match frame {
        CphaseFrame::Computational => {
            let cos_theta = g / PI - 1.0;
            if cos_theta.abs() < 1e-9 || cos_theta.abs() > 1.0 - 1e-12 {
                return Err(Error::InfeasibleDesign(format!(
                    "conditional phase {gamma_g} needs cos θ = {cos_theta:.3}, outside the open noncyclic range"
                )));
            }
            2.0 * PI / cos_theta
        }
        CphaseFrame::Effective => {
            let s = (2.0 * (g - PI)).rem_euclid(4.0 * PI);
            if s < 2.0 * PI {
                s + 4.0 * PI
            } else {
                s
            }
        }
    };
    let unit = PathParams::new(0.0, 0.0, 0.0, span, 1.0)?;
    // |Ω| = ½|sin2θ·φ̇| for Γ = 0
    let omega_unit = 0.5 * ((2.0 * unit.theta()).sin() * span).abs();
    if omega_unit < 1e-12 {
        return Err(Error::InfeasibleDesign("the selected path has no drive".into()));
    }
    let tau = omega_unit / amp;
    let path = unit.with_tau(tau)?;
    let rate = path.phi_rate()?;
    let target_delta = -unit.theta().sin().powi(2) * rate;
    Ok(CphaseSchedule {
        gamma_g,
        frame,
        path,
        eta0: path.phi0(),
        eta_rate: rate + target_delta - p.delta_prime(),
        target_delta,
        nu: p.nu,
    })
}

/// The interaction-picture Hamiltonian on the 9-level space.
#[derive(Debug, Clone, Copy)]
pub struct InteractionHamiltonian {
    pub params: TwoQubitParams,
    pub schedule: CphaseSchedule,
}

/// `H'₁₂(t)` for modulation phase `eta`.
pub fn interaction_matrix(p: &TwoQubitParams, eta: f64, t: f64) -> CMatrix {
    let m = C64::from_polar(p.g12, -p.beta * (p.nu * t + eta).sin());
    let mut h = CMatrix::zeros(9, 9);
    let terms = [
        (level(0, 1), level(1, 0), 1.0, p.delta12),
        (level(0, 2), level(1, 1), SQRT_2, p.delta12 - p.alpha2),
        (level(1, 1), level(2, 0), SQRT_2, p.delta12 + p.alpha1),
    ];
    for (a, b, w, f) in terms {
        let v = m * C64::from_polar(w, f * t);
        h[(a, b)] = v;
        h[(b, a)] = v.conj();
    }
    h
}

pub fn build_interaction_hamiltonian(p: &TwoQubitParams, s: &CphaseSchedule, t: f64) -> CMatrix {
    interaction_matrix(p, s.eta(t), t)
}

impl Hamiltonian for InteractionHamiltonian {
    fn dim(&self) -> usize {
        9
    }
    fn at(&self, t: f64, _piece: usize) -> CMatrix {
        build_interaction_hamiltonian(&self.params, &self.schedule, t)
    }
}

/// `½[[−Δ', Ω₁₂], [Ω₁₂*, Δ']]` on `(|02⟩, |11⟩)` with `Ω₁₂ = 2√2 g₁₂ J₁(β) e^{−iη(t)}`.
pub fn effective_hamiltonian(p: &TwoQubitParams, s: &CphaseSchedule, t: f64) -> CMatrix {
    let dp = 0.5 * p.delta_prime();
    let o = C64::from_polar(0.5 * p.effective_amplitude(), -s.eta(t));
    CMatrix::from_row_slice(2, 2, &[C64::new(-dp, 0.0), o, o.conj(), C64::new(dp, 0.0)])
}

/// Effective model as a [`Hamiltonian`].
#[derive(Debug, Clone, Copy)]
pub struct EffectiveHamiltonian {
    pub params: TwoQubitParams,
    pub schedule: CphaseSchedule,
}

impl Hamiltonian for EffectiveHamiltonian {
    fn dim(&self) -> usize {
        2
    }
    fn at(&self, t: f64, _piece: usize) -> CMatrix {
        effective_hamiltonian(&self.params, &self.schedule, t)
    }
}

/// Converts an effective-model state at `t` to the interaction picture of
/// the full model (the two differ by the rotation generated by `Δ'`).
pub fn effective_to_interaction(p: &TwoQubitParams, t: f64, v: &CVector) -> CVector {
    let a = 0.5 * p.delta_prime() * t;
    CVector::from_column_slice(&[v[0] * C64::from_polar(1.0, -a), v[1] * C64::from_polar(1.0, a)])
}

/// `c₋ ⊗ I`, `c_z ⊗ I`, `I ⊗ c₋`, `I ⊗ c_z` at `κ₁, κ₂, κ'₁, κ'₂`.
pub fn two_qubit_collapses(p: &TwoQubitParams) -> Result<Vec<Collapse>> {
    let mut lower = CMatrix::zeros(3, 3);
    lower[(0, 1)] = C64::new(1.0, 0.0);
    lower[(1, 2)] = C64::new(SQRT_2, 0.0);
    let z = CMatrix::from_diagonal(&CVector::from_column_slice(&[
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(2.0, 0.0),
    ]));
    let id = CMatrix::identity(3, 3);
    Ok(vec![
        Collapse::new(lower.kronecker(&id), p.kappa1)?,
        Collapse::new(z.kronecker(&id), p.kappa2)?,
        Collapse::new(id.kronecker(&lower), p.kappa1p)?,
        Collapse::new(id.kronecker(&z), p.kappa2p)?,
    ])
}

/// Single-qubit frame phases read off the closed-system gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    /// Phase of `|10⟩` relative to `|00⟩`.
    pub phase_q1: f64,
    /// Phase of `|01⟩` relative to `|00⟩`.
    pub phase_q2: f64,
    /// Realised `φ₁₁ − φ₁₀ − φ₀₁ + φ₀₀`, wrapped to `(−π, π]`.
    pub conditional_phase: f64,
    /// Survival probabilities of `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub survival: [f64; 4],
}

fn wrap_pm(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

impl Calibration {
    pub fn from_unitary(u: &CMatrix) -> Self {
        let d = COMPUTATIONAL.map(|k| u[(k, k)]);
        let ph = d.map(|z| z.arg());
        Calibration {
            phase_q1: wrap_pm(ph[2] - ph[0]),
            phase_q2: wrap_pm(ph[1] - ph[0]),
            conditional_phase: wrap_pm(ph[3] - ph[2] - ph[1] + ph[0]),
            survival: d.map(|z| z.norm_sqr()),
        }
    }

    /// `diag(1, e^{ib}, e^{ia}, e^{i(a + b + γ)})` on the computational states.
    pub fn reference(&self, gamma_g: f64) -> CMatrix {
        let z = |x: f64| C64::from_polar(1.0, x);
        let frame = CMatrix::from_diagonal(&CVector::from_column_slice(&[
            z(0.0),
            z(self.phase_q2),
            z(self.phase_q1),
            z(self.phase_q1 + self.phase_q2),
        ]));
        frame * cphase_operator(gamma_g)
    }
}

/// Computational-subspace block of a 9×9 matrix.
pub fn computational_block(u: &CMatrix) -> CMatrix {
    CMatrix::from_fn(4, 4, |r, c| u[(COMPUTATIONAL[r], COMPUTATIONAL[c])])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoQubitOptions {
    pub steps: usize,
    pub series_points: usize,
}

impl Default for TwoQubitOptions {
    fn default() -> Self {
        TwoQubitOptions {
            steps: crate::dynamics::DEFAULT_STEPS,
            series_points: crate::transmon::SERIES_POINTS,
        }
    }
}

/// `(|01⟩ + |11⟩)/√2` in computational coordinates.
pub fn reference_input() -> CVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_column_slice(&[C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)])
}

#[derive(Debug, Clone)]
pub struct TwoQubitReport {
    pub params: TwoQubitParams,
    pub schedule: CphaseSchedule,
    pub calibration: Calibration,
    /// Closed-system gate distance to the calibrated reference (computational block).
    pub gate_distance: f64,
    /// State fidelity of [`reference_input`].
    pub state_fidelity: f64,
    pub f2_tensor: f64,
    pub f2_interior: f64,
    times: Vec<f64>,
    snapshots: Vec<Channel>,
}

impl TwoQubitReport {
    pub fn final_channel(&self) -> &Channel {
        self.snapshots.last().expect("final snapshot")
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Populations of all nine levels and the state fidelity against the
    /// ideal effective-model evolution along the gate. The calibrated
    /// single-qubit frame phases are taken to accrue uniformly in time.
    pub fn series(&self, psi0: &CVector) -> Result<Vec<(f64, Vec<f64>, f64)>> {
        let eff = EffectiveHamiltonian {
            params: self.params,
            schedule: self.schedule,
        };
        let tau = self.schedule.tau();
        let steps_per = 200;
        let mut out = Vec::with_capacity(self.times.len());
        let mut u_eff = CMatrix::identity(2, 2);
        let mut last = 0.0;
        for (&t, ch) in self.times.iter().zip(&self.snapshots) {
            if t > last {
                u_eff = crate::dynamics::propagator_between(&eff, last, t, steps_per)? * u_eff;
                last = t;
            }
            let rho = ch.apply(psi0)?;
            let pops: Vec<f64> = (0..9).map(|k| rho[(k, k)].re).collect();
            // ideal: |00⟩, |01⟩, |10⟩ carry frame phases; |11⟩ follows the sideband
            let s = t / tau;
            let z = |x: f64| C64::from_polar(1.0, x * s);
            let mut ideal = CVector::zeros(9);
            ideal[level(0, 0)] = psi0[0];
            ideal[level(0, 1)] = psi0[1] * z(self.calibration.phase_q2);
            ideal[level(1, 0)] = psi0[2] * z(self.calibration.phase_q1);
            let side = effective_to_interaction(&self.params, t, &(&u_eff * CVector::from_column_slice(&[C64::new(0.0, 0.0), psi0[3]])));
            let frame = z(self.calibration.phase_q1 + self.calibration.phase_q2);
            ideal[level(0, 2)] = side[0] * frame;
            ideal[level(1, 1)] = side[1] * frame;
            out.push((t, pops, state_fidelity(&ideal, &rho)?));
        }
        Ok(out)
    }

    /// `t, p00 … p22, fs`.
    pub fn write_series_csv<W: Write>(&self, out: W, psi0: &CVector) -> Result<()> {
        let mut w = csv_writer(out);
        let mut header = vec!["t".to_string()];
        for a in 0..3 {
            for b in 0..3 {
                header.push(format!("p{a}{b}"));
            }
        }
        header.push("fs".into());
        w.write_record(&header)?;
        for (t, pops, f) in self.series(psi0)? {
            let mut row = vec![t];
            row.extend(pops);
            row.push(f);
            w.write_record(fmt_row(&row))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Closed-system gate and its single-qubit frame calibration.
pub fn calibrate(p: &TwoQubitParams, s: &CphaseSchedule, steps: usize) -> Result<(CMatrix, Calibration)> {
    let h = InteractionHamiltonian {
        params: *p,
        schedule: *s,
    };
    let u = propagator(&h, s.tau(), steps)?;
    let cal = Calibration::from_unitary(&u);
    Ok((u, cal))
}

/// Full open-system simulation of the controlled-phase gate.
pub fn simulate_two_qubit(p: &TwoQubitParams, s: &CphaseSchedule, opts: &TwoQubitOptions) -> Result<TwoQubitReport> {
    p.validate()?;
    let (u, calibration) = calibrate(p, s, opts.steps)?;
    let reference = calibration.reference(s.gamma_g);
    let gate_distance = crate::gates::gate_distance_up_to_phase(&computational_block(&u), &reference)?;

    let h = InteractionHamiltonian {
        params: *p,
        schedule: *s,
    };
    let model = LindbladModel::new(&h, two_qubit_collapses(p)?)?;
    let tau = s.tau();
    let times = if opts.series_points >= 2 {
        linspace(0.0, tau, opts.series_points)
    } else {
        vec![tau]
    };
    let snaps = evolve_basis_operators(&model, &COMPUTATIONAL, tau, &times, opts.steps)?;
    let mut snapshots = snaps
        .into_iter()
        .map(|images| Channel::new(COMPUTATIONAL.to_vec(), images))
        .collect::<Result<Vec<_>>>()?;
    snapshots.pop();
    let ch = snapshots.last().expect("final snapshot");

    let psi = reference_input();
    let state_fid = state_fidelity(&embed(&(&reference * &psi), &COMPUTATIONAL, 9), &ch.apply(&psi)?)?;
    let f2_tensor = gate_fidelity_f2(&reference, &COMPUTATIONAL, F2Lattice::Tensor, |x| ch.apply(x))?;
    let f2_interior = gate_fidelity_f2(&reference, &COMPUTATIONAL, F2Lattice::Interior, |x| ch.apply(x))?;
    Ok(TwoQubitReport {
        params: *p,
        schedule: *s,
        calibration,
        gate_distance,
        state_fidelity: state_fid,
        f2_tensor,
        f2_interior,
        times,
        snapshots,
    })
}

/// Closed-system populations of `|02⟩` and `|11⟩` from `|11⟩`, full model
/// against the effective two-level model.
#[derive(Debug, Clone, Serialize)]
pub struct EffectiveComparison {
    pub times: Vec<f64>,
    pub full: Vec<[f64; 2]>,
    pub effective: Vec<[f64; 2]>,
}

impl EffectiveComparison {
    pub fn max_deviation(&self) -> f64 {
        self.full
            .iter()
            .zip(&self.effective)
            .flat_map(|(a, b)| [(a[0] - b[0]).abs(), (a[1] - b[1]).abs()])
            .fold(0.0, f64::max)
    }

    /// `t, full_p02, full_p11, eff_p02, eff_p11`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["t", "full_p02", "full_p11", "eff_p02", "eff_p11"])?;
        for ((t, a), b) in self.times.iter().zip(&self.full).zip(&self.effective) {
            w.write_record(fmt_row(&[*t, a[0], a[1], b[0], b[1]]))?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn compare_effective(p: &TwoQubitParams, s: &CphaseSchedule, points: usize, steps: usize) -> Result<EffectiveComparison> {
    p.validate()?;
    let tau = s.tau();
    let times = linspace(0.0, tau, points.max(2));
    let full_h = InteractionHamiltonian {
        params: *p,
        schedule: *s,
    };
    let eff_h = EffectiveHamiltonian {
        params: *p,
        schedule: *s,
    };
    let uf = crate::dynamics::propagator_snapshots(&full_h, tau, &times, steps)?;
    let ue = crate::dynamics::propagator_snapshots(&eff_h, tau, &times, steps)?;
    let (i02, i11) = (level(0, 2), level(1, 1));
    let full = uf[..times.len()]
        .iter()
        .map(|u| [u[(i02, i11)].norm_sqr(), u[(i11, i11)].norm_sqr()])
        .collect();
    let effective = ue[..times.len()]
        .iter()
        .map(|u| [u[(0, 1)].norm_sqr(), u[(1, 1)].norm_sqr()])
        .collect();
    Ok(EffectiveComparison { times, full, effective })
}
