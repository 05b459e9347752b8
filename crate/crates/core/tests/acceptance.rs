//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned.
//!
//! Tests share one lock so the wall-clock budgets are measured without the
//! other criteria competing for cores.

use std::f64::consts::FRAC_PI_4;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use geogate::control::{synthesize_controls, ControlHamiltonian, Scheme};
use geogate::dynamics::{propagate_lindblad, propagator, Collapse, DensityMatrix, FnHamiltonian, LindbladModel};
use geogate::gates::{evolution_operator_simplified, gate_distance_up_to_phase, SingleQubitGate};
use geogate::metrics::{sweep_decoherence, sweep_systematic, Axis, ROBUST_THRESHOLD};
use geogate::path::{dynamical_phase, SuperpositionLabel};
use geogate::runner::{run, Experiment, Settings};
use geogate::transmon::{qubit_state, simulate_single_qubit, DragMode, TransmonOptions, TransmonParams};
use geogate::two_qubit::{compare_effective, design_cphase, simulate_two_qubit, CphaseFrame, TwoQubitOptions, TwoQubitParams};
use geogate::units::mhz;
use geogate::{CMatrix, CVector, C64};

static SERIAL: Mutex<()> = Mutex::new(());

const STEPS: usize = 20_000;

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(id: u32, name: &str, pass: bool, elapsed: Duration, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} [{verdict}] {name} ({:.2} s): {detail}", elapsed.as_secs_f64());
    assert!(pass, "criterion {id} failed: {detail}");
}

#[test]
fn criterion_01_analytic_numeric_gate_equivalence() {
    let _g = serial();
    let mut pass = true;
    let mut detail = Vec::new();
    let mut total = Duration::ZERO;
    for g in SingleQubitGate::ALL {
        let start = Instant::now();
        let (gb, xi, span) = g.params();
        let c = synthesize_controls(&g.path(1.0).unwrap()).unwrap();
        let u = propagator(&ControlHamiltonian(&c), 1.0, STEPS).unwrap();
        let m = evolution_operator_simplified(gb, xi, span);
        let closed = CMatrix::from_fn(2, 2, |r, k| m[(r, k)]);
        let d = gate_distance_up_to_phase(&u, &closed).unwrap();
        let dt = start.elapsed();
        total += dt;
        pass &= d < 1e-6 && dt < Duration::from_secs(1);
        detail.push(format!("{g}: distance {d:.2e} in {:.3} s", dt.as_secs_f64()));
    }
    report(1, "analytic vs integrated gates (< 1e-6, < 1 s each)", pass, total, detail.join("; "));
}

#[test]
fn criterion_02_zero_dynamical_phase() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for g in SingleQubitGate::ALL {
        let p = g.path(1.0).unwrap();
        for _ in 0..100 {
            let s = SuperpositionLabel {
                lambda_big: rng.random_range(0.0..std::f64::consts::PI),
                zeta: rng.random_range(0.0..2.0 * std::f64::consts::PI),
            };
            worst = worst.max(dynamical_phase(&p, &s, 2000).unwrap().abs());
        }
    }
    let dt = start.elapsed();
    let pass = worst < 1e-8 && dt < Duration::from_secs(5);
    report(2, "zero dynamical phase (|γ_d| < 1e-8, < 5 s)", pass, dt, format!("max |γ_d| = {worst:.2e} over 300 superpositions"));
}

#[test]
fn criterion_03_lindblad_normalization() {
    let _g = serial();
    let start = Instant::now();
    let kappa = 0.37;
    let t = 1.0 / kappa;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let idle = FnHamiltonian::new(2, |_| CMatrix::zeros(2, 2));
    let z = CMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]);
    let lower = CMatrix::from_row_slice(2, 2, &[zero, one, zero, zero]);
    let h = std::f64::consts::FRAC_1_SQRT_2;

    let plus = DensityMatrix::from_pure(&CVector::from_column_slice(&[C64::new(h, 0.0), C64::new(h, 0.0)])).unwrap();
    let m = LindbladModel::new(&idle, vec![Collapse::new(z, kappa).unwrap()]).unwrap();
    let coh = propagate_lindblad(&m, &plus, t, 2000).unwrap().matrix()[(0, 1)].re;
    let want_coh = 0.5 * (-4.0 * kappa * t).exp();

    let excited = DensityMatrix::from_pure(&CVector::from_column_slice(&[zero, one])).unwrap();
    let m = LindbladModel::new(&idle, vec![Collapse::new(lower, kappa).unwrap()]).unwrap();
    let pop = propagate_lindblad(&m, &excited, t, 2000).unwrap().population(1);
    let want_pop = (-2.0 * kappa * t).exp();

    let e1 = (coh - want_coh).abs() / want_coh;
    let e2 = (pop - want_pop).abs() / want_pop;
    let dt = start.elapsed();
    let pass = e1 < 1e-6 && e2 < 1e-6 && dt < Duration::from_secs(1);
    report(
        3,
        "Lindblad decay laws at t = 1/κ (1e-6 relative, < 1 s)",
        pass,
        dt,
        format!("dephasing rel. error {e1:.2e}, amplitude rel. error {e2:.2e}"),
    );
}

#[test]
fn criterion_04_decoherence_sweep_properties() {
    let _g = serial();
    let start = Instant::now();
    let axis = Axis::new("kappa", 0.0, 10.0, 21).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    let mut t_curves = Vec::new();
    for g in [SingleQubitGate::H, SingleQubitGate::T] {
        for s in Scheme::ALL {
            let v = sweep_decoherence(s, g, &axis, STEPS).unwrap().values;
            let ideal = v[0] >= 1.0 - 1e-6;
            let monotone = v.windows(2).all(|w| w[1] <= w[0]);
            pass &= ideal && monotone;
            detail.push(format!("{g}/{}: F₁(0) = {:.9}, nonincreasing {monotone}", s.name(), v[0]));
            if g == SingleQubitGate::T {
                t_curves.push(v);
            }
        }
    }
    let t_ok = t_curves[0].iter().zip(&t_curves[1]).all(|(n, d)| n >= d);
    pass &= t_ok;
    detail.push(format!("T npgqc ≥ dg pointwise {t_ok}"));
    let dt = start.elapsed();
    pass &= dt < Duration::from_secs(300);
    report(4, "decoherence sweep properties (< 5 min)", pass, dt, detail.join("; "));
}

#[test]
fn criterion_05_robustness_area_fractions() {
    let _g = serial();
    let start = Instant::now();
    let delta = Axis::new("delta", -0.1, 0.1, 41).unwrap();
    let eps = Axis::new("eps", -0.1, 0.1, 41).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for g in [SingleQubitGate::H, SingleQubitGate::T] {
        let grids = Scheme::ALL.map(|s| sweep_systematic(s, g, &delta, &eps, 2.0, STEPS).unwrap());
        let frac = grids.each_ref().map(|m| m.fraction_at_least(ROBUST_THRESHOLD));
        pass &= frac[0] >= frac[1];
        let note = if frac == [0.0, 0.0] { " (both empty: holds vacuously)" } else { "" };
        detail.push(format!(
            "{g}: npgqc {:.4} vs dg {:.4}, max F₁ {:.5} / {:.5}{note}",
            frac[0],
            frac[1],
            grids[0].max(),
            grids[1].max()
        ));
    }
    let dt = start.elapsed();
    pass &= dt < Duration::from_secs(1800);
    report(5, "robustness area fraction F₁ ≥ 0.999, npgqc ≥ dg (< 30 min)", pass, dt, detail.join("; "));
}

#[test]
fn criterion_06_transmon_fidelities() {
    let _g = serial();
    let start = Instant::now();
    let opts = TransmonOptions::default();
    let h = simulate_single_qubit(SingleQubitGate::H, &TransmonParams::reference(mhz(51.0)), &opts).unwrap();
    let t = simulate_single_qubit(SingleQubitGate::T, &TransmonParams::reference(mhz(38.0)), &opts).unwrap();
    let fs_h = h.state_fidelity(&qubit_state(0.0)).unwrap();
    let fs_t = t.state_fidelity(&qubit_state(FRAC_PI_4)).unwrap();
    let dt = start.elapsed();
    let pass = (h.f1 - 0.9997).abs() <= 0.0003
        && t.f1 >= 0.9995
        && fs_h >= 0.9994
        && fs_t >= 0.9994
        && dt < Duration::from_secs(600);
    report(
        6,
        "transmon F₁(H) = 0.9997 ± 0.0003, F₁(T) ≥ 0.9995, state fidelities ≥ 0.9994 (< 10 min)",
        pass,
        dt,
        format!("F₁(H) = {:.5}, F₁(T) = {:.5}, Fs(H|0⟩) = {fs_h:.5}, Fs(T|+⟩) = {fs_t:.5}", h.f1, t.f1),
    );
}

#[test]
fn criterion_07_two_qubit_fidelities() {
    let _g = serial();
    let start = Instant::now();
    let p = TwoQubitParams::default();
    let s = design_cphase(&p, std::f64::consts::FRAC_PI_2, CphaseFrame::Computational).unwrap();
    let r = simulate_two_qubit(
        &p,
        &s,
        &TwoQubitOptions {
            steps: STEPS,
            series_points: 0,
        },
    )
    .unwrap();
    let f2 = r.f2_tensor;
    let dt = start.elapsed();
    let pass = (r.state_fidelity - 0.9980).abs() <= 0.0010 && f2 >= 0.9980 && dt < Duration::from_secs(1800);
    report(
        7,
        "two-qubit state fidelity 0.9980 ± 0.0010, F₂ ≥ 0.9980 (< 30 min)",
        pass,
        dt,
        format!(
            "Fs = {:.5}, F₂ = {f2:.5} (101×101 lattice; 10001-state lattice {:.5}), conditional phase {:.4}π",
            r.state_fidelity,
            r.f2_interior,
            r.calibration.conditional_phase / std::f64::consts::PI
        ),
    );
}

#[test]
fn criterion_08_effective_model_validity() {
    let _g = serial();
    let start = Instant::now();
    let p = TwoQubitParams::default().closed();
    let s = design_cphase(&p, std::f64::consts::FRAC_PI_2, CphaseFrame::Computational).unwrap();
    let dev = compare_effective(&p, &s, 501, STEPS).unwrap().max_deviation();
    let dt = start.elapsed();
    let pass = dev <= 2e-2 && dt < Duration::from_secs(60);
    report(8, "full vs effective populations within 2e-2 (< 1 min)", pass, dt, format!("max deviation {dev:.5}"));
}

#[test]
fn criterion_09_drag_reduces_leakage() {
    let _g = serial();
    let start = Instant::now();
    let psi = qubit_state(0.0);
    let mut pass = true;
    let mut detail = Vec::new();
    for om in [30.0, 40.0, 51.0] {
        let tp = TransmonParams::reference(mhz(om));
        let leak = [DragMode::Corrected, DragMode::Off].map(|drag| {
            let opts = TransmonOptions { drag, ..Default::default() };
            simulate_single_qubit(SingleQubitGate::H, &tp, &opts)
                .unwrap()
                .peak_leakage(&psi)
                .unwrap()
        });
        pass &= leak[0] < leak[1];
        detail.push(format!("{om} MHz: {:.3e} vs {:.3e}", leak[0], leak[1]));
    }
    let dt = start.elapsed();
    pass &= dt < Duration::from_secs(60);
    report(9, "peak |2⟩ population lower with correction (< 1 min)", pass, dt, detail.join("; "));
}

#[test]
fn criterion_10_determinism() {
    let _g = serial();
    let start = Instant::now();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let outputs: Vec<Vec<(String, Vec<u8>)>> = dirs
        .iter()
        .map(|d| {
            let s = Settings {
                experiment: Experiment::Fig2,
                out: d.path().to_path_buf(),
                ..Settings::default()
            };
            let summary = run(&s).unwrap();
            summary
                .files
                .iter()
                .map(|f| (f.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(f).unwrap()))
                .collect()
        })
        .collect();
    let pass = !outputs[0].is_empty() && outputs[0] == outputs[1];
    let names: Vec<&str> = outputs[0].iter().map(|(n, _)| n.as_str()).collect();
    report(10, "two fig2 runs give byte-identical CSVs", pass, start.elapsed(), format!("compared {names:?}"));
}
