//! Geometric H and T gates on a three-level transmon with and without the
//! leakage correction.
//!
//!     cargo run --release --example transmon_drag [H-series.csv]

use geogate::gates::SingleQubitGate;
use geogate::transmon::{qubit_state, simulate_single_qubit, DragMode, TransmonOptions, TransmonParams};
use geogate::units::mhz;

fn main() -> geogate::Result<()> {
    let cases = [
        (SingleQubitGate::H, 51.0, qubit_state(0.0)),
        (SingleQubitGate::T, 38.0, qubit_state(std::f64::consts::FRAC_PI_4)),
    ];
    for (g, om, psi) in &cases {
        let tp = TransmonParams::reference(mhz(*om));
        for drag in [DragMode::Off, DragMode::Corrected] {
            let opts = TransmonOptions { drag, ..Default::default() };
            let r = simulate_single_qubit(*g, &tp, &opts)?;
            println!(
                "{g} at Ω_M = 2π×{om} MHz, {drag:?}: τ = {:.4} µs, F₁ = {:.5}, state fidelity {:.5}, peak |2⟩ {:.2e}",
                r.tau,
                r.f1,
                r.state_fidelity(psi)?,
                r.peak_leakage(psi)?
            );
            if let (Some(path), SingleQubitGate::H, DragMode::Corrected) = (std::env::args().nth(1), g, drag) {
                r.write_state_csv(std::fs::File::create(&path)?, psi)?;
            }
        }
    }
    Ok(())
}
