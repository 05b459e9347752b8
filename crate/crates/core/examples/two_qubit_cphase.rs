//! Geometric controlled-phase gate on two coupled transmons.
//!
//!     cargo run --release --example two_qubit_cphase [out.csv]

use std::f64::consts::FRAC_PI_2;

use geogate::two_qubit::*;
use geogate::units::to_mhz;

fn main() -> geogate::Result<()> {
    let p = TwoQubitParams::default();
    println!(
        "|Ω₁₂| = 2π×{:.3} MHz, Δ' = 2π×{:.3} MHz",
        to_mhz(p.effective_amplitude()),
        to_mhz(p.delta_prime())
    );

    for frame in [CphaseFrame::Effective, CphaseFrame::Computational] {
        let s = design_cphase(&p, FRAC_PI_2, frame)?;
        let (_, cal) = calibrate(&p, &s, 20_000)?;
        println!(
            "{frame:?}: φ₋ = {:.4}π, τ = {:.4} µs, realised conditional phase {:.4}π",
            s.path.phi_span() / std::f64::consts::PI,
            s.tau(),
            cal.conditional_phase / std::f64::consts::PI
        );
    }

    let s = design_cphase(&p, FRAC_PI_2, CphaseFrame::Computational)?;
    let cmp = compare_effective(&p, &s, 201, 20_000)?;
    println!("full vs effective populations: max deviation {:.2e}", cmp.max_deviation());

    let r = simulate_two_qubit(&p, &s, &TwoQubitOptions::default())?;
    println!("survival |00⟩,|01⟩,|10⟩,|11⟩: {:?}", r.calibration.survival);
    println!("closed-system gate distance {:.4}", r.gate_distance);
    println!("state fidelity (|01⟩+|11⟩)/√2: {:.5}", r.state_fidelity);
    println!("F₂ tensor lattice {:.5}, interior lattice {:.5}", r.f2_tensor, r.f2_interior);

    if let Some(path) = std::env::args().nth(1) {
        r.write_series_csv(std::fs::File::create(&path)?, &reference_input())?;
        println!("series written to {path}");
    }
    Ok(())
}
