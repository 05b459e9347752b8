//! Fidelity over detuning δ and amplitude error ε at κ = 2Ω̄/10⁴, and the
//! area fraction above 0.999. A coarse grid by default; pass the number of
//! points per axis to refine (41 reproduces the full figure).

use geogate::control::Scheme;
use geogate::gates::SingleQubitGate;
use geogate::metrics::{sweep_systematic, Axis, ROBUST_THRESHOLD};

fn main() -> geogate::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(11);
    let delta = Axis::new("delta", -0.1, 0.1, n)?;
    let eps = Axis::new("eps", -0.1, 0.1, n)?;
    for g in [SingleQubitGate::H, SingleQubitGate::T] {
        for s in Scheme::ALL {
            let grid = sweep_systematic(s, g, &delta, &eps, 2.0, 20_000)?;
            println!(
                "{g} {:<6} max F₁ {:.6}, area fraction ≥ {ROBUST_THRESHOLD}: {:.4}",
                s.name(),
                grid.max(),
                grid.fraction_at_least(ROBUST_THRESHOLD)
            );
        }
    }
    Ok(())
}
