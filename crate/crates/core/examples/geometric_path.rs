//! The moving frame behind the H gate: geometric phase along the path and
//! the vanishing dynamical phase for arbitrary superpositions.

use geogate::gates::SingleQubitGate;
use geogate::path::{aux_states, dynamical_phase, geometric_phase, SuperpositionLabel};

fn main() -> geogate::Result<()> {
    let p = SingleQubitGate::H.path(1.0)?;
    println!("θ = {:.6}, φ̇ = {:.6}", p.theta(), p.phi_rate()?);
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let (psi1, _) = aux_states(&p, t)?;
        println!(
            "t = {t:.2}  γ(t) = {:+.6}  |ψ₁⟩ = ({:.4}, {:.4})",
            geometric_phase(&p, t)?,
            psi1[0],
            psi1[1]
        );
    }
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let s = SuperpositionLabel {
                lambda_big: 0.3 * i as f64,
                zeta: 0.6 * j as f64,
            };
            worst = worst.max(dynamical_phase(&p, &s, 2000)?.abs());
        }
    }
    println!("max |γ_d| over a 10×10 grid of superpositions: {worst:.2e}");
    Ok(())
}
