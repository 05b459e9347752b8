//! Reverse-engineered control fields for the H, T and S paths.
//!
//!     cargo run --release --example control_synthesis [out.csv]

use geogate::control::synthesize_controls;
use geogate::gates::SingleQubitGate;

fn main() -> geogate::Result<()> {
    for g in SingleQubitGate::ALL {
        let c = synthesize_controls(&g.path(1.0)?)?;
        let mid = c.sample(0.5);
        println!(
            "{g}: Ω̄ = {:.5}, max|Ω| = {:.5}, Δ(τ/2) = {:+.5}, Ω(τ/2) = {:.5}",
            c.omega_bar(),
            c.max_drive(),
            mid.delta,
            mid.omega
        );
    }
    if let Some(path) = std::env::args().nth(1) {
        let c = synthesize_controls(&SingleQubitGate::H.path(1.0)?)?;
        c.write_csv(std::fs::File::create(&path)?, 1001)?;
        println!("H controls written to {path}");
    }
    Ok(())
}
