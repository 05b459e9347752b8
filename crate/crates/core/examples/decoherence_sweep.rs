//! F₁ of geometric and dynamical H/T gates as decoherence grows, with
//! κ₁ = κ₂ = κ·Ω̄/10⁴.

use geogate::control::Scheme;
use geogate::gates::SingleQubitGate;
use geogate::metrics::{sweep_decoherence, Axis};

fn main() -> geogate::Result<()> {
    let axis = Axis::new("kappa", 0.0, 10.0, 11)?;
    for g in [SingleQubitGate::H, SingleQubitGate::T] {
        let rows: Vec<_> = Scheme::ALL
            .iter()
            .map(|&s| sweep_decoherence(s, g, &axis, 20_000))
            .collect::<Result<_, _>>()?;
        println!("{g} gate      κ    npgqc      dg");
        for (i, k) in axis.values().iter().enumerate() {
            println!("        {k:6.1}  {:.6}  {:.6}", rows[0].values[i], rows[1].values[i]);
        }
    }
    Ok(())
}
