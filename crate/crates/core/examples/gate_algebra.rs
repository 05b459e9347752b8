//! Closed-form gates against numerically integrated controls, for both the
//! geometric construction and the dynamical baseline.

use geogate::control::{gate_controls, ControlHamiltonian, Scheme};
use geogate::dynamics::propagator;
use geogate::gates::{evolution_operator_simplified, gate_distance_up_to_phase, SingleQubitGate};
use geogate::CMatrix;

fn main() -> geogate::Result<()> {
    for g in SingleQubitGate::ALL {
        let (gb, xi, span) = g.params();
        let m = evolution_operator_simplified(gb, xi, span);
        let analytic = CMatrix::from_fn(2, 2, |r, c| m[(r, c)]);
        print!("{g}: closed form vs target {:.1e}", gate_distance_up_to_phase(&analytic, &g.target())?);
        for scheme in Scheme::ALL {
            let c = gate_controls(scheme, g, 1.0)?;
            let u = propagator(&ControlHamiltonian(&c), 1.0, 20_000)?;
            print!(", {} numeric {:.1e}", scheme.name(), gate_distance_up_to_phase(&u, &g.target())?);
        }
        println!();
    }
    Ok(())
}
