//! Pure dephasing and amplitude damping of an idle qubit against the
//! analytic decay laws e^{−4κ₂t} and e^{−2κ₁t}.

use geogate::dynamics::{propagate_lindblad, Collapse, DensityMatrix, FnHamiltonian, LindbladModel};
use geogate::{CMatrix, CVector, C64};

fn main() -> geogate::Result<()> {
    let kappa = 0.05;
    let t = 1.0 / kappa;
    let idle = FnHamiltonian::new(2, |_| CMatrix::zeros(2, 2));
    let z = CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]);
    let mut lower = CMatrix::zeros(2, 2);
    lower[(0, 1)] = C64::new(1.0, 0.0);

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityMatrix::from_pure(&CVector::from_column_slice(&[C64::new(h, 0.0), C64::new(h, 0.0)]))?;
    let m = LindbladModel::new(&idle, vec![Collapse::new(z, kappa)?])?;
    let rho = propagate_lindblad(&m, &plus, t, 2000)?;
    let want = 0.5 * (-4.0 * kappa * t).exp();
    println!("coherence {:.10} vs {:.10}", rho.matrix()[(0, 1)].re, want);

    let excited = DensityMatrix::from_pure(&CVector::from_column_slice(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]))?;
    let m = LindbladModel::new(&idle, vec![Collapse::new(lower, kappa)?])?;
    let rho = propagate_lindblad(&m, &excited, t, 2000)?;
    println!("excited population {:.10} vs {:.10}", rho.population(1), (-2.0 * kappa * t).exp());
    Ok(())
}
