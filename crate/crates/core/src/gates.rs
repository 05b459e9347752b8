//! Analytic evolution operators, the named-gate table and phase-invariant
//! gate comparison.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::Matrix2;
use serde::Serialize;

use crate::path::PathParams;
use crate::{CMatrix, Error, Result, C64};

/// Single-qubit gates with a geometric realisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SingleQubitGate {
    H,
    T,
    S,
}

impl SingleQubitGate {
    pub const ALL: [SingleQubitGate; 3] = [SingleQubitGate::H, SingleQubitGate::T, SingleQubitGate::S];

    /// `(Γ, ξ, φ₋)`.
    pub fn params(self) -> (f64, f64, f64) {
        match self {
            SingleQubitGate::H => (PI / 4.0, 0.0, 3.0 * PI),
            SingleQubitGate::T => (0.0, 0.0, 9.0 * PI / 4.0),
            SingleQubitGate::S => (0.0, 0.0, 5.0 * PI / 2.0),
        }
    }

    /// Path realising the gate in time `tau`, starting at `φ₀ = 0`.
    pub fn path(self, tau: f64) -> Result<PathParams> {
        let (g, xi, span) = self.params();
        PathParams::new(g, xi, 0.0, span, tau)
    }

    /// Textbook matrix.
    pub fn target(self) -> CMatrix {
        match self {
            SingleQubitGate::H => hadamard(),
            SingleQubitGate::T => diag2(C64::new(1.0, 0.0), C64::from_polar(1.0, PI / 4.0)),
            SingleQubitGate::S => diag2(C64::new(1.0, 0.0), C64::i()),
        }
    }
}

impl fmt::Display for SingleQubitGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SingleQubitGate::H => "H",
            SingleQubitGate::T => "T",
            SingleQubitGate::S => "S",
        };
        f.write_str(s)
    }
}

impl FromStr for SingleQubitGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "H" | "h" => Ok(SingleQubitGate::H),
            "T" | "t" => Ok(SingleQubitGate::T),
            "S" | "s" => Ok(SingleQubitGate::S),
            other => Err(Error::UnknownGate(other.to_string())),
        }
    }
}

/// `(Γ, ξ, φ₋)` for a gate name.
pub fn params_for_gate(name: &str) -> Result<(f64, f64, f64)> {
    name.parse::<SingleQubitGate>().map(SingleQubitGate::params)
}

pub fn hadamard() -> CMatrix {
    let h = FRAC_1_SQRT_2;
    CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)],
    )
}

fn diag2(a: C64, b: C64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, C64::new(0.0, 0.0), C64::new(0.0, 0.0), b])
}

fn su2(u1: C64, u2: C64) -> Matrix2<C64> {
    Matrix2::new(u1, u2, -u2.conj(), u1.conj())
}

#[cfg(test)]
pub(crate) fn to_dyn(m: &Matrix2<C64>) -> CMatrix {
    CMatrix::from_iterator(2, 2, m.iter().copied())
}

/// `[[u₁, u₂], [−u₂*, u₁*]]` with
/// `u₁ = −cos(φ₋/2) + i cosΓ sin(φ₋/2)`, `u₂ = sinΓ sin(φ₋/2)(sinξ + i cosξ)`.
pub fn evolution_operator_simplified(gamma_big: f64, xi: f64, phi_span: f64) -> Matrix2<C64> {
    let (sh, ch) = (phi_span / 2.0).sin_cos();
    let u1 = C64::new(-ch, gamma_big.cos() * sh);
    let u2 = C64::new(xi.sin(), xi.cos()) * (gamma_big.sin() * sh);
    su2(u1, u2)
}

/// Endpoint data of a (not necessarily cyclic) path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathEndpoints {
    pub gamma_big: f64,
    pub xi: f64,
    pub theta0: f64,
    pub theta_tau: f64,
    pub phi0: f64,
    pub phi_tau: f64,
}

impl PathEndpoints {
    pub fn of(p: &PathParams) -> Self {
        PathEndpoints {
            gamma_big: p.gamma_big(),
            xi: p.xi(),
            theta0: p.theta(),
            theta_tau: p.theta(),
            phi0: p.phi0(),
            phi_tau: p.phi_tau(),
        }
    }
}

/// `U(τ) = e^{iγ}|ψ₁(τ)⟩⟨ψ₁(0)| + e^{−iγ}|ψ₂(τ)⟩⟨ψ₂(0)|` in expanded form.
///
/// The long-hand `u₁, u₂` expressions are written with the phase convention
/// `γ → −γ` relative to the projector sum; the argument is negated on entry so
/// that `gamma` is the phase actually accumulated by `|ψ₁⟩` under the
/// reverse-engineered Hamiltonian. The two conventions coincide at `γ = π`.
pub fn evolution_operator_endpoints(e: &PathEndpoints, gamma: f64) -> Matrix2<C64> {
    let g = -gamma;
    let pp = e.phi_tau + e.phi0;
    let (s0, c0) = (e.theta0 / 2.0).sin_cos();
    let (st, ct) = (e.theta_tau / 2.0).sin_cos();
    let sg = e.gamma_big.sin();
    let c2 = (e.gamma_big / 2.0).cos().powi(2);
    let s2 = (e.gamma_big / 2.0).sin().powi(2);
    let ex = |x: f64| C64::from_polar(1.0, x);
    let one = C64::new(1.0, 0.0);

    let u1 = ex(-0.5 * (pp + 2.0 * g)) * 0.5
        * ((-(ex(pp + 2.0 * g) - one) * (ct * sg) + ex(e.phi0 + 2.0 * g) * (2.0 * c2 * st) + ex(e.phi_tau) * (2.0 * st * s2))
            * s0
            + (ex(e.phi_tau + 2.0 * g) * (2.0 * ct * s2) + ex(e.phi0) * (2.0 * ct * c2) + (ex(pp) - ex(2.0 * g)) * (st * sg))
                * c0);
    let u2 = ex(-0.5 * (pp + 2.0 * (g + e.xi))) * 0.5
        * (-(ex(pp + 2.0 * g) * (2.0 * s0 * s2) + one * (2.0 * c2 * s0) - (ex(e.phi0) - ex(e.phi_tau + 2.0 * g)) * (c0 * sg))
            * ct
            + (ex(pp) * (2.0 * c0 * s2) + ex(2.0 * g) * (2.0 * c0 * c2) - (ex(e.phi_tau) - ex(e.phi0 + 2.0 * g)) * (s0 * sg))
                * st);
    su2(u1, u2)
}

/// General evolution operator for a scheduled path with accumulated phase
/// `gamma_tau`.
pub fn evolution_operator_general(p: &PathParams, gamma_tau: f64) -> Matrix2<C64> {
    evolution_operator_endpoints(&PathEndpoints::of(p), gamma_tau)
}

/// `min_φ ‖U − e^{iφ}V‖_F = √(2d − 2|tr(V†U)|)` for unitaries.
pub fn gate_distance_up_to_phase(u: &CMatrix, v: &CMatrix) -> Result<f64> {
    if u.shape() != v.shape() || u.nrows() != u.ncols() {
        return Err(Error::DimensionMismatch {
            expected: v.nrows() * v.ncols(),
            got: u.nrows() * u.ncols(),
        });
    }
    let d = u.nrows() as f64;
    let overlap: C64 = v.iter().zip(u.iter()).map(|(a, b)| a.conj() * b).sum();
    Ok((2.0 * d - 2.0 * overlap.norm()).max(0.0).sqrt())
}

/// `diag(1, 1, 1, e^{iγ'_g})` on `{|00⟩, |01⟩, |10⟩, |11⟩}`.
pub fn cphase_operator(gamma_g: f64) -> CMatrix {
    let mut m = CMatrix::identity(4, 4);
    m[(3, 3)] = C64::from_polar(1.0, gamma_g);
    m
}

/// Row-major matrix export: `row, col, re, im`.
pub fn write_matrix_csv<W: Write>(out: W, m: &CMatrix) -> Result<()> {
    let mut w = crate::output::csv_writer(out);
    w.write_record(["row", "col", "re", "im"])?;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            w.write_record([r.to_string(), c.to_string(), crate::output::fmt_f64(z.re), crate::output::fmt_f64(z.im)])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{synthesize_controls, ControlHamiltonian};
    use crate::dynamics::propagator;
    use crate::path::{aux_states_at, geometric_phase, phi_schedule};
    use proptest::prelude::*;

    /// Oracle: projector sum over the auxiliary states.
    fn projector_sum(e: &PathEndpoints, gamma: f64) -> Matrix2<C64> {
        let (a1, a2) = aux_states_at(e.gamma_big, e.xi, e.theta0, e.phi0);
        let (b1, b2) = aux_states_at(e.gamma_big, e.xi, e.theta_tau, e.phi_tau);
        b1 * a1.adjoint() * C64::from_polar(1.0, gamma) + b2 * a2.adjoint() * C64::from_polar(1.0, -gamma)
    }

    #[test]
    fn table() {
        assert_eq!(params_for_gate("H").unwrap(), (PI / 4.0, 0.0, 3.0 * PI));
        assert_eq!(params_for_gate("T").unwrap(), (0.0, 0.0, 9.0 * PI / 4.0));
        assert_eq!(params_for_gate("S").unwrap(), (0.0, 0.0, 5.0 * PI / 2.0));
        assert!(matches!(params_for_gate("X"), Err(Error::UnknownGate(_))));
    }

    #[test]
    fn simplified_examples() {
        let h = evolution_operator_simplified(PI / 4.0, 0.0, 3.0 * PI);
        let want = hadamard() * C64::new(0.0, -1.0);
        assert!((to_dyn(&h) - want).norm() < 1e-12);

        let t = evolution_operator_simplified(0.0, 0.0, 9.0 * PI / 4.0);
        assert!((t[(0, 0)] + C64::from_polar(1.0, -9.0 * PI / 8.0)).norm() < 1e-12);
        assert!((t[(1, 1)] + C64::from_polar(1.0, 9.0 * PI / 8.0)).norm() < 1e-12);
        assert!(t[(0, 1)].norm() < 1e-15);

        let id = evolution_operator_simplified(1.1, -0.4, 2.0 * PI);
        assert!((id - Matrix2::identity()).norm() < 1e-12);

        for g in SingleQubitGate::ALL {
            let (a, b, c) = g.params();
            let u = to_dyn(&evolution_operator_simplified(a, b, c));
            assert!(gate_distance_up_to_phase(&u, &g.target()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn general_trivial_and_reduction() {
        let e = PathEndpoints {
            gamma_big: 0.7,
            xi: 0.2,
            theta0: 1.1,
            theta_tau: 1.1,
            phi0: 0.5,
            phi_tau: 0.5,
        };
        assert!((evolution_operator_endpoints(&e, 0.0) - Matrix2::identity()).norm() < 1e-13);

        for g in SingleQubitGate::ALL {
            let p = g.path(1.0).unwrap();
            let (a, b, c) = g.params();
            let diff = evolution_operator_general(&p, PI) - evolution_operator_simplified(a, b, c);
            assert!(diff.norm() < 1e-12);
        }
    }

    #[test]
    fn expanded_form_matches_projector_sum() {
        let cases = [
            [0.3, 1.2, 0.4, 2.1, -0.5, 3.3, 0.9],
            [2.0, -0.7, 1.5, 0.2, 1.0, -2.0, 2.5],
            [5.1, 3.3, 2.9, 2.9, 4.4, 0.1, -1.3],
        ];
        for c in cases {
            let e = PathEndpoints {
                gamma_big: c[0],
                xi: c[1],
                theta0: c[2],
                theta_tau: c[3],
                phi0: c[4],
                phi_tau: c[5],
            };
            assert!((evolution_operator_endpoints(&e, c[6]) - projector_sum(&e, c[6])).norm() < 1e-12);
        }
    }

    /// The accumulated-phase convention is fixed by the dynamics: stop the
    /// H-gate evolution half way and compare with the geometric phase so far.
    #[test]
    fn partial_evolution_follows_dynamics() {
        let p = SingleQubitGate::H.path(1.0).unwrap();
        let c = synthesize_controls(&p).unwrap();
        let h = ControlHamiltonian(&c);
        for t in [0.3, 0.5, 0.8] {
            let u = propagator(&h, t, 8000).unwrap();
            let mut e = PathEndpoints::of(&p);
            e.phi_tau = phi_schedule(&p, t).unwrap();
            let want = to_dyn(&evolution_operator_endpoints(&e, geometric_phase(&p, t).unwrap()));
            assert!((u - want).norm() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn distance_examples() {
        let h = hadamard();
        assert!(gate_distance_up_to_phase(&h, &h).unwrap() < 1e-15);
        assert!(gate_distance_up_to_phase(&h, &(h.clone() * C64::new(0.0, -1.0))).unwrap() < 1e-7);
        let x = CMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(|v| C64::new(v, 0.0)));
        let d = gate_distance_up_to_phase(&CMatrix::identity(2, 2), &x).unwrap();
        assert!((d - 2.0).abs() < 1e-15);
        assert!(matches!(
            gate_distance_up_to_phase(&h, &cphase_operator(0.0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cphase_examples() {
        assert_eq!(cphase_operator(0.0), CMatrix::identity(4, 4));
        let q = cphase_operator(PI / 2.0);
        assert!((q[(3, 3)] - C64::i()).norm() < 1e-15);
        let cz = cphase_operator(PI);
        assert!((cz[(3, 3)] + 1.0).norm() < 1e-15);
        assert!((cz[(2, 2)] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn matrix_csv_layout() {
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &hadamard()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "row,col,re,im");
        assert_eq!(lines.len(), 5);
        let re: f64 = lines[4].split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(re, -std::f64::consts::FRAC_1_SQRT_2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn general_matches_simplified(g in -PI..PI, xi in -PI..PI, span in 2.0001f64..4.0, neg in prop::bool::ANY, phi0 in -3.0f64..3.0) {
            let span = if neg { -span * PI } else { span * PI };
            let p = PathParams::new(g, xi, phi0, span, 1.0).unwrap();
            let diff = evolution_operator_general(&p, PI) - evolution_operator_simplified(g, xi, span);
            prop_assert!(diff.norm() < 1e-10);
        }

        #[test]
        fn simplified_is_special_unitary(g in -10.0f64..10.0, xi in -10.0f64..10.0, span in -30.0f64..30.0) {
            let u = evolution_operator_simplified(g, xi, span);
            prop_assert!((u.determinant().norm() - 1.0).abs() < 1e-13);
            prop_assert!((u.adjoint() * u - Matrix2::identity()).norm() < 1e-13);
        }

        #[test]
        fn general_is_unitary(c in prop::array::uniform7(-7.0f64..7.0)) {
            let e = PathEndpoints { gamma_big: c[0], xi: c[1], theta0: c[2], theta_tau: c[3], phi0: c[4], phi_tau: c[5] };
            let u = evolution_operator_endpoints(&e, c[6]);
            prop_assert!((u.adjoint() * u - Matrix2::identity()).norm() < 1e-13);
        }

        #[test]
        fn endpoints_are_noncyclic(g in 0.1f64..3.0, xi in -3.0f64..3.0, span in 2.05f64..3.95) {
            let p = PathParams::new(g, xi, 0.0, span * PI, 1.0).unwrap();
            let (a, _) = aux_states_at(g, xi, p.theta(), p.phi0());
            let (b, _) = aux_states_at(g, xi, p.theta(), p.phi_tau());
            prop_assert!(a.dotc(&b).norm() < 1.0 - 1e-9);
        }

        #[test]
        fn distance_ignores_global_phase(g in -3.0f64..3.0, xi in -3.0f64..3.0, span in -12.0f64..12.0, phase in -7.0f64..7.0) {
            let u = to_dyn(&evolution_operator_simplified(g, xi, span));
            let v = u.clone() * C64::from_polar(1.0, phase);
            prop_assert!(gate_distance_up_to_phase(&u, &v).unwrap() < 1e-7);
        }
    }
}
