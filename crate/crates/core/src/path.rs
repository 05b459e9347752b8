//! Auxiliary-state path parameterization.
//!
//! A path is described by two constant mixing angles `(Γ, ξ)` that fix the
//! moving basis `{|μ₁⟩, |μ₂⟩}`, and Bloch angles `(θ, φ(t))` of the auxiliary
//! states within that basis. Only the `θ̇ = 0` family is built here, with the
//! linear azimuthal schedule `φ(t) = 2πt/(τ cos θ) + φ₀` that cancels the
//! dynamical phase of every superposition of the two auxiliary states.

use std::f64::consts::PI;

use nalgebra::Vector2;

use crate::{Error, Result, C64};

/// A two-level state in the computational basis `{|0⟩, |1⟩}`.
pub type Qubit = Vector2<C64>;

/// Smallest `|cos θ|` accepted by the linear schedule.
pub const MIN_COS_THETA: f64 = 1e-9;

/// Path degrees of freedom for the `θ̇ = 0` scheme.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PathParams {
    gamma_big: f64,
    xi: f64,
    theta: f64,
    phi0: f64,
    phi_span: f64,
    tau: f64,
}

impl PathParams {
    /// Builds a path whose polar angle is fixed by the schedule,
    /// `θ = arccos(2π/φ₋)` on the principal branch.
    pub fn new(gamma_big: f64, xi: f64, phi0: f64, phi_span: f64, tau: f64) -> Result<Self> {
        for (name, v) in [
            ("gamma_big", gamma_big),
            ("xi", xi),
            ("phi0", phi0),
            ("phi_span", phi_span),
            ("tau", tau),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        if tau <= 0.0 {
            return Err(Error::param("tau", format!("must be positive, got {tau}")));
        }
        let cos_theta = 2.0 * PI / phi_span;
        if !(cos_theta.abs() <= 1.0) {
            return Err(Error::param(
                "phi_span",
                format!("|φ₋| = {} < 2π admits no real polar angle", phi_span.abs()),
            ));
        }
        Ok(PathParams {
            gamma_big,
            xi,
            theta: cos_theta.acos(),
            phi0,
            phi_span,
            tau,
        })
    }

    /// Like [`PathParams::new`] but also checks an explicitly supplied `θ`.
    pub fn with_theta(
        gamma_big: f64,
        xi: f64,
        theta: f64,
        phi0: f64,
        phi_span: f64,
        tau: f64,
    ) -> Result<Self> {
        let p = Self::new(gamma_big, xi, phi0, phi_span, tau)?;
        if (p.theta - theta).abs() > 1e-12 {
            return Err(Error::param(
                "theta",
                format!(
                    "θ = {theta} disagrees with arccos(2π/φ₋) = {} for φ₋ = {phi_span}",
                    p.theta
                ),
            ));
        }
        Ok(p)
    }

    /// Same path shape traversed in a different total time.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.gamma_big, self.xi, self.phi0, self.phi_span, tau)
    }

    pub fn gamma_big(&self) -> f64 {
        self.gamma_big
    }
    pub fn xi(&self) -> f64 {
        self.xi
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn phi0(&self) -> f64 {
        self.phi0
    }
    /// `φ₋ = φ_τ − φ₀`.
    pub fn phi_span(&self) -> f64 {
        self.phi_span
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn cos_theta(&self) -> f64 {
        2.0 * PI / self.phi_span
    }
    pub fn phi_tau(&self) -> f64 {
        self.phi0 + self.phi_span
    }
    /// `φ₊ = φ_τ + φ₀`.
    pub fn phi_sum(&self) -> f64 {
        self.phi_tau() + self.phi0
    }

    /// Constant azimuthal rate `φ̇ = 2π/(τ cos θ)`.
    pub fn phi_rate(&self) -> Result<f64> {
        let c = self.cos_theta();
        if c.abs() < MIN_COS_THETA {
            return Err(Error::DegenerateSchedule(c.abs()));
        }
        Ok(2.0 * PI / (self.tau * c))
    }
}

/// Superposition `e^{−iζ}cos(Λ/2)|Φ₁⟩ + sin(Λ/2)|Φ₂⟩` of the two evolution states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionLabel {
    pub lambda_big: f64,
    pub zeta: f64,
}

/// The constant basis `(|μ₁⟩, |μ₂⟩)` fixed by `(Γ, ξ)`.
pub fn mu_basis(gamma_big: f64, xi: f64) -> (Qubit, Qubit) {
    let (s, c) = (gamma_big / 2.0).sin_cos();
    let em = C64::from_polar(1.0, -xi / 2.0);
    let ep = C64::from_polar(1.0, xi / 2.0);
    (
        Qubit::new(em * c, ep * s),
        Qubit::new(em * s, -ep * c),
    )
}

/// Auxiliary states at arbitrary Bloch angles `(θ, φ)` in the `(Γ, ξ)` basis.
pub fn aux_states_at(gamma_big: f64, xi: f64, theta: f64, phi: f64) -> (Qubit, Qubit) {
    let (mu1, mu2) = mu_basis(gamma_big, xi);
    let (s, c) = (theta / 2.0).sin_cos();
    let em = C64::from_polar(1.0, -phi / 2.0);
    let ep = C64::from_polar(1.0, phi / 2.0);
    (
        mu1 * (em * c) + mu2 * (ep * s),
        mu1 * (em * s) - mu2 * (ep * c),
    )
}

/// Azimuth of the linear schedule at time `t`.
pub fn phi_schedule(p: &PathParams, t: f64) -> Result<f64> {
    Ok(p.phi_rate()? * t + p.phi0)
}

/// Auxiliary states `(|ψ₁(t)⟩, |ψ₂(t)⟩)` along the scheduled path.
pub fn aux_states(p: &PathParams, t: f64) -> Result<(Qubit, Qubit)> {
    let phi = phi_schedule(p, t)?;
    Ok(aux_states_at(p.gamma_big, p.xi, p.theta, phi))
}

/// Geometric phase `γ(t) = ½ cos θ (φ(t) − φ₀)`; equals π at `t = τ`.
pub fn geometric_phase(p: &PathParams, t: f64) -> Result<f64> {
    Ok(0.5 * p.cos_theta() * (phi_schedule(p, t)? - p.phi0))
}

/// Instantaneous angles along a general path.
#[derive(Debug, Clone, Copy)]
pub struct PathPoint {
    pub theta: f64,
    pub theta_dot: f64,
    pub phi: f64,
    pub phi_dot: f64,
}

/// A path `t ↦ (θ, φ)` on `[0, duration]`.
pub trait Trajectory {
    fn duration(&self) -> f64;
    fn point(&self, t: f64) -> PathPoint;
}

impl Trajectory for PathParams {
    fn duration(&self) -> f64 {
        self.tau
    }

    fn point(&self, t: f64) -> PathPoint {
        let phi_dot = 2.0 * PI / (self.tau * self.cos_theta());
        PathPoint {
            theta: self.theta,
            theta_dot: 0.0,
            phi: phi_dot * t + self.phi0,
            phi_dot,
        }
    }
}

/// Composite Simpson rule on `n` panels (rounded up to even).
pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * k as f64);
    }
    acc * h / 3.0
}

fn dynamical_integrand(s: &SuperpositionLabel, pt: &PathPoint, gamma: f64) -> f64 {
    let arg = s.zeta + 2.0 * gamma;
    0.5 * s.lambda_big.sin()
        * (arg.cos() * pt.phi_dot * pt.theta.sin() - arg.sin() * pt.theta_dot)
}

/// Dynamical phase `γ_d(τ)` of the superposition `s` along the scheduled path,
/// by composite Simpson quadrature with `quadrature_steps` panels.
pub fn dynamical_phase(p: &PathParams, s: &SuperpositionLabel, quadrature_steps: usize) -> Result<f64> {
    if quadrature_steps < 100 {
        return Err(Error::param(
            "quadrature_steps",
            format!("need at least 100 panels, got {quadrature_steps}"),
        ));
    }
    p.phi_rate()?;
    let f = |t: f64| {
        let pt = p.point(t);
        let gamma = 0.5 * p.cos_theta() * (pt.phi - p.phi0);
        dynamical_integrand(s, &pt, gamma)
    };
    Ok(simpson(f, 0.0, p.tau, quadrature_steps))
}

/// Dynamical phase along an arbitrary trajectory. The geometric phase
/// `γ(t) = ½∫φ̇ cos θ` is accumulated on the same grid with Simpson panels.
pub fn dynamical_phase_along(
    traj: &impl Trajectory,
    s: &SuperpositionLabel,
    quadrature_steps: usize,
) -> f64 {
    let n = (quadrature_steps.max(2) + 1) & !1;
    let tau = traj.duration();
    let h = tau / n as f64;
    let rate = |t: f64| {
        let pt = traj.point(t);
        0.5 * pt.phi_dot * pt.theta.cos()
    };
    // γ on grid nodes: Simpson over each node pair with a midpoint sample.
    let mut gamma = vec![0.0; n + 1];
    for k in 0..n {
        let (a, b) = (h * k as f64, h * (k + 1) as f64);
        gamma[k + 1] = gamma[k] + (b - a) / 6.0 * (rate(a) + 4.0 * rate(0.5 * (a + b)) + rate(b));
    }
    let mut acc = 0.0;
    for (k, g) in gamma.iter().enumerate() {
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * dynamical_integrand(s, &traj.point(h * k as f64), *g);
    }
    acc * h / 3.0
}
