//! Fixed-step RK4 propagation of pure states, propagators and density
//! matrices under time-dependent Hamiltonians.
//!
//! Time-dependent Hamiltonians may be piecewise: [`Hamiltonian::breakpoints`]
//! lists interior discontinuities and the integrator never steps across one.
//! Within the `k`-th piece every stage is evaluated with `piece = k`, so a
//! sampler can use the closed form of that piece at both of its endpoints.

use std::ops::{Add, Mul};

use nalgebra::{Matrix2, SymmetricEigen};
use rayon::prelude::*;

use crate::{CMatrix, CVector, Error, Result, C64};

pub const DEFAULT_STEPS: usize = 20_000;

/// Tolerated trace drift before a refinement error is raised.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

pub trait Hamiltonian: Sync {
    fn dim(&self) -> usize;
    /// `H(t)` using the closed form of piece `piece`.
    fn at(&self, t: f64, piece: usize) -> CMatrix;
    /// Sorted interior discontinuities.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Hamiltonian from a plain closure.
pub struct FnHamiltonian<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64) -> CMatrix + Sync> FnHamiltonian<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnHamiltonian { dim, f }
    }
}

impl<F: Fn(f64) -> CMatrix + Sync> Hamiltonian for FnHamiltonian<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn at(&self, t: f64, _piece: usize) -> CMatrix {
        (self.f)(t)
    }
}

/// One integration interval between breakpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Interval {
    pub a: f64,
    pub b: f64,
    pub piece: usize,
    pub steps: usize,
}

/// Splits `[t0, t1]` at `breakpoints` and at the extra `stops`, distributing
/// `steps` in proportion to length (at least one per interval).
pub(crate) fn intervals(breakpoints: &[f64], stops: &[f64], t0: f64, t1: f64, steps: usize) -> Vec<Interval> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .chain(stops)
        .copied()
        .filter(|&t| t > t0 && t < t1)
        .collect();
    cuts.push(t0);
    cuts.push(t1);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * t1.abs().max(1.0));
    let span = t1 - t0;
    cuts.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let mid = 0.5 * (a + b);
            let piece = breakpoints.iter().filter(|&&x| x <= mid).count();
            let n = ((steps as f64) * (b - a) / span).round().max(1.0) as usize;
            Interval { a, b, piece, steps: n }
        })
        .collect()
}

/// Classic RK4 on `[a, b]` in `n` steps; `f(t, y)` is the right-hand side.
pub(crate) fn rk4<S, F>(mut y: S, a: f64, b: f64, n: usize, f: F) -> S
where
    S: Clone + Add<Output = S> + Mul<C64, Output = S>,
    F: Fn(f64, &S) -> S,
{
    let h = (b - a) / n as f64;
    let hc = C64::new(h, 0.0);
    let half = C64::new(0.5 * h, 0.0);
    let sixth = C64::new(h / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    for k in 0..n {
        let t = a + h * k as f64;
        let tm = t + 0.5 * h;
        let te = if k + 1 == n { b } else { t + h };
        let k1 = f(t, &y);
        let k2 = f(tm, &(y.clone() + k1.clone() * half));
        let k3 = f(tm, &(y.clone() + k2.clone() * half));
        let k4 = f(te, &(y.clone() + k3.clone() * hc));
        y = y + (k1 + (k2 + k3) * two + k4) * sixth;
    }
    y
}

fn check_steps(steps: usize) -> Result<()> {
    if steps == 0 {
        return Err(Error::param("steps", "at least one integration step is required"));
    }
    Ok(())
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn minus_i() -> C64 {
    C64::new(0.0, -1.0)
}

/// `ψ(t1)` from `ψ(t0)` under `iψ̇ = Hψ`.
pub fn propagate_state_between(h: &dyn Hamiltonian, psi0: &CVector, t0: f64, t1: f64, steps: usize) -> Result<CVector> {
    check_steps(steps)?;
    if psi0.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: psi0.len(),
        });
    }
    let norm = psi0.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let mut psi = psi0.clone();
    for iv in intervals(&h.breakpoints(), &[], t0, t1, steps) {
        psi = rk4(psi, iv.a, iv.b, iv.steps, |t, y| h.at(t, iv.piece) * y * minus_i());
    }
    Ok(psi)
}

pub fn propagate_state(h: &dyn Hamiltonian, psi0: &CVector, tau: f64, steps: usize) -> Result<CVector> {
    propagate_state_between(h, psi0, 0.0, tau, steps)
}

/// Time-ordered propagator from `t0` to `t1`.
pub fn propagator_between(h: &dyn Hamiltonian, t0: f64, t1: f64, steps: usize) -> Result<CMatrix> {
    check_steps(steps)?;
    let d = h.dim();
    let mut u = CMatrix::identity(d, d);
    for iv in intervals(&h.breakpoints(), &[], t0, t1, steps) {
        u = rk4(u, iv.a, iv.b, iv.steps, |t, y| h.at(t, iv.piece) * y * minus_i());
    }
    Ok(u)
}

pub fn propagator(h: &dyn Hamiltonian, tau: f64, steps: usize) -> Result<CMatrix> {
    propagator_between(h, 0.0, tau, steps)
}

/// Propagators `U(t, 0)` at each time in `stops` (sorted, within `[0, tau]`),
/// followed by `U(tau, 0)`.
pub fn propagator_snapshots(h: &dyn Hamiltonian, tau: f64, stops: &[f64], steps: usize) -> Result<Vec<CMatrix>> {
    check_steps(steps)?;
    let d = h.dim();
    let mut u = CMatrix::identity(d, d);
    let mut out = Vec::with_capacity(stops.len() + 1);
    let mut next = 0;
    while next < stops.len() && stops[next] <= 0.0 {
        out.push(u.clone());
        next += 1;
    }
    for iv in intervals(&h.breakpoints(), stops, 0.0, tau, steps) {
        u = rk4(u, iv.a, iv.b, iv.steps, |t, y| h.at(t, iv.piece) * y * minus_i());
        while next < stops.len() && stops[next] <= iv.b + 1e-14 * iv.b.abs().max(1.0) {
            out.push(u.clone());
            next += 1;
        }
    }
    while out.len() < stops.len() {
        out.push(u.clone());
    }
    out.push(u);
    Ok(out)
}

/// A validated density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    /// Checks Hermiticity (1e-12), unit trace (1e-10) and positivity (−1e-9).
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidDensityMatrix(format!("not square: {:?}", m.shape())));
        }
        let herm = max_abs(&(&m - m.adjoint()));
        if herm > 1e-12 {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = m.trace();
        if (tr - 1.0).norm() > 1e-10 {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
        }
        let min = min_eigenvalue(&m);
        if min < -1e-9 {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix(m))
    }

    pub fn from_pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(DensityMatrix(psi * psi.adjoint()))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    /// Population `ρ_kk`.
    pub fn population(&self, k: usize) -> f64 {
        self.0[(k, k)].re
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(herm).eigenvalues.min()
}

/// Collapse operator `c` with rate `κ`, entering as `κ(2cρc† − c†cρ − ρc†c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Collapse {
    pub op: CMatrix,
    pub rate: f64,
}

impl Collapse {
    pub fn new(op: CMatrix, rate: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::param("rate", format!("must be nonnegative, got {rate}")));
        }
        if op.nrows() != op.ncols() {
            return Err(Error::DimensionMismatch {
                expected: op.nrows(),
                got: op.ncols(),
            });
        }
        Ok(Collapse { op, rate })
    }
}

/// Hamiltonian plus collapse channels.
pub struct LindbladModel<'h> {
    hamiltonian: &'h dyn Hamiltonian,
    collapses: Vec<Collapse>,
    // −i Σ κ c†c, added to −iH to form the non-Hermitian generator
    damping: CMatrix,
    // nonzero entries (row, col, √(2κ)·value) of each jump operator
    jumps: Vec<Vec<(usize, usize, C64)>>,
}

impl<'h> LindbladModel<'h> {
    pub fn new(hamiltonian: &'h dyn Hamiltonian, collapses: Vec<Collapse>) -> Result<Self> {
        let d = hamiltonian.dim();
        let mut damping = CMatrix::zeros(d, d);
        let mut jumps = Vec::new();
        for c in &collapses {
            if c.op.nrows() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: c.op.nrows(),
                });
            }
            if c.rate == 0.0 {
                continue;
            }
            damping += c.op.adjoint() * &c.op * C64::new(c.rate, 0.0);
            let s = (2.0 * c.rate).sqrt();
            let nz = (0..d)
                .flat_map(|r| (0..d).map(move |k| (r, k)))
                .filter_map(|(r, k)| {
                    let v = c.op[(r, k)];
                    (v != C64::new(0.0, 0.0)).then_some((r, k, v * s))
                })
                .collect();
            jumps.push(nz);
        }
        Ok(LindbladModel {
            hamiltonian,
            collapses,
            damping: damping * C64::new(0.0, -1.0),
            jumps,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn collapses(&self) -> &[Collapse] {
        &self.collapses
    }

    /// `−iH(t) − Σκc†c`.
    fn generator(&self, t: f64, piece: usize) -> CMatrix {
        (self.hamiltonian.at(t, piece) + &self.damping) * minus_i()
    }

    /// `ρ̇ = Gρ + ρG† + Σ 2κ cρc†` for any operator `ρ` (the map is linear).
    fn rhs(&self, g: &CMatrix, rho: &CMatrix) -> CMatrix {
        let mut out = g * rho;
        out += rho * g.adjoint();
        for jump in &self.jumps {
            for &(r, k, v) in jump {
                for &(r2, k2, v2) in jump {
                    out[(r, r2)] += v * rho[(k, k2)] * v2.conj();
                }
            }
        }
        out
    }

    /// Evolves an arbitrary operator, returning snapshots at every time in
    /// `stops` (which must lie in `[t0, t1]`; `t1` is always included last).
    pub fn evolve_operator(&self, rho0: &CMatrix, t0: f64, t1: f64, stops: &[f64], steps: usize) -> Result<Vec<CMatrix>> {
        check_steps(steps)?;
        let d = self.dim();
        if rho0.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: rho0.nrows(),
            });
        }
        let mut wanted: Vec<f64> = stops.to_vec();
        wanted.sort_by(f64::total_cmp);
        let mut out = Vec::with_capacity(wanted.len() + 1);
        let mut next = 0;
        let mut rho = rho0.clone();
        while next < wanted.len() && wanted[next] <= t0 {
            out.push(rho.clone());
            next += 1;
        }
        for iv in intervals(&self.hamiltonian.breakpoints(), &wanted, t0, t1, steps) {
            rho = rk4(rho, iv.a, iv.b, iv.steps, |t, y| self.rhs(&self.generator(t, iv.piece), y));
            while next < wanted.len() && wanted[next] <= iv.b + 1e-14 * iv.b.abs().max(1.0) {
                out.push(rho.clone());
                next += 1;
            }
        }
        while out.len() < wanted.len() {
            out.push(rho.clone());
        }
        out.push(rho);
        Ok(out)
    }
}

/// `ρ(τ)` under the master equation; fails if the trace drifts by more than
/// [`TRACE_DRIFT_LIMIT`].
pub fn propagate_lindblad(m: &LindbladModel, rho0: &DensityMatrix, tau: f64, steps: usize) -> Result<DensityMatrix> {
    let mut snaps = m.evolve_operator(rho0.matrix(), 0.0, tau, &[], steps)?;
    let rho = snaps.pop().expect("final state is always returned");
    let drift = (rho.trace() - rho0.matrix().trace()).norm();
    if !(drift <= TRACE_DRIFT_LIMIT) {
        return Err(Error::StepRefinement { steps, drift });
    }
    Ok(DensityMatrix(rho))
}

/// Images `E(|e_i⟩⟨e_j|)` of the basis operators of a subspace spanned by the
/// levels `embedding`, propagated in parallel. Entry `i * n + j` of each
/// snapshot vector holds the image of `|e_i⟩⟨e_j|`; snapshots follow
/// `stops` with the final time last.
pub fn evolve_basis_operators(
    m: &LindbladModel,
    embedding: &[usize],
    tau: f64,
    stops: &[f64],
    steps: usize,
) -> Result<Vec<Vec<CMatrix>>> {
    let d = m.dim();
    if let Some(&bad) = embedding.iter().find(|&&k| k >= d) {
        return Err(Error::DimensionMismatch { expected: d, got: bad + 1 });
    }
    let n = embedding.len();
    let per_op: Vec<Vec<CMatrix>> = (0..n * n)
        .into_par_iter()
        .map(|ij| {
            let mut e = CMatrix::zeros(d, d);
            e[(embedding[ij / n], embedding[ij % n])] = C64::new(1.0, 0.0);
            m.evolve_operator(&e, 0.0, tau, stops, steps)
        })
        .collect::<Result<_>>()?;
    for (ij, snaps) in per_op.iter().enumerate() {
        if ij / n == ij % n {
            let drift = (snaps.last().expect("nonempty").trace() - 1.0).norm();
            if !(drift <= TRACE_DRIFT_LIMIT) {
                return Err(Error::StepRefinement { steps, drift });
            }
        }
    }
    let snapshots = stops.len() + 1;
    Ok((0..snapshots)
        .map(|s| per_op.iter().map(|ops| ops[s].clone()).collect())
        .collect())
}

/// Two-level channel images `E(|i⟩⟨j|)` (row-major in `(i, j)`) under
/// `H(t)` with amplitude damping `c₋ = |0⟩⟨1|` at `kappa1` and dephasing
/// `c_z = |0⟩⟨0| − |1⟩⟨1|` at `kappa2`.
///
/// Stack-allocated fast path for the sweeps, which evaluate millions of
/// two-level steps; it solves the same equation as [`LindbladModel`].
pub fn qubit_channel<F>(
    h: F,
    breakpoints: &[f64],
    tau: f64,
    kappa1: f64,
    kappa2: f64,
    steps: usize,
) -> Result<[Matrix2<C64>; 4]>
where
    F: Fn(f64, usize) -> Matrix2<C64>,
{
    check_steps(steps)?;
    if !(kappa1 >= 0.0 && kappa2 >= 0.0) {
        return Err(Error::param("kappa", "decoherence rates must be nonnegative"));
    }
    // Σκc†c = diag(κ₂, κ₁ + κ₂)
    let damp = Matrix2::new(
        C64::new(kappa2, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(kappa1 + kappa2, 0.0),
    );
    let mi = minus_i();
    let rhs = |g: &Matrix2<C64>, r: &Matrix2<C64>| {
        let mut out = g * r + r * g.adjoint();
        out[(0, 0)] += r[(1, 1)] * (2.0 * kappa1);
        out += Matrix2::new(r[(0, 0)], -r[(0, 1)], -r[(1, 0)], r[(1, 1)]) * re(2.0 * kappa2);
        out
    };
    let mut states: [Matrix2<C64>; 4] = std::array::from_fn(|ij| {
        let mut e = Matrix2::zeros();
        e[(ij / 2, ij % 2)] = C64::new(1.0, 0.0);
        e
    });
    for iv in intervals(breakpoints, &[], 0.0, tau, steps) {
        let hstep = (iv.b - iv.a) / iv.steps as f64;
        for k in 0..iv.steps {
            let t = iv.a + hstep * k as f64;
            let te = if k + 1 == iv.steps { iv.b } else { t + hstep };
            // G = −i(H − iD) = −iH − D
            let g1 = (h(t, iv.piece) - damp * C64::i()) * mi;
            let g2 = (h(t + 0.5 * hstep, iv.piece) - damp * C64::i()) * mi;
            let g4 = (h(te, iv.piece) - damp * C64::i()) * mi;
            for y in states.iter_mut() {
                let k1 = rhs(&g1, y);
                let k2 = rhs(&g2, &(*y + k1 * re(0.5 * hstep)));
                let k3 = rhs(&g2, &(*y + k2 * re(0.5 * hstep)));
                let k4 = rhs(&g4, &(*y + k3 * re(hstep)));
                *y += (k1 + (k2 + k3) * re(2.0) + k4) * re(hstep / 6.0);
            }
        }
    }
    for ij in [0, 3] {
        let drift = (states[ij].trace() - 1.0).norm();
        if !(drift <= TRACE_DRIFT_LIMIT) {
            return Err(Error::StepRefinement { steps, drift });
        }
    }
    Ok(states)
}
