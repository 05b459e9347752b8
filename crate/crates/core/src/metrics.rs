//! State fidelity, initial-state-averaged gate fidelities and the
//! decoherence / systematic-error sweeps.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::Matrix2;
use rayon::prelude::*;
use serde::Serialize;

use crate::control::{gate_controls, inject_errors, two_level_matrix, ControlField, ErrorSetting, Scheme};
use crate::dynamics::qubit_channel;
use crate::gates::SingleQubitGate;
use crate::output::{csv_writer, fmt_f64, linspace};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Number of Θ samples in the single-qubit average.
pub const F1_POINTS: usize = 1001;
/// Side of the tensor lattice in the two-qubit average.
pub const F2_SIDE: usize = 101;
/// Fidelity threshold of the robustness statistic.
pub const ROBUST_THRESHOLD: f64 = 0.999;
/// Decoherence rates are quoted in units of `Ω̄ / KAPPA_UNIT`.
pub const KAPPA_UNIT: f64 = 1e4;

/// `⟨ψ|ρ|ψ⟩`.
pub fn state_fidelity(psi: &CVector, rho: &CMatrix) -> Result<f64> {
    if rho.nrows() != psi.len() || rho.ncols() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            got: rho.nrows(),
        });
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    Ok(psi.dotc(&(rho * psi)).re)
}

/// `n` equally spaced angles covering `[0, 2π]`, both ends included.
pub fn theta_grid(n: usize) -> Vec<f64> {
    linspace(0.0, 2.0 * PI, n)
}

fn real_qubit(theta: f64) -> CVector {
    let (s, c) = theta.sin_cos();
    CVector::from_column_slice(&[C64::new(c, 0.0), C64::new(s, 0.0)])
}

/// Two-qubit product state `(cosΘ₁, sinΘ₁) ⊗ (cosΘ₂, sinΘ₂)`.
pub fn product_state(t1: f64, t2: f64) -> CVector {
    real_qubit(t1).kronecker(&real_qubit(t2))
}

/// Zero-pads `v` into dimension `dim`, placing component `k` at level
/// `embedding[k]`.
pub fn embed(v: &CVector, embedding: &[usize], dim: usize) -> CVector {
    let mut out = CVector::zeros(dim);
    for (k, &level) in embedding.iter().enumerate() {
        out[level] = v[k];
    }
    out
}

/// Mean of `f` over initial states, with ideal outputs embedded into the
/// channel's space at `embedding`.
fn average_fidelity<C>(gate: &CMatrix, embedding: &[usize], inputs: &[CVector], channel: C) -> Result<f64>
where
    C: Fn(&CVector) -> Result<CMatrix> + Sync,
{
    if gate.nrows() != embedding.len() {
        return Err(Error::DimensionMismatch {
            expected: embedding.len(),
            got: gate.nrows(),
        });
    }
    let sum: f64 = inputs
        .par_iter()
        .map(|psi0| {
            let rho = channel(psi0)?;
            let ideal = embed(&(gate * psi0), embedding, rho.nrows());
            state_fidelity(&ideal, &rho)
        })
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum();
    Ok(sum / inputs.len() as f64)
}

/// `F₁`: mean state fidelity over `cosΘ|0⟩ + sinΘ|1⟩`, Θ on [`F1_POINTS`]
/// points. The channel's output space holds the qubit at levels 0 and 1.
pub fn gate_fidelity_f1<C>(gate: &CMatrix, channel: C) -> Result<f64>
where
    C: Fn(&CVector) -> Result<CMatrix> + Sync,
{
    gate_fidelity_f1_with(gate, F1_POINTS, channel)
}

pub fn gate_fidelity_f1_with<C>(gate: &CMatrix, points: usize, channel: C) -> Result<f64>
where
    C: Fn(&CVector) -> Result<CMatrix> + Sync,
{
    let inputs: Vec<_> = theta_grid(points).into_iter().map(real_qubit).collect();
    average_fidelity(gate, &[0, 1], &inputs, channel)
}

/// Sampling lattice for the two-qubit average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum F2Lattice {
    /// `101 × 101` tensor grid with both ends included on each axis.
    #[default]
    Tensor,
    /// `101 × 99` (second axis interior points only) plus the corners
    /// `(0, 0)` and `(2π, 2π)`: 10001 states.
    Interior,
}

impl F2Lattice {
    pub fn points(self) -> Vec<(f64, f64)> {
        let a = theta_grid(F2_SIDE);
        match self {
            F2Lattice::Tensor => a.iter().flat_map(|&x| a.iter().map(move |&y| (x, y))).collect(),
            F2Lattice::Interior => {
                let inner: Vec<f64> = (1..F2_SIDE - 1).map(|k| 2.0 * PI * k as f64 / (F2_SIDE - 1) as f64).collect();
                let mut pts: Vec<_> = a.iter().flat_map(|&x| inner.iter().map(move |&y| (x, y))).collect();
                pts.push((0.0, 0.0));
                pts.push((2.0 * PI, 2.0 * PI));
                pts
            }
        }
    }
}

/// `F₂`: mean state fidelity over real product states. `embedding` lists the
/// levels of `|00⟩, |01⟩, |10⟩, |11⟩` in the channel's output space.
pub fn gate_fidelity_f2<C>(gate: &CMatrix, embedding: &[usize], lattice: F2Lattice, channel: C) -> Result<f64>
where
    C: Fn(&CVector) -> Result<CMatrix> + Sync,
{
    let inputs: Vec<_> = lattice.points().into_iter().map(|(a, b)| product_state(a, b)).collect();
    average_fidelity(gate, embedding, &inputs, channel)
}

/// A linear map on operators, stored through the images `E(|e_i⟩⟨e_j|)` of
/// the basis operators of an embedded subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    embedding: Vec<usize>,
    images: Vec<CMatrix>,
}

impl Channel {
    /// `images[i * n + j] = E(|e_i⟩⟨e_j|)` with `n = embedding.len()`.
    pub fn new(embedding: Vec<usize>, images: Vec<CMatrix>) -> Result<Self> {
        let n = embedding.len();
        if images.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: images.len(),
            });
        }
        Ok(Channel { embedding, images })
    }

    /// Conjugation by a unitary on the whole space.
    pub fn unitary(u: &CMatrix, embedding: Vec<usize>) -> Self {
        let images = embedding
            .iter()
            .flat_map(|&i| embedding.iter().map(move |&j| (i, j)))
            .map(|(i, j)| u.column(i) * u.column(j).adjoint())
            .collect();
        Channel { embedding, images }
    }

    pub fn from_qubit_images(images: &[Matrix2<C64>; 4]) -> Self {
        let images = images
            .iter()
            .map(|m| CMatrix::from_iterator(2, 2, m.iter().copied()))
            .collect();
        Channel {
            embedding: vec![0, 1],
            images,
        }
    }

    pub fn embedding(&self) -> &[usize] {
        &self.embedding
    }

    pub fn images(&self) -> &[CMatrix] {
        &self.images
    }

    pub fn output_dim(&self) -> usize {
        self.images[0].nrows()
    }

    /// `E(|ψ⟩⟨ψ|)` for subspace amplitudes `ψ`.
    pub fn apply(&self, amps: &CVector) -> Result<CMatrix> {
        let n = self.embedding.len();
        if amps.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: amps.len() });
        }
        let d = self.output_dim();
        let mut out = CMatrix::zeros(d, d);
        for i in 0..n {
            for j in 0..n {
                let w = amps[i] * amps[j].conj();
                if w != C64::new(0.0, 0.0) {
                    out += &self.images[i * n + j] * w;
                }
            }
        }
        Ok(out)
    }

    /// Final operator images of an arbitrary operator given in subspace
    /// coordinates.
    pub fn apply_operator(&self, x: &CMatrix) -> CMatrix {
        let n = self.embedding.len();
        let d = self.output_dim();
        let mut out = CMatrix::zeros(d, d);
        for i in 0..n {
            for j in 0..n {
                out += &self.images[i * n + j] * x[(i, j)];
            }
        }
        out
    }
}

/// Two-level channel of a control field with `κ₁` decay and `κ₂` dephasing.
pub fn qubit_control_channel(c: &ControlField, kappa1: f64, kappa2: f64, steps: usize) -> Result<Channel> {
    let images = qubit_channel(
        |t, piece| two_level_matrix(c.sample_in(t, piece)),
        &c.breakpoints(),
        c.tau(),
        kappa1,
        kappa2,
        steps,
    )?;
    Ok(Channel::from_qubit_images(&images))
}

/// `F₁` through the precomputed channel.
pub fn channel_fidelity_f1(gate: &CMatrix, ch: &Channel) -> Result<f64> {
    gate_fidelity_f1(gate, |psi| ch.apply(psi))
}

/// One axis of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, min: f64, max: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::param("points", format!("an axis needs at least 2 points, got {points}")));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::param("axis", format!("need finite min < max, got [{min}, {max}]")));
        }
        Ok(Axis {
            name: name.into(),
            min,
            max,
            points,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.points)
    }
}

/// Fidelities on a rectangular grid, row-major with the first axis slowest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub axes: Vec<Axis>,
    pub values: Vec<f64>,
}

impl SweepGrid {
    pub fn get(&self, index: &[usize]) -> f64 {
        let mut flat = 0;
        for (ax, &i) in self.axes.iter().zip(index) {
            flat = flat * ax.points + i;
        }
        self.values[flat]
    }

    /// Fraction of grid points with fidelity at least `threshold`.
    pub fn fraction_at_least(&self, threshold: f64) -> f64 {
        let hits = self.values.iter().filter(|&&v| v >= threshold).count();
        hits as f64 / self.values.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Long format: one column per axis, then `value_name`.
    pub fn write_csv<W: Write>(&self, out: W, value_name: &str) -> Result<()> {
        let mut w = csv_writer(out);
        let mut header: Vec<&str> = self.axes.iter().map(|a| a.name.as_str()).collect();
        header.push(value_name);
        w.write_record(&header)?;
        let coords: Vec<Vec<f64>> = self.axes.iter().map(Axis::values).collect();
        let mut idx = vec![0usize; self.axes.len()];
        for &v in &self.values {
            let mut row: Vec<String> = idx.iter().zip(&coords).map(|(&i, c)| fmt_f64(c[i])).collect();
            row.push(fmt_f64(v));
            w.write_record(&row)?;
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < self.axes[k].points {
                    break;
                }
                idx[k] = 0;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// `F₁` of `gate` built by `scheme` under `κ₁ = κ₂ = kappa_units·Ω̄/10⁴` and the
/// given systematic errors. Gate duration is irrelevant once `κ` is tied
/// to `Ω̄`, so the unit duration is used.
pub fn single_qubit_f1(scheme: Scheme, gate: SingleQubitGate, kappa_units: f64, errors: ErrorSetting, steps: usize) -> Result<f64> {
    let base = gate_controls(scheme, gate, 1.0)?;
    let kappa = kappa_units * base.omega_bar() / KAPPA_UNIT;
    let c = inject_errors(&base, &errors);
    let ch = qubit_control_channel(&c, kappa, kappa, steps)?;
    channel_fidelity_f1(&gate.target(), &ch)
}

/// `F₁` against `κ₁ = κ₂ = κ` in units of `Ω̄/10⁴`.
pub fn sweep_decoherence(scheme: Scheme, gate: SingleQubitGate, kappa: &Axis, steps: usize) -> Result<SweepGrid> {
    let values = kappa
        .values()
        .into_par_iter()
        .map(|k| single_qubit_f1(scheme, gate, k, ErrorSetting::default(), steps))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepGrid {
        axes: vec![kappa.clone()],
        values,
    })
}

/// `F₁` over `(δ, ε)` at fixed `κ₁ = κ₂ = kappa_units·Ω̄/10⁴`.
pub fn sweep_systematic(
    scheme: Scheme,
    gate: SingleQubitGate,
    delta: &Axis,
    eps: &Axis,
    kappa_units: f64,
    steps: usize,
) -> Result<SweepGrid> {
    let d = delta.values();
    let e = eps.values();
    let jobs: Vec<(f64, f64)> = d.iter().flat_map(|&x| e.iter().map(move |&y| (x, y))).collect();
    let values = jobs
        .into_par_iter()
        .map(|(delta_frac, eps_frac)| {
            single_qubit_f1(scheme, gate, kappa_units, ErrorSetting { delta_frac, eps_frac }, steps)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepGrid {
        axes: vec![delta.clone(), eps.clone()],
        values,
    })
}
