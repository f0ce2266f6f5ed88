use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Serialize, Serializer};

use super::bloch::{MixedBloch, Outcome};
use super::eigen::hermitian_eigenvalues;
use super::matrix::{identity2, pauli, ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
pub const POSITIVITY_TOLERANCE: f64 = 1e-9;

/// Density matrix of a 1–3 qubit register.
///
/// Construction validates unit trace, Hermiticity and positive
/// semidefiniteness, so every `QuantumState` in circulation is physical.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    matrix: ComplexMatrix,
}

impl QuantumState {
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let herm = matrix.hermiticity_defect();
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {herm:e})"
            )));
        }
        let min_eig = hermitian_eigenvalues(&matrix)[0];
        if min_eig < -POSITIVITY_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Skips validation for matrices that are physical by construction.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        debug_assert!(Self::from_matrix(matrix.clone()).is_ok());
        Self { matrix }
    }

    /// |ψ⟩⟨ψ| for a normalized amplitude vector of length 2, 4 or 8.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "amplitude vector has squared norm {norm}"
            )));
        }
        Self::from_matrix(ComplexMatrix::outer(amplitudes)?)
    }

    /// Computational-basis product state; `bits[0]` is the first qubit.
    pub fn basis(bits: &[bool]) -> Result<Self> {
        let dim = 1usize << bits.len();
        let index = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
        let mut psi = vec![ZERO; dim];
        psi[index] = C64::new(1.0, 0.0);
        Self::pure(&psi)
    }

    /// 𝕀/d.
    pub fn maximally_mixed(nqubits: usize) -> Result<Self> {
        let dim = 1usize << nqubits;
        let m = ComplexMatrix::identity(dim)?.scale_real(1.0 / dim as f64);
        Ok(Self { matrix: m })
    }

    /// Two-qubit singlet (|01⟩ − |10⟩)/√2.
    pub fn singlet() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [ZERO, C64::new(h, 0.0), C64::new(-h, 0.0), ZERO];
        Self::pure(&psi).expect("singlet is normalized")
    }

    /// Three-qubit GHZ state (|000⟩ + |111⟩)/√2.
    pub fn ghz() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut psi = [ZERO; 8];
        psi[0] = h;
        psi[7] = h;
        Self::pure(&psi).expect("GHZ is normalized")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn nqubits(&self) -> usize {
        self.matrix.nqubits()
    }

    /// Tr(ρ O), real part.
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        self.matrix.trace_product(op).re
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Bloch vector (Tr ρσx, Tr ρσy, Tr ρσz) of a single-qubit state.
    pub fn bloch_vector(&self) -> Result<MixedBloch> {
        if self.nqubits() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "Bloch vector needs 1 qubit, state has {}",
                self.nqubits()
            )));
        }
        let r = pauli().map(|s| self.expectation(&s));
        // round-off can push a pure state a hair outside the ball
        let norm = super::bloch::norm3(&r);
        let r = if norm > 1.0 { r.map(|c| c / norm) } else { r };
        MixedBloch::new(r)
    }

    /// Probability Tr(ρ P) of the outcome whose projector is `p`.
    pub fn probability(&self, p: &ComplexMatrix) -> f64 {
        self.expectation(p).clamp(0.0, 1.0)
    }

    /// U ρ U†.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = self.matrix.conjugate_by(u)?;
        Ok(Self { matrix: m })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.kron(&other.matrix)?,
        })
    }
}

impl Serialize for QuantumState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // rows of [re, im] pairs
        let n = self.dim();
        let rows: Vec<Vec<[f64; 2]>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let z = self.matrix.get(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }
}

/// ρ = ½(𝕀 + r·σ).
pub fn state_from_bloch(r: &MixedBloch) -> QuantumState {
    let [sx, sy, sz] = pauli();
    let [x, y, z] = r.as_array();
    let rs = &(&sx.scale_real(x) + &sy.scale_real(y)) + &sz.scale_real(z);
    QuantumState::from_matrix_unchecked((&identity2() + &rs).scale_real(0.5))
}

/// Post-measurement state: the rank-1 projector of the observed outcome.
pub fn collapsed(n: &super::BlochVector, k: Outcome) -> QuantumState {
    QuantumState::from_matrix_unchecked(super::projector(n, k))
}

/// Reduced state over the qubits in `keep` (0-based, in the given order).
///
/// Qubit 0 is the most significant tensor factor.
pub fn partial_trace(state: &QuantumState, keep: &[usize]) -> Result<QuantumState> {
    let n = state.nqubits();
    let bad = || Error::BadIndices {
        indices: keep.to_vec(),
        nqubits: n,
    };
    if keep.is_empty() || keep.iter().any(|&q| q >= n) {
        return Err(bad());
    }
    for (i, q) in keep.iter().enumerate() {
        if keep[..i].contains(q) {
            return Err(bad());
        }
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let out_dim = 1usize << k;
    let mut out = ComplexMatrix::zeros(out_dim)?;

    // full register index from kept and traced bit strings
    let compose = |kept_bits: usize, traced_bits: usize| {
        let mut idx = 0usize;
        for (pos, &q) in keep.iter().enumerate() {
            idx |= ((kept_bits >> (k - 1 - pos)) & 1) << (n - 1 - q);
        }
        for (pos, &q) in traced.iter().enumerate() {
            idx |= ((traced_bits >> (traced.len() - 1 - pos)) & 1) << (n - 1 - q);
        }
        idx
    };
    for i in 0..out_dim {
        for j in 0..out_dim {
            let mut acc = ZERO;
            for t in 0..(1usize << traced.len()) {
                acc += state.matrix.get(compose(i, t), compose(j, t));
            }
            out.set(i, j, acc);
        }
    }
    QuantumState::from_matrix(out)
}

/// Haar-random pure state: a normalized vector of i.i.d. complex Gaussians.
pub fn haar_random_pure<R: Rng + ?Sized>(nqubits: usize, rng: &mut R) -> Result<QuantumState> {
    if !(1..=3).contains(&nqubits) {
        return Err(Error::UnsupportedDimension(1 << nqubits.min(16)));
    }
    let dim = 1usize << nqubits;
    let mut psi: Vec<C64> = (0..dim)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut psi {
        *z /= norm;
    }
    Ok(QuantumState::from_matrix_unchecked(ComplexMatrix::outer(
        &psi,
    )?))
}

/// Random mixed qubit state: uniform direction, radius uniform in the ball.
pub fn random_mixed_qubit<R: Rng + ?Sized>(rng: &mut R) -> QuantumState {
    let dir = super::BlochVector::random(rng);
    let radius = rng.random::<f64>().cbrt();
    let r = MixedBloch::new(dir.as_array().map(|c| c * radius)).expect("radius <= 1");
    state_from_bloch(&r)
}
