//! Spatial comparison: CHSH between two qubits of a register, and the sum of
//! the maximal CHSH values of the (1,2) and (2,3) pairs of a three-qubit state.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bell::SettingsQuad;
use crate::error::{Error, Result};
use crate::exec::{Execution, Sharding};
use crate::qcore::eigen::symmetric_eigenvalues;
use crate::qcore::{haar_random_pure, partial_trace, pauli, tensor, QuantumState};

/// Upper bound on max CHSH(ρ₁₂) + max CHSH(ρ₂₃) for any three-qubit state.
pub const SPATIAL_SUM_BOUND: f64 = 4.0;
pub const SUM_TOLERANCE: f64 = 1e-9;

/// tᵢⱼ = Tr(ρ σᵢ⊗σⱼ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix(pub [[f64; 3]; 3]);

impl CorrelationMatrix {
    /// Singular values, descending.
    pub fn singular_values(&self) -> [f64; 3] {
        let t = &self.0;
        let tt: Vec<Vec<f64>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| (0..3).map(|k| t[k][i] * t[k][j]).sum())
                    .collect()
            })
            .collect();
        let eig = symmetric_eigenvalues(tt);
        [eig[2], eig[1], eig[0]].map(|e| e.max(0.0).sqrt())
    }

    /// E(a, b) = aᵀ t b.
    pub fn correlation(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        (0..3)
            .map(|i| a[i] * (0..3).map(|j| self.0[i][j] * b[j]).sum::<f64>())
            .sum()
    }

    /// CHSH value with a₁, a₂ on the first qubit and b₁, b₂ on the second.
    pub fn chsh(&self, q: &SettingsQuad) -> f64 {
        let e = |a: &crate::BlochVector, b: &crate::BlochVector| {
            self.correlation(&a.as_array(), &b.as_array())
        };
        (e(&q.a1, &q.b1) + e(&q.a1, &q.b2) + e(&q.a2, &q.b1) - e(&q.a2, &q.b2)).abs()
    }
}

fn require_qubits(rho: &QuantumState, n: usize) -> Result<()> {
    if rho.nqubits() == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "expected a {n}-qubit state, got {} qubits",
            rho.nqubits()
        )))
    }
}

pub fn correlation_matrix(rho: &QuantumState) -> Result<CorrelationMatrix> {
    require_qubits(rho, 2)?;
    let s = pauli();
    let mut t = [[0.0; 3]; 3];
    for (i, si) in s.iter().enumerate() {
        for (j, sj) in s.iter().enumerate() {
            t[i][j] = rho.expectation(&tensor(si, sj)?);
        }
    }
    Ok(CorrelationMatrix(t))
}

/// Maximal CHSH value of a two-qubit state, 2√(s₁² + s₂²) with s₁ ≥ s₂ the two
/// largest singular values of its correlation matrix.
pub fn max_chsh(rho: &QuantumState) -> Result<f64> {
    let [s1, s2, _] = correlation_matrix(rho)?.singular_values();
    Ok(2.0 * (s1 * s1 + s2 * s2).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumBoundReport {
    pub state: QuantumState,
    pub b12: f64,
    pub b23: f64,
    pub sum: f64,
}

/// Maximal CHSH values of ρ₁₂ and ρ₂₃ and their sum.
pub fn scarani_gisin_check(state: &QuantumState) -> Result<SumBoundReport> {
    require_qubits(state, 3)?;
    let b12 = max_chsh(&partial_trace(state, &[0, 1])?)?;
    let b23 = max_chsh(&partial_trace(state, &[1, 2])?)?;
    Ok(SumBoundReport {
        state: state.clone(),
        b12,
        b23,
        sum: b12 + b23,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub samples: usize,
    pub max_sum: f64,
    pub worst: SumBoundReport,
}

/// Evaluates [`scarani_gisin_check`] on `samples` Haar-random pure states and
/// keeps the largest sum. A sum above 4 + [`SUM_TOLERANCE`] is an error.
pub fn sum_bound_sweep(samples: usize, sharding: Sharding, exec: Execution) -> Result<SweepResult> {
    if samples == 0 {
        return Err(Error::ZeroTrials);
    }
    let shards = sharding.run(
        samples,
        exec,
        |_, n, rng| -> Result<Option<SumBoundReport>> {
            let mut best: Option<SumBoundReport> = None;
            for _ in 0..n {
                let r = scarani_gisin_check(&haar_random_pure(3, rng)?)?;
                if best.as_ref().is_none_or(|b| r.sum > b.sum) {
                    best = Some(r);
                }
            }
            Ok(best)
        },
    );
    let mut worst: Option<SumBoundReport> = None;
    for shard in shards {
        if let Some(r) = shard? {
            if worst.as_ref().is_none_or(|b| r.sum > b.sum) {
                worst = Some(r);
            }
        }
    }
    let worst = worst.expect("samples >= 1");
    if worst.sum > SPATIAL_SUM_BOUND + SUM_TOLERANCE {
        return Err(Error::BoundViolation {
            quantity: "max CHSH(1,2) + max CHSH(2,3)",
            value: worst.sum,
            bound: SPATIAL_SUM_BOUND,
        });
    }
    Ok(SweepResult {
        samples,
        max_sum: worst.sum,
        worst,
    })
}

/// Random full-rank two-qubit state: the (1,2) marginal of a Haar-random
/// three-qubit pure state.
pub fn random_two_qubit_state<R: Rng + ?Sized>(rng: &mut R) -> QuantumState {
    let psi = haar_random_pure(3, rng).expect("3 qubits");
    partial_trace(&psi, &[0, 1]).expect("valid indices")
}
