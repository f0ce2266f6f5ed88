//! Quantum protocol for computing f(y, x₁, x₂) = y·(−1)^{x₁x₂} with one bit
//! of writable memory.
//!
//! The bit is loaded with y. At t₁ the qubit is measured along a₁ (x₁ = 0) or
//! a₂ (x₁ = 1) and the bit multiplied by the outcome s₁; at t₂ the same
//! happens with b₁/b₂ and s₂. The output is y·s₁·s₂.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bell::SettingsQuad;
use crate::error::{Error, Result};
use crate::exec::{Execution, Sharding};
use crate::lhv::target;
use crate::qcore::{BlochVector, QuantumState};
use crate::stats::Moments;
use crate::temporal::measure;

/// (2+√2)/4, the success probability at the temporal Tsirelson bound.
pub const QUANTUM_OPTIMUM: f64 = 0.853_553_390_593_273_8;
pub const CLASSICAL_OPTIMUM: f64 = 0.75;

#[derive(Debug, Clone, PartialEq)]
pub struct GameConfig {
    pub quad: SettingsQuad,
    pub initial: QuantumState,
    pub trials: usize,
    pub sharding: Sharding,
}

impl GameConfig {
    pub fn new(
        quad: SettingsQuad,
        initial: QuantumState,
        trials: usize,
        sharding: Sharding,
    ) -> Result<Self> {
        if trials == 0 {
            return Err(Error::ZeroTrials);
        }
        if initial.nqubits() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "game needs a 1-qubit state, got {} qubits",
                initial.nqubits()
            )));
        }
        Ok(Self {
            quad,
            initial,
            trials,
            sharding,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundOutcome {
    pub output: i8,
    pub s1: i8,
    pub s2: i8,
    pub success: bool,
}

/// One play of the protocol on fresh input (y, x₁, x₂).
pub fn play_round<R: Rng + ?Sized>(
    quad: &SettingsQuad,
    initial: &QuantumState,
    y: i8,
    x1: u8,
    x2: u8,
    rng: &mut R,
) -> RoundOutcome {
    let mut ram = y;
    let first: &BlochVector = if x1 == 0 { &quad.a1 } else { &quad.a2 };
    let (s1, state) = measure(initial, first, rng);
    ram *= s1.sign();
    let second: &BlochVector = if x2 == 0 { &quad.b1 } else { &quad.b2 };
    let (s2, _) = measure(&state, second, rng);
    ram *= s2.sign();
    RoundOutcome {
        output: ram,
        s1: s1.sign(),
        s2: s2.sign(),
        success: ram == target(y, x1, x2),
    }
}

/// ¼[P₁₁(s₁s₂=1) + P₁₂(s₁s₂=1) + P₂₁(s₁s₂=1) + P₂₂(s₁s₂=−1)] with
/// P(s₁s₂=±1) = (1 ± aᵢ·bⱼ)/2, i.e. ½ + (E₁₁+E₁₂+E₂₁−E₂₂)/8.
pub fn success_probability_analytic(quad: &SettingsQuad) -> f64 {
    let [e11, e12, e21, e22] = quad.dot_correlations();
    0.25 * ((1.0 + e11) / 2.0 + (1.0 + e12) / 2.0 + (1.0 + e21) / 2.0 + (1.0 - e22) / 2.0)
}

/// Per-input analytic success probabilities, indexed [x₁][x₂].
pub fn per_input_analytic(quad: &SettingsQuad) -> [[f64; 2]; 2] {
    let [e11, e12, e21, e22] = quad.dot_correlations();
    [
        [(1.0 + e11) / 2.0, (1.0 + e12) / 2.0],
        [(1.0 + e21) / 2.0, (1.0 - e22) / 2.0],
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub success_rate: f64,
    pub stderr: f64,
    pub trials: u64,
    /// Empirical success rate per input pair, indexed [x₁][x₂].
    pub per_input_rates: [[f64; 2]; 2],
    pub per_input_counts: [[u64; 2]; 2],
    pub analytic_rate: f64,
}

/// Plays `cfg.trials` rounds on uniformly random inputs.
pub fn run_game(cfg: &GameConfig, exec: Execution) -> GameResult {
    let shards = cfg.sharding.run(cfg.trials, exec, |_, n, rng| {
        let mut all = Moments::default();
        let mut per = [[Moments::default(); 2]; 2];
        for _ in 0..n {
            let y = if rng.random::<bool>() { 1 } else { -1 };
            let x1 = u8::from(rng.random::<bool>());
            let x2 = u8::from(rng.random::<bool>());
            let r = play_round(&cfg.quad, &cfg.initial, y, x1, x2, rng);
            let hit = f64::from(u8::from(r.success));
            all.push(hit);
            per[usize::from(x1)][usize::from(x2)].push(hit);
        }
        (all, per)
    });
    let mut all = Moments::default();
    let mut per = [[Moments::default(); 2]; 2];
    for (a, p) in &shards {
        all.merge(a);
        for i in 0..2 {
            for j in 0..2 {
                per[i][j].merge(&p[i][j]);
            }
        }
    }
    GameResult {
        success_rate: all.mean(),
        stderr: all.stderr(),
        trials: all.count,
        per_input_rates: per.map(|row| row.map(|m| m.mean())),
        per_input_counts: per.map(|row| row.map(|m| m.count)),
        analytic_rate: success_probability_analytic(&cfg.quad),
    }
}
