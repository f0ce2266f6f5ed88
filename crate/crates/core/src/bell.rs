//! Temporal CHSH expression: evaluation, optimal settings, and numerical
//! maximization over measurement directions.

use std::f64::consts::SQRT_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, shard_rng, Execution, Sharding};
use crate::qcore::{BlochVector, QuantumState};
use crate::temporal::{
    exact_pair_correlation, exact_three_time_correlation, sample_chain, MeasurementChain,
    SampleOptions,
};

/// Maximum of the CHSH expression over local-realistic strategies.
pub const CLASSICAL_BOUND: f64 = 2.0;
/// Quantum maximum 2√2 of the temporal CHSH expression.
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;
/// Two temporal segments at their quantum maximum: 4√2.
pub const TEMPORAL_SUM_BOUND: f64 = 4.0 * SQRT_2;

/// Agreement required between the analytic and projector routes of [`quantum_bell`].
pub const ROUTE_AGREEMENT: f64 = 1e-12;

/// Settings a₁, a₂ (first time) and b₁, b₂ (second time).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingsQuad {
    pub a1: BlochVector,
    pub a2: BlochVector,
    pub b1: BlochVector,
    pub b2: BlochVector,
}

impl SettingsQuad {
    pub fn new(a1: BlochVector, a2: BlochVector, b1: BlochVector, b2: BlochVector) -> Self {
        Self { a1, a2, b1, b2 }
    }

    /// All four settings equal to `n`.
    pub fn uniform(n: BlochVector) -> Self {
        Self::new(n, n, n, n)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::new(
            BlochVector::random(rng),
            BlochVector::random(rng),
            BlochVector::random(rng),
            BlochVector::random(rng),
        )
    }

    /// a₁ = (x̂+ẑ)/√2, a₂ = (x̂−ẑ)/√2, b₁ = x̂, b₂ = ẑ.
    pub fn optimal() -> Self {
        optimal_settings(&BlochVector::X, &BlochVector::Z).expect("x and z are orthogonal")
    }

    pub fn as_array(&self) -> [BlochVector; 4] {
        [self.a1, self.a2, self.b1, self.b2]
    }

    fn from_angles(p: &[f64; 8]) -> Self {
        let v = |i: usize| BlochVector::from_angles(p[2 * i], p[2 * i + 1]);
        Self::new(v(0), v(1), v(2), v(3))
    }

    fn angles(&self) -> [f64; 8] {
        let mut p = [0.0; 8];
        for (i, v) in self.as_array().iter().enumerate() {
            let (t, f) = v.angles();
            p[2 * i] = t;
            p[2 * i + 1] = f;
        }
        p
    }

    /// Quantum correlations E(aᵢ, bⱼ) = aᵢ·bⱼ as [E11, E12, E21, E22].
    pub fn dot_correlations(&self) -> [f64; 4] {
        [
            self.a1.dot(&self.b1),
            self.a1.dot(&self.b2),
            self.a2.dot(&self.b1),
            self.a2.dot(&self.b2),
        ]
    }

    /// Signed combination a₁·(b₁+b₂) + a₂·(b₁−b₂).
    pub fn signed_combination(&self) -> f64 {
        let [e11, e12, e21, e22] = self.dot_correlations();
        e11 + e12 + e21 - e22
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellMethod {
    Analytic,
    ExactCorrelations,
    MonteCarlo,
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellValue {
    pub value: f64,
    pub settings: SettingsQuad,
    pub method: BellMethod,
    /// Zero unless `method` is `MonteCarlo`.
    pub stderr: f64,
}

/// |E11 + E12 + E21 − E22|.
pub fn bell_expression(e11: f64, e12: f64, e21: f64, e22: f64) -> Result<f64> {
    for e in [e11, e12, e21, e22] {
        if !(-1.0..=1.0).contains(&e) {
            return Err(Error::CorrelationOutOfRange(e));
        }
    }
    Ok((e11 + e12 + e21 - e22).abs())
}

/// Bell value of a quad from the quantum correlations aᵢ·bⱼ.
///
/// Evaluated both as |a₁·(b₁+b₂) + a₂·(b₁−b₂)| and from four projector-level
/// pair correlations; the routes must agree to [`ROUTE_AGREEMENT`].
pub fn quantum_bell(q: &SettingsQuad) -> BellValue {
    let analytic = q.signed_combination().abs();
    let rho = QuantumState::maximally_mixed(1).expect("1 qubit");
    let e = |a: &BlochVector, b: &BlochVector| exact_pair_correlation(&rho, a, b).value;
    let via_projectors = bell_expression(
        e(&q.a1, &q.b1).clamp(-1.0, 1.0),
        e(&q.a1, &q.b2).clamp(-1.0, 1.0),
        e(&q.a2, &q.b1).clamp(-1.0, 1.0),
        e(&q.a2, &q.b2).clamp(-1.0, 1.0),
    )
    .expect("clamped");
    assert!(
        (analytic - via_projectors).abs() <= ROUTE_AGREEMENT,
        "Bell routes disagree: analytic {analytic} vs projectors {via_projectors}"
    );
    BellValue {
        value: analytic,
        settings: *q,
        method: BellMethod::Analytic,
        stderr: 0.0,
    }
}

/// Settings a₁ ∝ b₁+b₂, a₂ ∝ b₁−b₂ maximizing the Bell value for given b's.
pub fn optimal_settings(b1: &BlochVector, b2: &BlochVector) -> Result<SettingsQuad> {
    let sum = std::array::from_fn(|i| b1.as_array()[i] + b2.as_array()[i]);
    let diff = std::array::from_fn(|i| b1.as_array()[i] - b2.as_array()[i]);
    let tiny = |v: &[f64; 3]| v.iter().map(|c| c * c).sum::<f64>().sqrt() < 1e-9;
    if tiny(&sum) || tiny(&diff) {
        return Err(Error::DegenerateSettings);
    }
    let a1 = BlochVector::normalized(sum)?;
    let a2 = BlochVector::normalized(diff)?;
    Ok(SettingsQuad::new(a1, a2, *b1, *b2))
}

/// Sum of the quantum Bell values of two consecutive segments.
pub fn temporal_bell_sum(q12: &SettingsQuad, q23: &SettingsQuad) -> f64 {
    quantum_bell(q12).value + quantum_bell(q23).value
}

/// Bell value between the first and third measurements of a three-step chain
/// with the fixed `middle` setting; a₁,a₂ first, b₁,b₂ (of the quad) third.
pub fn three_time_bell(initial: &QuantumState, q: &SettingsQuad, middle: &BlochVector) -> f64 {
    let e = |a: &BlochVector, c: &BlochVector| {
        exact_three_time_correlation(initial, a, middle, c).value
    };
    (e(&q.a1, &q.b1) + e(&q.a1, &q.b2) + e(&q.a2, &q.b1) - e(&q.a2, &q.b2)).abs()
}

/// Monte Carlo Bell value: each of the four two-step chains is sampled with
/// `trials` trajectories.
pub fn montecarlo_bell(
    initial: &QuantumState,
    q: &SettingsQuad,
    trials: usize,
    sharding: Sharding,
    exec: Execution,
) -> Result<BellValue> {
    let pairs = [(q.a1, q.b1), (q.a1, q.b2), (q.a2, q.b1), (q.a2, q.b2)];
    let mut signed = 0.0;
    let mut var = 0.0;
    for (i, (a, b)) in pairs.iter().enumerate() {
        let chain = MeasurementChain::from_settings(initial.clone(), &[*a, *b])?;
        // distinct substreams per pair
        let sub = Sharding::new(
            sharding.seed.wrapping_add(i as u64 * 0x9E37_79B9),
            sharding.shards,
        );
        let est = sample_chain(
            &chain,
            &[vec![0, 1]],
            &SampleOptions::new(trials, sub),
            exec,
        )?
        .estimates[0];
        signed += if i == 3 { -est.value } else { est.value };
        var += est.stderr * est.stderr;
    }
    Ok(BellValue {
        value: signed.abs(),
        settings: *q,
        method: BellMethod::MonteCarlo,
        stderr: var.sqrt(),
    })
}

const ROUNDOFF_GAIN: f64 = 1e-14;

/// Parameters of the coordinate search in [`maximize_bell`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub restarts: usize,
    pub seed: u64,
    pub initial_step: f64,
    pub final_step: f64,
    /// Cap on full coordinate sweeps per restart.
    pub max_sweeps: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            initial_step: 0.5,
            final_step: 1e-7,
            max_sweeps: 20_000,
        }
    }
}

impl SearchOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Maximizes `objective` over settings quads.
///
/// Each vector is parametrized by its polar and azimuthal angle (8 parameters
/// in all). From a random start, every coordinate is nudged by ±its step and
/// the first improving move kept. A coordinate's step doubles (up to
/// `initial_step`) after a move and halves after a failed try; the search ends
/// once every step is below `final_step`. Restart `r` draws its start
/// from substream `(seed, r)`; the best restart wins, ties going to the lowest
/// index.
pub fn maximize_bell<F>(objective: F, opts: &SearchOptions, exec: Execution) -> BellValue
where
    F: Fn(&SettingsQuad) -> f64 + Sync + Send,
{
    let restarts = opts.restarts.max(1);
    let results = map_indexed(restarts, exec, |r| {
        let mut rng = shard_rng(opts.seed, r);
        let start = SettingsQuad::random(&mut rng);
        coordinate_ascent(&objective, start, opts)
    });
    let (value, settings) = results
        .into_iter()
        .fold(None::<(f64, SettingsQuad)>, |best, cur| match best {
            Some(b) if b.0 >= cur.0 => Some(b),
            _ => Some(cur),
        })
        .expect("at least one restart");
    BellValue {
        value,
        settings,
        method: BellMethod::Search,
        stderr: 0.0,
    }
}

fn coordinate_ascent<F>(
    objective: &F,
    start: SettingsQuad,
    opts: &SearchOptions,
) -> (f64, SettingsQuad)
where
    F: Fn(&SettingsQuad) -> f64,
{
    let mut params = start.angles();
    let mut best = objective(&start);
    let mut steps = [opts.initial_step; 8];
    let mut sweeps = 0;
    while steps.iter().any(|&s| s >= opts.final_step) && sweeps < opts.max_sweeps {
        sweeps += 1;
        for i in 0..params.len() {
            if steps[i] < opts.final_step {
                continue;
            }
            let mut moved = false;
            for dir in [1.0, -1.0] {
                let mut trial = params;
                trial[i] += dir * steps[i];
                let v = objective(&SettingsQuad::from_angles(&trial));
                // gains at round-off level would keep the step from shrinking on flat ridges
                if v > best + ROUNDOFF_GAIN * best.abs().max(1.0) {
                    best = v;
                    params = trial;
                    moved = true;
                    break;
                }
            }
            steps[i] = if moved {
                (2.0 * steps[i]).min(opts.initial_step)
            } else {
                0.5 * steps[i]
            };
        }
    }
    (best, SettingsQuad::from_angles(&params))
}
