//! Correlations between outcomes of sequential projective measurements on one
//! qubit.
//!
//! A [`MeasurementChain`] measures σ·n₁, …, σ·n_m in order, optionally applying
//! a unitary just before each measurement. After each measurement the qubit is
//! left in the projector of the observed outcome. Exact values come from
//! enumerating all 2^m outcome sequences; Monte Carlo values from sampling
//! trajectories.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{Execution, Sharding};
use crate::qcore::{bloch_rotation, projector, BlochVector, ComplexMatrix, Outcome, QuantumState};
use crate::stats::Moments;

pub const MAX_CHAIN_LEN: usize = 16;
pub const UNITARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub setting: BlochVector,
    /// Applied to the qubit right before this step's measurement.
    pub pre_unitary: Option<ComplexMatrix>,
}

impl Step {
    pub fn new(setting: BlochVector) -> Self {
        Self {
            setting,
            pre_unitary: None,
        }
    }

    pub fn with_unitary(setting: BlochVector, u: ComplexMatrix) -> Result<Self> {
        if u.dim() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "pre-unitary must be 2x2, got {0}x{0}",
                u.dim()
            )));
        }
        let defect = u.unitarity_defect();
        if defect > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self {
            setting,
            pre_unitary: Some(u),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementChain {
    initial: QuantumState,
    steps: Vec<Step>,
}

impl MeasurementChain {
    pub fn new(initial: QuantumState, steps: Vec<Step>) -> Result<Self> {
        if initial.nqubits() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "chain needs a 1-qubit initial state, got {} qubits",
                initial.nqubits()
            )));
        }
        if steps.is_empty() || steps.len() > MAX_CHAIN_LEN {
            return Err(Error::ChainLength(steps.len()));
        }
        for s in &steps {
            if let Some(u) = &s.pre_unitary {
                let defect = u.unitarity_defect();
                if u.dim() != 2 || defect > UNITARY_TOLERANCE {
                    return Err(Error::NotUnitary(defect));
                }
            }
        }
        Ok(Self { initial, steps })
    }

    pub fn from_settings(initial: QuantumState, settings: &[BlochVector]) -> Result<Self> {
        Self::new(initial, settings.iter().copied().map(Step::new).collect())
    }

    pub fn initial(&self) -> &QuantumState {
        &self.initial
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn has_unitaries(&self) -> bool {
        self.steps.iter().any(|s| s.pre_unitary.is_some())
    }

    fn check_selection(&self, selected: &[usize]) -> Result<()> {
        if selected.is_empty() {
            return Err(Error::EmptySelection);
        }
        match selected.iter().find(|&&i| i >= self.len()) {
            Some(&index) => Err(Error::StepOutOfRange {
                index,
                len: self.len(),
            }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    MonteCarlo,
}

/// A correlation value with its provenance. Exact values carry zero trials
/// and zero standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub value: f64,
    pub method: Method,
    pub trials: u64,
    pub stderr: f64,
}

impl CorrelationEstimate {
    pub fn exact(value: f64) -> Self {
        debug_assert!(value.abs() <= 1.0 + 1e-9, "correlation {value}");
        Self {
            value,
            method: Method::Exact,
            trials: 0,
            stderr: 0.0,
        }
    }

    pub fn sampled(m: &Moments) -> Self {
        Self {
            value: m.mean(),
            method: Method::MonteCarlo,
            trials: m.count,
            stderr: m.stderr(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub outcomes: Vec<Outcome>,
    /// Set in enumeration mode only.
    pub probability: Option<f64>,
}

impl TrajectoryRecord {
    /// Product of the outcome signs at the given steps.
    pub fn product(&self, selected: &[usize]) -> f64 {
        selected.iter().map(|&i| self.outcomes[i].value()).product()
    }
}

/// Tr(P^k_a P^l_b) for a state prepared in P^k_a and then measured along b.
fn transition(pa: &ComplexMatrix, pb: &ComplexMatrix) -> f64 {
    pa.trace_product(pb).re
}

/// Σ_{k,l} k·l·Tr(ρ P^k_a)·Tr(P^k_a P^l_b).
pub fn exact_pair_correlation(
    initial: &QuantumState,
    a: &BlochVector,
    b: &BlochVector,
) -> CorrelationEstimate {
    let mut e = 0.0;
    for k in Outcome::BOTH {
        let pa = projector(a, k);
        let first = initial.probability(&pa);
        for l in Outcome::BOTH {
            e += k.value() * l.value() * first * transition(&pa, &projector(b, l));
        }
    }
    CorrelationEstimate::exact(e)
}

/// Correlation of the first and third outcomes of a three-step chain a, b, c,
/// summed over the middle outcome.
pub fn exact_three_time_correlation(
    initial: &QuantumState,
    a: &BlochVector,
    b: &BlochVector,
    c: &BlochVector,
) -> CorrelationEstimate {
    let mut e = 0.0;
    for k in Outcome::BOTH {
        let pa = projector(a, k);
        let p1 = initial.probability(&pa);
        for l in Outcome::BOTH {
            let pb = projector(b, l);
            let p2 = transition(&pa, &pb);
            for s in Outcome::BOTH {
                let p3 = transition(&pb, &projector(c, s));
                e += k.value() * s.value() * p1 * p2 * p3;
            }
        }
    }
    CorrelationEstimate::exact(e)
}

/// All 2^m outcome sequences with their probabilities, in lexicographic order
/// (`Plus` before `Minus`, first step most significant).
pub fn enumerate_trajectories(chain: &MeasurementChain) -> Vec<TrajectoryRecord> {
    let projectors: Vec<[ComplexMatrix; 2]> = chain
        .steps
        .iter()
        .map(|s| Outcome::BOTH.map(|k| projector(&s.setting, k)))
        .collect();
    let mut out = Vec::with_capacity(1 << chain.len());
    let mut outcomes = Vec::with_capacity(chain.len());
    enumerate_from(
        chain,
        &projectors,
        chain.initial.matrix().clone(),
        1.0,
        &mut outcomes,
        &mut out,
    );
    out
}

fn enumerate_from(
    chain: &MeasurementChain,
    projectors: &[[ComplexMatrix; 2]],
    state: ComplexMatrix,
    prob: f64,
    outcomes: &mut Vec<Outcome>,
    out: &mut Vec<TrajectoryRecord>,
) {
    let step = outcomes.len();
    if step == chain.len() {
        out.push(TrajectoryRecord {
            outcomes: outcomes.clone(),
            probability: Some(prob),
        });
        return;
    }
    let state = match &chain.steps[step].pre_unitary {
        Some(u) => state.conjugate_by(u).expect("2x2"),
        None => state,
    };
    for (k, p) in Outcome::BOTH.into_iter().zip(&projectors[step]) {
        let pk = state.trace_product(p).re.clamp(0.0, 1.0);
        outcomes.push(k);
        enumerate_from(chain, projectors, p.clone(), prob * pk, outcomes, out);
        outcomes.pop();
    }
}

/// Expectation of the product of outcomes at the `selected` steps (0-based),
/// by exhaustive enumeration.
pub fn exact_chain_correlation(
    chain: &MeasurementChain,
    selected: &[usize],
) -> Result<CorrelationEstimate> {
    chain.check_selection(selected)?;
    let value = enumerate_trajectories(chain)
        .iter()
        .map(|t| t.probability.unwrap_or(0.0) * t.product(selected))
        .sum();
    Ok(CorrelationEstimate::exact(value))
}

/// Product over consecutive pairs (1,2)(3,4)… of the pair correlations
/// (R n_{2i−1})·n_{2i}, where R is the Bloch rotation of the unitary applied
/// before step 2i. `None` for odd chain length.
pub fn pairwise_decomposition(chain: &MeasurementChain) -> Option<f64> {
    if !chain.len().is_multiple_of(2) {
        return None;
    }
    Some(
        chain
            .steps
            .chunks(2)
            .map(|pair| {
                let first = match &pair[1].pre_unitary {
                    Some(u) => pair[0].setting.rotated(&bloch_rotation(u)),
                    None => pair[0].setting,
                };
                first.dot(&pair[1].setting)
            })
            .product(),
    )
}

/// One projective measurement of σ·n: returns the outcome and the collapsed state.
pub fn measure<R: Rng + ?Sized>(
    state: &QuantumState,
    setting: &BlochVector,
    rng: &mut R,
) -> (Outcome, QuantumState) {
    let plus = projector(setting, Outcome::Plus);
    let k = if rng.random::<f64>() < state.probability(&plus) {
        Outcome::Plus
    } else {
        Outcome::Minus
    };
    (k, crate::qcore::collapsed(setting, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleOptions {
    pub trials: usize,
    pub sharding: Sharding,
    pub record_trajectories: bool,
}

impl SampleOptions {
    pub fn new(trials: usize, sharding: Sharding) -> Self {
        Self {
            trials,
            sharding,
            record_trajectories: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSample {
    /// One estimate per requested product, in request order.
    pub estimates: Vec<CorrelationEstimate>,
    pub trajectories: Option<Vec<TrajectoryRecord>>,
}

/// Monte Carlo estimate of each product of outcomes in `products`.
///
/// Each trial applies the pre-unitary, draws the outcome with probability
/// Tr(ρP^k), collapses the state to P^k, and moves on to the next step.
pub fn sample_chain(
    chain: &MeasurementChain,
    products: &[Vec<usize>],
    opts: &SampleOptions,
    exec: Execution,
) -> Result<ChainSample> {
    if opts.trials == 0 {
        return Err(Error::ZeroTrials);
    }
    if products.is_empty() {
        return Err(Error::EmptySelection);
    }
    for p in products {
        chain.check_selection(p)?;
    }
    let projectors: Vec<[ComplexMatrix; 2]> = chain
        .steps
        .iter()
        .map(|s| Outcome::BOTH.map(|k| projector(&s.setting, k)))
        .collect();

    let shards = opts.sharding.run(opts.trials, exec, |_, n, rng| {
        let mut moments = vec![Moments::default(); products.len()];
        let mut records = opts.record_trajectories.then(|| Vec::with_capacity(n));
        let mut signs = vec![0.0; chain.len()];
        let mut outcomes = Vec::with_capacity(chain.len());
        for _ in 0..n {
            let mut state = chain.initial.matrix().clone();
            outcomes.clear();
            for (j, step) in chain.steps.iter().enumerate() {
                if let Some(u) = &step.pre_unitary {
                    state = state.conjugate_by(u).expect("2x2");
                }
                let [plus, minus] = &projectors[j];
                let p_plus = state.trace_product(plus).re;
                let (k, p) = if rng.random::<f64>() < p_plus {
                    (Outcome::Plus, plus)
                } else {
                    (Outcome::Minus, minus)
                };
                signs[j] = k.value();
                outcomes.push(k);
                state = p.clone();
            }
            for (m, sel) in moments.iter_mut().zip(products) {
                m.push(sel.iter().map(|&i| signs[i]).product());
            }
            if let Some(r) = records.as_mut() {
                r.push(TrajectoryRecord {
                    outcomes: outcomes.clone(),
                    probability: None,
                });
            }
        }
        (moments, records)
    });

    let mut total = vec![Moments::default(); products.len()];
    let mut trajectories = opts.record_trajectories.then(Vec::new);
    for (moments, records) in shards {
        for (t, m) in total.iter_mut().zip(&moments) {
            t.merge(m);
        }
        if let (Some(all), Some(r)) = (trajectories.as_mut(), records) {
            all.extend(r);
        }
    }
    Ok(ChainSample {
        estimates: total.iter().map(CorrelationEstimate::sampled).collect(),
        trajectories,
    })
}
