//! Sampled estimators against exact enumeration and closed forms.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tbell::bell::SettingsQuad;
use tbell::game::{per_input_analytic, run_game, GameConfig, QUANTUM_OPTIMUM};
use tbell::qcore::{axis_angle_unitary, random_mixed_qubit};
use tbell::temporal::{
    exact_chain_correlation, exact_three_time_correlation, sample_chain, MeasurementChain,
    SampleOptions, Step,
};
use tbell::{BlochVector, Execution, QuantumState, Sharding};

fn within(sampled: f64, exact: f64, stderr: f64, k: f64) -> bool {
    (sampled - exact).abs() <= k * stderr
}

#[test]
fn pair_at_45_degrees() {
    let a = BlochVector::Z;
    let b = BlochVector::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2).unwrap();
    let chain =
        MeasurementChain::from_settings(QuantumState::basis(&[true]).unwrap(), &[a, b]).unwrap();
    let opts = SampleOptions::new(1_000_000, Sharding::new(2024, 8));
    let est = sample_chain(&chain, &[vec![0, 1]], &opts, Execution::Parallel)
        .unwrap()
        .estimates[0];
    assert_eq!(est.trials, 1_000_000);
    assert!(within(est.value, FRAC_1_SQRT_2, est.stderr, 4.0), "{est:?}");
}

#[test]
fn three_step_chain_matches_enumeration() {
    let (a, c) = (BlochVector::X, BlochVector::Z);
    let b = BlochVector::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2).unwrap();
    let rho = QuantumState::basis(&[false]).unwrap();
    let exact = exact_three_time_correlation(&rho, &a, &b, &c).value;
    let chain = MeasurementChain::from_settings(rho, &[a, b, c]).unwrap();
    let opts = SampleOptions::new(1_000_000, Sharding::new(7, 8));
    let est = sample_chain(&chain, &[vec![0, 2]], &opts, Execution::Parallel)
        .unwrap()
        .estimates[0];
    assert!(
        within(est.value, exact, est.stderr, 4.0),
        "{est:?} vs {exact}"
    );
}

#[test]
fn random_chains_with_unitaries_agree_within_five_stderr() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for m in [2usize, 3, 5, 8] {
        let steps: Vec<Step> = (0..m)
            .map(|j| {
                let n = BlochVector::random(&mut rng);
                if j % 2 == 1 {
                    let u = axis_angle_unitary(&BlochVector::random(&mut rng), 1.3);
                    Step::with_unitary(n, u).unwrap()
                } else {
                    Step::new(n)
                }
            })
            .collect();
        let chain = MeasurementChain::new(random_mixed_qubit(&mut rng), steps).unwrap();
        let products: Vec<Vec<usize>> = vec![(0..m).collect(), vec![0, m - 1], vec![m / 2]];
        let opts = SampleOptions::new(100_000, Sharding::new(m as u64, 4));
        let sampled = sample_chain(&chain, &products, &opts, Execution::Parallel).unwrap();
        for (sel, est) in products.iter().zip(&sampled.estimates) {
            let exact = exact_chain_correlation(&chain, sel).unwrap().value;
            // a product fixed at ±1 has zero spread; allow round-off there
            let tol = (5.0 * est.stderr).max(1e-12);
            assert!(
                (est.value - exact).abs() <= tol,
                "m={m} sel={sel:?}: {est:?} vs {exact}"
            );
        }
    }
}

#[test]
fn optimal_game_reaches_quantum_rate() {
    let cfg = GameConfig::new(
        SettingsQuad::optimal(),
        QuantumState::maximally_mixed(1).unwrap(),
        1_000_000,
        Sharding::new(0, 8),
    )
    .unwrap();
    let r = run_game(&cfg, Execution::Parallel);
    assert!(
        within(r.success_rate, QUANTUM_OPTIMUM, r.stderr, 4.0),
        "{r:?}"
    );
    assert!((r.analytic_rate - QUANTUM_OPTIMUM).abs() < 1e-12);
    let expected = per_input_analytic(&cfg.quad);
    for (x1, row) in expected.iter().enumerate() {
        for (x2, &p) in row.iter().enumerate() {
            let n = r.per_input_counts[x1][x2] as f64;
            let se = (p * (1.0 - p) / n).sqrt();
            assert!(within(r.per_input_rates[x1][x2], p, se, 5.0));
        }
    }
}

#[test]
fn game_rate_is_state_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let quad = SettingsQuad::random(&mut rng);
    for i in 0..5 {
        let cfg = GameConfig::new(
            quad,
            random_mixed_qubit(&mut rng),
            100_000,
            Sharding::new(i, 4),
        )
        .unwrap();
        let r = run_game(&cfg, Execution::Parallel);
        assert!(
            within(r.success_rate, r.analytic_rate, r.stderr, 5.0),
            "{r:?}"
        );
    }
}
