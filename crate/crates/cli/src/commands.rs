use serde_json::{json, Map, Value};

use tbell::bell::{
    maximize_bell, montecarlo_bell, optimal_settings, quantum_bell, temporal_bell_sum,
    SearchOptions, SettingsQuad, CLASSICAL_BOUND, TEMPORAL_SUM_BOUND, TSIRELSON_BOUND,
};
use tbell::game::{per_input_analytic, run_game, GameConfig, CLASSICAL_OPTIMUM, QUANTUM_OPTIMUM};
use tbell::lhv::{
    classical_bell_max, classical_game_max, evaluate_protocol, DeterministicAssignment,
    MemoryStrategy, TwoBitStrategy, CHSH_STRATEGY_COUNT, GAME_STRATEGY_COUNT,
};
use tbell::qcore::state_from_bloch;
use tbell::spatial::{scarani_gisin_check, sum_bound_sweep, SumBoundReport, SPATIAL_SUM_BOUND};
use tbell::temporal::{
    exact_chain_correlation, pairwise_decomposition, sample_chain, MeasurementChain, SampleOptions,
};
use tbell::{BlochVector, MixedBloch, QuantumState, Sharding};

use crate::output::{Document, Manifest, TOOL_VERSION};
use crate::settings::{read_toml, ChainFile, QuadFile};
use crate::{
    ChshArgs, CliError, Common, CorrelateArgs, GameArgs, LhvArgs, LhvTarget, SpatialArgs,
    SpatialState,
};

fn document(
    command: &str,
    common: &Common,
    mut parameters: Map<String, Value>,
    results: Value,
) -> Document {
    parameters.insert("format".into(), json!(common.format));
    Document::new(
        Manifest {
            command: command.into(),
            parameters,
            seed: common.seed,
            shards: common.shards(),
            tool_version: TOOL_VERSION.into(),
        },
        results,
    )
}

fn params(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn sharding(common: &Common) -> Sharding {
    Sharding::new(common.seed, common.shards())
}

fn references() -> Value {
    json!({
        "classical_bound": CLASSICAL_BOUND,
        "tsirelson_bound": TSIRELSON_BOUND,
        "temporal_sum_bound": TEMPORAL_SUM_BOUND,
        "spatial_sum_bound": SPATIAL_SUM_BOUND,
    })
}

fn quad_json(q: &SettingsQuad) -> Value {
    json!({
        "a1": q.a1.as_array(),
        "a2": q.a2.as_array(),
        "b1": q.b1.as_array(),
        "b2": q.b2.as_array(),
    })
}

pub fn correlate(args: &CorrelateArgs) -> Result<Document, CliError> {
    let file: ChainFile = read_toml(&args.settings)?;
    let initial = MixedBloch::new(args.initial.or(file.initial).unwrap_or([0.0; 3]))?;
    let steps = file.build_steps()?;
    let chain = MeasurementChain::new(state_from_bloch(&initial), steps)?;
    let select_1based: Vec<usize> = args
        .select
        .clone()
        .or(file.select.clone())
        .unwrap_or_else(|| (1..=chain.len()).collect());
    let selected = select_1based
        .iter()
        .map(|&i| {
            i.checked_sub(1)
                .ok_or_else(|| CliError::Input("step indices are 1-based".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let exact = exact_chain_correlation(&chain, &selected)?;
    let sampled = if args.exact {
        Value::Null
    } else {
        let opts = SampleOptions::new(args.trials as usize, sharding(&args.common));
        let est = sample_chain(
            &chain,
            std::slice::from_ref(&selected),
            &opts,
            args.common.execution(),
        )?
        .estimates[0];
        json!({ "value": est.value, "stderr": est.stderr, "trials": est.trials })
    };
    let decomposition = match pairwise_decomposition(&chain) {
        None => Value::Null,
        Some(product) => {
            let all: Vec<usize> = (0..chain.len()).collect();
            let full = exact_chain_correlation(&chain, &all)?.value;
            json!({ "pair_product": product, "full_chain_exact": full })
        }
    };
    let steps: Vec<Value> = file
        .steps
        .iter()
        .map(|s| {
            json!({
                "setting": s.setting,
                "unitary": s.unitary.as_ref().map(|u| json!({ "axis": u.axis, "angle": u.angle })),
            })
        })
        .collect();

    let parameters = params(vec![
        ("settings_file", json!(args.settings.display().to_string())),
        ("initial", json!(initial.as_array())),
        ("select", json!(select_1based)),
        ("trials", json!(args.trials)),
        ("exact", json!(args.exact)),
    ]);
    let results = json!({
        "chain_length": chain.len(),
        "steps": steps,
        "selected": select_1based,
        "exact": { "value": exact.value },
        "sampled": sampled,
        "pairwise_decomposition": decomposition,
    });
    Ok(document("correlate", &args.common, parameters, results))
}

pub fn chsh(args: &ChshArgs) -> Result<Document, CliError> {
    let b1 = BlochVector::from_array(args.b1)?;
    let b2 = BlochVector::from_array(args.b2)?;
    let quad = if args.optimize {
        optimal_settings(&b1, &b2)?
    } else {
        let need = |v: Option<[f64; 3]>, name: &str| {
            v.ok_or_else(|| CliError::Input(format!("--{name} is required without --optimize")))
        };
        SettingsQuad::new(
            BlochVector::from_array(need(args.a1, "a1")?)?,
            BlochVector::from_array(need(args.a2, "a2")?)?,
            b1,
            b2,
        )
    };
    let exec = args.common.execution();
    let analytic = quantum_bell(&quad);
    let initial = QuantumState::maximally_mixed(1)?;
    let mc = montecarlo_bell(
        &initial,
        &quad,
        args.trials as usize,
        sharding(&args.common),
        exec,
    )?;
    let search = if args.optimize {
        let opts = SearchOptions {
            restarts: args.restarts as usize,
            ..SearchOptions::with_seed(args.common.seed)
        };
        let best = maximize_bell(|q| quantum_bell(q).value, &opts, exec);
        if best.value > TSIRELSON_BOUND + 1e-9 {
            return Err(tbell::Error::BoundViolation {
                quantity: "optimized temporal CHSH value",
                value: best.value,
                bound: TSIRELSON_BOUND,
            }
            .into());
        }
        json!({ "value": best.value, "restarts": opts.restarts, "settings": quad_json(&best.settings) })
    } else {
        Value::Null
    };
    let sum = if args.sum {
        let s = temporal_bell_sum(&quad, &quad);
        json!({ "value": s, "bound": TEMPORAL_SUM_BOUND, "exceeds_spatial_bound": s > SPATIAL_SUM_BOUND })
    } else {
        Value::Null
    };

    let mut parameters = params(vec![
        ("b1", json!(b1.as_array())),
        ("b2", json!(b2.as_array())),
    ]);
    if !args.optimize {
        parameters.insert("a1".into(), json!(quad.a1.as_array()));
        parameters.insert("a2".into(), json!(quad.a2.as_array()));
    }
    parameters.insert("optimize".into(), json!(args.optimize));
    parameters.insert("sum".into(), json!(args.sum));
    parameters.insert("trials".into(), json!(args.trials));
    if args.optimize {
        parameters.insert("restarts".into(), json!(args.restarts));
    }
    let results = json!({
        "settings": quad_json(&quad),
        "analytic": { "value": analytic.value },
        "montecarlo": { "value": mc.value, "stderr": mc.stderr, "trials": args.trials },
        "search": search,
        "sum": sum,
        "references": references(),
    });
    Ok(document("chsh", &args.common, parameters, results))
}

fn memory_strategy_json(s: &MemoryStrategy) -> Value {
    let name = if *s == MemoryStrategy::OUTPUT_Y {
        "output y"
    } else if *s == MemoryStrategy::output_minus_y() {
        "output -y"
    } else if *s == MemoryStrategy::output_plus() {
        "output +1"
    } else {
        "table"
    };
    json!({ "name": name, "tables": s.value_tables() })
}

pub fn game(args: &GameArgs) -> Result<Document, CliError> {
    let quad = match &args.quad {
        Some(path) => read_toml::<QuadFile>(path)?.to_quad()?,
        None => SettingsQuad::optimal(),
    };
    let cfg = GameConfig::new(
        quad,
        QuantumState::maximally_mixed(1)?,
        args.trials as usize,
        sharding(&args.common),
    )?;
    let r = run_game(&cfg, args.common.execution());
    let analytic = per_input_analytic(&quad);
    let per_input: Vec<Value> = (0..2)
        .flat_map(|x1| (0..2).map(move |x2| (x1, x2)))
        .map(|(x1, x2)| {
            json!({
                "x1": x1,
                "x2": x2,
                "rate": r.per_input_rates[x1][x2],
                "rounds": r.per_input_counts[x1][x2],
                "analytic": analytic[x1][x2],
            })
        })
        .collect();
    let (classical, witness) = classical_game_max();

    let mut parameters = Map::new();
    match &args.quad {
        Some(path) => parameters.insert("quad_file".into(), json!(path.display().to_string())),
        None => parameters.insert("optimal".into(), json!(true)),
    };
    parameters.insert("trials".into(), json!(args.trials));
    let results = json!({
        "settings": quad_json(&quad),
        "success_rate": r.success_rate,
        "stderr": r.stderr,
        "trials": r.trials,
        "analytic_rate": r.analytic_rate,
        "per_input": per_input,
        "classical_bound": CLASSICAL_OPTIMUM,
        "classical_witness": {
            "success": classical,
            "strategy": memory_strategy_json(&witness),
        },
        "quantum_optimum": QUANTUM_OPTIMUM,
    });
    Ok(document("game", &args.common, parameters, results))
}

pub fn lhv(args: &LhvArgs) -> Document {
    let results = match args.target {
        LhvTarget::Chsh => {
            let (max, witness) = classical_bell_max();
            let values: Vec<i32> = DeterministicAssignment::all()
                .map(|a| a.signed_chsh())
                .collect();
            json!({
                "target": "chsh",
                "enumeration_size": CHSH_STRATEGY_COUNT,
                "maximum": max,
                "witness": witness,
                "all_values_plus_minus_two": values.iter().all(|v| v.abs() == 2),
                "count_plus_two": values.iter().filter(|&&v| v == 2).count(),
                "count_minus_two": values.iter().filter(|&&v| v == -2).count(),
                "quantum_bound": TSIRELSON_BOUND,
            })
        }
        LhvTarget::Game => {
            let (max, witness) = classical_game_max();
            let two_bit = TwoBitStrategy::store_y_and_x1();
            json!({
                "target": "game",
                "enumeration_size": GAME_STRATEGY_COUNT,
                "maximum": max,
                "witness": memory_strategy_json(&witness),
                "two_bit_memory": { "strategy": two_bit, "success": evaluate_protocol(&two_bit) },
                "quantum_optimum": QUANTUM_OPTIMUM,
            })
        }
    };
    let target = match args.target {
        LhvTarget::Chsh => "chsh",
        LhvTarget::Game => "game",
    };
    document(
        "lhv",
        &args.common,
        params(vec![("target", json!(target))]),
        results,
    )
}

fn report_json(r: &SumBoundReport) -> Value {
    json!({ "b12": r.b12, "b23": r.b23, "sum": r.sum })
}

pub fn spatial(args: &SpatialArgs) -> Result<Document, CliError> {
    let (state_name, results) = match args.state {
        SpatialState::Ghz | SpatialState::SingletX => {
            let (name, state) = if args.state == SpatialState::Ghz {
                ("ghz", QuantumState::ghz())
            } else {
                (
                    "singlet-x",
                    QuantumState::singlet().tensor(&QuantumState::basis(&[false])?)?,
                )
            };
            let r = scarani_gisin_check(&state)?;
            let results = json!({
                "report": report_json(&r),
                "max_sum": r.sum,
                "references": { "spatial_sum_bound": SPATIAL_SUM_BOUND, "temporal_sum_bound": TEMPORAL_SUM_BOUND },
            });
            (name, results)
        }
        SpatialState::Random => {
            let sweep = sum_bound_sweep(
                args.samples as usize,
                sharding(&args.common),
                args.common.execution(),
            )?;
            let results = json!({
                "samples": sweep.samples,
                "report": report_json(&sweep.worst),
                "max_sum": sweep.max_sum,
                "references": { "spatial_sum_bound": SPATIAL_SUM_BOUND, "temporal_sum_bound": TEMPORAL_SUM_BOUND },
            });
            ("random", results)
        }
    };
    let mut parameters = params(vec![("state", json!(state_name))]);
    if args.state == SpatialState::Random {
        parameters.insert("samples".into(), json!(args.samples));
    }
    Ok(document("spatial", &args.common, parameters, results))
}
