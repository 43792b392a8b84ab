use std::fs;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use dqi_core::bits::{self, low_mask};
use dqi_core::bounds::{
    covering_bound, default_epsilon, generalized_macwilliams_defects, slice_certificate,
};
use dqi_core::codes::{
    self, corpus, covering_radius, dual_distance, dual_weight_profile, parse_code_text,
    weight_profile, BinaryLinearCode, Decoder, NamedCode, SyndromeDecoder,
};
use dqi_core::dqi::{
    build_direct, codeword_census, expected_satisfied, expected_satisfied_from_profile,
    optimal_polynomial, optimal_state, sample, semicircle_is_exact, XorsatInstance,
};
use dqi_core::kravchuk::{roots, KravchukEvaluator};
use dqi_core::oscillator::{
    bosonic_action_defect, ladder_coefficient, optimal_weights, top_position_eigenvalue,
    OscillatorBasis,
};
use dqi_core::samplers::{
    peak_find, shor_dl_probability, CountingOracle, CtState, PeakFindConfig, SamplerMode,
    StockmeyerSampler,
};
use dqi_core::Error;

use crate::report::{emit, emit_lines, Report};
use crate::{Command, Common};

/// A failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget { .. } => 4,
            Error::InvariantViolation(_) | Error::InternalConsistency(_) => 3,
            Error::InvalidParameter(_)
            | Error::Parse { .. }
            | Error::Degenerate(_)
            | Error::NoDistribution => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

/// Largest `N^2` the discrete-log table will list.
const SHOR_ROW_BUDGET: u64 = 1 << 20;

fn load(common: &Common) -> Result<XorsatInstance, Failure> {
    let (code, file_target) = match (&common.instance, &common.generate) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
            parse_code_text(&text)?
        }
        (None, Some(spec)) => (codes::generate(spec, common.seed)?, None),
        _ => {
            return Err(Failure::input(
                "exactly one of --instance or --generate is required",
            ))
        }
    };
    let v = match (&common.target, file_target) {
        (Some(t), _) => {
            if t.len() != code.m() {
                return Err(Failure::input(format!(
                    "--target needs {} bits, got {}",
                    code.m(),
                    t.len()
                )));
            }
            bits::parse_bit_string(t)
                .ok_or_else(|| Failure::input(format!("--target {t:?} is not a bit string")))?
        }
        (None, Some(v)) => v,
        (None, None) => seeded_target(code.m(), common.seed),
    };
    Ok(XorsatInstance::new(code, v))
}

fn seeded_target(m: usize, seed: u64) -> u64 {
    ChaCha8Rng::seed_from_u64(seed ^ 0x7a56_e7a9_0000_0001).random::<u64>() & low_mask(m)
}

fn config(common: &Common, extra: Value) -> Map<String, Value> {
    let mut c = Map::new();
    if let Some(p) = &common.instance {
        c.insert("instance".into(), json!(p.display().to_string()));
    }
    if let Some(g) = &common.generate {
        c.insert("generate".into(), json!(g));
    }
    if let Some(t) = &common.target {
        c.insert("target".into(), json!(t));
    }
    c.insert("seed".into(), json!(common.seed));
    if let Value::Object(extra) = extra {
        c.extend(extra);
    }
    c
}

fn describe(report: &mut Report, inst: &XorsatInstance) {
    report.note("m", inst.m());
    report.note("n", inst.n());
    report.note("v", bits::to_bit_string(inst.v, inst.m()));
}

fn finish(common: &Common, report: &Report, status: u8) -> Outcome {
    emit(common.out.as_deref(), &report.render(common.format))
        .map_err(|e| Failure::input(format!("cannot write output: {e}")))?;
    Ok(status)
}

fn positive(name: &str, value: usize) -> Result<(), Failure> {
    if value == 0 {
        return Err(Failure::input(format!("--{name} must be at least 1")));
    }
    Ok(())
}

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Semicircle { common, ell, shots } => semicircle(&common, ell, shots),
        Command::Macwilliams {
            common,
            corpus,
            corrupt_profile,
            shots,
        } => macwilliams(&common, corpus, corrupt_profile, shots),
        Command::Bounds {
            common,
            ell,
            slices,
        } => bounds(&common, ell, slices),
        Command::Census {
            common,
            ell,
            sweep_to,
        } => census(&common, ell, sweep_to),
        Command::Oscillator { common } => oscillator(&common),
        Command::Sample { common, ell, shots } => shots_from_state(&common, ell, shots),
        Command::Stockmeyer {
            common,
            ell,
            epsilon,
            shots,
            randomized,
        } => stockmeyer(&common, ell, epsilon, shots, randomized),
        Command::Peaks {
            common,
            ell,
            threshold,
            trace,
        } => peaks(&common, ell, threshold, trace.as_deref()),
        Command::Shor {
            common,
            order,
            log_value,
        } => shor(&common, order, log_value),
    }
}

fn semicircle(common: &Common, ell: Option<usize>, shots: usize) -> Outcome {
    positive("shots", shots)?;
    let inst = load(common)?;
    inst.check_nondegenerate()?;
    let d = dual_distance(&inst.code)?;
    let max_ell = match ell {
        Some(e) => e,
        None => SyndromeDecoder::new(&inst.code, None)?.radius().min(3),
    };
    let m = inst.m();
    if max_ell >= m {
        return Err(Failure::input(format!("--ell must be below m = {m}")));
    }
    let mut report = Report::new(
        "semicircle",
        config(common, json!({ "ell": max_ell, "shots": shots })),
        &[
            "ell",
            "expected_satisfied",
            "eigenvalue_prediction",
            "root_prediction",
            "empirical_mean",
            "exact",
            "semicircle",
        ],
    );
    describe(&mut report, &inst);
    report.note("dual_distance", d);
    for ell in 0..=max_ell {
        let (_, gamma, _) = optimal_polynomial(ell, m)?;
        let state = build_direct(&inst, &gamma)?;
        let exact = expected_satisfied_from_profile(&inst, &gamma)?;
        let eig = m as f64 / 2.0 + top_position_eigenvalue(ell, m);
        // The Jacobi matrix of size ell + 1 has the roots of K_{ell+1} as eigenvalues.
        let root = m as f64 - roots(ell + 1, m)?.smallest().mid();
        let draws = sample(&state, shots, common.seed.wrapping_add(ell as u64))?;
        let mean = draws.iter().map(|&x| inst.satisfied(x) as f64).sum::<f64>() / shots as f64;
        let asymptotic = m as f64 / 2.0 + ((ell * (m - ell)) as f64).sqrt();
        report.push(vec![
            json!(ell),
            json!(exact),
            json!(eig),
            json!(root),
            json!(mean),
            json!(semicircle_is_exact(ell, d)),
            json!(asymptotic),
        ]);
    }
    finish(common, &report, 0)
}

fn macwilliams(common: &Common, sweep: bool, corrupt: bool, shots: usize) -> Outcome {
    positive("shots", shots)?;
    let codes: Vec<NamedCode> = if sweep {
        if common.instance.is_some() || common.generate.is_some() {
            return Err(Failure::input("--corpus replaces --instance/--generate"));
        }
        corpus(16)
    } else {
        let inst = load(common)?;
        let name = common.generate.clone().unwrap_or_else(|| "instance".into());
        vec![NamedCode {
            name,
            code: inst.code,
        }]
    };
    let mut report = Report::new(
        "macwilliams",
        config(
            common,
            json!({ "corpus": sweep, "corrupt_profile": corrupt, "shots": shots }),
        ),
        &[
            "code",
            "m",
            "n",
            "k",
            "primal",
            "dual",
            "transform",
            "defect",
            "generalized_defect",
        ],
    );
    let mut nonzero = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    for nc in &codes {
        let code = &nc.code;
        let m = code.m();
        let mut primal = weight_profile(code, 0)?;
        if corrupt {
            if m == 0 || primal.counts[0] == 0 {
                return Err(Failure::input("profile too small to corrupt"));
            }
            primal.counts[0] -= 1;
            primal.counts[1] += 1;
        }
        let dual = dual_weight_profile(code)?;
        let ev = KravchukEvaluator::new(m);
        let size = BigInt::from(1u64) << code.n();
        let mut generalized = vec![BigInt::zero(); m + 1];
        for _ in 0..shots {
            let v = rng.random::<u64>() & low_mask(m);
            for (g, d) in generalized
                .iter_mut()
                .zip(generalized_macwilliams_defects(code, v)?)
            {
                if d.magnitude() > g.magnitude() {
                    *g = d;
                }
            }
        }
        for (k, gdef) in generalized.iter().enumerate() {
            let s: BigInt = (0..=m)
                .map(|i| BigInt::from(primal.counts[i]) * ev.value(k, i))
                .sum();
            let defect = &s - &size * BigInt::from(dual.counts[k]);
            let transform = if (&s % &size).is_zero() {
                json!((&s / &size).to_i64())
            } else {
                json!(format!("{s}/{size}"))
            };
            if !defect.is_zero() || !gdef.is_zero() {
                nonzero += 1;
            }
            report.push(vec![
                json!(nc.name),
                json!(m),
                json!(code.n()),
                json!(k),
                json!(primal.counts[k]),
                json!(dual.counts[k]),
                transform,
                json!(defect.to_i64()),
                json!(gdef.to_i64()),
            ]);
        }
    }
    report.note("codes", codes.len());
    report.note("nonzero_defects", nonzero);
    let status = if nonzero > 0 { 3 } else { 0 };
    finish(common, &report, status)?;
    if status != 0 {
        eprintln!("dqi: {nonzero} nonzero MacWilliams defects");
    }
    Ok(status)
}

fn bounds(common: &Common, ell: Option<usize>, slices: bool) -> Outcome {
    let inst = load(common)?;
    let code = &inst.code;
    let d = dual_distance(code)?;
    let ells: Vec<usize> = match ell {
        Some(e) => vec![e],
        None => (1..).take_while(|e| 2 * e < d).collect(),
    };
    let radius = match covering_radius(code) {
        Ok(r) => Some(r),
        Err(Error::Budget { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let mut report = Report::new(
        "bounds",
        config(common, json!({ "ell": ell, "slices": slices })),
        &[
            "kind",
            "ell",
            "r",
            "lo",
            "hi",
            "covering_radius",
            "holds",
            "covered",
            "checked",
        ],
    );
    describe(&mut report, &inst);
    report.note("dual_distance", d);
    let mut certificates = Vec::new();
    for &e in &ells {
        let cert = covering_bound(code, e)?;
        let bound = cert.bound_f64();
        report.push(vec![
            json!("covering"),
            json!(e),
            Value::Null,
            json!(0),
            json!(bound),
            json!(radius),
            json!(radius.map(|r| r as f64 <= bound)),
            Value::Null,
            Value::Null,
        ]);
        certificates.push(cert.to_json());
    }
    if slices {
        for e in (2..=code.m()).step_by(2).take_while(|e| 2 * e - 2 < d) {
            if ell.is_some_and(|x| x != e) {
                continue;
            }
            for r in 1..e {
                let cert = slice_certificate(code, e, r, &default_epsilon())?;
                let (lo, hi) = cert.interval_f64();
                report.push(vec![
                    json!("slice"),
                    json!(e),
                    json!(r),
                    json!(lo),
                    json!(hi),
                    json!(radius),
                    json!(cert.all_covered()),
                    json!(cert.covered),
                    json!(cert.checked),
                ]);
            }
        }
    }
    report.note("certificates", certificates);
    finish(common, &report, 0)
}

fn census(common: &Common, ell: usize, sweep_to: Option<usize>) -> Outcome {
    let mut instances = vec![load(common)?];
    if let Some(top) = sweep_to {
        let spec = common.generate.as_deref().unwrap_or("");
        let Some(args) = spec.strip_prefix("ldpc:") else {
            return Err(Failure::input(
                "--sweep-to needs --generate ldpc:m,n,rowweight",
            ));
        };
        let nums: Vec<usize> = args
            .split(',')
            .filter_map(|a| a.trim().parse().ok())
            .collect();
        let (m0, n0, w) = (nums[0], nums[1], nums[2]);
        if top < m0 {
            return Err(Failure::input(format!(
                "--sweep-to {top} is below m = {m0}"
            )));
        }
        for m in m0 + 1..=top {
            let n = (m * n0 / m0).max(w);
            let code = BinaryLinearCode::random_ldpc(m, n, w, common.seed)?;
            instances.push(XorsatInstance::new(code, seeded_target(m, common.seed)));
        }
    }
    let mut report = Report::new(
        "census",
        config(common, json!({ "ell": ell, "sweep_to": sweep_to })),
        &[
            "m", "n", "ell", "v", "band_lo", "band_hi", "count", "fraction", "rate",
        ],
    );
    for inst in &instances {
        if ell > inst.m() {
            return Err(Failure::input(format!(
                "--ell {ell} exceeds m = {}",
                inst.m()
            )));
        }
    }
    for inst in &instances {
        let c = codeword_census(inst, ell)?;
        report.push(vec![
            json!(c.m),
            json!(c.n),
            json!(c.ell),
            json!(bits::to_bit_string(inst.v, inst.m())),
            json!(c.band_lo),
            json!(c.band_hi),
            json!(c.semicircle_count),
            json!(c.semicircle_fraction),
            json!(c.rate()),
        ]);
    }
    finish(common, &report, 0)
}

fn oscillator(common: &Common) -> Outcome {
    let inst = load(common)?;
    let basis = OscillatorBasis::obfuscated(&inst.code, inst.v)?;
    let m = inst.m();
    let mut report = Report::new(
        "oscillator",
        config(common, json!({})),
        &["k", "ladder_coefficient", "norm", "action_defect"],
    );
    describe(&mut report, &inst);
    report.note("levels", basis.levels());
    report.note("orthonormality_defect", basis.orthonormality_defect());
    for k in 0..basis.levels() {
        let defect = if k + 1 < basis.levels() {
            Some(bosonic_action_defect(&basis, k)?)
        } else {
            None
        };
        report.push(vec![
            json!(k),
            json!(ladder_coefficient(k, m)),
            json!(basis.eigenstate(k)?.norm()),
            json!(defect),
        ]);
    }
    finish(common, &report, 0)
}

fn shots_from_state(common: &Common, ell: usize, shots: usize) -> Outcome {
    positive("shots", shots)?;
    let inst = load(common)?;
    if ell >= inst.m() {
        return Err(Failure::input(format!(
            "--ell must be below m = {}",
            inst.m()
        )));
    }
    let state = optimal_state(&inst, ell)?;
    let draws = sample(&state, shots, common.seed)?;
    let mut report = Report::new(
        "sample",
        config(common, json!({ "ell": ell, "shots": shots })),
        &["shot", "x", "satisfied"],
    );
    describe(&mut report, &inst);
    report.note("expected_satisfied", expected_satisfied(&state, &inst)?);
    let mean = draws.iter().map(|&x| inst.satisfied(x) as f64).sum::<f64>() / shots as f64;
    report.note("empirical_mean", mean);
    for (i, &x) in draws.iter().enumerate() {
        report.push(vec![
            json!(i),
            json!(bits::to_bit_string(x, inst.n())),
            json!(inst.satisfied(x)),
        ]);
    }
    finish(common, &report, 0)
}

fn stockmeyer(
    common: &Common,
    ell: usize,
    epsilon: f64,
    shots: usize,
    randomized: bool,
) -> Outcome {
    positive("shots", shots)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Failure::input(format!(
            "--epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let inst = load(common)?;
    if ell >= inst.m() {
        return Err(Failure::input(format!(
            "--ell must be below m = {}",
            inst.m()
        )));
    }
    let state = optimal_state(&inst, ell)?;
    let oracle = CountingOracle::from_state(&state)?;
    let mode = if randomized {
        SamplerMode::Randomized
    } else {
        SamplerMode::Exact
    };
    let sampler = StockmeyerSampler::new(&oracle, epsilon, mode, common.seed)?;
    let mut report = Report::new(
        "stockmeyer",
        config(
            common,
            json!({ "ell": ell, "epsilon": epsilon, "shots": shots, "randomized": randomized }),
        ),
        &["shot", "x", "q", "target", "ratio"],
    );
    describe(&mut report, &inst);
    report.note("mode", serde_json::to_value(mode).unwrap_or(Value::Null));
    report.note("delta", sampler.delta());
    report.note("register_bits", json!(sampler.register_bits()));
    report.note("worst_prefix_error", sampler.worst_prefix_error());
    let z = oracle.total();
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    for i in 0..shots {
        let (x, q) = sampler.sample(&mut rng)?;
        let target = oracle.g(x) / z;
        report.push(vec![
            json!(i),
            json!(bits::to_bit_string(x, inst.n())),
            json!(q),
            json!(target),
            json!(q / target),
        ]);
    }
    finish(common, &report, 0)
}

fn peaks(common: &Common, ell: usize, threshold: f64, trace: Option<&std::path::Path>) -> Outcome {
    let inst = load(common)?;
    let dec = SyndromeDecoder::new(&inst.code, None)?;
    if ell > dec.radius() {
        return Err(Failure::input(format!(
            "--ell {ell} exceeds the decoding radius {}",
            dec.radius()
        )));
    }
    let (w, _) = optimal_weights(ell, inst.m())?;
    let ct = CtState::new(inst.clone(), w, dec)?;
    let config_knobs = PeakFindConfig {
        trace_exact: trace.is_some(),
        ..PeakFindConfig::default()
    };
    let mut records = Vec::new();
    let found = peak_find(
        &ct,
        threshold,
        common.seed,
        &config_knobs,
        trace.map(|_| &mut records),
    )?;
    let probs = ct.to_state()?.hadamarded().probabilities();
    let mut report = Report::new(
        "peaks",
        config(common, json!({ "ell": ell, "threshold": threshold })),
        &["x", "probability"],
    );
    describe(&mut report, &inst);
    report.note(
        "exact_heavy",
        probs.iter().filter(|&&p| p >= threshold).count(),
    );
    for &x in &found {
        report.push(vec![
            json!(bits::to_bit_string(x, inst.n())),
            json!(probs[x as usize]),
        ]);
    }
    if let Some(path) = trace {
        let lines = records
            .iter()
            .map(|r| serde_json::to_value(r).unwrap_or(Value::Null));
        emit_lines(path, lines).map_err(|e| Failure::input(format!("cannot write trace: {e}")))?;
    }
    finish(common, &report, 0)
}

fn shor(common: &Common, order: u64, log_value: u64) -> Outcome {
    if order == 0 || log_value >= order {
        return Err(Failure::input(format!(
            "need 0 <= alpha < N, got N = {order}, alpha = {log_value}"
        )));
    }
    if order.saturating_mul(order) > SHOR_ROW_BUDGET {
        return Err(Failure {
            code: 4,
            message: format!(
                "N^2 = {} rows exceed the 2^20 budget",
                order as u128 * order as u128
            ),
        });
    }
    let mut report = Report::new(
        "shor",
        config(common, json!({ "order": order, "log_value": log_value })),
        &["a", "b", "probability", "pair_probability"],
    );
    let mut total = Rational64::zero();
    let mut support = 0u64;
    for a in 0..order {
        for b in 0..order {
            let p = shor_dl_probability(order, log_value, a, b)?;
            // Every c of the N group elements carries the same probability.
            let pair = p * Rational64::from_integer(order as i64);
            total += pair;
            if !p.is_zero() {
                support += order;
            }
            report.push(vec![
                json!(a),
                json!(b),
                json!(p.to_string()),
                json!(pair.to_string()),
            ]);
        }
    }
    report.note("total", total.to_string());
    report.note("support_triples", support);
    report.note("outcomes", (order as u128).pow(3).to_string());
    finish(common, &report, 0)
}
