use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dqi_core::bits::{self, low_mask, weight};
use dqi_core::bounds::{first_moment_residual, macwilliams_transform, BetaMode, BetaPolynomial};
use dqi_core::codes::{
    covering_radius, dual_weight_profile, weight_profile, BinaryLinearCode, Decoder,
    SyndromeDecoder,
};
use dqi_core::dqi::{
    build_direct, build_fourier, expected_satisfied, probability_cap_ratio, DqiPolynomial,
    XorsatInstance,
};
use dqi_core::kravchuk::{kravchuk, KravchukEvaluator};
use dqi_core::oscillator::{
    fourier_position_apply, position_apply, DqiWeights, OscillatorBasis, StateVector,
};
use dqi_core::samplers::{
    ct_sample, shor_dl_probability, CountingOracle, CtState, SamplerMode, StockmeyerSampler,
};
use num_complex::Complex64;

fn ldpc() -> impl Strategy<Value = BinaryLinearCode> {
    (6usize..=13, any::<u64>()).prop_flat_map(|(m, seed)| {
        (3usize..m).prop_filter_map("rank deficient", move |n| {
            let w = if n >= 3 { 3 } else { 1 };
            BinaryLinearCode::random_ldpc(m, n, w, seed).ok()
        })
    })
}

fn random_state(n: usize, seed: u64) -> StateVector {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(n, amps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn profile_is_translation_invariant(code in ldpc(), v in any::<u64>(), x in any::<u64>()) {
        let v = v & low_mask(code.m());
        let shifted = v ^ code.encode(x & low_mask(code.n()));
        prop_assert_eq!(weight_profile(&code, v).unwrap().counts, weight_profile(&code, shifted).unwrap().counts);
    }

    #[test]
    fn decoder_round_trip(code in ldpc()) {
        let dec = SyndromeDecoder::new(&code, None).unwrap();
        for k in 0..=dec.radius() {
            for y in bits::weight_k_vectors(code.m(), k) {
                prop_assert_eq!(dec.decode(code.syndrome(y)), Some(y));
            }
        }
    }

    #[test]
    fn covering_radius_range(m in 3usize..=12, n in 2usize..=6, seed in any::<u64>()) {
        prop_assume!(n < m);
        // First column all ones puts the all-ones word in the code.
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<u64> = (0..m).map(|_| 1 | (rng.random::<u64>() & low_mask(n))).collect();
        prop_assume!(bits::rank(&rows) == n);
        let code = BinaryLinearCode::from_rows(m, n, rows).unwrap();
        let r = covering_radius(&code).unwrap();
        prop_assert!(r <= m / 2);
    }

    #[test]
    fn macwilliams_is_an_involution(code in ldpc()) {
        let primal = weight_profile(&code, 0).unwrap();
        let dual = dual_weight_profile(&code).unwrap();
        prop_assert_eq!(&macwilliams_transform(&primal, 1u128 << code.n()).unwrap(), &dual);
        let back = macwilliams_transform(&dual, 1u128 << (code.m() - code.n())).unwrap();
        prop_assert_eq!(back, primal);
    }

    #[test]
    fn corrupted_profile_is_rejected(code in ldpc(), at in any::<usize>()) {
        let mut primal = weight_profile(&code, 0).unwrap();
        let i = 1 + at % code.m();
        let j = if i == code.m() { i - 1 } else { i + 1 };
        prop_assume!(primal.counts[i] > 0);
        primal.counts[i] -= 1;
        primal.counts[j] += 1;
        // Moving a word between adjacent weights keeps the total but breaks the transform
        // unless it happens to land on another valid profile.
        if let Ok(t) = macwilliams_transform(&primal, 1u128 << code.n()) {
            prop_assert_ne!(t, dual_weight_profile(&code).unwrap());
        }
    }

    #[test]
    fn kravchuk_recurrence_and_symmetry(m in 0usize..=60) {
        let ev = KravchukEvaluator::new(m);
        prop_assert!(ev.recurrence_defect().is_zero());
        prop_assert!(ev.has_reflection_symmetry());
        for k in 0..=m.min(6) {
            prop_assert_eq!(ev.value(k, 0), &BigInt::from(bits::binomial_u128(m, k)));
        }
    }

    #[test]
    fn kravchuk_table_matches_definition(m in 1usize..=20, k in 0usize..=20, j in 0usize..=20) {
        prop_assume!(k <= m && j <= m);
        let ev = KravchukEvaluator::new(m);
        prop_assert_eq!(ev.value(k, j), &kravchuk(k, j, m).unwrap());
    }

    #[test]
    fn hadamard_is_an_involution(n in 1usize..=10, seed in any::<u64>()) {
        let s = random_state(n, seed);
        prop_assert!(s.hadamarded().hadamarded().distance(&s) < 1e-12);
        prop_assert!((s.hadamarded().norm() - 1.0).abs() < 1e-12);
        prop_assert_eq!(StateVector::from_bytes(&s.to_bytes()).unwrap(), s);
    }

    #[test]
    fn position_conjugated_by_hadamards(code in ldpc(), v in any::<u64>(), seed in any::<u64>()) {
        prop_assume!(code.n() <= 10);
        let v = v & low_mask(code.m());
        let s = random_state(code.n(), seed);
        let lhs = position_apply(&code, v, &s.hadamarded()).unwrap().hadamarded();
        let rhs = fourier_position_apply(&code, v, &s);
        prop_assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn satisfied_matches_position_expectation(code in ldpc(), v in any::<u64>(), seed in any::<u64>()) {
        let inst = XorsatInstance::new(code, v & low_mask(13));
        prop_assume!(inst.v < 1 << inst.m());
        let s = random_state(inst.n(), seed);
        let f = position_apply(&inst.code, inst.v, &s).unwrap();
        let x_hat = s.inner(&f).re / 2.0;
        let gap = expected_satisfied(&s, &inst).unwrap() - inst.m() as f64 / 2.0;
        prop_assert!((gap - x_hat).abs() < 1e-9);
    }

    #[test]
    fn cross_construction_fidelity(code in ldpc(), v in any::<u64>(), w in prop::collection::vec(0.05f64..1.0, 1..=4)) {
        let inst = XorsatInstance::new(code, v & low_mask(13));
        prop_assume!(inst.v < 1 << inst.m());
        let dec = SyndromeDecoder::new(&inst.code, None).unwrap();
        prop_assume!(w.len() - 1 <= dec.radius());
        let weights = DqiWeights::new(w).unwrap();
        let gamma = DqiPolynomial::from_weights(&weights, inst.m()).unwrap();
        let Ok(direct) = build_direct(&inst, &gamma) else { return Ok(()) };
        let fourier = build_fourier(&inst, &weights, &dec).unwrap();
        prop_assert!(direct.overlap(&fourier) >= 1.0 - 1e-9);
        let ct = CtState::new(inst.clone(), weights.clone(), dec).unwrap();
        let had = direct.hadamarded();
        for (s, a) in had.amps().iter().enumerate() {
            prop_assert!((ct.ct_amplitude(s as u64) - a).norm() < 1e-9);
        }
        // The superposition of orthonormal layers obeys the sharp cap, hence the ell^2 one.
        prop_assert!(probability_cap_ratio(&direct, &inst, 1.0).unwrap() <= 1.0 + 1e-9);
        let ell = weights.ell();
        if ell >= 1 {
            prop_assert!(probability_cap_ratio(&direct, &inst, (ell * ell) as f64).unwrap() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn first_moment_identity_is_exact(code in ldpc(), v in any::<u64>()) {
        let d = dqi_core::codes::dual_distance(&code).unwrap();
        prop_assume!(d >= 4);
        let beta = BetaPolynomial::new(code.m(), 2, BetaMode::ZeroB0Root { r: 1 }).unwrap();
        let cert = beta.first_moment_bound().unwrap();
        let profile = weight_profile(&code, v & low_mask(code.m())).unwrap();
        prop_assert!(first_moment_residual(&profile, &cert.gamma, &cert.alpha).is_zero());
    }

    #[test]
    fn exact_sampler_is_exact(n in 1usize..=10, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..1usize << n)
            .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.01..10.0) })
            .collect();
        let Ok(oracle) = CountingOracle::from_values(n, values) else { return Ok(()) };
        let s = StockmeyerSampler::new(&oracle, 0.1, SamplerMode::Exact, seed).unwrap();
        let z = oracle.total();
        for x in 0..1u64 << n {
            let want = oracle.g(x) / z;
            prop_assert!((s.achieved_probability(x) - want).abs() <= 1e-12 * want);
        }
    }

    #[test]
    fn randomized_sampler_contract(n in 1usize..=10, eps in 0.02f64..0.5, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..1usize << n)
            .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.5..50.0) })
            .collect();
        let Ok(oracle) = CountingOracle::from_values(n, values) else { return Ok(()) };
        let s = StockmeyerSampler::new(&oracle, eps, SamplerMode::Randomized, seed).unwrap();
        prop_assert!(s.worst_prefix_error() <= 8.0 * s.delta());
        let z = oracle.total();
        for x in 0..1u64 << n {
            let (q, g) = (s.achieved_probability(x), oracle.g(x) / z);
            if g == 0.0 {
                prop_assert_eq!(q, 0.0);
            } else {
                prop_assert!((q / g - 1.0).abs() <= eps);
            }
        }
    }

    #[test]
    fn shor_probabilities_normalize(order in 1u64..=60, alpha in any::<u64>()) {
        let alpha = alpha % order;
        let mut total = num_rational::Rational64::zero();
        for a in 0..order {
            for b in 0..order {
                total += shor_dl_probability(order, alpha, a, b).unwrap() * order as i64;
            }
        }
        prop_assert_eq!(total, num_rational::Rational64::one());
    }
}

#[test]
fn plain_eigenstates_follow_kravchuk_pattern() {
    for m in 1..=12 {
        let basis = OscillatorBasis::plain(m).unwrap();
        for k in 0..=m {
            let lam = basis.eigenstate(k).unwrap();
            let scale = ((1u64 << m) as f64 * bits::binomial_f64(m, k)).sqrt();
            for y in 0..1u64 << m {
                let want = dqi_core::kravchuk::kravchuk_f64(k, weight(y) as f64, m) / scale;
                assert!(
                    (lam.amps()[y as usize].re - want).abs() < 1e-12,
                    "m={m} k={k} y={y}"
                );
            }
        }
    }
}

/// Upper `1 - p` quantile of chi-squared via the Wilson-Hilferty approximation.
fn chi2_critical(df: f64, z: f64) -> f64 {
    let a = 2.0 / (9.0 * df);
    df * (1.0 - a + z * a.sqrt()).powi(3)
}

#[test]
fn ct_sample_matches_ct_amplitude() {
    for (code, v, w) in [
        (BinaryLinearCode::hamming74(), 0b1011001u64, vec![0.6, 0.8]),
        (
            BinaryLinearCode::simplex(4).unwrap(),
            0b101u64,
            vec![0.3, 0.5, 0.81],
        ),
        (
            BinaryLinearCode::simplex(3).unwrap(),
            0b1100101,
            vec![0.5, -0.5],
        ),
    ] {
        let inst = XorsatInstance::new(code, v);
        let dec = SyndromeDecoder::new(&inst.code, None).unwrap();
        let w = w[..=dec.radius().min(w.len() - 1)].to_vec();
        let ct = CtState::new(inst, DqiWeights::new(w).unwrap(), dec).unwrap();
        let p = ct.distribution().unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let draws = 100_000usize;
        let mut counts = vec![0usize; p.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..draws {
            counts[ct.ct_sample(&mut rng) as usize] += 1;
        }
        let mut stat = 0.0;
        let mut cells = 0;
        for (c, &q) in counts.iter().zip(&p) {
            if q == 0.0 {
                assert_eq!(*c, 0, "draw outside the support");
                continue;
            }
            let e = q * draws as f64;
            stat += (*c as f64 - e).powi(2) / e;
            cells += 1;
        }
        // z = 3.09 is the upper 0.001 normal quantile.
        let crit = chi2_critical((cells - 1) as f64, 3.090);
        assert!(stat < crit, "chi2 {stat} >= {crit} with {cells} cells");
        assert_eq!(ct_sample(&ct, 3), ct_sample(&ct, 3));
    }
}

#[test]
fn first_moment_rational_identity_on_small_codes() {
    let ham = BinaryLinearCode::hamming74();
    let beta = BetaPolynomial::new(7, 2, BetaMode::ZeroB0Root { r: 1 }).unwrap();
    let cert = beta.first_moment_bound().unwrap();
    assert!(cert.beta0.is_zero());
    let mut total = BigRational::zero();
    for v in 0..128 {
        total += first_moment_residual(&weight_profile(&ham, v).unwrap(), &cert.gamma, &cert.alpha);
    }
    assert!(total.is_zero());
}
