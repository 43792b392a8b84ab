//! DQI states for Max-XORSAT instances `Bx = v`.
//!
//! A DQI state weights each assignment by a polynomial of its distance to the
//! target, `psi(x) ∝ gamma(|Bx + v|)`. Writing `gamma = sum_k gamma_k K_k` in
//! the Kravchuk basis, the same state is
//! `H^{⊗n} sum_k w_k C(m,k)^{-1/2} sum_{|y|=k} (-1)^{v.y} |B^T y>`
//! with `w_k ∝ gamma_k sqrt(C(m,k))`, which is how a quantum computer with a
//! syndrome decoder would prepare it.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::{self, low_mask, weight};
use crate::bounds::{kravchuk_coefficients, RationalPoly};
use crate::codes::{parse_code_text, weight_profile, BinaryLinearCode, Decoder, WeightProfile};
use crate::error::{invalid, Error, Result};
use crate::kravchuk::KravchukEvaluator;
use crate::oscillator::{optimal_weights, DqiWeights, StateVector};

/// A Max-XORSAT instance: maximize the number of `i` with `(Bx)_i = v_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XorsatInstance {
    pub code: BinaryLinearCode,
    pub v: u64,
}

impl XorsatInstance {
    pub fn new(code: BinaryLinearCode, v: u64) -> Self {
        let v = v & low_mask(code.m());
        Self { code, v }
    }

    /// Code file followed by a target line.
    pub fn parse(text: &str) -> Result<Self> {
        let (code, v) = parse_code_text(text)?;
        let v = v.ok_or(Error::Parse {
            line: code.m() + 2,
            message: "instance needs a final target line".into(),
        })?;
        Ok(Self::new(code, v))
    }

    pub fn to_text(&self) -> String {
        format!(
            "{}{}\n",
            self.code.to_text(),
            bits::to_bit_string(self.v, self.code.m())
        )
    }

    pub fn m(&self) -> usize {
        self.code.m()
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    /// `|Bx + v|`.
    pub fn distance(&self, x: u64) -> usize {
        weight(self.code.encode(x) ^ self.v)
    }

    /// `m - |Bx + v|`.
    pub fn satisfied(&self, x: u64) -> usize {
        self.m() - self.distance(x)
    }

    /// `f(x) = sum_i (-1)^{(Bx)_i + v_i} = 2 satisfied(x) - m`.
    pub fn score(&self, x: u64) -> i64 {
        2 * self.satisfied(x) as i64 - self.m() as i64
    }

    /// Distances of every assignment, indexed by `x`.
    pub fn distances(&self) -> Result<Vec<usize>> {
        let mut out = vec![0usize; 1 << self.n()];
        self.code
            .for_each_codeword(|x, c| out[x as usize] = weight(c ^ self.v))?;
        Ok(out)
    }

    pub fn profile(&self) -> Result<WeightProfile> {
        weight_profile(&self.code, self.v)
    }

    /// Rejects instances where every assignment sits at the same distance.
    pub fn check_nondegenerate(&self) -> Result<()> {
        let p = self.profile()?;
        if p.counts.iter().filter(|&&c| c > 0).count() < 2 {
            return Err(Error::Degenerate(
                "every assignment satisfies the same number of equations".into(),
            ));
        }
        Ok(())
    }
}

/// `gamma` as coefficients `gamma_0..gamma_ell` in the Kravchuk basis of length `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DqiPolynomial {
    pub m: usize,
    pub gamma_kravchuk: Vec<f64>,
}

impl DqiPolynomial {
    pub fn new(m: usize, gamma_kravchuk: Vec<f64>) -> Result<Self> {
        if gamma_kravchuk.is_empty() || gamma_kravchuk.len() > m + 1 {
            return Err(invalid(format!(
                "need between 1 and {} Kravchuk coefficients, got {}",
                m + 1,
                gamma_kravchuk.len()
            )));
        }
        Ok(Self { m, gamma_kravchuk })
    }

    /// `gamma == 1`.
    pub fn constant(m: usize) -> Self {
        Self {
            m,
            gamma_kravchuk: vec![1.0],
        }
    }

    /// `gamma_k = w_k / sqrt(C(m,k))`.
    pub fn from_weights(weights: &DqiWeights, m: usize) -> Result<Self> {
        let g = weights
            .w
            .iter()
            .enumerate()
            .map(|(k, w)| w / bits::binomial_f64(m, k).sqrt())
            .collect();
        Self::new(m, g)
    }

    /// Kravchuk coefficients of an exact monomial-form polynomial.
    pub fn from_monomial(poly: &RationalPoly, m: usize) -> Result<Self> {
        let ev = KravchukEvaluator::new(m);
        let g = kravchuk_coefficients(poly, &ev)
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect();
        Self::new(m, g)
    }

    /// `w_k ∝ gamma_k sqrt(C(m,k))`, unit norm, largest-magnitude entry positive.
    pub fn to_weights(&self) -> Result<DqiWeights> {
        let mut w: Vec<f64> = self
            .gamma_kravchuk
            .iter()
            .enumerate()
            .map(|(k, g)| g * bits::binomial_f64(self.m, k).sqrt())
            .collect();
        let lead = w
            .iter()
            .copied()
            .fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
        if lead < 0.0 {
            w.iter_mut().for_each(|x| *x = -*x);
        }
        DqiWeights::new(w)
    }

    pub fn ell(&self) -> usize {
        self.gamma_kravchuk.len() - 1
    }

    /// `gamma(j)` for every `j = 0..=m`.
    pub fn values(&self) -> Vec<f64> {
        let ev = KravchukEvaluator::new(self.m);
        (0..=self.m)
            .map(|j| {
                self.gamma_kravchuk
                    .iter()
                    .enumerate()
                    .map(|(k, g)| g * ev.value(k, j).to_f64().unwrap_or(f64::NAN))
                    .sum()
            })
            .collect()
    }
}

/// `psi(x) = gamma(|Bx + v|) / sqrt(Z)` by direct evaluation.
pub fn build_direct(instance: &XorsatInstance, gamma: &DqiPolynomial) -> Result<StateVector> {
    if gamma.m != instance.m() {
        return Err(invalid(format!(
            "polynomial is for m = {}, instance has m = {}",
            gamma.m,
            instance.m()
        )));
    }
    let g = gamma.values();
    let amps: Vec<f64> = instance.distances()?.into_iter().map(|d| g[d]).collect();
    if amps.iter().all(|&a| a == 0.0) {
        return Err(Error::Degenerate(
            "gamma vanishes at every achieved distance".into(),
        ));
    }
    StateVector::from_real(instance.n(), amps)
}

/// The syndrome-register picture: fill `|B^T y>` with `w_{|y|} C(m,|y|)^{-1/2} (-1)^{v.y}`
/// for all `|y| <= ell`, then apply `H^{⊗n}`.
///
/// Every `y` is checked to decode back to itself; a failure means two errors
/// share a syndrome, which is reported as an invariant violation.
pub fn build_fourier(
    instance: &XorsatInstance,
    weights: &DqiWeights,
    decoder: &impl Decoder,
) -> Result<StateVector> {
    let ell = weights.ell();
    if ell > decoder.radius() {
        return Err(invalid(format!(
            "ell = {ell} exceeds the decoder radius {}",
            decoder.radius()
        )));
    }
    let m = instance.m();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << instance.n()];
    for (k, &w) in weights.w.iter().enumerate() {
        let a = w / bits::binomial_f64(m, k).sqrt();
        for y in bits::weight_k_vectors(m, k) {
            let s = instance.code.syndrome(y);
            if decoder.decode(s) != Some(y) {
                return Err(Error::InvariantViolation(format!(
                    "syndrome of weight-{k} error {} does not decode uniquely",
                    bits::to_bit_string(y, m)
                )));
            }
            let phase = bits::sign(instance.v, y);
            amps[s as usize] = Complex64::new(a * phase as f64, 0.0);
        }
    }
    let mut state = StateVector::normalized(instance.n(), amps)?;
    state.hadamard_transform();
    Ok(state)
}

/// `sum_x |psi(x)|^2 (m - |Bx + v|)`.
pub fn expected_satisfied(state: &StateVector, instance: &XorsatInstance) -> Result<f64> {
    if state.qubits() != instance.n() {
        return Err(invalid("state and instance disagree on n"));
    }
    let d = instance.distances()?;
    let m = instance.m() as f64;
    Ok(state.expectation_diagonal(|x| m - d[x as usize] as f64))
}

/// `<satisfied>` under `|psi(x)|^2 ∝ gamma(|Bx + v|)^2`, summed over the weight profile.
///
/// `gamma` is rescaled by its largest magnitude first, so a constant `gamma`
/// reduces to integer arithmetic and `ell = 0` gives exactly `m/2` whenever no
/// row of `B` is zero.
pub fn expected_satisfied_from_profile(
    instance: &XorsatInstance,
    gamma: &DqiPolynomial,
) -> Result<f64> {
    if gamma.m != instance.m() {
        return Err(invalid(format!(
            "polynomial is for m = {}, instance has m = {}",
            gamma.m,
            instance.m()
        )));
    }
    let profile = instance.profile()?;
    let values = gamma.values();
    let scale = values.iter().fold(0.0f64, |a, g| a.max(g.abs()));
    let (mut num, mut den) = (0.0, 0.0);
    for (d, &count) in profile.counts.iter().enumerate() {
        let g = values[d] / scale;
        let u = count as f64 * g * g;
        num += u * (instance.m() - d) as f64;
        den += u;
    }
    if den == 0.0 {
        return Err(Error::Degenerate(
            "gamma vanishes on every occupied distance".into(),
        ));
    }
    Ok(num / den)
}

/// `shots` independent computational-basis measurements.
pub fn sample(state: &StateVector, shots: usize, seed: u64) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(invalid("shots must be at least 1"));
    }
    let dist = WeightedIndex::new(state.probabilities())
        .map_err(|e| Error::Degenerate(format!("cannot sample from state: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..shots).map(|_| dist.sample(&mut rng) as u64).collect())
}

/// Degree-`ell` weights maximizing `<satisfied>` and the matching `gamma`.
pub fn optimal_polynomial(ell: usize, m: usize) -> Result<(DqiWeights, DqiPolynomial, f64)> {
    let (w, value) = optimal_weights(ell, m)?;
    let gamma = DqiPolynomial::from_weights(&w, m)?;
    Ok((w, gamma, value))
}

/// Direct construction of the optimal degree-`ell` state.
pub fn optimal_state(instance: &XorsatInstance, ell: usize) -> Result<StateVector> {
    instance.check_nondegenerate()?;
    let (_, gamma, _) = optimal_polynomial(ell, instance.m())?;
    build_direct(instance, &gamma)
}

/// True when the optimal degree-`ell` value equals `m/2 + top eigenvalue` exactly,
/// which needs the layers `0..=ell+1` to be orthogonal: `2 ell + 1 < d_perp`.
pub fn semicircle_is_exact(ell: usize, dual_distance: usize) -> bool {
    2 * ell + 1 < dual_distance
}

/// Codeword distances near the semicircle point.
#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub m: usize,
    pub n: usize,
    pub ell: usize,
    /// Closed integer band `[band_lo, band_hi]`.
    pub band_lo: usize,
    pub band_hi: usize,
    pub profile: Vec<u64>,
    pub semicircle_count: u64,
    pub semicircle_fraction: f64,
}

impl CensusReport {
    /// `log2(count) / n`, or `None` for an empty band.
    pub fn rate(&self) -> Option<f64> {
        (self.semicircle_count > 0).then(|| (self.semicircle_count as f64).log2() / self.n as f64)
    }
}

/// `m/2 ± sqrt(ell (m - ell))` rounded outward to integers and clipped to `[0, m]`.
pub fn semicircle_band(m: usize, ell: usize) -> (usize, usize) {
    let r = ((ell * (m - ell.min(m))) as f64).sqrt();
    let half = m as f64 / 2.0;
    let lo = (half - r).floor().max(0.0) as usize;
    let hi = ((half + r).ceil() as usize).min(m);
    (lo, hi)
}

/// Counts assignments whose distance lies in [`semicircle_band`].
pub fn codeword_census(instance: &XorsatInstance, ell: usize) -> Result<CensusReport> {
    if ell > instance.m() {
        return Err(invalid(format!("ell = {ell} exceeds m = {}", instance.m())));
    }
    let profile = instance.profile()?;
    let (band_lo, band_hi) = semicircle_band(instance.m(), ell);
    let count: u64 = profile.counts[band_lo..=band_hi].iter().sum();
    Ok(CensusReport {
        m: instance.m(),
        n: instance.n(),
        ell,
        band_lo,
        band_hi,
        semicircle_fraction: count as f64 / (1u64 << instance.n()) as f64,
        semicircle_count: count,
        profile: profile.counts,
    })
}

/// Sharp cap on `|psi(x)|^2` for any unit superposition of orthonormal levels:
/// `2^{m-n} / C(m, |Bx + v|)`, from `sum_k K_k(d)^2 / C(m,k) = 2^m / C(m,d)`.
pub fn probability_cap(m: usize, n: usize, distance: usize) -> f64 {
    2f64.powi((m - n) as i32) / bits::binomial_f64(m, distance)
}

/// Largest ratio `|psi(x)|^2 / (factor * cap(x))` over all `x`; at most one when the
/// cap holds pointwise.
pub fn probability_cap_ratio(
    state: &StateVector,
    instance: &XorsatInstance,
    factor: f64,
) -> Result<f64> {
    let d = instance.distances()?;
    Ok(state
        .probabilities()
        .iter()
        .zip(d)
        .map(|(p, dist)| p / (factor * probability_cap(instance.m(), instance.n(), dist)))
        .fold(0.0, f64::max))
}
