//! Classical sampling procedures around DQI states.
//!
//! * A chain-rule sampler driven by prefix-sum counts. The counting oracle is
//!   realized exactly (threshold counts over the extended `(x, t)` domain) and,
//!   in randomized mode, perturbed by a seeded multiplicative error so the
//!   error-propagation algebra is exercised.
//! * Amplitude and sampling access to the Hadamard-transformed DQI state,
//!   which a syndrome decoder makes classically tractable.
//! * A prefix-tree search for heavy outcomes of the DQI state built from those
//!   two primitives.
//! * Output probabilities of the discrete-logarithm algorithm.

use std::collections::HashMap;

use num_complex::Complex64;
use num_rational::Rational64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::{self, low_mask};
use crate::codes::{Decoder, SyndromeDecoder};
use crate::dqi::XorsatInstance;
use crate::error::{check_budget, invalid, Error, Result};
use crate::oscillator::{DqiWeights, StateVector};

/// A non-negative target function on `n`-bit strings, tabulated, with bounds
/// `A >= max g` and `0 < a <= min { g(x) : g(x) > 0 }`.
#[derive(Debug, Clone)]
pub struct CountingOracle {
    n: usize,
    values: Vec<f64>,
    upper: f64,
    lower: f64,
}

impl CountingOracle {
    /// Tabulates `g` and derives tight bounds.
    pub fn from_fn(n: usize, g: impl Fn(u64) -> f64) -> Result<Self> {
        check_budget("oracle inputs", n as u32)?;
        Self::from_values(n, (0..1u64 << n).map(g).collect())
    }

    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 1 << n {
            return Err(invalid(format!(
                "expected {} values, got {}",
                1u64 << n,
                values.len()
            )));
        }
        if values.iter().any(|&g| !g.is_finite() || g < 0.0) {
            return Err(invalid("target values must be finite and non-negative"));
        }
        let upper = values.iter().copied().fold(0.0, f64::max);
        if upper == 0.0 {
            return Err(Error::NoDistribution);
        }
        let lower = values
            .iter()
            .copied()
            .filter(|&g| g > 0.0)
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            n,
            values,
            upper,
            lower,
        })
    }

    /// `g(x) = |amps[x]|^2`.
    pub fn from_state(state: &StateVector) -> Result<Self> {
        Self::from_values(state.qubits(), state.probabilities())
    }

    /// Replaces the derived bounds with looser caller-supplied ones.
    pub fn with_bounds(mut self, upper: f64, lower: f64) -> Result<Self> {
        if upper < self.upper || lower > self.lower || lower <= 0.0 {
            return Err(invalid(format!(
                "bounds A = {upper}, a = {lower} do not enclose the range [{}, {}]",
                self.lower, self.upper
            )));
        }
        self.upper = upper;
        self.lower = lower;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn g(&self, x: u64) -> f64 {
        self.values[x as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `sum { g(x) : x agrees with prefix on bits 0..level }`.
    pub fn prefix_sum(&self, level: usize, prefix: u64) -> f64 {
        let stride = 1usize << level;
        self.values[prefix as usize..].iter().step_by(stride).sum()
    }
}

/// How prefix masses are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerMode {
    /// Exact prefix sums.
    Exact,
    /// Discretized threshold counts with seeded `(1 ± delta)` counting error.
    Randomized,
}

/// Chain-rule sampler over the low-bit-first prefix tree of an oracle.
#[derive(Debug, Clone)]
pub struct StockmeyerSampler {
    n: usize,
    mode: SamplerMode,
    epsilon: f64,
    delta: f64,
    j_bits: u32,
    k_bits: u32,
    z_estimate: f64,
    /// `tree[t][p]`: mass (exact) or `2^n alpha_{S_p}` (randomized) of prefix `p` of length `t`.
    tree: Vec<Vec<f64>>,
    exact: Vec<Vec<f64>>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic `u in [-1, 1]` keyed by `(seed, level, prefix)`.
fn counting_noise(seed: u64, level: usize, prefix: u64) -> f64 {
    let h = splitmix(seed ^ splitmix((level as u64) << 40 ^ prefix));
    (h >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

fn sum_tree(leaves: Vec<f64>, n: usize) -> Vec<Vec<f64>> {
    let mut tree = vec![Vec::new(); n + 1];
    tree[n] = leaves;
    for t in (0..n).rev() {
        let half = 1usize << t;
        tree[t] = (0..half)
            .map(|p| tree[t + 1][p] + tree[t + 1][p + half])
            .collect();
    }
    tree
}

impl StockmeyerSampler {
    /// Prepares all prefix masses. `seed` drives the counting noise in randomized mode.
    pub fn new(
        oracle: &CountingOracle,
        epsilon: f64,
        mode: SamplerMode,
        seed: u64,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(invalid(format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        let n = oracle.n();
        let exact = sum_tree(oracle.values().to_vec(), n);
        // The chain-rule accounting loses a factor (1 + 8 delta) per level; three
        // levels is the floor that keeps the overall ratio inside 1 ± epsilon.
        let delta = epsilon / (8.0 * n.max(3) as f64);
        if mode == SamplerMode::Exact {
            let z = exact[0][0];
            return Ok(Self {
                n,
                mode,
                epsilon,
                delta,
                j_bits: 0,
                k_bits: 0,
                z_estimate: z,
                tree: exact.clone(),
                exact,
            });
        }
        let (upper, lower) = (oracle.upper(), oracle.lower());
        // A / 2^j <= delta a
        let j_bits = (upper / (delta * lower)).log2().ceil().max(0.0) as u32;
        // 1 / 2^k <= delta a / (2^n max(A, 1))
        let k_bits = ((1u64 << n) as f64 * upper.max(1.0) / (delta * lower))
            .log2()
            .ceil()
            .max(0.0) as u32;
        if j_bits > 100 || k_bits > 100 {
            return Err(invalid(
                "dynamic range A/a too large for the threshold registers",
            ));
        }
        let scale_j = 2f64.powi(j_bits as i32);
        let scale_k = 2f64.powi(k_bits as i32);
        // p_Z: fraction of (x, t) with t / 2^j < g(x) / A.
        let count_z: u128 = oracle
            .values()
            .iter()
            .map(|&g| (g / upper * scale_j).ceil().min(scale_j) as u128)
            .sum();
        let p_z = count_z as f64 / ((1u64 << n) as f64 * scale_j);
        let alpha_z = p_z * (1.0 + delta * counting_noise(seed, usize::MAX, 0));
        let z_estimate = upper * (1u64 << n) as f64 * alpha_z;
        // Per-x counts of t with t / 2^k < g(x) / Z~, summed up the prefix tree.
        let leaves: Vec<u128> = oracle
            .values()
            .iter()
            .map(|&g| (g / z_estimate * scale_k).ceil().min(scale_k) as u128)
            .collect();
        let mut counts = vec![Vec::new(); n + 1];
        counts[n] = leaves;
        for t in (0..n).rev() {
            let half = 1usize << t;
            counts[t] = (0..half)
                .map(|p| counts[t + 1][p] + counts[t + 1][p + half])
                .collect();
        }
        let tree = counts
            .iter()
            .enumerate()
            .map(|(t, level)| {
                level
                    .iter()
                    .enumerate()
                    .map(|(p, &c)| {
                        // 2^n alpha = 2^n p_v (1 + delta u) with p_v = c / 2^{n+k}.
                        c as f64 / scale_k * (1.0 + delta * counting_noise(seed, t, p as u64))
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            n,
            mode,
            epsilon,
            delta,
            j_bits,
            k_bits,
            z_estimate,
            tree,
            exact,
        })
    }

    pub fn mode(&self) -> SamplerMode {
        self.mode
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Widths of the two threshold registers (zero in exact mode).
    pub fn register_bits(&self) -> (u32, u32) {
        (self.j_bits, self.k_bits)
    }

    pub fn z_estimate(&self) -> f64 {
        self.z_estimate
    }

    /// Prefix estimate, normalized so the exact value is `sum_{x in S_p} g(x) / Z`.
    pub fn prefix_estimate(&self, level: usize, prefix: u64) -> f64 {
        let v = self.tree[level][prefix as usize];
        match self.mode {
            SamplerMode::Exact => v / self.exact[0][0],
            SamplerMode::Randomized => v,
        }
    }

    /// `sum_{x in S_p} g(x) / Z`.
    pub fn prefix_exact(&self, level: usize, prefix: u64) -> f64 {
        self.exact[level][prefix as usize] / self.exact[0][0]
    }

    /// Largest `|estimate / exact - 1|` over all prefixes with nonzero mass.
    pub fn worst_prefix_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for t in 0..=self.n {
            for p in 0..1u64 << t {
                let e = self.prefix_exact(t, p);
                if e > 0.0 {
                    worst = worst.max((self.prefix_estimate(t, p) / e - 1.0).abs());
                } else if self.prefix_estimate(t, p) != 0.0 {
                    return f64::INFINITY;
                }
            }
        }
        worst
    }

    /// Correction constant `c = (1 + 8 delta) / (1 - 8 delta)` for the randomized chain.
    fn chain_slack(&self) -> f64 {
        (1.0 + 8.0 * self.delta) / (1.0 - 8.0 * self.delta)
    }

    /// Output probability `q(x)` of [`Self::sample`].
    pub fn achieved_probability(&self, x: u64) -> f64 {
        let leaves = &self.tree[self.n];
        if leaves[x as usize] == 0.0 {
            return 0.0;
        }
        match self.mode {
            SamplerMode::Exact => {
                let mut q = 1.0;
                for t in 0..self.n {
                    let p = (x & low_mask(t)) as usize;
                    let child = (x & low_mask(t + 1)) as usize;
                    q *= self.tree[t + 1][child] / self.tree[t][p];
                }
                q
            }
            SamplerMode::Randomized => leaves[x as usize] / leaves.iter().sum::<f64>(),
        }
    }

    /// Draws one string and reports its output probability.
    ///
    /// Exact mode walks the tree with the true conditional probabilities. In
    /// randomized mode each step picks child `b` with probability
    /// `alpha_{pb} / (c alpha_p)` and restarts otherwise; the product telescopes,
    /// so `q(x) = alpha_x / sum_y alpha_y`.
    pub fn sample(&self, rng: &mut impl RngCore) -> Result<(u64, f64)> {
        let c = match self.mode {
            SamplerMode::Exact => 1.0,
            SamplerMode::Randomized => self.chain_slack(),
        };
        for _ in 0..10_000 {
            let mut x = 0u64;
            let mut accepted = true;
            for t in 0..self.n {
                let half = 1u64 << t;
                let parent = self.tree[t][x as usize];
                let a0 = self.tree[t + 1][x as usize];
                let a1 = self.tree[t + 1][(x | half) as usize];
                let u: f64 = rng.random::<f64>() * c * parent;
                if u < a0 {
                } else if u < a0 + a1 {
                    x |= half;
                } else if self.mode == SamplerMode::Exact {
                    // Rounding at the top edge of the exact split.
                    x |= if a1 > 0.0 { half } else { 0 };
                } else {
                    accepted = false;
                    break;
                }
            }
            if accepted {
                return Ok((x, self.achieved_probability(x)));
            }
        }
        Err(Error::InternalConsistency(
            "chain-rule sampler kept restarting".into(),
        ))
    }
}

/// One draw from `g / Z` up to a `(1 ± epsilon)` factor.
pub fn stockmeyer_sample(
    oracle: &CountingOracle,
    epsilon: f64,
    seed: u64,
    mode: SamplerMode,
) -> Result<(u64, f64)> {
    let sampler = StockmeyerSampler::new(oracle, epsilon, mode, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sampler.sample(&mut rng)
}

/// Hadamard transform of a DQI state, accessed through the decoder.
#[derive(Debug, Clone)]
pub struct CtState {
    pub weights: DqiWeights,
    pub instance: XorsatInstance,
    pub decoder: SyndromeDecoder,
    layer_dist: WeightedIndex<f64>,
    layer_amp: Vec<f64>,
}

impl CtState {
    pub fn new(
        instance: XorsatInstance,
        weights: DqiWeights,
        decoder: SyndromeDecoder,
    ) -> Result<Self> {
        if weights.ell() > decoder.radius() {
            return Err(invalid(format!(
                "ell = {} exceeds the decoder radius {}",
                weights.ell(),
                decoder.radius()
            )));
        }
        if decoder.code() != &instance.code {
            return Err(invalid("decoder was built for a different code"));
        }
        let layer_dist = WeightedIndex::new(weights.w.iter().map(|w| w * w))
            .map_err(|e| Error::Degenerate(format!("layer weights: {e}")))?;
        let m = instance.m();
        let layer_amp = weights
            .w
            .iter()
            .enumerate()
            .map(|(k, w)| w / bits::binomial_f64(m, k).sqrt())
            .collect();
        Ok(Self {
            weights,
            instance,
            decoder,
            layer_dist,
            layer_amp,
        })
    }

    pub fn n(&self) -> usize {
        self.instance.n()
    }

    /// `<s|H^{⊗n}|psi>`: `w_{|y|} C(m,|y|)^{-1/2} (-1)^{v.y}` if `s = B^T y` decodes
    /// with `|y| <= ell`, else zero.
    pub fn ct_amplitude(&self, s: u64) -> Complex64 {
        match self.decoder.decode(s) {
            Some(y) if bits::weight(y) <= self.weights.ell() => {
                let a = self.layer_amp[bits::weight(y)];
                Complex64::new(a * bits::sign(self.instance.v, y) as f64, 0.0)
            }
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Layer `k` with probability `w_k^2`, then a uniform weight-`k` error `y`; returns `B^T y`.
    pub fn ct_sample(&self, rng: &mut impl RngCore) -> u64 {
        let k = self.layer_dist.sample(rng);
        let y = index::sample(rng, self.instance.m(), k)
            .into_iter()
            .fold(0u64, |acc, i| acc | (1u64 << i));
        self.instance.code.syndrome(y)
    }

    /// `|ct_amplitude(s)|^2` for every `s`.
    pub fn distribution(&self) -> Result<Vec<f64>> {
        check_budget("syndromes", self.n() as u32)?;
        Ok((0..1u64 << self.n())
            .map(|s| self.ct_amplitude(s).norm_sqr())
            .collect())
    }

    /// The full Hadamarded state as a dense vector.
    pub fn to_state(&self) -> Result<StateVector> {
        check_budget("syndromes", self.n() as u32)?;
        StateVector::from_raw(
            self.n(),
            (0..1u64 << self.n())
                .map(|s| self.ct_amplitude(s))
                .collect(),
        )
    }
}

/// `ct_amplitude(s)` on a free-standing state.
pub fn ct_amplitude(ct: &CtState, s: u64) -> Complex64 {
    ct.ct_amplitude(s)
}

/// One seeded `ct_sample` draw.
pub fn ct_sample(ct: &CtState, seed: u64) -> u64 {
    ct.ct_sample(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// One prefix decision of [`peak_find`].
#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    /// Fixed low bits, bit 0 first.
    pub prefix: String,
    pub estimate: f64,
    pub draws: usize,
    pub exact: Option<f64>,
    pub kept: bool,
}

/// Knobs for [`peak_find`].
#[derive(Debug, Clone)]
pub struct PeakFindConfig {
    /// Each prefix starts with `draw_factor / threshold` draws and adds batches of
    /// that size while the estimate is within `z` standard errors of the cut.
    pub draw_factor: f64,
    /// Hard cap: at most `max_draw_factor / threshold` draws per prefix.
    pub max_draw_factor: f64,
    pub z: f64,
    /// Record exact prefix masses in the trace (enumerates the decodable syndromes).
    pub trace_exact: bool,
}

impl Default for PeakFindConfig {
    fn default() -> Self {
        Self {
            draw_factor: 64.0,
            max_draw_factor: 2048.0,
            z: 5.0,
            trace_exact: false,
        }
    }
}

impl PeakFindConfig {
    /// Exactly `draw_factor / threshold` draws per prefix, no extension.
    pub fn fixed(draw_factor: f64) -> Self {
        Self {
            draw_factor,
            max_draw_factor: draw_factor,
            ..Self::default()
        }
    }
}

/// Smallest threshold [`peak_find`] accepts.
pub const MIN_PEAK_THRESHOLD: f64 = 1.0 / (1u64 << 20) as f64;

/// Estimates `sum { |psi(x)|^2 : x has low bits u }` for a prefix of length `t`.
///
/// With `s ~ |psi'|^2` and `s1'` uniform on the low `t` bits,
/// `X = (-1)^{u.(s1 + s1')} psi'(s1', s2) / psi'(s)` has mean equal to the prefix
/// mass and second moment at most one.
fn prefix_mass_sample(ct: &CtState, rng: &mut ChaCha8Rng, t: usize, u: u64) -> f64 {
    let s = ct.ct_sample(rng);
    let low = low_mask(t);
    let s1_new = rng.random::<u64>() & low;
    let swapped = (s & !low) | s1_new;
    let sign = bits::sign(u, (s ^ swapped) & low) as f64;
    let num = ct.ct_amplitude(swapped);
    let den = ct.ct_amplitude(s);
    sign * (num / den).re
}

/// Sequential estimate: batches of `batch` draws until the mean is `z` standard
/// errors away from `cut` or `max_draws` is reached. Returns `(mean, draws)`.
fn estimate_prefix(
    ct: &CtState,
    rng: &mut ChaCha8Rng,
    (t, u): (usize, u64),
    cut: f64,
    batch: usize,
    max_draws: usize,
    z: f64,
) -> (f64, usize) {
    let (mut sum, mut sum_sq, mut count) = (0.0, 0.0, 0usize);
    loop {
        for _ in 0..batch.min(max_draws - count) {
            let x = prefix_mass_sample(ct, rng, t, u);
            sum += x;
            sum_sq += x * x;
        }
        count += batch.min(max_draws - count);
        let mean = sum / count as f64;
        let var = (sum_sq / count as f64 - mean * mean).max(0.0);
        if count >= max_draws || (mean - cut).abs() > z * (var / count as f64).sqrt() {
            return (mean, count);
        }
    }
}

/// Exact prefix masses of the DQI state by summing over the decodable syndromes.
fn exact_prefix_mass(support: &[(u64, Complex64)], t: usize, u: u64) -> f64 {
    let low = low_mask(t);
    let mut by_high: HashMap<u64, Complex64> = HashMap::new();
    for &(s, a) in support {
        *by_high.entry(s & !low).or_default() += a * bits::sign(u, s & low) as f64;
    }
    by_high.values().map(|f| f.norm_sqr()).sum::<f64>() / (1u64 << t) as f64
}

/// Finds the outcomes `x` with `|<x|psi>|^2 >= threshold` of the DQI state `psi`
/// whose Hadamard transform is `ct`.
///
/// Grows low-bit prefixes one bit at a time and keeps a prefix while its
/// estimated mass is at least `3/4` of the threshold. Returned strings are
/// sorted ascending.
pub fn peak_find(
    ct: &CtState,
    threshold: f64,
    seed: u64,
    config: &PeakFindConfig,
    mut trace: Option<&mut Vec<TraceRecord>>,
) -> Result<Vec<u64>> {
    if !(MIN_PEAK_THRESHOLD..=1.0).contains(&threshold) {
        return Err(invalid(format!("threshold {threshold} outside [2^-20, 1]")));
    }
    if !(config.draw_factor > 0.0 && config.max_draw_factor >= config.draw_factor && config.z > 0.0)
    {
        return Err(invalid(
            "peak_find needs 0 < draw_factor <= max_draw_factor and z > 0",
        ));
    }
    let n = ct.n();
    let batch = (config.draw_factor / threshold).ceil() as usize;
    let max_draws = ((config.max_draw_factor / threshold).ceil() as usize).max(batch);
    let cut = 0.75 * threshold;
    let support: Vec<(u64, Complex64)> = if config.trace_exact && trace.is_some() {
        check_budget("syndromes", n as u32)?;
        (0..1u64 << n)
            .map(|s| (s, ct.ct_amplitude(s)))
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .collect()
    } else {
        Vec::new()
    };
    let threads = std::thread::available_parallelism()
        .map_or(1, |p| p.get())
        .min(16);
    let mut alive = vec![0u64];
    for t in 1..=n {
        let children: Vec<u64> = alive.iter().flat_map(|&p| [p, p | 1 << (t - 1)]).collect();
        // Each prefix owns a generator keyed by (seed, depth, prefix), so the
        // result does not depend on how the siblings are spread over threads.
        let estimate = |u: u64| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix((t as u64) << 40 ^ u)));
            estimate_prefix(ct, &mut rng, (t, u), cut, batch, max_draws, config.z)
        };
        let chunk = children.len().div_ceil(threads);
        let estimates: Vec<(f64, usize)> = if threads == 1 || children.len() < 4 {
            children.iter().map(|&u| estimate(u)).collect()
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = children
                    .chunks(chunk)
                    .map(|part| {
                        scope.spawn(|| part.iter().map(|&u| estimate(u)).collect::<Vec<_>>())
                    })
                    .collect();
                handles
                    .into_iter()
                    .flat_map(|h| h.join().expect("estimator thread panicked"))
                    .collect()
            })
        };
        let mut next = Vec::new();
        for (&u, &(est, draws)) in children.iter().zip(&estimates) {
            let kept = est >= cut;
            if let Some(tr) = trace.as_deref_mut() {
                tr.push(TraceRecord {
                    prefix: bits::to_bit_string(u, t),
                    estimate: est,
                    draws,
                    exact: config
                        .trace_exact
                        .then(|| exact_prefix_mass(&support, t, u)),
                    kept,
                });
            }
            if kept {
                next.push(u);
            }
        }
        // At most 4/(3 threshold) disjoint prefixes can carry that much mass;
        // more survivors means the estimates have gone wrong.
        if next.len() as f64 > 2.0 / threshold + 2.0 {
            return Err(Error::InternalConsistency(format!(
                "{} prefixes survived at depth {t}",
                next.len()
            )));
        }
        alive = next;
    }
    alive.sort_unstable();
    Ok(alive)
}

/// Probability of reading `(a, b, c)` from the discrete-log circuit, for any `c`:
/// `1/N^2` when `a = b alpha (mod N)` and zero otherwise.
pub fn shor_dl_probability(order: u64, log_value: u64, a: u64, b: u64) -> Result<Rational64> {
    if order == 0 || order > 1 << 31 {
        return Err(invalid(format!("group order {order} outside 1..=2^31")));
    }
    if a >= order || b >= order || log_value >= order {
        return Err(invalid(format!(
            "a = {a}, b = {b}, alpha = {log_value} must be below N = {order}"
        )));
    }
    let n = order as i64;
    if (b as u128 * log_value as u128 % order as u128) as u64 == a {
        Ok(Rational64::new(1, n * n))
    } else {
        Ok(Rational64::new(0, 1))
    }
}

/// Amplitude of `|a, b, g^c>` in `N^{-1} sum_{d, nu} omega^{nu d} |nu alpha, nu, g^d>`,
/// accumulated term by term.
pub fn shor_dl_amplitude(order: u64, log_value: u64, a: u64, b: u64, c: u64) -> Complex64 {
    let n = order as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for nu in 0..order {
        if nu * log_value % order != a || nu != b {
            continue;
        }
        let d = c;
        let angle = 2.0 * std::f64::consts::PI * ((nu * d) % order) as f64 / n;
        acc += Complex64::from_polar(1.0 / n, angle);
    }
    acc
}

/// `g^e mod p`.
pub fn mod_pow(mut g: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    g %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * g as u128) % p as u128) as u64;
        }
        g = ((g as u128 * g as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::BinaryLinearCode;
    use crate::dqi::{build_direct, DqiPolynomial};

    fn hamming_ct(v: u64, w: Vec<f64>) -> CtState {
        let inst = XorsatInstance::new(BinaryLinearCode::hamming74(), v);
        let dec = SyndromeDecoder::new(&inst.code, None).unwrap();
        CtState::new(inst, DqiWeights::new(w).unwrap(), dec).unwrap()
    }

    #[test]
    fn oracle_rejects_zero_target() {
        assert!(matches!(
            CountingOracle::from_fn(3, |_| 0.0),
            Err(Error::NoDistribution)
        ));
        assert!(CountingOracle::from_fn(3, |x| x as f64 - 1.0).is_err());
        let o = CountingOracle::from_fn(3, |x| x as f64).unwrap();
        assert_eq!((o.upper(), o.lower()), (7.0, 1.0));
        assert!(o.clone().with_bounds(8.0, 0.5).is_ok());
        assert!(o.with_bounds(6.0, 0.5).is_err());
    }

    #[test]
    fn point_mass_is_reproduced() {
        let o = CountingOracle::from_fn(5, |x| if x == 19 { 2.5 } else { 0.0 }).unwrap();
        for mode in [SamplerMode::Exact, SamplerMode::Randomized] {
            for seed in 0..20 {
                let (x, q) = stockmeyer_sample(&o, 0.1, seed, mode).unwrap();
                assert_eq!(x, 19);
                assert!((q - 1.0).abs() < 1e-12);
            }
        }
        assert!(stockmeyer_sample(&o, 0.0, 1, SamplerMode::Exact).is_err());
        assert!(stockmeyer_sample(&o, 1.0, 1, SamplerMode::Exact).is_err());
    }

    #[test]
    fn exact_mode_achieves_target() {
        let o = CountingOracle::from_fn(8, |x| ((x * 37 % 11) as f64).powi(2)).unwrap();
        let s = StockmeyerSampler::new(&o, 0.1, SamplerMode::Exact, 0).unwrap();
        let z = o.total();
        for x in 0..256 {
            let want = o.g(x) / z;
            assert!((s.achieved_probability(x) - want).abs() <= 1e-12 * want.max(1e-300));
        }
    }

    #[test]
    fn randomized_mode_meets_contract() {
        let o = CountingOracle::from_fn(9, |x| 1.0 + ((x * 2654435761) % 1000) as f64).unwrap();
        for seed in 0..4 {
            let s = StockmeyerSampler::new(&o, 0.1, SamplerMode::Randomized, seed).unwrap();
            assert!(s.worst_prefix_error() <= 8.0 * s.delta());
            let z = o.total();
            for x in 0..512 {
                let r = s.achieved_probability(x) / (o.g(x) / z);
                assert!((r - 1.0).abs() <= 0.1, "x={x} ratio={r}");
            }
        }
    }

    #[test]
    fn randomized_sampler_draws_support_only() {
        let o =
            CountingOracle::from_fn(6, |x| if x % 3 == 0 { (x + 1) as f64 } else { 0.0 }).unwrap();
        let s = StockmeyerSampler::new(&o, 0.2, SamplerMode::Randomized, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let (x, q) = s.sample(&mut rng).unwrap();
            assert!(x % 3 == 0 && q > 0.0);
        }
    }

    #[test]
    fn ct_amplitude_examples() {
        let ct = hamming_ct(0b0100000, vec![0.6, 0.8]);
        assert!((ct.ct_amplitude(0).re - 0.6).abs() < 1e-15);
        let e1 = 1u64 << 5;
        let s = ct.instance.code.syndrome(e1);
        assert!((ct.ct_amplitude(s).re + 0.8 / 7f64.sqrt()).abs() < 1e-15);
        let e0 = 1u64;
        assert!(
            (ct.ct_amplitude(ct.instance.code.syndrome(e0)).re - 0.8 / 7f64.sqrt()).abs() < 1e-15
        );
        // Hamming [7,4] with radius 1 reaches 8 of the 16 syndromes.
        assert_eq!(
            (0..16)
                .filter(|&s| ct.ct_amplitude(s).norm() == 0.0)
                .count(),
            8
        );
    }

    #[test]
    fn ct_matches_hadamarded_direct_state() {
        let ct = hamming_ct(0b1101001, vec![0.3, -0.7]);
        let gamma = DqiPolynomial::from_weights(&ct.weights, 7).unwrap();
        let direct = build_direct(&ct.instance, &gamma).unwrap().hadamarded();
        let ctv = ct.to_state().unwrap();
        assert!(ctv.distance(&direct) < 1e-12);
    }

    #[test]
    fn ct_sampling_examples() {
        let zero = hamming_ct(0b11, vec![1.0]);
        assert!((0..50).all(|seed| ct_sample(&zero, seed) == 0));
        let ct = hamming_ct(0, vec![0.6, 0.8]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 100_000;
        let mut layer1 = 0usize;
        for _ in 0..draws {
            if ct.ct_sample(&mut rng) != 0 {
                layer1 += 1;
            }
        }
        let p = 0.64;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        assert!((layer1 as f64 - draws as f64 * p).abs() < 3.0 * sd);
    }

    #[test]
    fn peak_find_examples() {
        // Simplex code: all nonzero codewords have weight 4, and gamma(j) = 8 - 2j
        // vanishes there, leaving only x = 0.
        let inst = XorsatInstance::new(BinaryLinearCode::simplex(3).unwrap(), 0);
        let dec = SyndromeDecoder::new(&inst.code, None).unwrap();
        let g = DqiPolynomial::new(7, vec![1.0, 1.0]).unwrap();
        let ct = CtState::new(inst.clone(), g.to_weights().unwrap(), dec.clone()).unwrap();
        let direct = build_direct(&inst, &g).unwrap();
        assert!((direct.amps()[0].norm() - 1.0).abs() < 1e-12);
        let found = peak_find(&ct, 0.5, 3, &PeakFindConfig::default(), None).unwrap();
        assert_eq!(found, vec![0]);

        let ham = XorsatInstance::new(BinaryLinearCode::random_ldpc(14, 8, 3, 2).unwrap(), 0);
        let dec = SyndromeDecoder::new(&ham.code, Some(0)).unwrap();
        let uniform = CtState::new(ham, DqiWeights::new(vec![1.0]).unwrap(), dec).unwrap();
        let config = PeakFindConfig::default();
        assert!(peak_find(&uniform, 1.0 / 128.0, 1, &config, None)
            .unwrap()
            .is_empty());
        assert!(peak_find(&uniform, 1e-7, 1, &config, None).is_err());
    }

    #[test]
    fn peak_trace_records_prefixes() {
        let ct = hamming_ct(0b1010101, vec![0.5, 0.5f64.sqrt() * 1.2]);
        let mut trace = Vec::new();
        let config = PeakFindConfig {
            trace_exact: true,
            ..Default::default()
        };
        peak_find(&ct, 0.2, 11, &config, Some(&mut trace)).unwrap();
        assert!(trace.len() >= 2);
        assert_eq!(trace[0].prefix.len(), 1);
        let direct = ct.to_state().unwrap().hadamarded().probabilities();
        for rec in &trace {
            let t = rec.prefix.len();
            let u = bits::parse_bit_string(&rec.prefix).unwrap();
            let mass: f64 = (0..16u64)
                .filter(|x| x & low_mask(t) == u)
                .map(|x| direct[x as usize])
                .sum();
            assert!((rec.exact.unwrap() - mass).abs() < 1e-12);
        }
    }

    #[test]
    fn shor_examples() {
        assert_eq!(
            shor_dl_probability(10, 3, 0, 0).unwrap(),
            Rational64::new(1, 100)
        );
        assert_eq!(
            shor_dl_probability(10, 3, 6, 2).unwrap(),
            Rational64::new(1, 100)
        );
        assert_eq!(
            shor_dl_probability(10, 3, 5, 2).unwrap(),
            Rational64::new(0, 1)
        );
        // 2 generates Z_11^*, and 2^3 = 8.
        assert_eq!(mod_pow(2, 6, 11), mod_pow(8, 2, 11));
        assert!(shor_dl_probability(10, 3, 10, 0).is_err());
        for (a, b, c) in [(6u64, 2u64, 4u64), (0, 0, 0), (5, 2, 1)] {
            let p = shor_dl_amplitude(10, 3, a, b, c).norm_sqr();
            let want = *shor_dl_probability(10, 3, a, b).unwrap().numer() as f64 / 100.0;
            assert!((p - want).abs() < 1e-15);
        }
    }
}
