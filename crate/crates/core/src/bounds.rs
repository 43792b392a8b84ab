//! MacWilliams transforms and Kravchuk-basis certificates for covering-radius
//! and concentric-ball statements.
//!
//! The certificates all follow one pattern: a polynomial `beta` of degree
//! below `d_perp` has `sum_c beta(|c - v|) = |C| beta_0` for every point `v`,
//! so a sign condition on `beta` plus the sign of `beta_0` forces a codeword
//! into a prescribed distance range.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::bits::{self, low_mask, weight};
use crate::codes::{dual_distance, weight_profile, BinaryLinearCode, WeightProfile};
use crate::error::{check_budget, invalid, Error, Result, ENUMERATION_BUDGET_LOG2};
use crate::kravchuk::{roots, KravchukEvaluator, RootEnclosure};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Polynomial with rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `x - root`.
    pub fn linear(root: &BigRational) -> Self {
        Self::new(vec![-root.clone(), BigRational::one()])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a BigRational>) -> Self {
        roots
            .into_iter()
            .fold(Self::constant(BigRational::one()), |p, r| {
                p.mul(&Self::linear(r))
            })
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::new(Vec::new());
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_int(&self, x: i64) -> BigRational {
        self.eval(&rat(x))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + rat_to_f64(c))
    }

    /// Quotient and remainder of division by `x - root`.
    pub fn div_linear(&self, root: &BigRational) -> (Self, BigRational) {
        if self.is_zero() {
            return (self.clone(), BigRational::zero());
        }
        let d = self.coeffs.len() - 1;
        let mut q = vec![BigRational::zero(); d];
        let mut carry = BigRational::zero();
        for i in (0..=d).rev() {
            let c = &self.coeffs[i] + &carry * root;
            if i == 0 {
                return (Self::new(q), c);
            }
            q[i - 1] = c.clone();
            carry = c;
        }
        unreachable!()
    }

    /// Exact square root over the rationals, if `self = g^2` for some `g` with
    /// positive leading coefficient.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let deg = self.coeffs.len() - 1;
        if deg % 2 == 1 {
            return None;
        }
        let lead = rational_sqrt(&self.coeffs[deg])?;
        let half = deg / 2;
        let mut g = vec![BigRational::zero(); half + 1];
        g[half] = lead.clone();
        let two_lead = &lead * rat(2);
        for i in 1..=half {
            let mut c = self.coeffs[deg - i].clone();
            for j in 1..i {
                c -= &g[half - j] * &g[half - i + j];
            }
            g[half - i] = c / &two_lead;
        }
        let g = Self::new(g);
        (g.square() == *self).then_some(g)
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
}

/// Coefficients of `p` in the Kravchuk basis `K_0..K_D` (`D = deg p <= m`),
/// from `p_k = 2^{-m} C(m,k)^{-1} sum_i C(m,i) p(i) K_k(i)`.
pub fn kravchuk_coefficients(p: &RationalPoly, ev: &KravchukEvaluator) -> Vec<BigRational> {
    let m = ev.m();
    let deg = p.degree().unwrap_or(0).min(m);
    let values: Vec<BigRational> = (0..=m).map(|i| p.eval_int(i as i64)).collect();
    let scale = BigInt::one() << m;
    (0..=deg)
        .map(|k| {
            let mut acc = BigRational::zero();
            for (i, val) in values.iter().enumerate() {
                acc += val * BigRational::from_integer(ev.binomial(i) * ev.value(k, i));
            }
            acc / BigRational::from_integer(&scale * ev.binomial(k))
        })
        .collect()
}

/// `p_0 = 2^{-m} sum_i C(m,i) p(i)`.
pub fn constant_kravchuk_coefficient(p: &RationalPoly, m: usize) -> BigRational {
    let mut acc = BigRational::zero();
    for i in 0..=m {
        acc += p.eval_int(i as i64) * BigRational::from_integer(bits::binomial_u128(m, i).into());
    }
    acc / BigRational::from_integer(BigInt::one() << m)
}

/// Dual weight distribution `W_k^perp = |C|^{-1} sum_i W_i K_k(i)`.
///
/// A profile whose transform is not a non-negative integer vector is corrupt
/// and reported as an internal-consistency error.
pub fn macwilliams_transform(profile: &WeightProfile, code_size: u128) -> Result<WeightProfile> {
    if code_size == 0 {
        return Err(invalid("code size must be positive"));
    }
    if profile.total() != code_size {
        return Err(Error::InternalConsistency(format!(
            "profile sums to {} but the code has {code_size} words",
            profile.total()
        )));
    }
    let m = profile.m();
    let ev = KravchukEvaluator::new(m);
    let size = BigInt::from(code_size);
    let mut counts = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let s: BigInt = (0..=m)
            .map(|i| BigInt::from(profile.counts[i]) * ev.value(k, i))
            .sum();
        if !(&s % &size).is_zero() {
            return Err(Error::InternalConsistency(format!(
                "dual weight {k} is not an integer: {s}/{code_size}"
            )));
        }
        let q = s / &size;
        let c = q.to_u64().ok_or_else(|| {
            Error::InternalConsistency(format!("dual weight {k} is negative or too large: {q}"))
        })?;
        counts.push(c);
    }
    Ok(WeightProfile { origin: 0, counts })
}

/// `sum_i W_i(v) K_k(i) - |C| sum_{|y|=k, y in C^perp} (-1)^{v.y}` for every `k`.
pub fn generalized_macwilliams_defects(code: &BinaryLinearCode, v: u64) -> Result<Vec<BigInt>> {
    let m = code.m();
    let profile = weight_profile(code, v)?;
    let ev = KravchukEvaluator::new(m);
    let v = v & low_mask(m);
    let mut character_sums = vec![0i64; m + 1];
    code.for_each_dual_codeword(|y| character_sums[weight(y)] += bits::sign(v, y))?;
    let size = BigInt::one() << code.n();
    Ok((0..=m)
        .map(|k| {
            let lhs: BigInt = (0..=m)
                .map(|i| BigInt::from(profile.counts[i]) * ev.value(k, i))
                .sum();
            lhs - &size * BigInt::from(character_sums[k])
        })
        .collect())
}

/// Single-degree form of [`generalized_macwilliams_defects`].
pub fn generalized_macwilliams_defect(code: &BinaryLinearCode, v: u64, k: usize) -> Result<BigInt> {
    if k > code.m() {
        return Err(invalid(format!("degree {k} exceeds m = {}", code.m())));
    }
    Ok(generalized_macwilliams_defects(code, v)?.swap_remove(k))
}

/// Which sign pattern a [`BetaPolynomial`] certifies.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaMode {
    /// `beta_0 > 0`, `beta(i) <= 0` for integers `i > alpha_1 + epsilon`.
    Tietavainen { epsilon: BigRational },
    /// `beta_0 = 0`, `beta = (x - alpha) gamma^2` with `alpha` in the enclosure of root `r`.
    ZeroB0Root { r: usize },
    /// `beta_0 > 0`, `beta(i) <= 0` outside `[alpha_r - eps, alpha_{r+1} + eps]`.
    Slice { r: usize, epsilon: BigRational },
}

impl BetaMode {
    pub fn name(&self) -> &'static str {
        match self {
            BetaMode::Tietavainen { .. } => "tietavainen",
            BetaMode::ZeroB0Root { .. } => "zero-b0-root",
            BetaMode::Slice { .. } => "slice",
        }
    }
}

/// Default `epsilon` for the widened modes.
pub fn default_epsilon() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(1_000_000))
}

/// A certificate polynomial built from the roots of `K_ell(x; m)`.
#[derive(Debug, Clone)]
pub struct BetaPolynomial {
    pub m: usize,
    pub ell: usize,
    pub mode: BetaMode,
    /// Exact monomial form.
    pub monomial: RationalPoly,
    /// Coefficients `beta_0..beta_D` in the Kravchuk basis.
    pub coeffs: Vec<BigRational>,
    /// Enclosures of the roots of `K_ell` that were used.
    pub roots_used: Vec<RootEnclosure>,
    /// Root of the linear factor in zero-b0-root mode.
    pub alpha: Option<BigRational>,
    /// `gamma` with `beta = (x - alpha) gamma^2` in zero-b0-root mode.
    pub gamma: Option<RationalPoly>,
}

impl BetaPolynomial {
    /// Builds `beta` in the requested mode and checks its sign conditions exactly.
    pub fn new(m: usize, ell: usize, mode: BetaMode) -> Result<Self> {
        if ell == 0 || ell > m {
            return Err(invalid(format!("ell must lie in 1..={m}, got {ell}")));
        }
        let table = roots(ell, m)?;
        let mids: Vec<BigRational> = table
            .roots
            .iter()
            .map(|r| (r.lo_exact() + r.hi_exact()) / rat(2))
            .collect();
        let squares_except = |skip: &[usize]| {
            RationalPoly::from_roots(
                mids.iter()
                    .enumerate()
                    .filter(|(s, _)| !skip.contains(s))
                    .map(|(_, a)| a),
            )
        };
        let ev = KravchukEvaluator::new(m);
        let (monomial, alpha, gamma) = match &mode {
            BetaMode::Tietavainen { epsilon } => {
                check_epsilon(epsilon)?;
                let gamma = squares_except(&[0]);
                let edge = table.roots[0].hi_exact() + epsilon;
                let beta = RationalPoly::linear(&edge)
                    .mul(&gamma.square())
                    .scale(&rat(-1));
                (beta, None, None)
            }
            BetaMode::ZeroB0Root { r } => {
                if *r == 0 || *r > ell {
                    return Err(invalid(format!("root index {r} outside 1..={ell}")));
                }
                let gamma = squares_except(&[r - 1]);
                let alpha = rayleigh_quotient(&gamma, &ev);
                let enc = &table.roots[r - 1];
                if alpha < enc.lo_exact() || alpha > enc.hi_exact() {
                    return Err(Error::InternalConsistency(format!(
                        "linear-factor root {} escaped the enclosure [{}, {}]",
                        rat_to_f64(&alpha),
                        enc.lo(),
                        enc.hi()
                    )));
                }
                let beta = RationalPoly::linear(&alpha).mul(&gamma.square());
                (beta, Some(alpha), Some(gamma))
            }
            BetaMode::Slice { r, epsilon } => {
                check_epsilon(epsilon)?;
                if *r == 0 || *r >= ell {
                    return Err(invalid(format!("slice index {r} outside 1..={}", ell - 1)));
                }
                let (a, b) = slice_interval(&table.roots, *r, epsilon);
                let rest = squares_except(&[r - 1, *r]).square();
                let beta = RationalPoly::from_roots([&a, &b])
                    .mul(&rest)
                    .scale(&rat(-1));
                (beta, None, None)
            }
        };
        let coeffs = kravchuk_coefficients(&monomial, &ev);
        let beta = Self {
            m,
            ell,
            mode,
            monomial,
            coeffs,
            roots_used: table.roots,
            alpha,
            gamma,
        };
        beta.validate()?;
        Ok(beta)
    }

    /// `beta_0`.
    pub fn beta0(&self) -> &BigRational {
        &self.coeffs[0]
    }

    pub fn degree(&self) -> usize {
        self.monomial.degree().unwrap_or(0)
    }

    /// Re-checks the sign pattern of the mode exactly at the integers `0..=m`.
    pub fn validate(&self) -> Result<()> {
        let b0 = self.beta0();
        let fail = |what: String| Err(Error::InvariantViolation(what));
        match &self.mode {
            BetaMode::Tietavainen { epsilon } => {
                if !b0.is_positive() {
                    return fail(format!("beta_0 = {b0} is not positive"));
                }
                let edge = self.roots_used[0].hi_exact() + epsilon;
                for i in 0..=self.m as i64 {
                    if rat(i) > edge && self.monomial.eval_int(i).is_positive() {
                        return fail(format!("beta({i}) > 0 beyond alpha_1 + epsilon"));
                    }
                }
            }
            BetaMode::ZeroB0Root { .. } => {
                if !b0.is_zero() {
                    return fail(format!("beta_0 = {b0} is not zero"));
                }
                let alpha = self.alpha.as_ref().expect("zero-b0 mode carries alpha");
                let (q, rem) = self.monomial.div_linear(alpha);
                if !rem.is_zero() || q.sqrt().is_none() {
                    return fail("beta / (x - alpha) is not a perfect square".into());
                }
            }
            BetaMode::Slice { r, epsilon } => {
                if !b0.is_positive() {
                    return fail(format!("beta_0 = {b0} is not positive"));
                }
                let (a, b) = slice_interval(&self.roots_used, *r, epsilon);
                for i in 0..=self.m as i64 {
                    let x = rat(i);
                    if (x < a || x > b) && self.monomial.eval_int(i).is_positive() {
                        return fail(format!("beta({i}) > 0 outside the slice"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Kravchuk coefficients as floats.
    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }
}

fn check_epsilon(epsilon: &BigRational) -> Result<()> {
    if !epsilon.is_positive() {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

/// `[lo(alpha_r) - eps, hi(alpha_{r+1}) + eps]`, `r` one-based.
fn slice_interval(
    table: &[RootEnclosure],
    r: usize,
    epsilon: &BigRational,
) -> (BigRational, BigRational) {
    (
        table[r - 1].lo_exact() - epsilon,
        table[r].hi_exact() + epsilon,
    )
}

/// `sum_i C(m,i) i g(i)^2 / sum_i C(m,i) g(i)^2`: the unique `alpha` with
/// `(x - alpha) g^2` having zero constant Kravchuk coefficient.
fn rayleigh_quotient(g: &RationalPoly, ev: &KravchukEvaluator) -> BigRational {
    let mut num = BigRational::zero();
    let mut den = BigRational::zero();
    for i in 0..=ev.m() {
        let w = g.eval_int(i as i64);
        let w2 = &w * &w * BigRational::from_integer(ev.binomial(i).clone());
        num += &w2 * rat(i as i64);
        den += w2;
    }
    num / den
}

/// Covering-radius upper bound with the polynomial that proves it.
#[derive(Debug, Clone)]
pub struct CoveringCertificate {
    /// Upper end of the enclosure of the smallest root of `K_ell`.
    pub bound: BigRational,
    pub ell: usize,
    pub beta: BetaPolynomial,
}

impl CoveringCertificate {
    pub fn bound_f64(&self) -> f64 {
        rat_to_f64(&self.bound)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "bound": self.bound_f64(),
            "ell": self.ell,
            "mode": self.beta.mode.name(),
            "beta_kravchuk_coeffs": self.beta.coeffs_f64(),
            "roots_used": self.beta.roots_used.iter().map(|r| [r.lo(), r.hi()]).collect::<Vec<_>>(),
        })
    }
}

/// Bounds the covering radius by the smallest root of `K_ell(x; m)`.
///
/// Needs `2 ell < d_perp` so that `beta`, of degree `2 ell - 1`, sits below the
/// dual distance.
pub fn covering_bound(code: &BinaryLinearCode, ell: usize) -> Result<CoveringCertificate> {
    let d = dual_distance(code)?;
    if ell == 0 || 2 * ell >= d {
        return Err(invalid(format!(
            "ell = {ell} must satisfy 1 <= ell < d_perp/2 = {d}/2"
        )));
    }
    let beta = BetaPolynomial::new(code.m(), ell, BetaMode::ZeroB0Root { r: 1 })?;
    Ok(CoveringCertificate {
        bound: beta.roots_used[0].hi_exact(),
        ell,
        beta,
    })
}

/// Outcome of checking a concentric-ball interval against a code.
#[derive(Debug, Clone)]
pub struct SliceCertificate {
    pub lo: BigRational,
    pub hi: BigRational,
    pub beta: BetaPolynomial,
    /// Points `v` examined.
    pub checked: u64,
    /// Points with some codeword distance inside `[lo, hi]`.
    pub covered: u64,
    /// True when every `v` in `F_2^m` was examined.
    pub exhaustive: bool,
}

impl SliceCertificate {
    pub fn all_covered(&self) -> bool {
        self.checked == self.covered
    }

    pub fn interval_f64(&self) -> (f64, f64) {
        (rat_to_f64(&self.lo), rat_to_f64(&self.hi))
    }
}

/// Checks that for every `v` some codeword lies at a distance in
/// `[alpha_r - eps, alpha_{r+1} + eps]`, the roots being those of `K_ell`.
///
/// Requires even `ell` and `2 ell - 2 < d_perp`, the degree of the slice polynomial.
/// All `2^m` points are examined when within budget; otherwise 1000 seeded samples.
pub fn slice_certificate(
    code: &BinaryLinearCode,
    ell: usize,
    r: usize,
    epsilon: &BigRational,
) -> Result<SliceCertificate> {
    check_epsilon(epsilon)?;
    if ell < 2 || ell % 2 == 1 {
        return Err(invalid(format!(
            "slice certificates need even ell >= 2, got {ell}"
        )));
    }
    let d = dual_distance(code)?;
    if 2 * ell - 2 >= d {
        return Err(invalid(format!(
            "slice polynomial degree {} is not below d_perp = {d}",
            2 * ell - 2
        )));
    }
    let beta = BetaPolynomial::new(
        code.m(),
        ell,
        BetaMode::Slice {
            r,
            epsilon: epsilon.clone(),
        },
    )?;
    let (lo, hi) = slice_interval(&beta.roots_used, r, epsilon);
    let inside: Vec<bool> = (0..=code.m())
        .map(|i| rat(i as i64) >= lo && rat(i as i64) <= hi)
        .collect();
    let m = code.m();
    let (checked, covered, exhaustive) = if m as u32 <= ENUMERATION_BUDGET_LOG2 {
        // Distances from v to C are the weights of the coset v + C, so one pass
        // over F_2^m grouped by syndrome settles every v.
        let checks = code.dual_basis();
        let syndrome = |v: u64| {
            checks
                .iter()
                .enumerate()
                .fold(0usize, |s, (k, &h)| s | ((bits::dot(h, v) as usize) << k))
        };
        let mut hit = vec![false; 1 << checks.len()];
        for v in 0..1u64 << m {
            if inside[weight(v)] {
                hit[syndrome(v)] = true;
            }
        }
        let per_coset = 1u64 << code.n();
        let good = hit.iter().filter(|&&h| h).count() as u64 * per_coset;
        (1u64 << m, good, true)
    } else {
        check_budget("codewords", code.n() as u32)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_51ce);
        let mut good = 0u64;
        for _ in 0..1000 {
            let v = rng.random::<u64>() & low_mask(m);
            let profile = weight_profile(code, v)?;
            if profile
                .counts
                .iter()
                .zip(&inside)
                .any(|(&c, &ok)| ok && c > 0)
            {
                good += 1;
            }
        }
        (1000, good, false)
    };
    Ok(SliceCertificate {
        lo,
        hi,
        beta,
        checked,
        covered,
        exhaustive,
    })
}

/// Result of the first-moment argument: under `p_v(c) ∝ gamma^2(|c - v|)` the mean
/// distance to `v` is at most `alpha`.
#[derive(Debug, Clone)]
pub struct FirstMomentCertificate {
    pub alpha: BigRational,
    pub gamma: RationalPoly,
    pub beta0: BigRational,
}

/// Validates `beta = (x - alpha) gamma^2` with `beta_0 <= 0` and returns `alpha`
/// as the certified expected-distance bound.
pub fn first_moment_bound(
    beta: &RationalPoly,
    alpha: &BigRational,
    m: usize,
) -> Result<FirstMomentCertificate> {
    let beta0 = constant_kravchuk_coefficient(beta, m);
    if beta0.is_positive() {
        return Err(invalid(format!("beta_0 = {beta0} is positive")));
    }
    let (q, rem) = beta.div_linear(alpha);
    if !rem.is_zero() {
        return Err(invalid(format!("alpha = {alpha} is not a root of beta")));
    }
    let gamma = q
        .sqrt()
        .ok_or_else(|| invalid("beta / (x - alpha) is not a perfect square"))?;
    Ok(FirstMomentCertificate {
        alpha: alpha.clone(),
        gamma,
        beta0,
    })
}

impl BetaPolynomial {
    /// First-moment certificate for a zero-b0-root polynomial.
    pub fn first_moment_bound(&self) -> Result<FirstMomentCertificate> {
        let alpha = self
            .alpha
            .as_ref()
            .ok_or_else(|| invalid("first-moment bound needs zero-b0-root mode"))?;
        first_moment_bound(&self.monomial, alpha, self.m)
    }
}

/// `sum_c gamma^2(|c - v|) (|c - v| - alpha)` computed from the weight profile.
pub fn first_moment_residual(
    profile: &WeightProfile,
    gamma: &RationalPoly,
    alpha: &BigRational,
) -> BigRational {
    profile
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| {
            let g = gamma.eval_int(i as i64);
            &g * &g * (rat(i as i64) - alpha) * rat(c as i64)
        })
        .sum()
}
