//! Binary Kravchuk polynomials
//! `K_k(x; m) = sum_i (-1)^i C(x, i) C(m - x, k - i)`.
//!
//! Values at integer points are computed exactly. Roots are located with a
//! floating-point eigensolve and then certified by exact sign evaluation at
//! dyadic rationals, so every reported enclosure provably contains a root.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::bits;
use crate::error::{invalid, Error, Result};

/// Enclosure width target: `5 / 2^34 < 1e-9`.
const ROOT_SCALE_BITS: u32 = 34;

fn big_binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        BigInt::zero()
    } else {
        binomial(BigInt::from(n), BigInt::from(k))
    }
}

/// `K_k(j; m)` by the defining alternating sum.
pub fn kravchuk(k: usize, j: usize, m: usize) -> Result<BigInt> {
    if k > m || j > m {
        return Err(invalid(format!(
            "kravchuk index out of range: k={k}, j={j}, m={m}"
        )));
    }
    let mut acc = BigInt::zero();
    for i in 0..=k.min(j) {
        let term = big_binomial(j, i) * big_binomial(m - j, k - i);
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// `K_k(x; m)` at a real point by the three-term recurrence.
pub fn kravchuk_f64(k: usize, x: f64, m: usize) -> f64 {
    let mf = m as f64;
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    for j in 0..k {
        let next = ((mf - 2.0 * x) * cur - (mf - j as f64 + 1.0) * prev) / (j as f64 + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Table of `K_k(j; m)` for all `0 <= k, j <= m`.
#[derive(Debug, Clone)]
pub struct KravchukEvaluator {
    m: usize,
    /// `table[k][j]`.
    table: Vec<Vec<BigInt>>,
    binomials: Vec<BigInt>,
}

impl KravchukEvaluator {
    /// Fills the table with `(k+1) K_{k+1} = (m - 2j) K_k - (m - k + 1) K_{k-1}`.
    pub fn new(m: usize) -> Self {
        let mut table: Vec<Vec<BigInt>> = Vec::with_capacity(m + 1);
        table.push(vec![BigInt::one(); m + 1]);
        if m >= 1 {
            table.push(
                (0..=m)
                    .map(|j| BigInt::from(m as i64 - 2 * j as i64))
                    .collect(),
            );
        }
        for k in 1..m {
            let row: Vec<BigInt> = (0..=m)
                .map(|j| {
                    let num = BigInt::from(m as i64 - 2 * j as i64) * &table[k][j]
                        - BigInt::from(m - k + 1) * &table[k - 1][j];
                    num / BigInt::from(k + 1)
                })
                .collect();
            table.push(row);
        }
        let binomials = (0..=m).map(|i| big_binomial(m, i)).collect();
        Self {
            m,
            table,
            binomials,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `K_k(j; m)`; panics if `k` or `j` exceeds `m`.
    pub fn value(&self, k: usize, j: usize) -> &BigInt {
        &self.table[k][j]
    }

    /// Row `K_k(0..=m)`.
    pub fn row(&self, k: usize) -> &[BigInt] {
        &self.table[k]
    }

    /// `C(m, i)`.
    pub fn binomial(&self, i: usize) -> &BigInt {
        &self.binomials[i]
    }

    /// `sum_i C(m,i) K_k(i) K_l(i) - 2^m C(m,k) [k == l]`.
    pub fn orthogonality_defect(&self, k: usize, l: usize) -> BigInt {
        let mut acc = BigInt::zero();
        for i in 0..=self.m {
            acc += &self.binomials[i] * &self.table[k][i] * &self.table[l][i];
        }
        if k == l {
            acc -= (BigInt::one() << self.m) * &self.binomials[k];
        }
        acc
    }

    /// Largest residual of the three-term recurrence over the table (zero when consistent).
    pub fn recurrence_defect(&self) -> BigInt {
        let m = self.m;
        let mut worst = BigInt::zero();
        for k in 1..m {
            for j in 0..=m {
                let r = BigInt::from(k + 1) * &self.table[k + 1][j]
                    - BigInt::from(m as i64 - 2 * j as i64) * &self.table[k][j]
                    + BigInt::from(m - k + 1) * &self.table[k - 1][j];
                if r.abs() > worst {
                    worst = r.abs();
                }
            }
        }
        worst
    }

    /// True when `K_k(j) = (-1)^k K_k(m - j)` on the whole table.
    pub fn has_reflection_symmetry(&self) -> bool {
        (0..=self.m).all(|k| {
            (0..=self.m).all(|j| {
                let mirror = &self.table[k][self.m - j];
                if k % 2 == 0 {
                    self.table[k][j] == *mirror
                } else {
                    self.table[k][j] == -mirror
                }
            })
        })
    }
}

/// `sum_i C(m,i) K_k(i) K_l(i) - 2^m C(m,k) [k == l]`.
pub fn orthogonality_defect(k: usize, l: usize, m: usize) -> Result<BigInt> {
    if k > m || l > m {
        return Err(invalid(format!("degrees k={k}, l={l} exceed m={m}")));
    }
    Ok(KravchukEvaluator::new(m).orthogonality_defect(k, l))
}

/// `sum_{|y| = k} (-1)^{w.y} - K_k(|w|; m)` over `m`-bit `y`.
pub fn fourier_identity_defect(w: u64, m: usize, k: usize) -> Result<BigInt> {
    if k > m || m > 64 {
        return Err(invalid(format!("need k <= m <= 64, got k={k}, m={m}")));
    }
    let w = w & bits::low_mask(m);
    let lhs: i128 = bits::weight_k_vectors(m, k)
        .map(|y| bits::sign(w, y) as i128)
        .sum();
    Ok(BigInt::from(lhs) - kravchuk(k, bits::weight(w), m)?)
}

/// Sign of `K_k(p / 2^s; m)`, computed exactly.
///
/// With `P_j = j! 2^{sj} K_j(p / 2^s)` the recurrence stays integral:
/// `P_{j+1} = (m 2^s - 2p) P_j - (m - j + 1) j 2^{2s} P_{j-1}`.
pub fn sign_at_dyadic(k: usize, m: usize, p: &BigInt, s: u32) -> i8 {
    let shift = BigInt::one() << s;
    let shift2 = BigInt::one() << (2 * s);
    let slope = BigInt::from(m) * &shift - p * 2;
    let mut prev = BigInt::zero();
    let mut cur = BigInt::one();
    for j in 0..k {
        let next = &slope * &cur - BigInt::from((m - j + 1) * j) * &shift2 * &prev;
        prev = cur;
        cur = next;
    }
    match cur.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

/// An interval `[lo, hi]` with dyadic endpoints `num / 2^scale_bits` that contains
/// exactly one root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootEnclosure {
    pub lo_num: i64,
    pub hi_num: i64,
    pub scale_bits: u32,
}

impl RootEnclosure {
    pub fn lo(&self) -> f64 {
        self.lo_num as f64 / (1u64 << self.scale_bits) as f64
    }

    pub fn hi(&self) -> f64 {
        self.hi_num as f64 / (1u64 << self.scale_bits) as f64
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo() + self.hi())
    }

    pub fn width(&self) -> f64 {
        self.hi() - self.lo()
    }

    pub fn lo_exact(&self) -> BigRational {
        BigRational::new(BigInt::from(self.lo_num), BigInt::one() << self.scale_bits)
    }

    pub fn hi_exact(&self) -> BigRational {
        BigRational::new(BigInt::from(self.hi_num), BigInt::one() << self.scale_bits)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo() <= x && x <= self.hi()
    }
}

/// Certified enclosures of all roots of `K_k(x; m)`, ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootTable {
    pub k: usize,
    pub m: usize,
    pub roots: Vec<RootEnclosure>,
}

impl RootTable {
    /// Enclosure midpoints.
    pub fn approximations(&self) -> Vec<f64> {
        self.roots.iter().map(RootEnclosure::mid).collect()
    }

    pub fn smallest(&self) -> &RootEnclosure {
        &self.roots[0]
    }

    /// True when every root of `other` (degree `k - 1`) lies strictly between
    /// consecutive roots of `self`.
    pub fn interlaces(&self, lower: &RootTable) -> bool {
        if lower.k + 1 != self.k || lower.m != self.m {
            return false;
        }
        lower.roots.iter().enumerate().all(|(i, r)| {
            self.roots[i].hi_exact() < r.lo_exact() && r.hi_exact() < self.roots[i + 1].lo_exact()
        })
    }

    /// CSV with header `degree,m,index,root_lo,root_hi`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("degree,m,index,root_lo,root_hi\n");
        for (i, r) in self.roots.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{:.12},{:.12}",
                self.k,
                self.m,
                i + 1,
                r.lo(),
                r.hi()
            );
        }
        s
    }
}

/// Eigenvalues of the Jacobi matrix of `K_k(.; m)`; these are its roots.
fn approximate_roots(k: usize, m: usize) -> Vec<f64> {
    let half = m as f64 / 2.0;
    let mut jacobi = DMatrix::<f64>::zeros(k, k);
    for j in 0..k {
        jacobi[(j, j)] = half;
        if j + 1 < k {
            let off = (((j + 1) * (m - j)) as f64).sqrt() / 2.0;
            jacobi[(j, j + 1)] = off;
            jacobi[(j + 1, j)] = off;
        }
    }
    let mut eig: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Brackets a root near `guess` with a certified sign change of width at most 5 units.
fn certify_near(k: usize, m: usize, guess: f64, s: u32) -> Option<RootEnclosure> {
    let sgn = |p: i64| sign_at_dyadic(k, m, &BigInt::from(p), s);
    let centre = (guess * (1u64 << s) as f64).floor() as i64;
    let (mut lo, mut hi) = (centre - 2, centre + 3);
    if sgn(lo) * sgn(hi) < 0 {
        return Some(RootEnclosure {
            lo_num: lo,
            hi_num: hi,
            scale_bits: s,
        });
    }
    // Widen until the signs differ, then bisect back down.
    let mut reach = 8i64;
    loop {
        lo = centre - reach;
        hi = centre + reach;
        let (a, b) = (sgn(lo), sgn(hi));
        if a * b < 0 {
            break;
        }
        if a == 0 || b == 0 || reach > (1i64 << (s - 1)) {
            return None;
        }
        reach *= 2;
    }
    let slo = sgn(lo);
    while hi - lo > 5 {
        let mid = lo + (hi - lo) / 2;
        match sgn(mid) {
            0 => {
                return Some(RootEnclosure {
                    lo_num: mid - 2,
                    hi_num: mid + 3,
                    scale_bits: s,
                });
            }
            v if v == slo => lo = mid,
            _ => hi = mid,
        }
    }
    Some(RootEnclosure {
        lo_num: lo,
        hi_num: hi,
        scale_bits: s,
    })
}

/// Certified root enclosures of `K_k(x; m)`, each of width below `1e-9`.
///
/// Fails with an internal-consistency error if certification cannot produce
/// `k` disjoint sign-change intervals inside `(0, m)`.
pub fn roots(k: usize, m: usize) -> Result<RootTable> {
    if k == 0 || k > m {
        return Err(invalid(format!("root degree must lie in 1..={m}, got {k}")));
    }
    if m > 100_000 {
        return Err(invalid(format!(
            "ambient length {m} too large for dyadic enclosures"
        )));
    }
    let s = ROOT_SCALE_BITS;
    let mut out = Vec::with_capacity(k);
    for guess in approximate_roots(k, m) {
        let enc = certify_near(k, m, guess, s).ok_or_else(|| {
            Error::InternalConsistency(format!(
                "could not certify a root of K_{k}(x; {m}) near {guess}"
            ))
        })?;
        out.push(enc);
    }
    let top = (m as i64) << s;
    let disjoint = out.windows(2).all(|w| w[0].hi_num < w[1].lo_num);
    if !disjoint || out[0].lo_num <= 0 || out[k - 1].hi_num >= top {
        return Err(Error::InternalConsistency(format!(
            "root enclosures of K_{k}(x; {m}) overlap or leave (0, m)"
        )));
    }
    Ok(RootTable { k, m, roots: out })
}
