//! Dense statevectors and the discretized harmonic oscillator on `m` qubits.
//!
//! The position observable for an instance `(B, v)` acts on `x` as
//! `x_hat = f(x) / 2` with `f(x) = sum_i (-1)^{(Bx)_i + v_i} = m - 2|Bx + v|`.
//! Its low-energy eigenstates in the computational basis are
//! `lambda_k(x) = K_k(|Bx + v|) / sqrt(2^n C(m,k))`; taking `B = I`, `v = 0`
//! gives the plain oscillator whose `lambda_k` are Hadamard-transformed Dicke
//! states.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::bits::{self, low_mask, weight};
use crate::codes::{dual_distance, BinaryLinearCode};
use crate::error::{check_budget, invalid, Error, Result};

/// Largest register the dense simulator allocates.
pub const MAX_QUBITS: usize = 24;

const STATE_MAGIC: &[u8; 8] = b"DQISTATE";

/// Dense complex amplitudes over `n`-bit basis states, basis index `x` = bit pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

fn check_qubits(n: usize) -> Result<()> {
    check_budget("amplitudes", n as u32)?;
    if n > MAX_QUBITS {
        return Err(invalid(format!(
            "{n} qubits exceeds the dense limit {MAX_QUBITS}"
        )));
    }
    Ok(())
}

impl StateVector {
    /// Computational basis state `|x>`.
    pub fn basis(n: usize, x: u64) -> Result<Self> {
        check_qubits(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[(x & low_mask(n)) as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { qubits: n, amps })
    }

    /// Uniform superposition over all `2^n` strings.
    pub fn uniform(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let a = (1u64 << n) as f64;
        Ok(Self {
            qubits: n,
            amps: vec![Complex64::new(a.sqrt().recip(), 0.0); 1 << n],
        })
    }

    /// Wraps raw amplitudes without normalizing.
    pub fn from_raw(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubits(n)?;
        if amps.len() != 1 << n {
            return Err(invalid(format!(
                "expected {} amplitudes, got {}",
                1u64 << n,
                amps.len()
            )));
        }
        Ok(Self { qubits: n, amps })
    }

    /// Wraps amplitudes and rescales them to unit norm.
    pub fn normalized(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::from_raw(n, amps)?;
        s.normalize()?;
        Ok(s)
    }

    /// Real amplitudes, normalized.
    pub fn from_real(n: usize, amps: Vec<f64>) -> Result<Self> {
        Self::normalized(
            n,
            amps.into_iter().map(|a| Complex64::new(a, 0.0)).collect(),
        )
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amps
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Degenerate("state has zero norm".into()));
        }
        for a in &mut self.amps {
            *a /= norm;
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|`.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.inner(other).norm()
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, c: f64) {
        for a in &mut self.amps {
            *a *= c;
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: f64, other: &Self) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += b * c;
        }
    }

    /// `H^{⊗n}` in place via the radix-2 butterfly.
    pub fn hadamard_transform(&mut self) {
        let len = self.amps.len();
        let mut half = 1;
        while half < len {
            for block in (0..len).step_by(2 * half) {
                for i in block..block + half {
                    let (a, b) = (self.amps[i], self.amps[i + half]);
                    self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                    self.amps[i + half] = (a - b) * FRAC_1_SQRT_2;
                }
            }
            half *= 2;
        }
    }

    pub fn hadamarded(&self) -> Self {
        let mut s = self.clone();
        s.hadamard_transform();
        s
    }

    /// `|amps[x]|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(Complex64::norm_sqr).collect()
    }

    /// Expectation of a diagonal observable.
    pub fn expectation_diagonal(&self, f: impl Fn(u64) -> f64) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(x, a)| a.norm_sqr() * f(x as u64))
            .sum()
    }

    /// Debug export: `DQISTATE` then interleaved little-endian `f64` re/im.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 16 * self.amps.len());
        out.extend_from_slice(STATE_MAGIC);
        for a in &self.amps {
            out.extend_from_slice(&a.re.to_le_bytes());
            out.extend_from_slice(&a.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let parse_err = |message: &str| Error::Parse {
            line: 0,
            message: message.into(),
        };
        let body = bytes
            .strip_prefix(STATE_MAGIC.as_slice())
            .ok_or_else(|| parse_err("missing DQISTATE header"))?;
        if body.len() % 16 != 0 || !(body.len() / 16).is_power_of_two() {
            return Err(parse_err("amplitude block is not 2^n complex numbers"));
        }
        let amps: Vec<Complex64> = body
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                Complex64::new(re, im)
            })
            .collect();
        let n = amps.len().trailing_zeros() as usize;
        Self::from_raw(n, amps)
    }
}

/// Uniform positive superposition of the weight-`k` strings on `m` qubits.
pub fn dicke_state(m: usize, k: usize) -> Result<StateVector> {
    if k > m {
        return Err(invalid(format!("Dicke weight {k} exceeds {m} qubits")));
    }
    check_qubits(m)?;
    let a = bits::binomial_f64(m, k).sqrt().recip();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << m];
    for x in bits::weight_k_vectors(m, k) {
        amps[x as usize] = Complex64::new(a, 0.0);
    }
    StateVector::from_raw(m, amps)
}

/// `(1/2) sum_i Z_i` on `m` qubits; the result is not renormalized.
pub fn plain_position_apply(state: &StateVector) -> StateVector {
    let m = state.qubits as f64;
    let mut out = state.clone();
    for (x, a) in out.amps.iter_mut().enumerate() {
        *a *= 0.5 * (m - 2.0 * weight(x as u64) as f64);
    }
    out
}

/// `((m+1)/2) I - (1/2) sum_i X_i`, whose eigenstates are the plain `lambda_k`
/// with energies `k + 1/2`.
pub fn plain_hamiltonian_apply(state: &StateVector) -> StateVector {
    let m = state.qubits;
    let mut out = state.clone();
    out.scale((m as f64 + 1.0) / 2.0);
    for i in 0..m {
        let flip = 1usize << i;
        for (x, a) in state.amps.iter().enumerate() {
            out.amps[x ^ flip] -= a * 0.5;
        }
    }
    out
}

/// `f(x) = m - 2|Bx + v|` for every `x`, the unhalved position observable.
pub fn position_values(code: &BinaryLinearCode, v: u64) -> Result<Vec<f64>> {
    check_qubits(code.n())?;
    let m = code.m() as f64;
    let mut out = vec![0.0; 1 << code.n()];
    code.for_each_codeword(|x, c| out[x as usize] = m - 2.0 * weight(c ^ v) as f64)?;
    Ok(out)
}

/// `f = sum_i (-1)^{(Bx)_i + v_i}` applied to a state, without the factor 1/2.
pub fn position_apply(code: &BinaryLinearCode, v: u64, state: &StateVector) -> Result<StateVector> {
    let f = position_values(code, v)?;
    let mut out = state.clone();
    for (a, fx) in out.amps.iter_mut().zip(f) {
        *a *= fx;
    }
    Ok(out)
}

/// `sum_i (-1)^{v_i} X^{B_i}`, where `X^{B_i}` flips the message bits in row `i`.
/// This is the position observable seen through `H^{⊗n}`.
pub fn fourier_position_apply(code: &BinaryLinearCode, v: u64, state: &StateVector) -> StateVector {
    let mut out = StateVector {
        qubits: state.qubits,
        amps: vec![Complex64::new(0.0, 0.0); state.len()],
    };
    for (i, &row) in code.rows().iter().enumerate() {
        let s = if (v >> i) & 1 == 1 { -1.0 } else { 1.0 };
        for (x, a) in state.amps.iter().enumerate() {
            out.amps[x ^ row as usize] += a * s;
        }
    }
    out
}

/// Ladder coefficient `c_k = sqrt(k (m - k + 1))`.
pub fn ladder_coefficient(k: usize, m: usize) -> f64 {
    if k == 0 || k > m {
        0.0
    } else {
        ((k * (m - k + 1)) as f64).sqrt()
    }
}

/// Which oscillator the eigenstates belong to.
#[derive(Debug, Clone)]
pub enum OscillatorMode {
    Plain {
        m: usize,
    },
    Obfuscated {
        code: BinaryLinearCode,
        v: u64,
        dual_distance: usize,
    },
}

/// Low-energy eigenstates `lambda_0, lambda_1, ...` of an oscillator.
#[derive(Debug, Clone)]
pub struct OscillatorBasis {
    pub mode: OscillatorMode,
    pub eigenstates: Vec<StateVector>,
}

impl OscillatorBasis {
    /// `lambda_k = H^{⊗m} D_k` for `k = 0..=m`.
    pub fn plain(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(invalid("plain oscillator needs m >= 1"));
        }
        check_budget(
            "basis amplitudes",
            (m + (m + 1).next_power_of_two().trailing_zeros() as usize) as u32,
        )?;
        let eigenstates = (0..=m)
            .map(|k| dicke_state(m, k).map(|d| d.hadamarded()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            mode: OscillatorMode::Plain { m },
            eigenstates,
        })
    }

    /// Eigenstates `lambda_k` with `2k < d_perp`, built in the syndrome picture
    /// `C(m,k)^{-1/2} sum_{|z|=k} (-1)^{v.z} |B^T z>` and Hadamard-transformed.
    pub fn obfuscated(code: &BinaryLinearCode, v: u64) -> Result<Self> {
        let d = dual_distance(code)?;
        let n = code.n();
        check_qubits(n)?;
        let v = v & low_mask(code.m());
        let top = (d - 1) / 2;
        let mut eigenstates = Vec::with_capacity(top + 1);
        for k in 0..=top {
            let count = bits::binomial_u128(code.m(), k);
            check_budget("layer strings", 128 - count.leading_zeros())?;
            let a = (count as f64).sqrt().recip();
            let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
            for z in bits::weight_k_vectors(code.m(), k) {
                let s = code.syndrome(z) as usize;
                if amps[s].re != 0.0 {
                    return Err(Error::InvariantViolation(format!(
                        "two weight-{k} errors share a syndrome below d_perp/2"
                    )));
                }
                amps[s] = Complex64::new(a * bits::sign(v, z) as f64, 0.0);
            }
            let mut state = StateVector::from_raw(n, amps)?;
            state.hadamard_transform();
            eigenstates.push(state);
        }
        Ok(Self {
            mode: OscillatorMode::Obfuscated {
                code: code.clone(),
                v,
                dual_distance: d,
            },
            eigenstates,
        })
    }

    /// Ambient length `m`.
    pub fn m(&self) -> usize {
        match &self.mode {
            OscillatorMode::Plain { m } => *m,
            OscillatorMode::Obfuscated { code, .. } => code.m(),
        }
    }

    /// Number of materialized eigenstates.
    pub fn levels(&self) -> usize {
        self.eigenstates.len()
    }

    pub fn eigenstate(&self, k: usize) -> Result<&StateVector> {
        self.eigenstates.get(k).ok_or_else(|| {
            invalid(format!(
                "eigenstate {k} is not materialized ({} available)",
                self.levels()
            ))
        })
    }

    /// Unhalved position observable `f` applied to a state of this oscillator.
    pub fn position_apply(&self, state: &StateVector) -> Result<StateVector> {
        match &self.mode {
            OscillatorMode::Plain { .. } => {
                let mut out = plain_position_apply(state);
                out.scale(2.0);
                Ok(out)
            }
            OscillatorMode::Obfuscated { code, v, .. } => position_apply(code, *v, state),
        }
    }

    /// `f` values on the computational basis.
    pub fn position_diagonal(&self) -> Result<Vec<f64>> {
        match &self.mode {
            OscillatorMode::Plain { m } => Ok((0..1u64 << m)
                .map(|x| *m as f64 - 2.0 * weight(x) as f64)
                .collect()),
            OscillatorMode::Obfuscated { code, v, .. } => position_values(code, *v),
        }
    }

    /// Largest absolute deviation of `<lambda_j|lambda_k>` from `delta_jk`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, a) in self.eigenstates.iter().enumerate() {
            for (k, b) in self.eigenstates.iter().enumerate().skip(j) {
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - target).norm());
            }
        }
        worst
    }
}

/// `|| f lambda_k - c_k lambda_{k-1} - c_{k+1} lambda_{k+1} ||` with
/// `c_k = sqrt(k (m - k + 1))` and `f = 2 x_hat`.
///
/// Needs `lambda_{k+1}`, so `k + 1` must be a materialized level.
pub fn bosonic_action_defect(basis: &OscillatorBasis, k: usize) -> Result<f64> {
    if k + 1 >= basis.levels() {
        return Err(invalid(format!(
            "ladder action at k = {k} needs level {} but only {} are valid",
            k + 1,
            basis.levels()
        )));
    }
    let m = basis.m();
    let mut lhs = basis.position_apply(&basis.eigenstates[k])?;
    if k > 0 {
        lhs.add_scaled(-ladder_coefficient(k, m), &basis.eigenstates[k - 1]);
    }
    lhs.add_scaled(-ladder_coefficient(k + 1, m), &basis.eigenstates[k + 1]);
    Ok(lhs.norm())
}

/// Coefficients `w_0..w_ell` of a superposition of oscillator levels.
#[derive(Debug, Clone, PartialEq)]
pub struct DqiWeights {
    pub w: Vec<f64>,
}

impl DqiWeights {
    /// Normalizes `w`; rejects the zero vector.
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(invalid("weights need at least one layer"));
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Degenerate("weights have zero norm".into()));
        }
        Ok(Self {
            w: w.into_iter().map(|x| x / norm).collect(),
        })
    }

    /// All weight on layer `k`.
    pub fn layer(ell: usize, k: usize) -> Result<Self> {
        if k > ell {
            return Err(invalid(format!("layer {k} exceeds ell = {ell}")));
        }
        let mut w = vec![0.0; ell + 1];
        w[k] = 1.0;
        Self::new(w)
    }

    pub fn ell(&self) -> usize {
        self.w.len() - 1
    }

    /// `|sum w_k^2 - 1|`.
    pub fn norm_defect(&self) -> f64 {
        (self.w.iter().map(|x| x * x).sum::<f64>() - 1.0).abs()
    }
}

/// Position observable `x_hat = f/2` restricted to `lambda_0..lambda_ell`:
/// tridiagonal with off-diagonal entries `c_k / 2`.
pub fn position_tridiagonal(ell: usize, m: usize) -> DMatrix<f64> {
    let mut t = DMatrix::<f64>::zeros(ell + 1, ell + 1);
    for k in 1..=ell {
        let c = ladder_coefficient(k, m) / 2.0;
        t[(k - 1, k)] = c;
        t[(k, k - 1)] = c;
    }
    t
}

/// Best degree-`ell` weights: the Perron eigenvector of [`position_tridiagonal`]
/// and its eigenvalue, which is the largest achievable `<x_hat>`.
pub fn optimal_weights(ell: usize, m: usize) -> Result<(DqiWeights, f64)> {
    if ell > m {
        return Err(invalid(format!("ell = {ell} exceeds m = {m}")));
    }
    let eig = SymmetricEigen::new(position_tridiagonal(ell, m));
    let (top, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let col = eig.eigenvectors.column(top);
    let sign = if col.sum() < 0.0 { -1.0 } else { 1.0 };
    let w: Vec<f64> = col.iter().map(|x| (sign * x).max(0.0)).collect();
    Ok((DqiWeights::new(w)?, value))
}

/// Top eigenvalue of [`position_tridiagonal`] alone.
pub fn top_position_eigenvalue(ell: usize, m: usize) -> f64 {
    position_tridiagonal(ell, m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `(r - 1)^{-1/2} sum_{i=1}^{r-1} lambda_{ell+i}`.
pub fn concentrated_state(basis: &OscillatorBasis, ell: usize, r: usize) -> Result<StateVector> {
    if r < 2 {
        return Err(invalid(format!("concentrated states need r >= 2, got {r}")));
    }
    let last = ell + r - 1;
    if last >= basis.levels() {
        return Err(invalid(format!(
            "level {last} is not materialized ({} available)",
            basis.levels()
        )));
    }
    let mut out = basis.eigenstates[ell + 1].clone();
    for i in 2..r {
        out.add_scaled(1.0, &basis.eigenstates[ell + i]);
    }
    out.normalize()?;
    Ok(out)
}

/// Mean and variance of `x_hat = f/2` in a state.
pub fn position_moments(basis: &OscillatorBasis, state: &StateVector) -> Result<(f64, f64)> {
    let f = basis.position_diagonal()?;
    let mean = state.expectation_diagonal(|x| 0.5 * f[x as usize]);
    let second = state.expectation_diagonal(|x| 0.25 * f[x as usize] * f[x as usize]);
    Ok((mean, second - mean * mean))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kravchuk::kravchuk_f64;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn dicke_examples() {
        let d = dicke_state(2, 0).unwrap();
        assert_eq!(d.amps()[0], Complex64::new(1.0, 0.0));
        let d = dicke_state(2, 1).unwrap();
        assert!(
            close(d.amps()[1].re, FRAC_1_SQRT_2, 1e-15)
                && close(d.amps()[2].re, FRAC_1_SQRT_2, 1e-15)
        );
        let d = dicke_state(4, 2).unwrap();
        let support: Vec<f64> = d
            .amps()
            .iter()
            .filter(|a| a.norm() > 0.0)
            .map(|a| a.re)
            .collect();
        assert_eq!(support.len(), 6);
        assert!(support
            .iter()
            .all(|&a| close(a, 6f64.sqrt().recip(), 1e-15)));
        assert!(dicke_state(2, 3).is_err());
    }

    #[test]
    fn plain_position_examples() {
        let d0 = dicke_state(4, 0).unwrap();
        assert!(
            plain_position_apply(&d0).distance(&{
                let mut s = d0.clone();
                s.scale(2.0);
                s
            }) < 1e-15
        );
        assert!(plain_position_apply(&dicke_state(4, 2).unwrap()).norm() < 1e-15);
        let d3 = dicke_state(4, 3).unwrap();
        let mut expect = d3.clone();
        expect.scale(-1.0);
        assert!(plain_position_apply(&d3).distance(&expect) < 1e-15);
    }

    #[test]
    fn hadamard_is_an_involution() {
        let mut s = StateVector::from_real(5, (0..32).map(|i| (i as f64).sin()).collect()).unwrap();
        let orig = s.clone();
        s.hadamard_transform();
        assert!(close(s.norm(), 1.0, 1e-12));
        s.hadamard_transform();
        assert!(s.distance(&orig) < 1e-12);
        let mut zero = StateVector::basis(4, 0).unwrap();
        zero.hadamard_transform();
        assert!(zero.distance(&StateVector::uniform(4).unwrap()) < 1e-15);
    }

    #[test]
    fn binary_export_round_trips() {
        let s = StateVector::from_real(3, vec![1.0, -2.0, 0.5, 0.0, 0.0, 3.0, 0.0, 1.0]).unwrap();
        let bytes = s.to_bytes();
        assert_eq!(&bytes[..8], b"DQISTATE");
        assert_eq!(bytes.len(), 8 + 16 * 8);
        assert_eq!(StateVector::from_bytes(&bytes).unwrap(), s);
        assert!(StateVector::from_bytes(&bytes[1..]).is_err());
    }

    #[test]
    fn plain_eigenstates_follow_kravchuk_pattern() {
        for m in 1..=10 {
            let basis = OscillatorBasis::plain(m).unwrap();
            assert!(basis.orthonormality_defect() < 1e-12);
            for (k, lam) in basis.eigenstates.iter().enumerate() {
                let scale = ((1u64 << m) as f64 * bits::binomial_f64(m, k)).sqrt();
                for (y, a) in lam.amps().iter().enumerate() {
                    let expect = kravchuk_f64(k, weight(y as u64) as f64, m) / scale;
                    assert!(close(a.re, expect, 1e-12) && a.im == 0.0);
                }
            }
        }
    }

    #[test]
    fn plain_energies() {
        for m in 1..=8 {
            let basis = OscillatorBasis::plain(m).unwrap();
            for (k, lk) in basis.eigenstates.iter().enumerate() {
                let h = plain_hamiltonian_apply(lk);
                for (j, lj) in basis.eigenstates.iter().enumerate() {
                    let target = if j == k { k as f64 + 0.5 } else { 0.0 };
                    assert!((lj.inner(&h) - target).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn grid_relation_of_the_oscillator() {
        // j K_k(j-1) + (m-j) K_k(j+1) = (m - 2k) K_k(j) on the grid 0..=m.
        for m in 1..=14 {
            for k in 0..=m {
                for j in 0..=m {
                    let left = if j > 0 {
                        j as f64 * kravchuk_f64(k, j as f64 - 1.0, m)
                    } else {
                        0.0
                    };
                    let right = if j < m {
                        (m - j) as f64 * kravchuk_f64(k, j as f64 + 1.0, m)
                    } else {
                        0.0
                    };
                    let centre = (m as f64 - 2.0 * k as f64) * kravchuk_f64(k, j as f64, m);
                    assert!((left + right - centre).abs() <= 1e-9 * centre.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn bosonic_action_on_hamming_dual() {
        // Simplex generator: the dual code is the [7,4] Hamming code with d_perp = 3.
        let simplex = BinaryLinearCode::simplex(3).unwrap();
        let basis = OscillatorBasis::obfuscated(&simplex, 0b1010011).unwrap();
        assert_eq!(basis.levels(), 2);
        assert!(bosonic_action_defect(&basis, 0).unwrap() < 1e-8);
        assert!(bosonic_action_defect(&basis, 1).is_err());
        let ham = BinaryLinearCode::hamming74();
        let basis = OscillatorBasis::obfuscated(&ham, 0).unwrap();
        assert!(bosonic_action_defect(&basis, 0).unwrap() < 1e-8);
        let plain = OscillatorBasis::plain(9).unwrap();
        for k in 0..9 {
            assert!(bosonic_action_defect(&plain, k).unwrap() < 1e-9);
        }
    }

    #[test]
    fn obfuscated_eigenstates_match_closed_form() {
        let code = BinaryLinearCode::random_ldpc(12, 5, 3, 4).unwrap();
        let v = 0b101100111010;
        let basis = OscillatorBasis::obfuscated(&code, v).unwrap();
        assert!(basis.orthonormality_defect() < 1e-12);
        let mut dists = vec![0usize; 1 << 5];
        code.for_each_codeword(|x, c| dists[x as usize] = weight(c ^ v))
            .unwrap();
        for (k, lam) in basis.eigenstates.iter().enumerate() {
            let scale = (32.0 * bits::binomial_f64(12, k)).sqrt();
            for (x, a) in lam.amps().iter().enumerate() {
                assert!(close(
                    a.re,
                    kravchuk_f64(k, dists[x] as f64, 12) / scale,
                    1e-12
                ));
            }
        }
    }

    #[test]
    fn position_is_a_parity_sum_in_the_fourier_picture() {
        let code = BinaryLinearCode::random_ldpc(11, 6, 3, 1).unwrap();
        let v = 0b10110011010;
        for s in 0..1u64 << 6 {
            let e = StateVector::basis(6, s).unwrap();
            let mut via_position = position_apply(&code, v, &e.hadamarded()).unwrap();
            via_position.hadamard_transform();
            assert!(via_position.distance(&fourier_position_apply(&code, v, &e)) < 1e-12);
        }
    }

    #[test]
    fn optimal_weight_examples() {
        let (w, x) = optimal_weights(1, 16).unwrap();
        assert!(close(w.w[0], FRAC_1_SQRT_2, 1e-12) && close(w.w[1], FRAC_1_SQRT_2, 1e-12));
        assert!(close(x, 2.0, 1e-12));
        let (w, x) = optimal_weights(2, 16).unwrap();
        // Characteristic polynomial of [[0,a,0],[a,0,b],[0,b,0]] has top root sqrt(a^2 + b^2).
        let (a, b) = (4.0 / 2.0, 30f64.sqrt() / 2.0);
        assert!(close(x, (a * a + b * b).sqrt(), 1e-12));
        assert!(w.w.iter().all(|&c| c >= 0.0) && w.norm_defect() < 1e-12);
        let (w0, x0) = optimal_weights(0, 5).unwrap();
        assert_eq!((w0.w, x0), (vec![1.0], 0.0));
    }

    #[test]
    fn optimal_value_tracks_semicircle() {
        let ratio = |m: usize| {
            let ell = m / 10;
            top_position_eigenvalue(ell, m) / ((ell * (m - ell)) as f64).sqrt()
        };
        let r = [ratio(100), ratio(400), ratio(1600)];
        assert!(r[0] < r[1] && r[1] < r[2] && r[2] < 1.0, "{r:?}");
        assert!((0.9..=1.1).contains(&r[1]));
    }

    #[test]
    fn concentrated_states() {
        let basis = OscillatorBasis::plain(10).unwrap();
        let s = concentrated_state(&basis, 2, 2).unwrap();
        assert!(s.distance(&basis.eigenstates[3]) < 1e-12);
        let s = concentrated_state(&basis, 0, 2).unwrap();
        assert!(s.distance(&basis.eigenstates[1]) < 1e-12);
        assert!(concentrated_state(&basis, 8, 4).is_err());
        assert!(concentrated_state(&basis, 0, 1).is_err());
    }

    #[test]
    fn concentrated_variance_shrinks() {
        let basis = OscillatorBasis::plain(16).unwrap();
        let rel: Vec<f64> = (3..=6)
            .map(|r| {
                let s = concentrated_state(&basis, 2, r).unwrap();
                let (mean, var) = position_moments(&basis, &s).unwrap();
                var / (mean * mean)
            })
            .collect();
        assert!(rel.windows(2).all(|w| w[1] < w[0]), "{rel:?}");
    }
}
