//! Binary linear codes `C = { Bx : x in F_2^n }` given by an `m x n` generator.
//!
//! The generator `B` is also the constraint matrix of a Max-XORSAT instance;
//! its transpose is the parity-check matrix of the dual code
//! `C^perp = { y : B^T y = 0 }`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::{BuildHasherDefault, Hasher};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::{self, low_mask, weight};
use crate::error::{check_budget, invalid, Error, Result};

/// Generator matrix of a binary linear code together with its column view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryLinearCode {
    m: usize,
    n: usize,
    /// Row `i` packs `B_{i,0..n}`.
    rows: Vec<u64>,
    /// Column `j` packs `B_{0..m,j}`, i.e. the codeword `B e_j`.
    cols: Vec<u64>,
}

impl BinaryLinearCode {
    /// Builds a code from the rows of `B` (each row packs `n` bits).
    ///
    /// Rejects `m <= n`, `m > 64`, and rank-deficient generators.
    pub fn from_rows(m: usize, n: usize, rows: Vec<u64>) -> Result<Self> {
        if rows.len() != m {
            return Err(invalid(format!("expected {m} rows, got {}", rows.len())));
        }
        if n == 0 {
            return Err(invalid("message length n must be positive"));
        }
        if m <= n {
            return Err(invalid(format!(
                "need an overdetermined system m > n, got m={m}, n={n}"
            )));
        }
        if m > 64 {
            return Err(invalid(format!("codeword length {m} exceeds 64")));
        }
        if rows.iter().any(|&r| r & !low_mask(n) != 0) {
            return Err(invalid("row has bits beyond column n"));
        }
        let mut cols = vec![0u64; n];
        for (i, &r) in rows.iter().enumerate() {
            for (j, col) in cols.iter_mut().enumerate() {
                if (r >> j) & 1 == 1 {
                    *col |= 1u64 << i;
                }
            }
        }
        let rank = bits::rank(&cols);
        if rank != n {
            return Err(invalid(format!(
                "generator has column rank {rank} < n = {n}"
            )));
        }
        Ok(Self { m, n, rows, cols })
    }

    /// Builds a code from rows written as `0`/`1` strings of equal length.
    pub fn from_row_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let n = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut packed = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("ragged row: expected {n} columns, got {}", r.len()),
                });
            }
            packed.push(bits::parse_bit_string(r).ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("row {r:?} is not a 0/1 string"),
            })?);
        }
        Self::from_rows(rows.len(), n, packed)
    }

    /// Repetition code: `B` is the all-ones column, `n = 1`.
    pub fn repetition(m: usize) -> Result<Self> {
        Self::from_rows(m, 1, vec![1; m])
    }

    /// The [7,4] Hamming code in systematic form.
    pub fn hamming74() -> Self {
        Self::from_row_strings(&["1000", "0100", "0010", "0001", "1101", "1011", "0111"])
            .expect("hamming generator is valid")
    }

    /// Simplex code of dimension `r`: the rows of `B` are all nonzero `r`-bit vectors.
    /// Its dual is the Hamming code of length `2^r - 1`.
    pub fn simplex(r: usize) -> Result<Self> {
        if !(2..=6).contains(&r) {
            return Err(invalid(format!("simplex dimension {r} outside 2..=6")));
        }
        let m = (1usize << r) - 1;
        Self::from_rows(m, r, (1..=m as u64).collect())
    }

    /// Random sparse generator: each of the `m` rows has `row_weight` ones in
    /// uniformly chosen columns. Redraws until the generator has full column rank.
    pub fn random_ldpc(m: usize, n: usize, row_weight: usize, seed: u64) -> Result<Self> {
        if row_weight == 0 || row_weight > n {
            return Err(invalid(format!(
                "row weight {row_weight} must lie in 1..={n}"
            )));
        }
        if m <= n || m > 64 {
            return Err(invalid(format!("need n < m <= 64, got m={m}, n={n}")));
        }
        if row_weight.is_multiple_of(2) {
            // Even rows make the columns sum to zero, so the rank is at most n - 1.
            return Err(invalid(format!(
                "even row weight {row_weight} never gives full column rank"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let rows: Vec<u64> = (0..m)
                .map(|_| {
                    index::sample(&mut rng, n, row_weight)
                        .into_iter()
                        .fold(0u64, |acc, j| acc | (1u64 << j))
                })
                .collect();
            if let Ok(code) = Self::from_rows(m, n, rows) {
                return Ok(code);
            }
        }
        Err(invalid(format!(
            "no full-rank {m}x{n} generator with row weight {row_weight} after 10000 draws"
        )))
    }

    /// Codeword length (rows of `B`).
    pub fn m(&self) -> usize {
        self.m
    }

    /// Message length (columns of `B`).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Column rank of `B`; always `n` for a constructed code.
    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Columns of `B`, which are the rows of the dual parity check `B^T`.
    pub fn cols(&self) -> &[u64] {
        &self.cols
    }

    /// `B^T` as `n` packed rows of length `m`.
    pub fn dual_parity_check(&self) -> Vec<u64> {
        self.cols.clone()
    }

    /// Codeword `Bx`.
    pub fn encode(&self, x: u64) -> u64 {
        let mut c = 0u64;
        let mut rest = x & low_mask(self.n);
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            c ^= self.cols[j];
            rest &= rest - 1;
        }
        c
    }

    /// Syndrome `B^T y` of an `m`-bit vector.
    pub fn syndrome(&self, y: u64) -> u64 {
        self.cols
            .iter()
            .enumerate()
            .fold(0u64, |s, (j, &col)| s | ((bits::dot(col, y) as u64) << j))
    }

    /// Basis of the dual code `{ y : B^T y = 0 }` (dimension `m - n`).
    pub fn dual_basis(&self) -> Vec<u64> {
        bits::nullspace(&self.cols, self.m)
    }

    /// Calls `f(x, Bx)` for all `2^n` messages.
    pub fn for_each_codeword(&self, f: impl FnMut(u64, u64)) -> Result<()> {
        check_budget("codewords", self.n as u32)?;
        bits::for_each_in_span(&self.cols, f);
        Ok(())
    }

    /// Calls `f(y)` for every dual codeword.
    pub fn for_each_dual_codeword(&self, mut f: impl FnMut(u64)) -> Result<()> {
        check_budget("dual codewords", (self.m - self.n) as u32)?;
        bits::for_each_in_span(&self.dual_basis(), |_, y| f(y));
        Ok(())
    }

    /// All dual codewords, zero first.
    pub fn dual_codewords(&self) -> Result<Vec<u64>> {
        let mut out = Vec::with_capacity(1 << (self.m - self.n).min(24));
        self.for_each_dual_codeword(|y| out.push(y))?;
        Ok(out)
    }

    /// Serializes in the plain-text code format: `"m n"` then `m` rows of `n` bits.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.m, self.n);
        for &r in &self.rows {
            s.push_str(&bits::to_bit_string(r, self.n));
            s.push('\n');
        }
        s
    }
}

/// Parses the code file format, optionally followed by an `m`-character target line.
pub fn parse_code_text(text: &str) -> Result<(BinaryLinearCode, Option<u64>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty input".into(),
    })?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse {
            line: hline,
            message: format!("bad header {header:?}: {e}"),
        })?;
    let [m, n] = dims[..] else {
        return Err(Error::Parse {
            line: hline,
            message: format!("header must be \"m n\", got {header:?}"),
        });
    };
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, row) = lines.next().ok_or(Error::Parse {
            line: hline,
            message: format!("expected {m} rows"),
        })?;
        if row.len() != n {
            return Err(Error::Parse {
                line,
                message: format!("ragged row: expected {n} columns, got {}", row.len()),
            });
        }
        rows.push(bits::parse_bit_string(row).ok_or(Error::Parse {
            line,
            message: format!("row {row:?} is not a 0/1 string"),
        })?);
    }
    let target = match lines.next() {
        None => None,
        Some((line, t)) => {
            if t.len() != m {
                return Err(Error::Parse {
                    line,
                    message: format!("target must have {m} characters, got {}", t.len()),
                });
            }
            Some(bits::parse_bit_string(t).ok_or(Error::Parse {
                line,
                message: format!("target {t:?} is not a 0/1 string"),
            })?)
        }
    };
    if let Some((line, extra)) = lines.next() {
        return Err(Error::Parse {
            line,
            message: format!("unexpected trailing line {extra:?}"),
        });
    }
    let code = BinaryLinearCode::from_rows(m, n, rows)?;
    Ok((code, target))
}

/// Minimum nonzero weight of `C`, by enumerating all `2^n` messages.
pub fn code_distance(code: &BinaryLinearCode) -> Result<usize> {
    let mut best = usize::MAX;
    code.for_each_codeword(|x, c| {
        if x != 0 {
            best = best.min(weight(c));
        }
    })?;
    Ok(best)
}

/// Minimum nonzero weight of `C^perp = { y : B^T y = 0 }`.
pub fn dual_distance(code: &BinaryLinearCode) -> Result<usize> {
    let mut best = usize::MAX;
    code.for_each_dual_codeword(|y| {
        if y != 0 {
            best = best.min(weight(y));
        }
    })?;
    Ok(best)
}

/// Largest distance from any point of `F_2^m` to the code.
///
/// Walks the `2^(m-n)` cosets of `C` breadth-first from the zero syndrome; the
/// depth at which a coset is first reached is the weight of its leader.
pub fn covering_radius(code: &BinaryLinearCode) -> Result<usize> {
    let r = code.m - code.n;
    check_budget("cosets", r as u32)?;
    // Parity check of C: rows are a basis of C^perp; syndrome of e_i is column i.
    let checks = code.dual_basis();
    let unit_syndromes: Vec<u32> = (0..code.m)
        .map(|i| {
            checks
                .iter()
                .enumerate()
                .fold(0u32, |s, (k, &h)| s | ((((h >> i) & 1) as u32) << k))
        })
        .collect();
    let cosets = 1usize << r;
    let mut depth = vec![u8::MAX; cosets];
    depth[0] = 0;
    let mut frontier = vec![0u32];
    let mut radius = 0usize;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &s in &frontier {
            for &u in &unit_syndromes {
                let t = (s ^ u) as usize;
                if depth[t] == u8::MAX {
                    depth[t] = depth[s as usize] + 1;
                    next.push(t as u32);
                }
            }
        }
        if !next.is_empty() {
            radius += 1;
        }
        frontier = next;
    }
    Ok(radius)
}

/// Histogram of distances from a point `v` to all codewords.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightProfile {
    pub origin: u64,
    pub counts: Vec<u64>,
}

impl WeightProfile {
    pub fn m(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// CSV with header `distance,count`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("distance,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            let _ = writeln!(s, "{i},{c}");
        }
        s
    }
}

/// `counts[i] = |{ x : |Bx - v| = i }|`.
pub fn weight_profile(code: &BinaryLinearCode, v: u64) -> Result<WeightProfile> {
    let mut counts = vec![0u64; code.m + 1];
    let v = v & low_mask(code.m);
    code.for_each_codeword(|_, c| counts[weight(c ^ v)] += 1)?;
    Ok(WeightProfile { origin: v, counts })
}

/// Weight distribution of the dual code, counted directly.
pub fn dual_weight_profile(code: &BinaryLinearCode) -> Result<WeightProfile> {
    let mut counts = vec![0u64; code.m + 1];
    code.for_each_dual_codeword(|y| counts[weight(y)] += 1)?;
    Ok(WeightProfile { origin: 0, counts })
}

/// Bounded-distance decoding of syndromes `B^T y` back to the error `y`.
///
/// Only the exhaustive syndrome table ships, but callers go through this trait.
pub trait Decoder {
    /// Largest error weight the decoder corrects.
    fn radius(&self) -> usize;
    /// The unique `y` with `|y| <= radius` and `B^T y = syndrome`, if any.
    fn decode(&self, syndrome: u64) -> Option<u64>;
}

/// Multiplicative hash for the `u64` syndrome keys.
#[derive(Debug, Default, Clone, Copy)]
struct SyndromeHasher(u64);

impl Hasher for SyndromeHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }

    fn write_u64(&mut self, x: u64) {
        self.0 = (self.0 ^ x)
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .rotate_left(29);
    }
}

type SyndromeTable = HashMap<u64, u64, BuildHasherDefault<SyndromeHasher>>;

/// Exhaustive syndrome table over all `y` with `|y| <= radius`.
#[derive(Debug, Clone)]
pub struct SyndromeDecoder {
    code: BinaryLinearCode,
    radius: usize,
    dual_distance: usize,
    table: SyndromeTable,
}

impl SyndromeDecoder {
    /// Builds the table. `radius` defaults to `floor((d_perp - 1) / 2)`; larger
    /// values are rejected because decoding would no longer be unique.
    pub fn new(code: &BinaryLinearCode, radius: Option<usize>) -> Result<Self> {
        let d = dual_distance(code)?;
        let max_radius = (d - 1) / 2;
        let radius = radius.unwrap_or(max_radius);
        if 2 * radius >= d {
            return Err(invalid(format!(
                "radius {radius} is not below d_perp/2 = {d}/2"
            )));
        }
        let entries: u128 = (0..=radius).map(|k| bits::binomial_u128(code.m, k)).sum();
        check_budget(
            "syndrome table entries",
            128 - (entries.max(1) - 1).leading_zeros(),
        )?;
        let mut table =
            SyndromeTable::with_capacity_and_hasher(entries as usize, Default::default());
        for k in 0..=radius {
            for y in bits::weight_k_vectors(code.m, k) {
                if table.insert(code.syndrome(y), y).is_some() {
                    return Err(Error::InvariantViolation(format!(
                        "syndrome collision at weight {k} below d_perp/2"
                    )));
                }
            }
        }
        Ok(Self {
            code: code.clone(),
            radius,
            dual_distance: d,
            table,
        })
    }

    pub fn code(&self) -> &BinaryLinearCode {
        &self.code
    }

    pub fn dual_distance(&self) -> usize {
        self.dual_distance
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl Decoder for SyndromeDecoder {
    fn radius(&self) -> usize {
        self.radius
    }

    fn decode(&self, syndrome: u64) -> Option<u64> {
        self.table.get(&syndrome).copied()
    }
}

/// Builds a code from a generator spec: `repetition:m`, `hamming74`, `simplex:r`
/// or `ldpc:m,n,rowweight` (the latter seeded by `seed`).
pub fn generate(spec: &str, seed: u64) -> Result<BinaryLinearCode> {
    let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
    let nums = || -> Result<Vec<usize>> {
        args.split(',')
            .map(|a| {
                a.trim()
                    .parse::<usize>()
                    .map_err(|_| invalid(format!("bad number {a:?} in {spec:?}")))
            })
            .collect()
    };
    match (kind.trim(), args.is_empty()) {
        ("hamming74", true) => Ok(BinaryLinearCode::hamming74()),
        ("repetition", false) => match nums()?[..] {
            [m] => BinaryLinearCode::repetition(m),
            _ => Err(invalid(format!("expected repetition:m, got {spec:?}"))),
        },
        ("simplex", false) => match nums()?[..] {
            [r] => BinaryLinearCode::simplex(r),
            _ => Err(invalid(format!("expected simplex:r, got {spec:?}"))),
        },
        ("ldpc", false) => match nums()?[..] {
            [m, n, w] => BinaryLinearCode::random_ldpc(m, n, w, seed),
            _ => Err(invalid(format!(
                "expected ldpc:m,n,rowweight, got {spec:?}"
            ))),
        },
        _ => Err(invalid(format!("unknown generator spec {spec:?}"))),
    }
}

/// A labelled code from [`corpus`].
#[derive(Debug, Clone)]
pub struct NamedCode {
    pub name: String,
    pub code: BinaryLinearCode,
}

/// The standard experiment corpus: every code has `m <= max_m`.
///
/// Repetition codes, Hamming [7,4] (as `B`), simplex codes, `B = [I; 1..1]`,
/// and row-weight-3 LDPC generators for each `(m, n)` with `4 <= n < m` and
/// `n in {3, m/2, m - 2}` over seeds `0..3`.
pub fn corpus(max_m: usize) -> Vec<NamedCode> {
    let mut out = Vec::new();
    let mut push = |name: String, code: Result<BinaryLinearCode>| {
        if let Ok(code) = code {
            if code.m() <= max_m {
                out.push(NamedCode { name, code });
            }
        }
    };
    for m in 2..=max_m.min(8) {
        push(format!("repetition:{m}"), BinaryLinearCode::repetition(m));
    }
    push("hamming74".into(), Ok(BinaryLinearCode::hamming74()));
    for r in 2..=4 {
        push(format!("simplex:{r}"), BinaryLinearCode::simplex(r));
    }
    for n in 2..=5 {
        let rows: Vec<u64> = (0..n).map(|i| 1u64 << i).chain([low_mask(n)]).collect();
        push(
            format!("parity:{n}"),
            BinaryLinearCode::from_rows(n + 1, n, rows),
        );
    }
    for m in 6..=max_m.min(16) {
        let mut ns = vec![3, m / 2, m - 2];
        ns.dedup();
        for n in ns {
            for seed in 0..3 {
                push(
                    format!("ldpc:{m},{n},3@{seed}"),
                    BinaryLinearCode::random_ldpc(m, n, 3, seed),
                );
            }
        }
    }
    out
}

/// `decode` as a free function over any decoder.
pub fn decode(decoder: &impl Decoder, syndrome: u64) -> Option<u64> {
    decoder.decode(syndrome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_extended() -> BinaryLinearCode {
        // B = [I_2; 1 1]
        BinaryLinearCode::from_row_strings(&["10", "01", "11"]).unwrap()
    }

    #[test]
    fn generator_specs() {
        assert_eq!(
            generate("hamming74", 0).unwrap(),
            BinaryLinearCode::hamming74()
        );
        assert_eq!(generate("repetition:4", 0).unwrap().m(), 4);
        assert_eq!(generate("simplex:3", 0).unwrap().m(), 7);
        let a = generate("ldpc:12,6,3", 5).unwrap();
        assert_eq!(a, generate("ldpc:12,6,3", 5).unwrap());
        assert_eq!((a.m(), a.n()), (12, 6));
        for bad in ["", "ldpc:12,6", "hamming74:3", "simplex:x", "torus:3"] {
            assert!(generate(bad, 0).is_err(), "{bad}");
        }
    }

    #[test]
    fn corpus_is_large_and_bounded() {
        let c = corpus(16);
        assert!(c.len() >= 50);
        assert!(c
            .iter()
            .all(|nc| nc.code.m() <= 16 && nc.code.rank() == nc.code.n()));
        assert!(corpus(10).iter().all(|nc| nc.code.m() <= 10));
    }

    /// Brute-force covering radius straight from the definition.
    fn covering_radius_by_points(code: &BinaryLinearCode) -> usize {
        let mut words = Vec::new();
        code.for_each_codeword(|_, c| words.push(c)).unwrap();
        (0..1u64 << code.m())
            .map(|v| words.iter().map(|&c| weight(c ^ v)).min().unwrap())
            .max()
            .unwrap()
    }

    #[test]
    fn construction_rejects_bad_generators() {
        assert!(BinaryLinearCode::from_row_strings(&["1", "1"]).is_ok());
        assert!(BinaryLinearCode::from_row_strings(&["10", "01"]).is_err()); // m == n
        assert!(BinaryLinearCode::from_row_strings(&["11", "11", "11"]).is_err()); // rank 1
        assert!(matches!(
            BinaryLinearCode::from_row_strings(&["10", "1", "11"]),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn distances_match_worked_examples() {
        let rep3 = BinaryLinearCode::repetition(3).unwrap();
        let ham = BinaryLinearCode::hamming74();
        let ie = identity_extended();
        assert_eq!(code_distance(&rep3).unwrap(), 3);
        assert_eq!(code_distance(&ham).unwrap(), 3);
        assert_eq!(code_distance(&ie).unwrap(), 2);
        assert_eq!(dual_distance(&rep3).unwrap(), 2);
        assert_eq!(dual_distance(&ham).unwrap(), 4);
        for n in 1..=6 {
            let mut rows: Vec<u64> = (0..n).map(|j| 1u64 << j).collect();
            rows.push((1u64 << n) - 1);
            let code = BinaryLinearCode::from_rows(n + 1, n, rows).unwrap();
            assert_eq!(dual_distance(&code).unwrap(), n + 1);
        }
    }

    #[test]
    fn covering_radius_examples_and_oracle() {
        assert_eq!(
            covering_radius(&BinaryLinearCode::repetition(3).unwrap()).unwrap(),
            1
        );
        assert_eq!(covering_radius(&BinaryLinearCode::hamming74()).unwrap(), 1);
        assert_eq!(covering_radius(&identity_extended()).unwrap(), 1);
        for seed in 0..12 {
            let code = BinaryLinearCode::random_ldpc(10, 4, 3, seed).unwrap();
            assert_eq!(
                covering_radius(&code).unwrap(),
                covering_radius_by_points(&code)
            );
        }
        let simplex = BinaryLinearCode::simplex(3).unwrap();
        assert_eq!(
            covering_radius(&simplex).unwrap(),
            covering_radius_by_points(&simplex)
        );
    }

    #[test]
    fn weight_profile_examples() {
        let rep2 = BinaryLinearCode::repetition(2).unwrap();
        assert_eq!(weight_profile(&rep2, 0b00).unwrap().counts, vec![1, 0, 1]);
        assert_eq!(weight_profile(&rep2, 0b10).unwrap().counts, vec![0, 2, 0]);
        let ham = BinaryLinearCode::hamming74();
        assert_eq!(
            weight_profile(&ham, 0).unwrap().counts,
            vec![1, 0, 0, 7, 7, 0, 0, 1]
        );
        assert_eq!(
            weight_profile(&ham, 0).unwrap().to_csv().lines().next(),
            Some("distance,count")
        );
    }

    #[test]
    fn dual_codewords_satisfy_parity_checks() {
        let ham = BinaryLinearCode::hamming74();
        let duals = ham.dual_codewords().unwrap();
        assert_eq!(duals.len(), 8);
        for y in 0..1u64 << 7 {
            let in_dual = ham.syndrome(y) == 0;
            assert_eq!(in_dual, duals.contains(&y));
        }
        assert_eq!(ham.dual_parity_check(), ham.cols().to_vec());
    }

    #[test]
    fn decoder_examples() {
        let ham = BinaryLinearCode::hamming74();
        let dec = SyndromeDecoder::new(&ham, None).unwrap();
        assert_eq!(dec.radius(), 1);
        assert_eq!(decode(&dec, 0), Some(0));
        let e3 = 1u64 << 3;
        assert_eq!(decode(&dec, ham.syndrome(e3)), Some(e3));
        // Weight-2 errors land in cosets that are absent from the table.
        let absent = (0..1u64 << 4).filter(|&s| dec.decode(s).is_none()).count();
        assert_eq!(absent, 16 - 8);
        assert!(SyndromeDecoder::new(&ham, Some(2)).is_err());
        let rep3 = BinaryLinearCode::repetition(3).unwrap();
        assert_eq!(SyndromeDecoder::new(&rep3, None).unwrap().radius(), 0);
    }

    #[test]
    fn code_text_format() {
        let ham = BinaryLinearCode::hamming74();
        let text = format!("{}1010101\n", ham.to_text());
        let (parsed, v) = parse_code_text(&text).unwrap();
        assert_eq!(parsed, ham);
        assert_eq!(v, Some(0b1010101));
        assert!(parse_code_text("3 2\n10\n0\n11\n").is_err());
        assert!(parse_code_text("3 2\n10\n01\n11\n0101\n").is_err());
        assert!(parse_code_text("").is_err());
        assert!(parse_code_text("3 2\n10\n01\n").is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let mut rows: Vec<u64> = (0..30).map(|j| 1u64 << j).collect();
        rows.push((1u64 << 30) - 1);
        let big = BinaryLinearCode::from_rows(31, 30, rows).unwrap();
        assert!(matches!(code_distance(&big), Err(Error::Budget { .. })));
        assert_eq!(dual_distance(&big).unwrap(), 31);
    }

    #[test]
    fn ldpc_generator_is_reproducible() {
        let a = BinaryLinearCode::random_ldpc(16, 8, 3, 7).unwrap();
        let b = BinaryLinearCode::random_ldpc(16, 8, 3, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.rows().iter().all(|&r| r.count_ones() == 3));
    }
}
