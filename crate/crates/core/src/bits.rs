//! Word-level GF(2) helpers shared by the code and state modules.
//!
//! A vector of length `len <= 64` is packed into a `u64`, coordinate `i` in
//! bit `i`. When printed, character `i` of the string is coordinate `i`.

/// Mask with the low `bits` bits set.
#[inline]
pub fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Hamming weight.
#[inline]
pub fn weight(x: u64) -> usize {
    x.count_ones() as usize
}

/// Inner product over GF(2).
#[inline]
pub fn dot(a: u64, b: u64) -> u8 {
    ((a & b).count_ones() & 1) as u8
}

/// `(-1)^(a.b)` as an integer.
#[inline]
pub fn sign(a: u64, b: u64) -> i64 {
    1 - 2 * dot(a, b) as i64
}

/// All `len`-bit vectors of Hamming weight `k`, in increasing numeric order.
pub fn weight_k_vectors(len: usize, k: usize) -> impl Iterator<Item = u64> {
    debug_assert!(len <= 64);
    let end: u128 = 1u128 << len;
    let mut next: Option<u128> = if k > len {
        None
    } else {
        Some((1u128 << k) - 1)
    };
    std::iter::from_fn(move || {
        let x = next?;
        if x >= end {
            next = None;
            return None;
        }
        next = if x == 0 {
            None
        } else {
            // Gosper's hack: next integer with the same popcount.
            let c = x & x.wrapping_neg();
            let r = x + c;
            Some((((r ^ x) >> 2) / c) | r)
        };
        Some(x as u64)
    })
}

/// Binomial coefficient as `f64` (exact for the sizes used here).
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Binomial coefficient as `u128`; panics on overflow, which cannot happen for `n <= 64`.
pub fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Rank over GF(2) of a set of packed vectors.
pub fn rank(vectors: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::with_capacity(64);
    for &v in vectors {
        let mut x = v;
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            // Keep the basis sorted descending so `min` reduction works as elimination
            // on the leading bit.
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Basis of `{ y : rows[j] . y = 0 for all j }`, with `y` of length `width`.
pub fn nullspace(rows: &[u64], width: usize) -> Vec<u64> {
    // Reduced row echelon form, pivoting on the lowest set bit.
    let mut reduced: Vec<u64> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for &r in rows {
        let mut x = r & low_mask(width);
        for (&row, &p) in reduced.iter().zip(&pivots) {
            if (x >> p) & 1 == 1 {
                x ^= row;
            }
        }
        if x == 0 {
            continue;
        }
        let p = x.trailing_zeros() as usize;
        for row in reduced.iter_mut() {
            if (*row >> p) & 1 == 1 {
                *row ^= x;
            }
        }
        reduced.push(x);
        pivots.push(p);
    }
    let mut basis = Vec::with_capacity(width - reduced.len());
    for free in 0..width {
        if pivots.contains(&free) {
            continue;
        }
        let mut y = 1u64 << free;
        for (&row, &p) in reduced.iter().zip(&pivots) {
            if (row >> free) & 1 == 1 {
                y |= 1u64 << p;
            }
        }
        basis.push(y);
    }
    basis
}

/// Calls `f` on every element of the span of `basis` (including zero), walking
/// a Gray code so each step costs one XOR.
pub fn for_each_in_span(basis: &[u64], mut f: impl FnMut(u64, u64)) {
    let dim = basis.len();
    let mut combo = 0u64;
    let mut value = 0u64;
    f(combo, value);
    let total: u64 = if dim >= 64 { u64::MAX } else { 1u64 << dim };
    let mut i: u64 = 1;
    while i < total {
        let bit = i.trailing_zeros() as usize;
        combo ^= 1u64 << bit;
        value ^= basis[bit];
        f(combo, value);
        i += 1;
    }
}

/// Formats the low `len` bits, coordinate 0 first.
pub fn to_bit_string(x: u64, len: usize) -> String {
    (0..len)
        .map(|i| if (x >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses a string of `0`/`1` characters, coordinate 0 first.
pub fn parse_bit_string(s: &str) -> Option<u64> {
    if s.len() > 64 {
        return None;
    }
    let mut x = 0u64;
    for (i, ch) in s.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => x |= 1u64 << i,
            _ => return None,
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_k_enumeration_counts() {
        for len in 0..=10 {
            for k in 0..=len {
                let v: Vec<u64> = weight_k_vectors(len, k).collect();
                assert_eq!(v.len() as u128, binomial_u128(len, k), "len={len} k={k}");
                assert!(v.iter().all(|&x| weight(x) == k && x < (1 << len)));
                assert!(v.windows(2).all(|w| w[0] < w[1]));
            }
        }
        assert_eq!(weight_k_vectors(3, 4).count(), 0);
        assert_eq!(weight_k_vectors(64, 64).collect::<Vec<_>>(), vec![u64::MAX]);
    }

    #[test]
    fn nullspace_is_orthogonal_and_complete() {
        let rows = [0b1011u64, 0b0110];
        let ns = nullspace(&rows, 4);
        assert_eq!(ns.len(), 2);
        for &y in &ns {
            for &r in &rows {
                assert_eq!(dot(y, r), 0);
            }
        }
        assert_eq!(rank(&ns), 2);
    }

    #[test]
    fn rank_of_dependent_set() {
        assert_eq!(rank(&[0b011, 0b101, 0b110]), 2);
        assert_eq!(rank(&[0, 0]), 0);
        assert_eq!(rank(&[1, 2, 4, 8]), 4);
    }

    #[test]
    fn bit_strings_round_trip() {
        assert_eq!(to_bit_string(0b0110, 5), "01100");
        assert_eq!(parse_bit_string("01100"), Some(0b0110));
        assert_eq!(parse_bit_string("01x"), None);
    }

    #[test]
    fn span_walk_visits_every_element_once() {
        let basis = [0b001u64, 0b110];
        let mut seen = Vec::new();
        for_each_in_span(&basis, |_, v| seen.push(v));
        seen.sort_unstable();
        assert_eq!(seen, vec![0b000, 0b001, 0b110, 0b111]);
    }
}
