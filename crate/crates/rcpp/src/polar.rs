//! Bit-index arithmetic, the bit-reversal permutation, and the polar
//! transform `x = u · G_N` with `G_N = B_N · F_2^{⊗n}`.
//!
//! Channel and code-bit indices on the public surface are 1-based, matching
//! the usual tables for these codes; storage is plain 0-based vectors.
//!
//! The encoder computes `u · F_2^{⊗n}` with `n` in-place butterfly stages and
//! applies the bit-reversal `B_N` as an explicit post-permutation on the code
//! side. Since `B_N` and `F_2^{⊗n}` commute, this equals `(u · B_N) · F_2^{⊗n}`.
//!
//! ```
//! use rcpp::polar::polar_encode;
//!
//! let u = vec![1, 0, 1, 1];
//! let x = polar_encode(&u).unwrap();
//! // B_N · F^{⊗n} squares to the identity, so encoding twice round-trips.
//! assert_eq!(polar_encode(&x).unwrap(), u);
//! ```

use crate::error::{Error, Result};

/// A binary path label `(b_1, …, b_n)`, most significant bit first.
///
/// Reconstructing `i = 1 + Σ b_l · 2^(n-l)` yields the channel index the
/// label was derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathLabel {
    bits: Vec<u8>,
}

impl PathLabel {
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Number of polarization levels `n`.
    pub fn levels(&self) -> usize {
        self.bits.len()
    }

    /// Hamming weight `d_H`: the number of ones in the label.
    pub fn path_weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Complemental weight `f_H = n - d_H`: the number of zeros.
    pub fn complemental_weight(&self) -> usize {
        self.bits.len() - self.path_weight()
    }

    /// Inverse of [`binary_expansion`]: the 1-based channel index.
    pub fn channel_index(&self) -> usize {
        let mut i = 0usize;
        for &b in &self.bits {
            i = (i << 1) | b as usize;
        }
        i + 1
    }
}

/// Binary expansion of `i - 1` into `n` bits, most significant first.
///
/// `i` is a 1-based channel index in `1..=2^n`.
///
/// ```
/// use rcpp::polar::binary_expansion;
///
/// let label = binary_expansion(6, 3).unwrap(); // channel 6 of N = 8
/// assert_eq!(label.bits(), &[1, 0, 1]);
/// assert_eq!(label.path_weight(), 2);
/// assert_eq!(label.complemental_weight(), 1);
/// ```
pub fn binary_expansion(i: usize, n: usize) -> Result<PathLabel> {
    if i < 1 || i > (1usize << n) {
        return Err(Error::Range(format!(
            "channel index {i} outside 1..={}",
            1usize << n
        )));
    }
    let v = i - 1;
    let bits = (0..n).map(|l| ((v >> (n - 1 - l)) & 1) as u8).collect();
    Ok(PathLabel { bits })
}

/// Reverses the low `n` bits of `j`.
#[inline]
pub(crate) fn reverse_bits(j: usize, n: usize) -> usize {
    let mut out = 0usize;
    for l in 0..n {
        out |= ((j >> l) & 1) << (n - 1 - l);
    }
    out
}

fn levels_of(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Shape(format!("length {len} is not a power of two")));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Bit-reversal permutation: output position `j` (0-based) holds the input
/// element at the bit-reversed index of `j`. The permutation is an involution.
pub fn bit_reverse_permute<T: Clone>(v: &[T]) -> Result<Vec<T>> {
    let n = levels_of(v.len())?;
    Ok((0..v.len()).map(|j| v[reverse_bits(j, n)].clone()).collect())
}

/// Polar transform `x = u · G_N` over GF(2), `N = 2^n`, in `O(N log N)`.
///
/// The transform is an involution: applying it twice returns `u`.
pub fn polar_encode(u: &[u8]) -> Result<Vec<u8>> {
    let n = levels_of(u.len())?;
    let mut w = u.to_vec();
    // u · F_2^{⊗n}: the per-level stages commute, so any order works.
    for s in 0..n {
        let h = 1usize << s;
        let mut blk = 0;
        while blk < w.len() {
            for i in blk..blk + h {
                w[i] ^= w[i + h];
            }
            blk += 2 * h;
        }
    }
    bit_reverse_permute(&w)
}
