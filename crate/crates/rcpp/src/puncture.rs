//! Puncturing tables, source-side puncture sets, and equivalence classes.
//!
//! A puncturing table marks which of the `N = 2^n` code bits are not
//! transmitted (`t_i = 0`). Under the C0 mode the punctured bits are unknown
//! to the decoder (their channel has capacity zero); under the C1 mode they
//! are frozen to zero and known (capacity one). Both quasi-uniform schemes
//! place the zeros head-first (QUP) or tail-first (RQUP) and then apply the
//! bit-reversal permutation.
//!
//! ```
//! use rcpp::puncture::{derive_source_puncture_set, PuncturingTable};
//!
//! let t = PuncturingTable::qup(8, 3).unwrap();
//! assert_eq!(t.punctured_positions(), vec![1, 3, 5]);
//! let d = derive_source_puncture_set(&t).unwrap();
//! assert_eq!(d.indices(), &[1, 2, 3]);
//! ```

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::polar::{bit_reverse_permute, polar_encode, reverse_bits};
use crate::trellis::backward;

/// Puncturing mode: whether punctured code bits are unknown (C0) or fixed
/// and known (C1) at the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Mode {
    C0,
    C1,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::C0 => write!(f, "C0"),
            Mode::C1 => write!(f, "C1"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "C0" => Ok(Mode::C0),
            "C1" => Ok(Mode::C1),
            other => Err(Error::Range(format!("unknown mode {other:?}"))),
        }
    }
}

/// A length-`N` binary puncturing table together with its mode.
///
/// Invariants: `N = 2^n`, `Q + M = N`, and `2^(n-1) < M <= 2^n` (more than
/// half of the parent code must survive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuncturingTable {
    n: usize,
    table: Vec<u8>,
    q: usize,
    mode: Mode,
}

impl PuncturingTable {
    /// Wraps an explicit table, validating the length and rate range.
    ///
    /// Explicit tables may puncture up to half of the code (`Q <= N/2`); the
    /// scheme constructors enforce the stricter `Q < N/2`.
    pub fn from_bits(table: Vec<u8>, mode: Mode) -> Result<Self> {
        if table.is_empty() || !table.len().is_power_of_two() {
            return Err(Error::Shape(format!(
                "table length {} is not a power of two",
                table.len()
            )));
        }
        if let Some(&b) = table.iter().find(|&&b| b > 1) {
            return Err(Error::Range(format!("table entry {b} is not a bit")));
        }
        let q = table.iter().filter(|&&b| b == 0).count();
        let n = table.len().trailing_zeros() as usize;
        if 2 * q > table.len() {
            return Err(Error::Range(format!(
                "Q = {q} punctures more than half of N = {}",
                table.len()
            )));
        }
        Ok(Self { n, table, q, mode })
    }

    /// Quasi-uniform puncturing: bit-reversal of `(0^Q, 1^(N-Q))`, mode C0.
    pub fn qup(parent_len: usize, q: usize) -> Result<Self> {
        Self::reversal_scheme(parent_len, q, Mode::C0, false)
    }

    /// Reversal quasi-uniform puncturing: bit-reversal of `(1^(N-Q), 0^Q)`,
    /// mode C1.
    pub fn rqup(parent_len: usize, q: usize) -> Result<Self> {
        Self::reversal_scheme(parent_len, q, Mode::C1, true)
    }

    fn reversal_scheme(parent_len: usize, q: usize, mode: Mode, tail: bool) -> Result<Self> {
        check_rate_range(parent_len, q)?;
        let mut init = vec![1u8; parent_len];
        if tail {
            init[parent_len - q..].fill(0);
        } else {
            init[..q].fill(0);
        }
        let table = bit_reverse_permute(&init)?;
        Self::from_bits(table, mode)
    }

    /// Reference pattern for the column-weight-1 scheme: the last `Q` code
    /// bits in natural order are punctured, mode C1.
    ///
    /// The original algorithm admits many weight-1 column choices; this fixed
    /// tail pattern is only the reference simplification used for comparison
    /// and must not be taken as equivalent to the full search.
    pub fn wang_reference(parent_len: usize, q: usize) -> Result<Self> {
        check_rate_range(parent_len, q)?;
        let mut table = vec![1u8; parent_len];
        table[parent_len - q..].fill(0);
        Self::from_bits(table, Mode::C1)
    }

    pub fn parent_len(&self) -> usize {
        self.table.len()
    }

    /// Number of polarization levels `n = log2 N`.
    pub fn levels(&self) -> usize {
        self.n
    }

    /// Number of punctured code bits `Q`.
    pub fn punctured_len(&self) -> usize {
        self.q
    }

    /// Number of transmitted code bits `M = N - Q`.
    pub fn transmitted_len(&self) -> usize {
        self.table.len() - self.q
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// The raw table in natural (post-permutation) order.
    pub fn bits(&self) -> &[u8] {
        &self.table
    }

    /// 1-based positions of the punctured code bits, ascending.
    pub fn punctured_positions(&self) -> Vec<usize> {
        self.table
            .iter()
            .enumerate()
            .filter_map(|(i, &t)| (t == 0).then_some(i + 1))
            .collect()
    }

    /// True iff every distance `D` between consecutive punctured positions
    /// satisfies `2^(n-L-1) <= D <= 2^(n-L)` with `L = floor(log2 Q)`.
    /// Vacuously true for `Q = 0` (and `Q = 1`, which has no pairs).
    pub fn neighbor_distances_quasi_uniform(&self) -> bool {
        if self.q == 0 {
            return true;
        }
        let l = self.q.ilog2() as usize;
        let lo = 1usize << (self.n - l - 1);
        let hi = 1usize << (self.n - l);
        self.punctured_positions()
            .windows(2)
            .all(|w| (lo..=hi).contains(&(w[1] - w[0])))
    }

    /// Canonical text form: header `N Q mode`, then the table as an
    /// `N`-character 0/1 string in natural order.
    pub fn to_text(&self) -> String {
        let bits: String = self.table.iter().map(|&b| char::from(b'0' + b)).collect();
        format!("{} {} {}\n{}\n", self.table.len(), self.q, self.mode, bits)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Shape("empty puncturing table text".into()))?;
        let mut parts = header.split_whitespace();
        let parse = |p: Option<&str>, what: &str| -> Result<String> {
            p.map(str::to_owned)
                .ok_or_else(|| Error::Shape(format!("missing {what} in header")))
        };
        let n: usize = parse(parts.next(), "N")?
            .parse()
            .map_err(|_| Error::Shape("bad N in header".into()))?;
        let q: usize = parse(parts.next(), "Q")?
            .parse()
            .map_err(|_| Error::Shape("bad Q in header".into()))?;
        let mode: Mode = parse(parts.next(), "mode")?.parse()?;
        let bits_line = lines
            .next()
            .ok_or_else(|| Error::Shape("missing table line".into()))?;
        let table: Vec<u8> = bits_line
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::Shape(format!("bad table character {other:?}"))),
            })
            .collect::<Result<_>>()?;
        if table.len() != n {
            return Err(Error::Shape(format!(
                "table length {} does not match header N = {n}",
                table.len()
            )));
        }
        let t = Self::from_bits(table, mode)?;
        if t.q != q {
            return Err(Error::Consistency(format!(
                "header Q = {q} but table has {} zeros",
                t.q
            )));
        }
        Ok(t)
    }
}

fn check_rate_range(parent_len: usize, q: usize) -> Result<()> {
    if parent_len == 0 || !parent_len.is_power_of_two() {
        return Err(Error::Shape(format!(
            "parent length {parent_len} is not a power of two"
        )));
    }
    if 2 * q >= parent_len {
        return Err(Error::Range(format!(
            "Q = {q} leaves M = {} <= N/2 transmitted bits",
            parent_len - q
        )));
    }
    Ok(())
}

/// The set `D` of source positions whose channels degenerate under a
/// puncturing table: useless (Z = 1) under C0, perfect (Z = 0) under C1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourcePunctureSet {
    indices: Vec<usize>,
    mode: Mode,
}

impl SourcePunctureSet {
    pub fn new(mut indices: Vec<usize>, mode: Mode) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self { indices, mode }
    }

    /// 1-based source positions, ascending.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }
}

/// Propagates per-channel degeneracy flags from the punctured code bits back
/// to the source side. Always returns exactly `Q` flagged indices.
///
/// For C1 tables the shortening pattern is validated first: freezing the
/// flagged source bits to zero must force every punctured code bit to zero.
pub fn derive_source_puncture_set(table: &PuncturingTable) -> Result<SourcePunctureSet> {
    let code_flags: Vec<bool> = table.bits().iter().map(|&t| t == 0).collect();
    let src = match table.mode() {
        Mode::C0 => backward(&code_flags, &|a: &bool, b: &bool| (*a || *b, *a && *b))?,
        Mode::C1 => backward(&code_flags, &|a: &bool, b: &bool| (*a && *b, *a || *b))?,
    };
    let indices: Vec<usize> = src
        .iter()
        .enumerate()
        .filter_map(|(i, &f)| f.then_some(i + 1))
        .collect();
    debug_assert_eq!(indices.len(), table.punctured_len());
    let set = SourcePunctureSet::new(indices, table.mode());
    if table.mode() == Mode::C1 {
        validate_shortening(table, &set)?;
    }
    Ok(set)
}

/// Checks that `u_D = 0` with arbitrary `u_{D^c}` forces `x_i = 0` for every
/// punctured position `i`. By linearity the unit-vector basis is exhaustive.
fn validate_shortening(table: &PuncturingTable, set: &SourcePunctureSet) -> Result<()> {
    let n = table.parent_len();
    let punctured: Vec<usize> = table
        .punctured_positions()
        .iter()
        .map(|p| p - 1)
        .collect();
    let mut u = vec![0u8; n];
    for j in 0..n {
        if set.contains(j + 1) {
            continue;
        }
        u[j] = 1;
        let x = polar_encode(&u)?;
        u[j] = 0;
        if punctured.iter().any(|&i| x[i] != 0) {
            return Err(Error::InvalidShortening);
        }
    }
    Ok(())
}

/// Number of puncturing tables equivalent to the quasi-uniform one for a
/// given `(N, Q)`, reported as a power-of-two exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivalentClassCount {
    /// `E` such that the class has `2^E` members.
    pub exponent: u64,
}

impl EquivalentClassCount {
    /// The exact member count, when it fits in a `u64` (`E <= 63`).
    pub fn exact(&self) -> Option<u64> {
        (self.exponent <= 63).then(|| 1u64 << self.exponent)
    }
}

/// Counts the code-bit puncturing tables that induce the same source set as
/// quasi-uniform puncturing: with `Q = Σ_z 2^(m_z)` (`m_1 <= … <= m_|U|`),
/// the exponent is `Σ_z (n - 2|U| + 2z - m_z) · 2^(m_z)`.
/// ```
/// use rcpp::puncture::{count_equivalent_tables, enumerate_equivalent_tables,
///                      Mode, SourcePunctureSet};
///
/// let count = count_equivalent_tables(8, 3).unwrap();
/// assert_eq!(count.exact(), Some(32));
///
/// let reference = SourcePunctureSet::new(vec![1, 2, 3], Mode::C0);
/// let members = enumerate_equivalent_tables(8, 3, &reference).unwrap();
/// assert_eq!(members.len(), 32);
/// assert!(members.contains(&vec![2, 4, 6]));
/// ```
pub fn count_equivalent_tables(parent_len: usize, q: usize) -> Result<EquivalentClassCount> {
    if parent_len == 0 || !parent_len.is_power_of_two() {
        return Err(Error::Shape(format!(
            "parent length {parent_len} is not a power of two"
        )));
    }
    let n = parent_len.trailing_zeros() as u64;
    if q < 1 || 2 * q > parent_len {
        return Err(Error::Range(format!(
            "Q = {q} outside 1..=N/2 for N = {parent_len}"
        )));
    }
    // Set bit positions of Q, ascending.
    let ms: Vec<u64> = (0..64).filter(|z| (q >> z) & 1 == 1).collect();
    let u = ms.len() as i64;
    let mut exponent: i64 = 0;
    for (idx, &m) in ms.iter().enumerate() {
        let z = idx as i64 + 1;
        exponent += (n as i64 - 2 * u + 2 * z - m as i64) << m;
    }
    debug_assert!(exponent >= 0);
    Ok(EquivalentClassCount {
        exponent: exponent as u64,
    })
}

/// Enumerates every `Q`-subset of code-bit positions whose C0 propagation
/// yields the reference source set. Returns 1-based position sets in
/// lexicographic order. Guarded to `N <= 32`.
pub fn enumerate_equivalent_tables(
    parent_len: usize,
    q: usize,
    reference: &SourcePunctureSet,
) -> Result<Vec<Vec<usize>>> {
    if parent_len > 32 {
        return Err(Error::Capacity(format!(
            "enumeration limited to N <= 32, got {parent_len}"
        )));
    }
    if parent_len == 0 || !parent_len.is_power_of_two() {
        return Err(Error::Shape(format!(
            "parent length {parent_len} is not a power of two"
        )));
    }
    let n = parent_len.trailing_zeros() as usize;
    if reference.len() != q {
        return Err(Error::Consistency(format!(
            "reference set has {} indices, expected Q = {q}",
            reference.len()
        )));
    }
    if q == 0 {
        return Ok(vec![vec![]]);
    }
    let ref_mask: u64 = reference.indices().iter().map(|&i| 1u64 << (i - 1)).sum();
    let mut out = Vec::new();
    // Gosper's hack over all Q-subsets of the code positions. The flag
    // propagation works on the bit-reversed (w-domain) mask.
    let mut subset: u64 = (1u64 << q) - 1;
    let limit: u64 = if parent_len == 64 { u64::MAX } else { 1u64 << parent_len };
    while subset < limit {
        let w = reverse_mask(subset, n);
        if crate::trellis::backward_flags_c0_mask(w, n) == ref_mask {
            let positions: Vec<usize> =
                (0..parent_len).filter(|&i| (subset >> i) & 1 == 1).map(|i| i + 1).collect();
            out.push(positions);
        }
        // Next subset with the same popcount.
        let c = subset & subset.wrapping_neg();
        let r = subset + c;
        if r >= limit || c == 0 {
            break;
        }
        subset = (((r ^ subset) >> 2) / c) | r;
    }
    Ok(out)
}

fn reverse_mask(mask: u64, n: usize) -> u64 {
    let mut out = 0u64;
    for j in 0..(1usize << n) {
        if (mask >> j) & 1 == 1 {
            out |= 1 << reverse_bits(j, n);
        }
    }
    out
}

/// Enumerates every source-flag vector realizable by some code-bit
/// puncturing under the given mode, as bitmasks over source positions
/// (bit `j` set means source `j+1` is flagged). Guarded to `N <= 64`.
///
/// Built by the dominance recursion: a vector of length `2m` is realizable
/// iff its halves are realizable and the check half dominates (C0) or is
/// dominated by (C1) the variable half bitwise. The recursion is validated
/// against exhaustive propagation for small `N` in the test suite.
pub fn realizable_source_sets(levels: usize, mode: Mode) -> Result<Vec<u64>> {
    if levels > 6 {
        return Err(Error::Capacity(format!(
            "realizable-set enumeration limited to n <= 6, got {levels}"
        )));
    }
    let mut current: Vec<u64> = vec![0, 1];
    let mut m = 1usize;
    for _ in 0..levels {
        let mut next = HashSet::new();
        for &p in &current {
            for &q in &current {
                let ok = match mode {
                    Mode::C0 => q & p == q, // check half (low bits) >= var half
                    Mode::C1 => p & q == p, // check half <= var half
                };
                if ok {
                    next.insert(p | (q << m));
                }
            }
        }
        current = next.into_iter().collect();
        m *= 2;
    }
    current.sort_unstable();
    Ok(current)
}
