//! Successive cancellation (SC), list (SCL), and CRC-aided list decoding.
//!
//! The decoders work on channel LLRs in natural code-bit order with the
//! convention that positive LLR favors bit 0. Internally the LLR vector is
//! bit-reversal permuted once so the recursion mirrors the encoder's
//! butterfly structure; decoded source bits come out in natural order.
//!
//! ```
//! use rcpp::codec::{sc_decode, FrozenSpec};
//! use rcpp::polar::polar_encode;
//!
//! let spec = FrozenSpec::new(8, &[4, 6, 7, 8]).unwrap();
//! let u = spec.source_word(&[1, 0, 1, 1]).unwrap();
//! let x = polar_encode(&u).unwrap();
//! let llrs: Vec<f64> = x.iter().map(|&b| if b == 0 { 4.0 } else { -4.0 }).collect();
//! let out = sc_decode(&llrs, &spec).unwrap();
//! assert_eq!(out.info, vec![1, 0, 1, 1]);
//! ```

use crate::error::{Error, Result};
use crate::polar::bit_reverse_permute;

/// Finite stand-in for a perfectly known bit's +infinite LLR.
pub const SATURATION_LLR: f64 = 1e9;

/// Check-node combining rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckRule {
    /// Exact boxplus (tanh rule) in a numerically stable log form.
    #[default]
    Exact,
    /// Min-sum approximation.
    MinSum,
}

fn boxplus(rule: CheckRule, a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) ^ (b < 0.0) { -1.0 } else { 1.0 };
    let base = sign * a.abs().min(b.abs());
    match rule {
        CheckRule::MinSum => base,
        CheckRule::Exact => base + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p(),
    }
}

/// Information / frozen partition of the source positions with frozen values
/// (all zero by default).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrozenSpec {
    parent_len: usize,
    is_info: Vec<bool>,
    frozen_values: Vec<u8>,
}

impl FrozenSpec {
    /// Builds a spec from 1-based information positions; frozen values are 0.
    pub fn new(parent_len: usize, info: &[usize]) -> Result<Self> {
        if parent_len == 0 || !parent_len.is_power_of_two() {
            return Err(Error::Shape(format!(
                "parent length {parent_len} is not a power of two"
            )));
        }
        let mut is_info = vec![false; parent_len];
        for &i in info {
            if i < 1 || i > parent_len {
                return Err(Error::Range(format!(
                    "info index {i} outside 1..={parent_len}"
                )));
            }
            if std::mem::replace(&mut is_info[i - 1], true) {
                return Err(Error::Consistency(format!("duplicate info index {i}")));
            }
        }
        Ok(Self {
            parent_len,
            is_info,
            frozen_values: vec![0; parent_len],
        })
    }

    pub fn from_info_set(a: &crate::reliability::InfoSet) -> Self {
        Self::new(a.parent_len(), a.info()).expect("InfoSet is a valid partition")
    }

    pub fn parent_len(&self) -> usize {
        self.parent_len
    }

    pub fn info_len(&self) -> usize {
        self.is_info.iter().filter(|&&b| b).count()
    }

    /// 1-based information positions, ascending.
    pub fn info(&self) -> Vec<usize> {
        (1..=self.parent_len)
            .filter(|&i| self.is_info[i - 1])
            .collect()
    }

    pub fn is_info(&self, index: usize) -> bool {
        self.is_info[index - 1]
    }

    /// Encodes `k` information bits into a source word with frozen values in
    /// place.
    pub fn source_word(&self, info_bits: &[u8]) -> Result<Vec<u8>> {
        if info_bits.len() != self.info_len() {
            return Err(Error::Shape(format!(
                "expected {} info bits, got {}",
                self.info_len(),
                info_bits.len()
            )));
        }
        let mut u = self.frozen_values.clone();
        let mut it = info_bits.iter();
        for (j, flag) in self.is_info.iter().enumerate() {
            if *flag {
                u[j] = *it.next().unwrap();
            }
        }
        Ok(u)
    }

    fn extract_info(&self, u: &[u8]) -> Vec<u8> {
        u.iter()
            .zip(&self.is_info)
            .filter_map(|(&b, &f)| f.then_some(b))
            .collect()
    }
}

/// One decoding outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Decoded source word, natural order, frozen constraints respected.
    pub source: Vec<u8>,
    /// Decoded information bits in ascending position order.
    pub info: Vec<u8>,
    /// Additive LLR path metric (smaller = more likely).
    pub path_metric: f64,
    /// CRC verdict; `None` unless CRC-aided decoding was used.
    pub crc_pass: Option<bool>,
}

fn hard_decision(llr: f64) -> u8 {
    if llr < 0.0 {
        1
    } else {
        0
    }
}

fn penalty(llr: f64, bit: u8) -> f64 {
    if hard_decision(llr) == bit {
        0.0
    } else {
        llr.abs()
    }
}

/// Successive cancellation decoding with the exact check rule.
pub fn sc_decode(llrs: &[f64], spec: &FrozenSpec) -> Result<DecodeResult> {
    sc_decode_with_rule(llrs, spec, CheckRule::Exact)
}

pub fn sc_decode_with_rule(
    llrs: &[f64],
    spec: &FrozenSpec,
    rule: CheckRule,
) -> Result<DecodeResult> {
    if llrs.len() != spec.parent_len() {
        return Err(Error::Shape(format!(
            "LLR length {} does not match N = {}",
            llrs.len(),
            spec.parent_len()
        )));
    }
    let lambda = bit_reverse_permute(llrs)?;
    let mut u = vec![0u8; spec.parent_len()];
    let mut metric = 0.0;
    sc_rec(&lambda, 0, spec, rule, &mut u, &mut metric);
    Ok(DecodeResult {
        info: spec.extract_info(&u),
        source: u,
        path_metric: metric,
        crc_pass: None,
    })
}

/// Decodes the source bits `offset..offset+m` given this subtree's LLRs;
/// returns the subtree's re-encoded word (in the permuted domain).
fn sc_rec(
    lambda: &[f64],
    offset: usize,
    spec: &FrozenSpec,
    rule: CheckRule,
    u: &mut [u8],
    metric: &mut f64,
) -> Vec<u8> {
    let m = lambda.len();
    if m == 1 {
        let bit = if spec.is_info(offset + 1) {
            hard_decision(lambda[0])
        } else {
            spec.frozen_values[offset]
        };
        *metric += penalty(lambda[0], bit);
        u[offset] = bit;
        return vec![bit];
    }
    let h = m / 2;
    let lam_f: Vec<f64> = (0..h).map(|j| boxplus(rule, lambda[j], lambda[j + h])).collect();
    let w_l = sc_rec(&lam_f, offset, spec, rule, u, metric);
    let lam_g: Vec<f64> = (0..h)
        .map(|j| lambda[j + h] + (1.0 - 2.0 * w_l[j] as f64) * lambda[j])
        .collect();
    let w_r = sc_rec(&lam_g, offset + h, spec, rule, u, metric);
    let mut w: Vec<u8> = (0..h).map(|j| w_l[j] ^ w_r[j]).collect();
    w.extend_from_slice(&w_r);
    w
}

#[derive(Clone)]
struct Path {
    u: Vec<u8>,
    pm: f64,
    /// Stack of pending per-subtree LLR vectors.
    lam: Vec<Vec<f64>>,
    /// Stack of decoded subtree words awaiting combination.
    w: Vec<Vec<u8>>,
}

/// Successive cancellation list decoding; returns up to `l` candidates
/// sorted by path metric (best first). `l = 1` reproduces [`sc_decode`].
pub fn scl_decode(llrs: &[f64], spec: &FrozenSpec, l: usize) -> Result<Vec<DecodeResult>> {
    scl_decode_with_rule(llrs, spec, l, CheckRule::Exact)
}

pub fn scl_decode_with_rule(
    llrs: &[f64],
    spec: &FrozenSpec,
    l: usize,
    rule: CheckRule,
) -> Result<Vec<DecodeResult>> {
    if l < 1 {
        return Err(Error::Range(format!("list size {l} must be at least 1")));
    }
    if llrs.len() != spec.parent_len() {
        return Err(Error::Shape(format!(
            "LLR length {} does not match N = {}",
            llrs.len(),
            spec.parent_len()
        )));
    }
    let lambda = bit_reverse_permute(llrs)?;
    let mut paths = vec![Path {
        u: vec![0; spec.parent_len()],
        pm: 0.0,
        lam: vec![lambda],
        w: Vec::new(),
    }];
    scl_rec(spec.parent_len(), 0, spec, rule, l, &mut paths);
    paths.sort_by(|a, b| a.pm.total_cmp(&b.pm));
    Ok(paths
        .into_iter()
        .map(|p| DecodeResult {
            info: spec.extract_info(&p.u),
            source: p.u,
            path_metric: p.pm,
            crc_pass: None,
        })
        .collect())
}

/// List analogue of [`sc_rec`]: every path enters with its subtree LLRs on
/// top of `lam` and leaves with the decoded subtree word on top of `w`. The
/// path list may grow (leaf branching) and shrink (pruning) inside.
fn scl_rec(
    m: usize,
    offset: usize,
    spec: &FrozenSpec,
    rule: CheckRule,
    l: usize,
    paths: &mut Vec<Path>,
) {
    if m == 1 {
        let mut next = Vec::with_capacity(paths.len() * 2);
        for path in paths.drain(..) {
            let mut path = path;
            let llr = path.lam.pop().expect("stack discipline")[0];
            if spec.is_info(offset + 1) {
                for bit in [hard_decision(llr), 1 ^ hard_decision(llr)] {
                    let mut p = path.clone();
                    p.pm += penalty(llr, bit);
                    p.u[offset] = bit;
                    p.w.push(vec![bit]);
                    next.push(p);
                }
            } else {
                let bit = spec.frozen_values[offset];
                path.pm += penalty(llr, bit);
                path.u[offset] = bit;
                path.w.push(vec![bit]);
                next.push(path);
            }
        }
        // Prune to the best l; the sort is total so the survivor set is
        // deterministic.
        next.sort_by(|a, b| a.pm.total_cmp(&b.pm).then(a.u.cmp(&b.u)));
        next.truncate(l);
        *paths = next;
        return;
    }
    let h = m / 2;
    for path in paths.iter_mut() {
        let lambda = path.lam.last().expect("stack discipline");
        let lam_f: Vec<f64> = (0..h).map(|j| boxplus(rule, lambda[j], lambda[j + h])).collect();
        path.lam.push(lam_f);
    }
    scl_rec(h, offset, spec, rule, l, paths);
    for path in paths.iter_mut() {
        let w_l = path.w.last().expect("stack discipline");
        let lambda = &path.lam[path.lam.len() - 1];
        let lam_g: Vec<f64> = (0..h)
            .map(|j| lambda[j + h] + (1.0 - 2.0 * w_l[j] as f64) * lambda[j])
            .collect();
        path.lam.push(lam_g);
    }
    scl_rec(h, offset + h, spec, rule, l, paths);
    for path in paths.iter_mut() {
        let w_r = path.w.pop().expect("stack discipline");
        let w_l = path.w.pop().expect("stack discipline");
        path.lam.pop(); // this subtree's LLRs are no longer needed
        let mut w: Vec<u8> = (0..h).map(|j| w_l[j] ^ w_r[j]).collect();
        w.extend_from_slice(&w_r);
        path.w.push(w);
    }
}

/// A binary CRC polynomial given by its degree and coefficient word (the
/// leading `x^degree` term is implicit).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crc {
    degree: usize,
    poly: u64,
}

impl Crc {
    pub fn new(degree: usize, poly: u64) -> Result<Self> {
        if degree < 1 || degree > 63 {
            return Err(Error::Range(format!("CRC degree {degree} outside 1..=63")));
        }
        Ok(Self { degree, poly })
    }

    /// The default: degree 16, polynomial 0x1021 (CCITT).
    pub fn crc16_ccitt() -> Self {
        Self { degree: 16, poly: 0x1021 }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn remainder(&self, bits: &[u8]) -> u64 {
        let top = 1u64 << (self.degree - 1);
        let mask = if self.degree == 63 { u64::MAX >> 1 } else { (1u64 << self.degree) - 1 };
        let mut reg = 0u64;
        for &b in bits {
            let fb = ((reg & top) != 0) ^ (b == 1);
            reg = (reg << 1) & mask;
            if fb {
                reg ^= self.poly & mask;
            }
        }
        reg
    }
}

/// Appends the `degree`-bit remainder to the message, MSB first.
pub fn crc_attach(message: &[u8], crc: &Crc) -> Vec<u8> {
    let rem = crc.remainder(message);
    let mut out = message.to_vec();
    for i in (0..crc.degree()).rev() {
        out.push(((rem >> i) & 1) as u8);
    }
    out
}

/// True iff `bits` is a message followed by its own CRC remainder.
pub fn crc_check(bits: &[u8], crc: &Crc) -> bool {
    bits.len() >= crc.degree() && crc.remainder(bits) == 0
}

/// CRC-aided SCL: returns the best-metric candidate whose information bits
/// pass the CRC, or the overall best candidate flagged `crc_pass = false`.
pub fn ca_scl_decode(
    llrs: &[f64],
    spec: &FrozenSpec,
    l: usize,
    crc: &Crc,
) -> Result<DecodeResult> {
    let candidates = scl_decode(llrs, spec, l)?;
    for c in &candidates {
        if crc_check(&c.info, crc) {
            let mut out = c.clone();
            out.crc_pass = Some(true);
            return Ok(out);
        }
    }
    let mut out = candidates.into_iter().next().expect("list is nonempty");
    out.crc_pass = Some(false);
    Ok(out)
}
