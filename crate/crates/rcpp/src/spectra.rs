//! Polar spectra (PS1/PS0), path weight enumeration, and spectrum distances.
//!
//! Two spectrum constructions are exposed and must not be conflated:
//!
//! * [`PolarSpectrum::from_labels`] bins the full-length path labels of the
//!   surviving source indices by Hamming weight. Every label has
//!   `d_H + f_H = n`, so the joint distance of a label pair is always `n`.
//! * [`PolarSpectrum::from_forest`] decomposes the surviving set into maximal
//!   complete subtrees and bins the within-subtree path weights. This is the
//!   construction the optimality results and the closed-form distance
//!   formulas quantify over; a subtree of depth `l` contributes the binomial
//!   row `C(l, k)`.
//!
//! The decomposition-digit joint distance (the carry argument over pruned
//! path digits) is a third quantity, exposed by [`digit_form_jsd`] for the
//! quasi-uniform schemes only.
//!
//! ```
//! use rcpp::spectra::{pwef_coefficients, PolarSpectrum, SpectrumKind};
//!
//! // Survivors of QUP(8,3): source channels 4..8.
//! let surviving: Vec<usize> = (4..=8).collect();
//! let ps1 = PolarSpectrum::from_forest(&surviving, 3, SpectrumKind::Ps1).unwrap();
//! assert_eq!(pwef_coefficients(&ps1), vec![2, 2, 1]);
//! ```

use crate::error::{Error, Result};
use crate::puncture::Mode;

/// Whether a spectrum bins by path weight (PS1) or complemental weight (PS0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Ps1,
    Ps0,
}

/// A polar spectrum: counts indexed by weight `0..=n`, summing to the number
/// of surviving paths `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarSpectrum {
    kind: SpectrumKind,
    levels: usize,
    counts: Vec<u64>,
}

fn validate_surviving(surviving: &[usize], levels: usize) -> Result<Vec<usize>> {
    let big_n = 1usize << levels;
    let mut v: Vec<usize> = surviving.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.len() != surviving.len() {
        return Err(Error::Consistency("duplicate surviving indices".into()));
    }
    if let Some(&bad) = v.iter().find(|&&i| i < 1 || i > big_n) {
        return Err(Error::Range(format!(
            "surviving index {bad} outside 1..={big_n}"
        )));
    }
    Ok(v)
}

impl PolarSpectrum {
    /// Bins the full path labels of the surviving indices: PS1 by the label's
    /// Hamming weight, PS0 by its complemental weight. An empty set yields the
    /// all-zero spectrum with `M = 0`.
    pub fn from_labels(surviving: &[usize], levels: usize, kind: SpectrumKind) -> Result<Self> {
        let v = validate_surviving(surviving, levels)?;
        let mut counts = vec![0u64; levels + 1];
        for &i in &v {
            let d = (i - 1).count_ones() as usize;
            let w = match kind {
                SpectrumKind::Ps1 => d,
                SpectrumKind::Ps0 => levels - d,
            };
            counts[w] += 1;
        }
        Ok(Self { kind, levels, counts })
    }

    /// Decomposes the surviving set into maximal complete subtrees and bins
    /// within-subtree path weights: a subtree of depth `l` adds `C(l, w)` at
    /// each weight `w` (identical for PS1 and PS0 by binomial symmetry).
    pub fn from_forest(surviving: &[usize], levels: usize, kind: SpectrumKind) -> Result<Self> {
        let v = validate_surviving(surviving, levels)?;
        let mut counts = vec![0u64; levels + 1];
        for (_, depth) in maximal_subtrees(&v, levels) {
            for w in 0..=depth {
                counts[w] += binomial(depth, w);
            }
        }
        Ok(Self { kind, levels, counts })
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Counts by weight `0..=n`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of surviving paths `M`.
    pub fn surviving_len(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// The coefficients of the path weight enumeration function `Σ counts[w]·X^w`,
/// truncated at the polynomial's degree. The zero polynomial (an empty
/// spectrum) yields an empty sequence.
pub fn pwef_coefficients(s: &PolarSpectrum) -> Vec<u64> {
    let mut c = s.counts().to_vec();
    while c.last() == Some(&0) {
        c.pop();
    }
    c
}

/// Mean weight of a spectrum: `(1/M)·Σ_w counts[w]·w`. This is SD1 for a PS1
/// spectrum and SD0 for a PS0 spectrum.
pub fn spectrum_distance(s: &PolarSpectrum) -> Result<f64> {
    let m = s.surviving_len();
    if m == 0 {
        return Err(Error::UndefinedDistance);
    }
    let num: u64 = s
        .counts()
        .iter()
        .enumerate()
        .map(|(w, &c)| c * w as u64)
        .sum();
    Ok(num as f64 / m as f64)
}

/// Joint spectrum distance: SD1 + SD0 of a PS1/PS0 pair over the same
/// surviving set.
pub fn joint_spectrum_distance(ps1: &PolarSpectrum, ps0: &PolarSpectrum) -> Result<f64> {
    if ps1.kind() != SpectrumKind::Ps1 || ps0.kind() != SpectrumKind::Ps0 {
        return Err(Error::Consistency("expected a (PS1, PS0) pair".into()));
    }
    if ps1.levels() != ps0.levels() || ps1.surviving_len() != ps0.surviving_len() {
        return Err(Error::Consistency(
            "PS1 and PS0 describe different surviving sets".into(),
        ));
    }
    Ok(spectrum_distance(ps1)? + spectrum_distance(ps0)?)
}

/// SD1, SD0 and their sum for one surviving set, subtree construction.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpectrumDistances {
    pub sd1: f64,
    pub sd0: f64,
    pub jsd: f64,
}

impl SpectrumDistances {
    /// Distances of the forest spectra of a surviving set.
    pub fn from_forest(surviving: &[usize], levels: usize) -> Result<Self> {
        let ps1 = PolarSpectrum::from_forest(surviving, levels, SpectrumKind::Ps1)?;
        let ps0 = PolarSpectrum::from_forest(surviving, levels, SpectrumKind::Ps0)?;
        let sd1 = spectrum_distance(&ps1)?;
        let sd0 = spectrum_distance(&ps0)?;
        Ok(Self { sd1, sd0, jsd: sd1 + sd0 })
    }
}

/// Multiset of maximal-subtree depths `{l_j}`, ascending, repeats allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtreeDecomposition {
    depths: Vec<usize>,
}

impl SubtreeDecomposition {
    pub fn depths(&self) -> &[usize] {
        &self.depths
    }

    /// `Σ_j 2^(l_j)`, the surviving leaf count.
    pub fn leaf_total(&self) -> usize {
        self.depths.iter().map(|&l| 1usize << l).sum()
    }

    /// Decomposition of an arbitrary surviving set (1-based indices).
    pub fn of_set(surviving: &[usize], levels: usize) -> Result<Self> {
        let v = validate_surviving(surviving, levels)?;
        let mut depths: Vec<usize> =
            maximal_subtrees(&v, levels).into_iter().map(|(_, l)| l).collect();
        depths.sort_unstable();
        Ok(Self { depths })
    }
}

/// Decomposition of the quasi-uniform schemes at length `M`: the set-bit
/// positions of `M` (each once), requiring `2^(n-1) < M <= 2^n`.
pub fn subtree_decomposition(m: usize, levels: usize) -> Result<SubtreeDecomposition> {
    let big_n = 1usize << levels;
    if m <= big_n / 2 || m > big_n {
        return Err(Error::Range(format!(
            "M = {m} outside (2^(n-1), 2^n] for n = {levels}"
        )));
    }
    let depths: Vec<usize> = (0..=levels).filter(|&l| (m >> l) & 1 == 1).collect();
    Ok(SubtreeDecomposition { depths })
}

/// Closed-form distance `Σ_j l_j·2^(l_j - 1) / M`. The same expression gives
/// SD1 of QUP (`Ps1`) and SD0 of RQUP (`Ps0`); the kind is carried only to
/// document which reading the caller intends.
pub fn closed_form_sd(
    decomp: &SubtreeDecomposition,
    m: usize,
    which: SpectrumKind,
) -> Result<f64> {
    let _ = which;
    if decomp.leaf_total() != m {
        return Err(Error::Consistency(format!(
            "decomposition covers {} leaves, expected M = {m}",
            decomp.leaf_total()
        )));
    }
    if m == 0 {
        return Err(Error::UndefinedDistance);
    }
    let num: u64 = decomp
        .depths()
        .iter()
        .map(|&l| if l == 0 { 0 } else { (l as u64) << (l - 1) })
        .sum();
    Ok(num as f64 / m as f64)
}

/// Decomposition-digit joint distance `Σ_j (2^(l_j)/M)·n_j` for the
/// quasi-uniform schemes, where `n_j` is the pruned-path digit of subtree
/// `j`: complemental weight based under C0 (QUP), path weight based under C1
/// (RQUP). Requires at least one punctured bit (`M < N`).
pub fn digit_form_jsd(parent_len: usize, m: usize, mode: Mode) -> Result<f64> {
    let big_n = parent_len;
    if big_n == 0 || !big_n.is_power_of_two() {
        return Err(Error::Shape(format!(
            "parent length {big_n} is not a power of two"
        )));
    }
    let n = big_n.trailing_zeros() as usize;
    if m <= big_n / 2 || m >= big_n {
        return Err(Error::Range(format!(
            "M = {m} outside (2^(n-1), 2^n) for N = {big_n}"
        )));
    }
    let q = big_n - m;
    // QUP survives the suffix {Q..N-1}, RQUP the prefix {0..M-1} (0-based).
    let surviving: Vec<usize> = match mode {
        Mode::C0 => (q + 1..=big_n).collect(),
        Mode::C1 => (1..=m).collect(),
    };
    let mut num: u64 = 0;
    for (start, l) in maximal_subtrees(&surviving, n) {
        // Pruned path through the subtree's predecessor: its first n-l-1
        // label bits are the subtree prefix, the remainder is all-zero (C0)
        // or all-one (C1); the digit drops the branch into the subtree.
        let prefix = start >> (l + 1);
        let prefix_len = n - l - 1;
        let digit = match mode {
            Mode::C0 => prefix_len - prefix.count_ones() as usize + l,
            Mode::C1 => prefix.count_ones() as usize + l,
        };
        num += (digit as u64) << l;
    }
    Ok(num as f64 / m as f64)
}

/// Maximal complete subtrees covering a sorted, validated 1-based set:
/// returns `(start, depth)` pairs with 0-based aligned starts, ascending.
fn maximal_subtrees(sorted: &[usize], levels: usize) -> Vec<(usize, usize)> {
    let member = |i0: usize| sorted.binary_search(&(i0 + 1)).is_ok();
    let mut out = Vec::new();
    let mut idx = 0;
    while idx < sorted.len() {
        let v = sorted[idx] - 1;
        // The smallest uncovered index is the leftmost leaf of its maximal
        // subtree, so the block starts at v and its depth is bounded by v's
        // alignment.
        let align = if v == 0 {
            levels
        } else {
            (v.trailing_zeros() as usize).min(levels)
        };
        let mut l = 0;
        while l < align {
            let half = 1usize << l;
            if (v + half..v + 2 * half).all(member) {
                l += 1;
            } else {
                break;
            }
        }
        out.push((v, l));
        idx += 1usize << l;
    }
    out
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_set(n: usize) -> Vec<usize> {
        (1..=(1usize << n)).collect()
    }

    #[test]
    fn binomial_rows() {
        assert_eq!(
            (0..=5).map(|k| binomial(5, k)).collect::<Vec<_>>(),
            vec![1, 5, 10, 10, 5, 1]
        );
        assert_eq!(binomial(3, 4), 0);
    }

    #[test]
    fn labels_full_set_is_binomial() {
        for n in 1..=8 {
            let s = PolarSpectrum::from_labels(&full_set(n), n, SpectrumKind::Ps1).unwrap();
            let expect: Vec<u64> = (0..=n).map(|k| binomial(n, k)).collect();
            assert_eq!(s.counts(), &expect[..]);
            let f = PolarSpectrum::from_forest(&full_set(n), n, SpectrumKind::Ps1).unwrap();
            assert_eq!(f.counts(), &expect[..]);
        }
    }

    #[test]
    fn labels_single_all_ones_path() {
        let s = PolarSpectrum::from_labels(&[8], 3, SpectrumKind::Ps1).unwrap();
        assert_eq!(s.counts(), &[0, 0, 0, 1]);
        // The forest view sees a depth-0 subtree instead.
        let f = PolarSpectrum::from_forest(&[8], 3, SpectrumKind::Ps1).unwrap();
        assert_eq!(f.counts(), &[1, 0, 0, 0]);
    }

    #[test]
    fn empty_set_spectrum() {
        let s = PolarSpectrum::from_labels(&[], 3, SpectrumKind::Ps1).unwrap();
        assert_eq!(s.counts(), &[0, 0, 0, 0]);
        assert_eq!(s.surviving_len(), 0);
        assert!(matches!(
            spectrum_distance(&s),
            Err(Error::UndefinedDistance)
        ));
        assert_eq!(pwef_coefficients(&s), Vec::<u64>::new());
    }

    #[test]
    fn qup_forest_pwef() {
        // QUP(8,3): surviving {4..8}, forest {depth 2, depth 0}.
        let s = PolarSpectrum::from_forest(&[4, 5, 6, 7, 8], 3, SpectrumKind::Ps1).unwrap();
        assert_eq!(pwef_coefficients(&s), vec![2, 2, 1]);
        assert!((spectrum_distance(&s).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn qup_forest_matches_length_decomposition() {
        // For any QUP length the forest PWEF is sum of binomial rows C(l_j, .)
        // over the set bits of M.
        for n in 1..=10usize {
            let big_n = 1usize << n;
            for q in 1..big_n / 2 {
                let m = big_n - q;
                let surviving: Vec<usize> = (q + 1..=big_n).collect();
                let s = PolarSpectrum::from_forest(&surviving, n, SpectrumKind::Ps1).unwrap();
                let mut expect = vec![0u64; n + 1];
                for l in 0..=n {
                    if (m >> l) & 1 == 1 {
                        for (w, e) in expect.iter_mut().enumerate() {
                            *e += binomial(l, w);
                        }
                    }
                }
                assert_eq!(s.counts(), &expect[..], "n={n} q={q}");
                assert_eq!(s.surviving_len(), m as u64);
            }
        }
    }

    #[test]
    fn distances_basic() {
        let s = PolarSpectrum::from_labels(&full_set(10), 10, SpectrumKind::Ps1).unwrap();
        assert!((spectrum_distance(&s).unwrap() - 5.0).abs() < 1e-12);
        let s1 = PolarSpectrum::from_labels(&full_set(1), 1, SpectrumKind::Ps1).unwrap();
        assert!((spectrum_distance(&s1).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn joint_distance_labels() {
        let ps1 = PolarSpectrum::from_labels(&full_set(10), 10, SpectrumKind::Ps1).unwrap();
        let ps0 = PolarSpectrum::from_labels(&full_set(10), 10, SpectrumKind::Ps0).unwrap();
        assert!((joint_spectrum_distance(&ps1, &ps0).unwrap() - 10.0).abs() < 1e-12);
        // Single surviving path with label (1,0): d_H = 1, f_H = 1.
        let one1 = PolarSpectrum::from_labels(&[3], 2, SpectrumKind::Ps1).unwrap();
        let one0 = PolarSpectrum::from_labels(&[3], 2, SpectrumKind::Ps0).unwrap();
        assert!((joint_spectrum_distance(&one1, &one0).unwrap() - 2.0).abs() < 1e-12);
        // Kind and set mismatches are rejected.
        assert!(joint_spectrum_distance(&ps0, &ps1).is_err());
        let other = PolarSpectrum::from_labels(&[1], 10, SpectrumKind::Ps0).unwrap();
        assert!(joint_spectrum_distance(&ps1, &other).is_err());
    }

    #[test]
    fn qup_rqup_forest_symmetry() {
        for n in 1..=10usize {
            let big_n = 1usize << n;
            for q in 0..big_n / 2 {
                let qup: Vec<usize> = (q + 1..=big_n).collect();
                let rqup: Vec<usize> = (1..=big_n - q).collect();
                let ps1 = PolarSpectrum::from_forest(&qup, n, SpectrumKind::Ps1).unwrap();
                let ps0 = PolarSpectrum::from_forest(&rqup, n, SpectrumKind::Ps0).unwrap();
                assert_eq!(ps1.counts(), ps0.counts(), "n={n} q={q}");
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(subtree_decomposition(5, 3).unwrap().depths(), &[0, 2]);
        assert_eq!(subtree_decomposition(1024, 10).unwrap().depths(), &[10]);
        assert_eq!(
            subtree_decomposition(700, 10).unwrap().depths(),
            &[2, 3, 4, 5, 7, 9]
        );
        assert!(subtree_decomposition(4, 3).is_err());
        assert!(subtree_decomposition(9, 3).is_err());
    }

    #[test]
    fn decomposition_of_set_matches_length_form() {
        for n in 1..=8usize {
            let big_n = 1usize << n;
            for q in 0..big_n / 2 {
                let surviving: Vec<usize> = (q + 1..=big_n).collect();
                let by_set = SubtreeDecomposition::of_set(&surviving, n).unwrap();
                let by_len = subtree_decomposition(big_n - q, n).unwrap();
                assert_eq!(by_set, by_len, "QUP n={n} q={q}");
                let surviving: Vec<usize> = (1..=big_n - q).collect();
                let by_set = SubtreeDecomposition::of_set(&surviving, n).unwrap();
                assert_eq!(by_set, by_len, "RQUP n={n} q={q}");
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let d = subtree_decomposition(8, 3).unwrap();
        assert!((closed_form_sd(&d, 8, SpectrumKind::Ps1).unwrap() - 1.5).abs() < 1e-12);
        let d = subtree_decomposition(5, 3).unwrap();
        assert!((closed_form_sd(&d, 5, SpectrumKind::Ps1).unwrap() - 0.8).abs() < 1e-12);
        assert!(closed_form_sd(&d, 6, SpectrumKind::Ps1).is_err());
        let d = SubtreeDecomposition { depths: vec![0, 1] };
        assert!((closed_form_sd(&d, 3, SpectrumKind::Ps1).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_enumeration() {
        for n in 1..=12usize {
            let big_n = 1usize << n;
            for q in (1..big_n / 2).step_by(1.max(big_n / 64)) {
                let m = big_n - q;
                let d = subtree_decomposition(m, n).unwrap();
                let cf = closed_form_sd(&d, m, SpectrumKind::Ps1).unwrap();
                let surviving: Vec<usize> = (q + 1..=big_n).collect();
                let s = PolarSpectrum::from_forest(&surviving, n, SpectrumKind::Ps1).unwrap();
                assert!((cf - spectrum_distance(&s).unwrap()).abs() < 1e-12, "n={n} q={q}");
            }
        }
    }

    #[test]
    fn digit_form_jsd_examples() {
        // QUP(8,3): blocks (start 4, depth 2) digit 2 and (start 3, depth 0)
        // digit 1; (4*2 + 1*1)/5.
        assert!((digit_form_jsd(8, 5, Mode::C0).unwrap() - 1.8).abs() < 1e-12);
        // RQUP mirrors QUP digit-for-digit.
        for n in 2..=10usize {
            let big_n = 1usize << n;
            for m in big_n / 2 + 1..big_n {
                let c0 = digit_form_jsd(big_n, m, Mode::C0).unwrap();
                let c1 = digit_form_jsd(big_n, m, Mode::C1).unwrap();
                assert!((c0 - c1).abs() < 1e-12, "n={n} m={m}");
                assert!(
                    c0 >= (n as f64 - 2.0) - 1e-12 && c0 <= (n as f64 - 1.0) + 1e-12,
                    "n={n} m={m} jsd={c0}"
                );
            }
        }
        assert!(digit_form_jsd(8, 8, Mode::C0).is_err());
        assert!(digit_form_jsd(8, 4, Mode::C0).is_err());
    }

    #[test]
    fn forest_distances_struct() {
        let d = SpectrumDistances::from_forest(&full_set(10), 10).unwrap();
        assert_eq!((d.sd1, d.sd0, d.jsd), (5.0, 5.0, 10.0));
    }

    #[test]
    fn invalid_sets_rejected() {
        assert!(PolarSpectrum::from_labels(&[0], 3, SpectrumKind::Ps1).is_err());
        assert!(PolarSpectrum::from_labels(&[9], 3, SpectrumKind::Ps1).is_err());
        assert!(PolarSpectrum::from_labels(&[1, 1], 3, SpectrumKind::Ps1).is_err());
    }
}
