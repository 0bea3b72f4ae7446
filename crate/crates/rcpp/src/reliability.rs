//! Channel reliability under puncturing: log-domain Bhattacharyya bound
//! propagation, exact erasure-channel density evolution (the test oracle),
//! closed-form path bounds, Gaussian-approximation construction, and
//! information-set selection.
//!
//! Log reliabilities are `log2` of a Bhattacharyya upper bound: `0.0` encodes
//! a useless channel (Z = 1) and `-inf` a perfect one (Z = 0). Initial values
//! satisfy `a0 <= 0`; intermediate recursion values may exceed 0 because the
//! check branch `A + 1` is applied without clipping.
//!
//! ```
//! use rcpp::puncture::PuncturingTable;
//! use rcpp::reliability::{bec_exact, propagate_bounds};
//!
//! let t = PuncturingTable::qup(8, 3).unwrap();
//! let bound = propagate_bounds(&t, (0.5f64).log2()).unwrap();
//! let exact = bec_exact(&t, 0.5).unwrap();
//! for i in 0..8 {
//!     // The propagated value upper-bounds the exact erasure probability.
//!     assert!(2f64.powf(bound.values()[i]) >= exact[i] - 1e-12);
//! }
//! ```

use crate::error::{Error, Result};
use crate::polar::PathLabel;
use crate::puncture::{Mode, PuncturingTable, SourcePunctureSet};
use crate::trellis::backward;

/// Per-source-channel reliability metrics, smaller = more reliable.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityVector {
    levels: usize,
    mode: Mode,
    values: Vec<f64>,
}

impl ReliabilityVector {
    /// Wraps an externally computed metric vector (natural source order,
    /// smaller = more reliable).
    pub fn from_values(mode: Mode, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || !values.len().is_power_of_two() {
            return Err(Error::Shape(format!(
                "metric length {} is not a power of two",
                values.len()
            )));
        }
        Ok(Self {
            levels: values.len().trailing_zeros() as usize,
            mode,
            values,
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Values indexed by source position, natural order (0-based storage).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value of the 1-based source index.
    pub fn value(&self, index: usize) -> f64 {
        self.values[index - 1]
    }
}

/// Closed-form bounds on the path recursion: for a label with path weight
/// `d_H` and complemental weight `f_H`, returns
/// `(2^d_H · a0 + f_H, 2^d_H · (a0 + f_H))`.
pub fn path_bounds(label: &PathLabel, a0: f64) -> (f64, f64) {
    let d = label.path_weight() as i32;
    let f = label.complemental_weight() as f64;
    let scale = 2f64.powi(d);
    (scale * a0 + f, scale * (a0 + f))
}

/// The plain per-path recursion: `A -> A + 1` on a 0 branch, `A -> 2A` on a
/// 1 branch, starting from `a0`.
pub fn path_recursion(label: &PathLabel, a0: f64) -> f64 {
    label.bits().iter().fold(a0, |a, &b| match b {
        0 => a + 1.0,
        _ => 2.0 * a,
    })
}

/// Log-domain bound propagation from the punctured code side to every source
/// channel.
///
/// Channel-side initialization is `a0` on transmitted positions and `0`
/// (C0) or `-inf` (C1) on punctured ones. Each butterfly first handles the
/// degenerate inputs: under C0 a useless input forces the check output to 0
/// and passes the other input to the variable branch; under C1 a perfect
/// input passes the other input to the check branch and forces the variable
/// output to `-inf`. Otherwise the pair is merged to its worse value (max
/// under C0, min under C1) and the plain recursion `(A + 1, 2A)` applies.
pub fn propagate_bounds(table: &PuncturingTable, a0: f64) -> Result<ReliabilityVector> {
    let mode = table.mode();
    let init: Vec<f64> = table
        .bits()
        .iter()
        .map(|&t| {
            if t == 1 {
                a0
            } else {
                match mode {
                    Mode::C0 => 0.0,
                    Mode::C1 => f64::NEG_INFINITY,
                }
            }
        })
        .collect();
    let butterfly = move |a: &f64, b: &f64| -> (f64, f64) {
        let (a, b) = (*a, *b);
        match mode {
            Mode::C0 => {
                if a == 0.0 || b == 0.0 {
                    (0.0, if a == 0.0 { b } else { a })
                } else {
                    let m = a.max(b);
                    (m + 1.0, 2.0 * m)
                }
            }
            Mode::C1 => {
                if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
                    (if a == f64::NEG_INFINITY { b } else { a }, f64::NEG_INFINITY)
                } else {
                    let m = a.min(b);
                    (m + 1.0, 2.0 * m)
                }
            }
        }
    };
    let values = backward(&init, &butterfly)?;
    Ok(ReliabilityVector {
        levels: table.levels(),
        mode,
        values,
    })
}

/// Exact density evolution over the binary erasure channel with erasure
/// probability `eps0`, the oracle for the bound propagation: per butterfly
/// `z_check = z_a + z_b - z_a·z_b` and `z_var = z_a·z_b`, with punctured
/// inputs `1` (C0) or `0` (C1).
pub fn bec_exact(table: &PuncturingTable, eps0: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&eps0) {
        return Err(Error::Range(format!(
            "erasure probability {eps0} outside [0, 1]"
        )));
    }
    let punctured = match table.mode() {
        Mode::C0 => 1.0,
        Mode::C1 => 0.0,
    };
    let init: Vec<f64> = table
        .bits()
        .iter()
        .map(|&t| if t == 1 { eps0 } else { punctured })
        .collect();
    backward(&init, &|a: &f64, b: &f64| {
        // A fully erased input forces the check output to exactly 1;
        // a + b - a*b would round (e.g. 1 + 0.9 - 0.9 -> 0.999...).
        let check = if *a == 1.0 || *b == 1.0 { 1.0 } else { a + b - a * b };
        (check, a * b)
    })
}

/// An information / frozen / punctured-source partition of the source
/// positions. Frozen and punctured positions carry the value 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoSet {
    parent_len: usize,
    info: Vec<usize>,
    punctured: Vec<usize>,
}

impl InfoSet {
    /// Builds a partition directly; information positions must avoid the
    /// punctured source positions.
    pub fn new(parent_len: usize, info: Vec<usize>, d: &SourcePunctureSet) -> Result<Self> {
        let mut info = info;
        info.sort_unstable();
        info.dedup();
        if let Some(&bad) = info.iter().find(|&&i| i < 1 || i > parent_len) {
            return Err(Error::Range(format!(
                "info index {bad} outside 1..={parent_len}"
            )));
        }
        if let Some(&bad) = info.iter().find(|&&i| d.contains(i)) {
            return Err(Error::Consistency(format!(
                "info position {bad} is a punctured source position"
            )));
        }
        Ok(Self {
            parent_len,
            info,
            punctured: d.indices().to_vec(),
        })
    }

    /// 1-based information positions, ascending.
    pub fn info(&self) -> &[usize] {
        &self.info
    }

    /// 1-based punctured source positions, ascending.
    pub fn punctured(&self) -> &[usize] {
        &self.punctured
    }

    pub fn parent_len(&self) -> usize {
        self.parent_len
    }

    pub fn info_len(&self) -> usize {
        self.info.len()
    }

    pub fn is_info(&self, index: usize) -> bool {
        self.info.binary_search(&index).is_ok()
    }

    /// `N`-character string: `A` information, `F` frozen, `P` punctured
    /// source position (frozen as well).
    pub fn partition_string(&self) -> String {
        (1..=self.parent_len)
            .map(|i| {
                if self.info.binary_search(&i).is_ok() {
                    'A'
                } else if self.punctured.binary_search(&i).is_ok() {
                    'P'
                } else {
                    'F'
                }
            })
            .collect()
    }
}

/// Selects the `k` most reliable source positions outside the punctured set
/// (smallest metric, ties broken by ascending index).
///
/// ```
/// use rcpp::puncture::{derive_source_puncture_set, Mode, PuncturingTable};
/// use rcpp::reliability::{bec_exact, select_info_set, ReliabilityVector};
///
/// let t = PuncturingTable::rqup(4, 1).unwrap();
/// let d = derive_source_puncture_set(&t).unwrap();
/// let z = bec_exact(&t, 0.5).unwrap();
/// let rel =
///     ReliabilityVector::from_values(Mode::C1, z.iter().map(|v| v.log2()).collect()).unwrap();
/// let a = select_info_set(&rel, 1, &d).unwrap();
/// assert_eq!(a.partition_string(), "FFAP");
/// ```
pub fn select_info_set(
    r: &ReliabilityVector,
    k: usize,
    d: &SourcePunctureSet,
) -> Result<InfoSet> {
    let parent_len = 1usize << r.levels();
    if k + d.len() > parent_len {
        return Err(Error::Capacity(format!(
            "K = {k} exceeds the {} selectable positions",
            parent_len - d.len()
        )));
    }
    let mut candidates: Vec<usize> = (1..=parent_len).filter(|&i| !d.contains(i)).collect();
    candidates.sort_by(|&a, &b| {
        r.value(a)
            .partial_cmp(&r.value(b))
            .expect("reliability values are never NaN")
            .then(a.cmp(&b))
    });
    let mut info: Vec<usize> = candidates[..k].to_vec();
    info.sort_unstable();
    Ok(InfoSet {
        parent_len,
        info,
        punctured: d.indices().to_vec(),
    })
}

/// Default log-Bhattacharyya initialization for a design point: the AWGN
/// parameter `Z = exp(-Es/N0)` with `Es/N0 = R·Eb/N0`, in log2.
pub fn a0_from_ebn0(ebn0_db: f64, rate: f64) -> f64 {
    let lin = 10f64.powf(ebn0_db / 10.0);
    -rate * lin * std::f64::consts::LOG2_E
}

/// Mean-LLR saturation standing in for a perfectly known (C1) bit in the
/// Gaussian approximation.
const GA_SATURATION: f64 = 1e3;

/// Gaussian-approximation construction: mean-LLR density evolution over the
/// same trellis, with punctured channel means 0 (C0) or a large saturation
/// constant (C1). Values are negated means so that, as everywhere else,
/// smaller means more reliable; they are a selection metric only, not
/// log-Bhattacharyya bounds.
pub fn construct_ga(table: &PuncturingTable, sigma: f64) -> Result<ReliabilityVector> {
    if sigma <= 0.0 {
        return Err(Error::Range(format!("sigma = {sigma} must be positive")));
    }
    let mode = table.mode();
    let m0 = 2.0 / (sigma * sigma);
    let punctured = match mode {
        Mode::C0 => 0.0,
        Mode::C1 => GA_SATURATION,
    };
    let init: Vec<f64> = table
        .bits()
        .iter()
        .map(|&t| if t == 1 { m0 } else { punctured })
        .collect();
    let means = backward(&init, &|a: &f64, b: &f64| {
        (ga_check_mean(*a, *b), a + b)
    })?;
    Ok(ReliabilityVector {
        levels: table.levels(),
        mode,
        values: means.iter().map(|m| -m).collect(),
    })
}

fn ga_check_mean(ma: f64, mb: f64) -> f64 {
    phi_inv(1.0 - (1.0 - phi(ma)) * (1.0 - phi(mb)))
}

/// Two-segment approximation of `phi(x) = 1 - E[tanh(L/2)]` for
/// `L ~ N(x, 2x)`; monotone decreasing with `phi(0) = 1`.
fn phi(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x < 10.0 {
        // The fitted segment slightly exceeds 1 for tiny x; clamp.
        (-0.4527 * x.powf(0.86) + 0.0218).exp().min(1.0)
    } else {
        (std::f64::consts::PI / x).sqrt() * (-x / 4.0).exp() * (1.0 - 10.0 / (7.0 * x))
    }
}

fn phi_inv(y: f64) -> f64 {
    if y >= 1.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while phi(hi) > y && hi < 1e7 {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
