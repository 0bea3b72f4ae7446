//! Backward propagation of per-channel quantities from the code side of the
//! encoder factor graph to the source side.
//!
//! The encoder is `x = brp(u · F_2^{⊗n})`, so a quantity attached to code bit
//! `x_j` (natural order) is first un-permuted by the bit reversal and then
//! pushed through the `n` butterfly layers. At each butterfly the first output
//! feeds the `b_l = 0` (check) branch of the pair of source channels and the
//! second output the `b_l = 1` (variable) branch. The result is indexed by
//! source position in natural order.

use crate::polar::bit_reverse_permute;
use crate::error::Result;

/// Applies `butterfly(a, b) -> (check_out, var_out)` recursively over the
/// factor graph. `code_values` are per-code-bit in natural order; the output
/// is per-source-bit in natural order.
pub(crate) fn backward<T, F>(code_values: &[T], butterfly: &F) -> Result<Vec<T>>
where
    T: Clone,
    F: Fn(&T, &T) -> (T, T),
{
    let w = bit_reverse_permute(code_values)?;
    Ok(backward_rec(&w, butterfly))
}

fn backward_rec<T, F>(w: &[T], butterfly: &F) -> Vec<T>
where
    T: Clone,
    F: Fn(&T, &T) -> (T, T),
{
    let m = w.len();
    if m == 1 {
        return w.to_vec();
    }
    let h = m / 2;
    let mut check = Vec::with_capacity(h);
    let mut var = Vec::with_capacity(h);
    for i in 0..h {
        let (c, v) = butterfly(&w[i], &w[i + h]);
        check.push(c);
        var.push(v);
    }
    let mut out = backward_rec(&check, butterfly);
    out.extend(backward_rec(&var, butterfly));
    out
}

/// Bitmask variant of [`backward`] for boolean degeneracy flags under the C0
/// mode: per butterfly the check output is the OR of the inputs and the
/// variable output the AND. Input and output masks use natural-order bit `j`
/// for position `j`; the caller is responsible for any bit reversal.
///
/// This operates in the post-reversal (`w`) domain directly: callers pass
/// `brp(code flags)` and receive source flags in natural order.
pub(crate) fn backward_flags_c0_mask(w: u64, n: usize) -> u64 {
    debug_assert!(n <= 6);
    let mut x = w;
    // Stage with half-span h pairs bit i with bit i+h inside each 2h block.
    // Processing the largest span first mirrors the recursion's top level;
    // the per-block transforms at different spans do not commute here, so
    // the order matters: top split first, then within each half.
    // Equivalently: for h from N/2 down to 1, all blocks at that span.
    let big_n = 1usize << n;
    let mut h = big_n / 2;
    while h >= 1 {
        let first_mask = first_half_mask(big_n, h);
        let a = x & first_mask;
        let b = (x >> h) & first_mask;
        let or = a | b;
        let and = a & b;
        x = or | (and << h);
        h /= 2;
    }
    x
}

fn first_half_mask(big_n: usize, h: usize) -> u64 {
    let mut m = 0u64;
    for j in 0..big_n {
        if j & h == 0 {
            m |= 1 << j;
        }
    }
    m
}
