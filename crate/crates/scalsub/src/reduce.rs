//! Deterministic floating-point reductions.
//!
//! Every reduction in this crate that feeds a reported number goes through
//! these helpers so that results are bitwise reproducible at any thread
//! count. The summation order is part of the crate's contract:
//!
//! * slices of at most [`PAIRWISE_LEAF`] elements are summed left to right;
//! * longer slices are split at `floor(len / 2)` and the two partial sums
//!   are added, left half first.
//!
//! The tree shape depends only on the slice length, never on parallelism.
//! Pairwise summation also keeps rounding error at O(log n) ulps instead of
//! the O(n) of a running sum, which matters for the long block lists the
//! subagging estimator averages over.

/// Maximum slice length summed sequentially at the leaves of the tree.
pub const PAIRWISE_LEAF: usize = 32;

/// Sums a slice in the fixed pairwise (tree) order described in the module
/// docs. Returns 0.0 for an empty slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_LEAF {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        acc
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// Arithmetic mean via [`pairwise_sum`]. The slice must be non-empty.
pub fn pairwise_mean(xs: &[f64]) -> f64 {
    debug_assert!(!xs.is_empty(), "mean of an empty slice");
    pairwise_sum(xs) / xs.len() as f64
}
