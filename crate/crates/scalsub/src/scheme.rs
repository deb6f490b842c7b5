//! Non-random block subsampling schemes.
//!
//! Given a sample of size `n`, a block length `b`, and an offset `h`, the
//! scheme enumerates the overlapping-or-not windows
//!
//! ```text
//!     B_j = ( X_{(j-1)h + 1}, ..., X_{(j-1)h + b} ),    j = 1, ..., q,
//!
//!     q = floor((n - b) / h) + 1.
//! ```
//!
//! The offset controls the compute/accuracy trade-off: `h = 1` recovers the
//! classical full enumeration of overlapping blocks, `h = b` tiles the sample
//! with disjoint blocks, and `h > b` leaves gaps that weaken dependence
//! between blocks. Unlike random-resampling schemes, the block list is a
//! deterministic function of `(n, b, h)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::subsample_statistics;
use crate::sample::{Sample, Window};
use crate::statistic::Statistic;

/// A validated `(n, b, h)` block scheme with its block count `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockScheme {
    n: usize,
    b: usize,
    h: usize,
    q: usize,
}

impl BlockScheme {
    /// Builds the scheme, checking `1 <= b <= n` and `h >= 1`.
    pub fn new(n: usize, b: usize, h: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidScheme("sample size n must be positive".into()));
        }
        if b == 0 || b > n {
            return Err(Error::InvalidScheme(format!(
                "block size b = {b} must satisfy 1 <= b <= n = {n}"
            )));
        }
        if h == 0 {
            return Err(Error::InvalidScheme(format!(
                "offset h = {h} must be at least 1"
            )));
        }
        let q = (n - b) / h + 1;
        Ok(BlockScheme { n, b, h, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// Number of blocks.
    pub fn q(&self) -> usize {
        self.q
    }

    /// Whether consecutive blocks share observations (`h < b`).
    pub fn overlaps(&self) -> bool {
        self.h < self.b
    }

    /// 1-based inclusive observation range `[(j-1)h + 1, (j-1)h + b]` of
    /// block `j`, for `j` in `1..=q`.
    pub fn block_window(&self, j: usize) -> Result<(usize, usize)> {
        if j == 0 || j > self.q {
            return Err(Error::BlockIndexOutOfRange {
                index: j,
                q: self.q,
            });
        }
        let start = (j - 1) * self.h + 1;
        Ok((start, start + self.b - 1))
    }

    /// Borrowed view of block `j` of `sample`.
    pub fn block<'a>(&self, sample: &'a Sample, j: usize) -> Result<Window<'a>> {
        if sample.n() != self.n {
            return Err(Error::SchemeSampleMismatch {
                scheme_n: self.n,
                sample_n: sample.n(),
            });
        }
        let (start, _) = self.block_window(j)?;
        sample.window(start, self.b)
    }

    /// Observations past the last block: `n - ((q-1)h + b)`. They enter the
    /// full-sample statistic but no subsample statistic; results report this
    /// count so a silently ignored tail is visible.
    pub fn unused_tail(&self) -> usize {
        self.n - ((self.q - 1) * self.h + self.b)
    }

    /// Evaluates `stat` on every block, in ascending block order.
    /// Convenience wrapper over [`subsample_statistics`].
    pub fn evaluate<S: Statistic + ?Sized>(&self, sample: &Sample, stat: &S) -> Result<Vec<f64>> {
        subsample_statistics(sample, stat, self)
    }
}

/// Free-function form of [`BlockScheme::new`].
pub fn make_block_scheme(n: usize, b: usize, h: usize) -> Result<BlockScheme> {
    BlockScheme::new(n, b, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn q_formula_small_cases() {
        assert_eq!(make_block_scheme(8, 2, 2).unwrap().q(), 4);
        assert_eq!(make_block_scheme(8, 2, 3).unwrap().q(), 3);
        assert_eq!(make_block_scheme(5, 5, 3).unwrap().q(), 1);
        assert_eq!(make_block_scheme(6, 2, 4).unwrap().q(), 2);
    }

    #[test]
    fn q_formula_large_tiled_sample() {
        // n = 200_000, b = 500 at three offsets. Note h = 250 gives 799, not
        // the round 800 a continuity argument would suggest: an 800th block
        // would start at 199_751 and need observations past 200_000.
        assert_eq!(make_block_scheme(200_000, 500, 1000).unwrap().q(), 200);
        assert_eq!(make_block_scheme(200_000, 500, 500).unwrap().q(), 400);
        assert_eq!(make_block_scheme(200_000, 500, 250).unwrap().q(), 799);
    }

    #[test]
    fn block_windows_are_one_based_inclusive() {
        let s = make_block_scheme(8, 2, 2).unwrap();
        assert_eq!(s.block_window(1).unwrap(), (1, 2));
        assert_eq!(s.block_window(3).unwrap(), (5, 6));

        let big = make_block_scheme(200_000, 500, 250).unwrap();
        assert_eq!(big.block_window(799).unwrap(), (199_501, 200_000));
        assert_eq!(big.unused_tail(), 0);
    }

    #[test]
    fn block_index_bounds_checked() {
        let s = make_block_scheme(8, 2, 2).unwrap();
        let err = s.block_window(0).unwrap_err();
        assert!(matches!(err, Error::BlockIndexOutOfRange { index: 0, q: 4 }));
        assert!(s.block_window(5).is_err());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(make_block_scheme(0, 1, 1).is_err());
        assert!(make_block_scheme(5, 0, 1).is_err());
        assert!(make_block_scheme(5, 6, 1).is_err());
        assert!(make_block_scheme(5, 2, 0).is_err());
    }

    #[test]
    fn overlap_is_h_less_than_b() {
        assert!(make_block_scheme(10, 4, 2).unwrap().overlaps());
        assert!(!make_block_scheme(10, 4, 4).unwrap().overlaps());
        assert!(!make_block_scheme(10, 4, 6).unwrap().overlaps());
    }

    #[test]
    fn disjoint_divisor_case_tiles_exactly() {
        let s = make_block_scheme(12, 3, 3).unwrap();
        assert_eq!(s.q(), 4);
        assert_eq!(s.unused_tail(), 0);
        let mut covered = [false; 12];
        for j in 1..=s.q() {
            let (lo, hi) = s.block_window(j).unwrap();
            for i in lo..=hi {
                assert!(!covered[i - 1], "observation {i} covered twice");
                covered[i - 1] = true;
            }
        }
        assert!(covered.iter().all(|&c| c));
    }

    proptest! {
        /// q is the largest block count whose last block still fits:
        /// (q-1)h + b <= n < qh + b.
        #[test]
        fn q_is_maximal(n in 1usize..3000, b in 1usize..100, h in 1usize..100) {
            prop_assume!(b <= n);
            let s = make_block_scheme(n, b, h).unwrap();
            let q = s.q();
            prop_assert!((q - 1) * h + b <= n);
            prop_assert!(q * h + b > n);
            // Every block's window is in range.
            let (_, last_hi) = s.block_window(q).unwrap();
            prop_assert!(last_hi <= n);
            prop_assert_eq!(s.unused_tail(), n - last_hi);
        }
    }
}
