//! Parallel evaluation of a statistic over every block of a scheme.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::scheme::BlockScheme;
use crate::statistic::Statistic;

/// Evaluates `stat` on every block of `scheme`, returning the values in
/// ascending block order `j = 1, ..., q`.
///
/// Blocks are independent, so the map runs on the rayon pool; the output
/// vector is indexed by block, which makes the result bitwise identical at
/// any thread count. A failure on any block aborts the whole evaluation with
/// the lowest failing block index attached.
pub fn subsample_statistics<S: Statistic + ?Sized>(
    sample: &Sample,
    stat: &S,
    scheme: &BlockScheme,
) -> Result<Vec<f64>> {
    if sample.n() != scheme.n() {
        return Err(Error::SchemeSampleMismatch {
            scheme_n: scheme.n(),
            sample_n: sample.n(),
        });
    }
    let evals: Vec<Result<f64>> = (1..=scheme.q())
        .into_par_iter()
        .map(|j| {
            let window = scheme.block(sample, j)?;
            stat.evaluate(window).map_err(|e| Error::StatisticOnBlock {
                block: j,
                source: Box::new(e),
            })
        })
        .collect();
    evals.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Window;
    use crate::statistic::RateSpec;
    use crate::statistics::BuiltinStatistic;

    fn sample_1_to(n: usize) -> Sample {
        Sample::univariate((1..=n).map(|i| i as f64).collect()).unwrap()
    }

    #[test]
    fn block_means_of_consecutive_integers() {
        let sample = sample_1_to(8);
        let scheme = BlockScheme::new(8, 2, 2).unwrap();
        let stats = subsample_statistics(&sample, &BuiltinStatistic::mean(), &scheme).unwrap();
        assert_eq!(stats, vec![1.5, 3.5, 5.5, 7.5]);
    }

    #[test]
    fn constant_sample_gives_constant_statistics() {
        let sample = Sample::univariate(vec![2.5; 20]).unwrap();
        let scheme = BlockScheme::new(20, 5, 3).unwrap();
        let stats = subsample_statistics(&sample, &BuiltinStatistic::mean(), &scheme).unwrap();
        assert!(stats.iter().all(|&v| v == 2.5));
        assert_eq!(stats.len(), scheme.q());
    }

    #[test]
    fn scheme_sample_size_mismatch_rejected() {
        let sample = sample_1_to(8);
        let scheme = BlockScheme::new(10, 2, 2).unwrap();
        let err = subsample_statistics(&sample, &BuiltinStatistic::mean(), &scheme).unwrap_err();
        assert!(matches!(
            err,
            Error::SchemeSampleMismatch {
                scheme_n: 10,
                sample_n: 8
            }
        ));
    }

    /// A statistic that fails on any block whose first value exceeds a
    /// threshold; used to check failure tagging.
    struct FailAbove(f64);

    impl Statistic for FailAbove {
        fn evaluate(&self, window: Window<'_>) -> Result<f64> {
            let xs = window.scalars()?;
            if xs[0] > self.0 {
                return Err(Error::Numerical("threshold exceeded".into()));
            }
            Ok(xs[0])
        }

        fn rates(&self) -> RateSpec {
            RateSpec::new(0.5, None, None).unwrap()
        }
    }

    #[test]
    fn failure_carries_lowest_block_index() {
        let sample = sample_1_to(8);
        let scheme = BlockScheme::new(8, 2, 2).unwrap();
        // Blocks start at 1, 3, 5, 7; the first start above 4.0 is block 3.
        let err = subsample_statistics(&sample, &FailAbove(4.0), &scheme).unwrap_err();
        match err {
            Error::StatisticOnBlock { block, .. } => assert_eq!(block, 3),
            other => panic!("unexpected error {other:?}"),
        }
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn identical_across_thread_counts() {
        let sample = Sample::univariate(
            (0..5000)
                .map(|i| ((i * 2654435761u64 as usize) % 10007) as f64 / 97.0)
                .collect(),
        )
        .unwrap();
        let scheme = BlockScheme::new(5000, 137, 61).unwrap();
        let stat = BuiltinStatistic::mean();

        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| subsample_statistics(&sample, &stat, &scheme).unwrap())
        };
        let one = run(1);
        let four = run(4);
        assert_eq!(one.len(), four.len());
        for (a, b) in one.iter().zip(&four) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
