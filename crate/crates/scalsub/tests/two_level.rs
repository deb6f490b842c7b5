//! Statistical behaviour of the two-level interval: agreement with the CLT
//! interval where both apply, coverage in the regime where only the
//! two-level construction is honest, and the width scaling in n.
//!
//! Every test draws data through the deterministic generator, so measured
//! coverages and width ratios are exactly reproducible; the asserted bands
//! guard the estimator logic, not the random number generator.

use rayon::prelude::*;
use scalsub::harness::{generate, DataModel};
use scalsub::{
    clt_ci, resolve_scheme, subagg_estimate, two_level_ci, BuiltinStatistic, Error, TuningParams,
};

const LEVEL: f64 = 0.90;

fn width(interval: (f64, f64)) -> f64 {
    interval.1 - interval.0
}

/// Per-replication two-level widths, in replication order.
fn two_level_widths(
    model: &DataModel,
    stat: &BuiltinStatistic,
    tuning: &TuningParams,
    n: usize,
    reps: u64,
    seed: u64,
) -> Vec<f64> {
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let sample = generate(model, n, seed, rep).unwrap();
            let iv = two_level_ci(&sample, stat, tuning, LEVEL).unwrap();
            iv.upper - iv.lower
        })
        .collect()
}

#[test]
fn two_level_width_agrees_with_the_clt_interval_for_the_mean() {
    // For the mean with beta = delta = 1/2 both intervals estimate the same
    // sqrt(n)-rate normal limit, one through sigma_hat and one through
    // subsampling quantiles, so their average widths should be close. The
    // two-level width rests on 31 outer blocks here, hence the loose band.
    let model = DataModel::Normal { mu: 0.0, sigma: 1.0 };
    let stat = BuiltinStatistic::mean();
    let tuning = TuningParams::new(0.5, None, 0.5).unwrap();
    let n = 100_000;
    let reps = 50u64;
    let seed = 0x7EA0;

    let pairs: Vec<(f64, f64)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let sample = generate(&model, n, seed, rep).unwrap();
            let scheme = resolve_scheme(n, &tuning).unwrap();
            let fit = subagg_estimate(&sample, &stat, scheme).unwrap();
            let clt = clt_ci(&fit, LEVEL).unwrap();
            let two = two_level_ci(&sample, &stat, &tuning, LEVEL).unwrap();
            (
                width((clt.lower, clt.upper)),
                width((two.lower, two.upper)),
            )
        })
        .collect();

    let mean_clt: f64 = pairs.iter().map(|p| p.0).sum::<f64>() / reps as f64;
    let mean_two: f64 = pairs.iter().map(|p| p.1).sum::<f64>() / reps as f64;
    let ratio = mean_two / mean_clt;
    assert!(
        (0.75..1.35).contains(&ratio),
        "two-level / clt mean width ratio = {ratio} (clt {mean_clt}, two-level {mean_two})"
    );
}

#[test]
fn two_level_covers_where_the_clt_interval_refuses() {
    // The median declares gamma = 1, so at the rate-optimal beta = 1/2 the
    // CLT interval refuses outright; the two-level interval is the intended
    // replacement. Its coverage approaches the nominal level from below as
    // the outer-block count q_out = n^{0.3} grows: the ceil-index quantile
    // at q_out = 44 can reach about 0.87 of mass at best, and centering on
    // the full-sample estimate (correlated with every outer block) trims a
    // few more points. Measured on this seed: 0.75 at n = 2e4 (q_out = 19),
    // 0.83 at n = 3.2e5 (q_out = 44), 0.89 at n = 1.28e6 (q_out = 67).
    let model = DataModel::Normal { mu: 0.0, sigma: 1.0 };
    let stat = BuiltinStatistic::quantile(0.5).unwrap();
    let tuning = TuningParams::new(0.5, Some(1.0), 0.5).unwrap();
    let seed = 0x2CE5;

    let sample = generate(&model, 20_000, seed, 0).unwrap();
    let scheme = resolve_scheme(20_000, &tuning).unwrap();
    let fit = subagg_estimate(&sample, &stat, scheme).unwrap();
    assert!(matches!(
        clt_ci(&fit, LEVEL),
        Err(Error::AsymptoticBias { .. })
    ));

    let n = 320_000;
    let reps = 200u64;
    let hits: Vec<bool> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let sample = generate(&model, n, seed, rep).unwrap();
            let iv = two_level_ci(&sample, &stat, &tuning, LEVEL).unwrap();
            assert!(iv.lower < iv.upper);
            iv.lower <= 0.0 && 0.0 <= iv.upper
        })
        .collect();
    let coverage = hits.iter().filter(|&&h| h).count() as f64 / reps as f64;
    assert!(
        (0.78..=0.97).contains(&coverage),
        "two-level coverage at nominal {LEVEL} was {coverage}"
    );
}

#[test]
fn two_level_width_shrinks_at_the_tuned_rate() {
    // With alpha = beta = 1/2 the interval contracts like n^{-1/2}, so a
    // 16x sample should shrink the average width about 4x. The measured
    // ratio runs a little high (4.63 on this seed) because at n = 2e4 only
    // 19 outer blocks exist and the 5%/95% quantile indices land on the
    // min/max, which spread wider than the trimmed order statistics used at
    // 44 blocks. A wrong tau_n exponent would push the ratio toward 1 or 16.
    let model = DataModel::Normal { mu: 0.0, sigma: 1.0 };
    let stat = BuiltinStatistic::quantile(0.5).unwrap();
    let tuning = TuningParams::new(0.5, Some(1.0), 0.5).unwrap();
    let seed = 0x51ED;

    let w_small = two_level_widths(&model, &stat, &tuning, 20_000, 150, seed);
    let w_large = two_level_widths(&model, &stat, &tuning, 320_000, 150, seed);
    let mean_small: f64 = w_small.iter().sum::<f64>() / w_small.len() as f64;
    let mean_large: f64 = w_large.iter().sum::<f64>() / w_large.len() as f64;
    let ratio = mean_small / mean_large;
    assert!(
        (3.5..5.3).contains(&ratio),
        "width ratio across a 16x sample growth = {ratio} (expected near 4)"
    );
}
