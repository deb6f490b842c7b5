//! Built-in statistics: mean, quantile, Huber location, and kernel density
//! at a point. Each carries default rate metadata and can be parsed from the
//! `name:key=value,...` strings the CLI and experiment configs use.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numeric::normal_pdf;
use crate::reduce::{pairwise_mean, pairwise_sum};
use crate::sample::Window;
use crate::statistic::{RateSpec, Statistic};

/// Default clipping constant for the Huber location estimator; gives 95%
/// efficiency at the normal model.
pub const HUBER_K: f64 = 1.345;
/// Default convergence tolerance for the Huber iteration.
pub const HUBER_TOL: f64 = 1e-10;
/// Default iteration cap for the Huber iteration.
pub const HUBER_MAX_ITER: usize = 100;

/// Arithmetic mean, summed in the crate's fixed pairwise order.
pub fn mean(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("mean of an empty window".into()));
    }
    Ok(pairwise_mean(xs))
}

/// The `ceil(p * len)`-th smallest value, for `p` in (0, 1]. This is the
/// left-continuous inverse of the empirical CDF, so no interpolation is ever
/// done and the result is always an observed value.
pub fn quantile_stat(xs: &[f64], p: f64) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("quantile of an empty window".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "quantile level p must be in (0, 1], got {p}"
        )));
    }
    let b = xs.len();
    let k = smallest_k_at_least(p * b as f64, b);
    let mut buf = xs.to_vec();
    let (_, kth, _) = buf.select_nth_unstable_by(k - 1, f64::total_cmp);
    Ok(*kth)
}

/// Smallest integer k in 1..=cap with k >= target, robust to the float
/// product landing a hair on the wrong side of an integer.
pub(crate) fn smallest_k_at_least(target: f64, cap: usize) -> usize {
    let mut k = target.ceil() as usize;
    k = k.clamp(1, cap);
    while k > 1 && (k - 1) as f64 >= target {
        k -= 1;
    }
    while k < cap && (k as f64) < target {
        k += 1;
    }
    k
}

/// Huber location estimate with clipping constant `k`.
///
/// The scale is fixed once per window (not re-estimated per iteration) at
/// `MAD / 0.6745`, the usual normal-consistent median absolute deviation.
/// Degenerate windows fall back gracefully: zero MAD uses the mean absolute
/// deviation about the median, and a fully constant window returns the
/// median outright. Iteratively reweighted least squares from the median;
/// stops when successive iterates differ by at most `tol`, errors with the
/// last iterate after `max_iter` steps.
pub fn huber(xs: &[f64], k: f64, tol: f64, max_iter: usize) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("huber of an empty window".into()));
    }
    if !(k > 0.0) {
        return Err(Error::InvalidInput(format!(
            "huber clipping constant must be positive, got {k}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "huber tolerance must be positive, got {tol}"
        )));
    }

    let median = quantile_stat(xs, 0.5)?;
    let abs_dev: Vec<f64> = xs.iter().map(|&x| (x - median).abs()).collect();
    let mad = quantile_stat(&abs_dev, 0.5)?;
    let scale = if mad > 0.0 {
        mad / 0.6745
    } else {
        let mean_abs_dev = pairwise_mean(&abs_dev);
        if mean_abs_dev > 0.0 {
            mean_abs_dev
        } else {
            return Ok(median); // constant window
        }
    };

    let mut theta = median;
    for _ in 0..max_iter {
        let mut num = 0.0;
        let mut den = 0.0;
        for &x in xs {
            let u = (x - theta) / scale;
            let w = if u.abs() <= k { 1.0 } else { k / u.abs() };
            num += w * x;
            den += w;
        }
        let next = num / den;
        let done = (next - theta).abs() <= tol;
        theta = next;
        if done {
            return Ok(theta);
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        last: theta,
    })
}

/// Gaussian kernel density estimate at the point `x0`.
///
/// Bandwidth `lambda = c * b^(-1/4)` where `c` defaults to the window's
/// sample standard deviation; when that is zero (or the window has a single
/// point) the fallback is `lambda = b^(-1/4)`. The deliberately undersmoothed
/// `b^(-1/4)` exponent trades some pointwise efficiency for a bias that
/// vanishes fast enough for subsampling inference on the density value.
pub fn kernel_density_at(xs: &[f64], x0: f64, c: Option<f64>) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("density of an empty window".into()));
    }
    if let Some(c) = c {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "bandwidth scale must be positive and finite, got {c}"
            )));
        }
    }
    let b = xs.len();
    let scale = match c {
        Some(c) => c,
        None => window_std_dev(xs),
    };
    let mut lambda = scale * (b as f64).powf(-0.25);
    if !(lambda > 0.0) {
        lambda = (b as f64).powf(-0.25);
    }
    let mut acc = 0.0;
    for &x in xs {
        acc += normal_pdf((x - x0) / lambda);
    }
    Ok(acc / (b as f64 * lambda))
}

/// Sample standard deviation (denominator `b - 1`); 0.0 for a single point.
fn window_std_dev(xs: &[f64]) -> f64 {
    let b = xs.len();
    if b < 2 {
        return 0.0;
    }
    let m = pairwise_mean(xs);
    let sq: Vec<f64> = xs.iter().map(|&x| (x - m) * (x - m)).collect();
    (pairwise_sum(&sq) / (b - 1) as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum StatKind {
    Mean,
    Quantile {
        p: f64,
    },
    Huber {
        k: f64,
        tol: f64,
        max_iter: usize,
    },
    KernelDensityAt {
        x0: f64,
        c: Option<f64>,
    },
}

/// One of the crate's built-in statistics, with (overridable) rate metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinStatistic {
    kind: StatKind,
    rates: RateSpec,
}

impl BuiltinStatistic {
    pub fn mean() -> Self {
        BuiltinStatistic {
            kind: StatKind::Mean,
            rates: RateSpec::new(0.5, None, Some(1.0)).unwrap(),
        }
    }

    pub fn quantile(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "quantile level p must be in (0, 1], got {p}"
            )));
        }
        Ok(BuiltinStatistic {
            kind: StatKind::Quantile { p },
            rates: RateSpec::new(0.5, Some(1.0), Some(1.0)).unwrap(),
        })
    }

    pub fn huber(k: f64, tol: f64, max_iter: usize) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::InvalidInput(format!(
                "huber clipping constant must be positive, got {k}"
            )));
        }
        Ok(BuiltinStatistic {
            kind: StatKind::Huber { k, tol, max_iter },
            rates: RateSpec::new(0.5, Some(1.0), Some(1.0)).unwrap(),
        })
    }

    pub fn kernel_density_at(x0: f64, c: Option<f64>) -> Result<Self> {
        if let Some(c) = c {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "bandwidth scale must be positive and finite, got {c}"
                )));
            }
        }
        Ok(BuiltinStatistic {
            kind: StatKind::KernelDensityAt { x0, c },
            rates: RateSpec::new(0.375, Some(0.5), Some(1.0)).unwrap(),
        })
    }

    /// Replaces the rate exponent alpha, revalidating against gamma.
    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        self.rates = RateSpec::new(alpha, self.rates.gamma, self.rates.zeta)?;
        Ok(self)
    }

    /// Replaces the bias exponent gamma (None means exactly unbiased).
    pub fn with_gamma(mut self, gamma: Option<f64>) -> Result<Self> {
        self.rates = RateSpec::new(self.rates.alpha, gamma, self.rates.zeta)?;
        Ok(self)
    }

    pub(crate) fn kind(&self) -> &StatKind {
        &self.kind
    }

    /// Canonical `name:key=value` form, parseable by [`FromStr`].
    pub fn name(&self) -> String {
        match &self.kind {
            StatKind::Mean => "mean".into(),
            StatKind::Quantile { p } => format!("quantile:p={p}"),
            StatKind::Huber { k, tol, max_iter } => {
                format!("huber:k={k},tol={tol},max_iter={max_iter}")
            }
            StatKind::KernelDensityAt { x0, c } => match c {
                Some(c) => format!("kde:x0={x0},c={c}"),
                None => format!("kde:x0={x0}"),
            },
        }
    }
}

impl Statistic for BuiltinStatistic {
    fn evaluate(&self, window: Window<'_>) -> Result<f64> {
        let xs = window.scalars()?;
        match &self.kind {
            StatKind::Mean => mean(xs),
            StatKind::Quantile { p } => quantile_stat(xs, *p),
            StatKind::Huber { k, tol, max_iter } => huber(xs, *k, *tol, *max_iter),
            StatKind::KernelDensityAt { x0, c } => kernel_density_at(xs, *x0, *c),
        }
    }

    fn rates(&self) -> RateSpec {
        self.rates
    }
}

impl FromStr for BuiltinStatistic {
    type Err = Error;

    /// Parses `mean`, `quantile:p=0.5`, `huber:k=1.345[,tol=..,max_iter=..]`,
    /// or `kde:x0=0[,c=..]`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p)),
            None => (s.trim(), None),
        };
        let mut map = std::collections::BTreeMap::new();
        if let Some(params) = params {
            for piece in params.split(',') {
                let piece = piece.trim();
                if piece.is_empty() {
                    continue;
                }
                let (key, value) = piece.split_once('=').ok_or_else(|| {
                    Error::InvalidInput(format!("malformed statistic parameter '{piece}'"))
                })?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        let get_f64 = |map: &std::collections::BTreeMap<String, String>, key: &str| -> Result<Option<f64>> {
            match map.get(key) {
                None => Ok(None),
                Some(v) => v.parse::<f64>().map(Some).map_err(|_| {
                    Error::InvalidInput(format!("parameter {key}={v} is not a number"))
                }),
            }
        };

        let known: &[&str] = match name {
            "mean" => &[],
            "quantile" => &["p"],
            "huber" => &["k", "tol", "max_iter"],
            "kde" => &["x0", "c"],
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown statistic '{other}' (expected mean, quantile, huber, or kde)"
                )))
            }
        };
        if let Some(unknown) = map.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::InvalidInput(format!(
                "unknown parameter '{unknown}' for statistic '{name}'"
            )));
        }

        match name {
            "mean" => Ok(BuiltinStatistic::mean()),
            "quantile" => {
                let p = get_f64(&map, "p")?.ok_or_else(|| {
                    Error::InvalidInput("quantile requires a p parameter".into())
                })?;
                BuiltinStatistic::quantile(p)
            }
            "huber" => {
                let k = get_f64(&map, "k")?.unwrap_or(HUBER_K);
                let tol = get_f64(&map, "tol")?.unwrap_or(HUBER_TOL);
                let max_iter = match map.get("max_iter") {
                    None => HUBER_MAX_ITER,
                    Some(v) => v.parse::<usize>().map_err(|_| {
                        Error::InvalidInput(format!("max_iter={v} is not a whole number"))
                    })?,
                };
                BuiltinStatistic::huber(k, tol, max_iter)
            }
            "kde" => {
                let x0 = get_f64(&map, "x0")?
                    .ok_or_else(|| Error::InvalidInput("kde requires an x0 parameter".into()))?;
                let c = get_f64(&map, "c")?;
                BuiltinStatistic::kernel_density_at(x0, c)
            }
            _ => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mean_examples() {
        assert_eq!(mean(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert_eq!(mean(&[4.25]).unwrap(), 4.25);
        assert!(mean(&[]).is_err());
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(quantile_stat(&[3.0, 1.0, 2.0], 0.5).unwrap(), 2.0);
        // Even length: ceil(0.5 * 4) = 2nd order statistic, no interpolation.
        assert_eq!(quantile_stat(&[1.0, 2.0, 3.0, 4.0], 0.5).unwrap(), 2.0);
        assert_eq!(quantile_stat(&[5.0, 1.0, 4.0, 2.0, 3.0], 1.0).unwrap(), 5.0);
        assert_eq!(quantile_stat(&[5.0, 1.0, 4.0, 2.0, 3.0], 1e-9).unwrap(), 1.0);
        assert!(quantile_stat(&[1.0], 0.0).is_err());
        assert!(quantile_stat(&[1.0], 1.1).is_err());
    }

    #[test]
    fn quantile_index_never_off_by_one_near_exact_multiples() {
        // p * b sits exactly on integers here; ceil must not overshoot.
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(quantile_stat(&xs, 0.2).unwrap(), 2.0);
        assert_eq!(quantile_stat(&xs, 0.5).unwrap(), 5.0);
        assert_eq!(quantile_stat(&xs, 0.7).unwrap(), 7.0);
    }

    #[test]
    fn huber_symmetric_window_is_exact_center() {
        assert_eq!(huber(&[-1.0, 0.0, 1.0], HUBER_K, HUBER_TOL, 100).unwrap(), 0.0);
        assert_eq!(
            huber(&[1.0, 2.0, 3.0, 4.0, 5.0], HUBER_K, HUBER_TOL, 100).unwrap(),
            3.0
        );
    }

    /// Independent root-finder for the Huber estimating equation
    /// sum_i psi_k((x_i - theta) / s) = 0, used to pin the expected value of
    /// the outlier example. The psi sum is continuous and nonincreasing in
    /// theta, so bisection is exact to the requested width.
    fn huber_bisection_oracle(xs: &[f64], k: f64) -> f64 {
        let mut sorted = xs.to_vec();
        sorted.sort_by(f64::total_cmp);
        let med = sorted[(0.5 * xs.len() as f64).ceil() as usize - 1];
        let mut devs: Vec<f64> = xs.iter().map(|x| (x - med).abs()).collect();
        devs.sort_by(f64::total_cmp);
        let mad = devs[(0.5 * devs.len() as f64).ceil() as usize - 1];
        let s = mad / 0.6745;
        let psi_sum = |theta: f64| -> f64 {
            xs.iter()
                .map(|&x| ((x - theta) / s).clamp(-k, k))
                .sum::<f64>()
        };
        let (mut lo, mut hi) = (sorted[0], sorted[sorted.len() - 1]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if psi_sum(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn huber_outlier_window_matches_bisection_oracle() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 1000.0];
        let oracle = huber_bisection_oracle(&xs, HUBER_K);
        // The clipped contributions of 1.0 and 1000.0 cancel at 3.5, and
        // (2,3,4,5) is symmetric about 3.5, so the exact root is 3.5.
        assert!((oracle - 3.5).abs() < 1e-9, "oracle drifted: {oracle}");
        let est = huber(&xs, HUBER_K, HUBER_TOL, 100).unwrap();
        assert!((est - oracle).abs() < 1e-8, "est {est} vs oracle {oracle}");
        assert!((2.5..=4.0).contains(&est));
    }

    #[test]
    fn huber_resists_outlier_unlike_the_mean() {
        let est = huber(&[0.0, 0.0, 0.0, 100.0], HUBER_K, HUBER_TOL, 100).unwrap();
        assert!(est > 0.0 && est < 25.0, "est {est} not inside (0, mean)");
        assert!(est < 12.5, "est {est} should sit closer to the bulk at 0");
    }

    #[test]
    fn huber_limits_mean_and_median() {
        let xs = [1.0, 2.0, 3.0, 4.0, 100.0];
        let big_k = huber(&xs, 1e6, HUBER_TOL, 200).unwrap();
        assert!((big_k - mean(&xs).unwrap()).abs() < 1e-9);
        let small_k = huber(&xs, 1e-6, HUBER_TOL, 100_000).unwrap();
        assert!((small_k - 3.0).abs() < 1e-3, "k->0 gave {small_k}");
    }

    #[test]
    fn huber_constant_window_returns_the_constant() {
        assert_eq!(huber(&[7.0; 5], HUBER_K, HUBER_TOL, 100).unwrap(), 7.0);
    }

    #[test]
    fn huber_nonconvergence_reports_last_iterate() {
        let err = huber(&[0.0, 0.0, 0.0, 100.0], HUBER_K, 1e-16, 2).unwrap_err();
        match err {
            Error::NonConvergence { iterations, last } => {
                assert_eq!(iterations, 2);
                assert!(last.is_finite());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn kde_single_point_window() {
        // One point at x0: lambda falls back to 1^(−1/4) = 1, so the value is
        // K(0) / lambda.
        let v = kernel_density_at(&[2.0], 2.0, None).unwrap();
        assert_eq!(v, normal_pdf(0.0));
        // Explicit bandwidth scale c: lambda = c.
        let v = kernel_density_at(&[2.0], 2.0, Some(2.0)).unwrap();
        assert!((v - normal_pdf(0.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn kde_far_from_window_is_essentially_zero() {
        let v = kernel_density_at(&[-0.1, 0.0, 0.1], 1000.0, None).unwrap();
        assert!((0.0..1e-20).contains(&v), "v = {v}");
    }

    #[test]
    fn kde_zero_variance_window_uses_fallback_bandwidth() {
        let b = 4.0f64;
        let lambda = b.powf(-0.25);
        let v = kernel_density_at(&[5.0; 4], 5.0, None).unwrap();
        assert!((v - normal_pdf(0.0) / lambda).abs() < 1e-15);
    }

    #[test]
    fn kde_rejects_bad_scale() {
        assert!(kernel_density_at(&[1.0, 2.0], 0.0, Some(0.0)).is_err());
        assert!(kernel_density_at(&[1.0, 2.0], 0.0, Some(-1.0)).is_err());
    }

    #[test]
    fn parse_statistic_names() {
        let m: BuiltinStatistic = "mean".parse().unwrap();
        assert_eq!(m, BuiltinStatistic::mean());

        let q: BuiltinStatistic = "quantile:p=0.25".parse().unwrap();
        assert_eq!(q, BuiltinStatistic::quantile(0.25).unwrap());

        let h: BuiltinStatistic = "huber:k=2.0".parse().unwrap();
        assert_eq!(h, BuiltinStatistic::huber(2.0, HUBER_TOL, HUBER_MAX_ITER).unwrap());

        let h: BuiltinStatistic = "huber:k=1.5,tol=1e-8,max_iter=50".parse().unwrap();
        assert_eq!(h, BuiltinStatistic::huber(1.5, 1e-8, 50).unwrap());

        let k: BuiltinStatistic = "kde:x0=0".parse().unwrap();
        assert_eq!(k, BuiltinStatistic::kernel_density_at(0.0, None).unwrap());

        let k: BuiltinStatistic = "kde:x0=1.5,c=2".parse().unwrap();
        assert_eq!(k, BuiltinStatistic::kernel_density_at(1.5, Some(2.0)).unwrap());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("mystery".parse::<BuiltinStatistic>().is_err());
        assert!("quantile".parse::<BuiltinStatistic>().is_err());
        assert!("quantile:p=2".parse::<BuiltinStatistic>().is_err());
        assert!("kde".parse::<BuiltinStatistic>().is_err());
        assert!("kde:x0=0,bogus=1".parse::<BuiltinStatistic>().is_err());
        assert!("huber:k=abc".parse::<BuiltinStatistic>().is_err());
    }

    #[test]
    fn names_roundtrip_through_parse() {
        for stat in [
            BuiltinStatistic::mean(),
            BuiltinStatistic::quantile(0.75).unwrap(),
            BuiltinStatistic::huber(1.345, 1e-10, 100).unwrap(),
            BuiltinStatistic::kernel_density_at(0.5, Some(1.5)).unwrap(),
        ] {
            let reparsed: BuiltinStatistic = stat.name().parse().unwrap();
            assert_eq!(reparsed, stat);
        }
    }

    #[test]
    fn rate_overrides() {
        let s = BuiltinStatistic::mean().with_alpha(0.4).unwrap();
        assert_eq!(s.rates().alpha, 0.4);
        let s = s.with_gamma(Some(0.9)).unwrap();
        assert_eq!(s.rates().gamma, Some(0.9));
        // gamma must stay above alpha
        assert!(BuiltinStatistic::quantile(0.5)
            .unwrap()
            .with_alpha(1.5)
            .is_err());
    }

    proptest! {
        #[test]
        fn quantile_is_an_observed_value(
            xs in prop::collection::vec(-1e6f64..1e6, 1..80),
            p in 0.0001f64..1.0,
        ) {
            let v = quantile_stat(&xs, p).unwrap();
            prop_assert!(xs.contains(&v));
            // At least ceil(p*b) observations are <= v.
            let k = (p * xs.len() as f64).ceil() as usize;
            let count = xs.iter().filter(|&&x| x <= v).count();
            prop_assert!(count >= k.min(xs.len()));
        }

        #[test]
        fn translation_equivariance(
            xs in prop::collection::vec(-100.0f64..100.0, 2..40),
            c in -50.0f64..50.0,
        ) {
            let shifted: Vec<f64> = xs.iter().map(|x| x + c).collect();
            let m0 = mean(&xs).unwrap();
            let m1 = mean(&shifted).unwrap();
            prop_assert!((m1 - (m0 + c)).abs() < 1e-9);

            let q0 = quantile_stat(&xs, 0.5).unwrap();
            let q1 = quantile_stat(&shifted, 0.5).unwrap();
            prop_assert_eq!(q1.to_bits(), (q0 + c).to_bits());

            let h0 = huber(&xs, HUBER_K, HUBER_TOL, 500);
            let h1 = huber(&shifted, HUBER_K, HUBER_TOL, 500);
            if let (Ok(h0), Ok(h1)) = (h0, h1) {
                prop_assert!((h1 - (h0 + c)).abs() < 1e-6);
            }
        }

        #[test]
        fn permutation_invariance(
            mut xs in prop::collection::vec(-100.0f64..100.0, 2..40),
        ) {
            let orig = xs.clone();
            xs.reverse();
            let q0 = quantile_stat(&orig, 0.3).unwrap();
            let q1 = quantile_stat(&xs, 0.3).unwrap();
            prop_assert_eq!(q0.to_bits(), q1.to_bits());

            let d0 = kernel_density_at(&orig, 0.0, None).unwrap();
            let d1 = kernel_density_at(&xs, 0.0, None).unwrap();
            prop_assert!((d0 - d1).abs() <= 1e-12 * (1.0 + d0.abs()));
        }

        #[test]
        fn kde_is_nonnegative(
            xs in prop::collection::vec(-50.0f64..50.0, 1..60),
            x0 in -60.0f64..60.0,
        ) {
            prop_assert!(kernel_density_at(&xs, x0, None).unwrap() >= 0.0);
        }
    }
}
