//! Empirical distribution statistics for the simulation harness.

/// One-sample Kolmogorov-Smirnov statistic: the supremum distance between
/// the empirical CDF of `samples` and the model `cdf`.
///
/// # Panics
/// Panics if `samples` is empty or contains NaN.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(
        !samples.is_empty(),
        "KS statistic needs at least one sample"
    );
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("samples must not contain NaN"));
    let n = sorted.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let model = cdf(x);
        let below = (model - i as f64 / n).abs();
        let above = (model - (i + 1) as f64 / n).abs();
        sup = sup.max(below).max(above);
    }
    sup
}

/// Two-sample Kolmogorov-Smirnov statistic: the supremum distance between
/// the empirical CDFs of `a` and `b`.
///
/// # Panics
/// Panics if either sample is empty or contains NaN.
pub fn ks_statistic_two_sample(a: &[f64], b: &[f64]) -> f64 {
    assert!(
        !a.is_empty() && !b.is_empty(),
        "KS statistic needs at least one sample per side"
    );
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).expect("samples must not contain NaN"));
    sb.sort_by(|x, y| x.partial_cmp(y).expect("samples must not contain NaN"));

    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut sup = 0.0f64;
    while ia < sa.len() && ib < sb.len() {
        let x = sa[ia].min(sb[ib]);
        while ia < sa.len() && sa[ia] <= x {
            ia += 1;
        }
        while ib < sb.len() && sb[ib] <= x {
            ib += 1;
        }
        sup = sup.max((ia as f64 / na - ib as f64 / nb).abs());
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_sample_ks_hand_checked() {
        // Two points against U(0,1): ECDF steps at 0.25 and 0.75 give a
        // supremum distance of exactly 0.25.
        let stat = ks_statistic(&[0.75, 0.25], |x| x.clamp(0.0, 1.0));
        assert!((stat - 0.25).abs() < 1e-12, "{stat}");
    }

    #[test]
    fn one_sample_ks_vanishes_on_a_perfect_grid() {
        // Points at (i + 0.5)/n have maximal distance 0.5/n from U(0,1).
        let n = 1000;
        let samples: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let stat = ks_statistic(&samples, |x| x.clamp(0.0, 1.0));
        assert!((stat - 0.5 / n as f64).abs() < 1e-12, "{stat}");
    }

    #[test]
    fn two_sample_ks_extremes() {
        assert_eq!(
            ks_statistic_two_sample(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]),
            0.0
        );
        assert_eq!(ks_statistic_two_sample(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
    }

    #[test]
    fn two_sample_ks_handles_ties_across_samples() {
        // ECDFs of [1,2,2,3] and [2] differ by at most 0.25.
        let stat = ks_statistic_two_sample(&[1.0, 2.0, 2.0, 3.0], &[2.0]);
        assert!((stat - 0.25).abs() < 1e-12, "{stat}");
    }
}
