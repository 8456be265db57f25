//! Goodness-of-fit distances and moment summaries.

use crate::error::{Error, Result};

fn sorted(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::config("sample contains NaN"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Kolmogorov–Smirnov distance to a continuous CDF.
pub fn ks_distance(values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    ks_distance_stepped(values, &cdf, &cdf)
}

/// Kolmogorov–Smirnov distance to a CDF that may have jumps.
///
/// `cdf(x) = P(X <= x)` and `cdf_left(x) = P(X < x)`. The supremum is
/// attained at a sample point from one side or the other, so checking both
/// limits at every distinct sample value is exact.
pub fn ks_distance_stepped(
    values: &[f64],
    cdf: impl Fn(f64) -> f64,
    cdf_left: impl Fn(f64) -> f64,
) -> Result<f64> {
    let v = sorted(values)?;
    let n = v.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < v.len() {
        let x = v[i];
        let mut j = i;
        while j < v.len() && v[j] == x {
            j += 1;
        }
        let below = i as f64 / n;
        let upto = j as f64 / n;
        d = d.max((cdf(x) - upto).abs()).max((cdf_left(x) - below).abs());
        i = j;
    }
    Ok(d)
}

/// 1-Wasserstein distance between two empirical distributions.
pub fn wasserstein1(a: &[f64], b: &[f64]) -> Result<f64> {
    let a = sorted(a)?;
    let b = sorted(b)?;
    if a.len() == b.len() {
        let s: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
        return Ok(s / a.len() as f64);
    }
    // ∫ |F_a - F_b| over the merged breakpoints
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut prev = a[0].min(b[0]);
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        total += (i as f64 / na - j as f64 / nb).abs() * (x - prev);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        prev = x;
    }
    Ok(total)
}

/// Sample mean and its standard error, with pairwise summation.
pub fn mean_and_se(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    if values.len() == 1 {
        return Ok((mean, 0.0));
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Sum with O(log n) error growth and a fixed association order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let (l, r) = values.split_at(values.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_value_at_median() {
        let d = ks_distance(&[0.5], |x: f64| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn point_mass_matches_itself() {
        let cdf = |x: f64| if x >= 2.0 { 1.0 } else { 0.0 };
        let left = |x: f64| if x > 2.0 { 1.0 } else { 0.0 };
        assert_eq!(ks_distance_stepped(&[2.0; 10], cdf, left).unwrap(), 0.0);
        assert_eq!(ks_distance_stepped(&[1.0; 10], cdf, left).unwrap(), 1.0);
    }

    #[test]
    fn empty_is_rejected() {
        assert_eq!(ks_distance(&[], |x| x), Err(Error::EmptyInput));
        assert_eq!(wasserstein1(&[], &[1.0]), Err(Error::EmptyInput));
    }

    #[test]
    fn uniform_grid_is_close() {
        let n = 1000;
        let v: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_distance(&v, |x: f64| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn wasserstein_of_shift() {
        let a = [0.0, 1.0, 2.0];
        let b = [0.5, 1.5, 2.5];
        assert!((wasserstein1(&a, &b).unwrap() - 0.5).abs() < 1e-15);
        // unequal sizes: {0} vs {0, 1} differ by mass 1/2 over [0, 1]
        assert!((wasserstein1(&[0.0], &[0.0, 1.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mean_and_se_small() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m, 2.0);
        assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn ks_is_a_probability(v in proptest::collection::vec(-2.0..2.0f64, 1..200)) {
            let d = ks_distance(&v, |x: f64| ((x + 2.0) / 4.0).clamp(0.0, 1.0)).unwrap();
            prop_assert!((0.0..=1.0).contains(&d));
        }

        #[test]
        fn wasserstein_is_symmetric(
            a in proptest::collection::vec(-5.0..5.0f64, 1..50),
            b in proptest::collection::vec(-5.0..5.0f64, 1..50),
        ) {
            let ab = wasserstein1(&a, &b).unwrap();
            let ba = wasserstein1(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-12 * ab.max(1.0));
            prop_assert!(wasserstein1(&a, &a).unwrap() == 0.0);
        }
    }
}
