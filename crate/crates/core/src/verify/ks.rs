//! Kolmogorov–Smirnov statistics with asymptotic p-values.

use std::f64::consts::PI;

use super::report::{GofReport, Threshold};
use crate::error::{Error, Result};

/// Minimum sample size accepted by the one-sample test.
pub const MIN_SAMPLES: usize = 10;

/// `P(K > lambda)` for the Kolmogorov distribution.
///
/// Uses `2 sum (-1)^(k-1) exp(-2 k^2 lambda^2)` for large `lambda` and the
/// Jacobi-transformed series `1 - sqrt(2 pi)/lambda sum exp(-(2k-1)^2 pi^2 / (8 lambda^2))`
/// for small `lambda`, where each converges fast. Terms below 1e-12 are dropped.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda.is_nan() {
        return f64::NAN;
    }
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda < 1.18 {
        let c = PI * PI / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for k in 1.. {
            let j = (2 * k - 1) as f64;
            let term = (-j * j * c).exp();
            sum += term;
            if term < 1e-12 * sum.max(1e-300) || k > 100 {
                break;
            }
        }
        1.0 - (2.0 * PI).sqrt() / lambda * sum
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sum += sign * term;
            sign = -sign;
            if term < 1e-12 {
                break;
            }
        }
        2.0 * sum
    };
    p.clamp(0.0, 1.0)
}

fn sorted_finite(samples: &[f64], what: &str) -> Result<Vec<f64>> {
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::Usage(format!("{what} contains NaN")));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `sup |F_n - F|` for already sorted samples.
pub fn ks_statistic_one_sample<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            (hi - f).max(f - lo)
        })
        .fold(0.0, f64::max)
}

/// One-sample test of `samples` against a continuous distribution function.
///
/// The report is judged at `p >= 0.01`; override with
/// [`GofReport::with_threshold`].
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<GofReport> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::Usage(format!(
            "one-sample KS needs at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let sorted = sorted_finite(samples, "sample")?;
    let d = ks_statistic_one_sample(&sorted, cdf);
    let p = kolmogorov_survival((sorted.len() as f64).sqrt() * d);
    Ok(GofReport::new(
        "ks_one_sample",
        d,
        Some(p),
        sorted.len(),
        None,
        Threshold::MinPValue { alpha: 0.01 },
    ))
}

/// `sup |F_a - F_b|` for two sorted samples; ties are stepped over together.
pub fn ks_statistic_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Two-sample test; p-value from the Kolmogorov law at `sqrt(n1 n2/(n1+n2)) D`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<GofReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Usage("two-sample KS needs two nonempty samples".into()));
    }
    let a = sorted_finite(a, "first sample")?;
    let b = sorted_finite(b, "second sample")?;
    let d = ks_statistic_two_sample(&a, &b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let p = kolmogorov_survival((na * nb / (na + nb)).sqrt() * d);
    Ok(GofReport::new(
        "ks_two_sample",
        d,
        Some(p),
        a.len(),
        Some(b.len()),
        Threshold::MinPValue { alpha: 0.01 },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn survival_reference_values() {
        // Kolmogorov distribution quantiles: P(K > 1.3581) = 0.05, P(K > 1.6276) = 0.01.
        assert!((kolmogorov_survival(1.358_1) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_survival(1.627_6) - 0.01).abs() < 1e-4);
        assert!((kolmogorov_survival(0.827_5) - 0.5).abs() < 1e-3);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
        assert!(kolmogorov_survival(10.0) < 1e-80);
    }

    #[test]
    fn series_branches_agree_at_switch() {
        let lo = kolmogorov_survival(1.18 - 1e-12);
        let hi = kolmogorov_survival(1.18);
        assert!((lo - hi).abs() < 1e-10);
    }

    #[test]
    fn plug_in_quantiles_give_half_over_m() {
        let m = 1000;
        let xs: Vec<f64> = (1..=m).map(|k| (k as f64 - 0.5) / m as f64).collect();
        let r = ks_one_sample(&xs, |x| x).unwrap();
        assert!((r.statistic - 0.5 / m as f64).abs() < 1e-15);
        assert!(r.passed());
    }

    #[test]
    fn constant_sample_is_rejected() {
        let xs = vec![0.5; 1000];
        let r = ks_one_sample(&xs, |x| x).unwrap();
        assert!(r.statistic >= 0.5);
        assert!(r.p_value.unwrap() < 1e-100);
        assert!(!r.passed());
    }

    #[test]
    fn tiny_or_empty_inputs_are_usage_errors() {
        assert!(ks_one_sample(&[0.1; 9], |x| x).is_err());
        assert!(ks_two_sample(&[], &[0.1]).is_err());
        assert!(ks_two_sample(&[0.1], &[]).is_err());
        assert!(ks_one_sample(&[f64::NAN; 20], |x| x).is_err());
    }

    #[test]
    fn identical_samples_have_zero_distance() {
        let xs: Vec<f64> = (0..500).map(|i| (i % 37) as f64).collect();
        let r = ks_two_sample(&xs, &xs).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, Some(1.0));
    }

    #[test]
    fn two_sample_brute_force() {
        let a = [0.1, 0.4, 0.4, 0.9];
        let b = [0.2, 0.4, 0.5];
        // Evaluate both ECDFs at every pooled point.
        let ecdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
        let brute = a
            .iter()
            .chain(&b)
            .map(|&x| (ecdf(&a, x) - ecdf(&b, x)).abs())
            .fold(0.0, f64::max);
        assert!((ks_two_sample(&a, &b).unwrap().statistic - brute).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn two_sample_is_symmetric(
            a in prop::collection::vec(-5i32..5, 1..60),
            b in prop::collection::vec(-5i32..5, 1..60),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let ab = ks_two_sample(&a, &b).unwrap();
            let ba = ks_two_sample(&b, &a).unwrap();
            prop_assert_eq!(ab.statistic, ba.statistic);
            prop_assert_eq!(ab.p_value, ba.p_value);
        }

        #[test]
        fn p_value_decreases_with_statistic(x in 0.01f64..3.0, dx in 1e-6f64..0.5) {
            prop_assert!(kolmogorov_survival(x + dx) <= kolmogorov_survival(x));
        }
    }
}
