//! Monte-Carlo checks of expectations against closed-form targets.

use super::report::{GofReport, Threshold};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Width of the acceptance band, in standard errors.
pub const STANDARD_ERRORS: f64 = 4.0;

/// Sample mean and standard error of the mean (two-pass).
pub fn mean_and_standard_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Draws `n_samples` values of `functional(sampler(rng))` and passes iff the
/// sample mean lies within four standard errors of `target`.
///
/// The report's statistic is `|mean - target| / SE`.
pub fn mc_transform_check<S, G>(
    test_name: &str,
    mut sampler: S,
    functional: G,
    target: f64,
    n_samples: usize,
    rng: &mut RngStream,
) -> Result<GofReport>
where
    S: FnMut(&mut RngStream) -> f64,
    G: Fn(f64) -> f64,
{
    if n_samples < 2 {
        return Err(Error::Usage("need at least two samples".into()));
    }
    let values: Vec<f64> = (0..n_samples).map(|_| functional(sampler(rng))).collect();
    let bad = values.iter().filter(|v| !v.is_finite()).count();
    if bad > 0 {
        return Err(Error::NonFinite {
            count: bad,
            context: "Monte-Carlo functional",
        });
    }
    let (mean, se) = mean_and_standard_error(&values);
    let gap = (mean - target).abs();
    let z = if se > 0.0 {
        gap / se
    } else if gap == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(GofReport::new(
        test_name,
        z,
        None,
        n_samples,
        None,
        Threshold::MaxStandardErrors { k: STANDARD_ERRORS },
    )
    .with_seed(rng.seed())
    .with_note(format!("mean={mean:.9} target={target:.9} se={se:.3e}")))
}
