//! Exact samplers for the stable, ratio and occupation laws.
//!
//! Every sampler is a pure function of its parameters and the [`RngStream`]
//! it is handed. Draws that degenerate in floating point (a zero
//! denominator, an overflow to infinity) are redrawn; the stream keeps
//! count of how often that happened.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Cauchy, Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{check_mu, check_rays};
use crate::error::{domain, Error, Result};
use crate::rng::RngStream;

/// Exponent of a one-sided stable law, normalized so that
/// `E[exp(-lambda S)] = exp(-lambda^mu)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    mu: f64,
}

impl StableParams {
    pub fn new(mu: f64) -> Result<Self> {
        check_mu(mu)?;
        Ok(Self { mu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// Nonnegative fractions summing to one, one entry per ray.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(fractions: Vec<f64>) -> Result<Self> {
        if fractions.len() < 2 {
            return domain("len", fractions.len() as f64, "n >= 2");
        }
        if let Some(&bad) = fractions.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return domain("fraction", bad, "[0, 1]");
        }
        let sum: f64 = fractions.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return domain("sum of fractions", sum, "1 +/- 1e-12");
        }
        Ok(Self(fractions))
    }

    /// Normalizes nonnegative weights by their total.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return domain("total weight", total, "(0, inf)");
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for SimplexVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Redraws until `draw` yields a value accepted by `ok`.
#[inline]
fn redraw_until<F, P>(rng: &mut RngStream, mut draw: F, ok: P) -> f64
where
    F: FnMut(&mut RngStream) -> f64,
    P: Fn(f64) -> bool,
{
    loop {
        let x = draw(rng);
        if ok(x) {
            return x;
        }
        rng.note_redraw();
    }
}

fn positive_finite(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

pub fn standard_normal(rng: &mut RngStream) -> f64 {
    StandardNormal.sample(rng)
}

pub fn standard_exponential(rng: &mut RngStream) -> f64 {
    Exp1.sample(rng)
}

pub fn standard_cauchy(rng: &mut RngStream) -> f64 {
    Cauchy::new(0.0, 1.0).expect("valid scale").sample(rng)
}

/// One draw of `S_mu` with Laplace transform `exp(-lambda^mu)`.
///
/// Kanter's representation: `S = (a(V)/E)^((1-mu)/mu)` with `V` uniform on
/// `(0, pi)`, `E` unit exponential and
/// `a(v) = [sin(mu v)^mu sin((1-mu) v)^(1-mu) / sin v]^(1/(1-mu))`.
/// Evaluated in logs.
pub fn sample_positive_stable(params: StableParams, rng: &mut RngStream) -> f64 {
    let mu = params.mu;
    let nu = 1.0 - mu;
    redraw_until(
        rng,
        |rng| {
            let v = PI * rng.open01();
            let e = standard_exponential(rng);
            let log_a = (mu * (mu * v).sin().ln() + nu * (nu * v).sin().ln() - v.sin().ln()) / nu;
            (nu / mu * (log_a - e.ln())).exp()
        },
        positive_finite,
    )
}

/// One draw of the stable(1/2) law as `1/(2 N^2)`, `N` standard normal.
pub fn sample_stable_half(rng: &mut RngStream) -> f64 {
    redraw_until(
        rng,
        |rng| {
            let n = standard_normal(rng);
            0.5 / (n * n)
        },
        positive_finite,
    )
}

/// One draw of `X = S/S'` for iid stable(mu) `S, S'`.
pub fn sample_ratio_x(params: StableParams, rng: &mut RngStream) -> f64 {
    redraw_until(
        rng,
        |rng| sample_positive_stable(params, rng) / sample_positive_stable(params, rng),
        positive_finite,
    )
}

/// One draw of `C_mu = sin(pi mu) C - cos(pi mu)`, `C` standard Cauchy.
pub fn sample_c_mu(params: StableParams, rng: &mut RngStream) -> f64 {
    let (s, c) = (PI * params.mu).sin_cos();
    s * standard_cauchy(rng) - c
}

/// `C_mu` conditioned on being positive, by rejection. Same law as `X^mu`.
pub fn sample_c_mu_positive(params: StableParams, rng: &mut RngStream) -> f64 {
    loop {
        let x = sample_c_mu(params, rng);
        if x > 0.0 {
            return x;
        }
    }
}

/// One draw of `A = S'/(S' + S)`, strictly inside (0, 1).
///
/// For small `mu` the ratio `S'/S` routinely exceeds `2^53`, so `A` rounds
/// to 1 far more often than it underflows to 0. Rejecting those draws would
/// skew the law; they are clamped to the nearest double inside instead,
/// which keeps the mean at 1/2. The mass above `1 - 2^-53` is roughly
/// `sin(pi mu) / (pi mu 2^(53 mu))`, about 2.5% at `mu = 0.1`, and shows up
/// as an atom there.
pub fn sample_ratio_a(params: StableParams, rng: &mut RngStream) -> f64 {
    const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;
    redraw_until(
        rng,
        |rng| {
            let s = sample_positive_stable(params, rng);
            let s_prime = sample_positive_stable(params, rng);
            (s_prime / (s_prime + s)).clamp(f64::MIN_POSITIVE, BELOW_ONE)
        },
        |a| a > 0.0 && a < 1.0,
    )
}

/// The four classical routes to an arc-sine variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcsineRoute {
    /// `N^2 / (N^2 + N'^2)`
    NormalRatio,
    /// `cos^2(U)`, `U` uniform on `[0, 2 pi)`
    CosSquared,
    /// `T / (T + T')` for iid stable(1/2)
    StableRatio,
    /// `1 / (1 + C^2)`
    Cauchy,
}

impl ArcsineRoute {
    pub const ALL: [ArcsineRoute; 4] = [
        Self::NormalRatio,
        Self::CosSquared,
        Self::StableRatio,
        Self::Cauchy,
    ];
}

pub fn sample_arcsine(route: ArcsineRoute, rng: &mut RngStream) -> f64 {
    match route {
        ArcsineRoute::NormalRatio => redraw_until(
            rng,
            |rng| {
                let a = standard_normal(rng).powi(2);
                let b = standard_normal(rng).powi(2);
                a / (a + b)
            },
            f64::is_finite,
        ),
        ArcsineRoute::CosSquared => {
            let u: f64 = rng.random::<f64>() * 2.0 * PI;
            u.cos().powi(2)
        }
        ArcsineRoute::StableRatio => redraw_until(
            rng,
            |rng| {
                let t = sample_stable_half(rng);
                let t_hat = sample_stable_half(rng);
                t / (t + t_hat)
            },
            f64::is_finite,
        ),
        ArcsineRoute::Cauchy => 1.0 / (1.0 + standard_cauchy(rng).powi(2)),
    }
}

/// The occupation vector `(T_j / sum_i T_i)_j` for `n` iid stable(1/2) `T_j`.
pub fn sample_occupation_exact(n: u32, rng: &mut RngStream) -> Result<SimplexVector> {
    check_rays(n)?;
    let mut weights = vec![0.0; n as usize];
    loop {
        for w in weights.iter_mut() {
            *w = sample_stable_half(rng);
        }
        let total: f64 = weights.iter().sum();
        if total.is_finite() {
            weights.iter_mut().for_each(|w| *w /= total);
            return SimplexVector::new(weights);
        }
        rng.note_redraw();
    }
}

/// `1 / (1 + (n-1)^2 C^2)`: one spider coordinate via a single Cauchy draw.
pub fn sample_cauchy_spider_marginal(n: u32, rng: &mut RngStream) -> Result<f64> {
    check_rays(n)?;
    let m = f64::from(n - 1);
    Ok(redraw_until(
        rng,
        |rng| {
            let c = m * standard_cauchy(rng);
            1.0 / (1.0 + c * c)
        },
        |a| a > 0.0 && a <= 1.0,
    ))
}

/// Every law the batch sampler can draw from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum SampleLaw {
    PositiveStable {
        mu: f64,
    },
    StableHalf,
    RatioX {
        mu: f64,
    },
    /// `X^mu`, the variable whose density is `ratio_power_pdf`.
    RatioPower {
        mu: f64,
    },
    CMu {
        mu: f64,
    },
    RatioA {
        mu: f64,
    },
    Arcsine {
        route: ArcsineRoute,
    },
    OccupationExact {
        n: u32,
    },
    CauchySpiderMarginal {
        n: u32,
    },
}

impl SampleLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::PositiveStable { mu }
            | Self::RatioX { mu }
            | Self::RatioPower { mu }
            | Self::CMu { mu }
            | Self::RatioA { mu } => check_mu(mu),
            Self::OccupationExact { n } | Self::CauchySpiderMarginal { n } => check_rays(n),
            Self::StableHalf | Self::Arcsine { .. } => Ok(()),
        }
    }

    /// Number of values per draw.
    pub fn width(&self) -> usize {
        match *self {
            Self::OccupationExact { n } => n as usize,
            _ => 1,
        }
    }

    /// Column names for CSV output; they carry the law and its parameters.
    pub fn columns(&self) -> Vec<String> {
        match *self {
            Self::PositiveStable { mu } => vec![format!("positive_stable(mu={mu})")],
            Self::StableHalf => vec!["stable_half".into()],
            Self::RatioX { mu } => vec![format!("ratio_x(mu={mu})")],
            Self::RatioPower { mu } => vec![format!("ratio_power(mu={mu})")],
            Self::CMu { mu } => vec![format!("c_mu(mu={mu})")],
            Self::RatioA { mu } => vec![format!("ratio_a(mu={mu})")],
            Self::Arcsine { route } => vec![format!("arcsine({})", route_name(route))],
            Self::OccupationExact { n } => (1..=n).map(|j| format!("occupation_exact(n={n})[{j}]")).collect(),
            Self::CauchySpiderMarginal { n } => vec![format!("cauchy_spider_marginal(n={n})")],
        }
    }

    /// Appends one draw to `out`.
    pub fn draw_into(&self, rng: &mut RngStream, out: &mut Vec<f64>) {
        let stable = |mu| StableParams { mu };
        match *self {
            Self::PositiveStable { mu } => out.push(sample_positive_stable(stable(mu), rng)),
            Self::StableHalf => out.push(sample_stable_half(rng)),
            Self::RatioX { mu } => out.push(sample_ratio_x(stable(mu), rng)),
            Self::RatioPower { mu } => out.push(sample_ratio_x(stable(mu), rng).powf(mu)),
            Self::CMu { mu } => out.push(sample_c_mu(stable(mu), rng)),
            Self::RatioA { mu } => out.push(sample_ratio_a(stable(mu), rng)),
            Self::Arcsine { route } => out.push(sample_arcsine(route, rng)),
            Self::OccupationExact { n } => out.extend_from_slice(
                sample_occupation_exact(n, rng)
                    .expect("validated ray count")
                    .as_slice(),
            ),
            Self::CauchySpiderMarginal { n } => {
                out.push(sample_cauchy_spider_marginal(n, rng).expect("validated ray count"))
            }
        }
    }
}

fn route_name(route: ArcsineRoute) -> &'static str {
    match route {
        ArcsineRoute::NormalRatio => "normal_ratio",
        ArcsineRoute::CosSquared => "cos_squared",
        ArcsineRoute::StableRatio => "stable_ratio",
        ArcsineRoute::Cauchy => "cauchy",
    }
}

/// Draws in row-major order plus the metadata that goes in the JSON sidecar.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    pub law: SampleLaw,
    pub seed: u64,
    pub stream_count: u64,
    pub width: usize,
    pub values: Vec<f64>,
    pub redraw_count: u64,
}

impl Batch {
    pub fn n_samples(&self) -> usize {
        self.values.len() / self.width
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.width)
    }

    /// Column `j` as an owned vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }
}

/// Draws `count` samples split over `streams` substreams of `seed`.
///
/// Stream `i` produces a contiguous block of rows; the result depends only on
/// `(law, count, seed, streams)`, not on how rayon schedules the blocks.
pub fn sample_batch(law: SampleLaw, count: usize, seed: u64, streams: u64) -> Result<Batch> {
    law.validate()?;
    if count == 0 {
        return Err(Error::Usage("sample count must be positive".into()));
    }
    if streams == 0 {
        return Err(Error::Usage("stream count must be positive".into()));
    }
    let width = law.width();
    let per = count as u64 / streams;
    let extra = count as u64 % streams;
    let blocks: Vec<(Vec<f64>, u64)> = (0..streams)
        .into_par_iter()
        .map(|id| {
            let len = per + u64::from(id < extra);
            let mut rng = RngStream::new(seed, id);
            let mut out = Vec::with_capacity(len as usize * width);
            for _ in 0..len {
                law.draw_into(&mut rng, &mut out);
            }
            (out, rng.redraws())
        })
        .collect();
    let redraw_count = blocks.iter().map(|b| b.1).sum();
    let values = blocks.into_iter().flat_map(|b| b.0).collect();
    Ok(Batch {
        law,
        seed,
        stream_count: streams,
        width,
        values,
        redraw_count,
    })
}

/// Convenience: `count` draws of a scalar sampler from one stream.
pub fn draw_many<F>(count: usize, rng: &mut RngStream, mut sampler: F) -> Vec<f64>
where
    F: FnMut(&mut RngStream) -> f64,
{
    (0..count).map(|_| sampler(rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(xs: &[f64]) -> f64 {
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    #[test]
    fn params_domain() {
        assert!(StableParams::new(0.5).is_ok());
        for bad in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(StableParams::new(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn simplex_validation() {
        assert!(SimplexVector::new(vec![0.3, 0.7]).is_ok());
        assert!(SimplexVector::new(vec![1.0]).is_err());
        assert!(SimplexVector::new(vec![0.3, 0.6]).is_err());
        assert!(SimplexVector::new(vec![-0.1, 1.1]).is_err());
        let v = SimplexVector::from_weights(&[3.0, 7.0]).unwrap();
        assert_eq!(v.as_slice(), &[0.3, 0.7]);
    }

    #[test]
    fn stable_half_is_positive_with_known_median() {
        let mut rng = RngStream::new(11, 0);
        let mut xs = draw_many(100_000, &mut rng, sample_stable_half);
        assert!(xs.iter().all(|&x| x > 0.0));
        xs.sort_by(f64::total_cmp);
        let median = xs[xs.len() / 2];
        // 1/(2 q^2) with q = 0.6744897501960817, the normal 0.75 quantile.
        let q: f64 = 0.674_489_750_196_081_7;
        let expected = 0.5 / (q * q);
        assert!((median - expected).abs() < 0.02, "{median} vs {expected}");
        assert!((expected - 1.0990).abs() < 1e-4);
    }

    #[test]
    fn c_mu_at_half_is_plain_cauchy() {
        let p = StableParams::new(0.5).unwrap();
        let mut a = RngStream::new(5, 0);
        let mut b = RngStream::new(5, 0);
        for _ in 0..1000 {
            let x = sample_c_mu(p, &mut a);
            let c = standard_cauchy(&mut b);
            assert!((x - c).abs() <= 1e-15 * c.abs().max(1.0));
        }
    }

    #[test]
    fn ratio_a_strictly_inside() {
        for mu in [0.1, 0.5, 0.9] {
            let p = StableParams::new(mu).unwrap();
            let mut rng = RngStream::new(3, 0);
            for _ in 0..20_000 {
                let a = sample_ratio_a(p, &mut rng);
                assert!(a > 0.0 && a < 1.0);
            }
        }
    }

    #[test]
    fn occupation_rows_sum_to_one() {
        let mut rng = RngStream::new(9, 0);
        for n in [2, 3, 7, 20] {
            for _ in 0..2000 {
                let v = sample_occupation_exact(n, &mut rng).unwrap();
                assert_eq!(v.len(), n as usize);
                let s: f64 = v.as_slice().iter().sum();
                assert!((s - 1.0).abs() <= 1e-12);
            }
        }
        assert!(sample_occupation_exact(1, &mut rng).is_err());
        assert!(sample_cauchy_spider_marginal(1, &mut rng).is_err());
    }

    #[test]
    fn cauchy_marginal_in_half_open_unit() {
        let mut rng = RngStream::new(2, 0);
        for _ in 0..50_000 {
            let a = sample_cauchy_spider_marginal(4, &mut rng).unwrap();
            assert!(a > 0.0 && a <= 1.0);
        }
    }

    #[test]
    fn cos_squared_uses_full_circle() {
        let mut rng = RngStream::new(4, 0);
        let xs = draw_many(10_000, &mut rng, |r| sample_arcsine(ArcsineRoute::CosSquared, r));
        assert!((mean(&xs) - 0.5).abs() < 0.02);
    }

    #[test]
    fn batch_is_deterministic_and_partitioned() {
        let law = SampleLaw::OccupationExact { n: 3 };
        let a = sample_batch(law, 1001, 42, 4).unwrap();
        let b = sample_batch(law, 1001, 42, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_samples(), 1001);
        assert_eq!(a.column(2).len(), 1001);
        // First block comes from stream 0 alone.
        let mut rng = RngStream::new(42, 0);
        let first = sample_occupation_exact(3, &mut rng).unwrap();
        assert_eq!(a.rows().next().unwrap(), first.as_slice());
        assert!(sample_batch(law, 0, 42, 4).is_err());
        assert!(sample_batch(SampleLaw::RatioA { mu: 1.0 }, 10, 42, 1).is_err());
    }

    #[test]
    fn batch_does_not_depend_on_thread_count() {
        let law = SampleLaw::RatioA { mu: 0.3 };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| sample_batch(law, 5000, 8, 16).unwrap());
        let b = three.install(|| sample_batch(law, 5000, 8, 16).unwrap());
        assert_eq!(a, b);
    }
}
