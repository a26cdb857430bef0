//! Closed-form densities, distribution functions and transforms.
//!
//! Four laws are covered: the arc-sine law on [0, 1], the law of `X^mu` for
//! `X` a ratio of two iid one-sided stable(mu) variables, the law of
//! `A = 1/(1 + X)`, and the law of one coordinate of the Brownian-spider
//! occupation vector on `n` rays.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::scalar::Real;
use crate::special::gamma;

/// Which law a density or curve refers to, with its parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LawSpec {
    ArcSine,
    /// Law of `X^mu`, supported on `[0, inf)`.
    StableRatioPower {
        mu: f64,
    },
    /// Law of `A = S'/(S' + S)` for iid one-sided stable(mu) `S, S'`.
    StableRatioA {
        mu: f64,
    },
    /// Law of the fraction of time the spider spends on one of `n` rays.
    SpiderOccupation {
        n: u32,
    },
}

impl LawSpec {
    pub fn stable_ratio_power(mu: f64) -> Result<Self> {
        check_mu(mu)?;
        Ok(Self::StableRatioPower { mu })
    }

    pub fn stable_ratio_a(mu: f64) -> Result<Self> {
        check_mu(mu)?;
        Ok(Self::StableRatioA { mu })
    }

    pub fn spider_occupation(n: u32) -> Result<Self> {
        check_rays(n)?;
        Ok(Self::SpiderOccupation { n })
    }

    /// Re-checks parameters, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::ArcSine => Ok(()),
            Self::StableRatioPower { mu } | Self::StableRatioA { mu } => check_mu(mu),
            Self::SpiderOccupation { n } => check_rays(n),
        }
    }

    /// Closure of the support, `(lower, upper)`; the upper bound may be infinite.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::StableRatioPower { .. } => (0.0, f64::INFINITY),
            _ => (0.0, 1.0),
        }
    }

    /// Short label used in CSV headers and file names, e.g. `ratio_a(mu=0.25)`.
    pub fn label(&self) -> String {
        match self {
            Self::ArcSine => "arcsine".to_string(),
            Self::StableRatioPower { mu } => format!("ratio_power(mu={mu})"),
            Self::StableRatioA { mu } => format!("ratio_a(mu={mu})"),
            Self::SpiderOccupation { n } => format!("spider(n={n})"),
        }
    }

    pub fn pdf<T: Real>(&self, x: T) -> Result<T> {
        match *self {
            Self::ArcSine => arcsine_pdf(x),
            Self::StableRatioPower { mu } => ratio_power_pdf(x, T::lit(mu)),
            Self::StableRatioA { mu } => ratio_a_pdf(x, T::lit(mu)),
            Self::SpiderOccupation { n } => spider_pdf(x, n),
        }
    }

    pub fn cdf<T: Real>(&self, x: T) -> Result<T> {
        match *self {
            Self::ArcSine => arcsine_cdf(x),
            Self::StableRatioPower { mu } => ratio_power_cdf(x, T::lit(mu)),
            Self::StableRatioA { mu } => ratio_a_cdf(x, T::lit(mu)),
            Self::SpiderOccupation { n } => spider_cdf(x, n),
        }
    }
}

pub(crate) fn check_mu<T: Real>(mu: T) -> Result<()> {
    if mu > T::zero() && mu < T::one() {
        Ok(())
    } else {
        domain("mu", mu.as_f64(), "(0, 1)")
    }
}

pub(crate) fn check_rays(n: u32) -> Result<()> {
    if n >= 2 {
        Ok(())
    } else {
        domain("n", f64::from(n), "n >= 2")
    }
}

fn check_open_unit<T: Real>(z: T) -> Result<()> {
    if z > T::zero() && z < T::one() {
        Ok(())
    } else {
        domain("z", z.as_f64(), "(0, 1)")
    }
}

fn check_closed_unit<T: Real>(z: T) -> Result<()> {
    if z >= T::zero() && z <= T::one() {
        Ok(())
    } else {
        domain("z", z.as_f64(), "[0, 1]")
    }
}

fn check_nonneg<T: Real>(name: &'static str, y: T) -> Result<()> {
    if y >= T::zero() {
        Ok(())
    } else {
        domain(name, y.as_f64(), "[0, inf)")
    }
}

// Unchecked kernels, shared by the public functions and the quadrature code.

fn arcsine_density<T: Real>(z: T) -> T {
    T::one() / (T::PI() * (z * (T::one() - z)).sqrt())
}

fn ratio_power_density<T: Real>(y: T, mu: T) -> T {
    let angle = T::PI() * mu;
    angle.sin() / angle / (y * y + T::lit(2.0) * y * angle.cos() + T::one())
}

fn ratio_a_density<T: Real>(z: T, mu: T) -> T {
    let w = T::one() - z;
    let bracket = (w / z).powf(mu) + (z / w).powf(mu) + T::lit(2.0) * (T::PI() * mu).cos();
    (T::PI() * mu).sin() / T::PI() / (z * w * bracket)
}

fn spider_density<T: Real>(z: T, n: u32) -> T {
    let m = T::lit(f64::from(n - 1));
    let w = T::one() - z;
    T::one() / (T::PI() * z.sqrt() * w.sqrt() * (m * z + w / m))
}

/// Arc-sine density `1/(pi sqrt(z(1-z)))` on the open unit interval.
pub fn arcsine_pdf<T: Real>(z: T) -> Result<T> {
    check_open_unit(z)?;
    Ok(arcsine_density(z))
}

/// Arc-sine distribution function `(2/pi) asin(sqrt z)`.
pub fn arcsine_cdf<T: Real>(z: T) -> Result<T> {
    check_closed_unit(z)?;
    Ok(T::lit(2.0) / T::PI() * z.sqrt().asin())
}

/// Density of `X^mu`: `sin(pi mu)/(pi mu) / (y^2 + 2 y cos(pi mu) + 1)`.
pub fn ratio_power_pdf<T: Real>(y: T, mu: T) -> Result<T> {
    check_mu(mu)?;
    check_nonneg("y", y)?;
    if y.is_infinite() {
        return Ok(T::zero());
    }
    Ok(ratio_power_density(y, mu))
}

/// Distribution function of `X^mu`.
///
/// The antiderivative of the density collapses to a single angle:
/// `P(X^mu <= y) = atan2(y sin(pi mu), 1 + y cos(pi mu)) / (pi mu)`.
pub fn ratio_power_cdf<T: Real>(y: T, mu: T) -> Result<T> {
    check_mu(mu)?;
    check_nonneg("y", y)?;
    if y.is_infinite() {
        return Ok(T::one());
    }
    let angle = T::PI() * mu;
    Ok((y * angle.sin()).atan2(T::one() + y * angle.cos()) / angle)
}

/// Density of `A = S'/(S' + S)`.
pub fn ratio_a_pdf<T: Real>(z: T, mu: T) -> Result<T> {
    check_mu(mu)?;
    check_open_unit(z)?;
    Ok(ratio_a_density(z, mu))
}

/// Distribution function of `A`.
///
/// `P(A <= z) = P(X^mu >= ((1-z)/z)^mu)`; multiplying the survival angle
/// through by `z^mu` removes the singularity at `z = 0`.
pub fn ratio_a_cdf<T: Real>(z: T, mu: T) -> Result<T> {
    check_mu(mu)?;
    check_closed_unit(z)?;
    let angle = T::PI() * mu;
    let zm = z.powf(mu);
    let wm = (T::one() - z).powf(mu);
    Ok((angle.sin() * zm).atan2(wm + angle.cos() * zm) / angle)
}

/// Density of one coordinate of the spider occupation vector on `n` rays.
pub fn spider_pdf<T: Real>(z: T, n: u32) -> Result<T> {
    check_rays(n)?;
    check_open_unit(z)?;
    Ok(spider_density(z, n))
}

/// Distribution function of one spider coordinate,
/// `(2/pi) atan((n-1) sqrt(z/(1-z)))`, from the Cauchy representation.
pub fn spider_cdf<T: Real>(z: T, n: u32) -> Result<T> {
    check_rays(n)?;
    check_closed_unit(z)?;
    let m = T::lit(f64::from(n - 1));
    Ok(T::lit(2.0) / T::PI() * (m * z.sqrt()).atan2((T::one() - z).sqrt()))
}

/// Stieltjes transform of the stable ratio, `E[1/(1 + sX)] = 1/(1 + s^mu)`.
pub fn stieltjes_transform<T: Real>(s: T, mu: T) -> Result<T> {
    check_mu(mu)?;
    check_nonneg("s", s)?;
    Ok(T::one() / (T::one() + s.powf(mu)))
}

/// Mellin transform `E[X^s] = sin(pi s) / (mu sin(pi s / mu))` for `0 < s < mu`.
pub fn mellin_transform<T: Real>(s: T, mu: T) -> Result<T> {
    check_mu(mu)?;
    if !(s > T::zero() && s < mu) {
        return domain("s", s.as_f64(), "(0, mu)");
    }
    let pi = T::PI();
    Ok((pi * s).sin() / (mu * (pi * s / mu).sin()))
}

/// Fractional moment `E[S_mu^(mu s)] = Gamma(1 - s) / Gamma(1 - mu s)` for `s < 1`.
pub fn fractional_moment<T: Real>(s: T, mu: T) -> Result<T> {
    check_mu(mu)?;
    if s.is_nan() || s >= T::one() {
        return domain("s", s.as_f64(), "(-inf, 1)");
    }
    Ok(gamma(T::one() - s) / gamma(T::one() - mu * s))
}

fn default_tolerance<T: Real>() -> Tolerance {
    let floor = 100.0 * T::epsilon().as_f64();
    Tolerance {
        abs: floor.max(1e-12),
        rel: floor.max(1e-12),
        max_intervals: 4000,
    }
}

fn check_interval(law: &LawSpec, a: f64, b: f64) -> Result<()> {
    let (lo, hi) = law.support();
    if a.is_nan() || b.is_nan() || a < lo || b > hi || a > b {
        return Err(Error::Usage(format!(
            "interval [{a}, {b}] is not inside the support [{lo}, {hi}] of {}",
            law.label()
        )));
    }
    Ok(())
}

/// `P(a <= Z <= b)` by quadrature of the density.
pub fn integrate_density<T: Real>(law: &LawSpec, a: T, b: T) -> Result<T> {
    expectation(law, |_| T::one(), a, b)
}

/// `E[g(Z); a <= Z <= b]` by quadrature of `g` against the density.
///
/// Arc-sine and spider integrands go through `z = sin^2(theta)`, which
/// cancels both inverse-square-root endpoint singularities. The stable-ratio
/// laws go through `y = ((1-z)/z)^mu` to the density of `X^mu`, which is
/// smooth; its half-line is folded onto `[0, 1]` with `y -> 1/y`.
pub fn expectation<T, G>(law: &LawSpec, g: G, a: T, b: T) -> Result<T>
where
    T: Real,
    G: Fn(T) -> T,
{
    law.validate()?;
    check_interval(law, a.as_f64(), b.as_f64())?;
    let tol = default_tolerance::<T>();
    let two = T::lit(2.0);
    match *law {
        LawSpec::ArcSine | LawSpec::SpiderOccupation { .. } => {
            let theta = |z: T| z.sqrt().asin();
            let pdf = |z: T| match *law {
                LawSpec::ArcSine => arcsine_density(z),
                LawSpec::SpiderOccupation { n } => spider_density(z, n),
                _ => unreachable!(),
            };
            let integrand = |t: T| {
                let (s, c) = t.sin_cos();
                let z = s * s;
                g(z) * pdf(z) * two * s * c
            };
            Ok(quadrature::integrate(integrand, theta(a), theta(b), tol)?.value)
        }
        LawSpec::StableRatioA { mu } => {
            let mu = T::lit(mu);
            let inv = T::one() / mu;
            // z as a function of y = ((1-z)/z)^mu, and of u = 1/y.
            let z_of_y = move |y: T| T::one() / (T::one() + y.powf(inv));
            let z_of_u = move |u: T| {
                let p = u.powf(inv);
                p / (T::one() + p)
            };
            let y_of_z = |z: T| {
                if z == T::zero() {
                    T::infinity()
                } else {
                    ((T::one() - z) / z).powf(mu)
                }
            };
            half_line(
                |y| g(z_of_y(y)) * ratio_power_density(y, mu),
                |u| g(z_of_u(u)) * ratio_power_density(T::one() / u, mu) / (u * u),
                y_of_z(b),
                y_of_z(a),
                tol,
            )
        }
        LawSpec::StableRatioPower { mu } => {
            let mu = T::lit(mu);
            half_line(
                |y| g(y) * ratio_power_density(y, mu),
                |u| g(T::one() / u) * ratio_power_density(T::one() / u, mu) / (u * u),
                a,
                b,
                tol,
            )
        }
    }
}

/// `int_lo^hi f(y) dy` on `[0, inf]`, where `folded(u) = f(1/u)/u^2`
/// handles the part above 1.
fn half_line<T, F, H>(direct: F, folded: H, lo: T, hi: T, tol: Tolerance) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
    H: Fn(T) -> T,
{
    let one = T::one();
    let mut total = T::zero();
    if lo < one {
        total += quadrature::integrate(&direct, lo, hi.min(one), tol)?.value;
    }
    if hi > one {
        let u_lo = if hi.is_infinite() { T::zero() } else { one / hi };
        let u_hi = one / lo.max(one);
        total += quadrature::integrate(&folded, u_lo, u_hi, tol)?.value;
    }
    Ok(total)
}

/// Tabulated density and distribution function of one law.
///
/// The grid holds `points + 2` abscissae: both support endpoints and
/// `points` equispaced interior points. The density is not evaluated at the
/// endpoints (it is singular there for the unit-interval laws), so
/// `pdf[0]` and `pdf[last]` are `None`. For the half-line law the grid is
/// the image of the unit grid under `z -> z/(1-z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityCurve<T> {
    pub law: LawSpec,
    pub grid: Vec<T>,
    pub pdf: Vec<Option<T>>,
    pub cdf: Vec<T>,
}

impl<T: Real> DensityCurve<T> {
    /// Default interior grid `k/1000`, `k = 1..=999`.
    pub const DEFAULT_POINTS: usize = 999;

    pub fn tabulate(law: LawSpec, points: usize) -> Result<Self> {
        law.validate()?;
        if points == 0 {
            return Err(Error::Usage("grid needs at least one interior point".into()));
        }
        let denom = T::lit((points + 1) as f64);
        let mut grid = Vec::with_capacity(points + 2);
        let mut pdf = Vec::with_capacity(points + 2);
        let mut cdf = Vec::with_capacity(points + 2);
        for k in 0..=points + 1 {
            let u = T::lit(k as f64) / denom;
            let x = match law {
                LawSpec::StableRatioPower { .. } if k == points + 1 => T::infinity(),
                LawSpec::StableRatioPower { .. } => u / (T::one() - u),
                _ => u,
            };
            let interior = k > 0 && k <= points;
            pdf.push(if interior { Some(law.pdf(x)?) } else { None });
            cdf.push(law.cdf(x)?);
            grid.push(x);
        }
        Ok(Self { law, grid, pdf, cdf })
    }

    /// Interior `(x, pdf)` pairs.
    pub fn interior(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.grid
            .iter()
            .zip(&self.pdf)
            .filter_map(|(&x, p)| p.map(|p| (x, p)))
    }
}
