//! The verification suites: each returns a flat list of reports.

use std::f64::consts::FRAC_2_PI;

use super::ks::{ks_one_sample, ks_two_sample};
use super::mc::mc_transform_check;
use super::report::{GofReport, Threshold};
use crate::closed_form::{
    arcsine_cdf, arcsine_pdf, expectation, fractional_moment, integrate_density, mellin_transform,
    ratio_a_pdf, spider_cdf, spider_pdf, stieltjes_transform, LawSpec,
};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::sampler::{
    draw_many, sample_arcsine, sample_batch, sample_cauchy_spider_marginal, sample_positive_stable,
    sample_ratio_x, ArcsineRoute, SampleLaw, StableParams,
};
use crate::spider::{
    last_zero_fraction, occupation_fraction, simulate_batch, stop_batch, SpiderConfig, StoppingRule,
};

/// Seed fixed before any acceptance run; every seeded suite derives its
/// streams from it.
pub const ACCEPTANCE_SEED: u64 = 7;
pub const SIGNIFICANCE: f64 = 0.01;
pub const REDUCTION_TOL: f64 = 1e-12;
pub const QUADRATURE_TOL: f64 = 1e-8;
pub const TRANSFORM_QUADRATURE_TOL: f64 = 1e-6;
pub const MC_SAMPLES: usize = 1_000_000;
pub const KS_SAMPLES: usize = 100_000;

/// KS bound for lattice-versus-lattice and lattice-versus-exact comparisons
/// in the stopping-rule identity.
pub const IDENTITY_KS_BOUND: f64 = 0.03;
/// KS bound for lattice outputs against closed-form arc-sine / spider laws.
pub const LATTICE_KS_BOUND: f64 = 0.02;
/// Allowed growth of the KS statistic between successive refinements.
pub const REFINEMENT_SLACK: f64 = 0.005;
/// Ceiling on the fraction of stopped paths that may hit the step cap.
pub const MAX_DISCARD_RATE: f64 = 0.01;

pub const IDENTITY_PATHS: usize = 10_000;
pub const IDENTITY_STEPS: u64 = 20_000;
pub const LATTICE_PATHS: usize = 5_000;
pub const LATTICE_STEPS: [u64; 3] = [1_000, 10_000, 100_000];
pub const LEVY_STEPS: u64 = 10_000;

pub const TRANSFORM_MU: [f64; 3] = [0.3, 0.5, 0.7];

fn unit_grid(points: usize) -> impl Iterator<Item = f64> {
    (1..=points).map(move |k| k as f64 / (points + 1) as f64)
}

fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter()
        .fold(0.0, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

fn stable(mu: f64) -> StableParams {
    StableParams::new(mu).expect("suite parameters are in range")
}

/// Reduction identities on the 999-point grid.
pub fn reduction_reports() -> Result<Vec<GofReport>> {
    let mut ratio_gap = Vec::with_capacity(999);
    let mut spider_gap = Vec::with_capacity(999);
    for z in unit_grid(999) {
        let a: f64 = arcsine_pdf(z)?;
        ratio_gap.push(ratio_a_pdf(z, 0.5)? - a);
        spider_gap.push(spider_pdf(z, 2)? - a);
    }
    Ok(vec![
        GofReport::deterministic(
            "reduction ratio_a_pdf(mu=0.5) = arcsine",
            max_abs(ratio_gap),
            999,
            REDUCTION_TOL,
        ),
        GofReport::deterministic(
            "reduction spider_pdf(n=2) = arcsine",
            max_abs(spider_gap),
            999,
            REDUCTION_TOL,
        ),
    ])
}

/// Laws whose densities must integrate to one.
pub fn normalization_laws() -> Vec<LawSpec> {
    let mut laws = vec![LawSpec::ArcSine];
    for k in 1..10 {
        let mu = k as f64 / 10.0;
        laws.push(LawSpec::StableRatioA { mu });
        laws.push(LawSpec::StableRatioPower { mu });
    }
    laws.extend((2..=10).map(|n| LawSpec::SpiderOccupation { n }));
    laws
}

pub fn normalization_reports() -> Result<Vec<GofReport>> {
    normalization_laws()
        .into_iter()
        .map(|law| {
            let (lo, hi) = law.support();
            let total: f64 = integrate_density(&law, lo, hi)?;
            Ok(GofReport::deterministic(
                format!("normalization {}", law.label()),
                (total - 1.0).abs(),
                1,
                QUADRATURE_TOL,
            ))
        })
        .collect()
}

pub fn mean_reports() -> Result<Vec<GofReport>> {
    let mut out = Vec::new();
    for n in 2..=10u32 {
        let law = LawSpec::SpiderOccupation { n };
        let m: f64 = expectation(&law, |z| z, 0.0, 1.0)?;
        out.push(GofReport::deterministic(
            format!("mean {} = 1/{n}", law.label()),
            (m - 1.0 / f64::from(n)).abs(),
            1,
            QUADRATURE_TOL,
        ));
    }
    for mu in [0.25, 0.5, 0.75] {
        let law = LawSpec::StableRatioA { mu };
        let m: f64 = expectation(&law, |z| z, 0.0, 1.0)?;
        out.push(GofReport::deterministic(
            format!("mean {} = 1/2", law.label()),
            (m - 0.5).abs(),
            1,
            QUADRATURE_TOL,
        ));
    }
    Ok(out)
}

/// Closed-form CDFs against quadrature of the densities, and centered
/// finite differences of the CDFs against the densities.
pub fn cdf_consistency_reports() -> Result<Vec<GofReport>> {
    let mut laws = vec![LawSpec::ArcSine];
    laws.extend([0.1, 0.25, 0.5, 0.75, 0.9].map(|mu| LawSpec::StableRatioA { mu }));
    laws.extend([0.2, 0.5, 0.8].map(|mu| LawSpec::StableRatioPower { mu }));
    laws.extend([3, 5, 8].map(|n| LawSpec::SpiderOccupation { n }));
    let mut out = Vec::new();
    for law in laws {
        let to_x = |u: f64| match law {
            LawSpec::StableRatioPower { .. } => u / (1.0 - u),
            _ => u,
        };
        let mut quad_gap: f64 = 0.0;
        for u in unit_grid(50) {
            let x = to_x(u);
            let q: f64 = integrate_density(&law, 0.0, x)?;
            quad_gap = quad_gap.max((law.cdf(x)? - q).abs());
        }
        out.push(GofReport::deterministic(
            format!("cdf vs quadrature {}", law.label()),
            quad_gap,
            50,
            QUADRATURE_TOL,
        ));
        // Worst ratio of |FD - pdf| to max(1e-4, 1e-3 pdf); passes at <= 1.
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for u in unit_grid(999).filter(|u| (0.01..=0.99).contains(u)) {
            let x = to_x(u);
            let fd = (law.cdf(x + h)? - law.cdf(x - h)?) / (2.0 * h);
            let p: f64 = law.pdf(x)?;
            worst = worst.max((fd - p).abs() / (1e-3 * p).max(1e-4));
        }
        out.push(GofReport::deterministic(
            format!("cdf finite difference {}", law.label()),
            worst,
            999,
            1.0,
        ));
    }
    Ok(out)
}

/// Stieltjes and Mellin closed forms against quadrature of the `X^mu` density.
pub fn transform_quadrature_reports() -> Result<Vec<GofReport>> {
    let mut out = Vec::new();
    for k in 1..10 {
        let mu = k as f64 / 10.0;
        let law = LawSpec::StableRatioPower { mu };
        let inv = 1.0 / mu;
        let mut gap: f64 = 0.0;
        for s in [0.5, 1.0, 2.0] {
            let q: f64 = expectation(&law, |y: f64| 1.0 / (1.0 + s * y.powf(inv)), 0.0, f64::INFINITY)?;
            gap = gap.max((q - stieltjes_transform(s, mu)?).abs());
        }
        out.push(GofReport::deterministic(
            format!("stieltjes vs quadrature mu={mu}"),
            gap,
            3,
            TRANSFORM_QUADRATURE_TOL,
        ));
        let mut gap: f64 = 0.0;
        for s in [mu / 4.0, mu / 2.0] {
            let q: f64 = expectation(&law, |y: f64| y.powf(s * inv), 0.0, f64::INFINITY)?;
            gap = gap.max((q - mellin_transform(s, mu)?).abs());
        }
        out.push(GofReport::deterministic(
            format!("mellin vs quadrature mu={mu}"),
            gap,
            2,
            TRANSFORM_QUADRATURE_TOL,
        ));
    }
    Ok(out)
}

pub fn symmetry_reports() -> Result<Vec<GofReport>> {
    let mut worst: f64 = 0.0;
    for mu in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for k in 1..1024 {
            let z = k as f64 / 1024.0;
            worst = worst.max((ratio_a_pdf(z, mu)? - ratio_a_pdf(1.0 - z, mu)?).abs());
        }
    }
    let asym = (spider_pdf::<f64>(0.1, 3)? - spider_pdf::<f64>(0.9, 3)?).abs();
    Ok(vec![
        GofReport::deterministic("symmetry ratio_a_pdf(z) = ratio_a_pdf(1-z)", worst, 5 * 1023, 0.0),
        // Passes when the asymmetry is visible: statistic is the inverse gap.
        GofReport::deterministic(
            "asymmetry spider_pdf(0.1,3) != spider_pdf(0.9,3)",
            1.0 / asym,
            1,
            1e12,
        ),
    ])
}

/// Every deterministic density check.
pub fn density_suite() -> Result<Vec<GofReport>> {
    let mut out = reduction_reports()?;
    out.extend(normalization_reports()?);
    out.extend(mean_reports()?);
    out.extend(symmetry_reports()?);
    out.extend(cdf_consistency_reports()?);
    out.extend(transform_quadrature_reports()?);
    Ok(out)
}

/// Monte-Carlo checks of the Laplace, Stieltjes, Mellin and fractional-moment
/// formulas. Check `i` draws from stream `i` of `seed`.
pub fn transform_suite(seed: u64, n_samples: usize) -> Result<Vec<GofReport>> {
    let mut out = Vec::new();
    let mut stream = 0u64;
    let mut next_rng = || {
        stream += 1;
        RngStream::new(seed, stream - 1)
    };
    for mu in TRANSFORM_MU {
        let p = stable(mu);
        for lambda in [0.5, 1.0, 2.0] {
            let target = (-f64::powf(lambda, mu)).exp();
            out.push(mc_transform_check(
                &format!("laplace mu={mu} lambda={lambda}"),
                |r| sample_positive_stable(p, r),
                |s| (-lambda * s).exp(),
                target,
                n_samples,
                &mut next_rng(),
            )?);
        }
        for s in [0.5, 1.0, 2.0] {
            out.push(mc_transform_check(
                &format!("stieltjes mu={mu} s={s}"),
                |r| sample_ratio_x(p, r),
                |x| 1.0 / (1.0 + s * x),
                stieltjes_transform(s, mu)?,
                n_samples,
                &mut next_rng(),
            )?);
        }
        for s in [mu / 4.0, mu / 2.0] {
            out.push(mc_transform_check(
                &format!("mellin mu={mu} s={s}"),
                |r| sample_ratio_x(p, r),
                |x| x.powf(s),
                mellin_transform(s, mu)?,
                n_samples,
                &mut next_rng(),
            )?);
        }
        for s in [0.25, 0.5] {
            out.push(mc_transform_check(
                &format!("fractional_moment mu={mu} s={s}"),
                |r| sample_positive_stable(p, r),
                |x| x.powf(mu * s),
                fractional_moment(s, mu)?,
                n_samples,
                &mut next_rng(),
            )?);
        }
    }
    Ok(out)
}

/// Monte-Carlo Mellin check with the variance guard: beyond `s = mu/2` the
/// functional has no finite variance and the report says so.
pub fn mellin_check(mu: f64, s: f64, n_samples: usize, rng: &mut RngStream) -> Result<GofReport> {
    let target = mellin_transform(s, mu)?;
    let p = StableParams::new(mu)?;
    let report = mc_transform_check(
        &format!("mellin mu={mu} s={s}"),
        |r| sample_ratio_x(p, r),
        |x| x.powf(s),
        target,
        n_samples,
        rng,
    )?;
    Ok(if s > mu / 2.0 {
        let note = report.note.clone().unwrap_or_default();
        report.with_note(format!(
            "{note}; s > mu/2: X^s has infinite variance, the standard-error band is not valid"
        ))
    } else {
        report
    })
}

/// One-sample KS of coordinate 1 of the exact occupation sampler against the
/// closed-form spider CDF; plus the Cauchy route and arc-sine routes.
pub fn exact_sampler_suite(seed: u64, count: usize) -> Result<Vec<GofReport>> {
    let mut out = Vec::new();
    for (i, n) in [2u32, 3, 5].into_iter().enumerate() {
        let batch = sample_batch(
            SampleLaw::OccupationExact { n },
            count,
            seed.wrapping_add(i as u64),
            16,
        )?;
        let first = batch.column(0);
        out.push(
            ks_one_sample(&first, |z| spider_cdf(z.clamp(0.0, 1.0), n).expect("n >= 2"))?
                .named(format!("exact occupation coord 1 vs spider_cdf n={n}"))
                .with_seed(batch.seed),
        );
        let mut rng = RngStream::new(seed.wrapping_add(100 + i as u64), 0);
        let cauchy = draw_many(count, &mut rng, |r| {
            sample_cauchy_spider_marginal(n, r).expect("n >= 2")
        });
        out.push(
            ks_two_sample(&first, &cauchy)?
                .named(format!("exact occupation coord 1 vs cauchy marginal n={n}"))
                .with_seed(seed),
        );
    }
    let routes: Vec<Vec<f64>> = ArcsineRoute::ALL
        .iter()
        .enumerate()
        .map(|(i, &route)| {
            let mut rng = RngStream::new(seed.wrapping_add(200 + i as u64), 0);
            draw_many(count, &mut rng, |r| sample_arcsine(route, r))
        })
        .collect();
    for i in 0..routes.len() {
        for j in i + 1..routes.len() {
            out.push(
                ks_two_sample(&routes[i], &routes[j])?
                    .named(format!(
                        "arcsine routes {:?} vs {:?}",
                        ArcsineRoute::ALL[i],
                        ArcsineRoute::ALL[j]
                    ))
                    .with_seed(seed),
            );
        }
    }
    Ok(out)
}

/// The three stopping rules used for the stopping-rule identity on `n` rays.
///
/// Levels put each rule's typical stopping time near `steps`: the fixed
/// horizon itself, occupation level `1/n` on ray 2, and a local-time level
/// matching the mean number of returns of a simple walk in `steps` steps.
pub fn identity_rules(n: u32) -> [StoppingRule; 3] {
    [
        StoppingRule::FixedTime { t: 1.0 },
        StoppingRule::InverseOccupation {
            ray: 2,
            level: 1.0 / f64::from(n),
        },
        StoppingRule::InverseLocalTime {
            level: FRAC_2_PI.sqrt(),
        },
    ]
}

/// Runs the three stopping rules and the exact sampler on `n` rays.
///
/// Reports: the discard rate of each rule; all pairwise two-sample KS tests
/// on coordinate 1 (bound 0.03); for `n >= 3` the sum of coordinates 1 and 2
/// under each rule against the exact sampler; and one one-sample KS of the
/// fixed-time coordinate 1 against the spider CDF.
pub fn verify_theorem1(n: u32, paths: usize, steps: u64, seed: u64) -> Result<Vec<GofReport>> {
    if n < 2 {
        return Err(Error::Usage(format!(
            "stopping-rule identity needs n >= 2, got {n}"
        )));
    }
    let bound = Threshold::MaxStatistic {
        bound: IDENTITY_KS_BOUND,
    };
    let mut out = Vec::new();
    let mut first = Vec::new();
    let mut pair_sums = Vec::new();
    for (k, rule) in identity_rules(n).into_iter().enumerate() {
        let cfg = SpiderConfig::new(n, steps, paths, seed.wrapping_add(k as u64))?;
        let batch = stop_batch(&cfg, rule)?;
        out.push(
            GofReport::deterministic(
                format!("discard rate {} n={n}", rule.name()),
                batch.discard_rate(),
                paths,
                MAX_DISCARD_RATE,
            )
            .with_seed(cfg.seed)
            .with_note(format!("cap={} discarded={}", batch.cap, batch.discarded())),
        );
        first.push((rule.name(), batch.coordinate(0)));
        pair_sums.push((rule.name(), batch.coordinate_sum(0..2)));
    }
    let exact_seed = seed.wrapping_add(3);
    let exact = sample_batch(SampleLaw::OccupationExact { n }, paths, exact_seed, 16)?;
    first.push(("exact", exact.column(0)));
    let exact_pairs: Vec<f64> = exact.rows().map(|r| r[0] + r[1]).collect();

    for i in 0..first.len() {
        for j in i + 1..first.len() {
            out.push(
                ks_two_sample(&first[i].1, &first[j].1)?
                    .with_threshold(bound)
                    .named(format!("coord 1 {} vs {} n={n}", first[i].0, first[j].0))
                    .with_seed(seed),
            );
        }
    }
    if n >= 3 {
        for (name, sums) in &pair_sums {
            out.push(
                ks_two_sample(sums, &exact_pairs)?
                    .with_threshold(bound)
                    .named(format!("coord 1+2 {name} vs exact n={n}"))
                    .with_seed(seed),
            );
        }
    }
    out.push(
        ks_one_sample(&first[0].1, |z| spider_cdf(z, n).expect("n >= 2"))?
            .with_threshold(bound)
            .named(format!("coord 1 fixed_time vs spider_cdf n={n}"))
            .with_seed(seed),
    );
    Ok(out)
}

/// KS statistic of fixed-time occupation against the spider CDF as the
/// lattice is refined. Uses the same seed at every resolution.
pub fn lattice_convergence(n: u32, paths: usize, steps_list: &[u64], seed: u64) -> Result<Vec<GofReport>> {
    let mut out = Vec::new();
    let mut stats = Vec::new();
    for &steps in steps_list {
        let cfg = SpiderConfig::new(n, steps, paths, seed)?;
        let first: Vec<f64> = simulate_batch(&cfg)?
            .iter()
            .map(|s| occupation_fraction(s).map(|f| f[0]))
            .collect::<Result<_>>()?;
        let r = ks_one_sample(&first, |z| spider_cdf(z, n).expect("n >= 2"))?
            .with_threshold(Threshold::MaxStatistic { bound: 1.0 })
            .named(format!("lattice fixed_time vs spider_cdf n={n} steps={steps}"))
            .with_seed(seed);
        stats.push(r.statistic);
        out.push(r);
    }
    let worst_rise = stats
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(GofReport::deterministic(
        format!("lattice refinement nonincreasing n={n}"),
        worst_rise.max(0.0),
        stats.len(),
        REFINEMENT_SLACK,
    ));
    if let (Some(&last), Some(&steps)) = (stats.last(), steps_list.last()) {
        out.push(
            GofReport::new(
                format!("lattice finest KS n={n} steps={steps}"),
                last,
                None,
                paths,
                None,
                Threshold::MaxStatistic {
                    bound: LATTICE_KS_BOUND,
                },
            )
            .with_seed(seed),
        );
    }
    Ok(out)
}

/// Last zero and ray-1 occupation of the two-ray walk against the arc-sine law.
pub fn levy_functionals(paths: usize, steps: u64, seed: u64) -> Result<Vec<GofReport>> {
    let cfg = SpiderConfig::new(2, steps, paths, seed)?;
    let batch = simulate_batch(&cfg)?;
    let last_zero: Vec<f64> = batch.iter().map(last_zero_fraction).collect();
    let ray1: Vec<f64> = batch
        .iter()
        .map(|s| occupation_fraction(s).map(|f| f[0]))
        .collect::<Result<_>>()?;
    let bound = Threshold::MaxStatistic {
        bound: LATTICE_KS_BOUND,
    };
    let cdf = |z: f64| arcsine_cdf(z).expect("fractions lie in [0, 1]");
    Ok(vec![
        ks_one_sample(&last_zero, cdf)?
            .with_threshold(bound)
            .named(format!("last zero fraction vs arcsine steps={steps}"))
            .with_seed(seed),
        ks_one_sample(&ray1, cdf)?
            .with_threshold(bound)
            .named(format!("ray 1 occupation vs arcsine steps={steps}"))
            .with_seed(seed),
    ])
}

/// Exact sampler, stopping-rule identity for n = 2 and 3, lattice refinement
/// and the two-ray Lévy functionals.
pub fn occupation_suite(seed: u64) -> Result<Vec<GofReport>> {
    let mut out = exact_sampler_suite(seed, KS_SAMPLES)?;
    for n in [2, 3] {
        out.extend(verify_theorem1(n, IDENTITY_PATHS, IDENTITY_STEPS, seed)?);
    }
    out.extend(lattice_convergence(3, LATTICE_PATHS, &LATTICE_STEPS, seed)?);
    out.extend(levy_functionals(LATTICE_PATHS, LEVY_STEPS, seed)?);
    Ok(out)
}
