use proptest::prelude::*;
use spider_core::closed_form::{arcsine_cdf, mellin_transform, spider_cdf};
use spider_core::sampler::*;
use spider_core::verify::{ks_one_sample, ks_two_sample, mc_transform_check};
use spider_core::RngStream;

const MC: usize = 1_000_000;
const KS: usize = 100_000;

fn params(mu: f64) -> StableParams {
    StableParams::new(mu).unwrap()
}

fn draws(seed: u64, stream: u64, count: usize, f: impl FnMut(&mut RngStream) -> f64) -> Vec<f64> {
    draw_many(count, &mut RngStream::new(seed, stream), f)
}

#[test]
fn positive_stable_laplace_at_one() {
    let p = params(0.5);
    let r = mc_transform_check(
        "laplace",
        |rng| sample_positive_stable(p, rng),
        |s| (-s).exp(),
        (-1.0f64).exp(),
        MC,
        &mut RngStream::new(11, 0),
    )
    .unwrap();
    assert!(r.passed(), "{r}");
}

#[test]
fn positive_stable_laplace_grid() {
    for (i, mu) in [0.3, 0.5, 0.7].into_iter().enumerate() {
        let p = params(mu);
        for (j, lambda) in [0.5f64, 1.0, 2.0].into_iter().enumerate() {
            let r = mc_transform_check(
                "laplace",
                |rng| sample_positive_stable(p, rng),
                |s| (-lambda * s).exp(),
                (-lambda.powf(mu)).exp(),
                MC,
                &mut RngStream::new(12, (3 * i + j) as u64),
            )
            .unwrap();
            assert!(r.passed(), "mu={mu} lambda={lambda}: {r}");
        }
    }
}

#[test]
fn kanter_matches_normal_construction_at_half() {
    let a = draws(13, 0, KS, |rng| sample_positive_stable(params(0.5), rng));
    let b = draws(13, 1, KS, sample_stable_half);
    let r = ks_two_sample(&a, &b).unwrap();
    assert!(r.passed(), "{r}");
}

#[test]
fn stable_half_laplace_and_median() {
    let r = mc_transform_check(
        "laplace",
        sample_stable_half,
        |s| (-s).exp(),
        (-1.0f64).exp(),
        MC,
        &mut RngStream::new(14, 0),
    )
    .unwrap();
    assert!(r.passed(), "{r}");

    let mut v = draws(14, 1, KS, sample_stable_half);
    assert!(v.iter().all(|&x| x > 0.0));
    v.sort_by(f64::total_cmp);
    let q = 0.674_489_750_196_081_7f64;
    let median = 1.0 / (2.0 * q * q);
    assert!((v[KS / 2] - median).abs() < 0.02, "{} vs {median}", v[KS / 2]);
}

#[test]
fn fractional_moments_of_stable() {
    for (i, mu) in [0.5, 0.7].into_iter().enumerate() {
        let p = params(mu);
        for (j, s) in [0.25f64, 0.5].into_iter().enumerate() {
            let target = spider_core::closed_form::fractional_moment(s, mu).unwrap();
            let r = mc_transform_check(
                "moment",
                |rng| sample_positive_stable(p, rng),
                |x| x.powf(mu * s),
                target,
                MC,
                &mut RngStream::new(15, (2 * i + j) as u64),
            )
            .unwrap();
            assert!(r.passed(), "mu={mu} s={s}: {r}");
        }
    }
}

#[test]
fn ratio_x_stieltjes_and_mellin() {
    let p = params(0.5);
    let r = mc_transform_check(
        "stieltjes",
        |rng| sample_ratio_x(p, rng),
        |x| 1.0 / (1.0 + x),
        0.5,
        MC,
        &mut RngStream::new(16, 0),
    )
    .unwrap();
    assert!(r.passed(), "{r}");

    let target = mellin_transform(0.25, 0.5).unwrap();
    assert!((target - 2f64.sqrt()).abs() < 1e-12);
    let r = mc_transform_check(
        "mellin",
        |rng| sample_ratio_x(p, rng),
        |x| x.powf(0.25),
        target,
        MC,
        &mut RngStream::new(16, 1),
    )
    .unwrap();
    assert!(r.passed(), "{r}");

    for (i, mu) in [0.3, 0.5, 0.7].into_iter().enumerate() {
        let p = params(mu);
        for (j, s) in [0.5f64, 1.0, 2.0].into_iter().enumerate() {
            let r = mc_transform_check(
                "stieltjes",
                |rng| sample_ratio_x(p, rng),
                |x| 1.0 / (1.0 + s * x),
                1.0 / (1.0 + s.powf(mu)),
                MC,
                &mut RngStream::new(17, (3 * i + j) as u64),
            )
            .unwrap();
            assert!(r.passed(), "mu={mu} s={s}: {r}");
        }
    }
}

#[test]
fn ratio_x_is_inversion_symmetric() {
    for (i, mu) in [0.2, 0.5, 0.8].into_iter().enumerate() {
        let p = params(mu);
        let x = draws(18, 2 * i as u64, KS, |rng| sample_ratio_x(p, rng));
        let inv: Vec<f64> = draws(18, 2 * i as u64 + 1, KS, |rng| sample_ratio_x(p, rng))
            .into_iter()
            .map(|v| 1.0 / v)
            .collect();
        let r = ks_two_sample(&x, &inv).unwrap();
        assert!(r.passed(), "mu={mu}: {r}");
    }
}

#[test]
fn positive_c_mu_is_x_to_the_mu() {
    for (i, mu) in [0.3, 0.5, 0.7].into_iter().enumerate() {
        let p = params(mu);
        let c = draws(19, 2 * i as u64, KS, |rng| sample_c_mu_positive(p, rng));
        let x: Vec<f64> = draws(19, 2 * i as u64 + 1, KS, |rng| sample_ratio_x(p, rng))
            .into_iter()
            .map(|v| v.powf(mu))
            .collect();
        let r = ks_two_sample(&c, &x).unwrap();
        assert!(r.passed(), "mu={mu}: {r}");
    }
}

#[test]
fn c_mu_is_positive_with_probability_mu() {
    // P(sin(pi mu) C > cos(pi mu)) = P(C > cot(pi mu)) = mu.
    for (i, mu) in [0.25, 0.5, 0.75].into_iter().enumerate() {
        let p = params(mu);
        let r = mc_transform_check(
            "positive",
            |rng| sample_c_mu(p, rng),
            |c| if c > 0.0 { 1.0 } else { 0.0 },
            mu,
            MC,
            &mut RngStream::new(20, i as u64),
        )
        .unwrap();
        assert!(r.passed(), "mu={mu}: {r}");
    }
}

#[test]
fn ratio_a_mean_and_arcsine_case() {
    for (i, mu) in [0.1, 0.5, 0.9].into_iter().enumerate() {
        let p = params(mu);
        let r = mc_transform_check(
            "mean",
            |rng| sample_ratio_a(p, rng),
            |a| a,
            0.5,
            MC,
            &mut RngStream::new(21, i as u64),
        )
        .unwrap();
        assert!(r.passed(), "mu={mu}: {r}");
    }
    let a = draws(21, 9, KS, |rng| sample_ratio_a(params(0.5), rng));
    assert!(a.iter().all(|&z| z > 0.0 && z < 1.0));
    let r = ks_one_sample(&a, |z| arcsine_cdf(z).unwrap()).unwrap();
    assert!(r.passed(), "{r}");
}

#[test]
fn every_arcsine_route_fits_the_cdf() {
    for (i, route) in ArcsineRoute::ALL.into_iter().enumerate() {
        let a = draws(22, i as u64, KS, |rng| sample_arcsine(route, rng));
        let r = ks_one_sample(&a, |z| arcsine_cdf(z).unwrap()).unwrap();
        assert!(r.passed(), "{route:?}: {r}");
    }
}

#[test]
fn exact_occupation_two_rays_is_arcsine() {
    let mut rng = RngStream::new(23, 0);
    let first: Vec<f64> = (0..KS)
        .map(|_| sample_occupation_exact(2, &mut rng).unwrap()[0])
        .collect();
    let r = ks_one_sample(&first, |z| arcsine_cdf(z).unwrap()).unwrap();
    assert!(r.passed(), "{r}");
}

#[test]
fn exact_occupation_is_exchangeable() {
    for n in [3u32, 5] {
        let mut a = RngStream::new(24, 0);
        let mut b = RngStream::new(24, 1);
        let first: Vec<f64> = (0..KS)
            .map(|_| sample_occupation_exact(n, &mut a).unwrap()[0])
            .collect();
        let last: Vec<f64> = (0..KS)
            .map(|_| sample_occupation_exact(n, &mut b).unwrap()[n as usize - 1])
            .collect();
        let r = ks_two_sample(&first, &last).unwrap();
        assert!(r.passed(), "n={n}: {r}");
        let r = ks_one_sample(&last, |z| spider_cdf(z, n).unwrap()).unwrap();
        assert!(r.passed(), "n={n}: {r}");
    }
}

#[test]
fn cauchy_marginal_matches_exact_first_coordinate() {
    for n in [2u32, 4, 7] {
        let mut a = RngStream::new(25, 0);
        let exact: Vec<f64> = (0..KS)
            .map(|_| sample_occupation_exact(n, &mut a).unwrap()[0])
            .collect();
        let marginal = draws(25, 1, KS, |rng| sample_cauchy_spider_marginal(n, rng).unwrap());
        assert!(marginal.iter().all(|&z| z > 0.0 && z <= 1.0));
        let r = ks_two_sample(&exact, &marginal).unwrap();
        assert!(r.passed(), "n={n}: {r}");
    }
}

#[test]
fn distinct_streams_are_uncorrelated() {
    let m = 200_000;
    let a = draws(26, 0, m, |rng| rng.open01());
    let b = draws(26, 1, m, |rng| rng.open01());
    let (ma, mb) = (a.iter().sum::<f64>() / m as f64, b.iter().sum::<f64>() / m as f64);
    let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / m as f64;
    let corr = cov / (1.0 / 12.0);
    // Under independence sqrt(m) * corr is approximately standard normal.
    assert!(corr.abs() * (m as f64).sqrt() < 4.0, "corr={corr}");
}

#[test]
fn batches_are_reproducible_and_simplex_valued() {
    let law = SampleLaw::OccupationExact { n: 3 };
    let a = sample_batch(law, 1000, 42, 4).unwrap();
    let b = sample_batch(law, 1000, 42, 4).unwrap();
    assert_eq!(a.values, b.values);
    assert_eq!(a.n_samples(), 1000);
    for row in a.rows() {
        assert_eq!(row.len(), 3);
        assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
    assert!(sample_batch(law, 0, 42, 4).is_err());
    assert!(sample_batch(SampleLaw::RatioA { mu: 1.0 }, 10, 42, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn same_seed_same_draws(seed in any::<u64>(), stream in 0u64..1000, mu in 0.05f64..0.95) {
        let p = params(mu);
        let a = draws(seed, stream, 16, |rng| sample_positive_stable(p, rng));
        let b = draws(seed, stream, 16, |rng| sample_positive_stable(p, rng));
        prop_assert_eq!(a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
                        b.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        prop_assert!(a.iter().all(|&x| x > 0.0 && x.is_finite()));
    }

    #[test]
    fn ratio_a_draws_stay_inside(seed in any::<u64>(), mu in 0.05f64..0.95) {
        let p = params(mu);
        let v = draws(seed, 0, 64, |rng| sample_ratio_a(p, rng));
        prop_assert!(v.iter().all(|&z| z > 0.0 && z < 1.0));
    }

    #[test]
    fn exact_occupation_is_a_simplex(seed in any::<u64>(), n in 2u32..12) {
        let mut rng = RngStream::new(seed, 0);
        for _ in 0..16 {
            let v = sample_occupation_exact(n, &mut rng).unwrap();
            prop_assert_eq!(v.len(), n as usize);
            prop_assert!(v.as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
            prop_assert!((v.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn stable_params_reject_outside_unit_interval(mu in prop_oneof![-5.0f64..=0.0, 1.0f64..5.0]) {
        prop_assert!(StableParams::new(mu).is_err());
    }
}

#[test]
fn ratio_a_fits_its_cdf() {
    // Below mu = 0.25 a visible share of the law sits within 2^-53 of 1,
    // where doubles cannot follow it.
    for (i, mu) in [0.25, 0.4, 0.75].into_iter().enumerate() {
        let a = draws(27, i as u64, KS, |rng| sample_ratio_a(params(mu), rng));
        let r = ks_one_sample(&a, |z| spider_core::closed_form::ratio_a_cdf(z, mu).unwrap()).unwrap();
        assert!(r.passed(), "mu={mu}: {r}");
    }
}
