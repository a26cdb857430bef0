//! Acceptance run: ten criteria, one PASS/FAIL line each, nonzero exit if any
//! fails. Every seeded check uses `ACCEPTANCE_SEED`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use spider_cli::{main_with, EXIT_OK};
use spider_core::closed_form::{arcsine_pdf, expectation, integrate_density, LawSpec};
use spider_core::verify::*;

type Check = fn() -> Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    check: Check,
}

fn all_pass(reports: &[GofReport]) -> Result<String, String> {
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.to_string())
        .collect();
    if failed.is_empty() {
        let worst = reports.iter().map(|r| r.statistic).fold(0.0, f64::max);
        Ok(format!("{} checks, largest statistic {worst:.3e}", reports.len()))
    } else {
        Err(format!(
            "{} of {} failed:\n    {}",
            failed.len(),
            reports.len(),
            failed.join("\n    ")
        ))
    }
}

fn core<T>(r: spider_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn reduction() -> Result<String, String> {
    all_pass(&core(reduction_reports())?)
}

fn normalization() -> Result<String, String> {
    let reports = core(normalization_reports())?;
    let mut wanted = vec!["arcsine".to_string()];
    wanted.extend((1..10).map(|k| LawSpec::StableRatioA { mu: k as f64 / 10.0 }.label()));
    wanted.extend((2..=10).map(|n| LawSpec::SpiderOccupation { n }.label()));
    for label in &wanted {
        if !reports
            .iter()
            .any(|r| r.test_name.ends_with(&format!(" {label}")))
        {
            return Err(format!("no normalization check for {label}"));
        }
    }
    all_pass(&reports)
}

fn means() -> Result<String, String> {
    all_pass(&core(mean_reports())?)
}

fn transforms() -> Result<String, String> {
    let reports = core(transform_suite(ACCEPTANCE_SEED, MC_SAMPLES))?;
    for kind in ["laplace", "stieltjes", "mellin", "fractional_moment"] {
        for mu in TRANSFORM_MU {
            let tag = format!("{kind} mu={mu} ");
            if !reports
                .iter()
                .any(|r| r.test_name.starts_with(&tag) && r.n1 == MC_SAMPLES)
            {
                return Err(format!("missing {tag}at {MC_SAMPLES} draws"));
            }
        }
    }
    all_pass(&reports)
}

fn exact_sampler() -> Result<String, String> {
    let reports = core(exact_sampler_suite(ACCEPTANCE_SEED, KS_SAMPLES))?;
    for n in [2, 3, 5] {
        let name = format!("vs spider_cdf n={n}");
        let r = reports
            .iter()
            .find(|r| r.test_name.ends_with(&name))
            .ok_or(format!("missing exact-sampler KS for n={n}"))?;
        if r.p_value.is_none_or(|p| p < SIGNIFICANCE) {
            return Err(r.to_string());
        }
    }
    all_pass(&reports)
}

fn stopping_rules() -> Result<String, String> {
    let mut reports = Vec::new();
    for n in [2, 3] {
        reports.extend(core(verify_theorem1(
            n,
            IDENTITY_PATHS,
            IDENTITY_STEPS,
            ACCEPTANCE_SEED,
        ))?);
    }
    all_pass(&reports)
}

fn lattice() -> Result<String, String> {
    all_pass(&core(lattice_convergence(
        3,
        LATTICE_PATHS,
        &LATTICE_STEPS,
        ACCEPTANCE_SEED,
    ))?)
}

fn levy() -> Result<String, String> {
    all_pass(&core(levy_functionals(
        LATTICE_PATHS,
        LEVY_STEPS,
        ACCEPTANCE_SEED,
    ))?)
}

fn scaling_limit() -> Result<String, String> {
    let (points, reports) = core(scaling_reports(&SCALING_N, 1000))?;
    if points.iter().map(|p| p.n).collect::<Vec<_>>() != SCALING_N {
        return Err(format!("unexpected n values {points:?}"));
    }
    let summary = all_pass(&reports)?;
    let last = points.last().expect("six points");
    Ok(format!("{summary}; distance at n=64 {:.6}", last.distance))
}

fn spider_cli(args: &[&str]) -> Result<(), String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with(
        std::iter::once("spider").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    if code == EXIT_OK {
        Ok(())
    } else {
        Err(format!(
            "spider {args:?} exited {code}: {}",
            String::from_utf8_lossy(&err)
        ))
    }
}

struct Curve {
    law: LawSpec,
    /// (z, pdf, cdf); pdf is NaN at the endpoints.
    rows: Vec<(f64, f64, f64)>,
}

fn read_curve(csv: &Path) -> Result<Curve, String> {
    let text = std::fs::read_to_string(csv).map_err(|e| format!("{}: {e}", csv.display()))?;
    let mut lines = text.lines();
    if lines.next() != Some("z,pdf,cdf") {
        return Err(format!("{}: bad header", csv.display()));
    }
    let field = |f: &str| {
        if f.is_empty() {
            Ok(f64::NAN)
        } else {
            f.parse::<f64>().map_err(|e| e.to_string())
        }
    };
    let rows = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 3 {
                return Err(format!("{}: bad row {l}", csv.display()));
            }
            Ok((field(f[0])?, field(f[1])?, field(f[2])?))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let sidecar = csv.with_extension("json");
    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(&sidecar).map_err(|e| format!("{}: {e}", sidecar.display()))?,
    )
    .map_err(|e| e.to_string())?;
    let law = serde_json::from_value(json["law"].clone()).map_err(|e| e.to_string())?;
    Ok(Curve { law, rows })
}

/// The written curve must be the closed form of the law it names, and that
/// law must integrate to one with the right mean.
fn check_curve(curve: &Curve, mean: Option<f64>) -> Result<(), String> {
    let label = curve.law.label();
    let rows = &curve.rows;
    if rows.len() < 3 || rows[0].2 != 0.0 || rows[rows.len() - 1].2 != 1.0 {
        return Err(format!("{label}: cdf must run from 0 to 1"));
    }
    for &(z, p, c) in &rows[1..rows.len() - 1] {
        let pdf: f64 = core(curve.law.pdf(z))?;
        let cdf: f64 = core(curve.law.cdf(z))?;
        if (p - pdf).abs() > REDUCTION_TOL * pdf.max(1.0) || (c - cdf).abs() > REDUCTION_TOL {
            return Err(format!("{label}: row z={z} differs from the closed form"));
        }
    }
    if rows.windows(2).any(|w| w[1].2 < w[0].2) {
        return Err(format!("{label}: cdf decreases"));
    }
    let (lo, hi) = curve.law.support();
    let total: f64 = core(integrate_density(&curve.law, lo, hi))?;
    if (total - 1.0).abs() > QUADRATURE_TOL {
        return Err(format!("{label}: integrates to {total}"));
    }
    if let Some(m) = mean {
        let got: f64 = core(expectation(&curve.law, |z| z, lo, hi))?;
        if (got - m).abs() > QUADRATURE_TOL {
            return Err(format!("{label}: mean {got}, expected {m}"));
        }
    }
    Ok(())
}

fn svg_labels(path: &Path) -> Result<Vec<String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let doc = roxmltree::Document::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(doc
        .descendants()
        .filter(|n| n.has_tag_name("path"))
        .filter_map(|n| n.attribute("data-label").map(String::from))
        .collect())
}

fn max_gap_to_arcsine(curve: &Curve) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for &(z, p, _) in &curve.rows[1..curve.rows.len() - 1] {
        worst = worst.max((p - core(arcsine_pdf(z))?).abs());
    }
    Ok(worst)
}

fn figures() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let prefix = |name: &str| dir.path().join(name);
    let file = |base: &PathBuf, suffix: &str| PathBuf::from(format!("{}{suffix}", base.display()));
    let s = |p: &PathBuf| p.to_str().expect("utf-8 temp path").to_string();

    // Defaults first, then lists wide enough to cover the density criteria.
    let (f1, f2) = (prefix("figure1"), prefix("figure2"));
    spider_cli(&["--deterministic", "figure1", "--out", &s(&f1)])?;
    spider_cli(&["--deterministic", "figure2", "--out", &s(&f2)])?;
    if svg_labels(&file(&f1, ".svg"))?.len() != 5 || svg_labels(&file(&f2, ".svg"))?.len() != 5 {
        return Err("default figures should overlay five curves".into());
    }

    let mu_list = [0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.75, 0.8, 0.9];
    let mu_arg = mu_list.map(|m| m.to_string()).join(",");
    let (w1, w2) = (prefix("wide1"), prefix("wide2"));
    spider_cli(&["--deterministic", "figure1", "--mu", &mu_arg, "--out", &s(&w1)])?;
    spider_cli(&[
        "--deterministic",
        "figure2",
        "--n",
        "2,3,4,5,6,7,8,9,10",
        "--out",
        &s(&w2),
    ])?;
    let labels = svg_labels(&file(&w1, ".svg"))?;
    if labels.len() != mu_list.len() {
        return Err(format!("figure1 svg has {} curves", labels.len()));
    }
    if svg_labels(&file(&w2, ".svg"))?.len() != 9 {
        return Err("figure2 svg should have nine curves".into());
    }

    let mut checked = 0;
    for mu in mu_list {
        let curve = read_curve(&file(&w1, &format!("_mu{mu}.csv")))?;
        let mean = [0.25, 0.5, 0.75].contains(&mu).then_some(0.5);
        check_curve(&curve, mean)?;
        checked += 1;
        if mu == 0.5 {
            let gap = max_gap_to_arcsine(&curve)?;
            if gap > REDUCTION_TOL {
                return Err(format!(
                    "figure1 mu=0.5 curve is {gap:e} from the arc-sine density"
                ));
            }
        }
    }
    let mut cdf_at_tenth = Vec::new();
    for n in 2..=10u32 {
        let curve = read_curve(&file(&w2, &format!("_n{n}.csv")))?;
        check_curve(&curve, Some(1.0 / f64::from(n)))?;
        checked += 1;
        if n == 2 {
            let gap = max_gap_to_arcsine(&curve)?;
            if gap > REDUCTION_TOL {
                return Err(format!("figure2 n=2 curve is {gap:e} from the arc-sine density"));
            }
        }
        let row = curve
            .rows
            .iter()
            .find(|r| (r.0 - 0.1).abs() < 1e-12)
            .ok_or("grid misses z = 0.1")?;
        cdf_at_tenth.push(row.2);
    }
    if cdf_at_tenth.windows(2).any(|w| w[1] <= w[0]) {
        return Err(format!("cdf(0.1) not increasing in n: {cdf_at_tenth:?}"));
    }
    Ok(format!(
        "{checked} curves match their laws; cdf(0.1) rises from {:.4} (n=2) to {:.4} (n=10)",
        cdf_at_tenth[0],
        cdf_at_tenth[cdf_at_tenth.len() - 1]
    ))
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion {
            id: 1,
            name: "reduction identities",
            limit: secs(1),
            check: reduction,
        },
        Criterion {
            id: 2,
            name: "normalization",
            limit: secs(10),
            check: normalization,
        },
        Criterion {
            id: 3,
            name: "mean identities",
            limit: None,
            check: means,
        },
        Criterion {
            id: 4,
            name: "transform suite",
            limit: secs(60),
            check: transforms,
        },
        Criterion {
            id: 5,
            name: "exact occupation sampler",
            limit: secs(30),
            check: exact_sampler,
        },
        Criterion {
            id: 6,
            name: "three stopping rules",
            limit: secs(600),
            check: stopping_rules,
        },
        Criterion {
            id: 7,
            name: "lattice convergence",
            limit: None,
            check: lattice,
        },
        Criterion {
            id: 8,
            name: "two-ray Levy functionals",
            limit: None,
            check: levy,
        },
        Criterion {
            id: 9,
            name: "large-n scaling limit",
            limit: secs(5),
            check: scaling_limit,
        },
        Criterion {
            id: 10,
            name: "figures",
            limit: None,
            check: figures,
        },
    ];
    let mut failures = 0;
    for c in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(c.check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match (result, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("PASS criterion {:>2} {} ({elapsed:.2?}): {detail}", c.id, c.name),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {:>2} {} ({elapsed:.2?}): {detail}", c.id, c.name);
            }
        }
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
