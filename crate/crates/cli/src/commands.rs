use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use spider_core::closed_form::{DensityCurve, LawSpec};
use spider_core::export::{
    write_batch_csv, write_batch_sidecar, write_curve_csv, write_curve_sidecar, write_stop_batch_csv,
};
use spider_core::sampler::{sample_batch, ArcsineRoute, SampleLaw};
use spider_core::spider::{stop_batch, SpiderConfig, StoppingRule};
use spider_core::verify::{
    density_suite, identity_rules, occupation_suite, scaling_reports, summarize, transform_suite,
    ConvergencePoint, GofReport, MC_SAMPLES, SCALING_N,
};

use crate::args::{
    DensityArgs, Figure1Args, Figure2Args, LawName, Route, RuleName, SampleArgs, SimulateArgs, Suite,
    VerifyArgs,
};
use crate::error::{CliError, CliResult};
use crate::manifest::{io_error, now, RunManifest};
use crate::svg::{nice_ceiling, Plot, Series};

/// Figure defaults; the source figures do not list their parameter values.
pub const FIGURE1_MU: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];
pub const FIGURE2_N: [u32; 5] = [2, 3, 4, 5, 8];
pub const SCALING_GRID: usize = 1000;

#[derive(Clone, Copy, Debug)]
pub struct Context {
    pub seed: u64,
    pub deterministic: bool,
}

impl Context {
    fn manifest(&self, command: &str) -> RunManifest {
        RunManifest::new(command, self.seed, self.deterministic)
    }
}

/// What a command leaves for the caller to report.
#[derive(Debug)]
pub struct Outcome {
    /// The manifest and where it was written.
    pub manifest: Option<(RunManifest, PathBuf)>,
    pub reports: Vec<GofReport>,
}

impl Outcome {
    fn written(manifest: RunManifest, path: PathBuf) -> CliResult<Self> {
        Ok(Self {
            manifest: Some((manifest.finish(&path)?, path)),
            reports: Vec::new(),
        })
    }

    pub fn failures(&self) -> Vec<&GofReport> {
        self.reports.iter().filter(|r| !r.passed()).collect()
    }
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(base.as_os_str());
    s.push(suffix);
    PathBuf::from(s)
}

fn ensure_parent(path: &Path) -> CliResult<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(CliError::usage(format!(
            "output directory {} does not exist",
            dir.display()
        ))),
        _ => Ok(()),
    }
}

/// Maps I/O failures inside the core writers onto the path being written.
fn at<T>(path: &Path, r: spider_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| match e {
        spider_core::Error::Io(source) => io_error(path, source),
        other => CliError::Core(other),
    })
}

fn csv_and_json(out: &Path) -> CliResult<(PathBuf, PathBuf)> {
    if out.extension().is_some_and(|e| e == "json") {
        return Err(CliError::usage(
            "--out names the CSV file; the JSON files are derived from it",
        ));
    }
    ensure_parent(out)?;
    Ok((out.with_extension("json"), out.with_extension("manifest.json")))
}

fn need<T>(value: Option<T>, flag: &str, law: LawName) -> CliResult<T> {
    value.ok_or_else(|| CliError::usage(format!("--{flag} is required for {law:?}")))
}

fn refuse<T>(value: Option<T>, flag: &str, law: LawName) -> CliResult<()> {
    match value {
        Some(_) => Err(CliError::usage(format!("--{flag} does not apply to {law:?}"))),
        None => Ok(()),
    }
}

fn sample_law(law: LawName, mu: Option<f64>, n: Option<u32>, route: Route) -> CliResult<SampleLaw> {
    use LawName as L;
    let uses_mu = matches!(
        law,
        L::StableRatioA | L::StableRatioPower | L::PositiveStable | L::CMu
    );
    let uses_n = matches!(law, L::SpiderOccupation | L::CauchyMarginal);
    if !uses_mu {
        refuse(mu, "mu", law)?;
    }
    if !uses_n {
        refuse(n, "n", law)?;
    }
    let out = match law {
        L::ArcSine => SampleLaw::Arcsine {
            route: match route {
                Route::NormalRatio => ArcsineRoute::NormalRatio,
                Route::CosSquared => ArcsineRoute::CosSquared,
                Route::StableRatio => ArcsineRoute::StableRatio,
                Route::Cauchy => ArcsineRoute::Cauchy,
            },
        },
        L::StableRatioA => SampleLaw::RatioA {
            mu: need(mu, "mu", law)?,
        },
        L::StableRatioPower => SampleLaw::RatioPower {
            mu: need(mu, "mu", law)?,
        },
        L::PositiveStable => SampleLaw::PositiveStable {
            mu: need(mu, "mu", law)?,
        },
        L::CMu => SampleLaw::CMu {
            mu: need(mu, "mu", law)?,
        },
        L::StableHalf => SampleLaw::StableHalf,
        L::SpiderOccupation => SampleLaw::OccupationExact {
            n: need(n, "n", law)?,
        },
        L::CauchyMarginal => SampleLaw::CauchySpiderMarginal {
            n: need(n, "n", law)?,
        },
    };
    out.validate()?;
    Ok(out)
}

fn density_law(law: LawName, mu: Option<f64>, n: Option<u32>) -> CliResult<LawSpec> {
    use LawName as L;
    let out = match law {
        L::ArcSine => {
            refuse(mu, "mu", law)?;
            refuse(n, "n", law)?;
            LawSpec::ArcSine
        }
        L::StableRatioA | L::StableRatioPower => {
            refuse(n, "n", law)?;
            let mu = need(mu, "mu", law)?;
            if law == L::StableRatioA {
                LawSpec::stable_ratio_a(mu)?
            } else {
                LawSpec::stable_ratio_power(mu)?
            }
        }
        L::SpiderOccupation => {
            refuse(mu, "mu", law)?;
            LawSpec::spider_occupation(need(n, "n", law)?)?
        }
        other => {
            return Err(CliError::usage(format!(
                "no closed-form density for {other:?}; use arc-sine, stable-ratio-a, stable-ratio-power or spider-occupation"
            )))
        }
    };
    Ok(out)
}

pub fn sample(ctx: Context, args: &SampleArgs) -> CliResult<Outcome> {
    if args.count == 0 {
        return Err(CliError::usage("--count must be positive"));
    }
    if args.streams == 0 {
        return Err(CliError::usage("--streams must be positive"));
    }
    let law = sample_law(args.law, args.mu, args.n, args.route)?;
    let (sidecar, manifest_path) = csv_and_json(&args.out)?;
    let mut m = ctx.manifest("sample");
    m.param("law", law)
        .param("count", args.count)
        .param("streams", args.streams);
    let batch = sample_batch(law, args.count, ctx.seed, args.streams)?;
    at(&args.out, write_batch_csv(&batch, &args.out))?;
    at(&sidecar, write_batch_sidecar(&batch, &sidecar))?;
    m.param("redraw_count", batch.redraw_count);
    m.output(&args.out);
    m.output(&sidecar);
    Outcome::written(m, manifest_path)
}

fn rule(args: &SimulateArgs) -> StoppingRule {
    let [fixed, occupation, local] = identity_rules(args.n.max(2));
    match (args.rule, args.level) {
        (RuleName::FixedTime, None) => fixed,
        (RuleName::FixedTime, Some(t)) => StoppingRule::FixedTime { t },
        (RuleName::InverseOccupation, level) => StoppingRule::InverseOccupation {
            ray: args.ray,
            level: level.unwrap_or(match occupation {
                StoppingRule::InverseOccupation { level, .. } => level,
                _ => unreachable!("second identity rule is inverse occupation"),
            }),
        },
        (RuleName::InverseLocalTime, None) => local,
        (RuleName::InverseLocalTime, Some(level)) => StoppingRule::InverseLocalTime { level },
    }
}

pub fn simulate(ctx: Context, args: &SimulateArgs) -> CliResult<Outcome> {
    if args.n < 2 {
        return Err(CliError::usage("--n must be at least 2"));
    }
    let mut config = SpiderConfig::new(args.n, args.steps, args.paths, ctx.seed)?;
    if let Some(f) = args.cap_factor {
        config = config.with_cap_factor(f);
        config.validate()?;
    }
    let rule = rule(args);
    let (_, manifest_path) = csv_and_json(&args.out)?;
    let mut m = ctx.manifest("simulate");
    m.param("n", args.n)
        .param("steps", args.steps)
        .param("paths", args.paths)
        .param("rule", rule)
        .param("cap_factor", config.cap_factor);
    let batch = stop_batch(&config, rule)?;
    at(&args.out, write_stop_batch_csv(&config, &batch, &args.out))?;
    m.param("step_cap", batch.cap)
        .param("discarded", batch.discarded())
        .param("discard_rate", batch.discard_rate());
    m.output(&args.out);
    Outcome::written(m, manifest_path)
}

pub fn density(ctx: Context, args: &DensityArgs) -> CliResult<Outcome> {
    let law = density_law(args.law, args.mu, args.n)?;
    let (sidecar, manifest_path) = csv_and_json(&args.out)?;
    let mut m = ctx.manifest("density");
    m.param("law", law).param("grid", args.grid);
    let curve = DensityCurve::<f64>::tabulate(law, args.grid)?;
    at(&args.out, write_curve_csv(&curve, &args.out))?;
    at(&sidecar, write_curve_sidecar(&curve, &sidecar))?;
    m.output(&args.out);
    m.output(&sidecar);
    Outcome::written(m, manifest_path)
}

struct Figure<'a> {
    title: &'a str,
    y_label: &'a str,
    prefix: &'a Path,
    grid: usize,
    /// File tag and law for each curve.
    curves: Vec<(String, LawSpec)>,
}

fn figure(ctx: Context, fig: Figure<'_>, m: &mut RunManifest) -> CliResult<()> {
    ensure_parent(fig.prefix)?;
    let mut series = Vec::new();
    let mut y_top: f64 = 0.0;
    for (tag, law) in &fig.curves {
        let curve = DensityCurve::<f64>::tabulate(*law, fig.grid)?;
        let csv = with_suffix(fig.prefix, &format!("_{tag}.csv"));
        let sidecar = with_suffix(fig.prefix, &format!("_{tag}.json"));
        at(&csv, write_curve_csv(&curve, &csv))?;
        at(&sidecar, write_curve_sidecar(&curve, &sidecar))?;
        m.output(&csv);
        m.output(&sidecar);
        let points: Vec<(f64, f64)> = curve.interior().collect();
        y_top = points
            .iter()
            .filter(|(z, _)| (0.05..=0.95).contains(z))
            .fold(y_top, |acc, &(_, p)| acc.max(p));
        series.push(Series {
            label: law.label(),
            points,
        });
    }
    let stamp = (!ctx.deterministic).then(now);
    let svg = Plot {
        title: fig.title,
        x_label: "z",
        y_label: fig.y_label,
        x_range: (0.0, 1.0),
        y_range: (0.0, nice_ceiling(1.1 * y_top)),
        series: &series,
        timestamp: stamp.as_deref(),
    }
    .render();
    let svg_path = with_suffix(fig.prefix, ".svg");
    std::fs::write(&svg_path, svg).map_err(|e| io_error(&svg_path, e))?;
    m.output(&svg_path);
    m.param("grid", fig.grid);
    Ok(())
}

pub fn figure1(ctx: Context, args: &Figure1Args) -> CliResult<Outcome> {
    if args.mu.is_empty() {
        return Err(CliError::usage("--mu needs at least one value"));
    }
    let curves = args
        .mu
        .iter()
        .map(|&mu| Ok((format!("mu{mu}"), LawSpec::stable_ratio_a(mu)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let mut m = ctx.manifest("figure1");
    m.param("mu", &args.mu)
        .param("mu_is_default", args.mu == FIGURE1_MU);
    let fig = Figure {
        title: "Density of the stable ratio A",
        y_label: "density",
        prefix: &args.out,
        grid: args.grid,
        curves,
    };
    figure(ctx, fig, &mut m)?;
    Outcome::written(m, with_suffix(&args.out, ".manifest.json"))
}

pub fn figure2(ctx: Context, args: &Figure2Args) -> CliResult<Outcome> {
    if args.n.is_empty() {
        return Err(CliError::usage("--n needs at least one value"));
    }
    let curves = args
        .n
        .iter()
        .map(|&n| Ok((format!("n{n}"), LawSpec::spider_occupation(n)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let mut m = ctx.manifest("figure2");
    m.param("n", &args.n).param("n_is_default", args.n == FIGURE2_N);
    let fig = Figure {
        title: "Density of the ray-1 occupation fraction",
        y_label: "density",
        prefix: &args.out,
        grid: args.grid,
        curves,
    };
    figure(ctx, fig, &mut m)?;
    Outcome::written(m, with_suffix(&args.out, ".manifest.json"))
}

fn run_suite(
    suite: Suite,
    seed: u64,
    count: usize,
    grid: usize,
) -> CliResult<(Vec<GofReport>, Vec<ConvergencePoint>)> {
    let mut reports = Vec::new();
    let mut points = Vec::new();
    if matches!(suite, Suite::Densities | Suite::All) {
        reports.extend(density_suite()?);
    }
    if matches!(suite, Suite::Transforms | Suite::All) {
        reports.extend(transform_suite(seed, count)?);
    }
    if matches!(suite, Suite::Corollary | Suite::All) {
        let (p, r) = scaling_reports(&SCALING_N, grid)?;
        points = p;
        reports.extend(r);
    }
    if matches!(suite, Suite::Theorem1 | Suite::All) {
        reports.extend(occupation_suite(seed)?);
    }
    Ok((reports, points))
}

pub fn verify(ctx: Context, args: &VerifyArgs, stdout: &mut (dyn Write + Send)) -> CliResult<Outcome> {
    let count = args.count.unwrap_or(MC_SAMPLES);
    let grid = args.grid.unwrap_or(SCALING_GRID);
    if let Some(out) = &args.out {
        ensure_parent(out)?;
    }
    let mut m = ctx.manifest("verify");
    m.param("suite", format!("{:?}", args.suite).to_lowercase())
        .param("mc_samples", count)
        .param("scaling_grid", grid);
    let (reports, points) = run_suite(args.suite, ctx.seed, count, grid)?;
    summarize(&mut &mut *stdout, &reports).map_err(|e| io_error(Path::new("<stdout>"), e))?;
    let manifest = match &args.out {
        None => None,
        Some(out) => {
            let mut lines = String::new();
            for r in &reports {
                lines.push_str(&r.to_json_line());
                lines.push('\n');
            }
            std::fs::write(out, lines).map_err(|e| io_error(out, e))?;
            m.output(out);
            if !points.is_empty() {
                let path = out.with_extension("scaling.csv");
                let mut text = String::from("n,distance\n");
                for p in &points {
                    text.push_str(&format!("{},{}\n", p.n, p.distance));
                }
                std::fs::write(&path, text).map_err(|e| io_error(&path, e))?;
                m.output(&path);
            }
            m.param("failures", reports.iter().filter(|r| !r.passed()).count());
            let path = out.with_extension("manifest.json");
            Some((m.finish(&path)?, path))
        }
    };
    Ok(Outcome { manifest, reports })
}
