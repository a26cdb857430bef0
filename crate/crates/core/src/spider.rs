//! Lattice random walk on `n` half-lines glued at the origin.
//!
//! Away from the origin the radial coordinate moves +1 or -1 with probability
//! 1/2. From the origin the walk steps to distance 1 on a ray chosen
//! uniformly. A step is charged to the ray it is taken on, so a step out of
//! the origin counts for the newly chosen ray and occupation counts always
//! sum to the number of steps.
//!
//! Steps are driven by single random bits. While the walker is at distance
//! `d >= k` the next `k` steps cannot reach the origin, so they are taken in
//! one go from the popcount of `k` bits (`k` in 64, 32, 16, 8). This reads
//! the bit stream in the same order as stepping one bit at a time, so a path
//! does not depend on the block schedule.

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::RngStream;
use crate::sampler::SimplexVector;

/// Walk length below which statistical outputs are refused.
pub const MIN_STATISTICAL_STEPS: u64 = 1000;

/// Target fraction of paths allowed to hit the step cap under the default cap.
pub const DEFAULT_DISCARD_TARGET: f64 = 0.005;

/// Parameters of a batch of lattice walks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpiderConfig {
    /// Number of rays.
    pub n: u32,
    /// Lattice steps per unit of continuum time.
    pub steps: u64,
    /// Monte-Carlo replications.
    pub paths: usize,
    pub seed: u64,
    /// Step cap for random stopping rules, as a multiple of the rule's level
    /// horizon. `None` picks a cap that keeps discards near 0.5%.
    pub cap_factor: Option<f64>,
    short_walks: bool,
}

impl SpiderConfig {
    pub fn new(n: u32, steps: u64, paths: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            n,
            steps,
            paths,
            seed,
            cap_factor: None,
            short_walks: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Lifts the `steps >= 1000` floor, for unit-scale checks.
    pub fn allow_short_walks(mut self) -> Self {
        self.short_walks = true;
        self
    }

    pub fn with_cap_factor(mut self, factor: f64) -> Self {
        self.cap_factor = Some(factor);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return domain("n", 0.0, "n >= 1");
        }
        let floor = if self.short_walks {
            1
        } else {
            MIN_STATISTICAL_STEPS
        };
        if self.steps < floor {
            return Err(Error::Usage(format!(
                "steps = {} is below the minimum {floor}",
                self.steps
            )));
        }
        if self.paths == 0 {
            return Err(Error::Usage("paths must be positive".into()));
        }
        if let Some(f) = self.cap_factor {
            if !(f >= 1.0 && f.is_finite()) {
                return domain("cap_factor", f, "[1, inf)");
            }
        }
        Ok(())
    }
}

/// When to stop a walk. Levels are in continuum units; `steps` converts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum StoppingRule {
    /// Stop after `t * steps` steps.
    FixedTime { t: f64 },
    /// Stop at the first step where the occupation count of `ray`
    /// (1-based) exceeds `level * steps`.
    InverseOccupation { ray: u32, level: f64 },
    /// Stop at the first step where the number of visits to the origin
    /// exceeds `level * sqrt(steps)`.
    InverseLocalTime { level: f64 },
}

impl StoppingRule {
    pub fn name(&self) -> &'static str {
        match self {
            Self::FixedTime { .. } => "fixed_time",
            Self::InverseOccupation { .. } => "inverse_occupation",
            Self::InverseLocalTime { .. } => "inverse_local_time",
        }
    }

    fn validate(&self, n: u32) -> Result<()> {
        match *self {
            Self::FixedTime { t } if !(t > 0.0 && t.is_finite()) => domain("t", t, "(0, inf)"),
            Self::InverseOccupation { ray, .. } if ray == 0 || ray > n => {
                domain("ray", f64::from(ray), "[1, n]")
            }
            Self::InverseOccupation { level, .. } | Self::InverseLocalTime { level }
                if !(level > 0.0 && level.is_finite()) =>
            {
                domain("level", level, "(0, inf)")
            }
            _ => Ok(()),
        }
    }

    fn goal(&self, steps: u64) -> Result<Goal> {
        let scale = steps as f64;
        Ok(match *self {
            Self::FixedTime { t } => {
                let end = (t * scale).round() as u64;
                if end == 0 {
                    return Err(Error::Usage(format!("t * steps rounds to zero (t = {t})")));
                }
                Goal::Time(end)
            }
            Self::InverseOccupation { ray, level } => Goal::RayCount {
                ray: (ray - 1) as usize,
                reach: (level * scale).floor() as u64 + 1,
            },
            Self::InverseLocalTime { level } => {
                let reach = (level * scale.sqrt()).floor() as u64 + 1;
                if reach < 2 {
                    return Err(Error::Usage(format!(
                        "local-time level {level} is below one visit at {steps} steps"
                    )));
                }
                Goal::ZeroVisits { reach }
            }
        })
    }

    /// Default cap as a multiple of the level horizon, chosen so that about
    /// `DEFAULT_DISCARD_TARGET` of paths breach it under the continuum law.
    ///
    /// * inverse occupation: `alpha_s > K s` iff the ray's occupation
    ///   fraction at time `K s` is below `1/K`; that fraction has the spider
    ///   law, whose CDF inverts in closed form.
    /// * inverse local time: `tau_l > K l^2` iff `|Z| < 1/sqrt(K)` for a
    ///   standard normal `Z`; for small targets `P ~ sqrt(2/pi)/sqrt(K)`.
    pub fn default_cap_factor(&self, n: u32) -> f64 {
        let p = DEFAULT_DISCARD_TARGET;
        match self {
            Self::FixedTime { .. } => 1.0,
            Self::InverseOccupation { .. } => {
                let r = (std::f64::consts::FRAC_PI_2 * p).tan() / f64::from(n.max(2) - 1);
                let z = r * r / (1.0 + r * r);
                1.0 / z
            }
            Self::InverseLocalTime { .. } => {
                let x = p * std::f64::consts::FRAC_PI_2.sqrt();
                1.0 / (x * x)
            }
        }
        .ceil()
    }
}

#[derive(Clone, Copy, Debug)]
enum Goal {
    Time(u64),
    RayCount { ray: usize, reach: u64 },
    ZeroVisits { reach: u64 },
}

/// What a walk leaves behind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpiderPathSummary {
    pub occupation_counts: Vec<u64>,
    /// Visits to the origin, counting the start.
    pub zero_visits: u64,
    /// Last step index at which the walk sat at the origin.
    pub last_zero_step: u64,
    /// 1-based ray of the current (or last) excursion.
    pub final_ray: u32,
    pub final_distance: u64,
}

impl SpiderPathSummary {
    pub fn steps(&self) -> u64 {
        self.occupation_counts.iter().sum()
    }
}

/// Buffered random bits, consumed low bit first.
#[derive(Default)]
struct Bits {
    word: u64,
    left: u32,
}

#[inline]
fn low_mask(k: u32) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

#[inline]
fn shr(x: u64, k: u32) -> u64 {
    if k >= 64 {
        0
    } else {
        x >> k
    }
}

impl Bits {
    #[inline]
    fn take<R: RngCore>(&mut self, k: u32, rng: &mut R) -> u64 {
        if self.left >= k {
            let v = self.word & low_mask(k);
            self.word = shr(self.word, k);
            self.left -= k;
            v
        } else {
            let have = self.left;
            let low = self.word & low_mask(have);
            let fresh = rng.next_u64();
            let need = k - have;
            let high = fresh & low_mask(need);
            self.word = shr(fresh, need);
            self.left = 64 - need;
            low | (high << have)
        }
    }
}

struct Walker {
    n: u32,
    ray: usize,
    dist: u64,
    time: u64,
    counts: Vec<u64>,
    zero_visits: u64,
    last_zero: u64,
    bits: Bits,
}

impl Walker {
    fn new(n: u32) -> Self {
        Self {
            n,
            ray: 0,
            dist: 0,
            time: 0,
            counts: vec![0; n as usize],
            zero_visits: 1,
            last_zero: 0,
            bits: Bits::default(),
        }
    }

    #[inline]
    fn reached(&self, goal: Goal) -> bool {
        match goal {
            Goal::Time(end) => self.time >= end,
            Goal::RayCount { ray, reach } => self.counts[ray] >= reach,
            Goal::ZeroVisits { reach } => self.zero_visits >= reach,
        }
    }

    #[inline]
    fn leave_origin(&mut self, rng: &mut RngStream) {
        if self.n > 1 {
            self.ray = rng.random_range(0..self.n) as usize;
        }
        self.dist = 1;
        self.counts[self.ray] += 1;
        self.time += 1;
    }

    /// `k` steps on the current ray driven by `k` bits; needs `dist >= k`
    /// unless `k == 1`.
    #[inline]
    fn block(&mut self, k: u32, rng: &mut RngStream) {
        let up = u64::from(self.bits.take(k, rng).count_ones());
        self.dist = self.dist + 2 * up - u64::from(k);
        self.counts[self.ray] += u64::from(k);
        self.time += u64::from(k);
        if self.dist == 0 {
            self.zero_visits += 1;
            self.last_zero = self.time;
        }
    }

    /// Walks until `goal` holds (true) or `cap` steps have elapsed (false).
    fn run(&mut self, goal: Goal, cap: u64, rng: &mut RngStream) -> bool {
        loop {
            if self.reached(goal) {
                return true;
            }
            if self.time >= cap {
                return false;
            }
            if self.dist == 0 {
                self.leave_origin(rng);
                continue;
            }
            let mut budget = cap - self.time;
            match goal {
                Goal::Time(end) => budget = budget.min(end - self.time),
                Goal::RayCount { ray, reach } if ray == self.ray => {
                    budget = budget.min(reach - self.counts[ray]);
                }
                _ => {}
            }
            let room = self.dist.min(budget);
            let k = if room >= 64 {
                64
            } else if room >= 32 {
                32
            } else if room >= 16 {
                16
            } else if room >= 8 {
                8
            } else {
                1
            };
            self.block(k, rng);
        }
    }

    fn summary(self) -> SpiderPathSummary {
        SpiderPathSummary {
            occupation_counts: self.counts,
            zero_visits: self.zero_visits,
            last_zero_step: self.last_zero,
            final_ray: self.ray as u32 + 1,
            final_distance: self.dist,
        }
    }
}

/// Runs one walk of `config.steps` steps.
pub fn simulate_path(config: &SpiderConfig, rng: &mut RngStream) -> SpiderPathSummary {
    let mut w = Walker::new(config.n);
    w.run(Goal::Time(config.steps), config.steps, rng);
    w.summary()
}

/// Occupation counts divided by the number of steps.
pub fn occupation_fraction(summary: &SpiderPathSummary) -> Result<SimplexVector> {
    let steps = summary.steps();
    if steps == 0 {
        return Err(Error::Usage("walk has no steps".into()));
    }
    let total = steps as f64;
    SimplexVector::new(
        summary
            .occupation_counts
            .iter()
            .map(|&c| c as f64 / total)
            .collect(),
    )
}

/// Fraction of the walk elapsed at the last visit to the origin.
pub fn last_zero_fraction(summary: &SpiderPathSummary) -> f64 {
    let steps = summary.steps();
    if steps == 0 {
        return 0.0;
    }
    summary.last_zero_step as f64 / steps as f64
}

/// Visits to the origin over `sqrt(steps)`; proportional to the local time
/// at the origin with an uncalibrated constant.
pub fn local_time_proxy(summary: &SpiderPathSummary) -> f64 {
    let steps = summary.steps();
    if steps == 0 {
        return 0.0;
    }
    summary.zero_visits as f64 / (steps as f64).sqrt()
}

/// Result of running one walk under a stopping rule.
#[derive(Clone, Debug, PartialEq)]
pub enum Stopped {
    Hit {
        fractions: SimplexVector,
        stopped_step: u64,
        summary: SpiderPathSummary,
    },
    /// The step cap was reached first; the path is dropped from statistics.
    Discarded { cap: u64, summary: SpiderPathSummary },
}

impl Stopped {
    pub fn fractions(&self) -> Option<&SimplexVector> {
        match self {
            Self::Hit { fractions, .. } => Some(fractions),
            Self::Discarded { .. } => None,
        }
    }

    pub fn summary(&self) -> &SpiderPathSummary {
        match self {
            Self::Hit { summary, .. } | Self::Discarded { summary, .. } => summary,
        }
    }

    pub fn is_discarded(&self) -> bool {
        matches!(self, Self::Discarded { .. })
    }
}

/// Step cap for `rule` under `config`.
pub fn step_cap(config: &SpiderConfig, rule: &StoppingRule) -> Result<u64> {
    let factor = config
        .cap_factor
        .unwrap_or_else(|| rule.default_cap_factor(config.n));
    let n = config.steps as f64;
    let horizon = match *rule {
        StoppingRule::FixedTime { t } => return Ok((t * n).round() as u64),
        StoppingRule::InverseOccupation { level, .. } => level * n,
        StoppingRule::InverseLocalTime { level } => level * level * n,
    };
    let cap = (factor * horizon).ceil();
    if cap >= u64::MAX as f64 {
        return Err(Error::Usage(format!("step cap {cap} overflows")));
    }
    Ok(cap as u64)
}

/// Walks until `rule` fires and returns the occupation fractions at that step.
pub fn stop_at(config: &SpiderConfig, rule: &StoppingRule, rng: &mut RngStream) -> Result<Stopped> {
    config.validate()?;
    if config.n < 2 {
        return domain("n", f64::from(config.n), "n >= 2");
    }
    rule.validate(config.n)?;
    let goal = rule.goal(config.steps)?;
    let cap = step_cap(config, rule)?;
    let mut w = Walker::new(config.n);
    let hit = w.run(goal, cap, rng);
    let summary = w.summary();
    if !hit {
        return Ok(Stopped::Discarded { cap, summary });
    }
    Ok(Stopped::Hit {
        fractions: occupation_fraction(&summary)?,
        stopped_step: summary.steps(),
        summary,
    })
}

/// `config.paths` walks of `config.steps` steps; path `i` uses stream `i`.
pub fn simulate_batch(config: &SpiderConfig) -> Result<Vec<SpiderPathSummary>> {
    config.validate()?;
    Ok((0..config.paths as u64)
        .into_par_iter()
        .map(|i| simulate_path(config, &mut RngStream::new(config.seed, i)))
        .collect())
}

/// Outcome of a batch of stopped walks.
#[derive(Clone, Debug)]
pub struct StopBatch {
    pub rule: StoppingRule,
    pub cap: u64,
    pub paths: Vec<Stopped>,
}

impl StopBatch {
    pub fn discarded(&self) -> usize {
        self.paths.iter().filter(|p| p.is_discarded()).count()
    }

    pub fn discard_rate(&self) -> f64 {
        self.discarded() as f64 / self.paths.len().max(1) as f64
    }

    /// Coordinate `j` (0-based) of every retained path.
    pub fn coordinate(&self, j: usize) -> Vec<f64> {
        self.paths
            .iter()
            .filter_map(|p| p.fractions().map(|f| f[j]))
            .collect()
    }

    /// Sum of coordinates in `range` for every retained path.
    pub fn coordinate_sum(&self, range: std::ops::Range<usize>) -> Vec<f64> {
        self.paths
            .iter()
            .filter_map(|p| p.fractions().map(|f| f.as_slice()[range.clone()].iter().sum()))
            .collect()
    }
}

/// `config.paths` stopped walks; path `i` uses stream `i`.
pub fn stop_batch(config: &SpiderConfig, rule: StoppingRule) -> Result<StopBatch> {
    config.validate()?;
    let cap = step_cap(config, &rule)?;
    let paths = (0..config.paths as u64)
        .into_par_iter()
        .map(|i| stop_at(config, &rule, &mut RngStream::new(config.seed, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(StopBatch { rule, cap, paths })
}
