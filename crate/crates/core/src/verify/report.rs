use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// The pre-registered bound a report is judged against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Threshold {
    /// Pass iff `p_value >= alpha`.
    MinPValue { alpha: f64 },
    /// Pass iff `statistic <= bound`.
    MaxStatistic { bound: f64 },
    /// Pass iff `statistic <= k`, the statistic being a count of standard errors.
    MaxStandardErrors { k: f64 },
}

impl Threshold {
    pub fn judge(&self, statistic: f64, p_value: Option<f64>) -> Verdict {
        let ok = match *self {
            Self::MinPValue { alpha } => p_value.is_some_and(|p| p >= alpha),
            Self::MaxStatistic { bound } => statistic <= bound,
            Self::MaxStandardErrors { k } => statistic <= k,
        };
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Outcome of one goodness-of-fit, transform or identity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub test_name: String,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub n1: usize,
    pub n2: Option<usize>,
    pub seed: Option<u64>,
    pub threshold: Threshold,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl GofReport {
    pub fn new(
        test_name: impl Into<String>,
        statistic: f64,
        p_value: Option<f64>,
        n1: usize,
        n2: Option<usize>,
        threshold: Threshold,
    ) -> Self {
        Self {
            test_name: test_name.into(),
            statistic,
            p_value,
            n1,
            n2,
            seed: None,
            threshold,
            verdict: threshold.judge(statistic, p_value),
            note: None,
        }
    }

    /// A deterministic check: `error <= bound` over `points` evaluations.
    pub fn deterministic(test_name: impl Into<String>, error: f64, points: usize, bound: f64) -> Self {
        Self::new(
            test_name,
            error,
            None,
            points,
            None,
            Threshold::MaxStatistic { bound },
        )
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.test_name = name.into();
        self
    }

    pub fn with_threshold(mut self, threshold: Threshold) -> Self {
        self.threshold = threshold;
        self.verdict = threshold.judge(self.statistic, self.p_value);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// One JSON object, no trailing newline.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

impl fmt::Display for GofReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        };
        let bound = match self.threshold {
            Threshold::MinPValue { alpha } => format!("p >= {alpha}"),
            Threshold::MaxStatistic { bound } => format!("stat <= {bound:e}"),
            Threshold::MaxStandardErrors { k } => format!("|z| <= {k}"),
        };
        write!(
            f,
            "{verdict}  {:<56} stat={:<12.6e}",
            self.test_name, self.statistic
        )?;
        match self.p_value {
            Some(p) => write!(f, " p={p:<10.4e}")?,
            None => write!(f, " {:<12}", "")?,
        }
        write!(f, " [{bound}]")
    }
}

/// Prints a summary table; returns the number of failures.
pub fn summarize<'a, W: std::io::Write>(
    out: &mut W,
    reports: impl IntoIterator<Item = &'a GofReport>,
) -> std::io::Result<usize> {
    let mut failures = 0;
    let mut total = 0;
    for r in reports {
        total += 1;
        if !r.passed() {
            failures += 1;
        }
        writeln!(out, "{r}")?;
    }
    writeln!(
        out,
        "{} checks, {} passed, {failures} failed",
        total,
        total - failures
    )?;
    Ok(failures)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_is_a_function_of_statistic_and_threshold() {
        let r = GofReport::new(
            "x",
            0.02,
            Some(0.5),
            10,
            None,
            Threshold::MaxStatistic { bound: 0.03 },
        );
        assert!(r.passed());
        let r = r.with_threshold(Threshold::MaxStatistic { bound: 0.01 });
        assert!(!r.passed());
        let r = r.with_threshold(Threshold::MinPValue { alpha: 0.01 });
        assert!(r.passed());
        let none = GofReport::new("y", 0.0, None, 10, None, Threshold::MinPValue { alpha: 0.01 });
        assert!(!none.passed());
    }

    #[test]
    fn json_line_roundtrip() {
        let r = GofReport::deterministic("reduction", 1e-15, 999, 1e-12).with_seed(3);
        let line = r.to_json_line();
        assert!(!line.contains('\n'));
        let back: GofReport = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
    }
}
