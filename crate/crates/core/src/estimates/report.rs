use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// A pass rule evaluated against the named series of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Criterion {
    /// Every value of the series is ≤ limit.
    AtMost { series: String, limit: f64 },
    /// Every value of the series is ≥ limit.
    AtLeast { series: String, limit: f64 },
    /// max/min of the series is < limit (all values positive).
    SpreadBelow { series: String, limit: f64 },
    /// (max − min)/max of the series is < limit.
    VariationBelow { series: String, limit: f64 },
    /// Growth of the running max over any factor-10 window of `axis` is < limit.
    DecadeDriftBelow { series: String, axis: String, limit: f64 },
    /// Consecutive values never increase by more than `slack`.
    NonIncreasing { series: String, slack: f64 },
    /// All values finite.
    Finite { series: String },
}

impl Criterion {
    pub fn series(&self) -> &str {
        match self {
            Criterion::AtMost { series, .. }
            | Criterion::AtLeast { series, .. }
            | Criterion::SpreadBelow { series, .. }
            | Criterion::VariationBelow { series, .. }
            | Criterion::DecadeDriftBelow { series, .. }
            | Criterion::NonIncreasing { series, .. }
            | Criterion::Finite { series } => series,
        }
    }

    /// Measured statistic for this rule and whether it passes.
    pub fn evaluate(&self, values: &BTreeMap<String, Vec<f64>>) -> (f64, bool) {
        let Some(v) = values.get(self.series()) else {
            return (f64::NAN, false);
        };
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return (f64::NAN, false);
        }
        let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        match self {
            Criterion::AtMost { limit, .. } => (max, max <= *limit),
            Criterion::AtLeast { limit, .. } => (min, min >= *limit),
            Criterion::SpreadBelow { limit, .. } => {
                let s = if min > 0.0 { max / min } else { f64::INFINITY };
                (s, s < *limit)
            }
            Criterion::VariationBelow { limit, .. } => {
                let s = if max > 0.0 { (max - min) / max } else { 0.0 };
                (s, s < *limit)
            }
            Criterion::DecadeDriftBelow { axis, limit, .. } => {
                let Some(t) = values.get(axis) else {
                    return (f64::NAN, false);
                };
                let d = decade_drift(t, v);
                (d, d < *limit)
            }
            Criterion::NonIncreasing { slack, .. } => {
                let worst = v.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
                let worst = if v.len() < 2 { 0.0 } else { worst };
                (worst, worst <= *slack)
            }
            Criterion::Finite { .. } => (max, true),
        }
    }
}

/// Largest relative growth of the running maximum of `v` across any window
/// [t, 10t] of the (ascending, positive) axis `t`.
pub fn decade_drift(t: &[f64], v: &[f64]) -> f64 {
    let mut running = Vec::with_capacity(v.len());
    let mut m = f64::NEG_INFINITY;
    for &x in v {
        m = m.max(x);
        running.push(m);
    }
    let mut worst: f64 = 0.0;
    for i in 0..t.len() {
        let mut j = i;
        while j + 1 < t.len() && t[j + 1] <= 10.0 * t[i] * (1.0 + 1e-12) {
            j += 1;
        }
        if running[i] > 0.0 {
            worst = worst.max((running[j] - running[i]) / running[i]);
        }
    }
    worst
}

/// Self-contained record of one numerical check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub name: String,
    pub grid: BTreeMap<String, String>,
    pub values: BTreeMap<String, Vec<f64>>,
    pub criteria: Vec<Criterion>,
    pub statistics: Vec<f64>,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl EstimateReport {
    pub fn new(name: &str) -> Self {
        EstimateReport {
            name: name.to_string(),
            grid: BTreeMap::new(),
            values: BTreeMap::new(),
            criteria: Vec::new(),
            statistics: Vec::new(),
            pass: false,
            notes: Vec::new(),
        }
    }

    pub fn grid(mut self, key: &str, value: impl ToString) -> Self {
        self.grid.insert(key.to_string(), value.to_string());
        self
    }

    pub fn series(mut self, key: &str, values: Vec<f64>) -> Self {
        self.values.insert(key.to_string(), values);
        self
    }

    pub fn push(&mut self, key: &str, value: f64) {
        self.values.entry(key.to_string()).or_default().push(value);
    }

    pub fn criterion(mut self, c: Criterion) -> Self {
        self.criteria.push(c);
        self
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    /// Evaluates every criterion from the recorded values and stores the outcome.
    pub fn finish(mut self) -> Self {
        let (stats, pass) = self.recompute();
        self.statistics = stats;
        self.pass = pass;
        self
    }

    pub fn recompute(&self) -> (Vec<f64>, bool) {
        let mut pass = !self.criteria.is_empty();
        let mut stats = Vec::new();
        for c in &self.criteria {
            let (s, ok) = c.evaluate(&self.values);
            stats.push(s);
            pass &= ok;
        }
        (stats, pass)
    }

    /// True when the stored pass flag agrees with a fresh evaluation.
    pub fn is_consistent(&self) -> bool {
        self.recompute().1 == self.pass
    }

    /// Largest recorded statistic of the criterion on `series`, if any.
    pub fn statistic(&self, series: &str) -> Option<f64> {
        self.criteria
            .iter()
            .zip(&self.statistics)
            .filter(|(c, _)| c.series() == series)
            .map(|(_, s)| *s)
            .next()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_is_recomputable() {
        let r = EstimateReport::new("demo")
            .series("t", vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0])
            .series("ratio", vec![1.0, 1.05, 1.08, 1.09, 1.09, 1.09, 1.09])
            .criterion(Criterion::DecadeDriftBelow { series: "ratio".into(), axis: "t".into(), limit: 0.15 })
            .finish();
        assert!(r.pass);
        assert!(r.is_consistent());
        let mut tampered = r.clone();
        tampered.values.get_mut("ratio").unwrap()[6] = 2.0;
        assert!(!tampered.is_consistent());
    }

    #[test]
    fn empty_report_fails() {
        assert!(!EstimateReport::new("none").finish().pass);
    }
}
