//! JSON report layout shared by the command line tool and the validation
//! suite.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::analytic::{AnalyticQuantity, Method};
use crate::events::{Event, EventOutcome};
use crate::quadrature::QuadratureResult;
use crate::sampling::MCEstimate;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Uncertainty {
    /// Monte Carlo standard error and 95% interval.
    Stderr { stderr: f64, ci_low: f64, ci_high: f64 },
    /// Bound on the absolute error of a deterministic computation; zero for
    /// exact values.
    ErrorBound { bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultEntry {
    pub name: String,
    pub value: f64,
    pub uncertainty: Uncertainty,
    pub method: String,
    /// Trials for sampling results, integrand evaluations otherwise.
    pub n_or_evals: u64,
    pub seed: Option<u64>,
}

impl ResultEntry {
    pub fn from_estimate(name: impl Into<String>, e: &MCEstimate) -> Self {
        ResultEntry {
            name: name.into(),
            value: e.value,
            uncertainty: Uncertainty::Stderr { stderr: e.stderr, ci_low: e.ci_low, ci_high: e.ci_high },
            method: "monte-carlo".into(),
            n_or_evals: e.n,
            seed: Some(e.seed),
        }
    }

    pub fn from_quadrature(name: impl Into<String>, r: &QuadratureResult) -> Self {
        ResultEntry {
            name: name.into(),
            value: r.value,
            uncertainty: Uncertainty::ErrorBound { bound: r.error_estimate },
            method: Method::Quadrature.name().into(),
            n_or_evals: r.evaluations as u64,
            seed: None,
        }
    }

    pub fn from_analytic(q: &AnalyticQuantity) -> Self {
        ResultEntry {
            name: q.name.to_string(),
            value: q.value,
            uncertainty: Uncertainty::ErrorBound { bound: q.error_bound },
            method: q.method.name().into(),
            n_or_evals: q.evaluations as u64,
            seed: None,
        }
    }

    /// A value computed in floating point with no truncation, e.g. a
    /// geometric formula; `bound` is a rounding-level estimate.
    pub fn exact(name: impl Into<String>, value: f64, bound: f64) -> Self {
        ResultEntry {
            name: name.into(),
            value,
            uncertainty: Uncertainty::ErrorBound { bound },
            method: "direct".into(),
            n_or_evals: 0,
            seed: None,
        }
    }

    /// A count over `n` trials, reported as an exact integer.
    pub fn count(name: impl Into<String>, count: u64, n: u64, seed: u64) -> Self {
        ResultEntry {
            name: name.into(),
            value: count as f64,
            uncertainty: Uncertainty::ErrorBound { bound: 0.0 },
            method: "count".into(),
            n_or_evals: n,
            seed: Some(seed),
        }
    }

    pub fn with_method(mut self, method: impl Into<String>) -> Self {
        self.method = method.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Map<String, Value>,
    pub results: Vec<ResultEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub criteria: Vec<crate::validation::CriterionReport>,
    /// Seconds; left out unless requested so that reruns compare equal.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl Report {
    pub fn new(command: impl Into<String>, config: Map<String, Value>) -> Self {
        Report { command: command.into(), config, results: Vec::new(), criteria: Vec::new(), wall_time: None }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }
}

/// Result rows for an event outcome: the estimate itself, plus the KS
/// statistic and its 1% critical value for sample events.
pub fn event_results(event: &Event, outcome: &EventOutcome) -> Vec<ResultEntry> {
    let name = event.to_string();
    match outcome {
        EventOutcome::Probability(e) => vec![ResultEntry::from_estimate(name, e)],
        EventOutcome::Mean(e) => vec![ResultEntry::from_estimate(format!("{name}:mean"), e)],
        EventOutcome::Samples { mean, ks_statistic, ks_critical_01, reference } => vec![
            ResultEntry::from_estimate(format!("{name}:mean"), mean),
            ResultEntry {
                name: format!("{name}:ks-vs-{reference}"),
                value: *ks_statistic,
                uncertainty: Uncertainty::ErrorBound { bound: 0.0 },
                method: "kolmogorov-smirnov".into(),
                n_or_evals: mean.n,
                seed: Some(mean.seed),
            },
            ResultEntry {
                name: format!("{name}:ks-critical-1pct"),
                value: *ks_critical_01,
                uncertainty: Uncertainty::ErrorBound { bound: 0.0 },
                method: "asymptotic".into(),
                n_or_evals: mean.n,
                seed: None,
            },
        ],
    }
}

/// The report written by `estimate`: a pure function of event, `n` and
/// seed, independent of the worker count.
pub fn estimate_report(event: &Event, n: u64, seed: u64) -> Result<Report, crate::events::EventError> {
    let outcome = event.run(n, seed)?;
    let mut config = Map::new();
    config.insert("event".into(), Value::String(event.to_string()));
    config.insert("n".into(), Value::from(n));
    config.insert("seed".into(), Value::from(seed));
    let mut report = Report::new("estimate", config);
    report.results = event_results(event, &outcome);
    if let Some(t) = event.target() {
        report.results.push(ResultEntry::exact(format!("{event}:target"), t, 0.0).with_method("reference"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_report_shape() {
        let r = estimate_report(&Event::AcuteTriangle, 10_000, 3).unwrap();
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["command"], "estimate");
        assert_eq!(v["config"]["n"], 10_000);
        let first = &v["results"][0];
        for key in ["name", "value", "uncertainty", "method", "n_or_evals", "seed"] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
        assert_eq!(first["uncertainty"]["kind"], "stderr");
        assert!(v.get("wall_time").is_none());
        assert!(v.get("criteria").is_none());
        assert_eq!(r.to_json(), estimate_report(&Event::AcuteTriangle, 10_000, 3).unwrap().to_json());
    }
}
