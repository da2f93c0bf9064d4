//! `report.json` and the per-run CSV files.
//!
//! Floats are written in scientific notation with 17 significant digits, so
//! identical runs give byte-identical reports.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::config::RunConfig;
use deltalap::nls::SolverTrace;

/// `x` with 17 significant digits, or `null` when not finite.
pub fn float_value(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Number::from_str(&format!("{x:.16e}")).map_or(Value::Null, Value::Number)
}

/// How a metric is compared against its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    Below,
    AtLeast,
    Within,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    /// `[lo, hi]` for [`Relation::Within`]; otherwise only `hi` is used.
    pub lo: f64,
    pub hi: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        let v = self.value;
        v.is_finite()
            && match self.relation {
                Relation::AtMost => v <= self.hi,
                Relation::Below => v < self.hi,
                Relation::AtLeast => v >= self.hi,
                Relation::Within => (self.lo..=self.hi).contains(&v),
            }
    }

    fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("value".into(), float_value(self.value));
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::Below => "<",
            Relation::AtLeast => ">=",
            Relation::Within => "in",
        };
        m.insert("relation".into(), Value::String(rel.into()));
        if self.relation == Relation::Within {
            m.insert("threshold".into(), Value::Array(vec![float_value(self.lo), float_value(self.hi)]));
        } else {
            m.insert("threshold".into(), float_value(self.hi));
        }
        m.insert("pass".into(), Value::Bool(self.passed()));
        Value::Object(m)
    }
}

/// Scalars and invariant checks produced by one experiment.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub metrics: Vec<(String, f64)>,
    pub checks: Vec<Check>,
    /// Errors that stopped part of the run.
    pub errors: Vec<String>,
}

impl Report {
    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.push((name.into(), value));
    }

    fn push(&mut self, name: &str, value: f64, relation: Relation, lo: f64, hi: f64) {
        self.metric(name, value);
        self.checks.push(Check {
            name: name.into(),
            value,
            relation,
            lo,
            hi,
        });
    }

    pub fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        self.push(name, value, Relation::AtMost, f64::NEG_INFINITY, bound);
    }

    pub fn below(&mut self, name: &str, value: f64, bound: f64) {
        self.push(name, value, Relation::Below, f64::NEG_INFINITY, bound);
    }

    pub fn at_least(&mut self, name: &str, value: f64, bound: f64) {
        self.push(name, value, Relation::AtLeast, f64::NEG_INFINITY, bound);
    }

    pub fn within(&mut self, name: &str, value: f64, lo: f64, hi: f64) {
        self.push(name, value, Relation::Within, lo, hi);
    }

    /// Records an exact boolean identity as a `0`/`1` check.
    pub fn holds(&mut self, name: &str, ok: bool) {
        self.at_least(name, if ok { 1.0 } else { 0.0 }, 1.0);
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.name.clone())
            .collect();
        out.extend(self.errors.iter().cloned());
        out
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    /// The report document: config echo, metrics, checks and failures.
    pub fn to_json(&self, cfg: &RunConfig) -> String {
        let mut root = Map::new();
        root.insert("experiment".into(), Value::String(cfg.experiment.name().into()));
        root.insert("config".into(), config_value(cfg));
        let mut metrics = Map::new();
        for (k, v) in &self.metrics {
            metrics.insert(k.clone(), float_value(*v));
        }
        root.insert("metrics".into(), Value::Object(metrics));
        root.insert("checks".into(), Value::Array(self.checks.iter().map(Check::to_value).collect()));
        root.insert(
            "failures".into(),
            Value::Array(self.failures().into_iter().map(Value::String).collect()),
        );
        root.insert("passed".into(), Value::Bool(self.passed()));
        let mut text = serde_json::to_string_pretty(&Value::Object(root)).expect("report serializes");
        text.push('\n');
        text
    }
}

/// The effective configuration with floats in the report format.
fn config_value(cfg: &RunConfig) -> Value {
    fn refloat(v: Value) -> Value {
        match v {
            Value::Number(n) if !n.is_u64() && !n.is_i64() => float_value(n.as_f64().unwrap_or(f64::NAN)),
            Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, refloat(v))).collect()),
            other => other,
        }
    }
    refloat(serde_json::to_value(cfg).expect("config serializes"))
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row per recorded node: `step, t, mass, energy, linf, picard_residual`.
pub fn write_trace_csv(path: &Path, trace: &SolverTrace, steps: &[usize]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["step", "t", "mass", "energy", "linf", "picard_residual"])?;
    let residual = trace.picard_residuals.last().map(|&r| fmt17(r)).unwrap_or_default();
    for (i, &step) in steps.iter().enumerate() {
        w.write_record([
            step.to_string(),
            fmt17(trace.times[i]),
            fmt17(trace.mass[i]),
            fmt17(trace.energy[i]),
            fmt17(trace.linf[i]),
            residual.clone(),
        ])?;
    }
    w.flush()
}

/// `iteration, residual` for a Picard run.
pub fn write_residuals_csv(path: &Path, residuals: &[f64]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["iteration", "residual"])?;
    for (k, r) in residuals.iter().enumerate() {
        w.write_record([(k + 1).to_string(), fmt17(*r)])?;
    }
    w.flush()
}

/// Writes `text` to `path` in one go.
pub fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    std::fs::File::create(path)?.write_all(text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Experiment;

    #[test]
    fn seventeen_digits() {
        assert_eq!(float_value(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(float_value(f64::NAN), Value::Null);
    }

    #[test]
    fn checks_and_echo() {
        let cfg = RunConfig::new(Experiment::Theorem21);
        let mut r = Report::default();
        r.at_most("small", 1e-12, 1e-10);
        r.at_least("big", 0.5, 1.0);
        r.within("band", 4.1, 3.0, 5.0);
        assert_eq!(r.failures(), vec!["big".to_string()]);
        let text = r.to_json(&cfg);
        let back: Value = serde_json::from_str(&text).unwrap();
        let echoed: RunConfig = serde_json::from_value(back["config"].clone()).unwrap();
        assert_eq!(echoed, cfg);
        assert_eq!(back["passed"], Value::Bool(false));
    }
}
