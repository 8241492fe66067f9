//! Result rows and their CSV/JSON renderings.
//!
//! Schema v1, fixed column order:
//! experiment,params,statistic,mean,ci_lo,ci_hi,trials,seed,millis
//!
//! `params` is a compact JSON object (keys sorted). JSON mode emits one
//! object per line with the same keys. `millis` is 0 unless --timing was
//! given, so identical configurations are byte-identical regardless of the
//! worker count.

use clap::ValueEnum;
use kindep::stats::Estimate;
use serde_json::{Map, Value};
use std::io::Write;

pub const CSV_HEADER: [&str; 9] = [
    "experiment",
    "params",
    "statistic",
    "mean",
    "ci_lo",
    "ci_hi",
    "trials",
    "seed",
    "millis",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct ResultRow {
    pub experiment: String,
    pub params: Value,
    pub statistic: String,
    pub mean: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub trials: u64,
    pub seed: u64,
    pub millis: u64,
}

impl ResultRow {
    pub fn from_estimate(
        experiment: &str,
        params: &Value,
        statistic: &str,
        est: &Estimate,
        seed: u64,
    ) -> Self {
        ResultRow {
            experiment: experiment.to_string(),
            params: params.clone(),
            statistic: statistic.to_string(),
            mean: est.mean,
            ci_lo: est.ci95.0,
            ci_hi: est.ci95.1,
            trials: est.trials,
            seed,
            millis: 0,
        }
    }

    /// A scalar with no sampling error: CI collapses to the value.
    pub fn scalar(
        experiment: &str,
        params: &Value,
        statistic: &str,
        value: f64,
        trials: u64,
        seed: u64,
    ) -> Self {
        ResultRow {
            experiment: experiment.to_string(),
            params: params.clone(),
            statistic: statistic.to_string(),
            mean: value,
            ci_lo: value,
            ci_hi: value,
            trials,
            seed,
            millis: 0,
        }
    }
}

/// Build a params object; serde_json maps are sorted, so rendering is
/// deterministic.
pub fn params_object(entries: &[(&str, Value)]) -> Value {
    let mut map = Map::new();
    for (k, v) in entries {
        map.insert((*k).to_string(), v.clone());
    }
    Value::Object(map)
}

pub fn write_rows<W: Write>(out: &mut W, format: Format, rows: &[ResultRow]) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in rows {
                w.write_record([
                    r.experiment.as_str(),
                    &r.params.to_string(),
                    r.statistic.as_str(),
                    &r.mean.to_string(),
                    &r.ci_lo.to_string(),
                    &r.ci_hi.to_string(),
                    &r.trials.to_string(),
                    &r.seed.to_string(),
                    &r.millis.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Format::Json => {
            for r in rows {
                let obj = params_object(&[
                    ("experiment", Value::String(r.experiment.clone())),
                    ("params", r.params.clone()),
                    ("statistic", Value::String(r.statistic.clone())),
                    ("mean", json_f64(r.mean)),
                    ("ci_lo", json_f64(r.ci_lo)),
                    ("ci_hi", json_f64(r.ci_hi)),
                    ("trials", Value::from(r.trials)),
                    ("seed", Value::from(r.seed)),
                    ("millis", Value::from(r.millis)),
                ]);
                writeln!(out, "{obj}")?;
            }
        }
    }
    Ok(())
}

fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}
