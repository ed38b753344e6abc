use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::Estimate;

use super::spec::ExperimentSpec;

/// One aggregated statistic. `censored` replicas are excluded from the estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub kind: String,
    pub d: usize,
    pub lambda: f64,
    pub zeta: f64,
    pub size: u64,
    pub k_or_rho: f64,
    pub statistic: String,
    pub estimate: f64,
    pub stderr: f64,
    pub replicas: u64,
    pub censored: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub spec: ExperimentSpec,
    pub rows: Vec<Row>,
}

pub const HEADER_PREFIX: &str = "# arw-spec ";

const COLUMNS: [&str; 12] =
    ["kind", "d", "lambda", "zeta", "size", "k_or_rho", "statistic", "estimate", "stderr", "replicas", "censored", "seed"];

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

impl ResultTable {
    pub fn new(spec: ExperimentSpec) -> Self {
        ResultTable { spec, rows: Vec::new() }
    }

    pub(crate) fn push(&mut self, zeta: f64, size: u64, k: f64, statistic: impl Into<String>, e: Estimate, censored: u64) {
        self.rows.push(Row {
            kind: self.spec.kind.label().into(),
            d: self.spec.dim,
            lambda: self.spec.lambda.value(),
            zeta,
            size,
            k_or_rho: k,
            statistic: statistic.into(),
            estimate: e.mean,
            stderr: e.stderr,
            replicas: e.n,
            censored,
            seed: self.spec.master_seed,
        });
    }

    /// Rows whose statistic matches, in table order.
    pub fn select<'a>(&'a self, statistic: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.statistic == statistic)
    }

    /// CSV with a leading comment line holding the resolved spec as JSON.
    pub fn write_csv(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "{HEADER_PREFIX}{}", self.spec.to_json())?;
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(COLUMNS).map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.kind.clone(),
                r.d.to_string(),
                float(r.lambda),
                float(r.zeta),
                r.size.to_string(),
                float(r.k_or_rho),
                r.statistic.clone(),
                float(r.estimate),
                float(r.stderr),
                r.replicas.to_string(),
                r.censored.to_string(),
                r.seed.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

/// Recovers the spec recorded in the first line of a CSV table.
pub fn spec_from_csv(text: &str) -> Result<ExperimentSpec> {
    let first = text.lines().next().unwrap_or_default();
    let json = first
        .strip_prefix(HEADER_PREFIX)
        .ok_or_else(|| Error::Parse("missing spec header line".into()))?;
    ExperimentSpec::from_json(json)
}
