//! CSV rendering of experiment results.

use serde::Serialize;

use super::runs::{
    ConvergenceRecord, CorrelationRecord, CorrelationSummary, EdRecord, PlateauReport,
};
use crate::error::{Error, Result};

pub const CONVERGENCE_HEADER: &str = "n,layers,e_vqe,e_exact,abs_error,infidelity,iterations";
pub const CORRELATION_HEADER: &str = "n,layers,m,c_vqe,c_exact";
pub const CORRELATION_SUMMARY_HEADER: &str = "n,layers,rel_error";
pub const PLATEAU_RAW_HEADER: &str = "n,layers,sample,param_index,grad";
pub const PLATEAU_AGGREGATE_HEADER: &str = "n,layers,variance,samples_used";
pub const PLATEAU_COMPONENT_HEADER: &str = "n,layers,param_index,variance";
pub const ED_HEADER: &str = "n,particles,e0,degeneracy,gap";

fn render<T: Serialize>(header: &str, rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(header.split(',')).map_err(csv_error)?;
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Invalid(e.to_string()))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Invalid(format!("csv: {e}"))
}

pub fn convergence_csv(rows: &[ConvergenceRecord]) -> Result<String> {
    render(CONVERGENCE_HEADER, rows)
}

pub fn correlation_csv(rows: &[CorrelationRecord]) -> Result<String> {
    render(CORRELATION_HEADER, rows)
}

pub fn correlation_summary_csv(rows: &[CorrelationSummary]) -> Result<String> {
    render(CORRELATION_SUMMARY_HEADER, rows)
}

/// One row per gradient component of every used sample.
pub fn plateau_raw_csv(report: &PlateauReport) -> Result<String> {
    let rows = report.samples.iter().flat_map(|s| {
        s.gradient
            .iter()
            .enumerate()
            .map(move |(k, &g)| (s.n, s.layers, s.sample, k, g))
    });
    render(PLATEAU_RAW_HEADER, rows)
}

pub fn plateau_aggregate_csv(report: &PlateauReport) -> Result<String> {
    render(
        PLATEAU_AGGREGATE_HEADER,
        report
            .aggregates
            .iter()
            .map(|a| (a.n, a.layers, a.variance, a.samples_used)),
    )
}

pub fn plateau_component_csv(report: &PlateauReport) -> Result<String> {
    let rows = report.aggregates.iter().flat_map(|a| {
        a.component_variance
            .iter()
            .enumerate()
            .map(move |(k, &v)| (a.n, a.layers, k, v))
    });
    render(PLATEAU_COMPONENT_HEADER, rows)
}

pub fn ed_csv(rows: &[EdRecord]) -> Result<String> {
    render(ED_HEADER, rows)
}
