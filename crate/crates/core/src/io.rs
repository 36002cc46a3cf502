//! Output formats.
//!
//! Samples CSV, schema version 1: header `iter,<column>,...`, one row per
//! retained draw, `iter` the 1-based iteration number.
//!
//! Summary JSON, schema version 1: `{schema_version, experiment, seed, chain,
//! n_iter, burn_in, thin, n_kept, columns, summaries, extra}`.

use std::io::Write;

use serde::Serialize;

use crate::chain::ChainOutput;
use crate::diagnostics::ChainSummary;
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

pub fn write_samples_csv<W: Write>(
    w: W,
    columns: &[String],
    chain: &ChainOutput<f64>,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = Vec::with_capacity(columns.len() + 1);
    header.push("iter");
    header.extend(columns.iter().map(String::as_str));
    out.write_record(&header)?;
    let mut record = Vec::with_capacity(columns.len() + 1);
    for (it, row) in chain.iterations().iter().zip(chain.rows()) {
        record.clear();
        record.push(it.to_string());
        record.extend(row.iter().map(|v| v.to_string()));
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub experiment: String,
    pub seed: u64,
    pub chain: usize,
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub n_kept: usize,
    pub columns: Vec<String>,
    pub summaries: Vec<ChainSummary>,
    pub extra: serde_json::Value,
}

pub fn write_summary_json<W: Write>(w: W, summary: &RunSummary) -> Result<()> {
    let mut w = w;
    serde_json::to_writer_pretty(&mut w, summary)?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_rows() {
        let mut chain = ChainOutput::with_capacity(2, 2, 4);
        chain.push(3, &[1.0, -0.5]);
        chain.push(4, &[2.0, 0.25]);
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &["a".into(), "b".into()], &chain).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "iter,a,b\n3,1,-0.5\n4,2,0.25\n"
        );
    }
}
