use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use stbc_ccm::harness::{seed_list_hash, Metric, MetricsSeries};

/// One CSV record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub axis: &'static str,
    pub axis_value: f64,
    pub algorithm: String,
    pub metric: &'static str,
    pub mean: f64,
    pub half_width: f64,
    pub runs: usize,
    pub seed_hash: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<Row>,
}

pub fn metric_id(m: Metric) -> &'static str {
    match m {
        Metric::Ber => "ber",
        Metric::ChannelMse => "channel_mse",
    }
}

impl ResultTable {
    /// Rows of the given metric, ordered by axis value then algorithm id.
    pub fn from_series(series: &MetricsSeries, metric: Metric) -> Self {
        let hash = seed_list_hash(&series.seeds);
        let mut rows: Vec<Row> = series
            .points
            .iter()
            .filter(|p| p.metric == metric)
            .map(|p| Row {
                axis: series.axis.id(),
                axis_value: p.axis_value,
                algorithm: p.series.clone(),
                metric: metric_id(p.metric),
                mean: p.mean,
                half_width: p.half_width,
                runs: p.runs,
                seed_hash: hash,
            })
            .collect();
        rows.sort_by(|a, b| {
            a.axis_value
                .total_cmp(&b.axis_value)
                .then_with(|| a.algorithm.cmp(&b.algorithm))
        });
        Self { rows }
    }
}

/// `%g`-style formatting with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-4..6).contains(&exp) {
        trim(format!("{:.*}", (5 - exp).max(0) as usize, x))
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent present");
        format!("{}e{e}", trim(mantissa.to_string()))
    }
}

pub fn write_csv<W: Write>(table: &ResultTable, out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["axis", "axis_value", "algorithm", "metric", "mean", "half_width", "runs", "seed_hash"])?;
    for r in &table.rows {
        w.write_record([
            r.axis.to_string(),
            sig6(r.axis_value),
            r.algorithm.clone(),
            r.metric.to_string(),
            sig6(r.mean),
            sig6(r.half_width),
            r.runs.to_string(),
            format!("{:016x}", r.seed_hash),
        ])?;
    }
    w.flush()
}

/// Writes the table to `path`; errors carry the path.
pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<(), String> {
    if table.rows.is_empty() {
        return Err("result table is empty".into());
    }
    let file = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
    write_csv(table, io::BufWriter::new(file)).map_err(|e| format!("{}: {e}", path.display()))
}
