//! CSV tables with JSON sidecars.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Format};
use crate::table::ResultTable;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `<kind>__<hash>` for single-table experiments, `<kind>.<table>__<hash>`
/// otherwise.
pub fn file_stem(kind: &str, table: &str, single: bool, hash: &str) -> String {
    if single {
        format!("{kind}__{hash}")
    } else {
        format!("{kind}.{table}__{hash}")
    }
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_csv(path: &Path, table: &ResultTable) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(table.columns.iter().map(|c| c.header()))?;
    for k in 0..table.rows.len() {
        w.write_record(table.emitted_row(k).into_iter().map(format_value))?;
    }
    w.flush()
}

/// Header and values of a written CSV.
pub fn read_csv(path: &Path) -> io::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = vec![];
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{s}: {e}"))))
            .collect::<io::Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn sidecar(cfg: &ExperimentConfig, table: &ResultTable) -> Value {
    let rows: Vec<Vec<Value>> = (0..table.rows.len())
        .map(|k| {
            table
                .emitted_row(k)
                .into_iter()
                .map(|v| if v.is_finite() { json!(v) } else { json!(format_value(v)) })
                .collect()
        })
        .collect();
    json!({
        "config_hash": cfg.hash(),
        "tool_version": TOOL_VERSION,
        "seed": cfg.seed(),
        "kind": cfg.experiment.kind(),
        "table": table.name,
        "columns": table.columns,
        "rows": rows,
        "partial": table.is_partial(),
        "errors": table.errors,
        "extras": table.extras,
        "config": cfg.canonical(),
    })
}

/// Writes every table in the configured formats and returns the paths.
pub fn emit(cfg: &ExperimentConfig, tables: &[ResultTable], directory: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(directory)?;
    let hash = cfg.hash();
    let kind = cfg.experiment.kind();
    let mut written = vec![];
    for t in tables {
        if t.rows.is_empty() {
            log::warn!("table `{}` is empty", t.name);
        }
        let stem = file_stem(kind, &t.name, tables.len() == 1, &hash);
        for f in &cfg.output.formats {
            let path = match f {
                Format::Csv => {
                    let p = directory.join(format!("{stem}.csv"));
                    write_csv(&p, t)?;
                    p
                }
                Format::Json => {
                    let p = directory.join(format!("{stem}.json"));
                    let text = serde_json::to_string_pretty(&sidecar(cfg, t)).map_err(io::Error::other)?;
                    fs::write(&p, text + "\n")?;
                    p
                }
            };
            written.push(path);
        }
    }
    Ok(written)
}
