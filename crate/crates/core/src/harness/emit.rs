use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ResultRow;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Config(format!("unknown format `{s}`"))),
        }
    }
}

fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for row in rows {
        writer.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn to_json<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut text = serde_json::to_string_pretty(rows).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

const ROW_HEADER: [&str; 6] = ["instance", "strategy", "feasibility", "score", "generations", "seconds"];
const PIVOT_HEADER: [&str; 4] = ["strategy", "feasibility", "score", "instances"];

pub fn render_rows(rows: &[ResultRow], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => to_csv(rows, &ROW_HEADER),
        OutputFormat::Json => to_json(rows),
    }
}

/// Writes result rows; an empty slice gives a header-only CSV or `[]`.
pub fn emit(rows: &[ResultRow], format: OutputFormat, path: &Path) -> Result<()> {
    let text = render_rows(rows, format)?;
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_rows(text: &str, format: OutputFormat) -> Result<Vec<ResultRow>> {
    match format {
        OutputFormat::Csv => {
            let mut reader = csv::Reader::from_reader(text.as_bytes());
            let header = reader.headers().map_err(|e| Error::Io(e.to_string()))?;
            if header.iter().ne(ROW_HEADER) {
                return Err(Error::Io(format!("unexpected header {header:?}")));
            }
            reader.deserialize().map(|r| r.map_err(|e| Error::Io(e.to_string()))).collect()
        }
        OutputFormat::Json => serde_json::from_str(text).map_err(|e| Error::Io(e.to_string())),
    }
}

/// Strategy summary over instances, in first-seen strategy order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivotRow {
    pub strategy: String,
    pub feasibility: f64,
    pub score: f64,
    pub instances: usize,
}

/// Mean feasibility and mean instance score per strategy; censored scores are included.
pub fn pivot(rows: &[ResultRow]) -> Vec<PivotRow> {
    let mut order: Vec<&str> = Vec::new();
    for row in rows {
        if !order.contains(&row.strategy.as_str()) {
            order.push(&row.strategy);
        }
    }
    order
        .into_iter()
        .map(|strategy| {
            let group: Vec<&ResultRow> = rows.iter().filter(|r| r.strategy == strategy).collect();
            let n = group.len() as f64;
            PivotRow {
                strategy: strategy.to_string(),
                feasibility: group.iter().map(|r| r.feasibility).sum::<f64>() / n,
                score: group.iter().map(|r| r.score).sum::<f64>() / n,
                instances: group.len(),
            }
        })
        .collect()
}

pub fn write_pivot(rows: &[PivotRow], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => to_csv(rows, &PIVOT_HEADER),
        OutputFormat::Json => to_json(rows),
    }
}
