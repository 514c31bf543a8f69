//! Report emission as canonical JSON, CSV or markdown.
//!
//! Reports keep full-precision floats internally; metrics are rounded to
//! four decimals only here.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::partition::PartitionReport;
use crate::scorer::{EvalReport, PrfCounts};
use crate::stats::StatsReport;
use crate::swap::SwapReport;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "md" | "markdown" => Ok(OutputFormat::Markdown),
            other => Err(format!(
                "unsupported output format '{other}' (expected json, csv or md)"
            )),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Markdown => "md",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Self {
            title: title.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Tabular views of a report.
pub trait Tabular {
    /// Single flat table emitted as CSV.
    fn csv_table(&self) -> Table;

    /// Tables rendered in markdown; defaults to the CSV table.
    fn markdown_tables(&self) -> Vec<Table> {
        vec![self.csv_table()]
    }
}

pub fn metric(x: f64) -> String {
    format!("{x:.4}")
}

fn round4(x: f64) -> f64 {
    (x * 10_000.0).round() / 10_000.0
}

/// Sorts object keys and rounds every non-integer number to four decimals.
fn canonicalize(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Map::new();
            for (k, v) in entries {
                out.insert(k, canonicalize(v));
            }
            Value::Object(out)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        Value::Number(n) if n.is_f64() => {
            let rounded = round4(n.as_f64().unwrap_or_default());
            serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
        }
        other => other,
    }
}

pub fn to_canonical_json<R: Serialize + ?Sized>(report: &R) -> String {
    let value = serde_json::to_value(report).expect("reports serialize to JSON");
    let mut out =
        serde_json::to_string_pretty(&canonicalize(value)).expect("JSON values serialize");
    out.push('\n');
    out
}

pub fn to_csv(table: &Table) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(&table.header)
        .expect("in-memory CSV write");
    for row in &table.rows {
        writer.write_record(row).expect("in-memory CSV write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory CSV flush"))
        .expect("CSV output is UTF-8")
}

pub fn to_markdown(tables: &[Table]) -> String {
    let mut out = String::new();
    for (i, table) in tables.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if !table.title.is_empty() {
            out.push_str(&format!("### {}\n\n", table.title));
        }
        out.push_str(&format!("| {} |\n", table.header.join(" | ")));
        out.push_str(&format!("|{}\n", "---|".repeat(table.header.len())));
        for row in &table.rows {
            out.push_str(&format!("| {} |\n", row.join(" | ")));
        }
    }
    out
}

pub fn emit_report<R: Serialize + Tabular>(report: &R, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Json => to_canonical_json(report),
        OutputFormat::Csv => to_csv(&report.csv_table()),
        OutputFormat::Markdown => to_markdown(&report.markdown_tables()),
    }
    .into_bytes()
}

fn prf_cells(c: &PrfCounts) -> Vec<String> {
    vec![
        c.tp.to_string(),
        c.fp.to_string(),
        c.fn_.to_string(),
        metric(c.precision()),
        metric(c.recall()),
        metric(c.f1()),
    ]
}

const PRF_HEADER: [&str; 6] = ["tp", "fp", "fn", "precision", "recall", "f1"];

impl Tabular for EvalReport {
    fn csv_table(&self) -> Table {
        let header: Vec<&str> = ["setting", "partition"]
            .into_iter()
            .chain(PRF_HEADER)
            .collect();
        let mut table = Table::new("", &header);
        for s in &self.settings {
            let mut row = vec![s.setting.label().to_string(), "overall".to_string()];
            row.extend(prf_cells(&s.overall));
            table.push(row);
            for (label, counts) in s.ordered_partitions() {
                let mut row = vec![s.setting.label().to_string(), label.to_string()];
                row.extend(prf_cells(&counts));
                table.push(row);
            }
        }
        table
    }

    fn markdown_tables(&self) -> Vec<Table> {
        let header: Vec<&str> = ["partition"].into_iter().chain(PRF_HEADER).collect();
        if self.settings.is_empty() {
            return vec![Table::new("", &header)];
        }
        self.settings
            .iter()
            .map(|s| {
                let mut table = Table::new(s.setting.label(), &header);
                let rows = std::iter::once(("overall", s.overall)).chain(s.ordered_partitions());
                for (label, counts) in rows {
                    let mut row = vec![label.to_string()];
                    row.extend(prf_cells(&counts));
                    table.push(row);
                }
                table
            })
            .collect()
    }
}

impl Tabular for PartitionReport {
    fn csv_table(&self) -> Table {
        let mut table = Table::new("partitions", &["kind", "partition", "count", "proportion"]);
        for (kind, tally) in [
            ("mention", &self.summary.mentions),
            ("relation", &self.summary.relations),
        ] {
            for (label, count) in &tally.counts {
                table.push(vec![
                    kind.to_string(),
                    label.to_string(),
                    count.to_string(),
                    metric(tally.proportion(label)),
                ]);
            }
        }
        table
    }
}

fn opt_metric(x: Option<f64>) -> String {
    x.map(metric).unwrap_or_default()
}

impl Tabular for StatsReport {
    fn csv_table(&self) -> Table {
        let mut table = Table::new(
            "consistency",
            &[
                "split", "eLen", "eCon", "eConStar", "eLex", "rCon", "aCon", "aLen", "aDist",
            ],
        );
        for s in &self.splits {
            let e = s.entities.as_ref();
            let r = s.relations.as_ref();
            table.push(vec![
                s.name.clone(),
                opt_metric(e.map(|e| e.e_len)),
                opt_metric(e.map(|e| e.e_con)),
                opt_metric(e.and_then(|e| e.e_con_star)),
                opt_metric(e.map(|e| e.e_lex)),
                opt_metric(r.map(|r| r.r_con)),
                opt_metric(r.map(|r| r.a_con)),
                opt_metric(r.map(|r| r.a_len)),
                opt_metric(r.map(|r| r.a_dist)),
            ]);
        }
        table
    }

    fn markdown_tables(&self) -> Vec<Table> {
        let mut general = Table::new(
            "corpus",
            &[
                "split",
                "sentences",
                "tokens",
                "mentions",
                "relations",
                "entity types",
                "relation types",
            ],
        );
        for s in &self.summary.splits {
            general.push(vec![
                s.name.clone(),
                s.sentences.to_string(),
                s.tokens.to_string(),
                s.mentions.to_string(),
                s.relations.to_string(),
                s.entity_types.len().to_string(),
                s.relation_types.len().to_string(),
            ]);
        }
        vec![general, self.csv_table()]
    }
}

impl Tabular for SwapReport {
    fn csv_table(&self) -> Table {
        let header: Vec<&str> = ["metric"].into_iter().chain(PRF_HEADER).collect();
        let mut table = Table::new(format!("swap {}", self.relation_type), &header);
        for (name, counts) in [
            ("ner", &self.ner),
            ("re", &self.re),
            ("rev_re", &self.rev_re),
        ] {
            let mut row = vec![name.to_string()];
            row.extend(prf_cells(counts));
            table.push(row);
        }
        table
    }

    fn markdown_tables(&self) -> Vec<Table> {
        let mut outcomes = Table::new("outcomes", &["source", "swapped", "outcome"]);
        for o in &self.outcomes {
            outcomes.push(vec![
                o.source_id.clone(),
                o.swapped_id.clone(),
                o.outcome.label().to_string(),
            ]);
        }
        vec![self.csv_table(), outcomes]
    }
}
