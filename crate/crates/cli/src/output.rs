//! Rendering of command results as csv, json or markdown.
//!
//! Markdown shows 6 significant digits. Csv and json carry the shortest
//! decimal that round-trips to the same `f64`.

use pooldesign_core::{Cell, TableReport, TableRow};
use serde_json::{Map, Number, Value as Json};

use crate::config::OutputFormat;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(u64),
    Real(f64),
    Text(String),
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl Value {
    fn machine(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Real(v) => v.to_string(),
            Value::Text(s) => s.clone(),
        }
    }

    fn human(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Real(v) => significant(*v, 6),
            Value::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Int(v) => Json::from(*v),
            Value::Real(v) => Number::from_f64(*v).map_or(Json::Null, Json::Number),
            Value::Text(s) => Json::from(s.as_str()),
        }
    }
}

/// Named fields, in display order.
#[derive(Debug, Clone, Default)]
pub struct Record {
    fields: Vec<(&'static str, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(mut self, name: &'static str, value: impl Into<Value>) -> Self {
        self.fields.push((name, value.into()));
        self
    }
}

/// `%g`-style formatting with `digits` significant digits.
pub fn significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return v.to_string();
    }
    // the exponent after rounding to `digits`, as printf picks it
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_lines(rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .flexible(true)
        .from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

fn markdown_table(head: &[String], body: &[Vec<String>]) -> String {
    let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
    let mut out = line(head);
    out.push_str(&line(&vec!["---".to_string(); head.len()]));
    for row in body {
        out.push_str(&line(row));
    }
    out
}

pub fn render_record(format: OutputFormat, rec: &Record) -> String {
    match format {
        OutputFormat::Json => {
            let obj: Map<String, Json> = rec
                .fields
                .iter()
                .map(|(k, v)| (k.to_string(), v.json()))
                .collect();
            json_line(&Json::Object(obj))
        }
        OutputFormat::Csv => csv_lines([
            rec.fields.iter().map(|(k, _)| k.to_string()).collect(),
            rec.fields.iter().map(|(_, v)| v.machine()).collect(),
        ]),
        OutputFormat::Markdown => {
            let body: Vec<Vec<String>> = rec
                .fields
                .iter()
                .map(|(k, v)| vec![k.to_string(), v.human()])
                .collect();
            markdown_table(&["field".into(), "value".into()], &body)
        }
    }
}

fn cell_value(cell: &Cell) -> Value {
    match *cell {
        Cell::Int(v) => Value::Int(v),
        Cell::Limit => Value::Int(0),
        other => Value::Real(other.value()),
    }
}

fn row_strings(row: &TableRow, fmt: fn(&Value) -> String) -> Vec<String> {
    std::iter::once(row.label.clone())
        .chain(row.cells.iter().map(|c| fmt(&cell_value(c))))
        .collect()
}

pub fn render_table(format: OutputFormat, report: &TableReport) -> String {
    let all_rows = || report.header.iter().chain(&report.rows);
    match format {
        OutputFormat::Json => json_line(&serde_json::to_value(report).expect("table serialises")),
        OutputFormat::Csv => csv_lines(all_rows().map(|r| row_strings(r, Value::machine))),
        OutputFormat::Markdown => {
            let mut rows = all_rows().map(|r| row_strings(r, Value::human));
            let head = rows.next().unwrap_or_default();
            let body: Vec<Vec<String>> = rows.collect();
            format!(
                "**{}.** {}\n\n{}",
                report.table,
                report.title,
                markdown_table(&head, &body)
            )
        }
    }
}

pub fn json_line(v: &Json) -> String {
    let mut s = serde_json::to_string(v).expect("json serialises");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(significant(0.138642140873, 6), "0.138642");
        assert_eq!(significant(0.0157726251, 6), "0.0157726");
        assert_eq!(significant(1.0, 6), "1");
        assert_eq!(significant(123456.7, 6), "123457");
        assert_eq!(significant(1234567.0, 6), "1.23457e+06");
        assert_eq!(significant(0.00000123, 6), "1.23e-06");
        assert_eq!(significant(9.9999999, 6), "10");
        assert_eq!(significant(-0.25, 6), "-0.25");
    }

    #[test]
    fn record_formats() {
        let rec = Record::new()
            .field("k", 8u64)
            .field("p", 0.1f64)
            .field("method", "grid");
        assert_eq!(
            render_record(OutputFormat::Csv, &rec),
            "k,p,method\n8,0.1,grid\n"
        );
        assert_eq!(
            render_record(OutputFormat::Json, &rec),
            "{\"k\":8,\"p\":0.1,\"method\":\"grid\"}\n"
        );
        assert!(render_record(OutputFormat::Markdown, &rec).contains("| p | 0.1 |"));
    }

    #[test]
    fn csv_quotes_labels_with_commas() {
        let out = csv_lines([vec!["L(k,p*(k))".to_string(), "1".to_string()]]);
        assert_eq!(out, "\"L(k,p*(k))\",1\n");
    }
}
