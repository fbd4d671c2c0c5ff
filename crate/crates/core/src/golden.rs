//! Reference values for the design tables and the comparison rule used by
//! `table --check`.
//!
//! Reference cells are stored as printed strings. A computed cell matches
//! when rounding it (or truncating it) to the printed number of decimals
//! reproduces the string, or failing that when it lies within
//! [`FALLBACK_TOLERANCE`] of the printed number. Cells printed as `1/k` must
//! be the exact reciprocal.

use serde::Serialize;

use crate::efficiency::{Cell, TableId, TableReport};

pub const FALLBACK_TOLERANCE: f64 = 5e-4;

/// A printed table: labelled rows of printed cells, header rows first.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceTable {
    pub table: TableId,
    pub rows: &'static [(&'static str, &'static [&'static str])],
}

const T1: &[(&str, &[&str])] = &[
    (
        "k",
        &[
            "1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "25", "50", "100", "1000", "10000",
        ],
    ),
    (
        "p*(k)",
        &[
            "0", "0", "0", "0", "0", "0", "0", "0.178", "0.167", "0.158", "0.083", "0.049",
            "0.029", "0.004", "0.0005",
        ],
    ),
    (
        "L(k,p*(k))",
        &[
            "1", "1/2", "1/3", "1/4", "1/5", "1/6", "1/7", "0.138", "0.162", "0.184", "0.382",
            "0.516", "0.628", "0.858", "0.949",
        ],
    ),
];

const T2: &[(&str, &[&str])] = &[
    (
        "p",
        &[
            "0.0001", "0.0005", "0.001", "0.005", "0.01", "0.05", "0.10", "0.25", "0.30",
        ],
    ),
    (
        "RE(p)",
        &[
            "6.305", "2.900", "2.118", "1.181", "1.034", "1.082", "1.169", "1.124", "1.078",
        ],
    ),
    (
        "RE_J1(p)",
        &[
            "3.921", "1.875", "1.432", "1.007", "1.020", "1.322", "1.385", "1.156", "1.078",
        ],
    ),
];

const T3: &[(&str, &[&str])] = &[
    (
        "U",
        &[
            "0.0001", "0.0005", "0.001", "0.005", "0.01", "0.05", "0.10", "0.15", "0.30",
        ],
    ),
    (
        "k**_U",
        &["201", "91", "64", "30", "21", "11", "8", "8", "8"],
    ),
    (
        "k*_I_U",
        &["142", "64", "45", "21", "15", "7", "5", "5", "4"],
    ),
    (
        "k*_J_U",
        &["181", "79", "56", "25", "18", "9", "7", "6", "5"],
    ),
];

const T4: &[(&str, &[&str])] = &[
    (
        "U",
        &[
            "0.0005", "0.0005", "0.0005", "0.005", "0.005", "0.005", "0.05", "0.05", "0.05",
        ],
    ),
    (
        "p",
        &[
            "0.0001", "0.0003", "0.0005", "0.001", "0.003", "0.005", "0.005", "0.01", "0.05",
        ],
    ),
    (
        "RE_U(p)",
        &[
            "1.0048", "1.0994", "1.2474", "1.0028", "1.1055", "1.2433", "1.0392", "1", "1.2249",
        ],
    ),
    (
        "RE_I_U(p)",
        &[
            "1.1030", "1.0044", "1.0596", "1.0901", "1.0060", "1.0606", "1.2749", "1.0778",
            "1.0429",
        ],
    ),
    (
        "RE_J_U(p)",
        &[
            "1.0289", "1.0461", "1.1556", "1.0310", "1.0392", "1.1343", "1.1159", "1.0103",
            "1.1282",
        ],
    ),
    (
        "k*(p)",
        &["101", "58", "45", "32", "19", "15", "15", "11", "5"],
    ),
    (
        "k**_U",
        &["91", "91", "91", "30", "30", "30", "11", "11", "11"],
    ),
    (
        "k*_I_U",
        &["64", "64", "64", "21", "21", "21", "7", "7", "7"],
    ),
    (
        "k*_J_U",
        &["79", "79", "79", "25", "25", "25", "9", "9", "9"],
    ),
];

const T5: &[(&str, &[&str])] = &[
    (
        "U",
        &[
            "0.10", "0.10", "0.10", "0.20", "0.20", "0.20", "0.30", "0.30", "0.30",
        ],
    ),
    (
        "p",
        &[
            "0.01", "0.05", "0.10", "0.10", "0.15", "0.20", "0.20", "0.25", "0.30",
        ],
    ),
    (
        "RE_U(p)",
        &[
            "1.0342", "1.0830", "1.1694", "1.1694", "1.1853", "1.1655", "1.1655", "1.1244",
            "1.0778",
        ],
    ),
    (
        "RE_I_U(p)",
        &[
            "1.2732", "1", "1.0263", "1", "1.0122", "1.0232", "1.0232", "1.0243", "1.0198",
        ],
    ),
    (
        "RE_J_U(p)",
        &[
            "1.0778", "1.0429", "1.1190", "1.0263", "1.0516", "1.0621", "1.0621", "1.0562",
            "1.0420",
        ],
    ),
    ("k*(p)", &["11", "5", "4", "4", "3", "3", "3", "3", "3"]),
    ("k**_U", &["8", "8", "8", "8", "8", "8", "8", "8", "8"]),
    ("k*_I_U", &["5", "5", "5", "4", "4", "4", "4", "4", "4"]),
    ("k*_J_U", &["7", "7", "7", "5", "5", "5", "5", "5", "5"]),
];

pub fn reference(table: TableId) -> ReferenceTable {
    let rows = match table {
        TableId::T1 => T1,
        TableId::T2 => T2,
        TableId::T3 => T3,
        TableId::T4 => T4,
        TableId::T5 => T5,
    };
    ReferenceTable { table, rows }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub row: String,
    pub column: usize,
    pub expected: String,
    pub computed: Option<f64>,
}

fn decimals(printed: &str) -> usize {
    printed.split_once('.').map_or(0, |(_, frac)| frac.len())
}

fn truncated(value: f64, places: usize) -> String {
    let wide = format!("{:.*}", places + 12, value);
    let cut = wide.len() - 12;
    let s = wide[..cut].trim_end_matches('.').to_string();
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// True when `cell` reproduces the printed string `printed`.
pub fn cell_matches(cell: &Cell, printed: &str) -> bool {
    if let Some((num, den)) = printed.split_once('/') {
        let (Ok(num), Ok(den)) = (num.parse::<u64>(), den.parse::<u64>()) else {
            return false;
        };
        return num == 1 && cell.value() == 1.0 / den as f64;
    }
    let Ok(expected) = printed.parse::<f64>() else {
        return false;
    };
    if let Cell::Int(v) = cell {
        return !printed.contains('.') && *v as f64 == expected;
    }
    let value = cell.value();
    let places = decimals(printed);
    format!("{value:.places$}") == printed
        || truncated(value, places) == printed
        || (value - expected).abs() <= FALLBACK_TOLERANCE
}

/// Compares a regenerated table against its reference; empty when all cells match.
pub fn check(report: &TableReport) -> Vec<Mismatch> {
    let reference = reference(report.table);
    let mut out = Vec::new();
    for &(label, printed) in reference.rows {
        let Some(row) = report.row(label) else {
            out.push(Mismatch {
                row: label.to_string(),
                column: 0,
                expected: "<row>".into(),
                computed: None,
            });
            continue;
        };
        for (column, expected) in printed.iter().enumerate() {
            let cell = row.cells.get(column);
            if !cell.is_some_and(|c| cell_matches(c, expected)) {
                out.push(Mismatch {
                    row: label.to_string(),
                    column,
                    expected: expected.to_string(),
                    computed: cell.map(Cell::value),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_and_truncation() {
        assert!(cell_matches(&Cell::Real(0.1386421), "0.1386"));
        assert!(cell_matches(&Cell::Real(0.1386421), "0.138"));
        assert!(cell_matches(&Cell::Real(0.000553), "0.0005"));
        assert!(cell_matches(&Cell::Real(1.0), "1"));
        assert!(cell_matches(&Cell::Real(1.0778), "1.078"));
        assert!(!cell_matches(&Cell::Real(1.155473), "1.156"));
        assert!(cell_matches(&Cell::Real(1.1555), "1.156"));
    }

    #[test]
    fn fallback_tolerance() {
        assert!(cell_matches(&Cell::Real(1.0024), "1.0028"));
        assert!(!cell_matches(&Cell::Real(1.002286), "1.0028"));
    }

    #[test]
    fn reciprocals_and_limits() {
        assert!(cell_matches(&Cell::Reciprocal(7), "1/7"));
        assert!(!cell_matches(&Cell::Real(0.1428), "1/7"));
        assert!(cell_matches(&Cell::Limit, "0"));
        assert!(cell_matches(&Cell::Reciprocal(1), "1"));
    }

    #[test]
    fn integers_are_exact() {
        assert!(cell_matches(&Cell::Int(201), "201"));
        assert!(!cell_matches(&Cell::Int(65), "64"));
    }

    #[test]
    fn truncation_helper() {
        assert_eq!(truncated(0.13864, 3), "0.138");
        assert_eq!(truncated(6.3055, 3), "6.305");
        assert_eq!(truncated(12.0, 0), "12");
    }

    #[test]
    fn reference_rows_are_rectangular() {
        for id in TableId::ALL {
            let t = reference(id);
            let width = t.rows[0].1.len();
            assert!(t.rows.iter().all(|(_, cells)| cells.len() == width), "{id}");
        }
    }
}
