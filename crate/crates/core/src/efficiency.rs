//! Relative efficiency of fixed designs and the standard design tables.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::bayes::{bayes_optimal_k_with, BayesOptions, PriorSpec};
use crate::cost::{expected_tests_raw, optimal_expected_tests, GroupSize, Prevalence};
use crate::error::{Error, Result};
use crate::minimax::{minimax_group_size_with, sup_loss_analytic_with, MinimaxOptions};
use crate::ranges::Breakpoints;

/// `E(k, p) / E(k*(p), p)`: 1 for the optimal design, larger otherwise.
pub fn relative_efficiency(k: GroupSize, p: Prevalence) -> f64 {
    expected_tests_raw(k.get(), p.get()) / optimal_expected_tests(p)
}

/// One `(p, k, RE)` record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyRow {
    pub p: Prevalence,
    pub k_design: GroupSize,
    pub re: f64,
}

impl EfficiencyRow {
    pub fn new(k_design: GroupSize, p: Prevalence) -> Self {
        EfficiencyRow {
            p,
            k_design,
            re: relative_efficiency(k_design, p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TableId {
    T1,
    T2,
    T3,
    T4,
    T5,
}

impl TableId {
    pub const ALL: [TableId; 5] = [
        TableId::T1,
        TableId::T2,
        TableId::T3,
        TableId::T4,
        TableId::T5,
    ];

    pub fn from_number(n: u8) -> Option<TableId> {
        Self::ALL.get(usize::from(n).checked_sub(1)?).copied()
    }

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn title(self) -> &'static str {
        match self {
            TableId::T1 => "Two-step solution: worst-case prevalence and loss per group size",
            TableId::T2 => "Relative efficiency of the unbounded minimax and Jeffreys designs",
            TableId::T3 => "Minimax and Bayesian group sizes for an upper bound U on p",
            TableId::T4 => {
                "Relative efficiencies of restricted minimax and Bayesian designs (small U)"
            }
            TableId::T5 => {
                "Relative efficiencies of restricted minimax and Bayesian designs (large U)"
            }
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.number())
    }
}

/// A table cell. Serialises as a plain number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    /// The `p -> 0` limit of a worst-case prevalence.
    Limit,
    /// Exactly `1/k`.
    Reciprocal(u64),
}

impl Cell {
    pub fn value(&self) -> f64 {
        match *self {
            Cell::Int(v) => v as f64,
            Cell::Real(v) => v,
            Cell::Limit => 0.0,
            Cell::Reciprocal(k) => 1.0 / k as f64,
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Cell::Int(v) => s.serialize_u64(v),
            Cell::Limit => s.serialize_u64(0),
            other => s.serialize_f64(other.value()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub cells: Vec<Cell>,
}

impl TableRow {
    fn new(label: &str, cells: Vec<Cell>) -> Self {
        TableRow {
            label: label.to_string(),
            cells,
        }
    }
}

/// A regenerated design table.
///
/// `header` rows hold the column keys (group sizes, prevalences or bounds);
/// `rows` hold the computed quantities, one cell per column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub table: TableId,
    pub title: String,
    pub header: Vec<TableRow>,
    pub rows: Vec<TableRow>,
    pub metadata: BTreeMap<String, String>,
}

impl TableReport {
    pub fn row(&self, label: &str) -> Option<&TableRow> {
        self.rows
            .iter()
            .chain(&self.header)
            .find(|r| r.label == label)
    }

    pub fn columns(&self) -> usize {
        self.header.first().map_or(0, |r| r.cells.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TableOptions {
    pub minimax: MinimaxOptions,
    pub bayes: BayesOptions,
}

pub const TABLE1_GROUP_SIZES: [u64; 15] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 25, 50, 100, 1000, 10000];
pub const TABLE2_PREVALENCES: [f64; 9] =
    [0.0001, 0.0005, 0.001, 0.005, 0.01, 0.05, 0.10, 0.25, 0.30];
pub const TABLE3_BOUNDS: [f64; 9] = [0.0001, 0.0005, 0.001, 0.005, 0.01, 0.05, 0.10, 0.15, 0.30];
pub const TABLE4_GROUPS: [(f64, [f64; 3]); 3] = [
    (0.0005, [0.0001, 0.0003, 0.0005]),
    (0.005, [0.001, 0.003, 0.005]),
    (0.05, [0.005, 0.01, 0.05]),
];
pub const TABLE5_GROUPS: [(f64, [f64; 3]); 3] = [
    (0.10, [0.01, 0.05, 0.10]),
    (0.20, [0.10, 0.15, 0.20]),
    (0.30, [0.20, 0.25, 0.30]),
];

fn in_cell<T>(table: TableId, cell: impl FnOnce() -> String, r: Result<T>) -> Result<T> {
    r.map_err(|source| Error::InCell {
        table: table.to_string(),
        cell: cell(),
        source: Box::new(source),
    })
}

fn prevalence(p: f64) -> Prevalence {
    Prevalence::new(p).expect("table prevalences lie in (0, 1)")
}

fn metadata(opts: &TableOptions) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert(
        "minimax_method".into(),
        format!("{:?}", opts.minimax.method).to_lowercase(),
    );
    if let Some(step) = opts.minimax.grid_step {
        m.insert("grid_step".into(), format!("{step:e}"));
    }
    m.insert(
        "quad_abs_tol".into(),
        format!("{:e}", opts.bayes.quadrature.abs_tol),
    );
    m.insert(
        "quad_rel_tol".into(),
        format!("{:e}", opts.bayes.quadrature.rel_tol),
    );
    m.insert(
        "k_scan_patience".into(),
        opts.bayes.scan.patience.to_string(),
    );
    m
}

/// Solved group sizes for one upper bound.
#[derive(Debug, Clone, Copy)]
struct BoundedDesigns {
    minimax: GroupSize,
    uniform: GroupSize,
    jeffreys: GroupSize,
}

fn bounded_designs(table: TableId, upper: f64, opts: &TableOptions) -> Result<BoundedDesigns> {
    let cell = |what: &str| {
        let what = what.to_string();
        move || format!("{what} at U = {upper}")
    };
    let minimax = in_cell(
        table,
        cell("k**_U"),
        minimax_group_size_with(upper, &opts.minimax),
    )?;
    let uniform = in_cell(
        table,
        cell("k*_I_U"),
        PriorSpec::uniform(upper).and_then(|p| bayes_optimal_k_with(&p, &opts.bayes)),
    )?;
    let jeffreys = in_cell(
        table,
        cell("k*_J_U"),
        PriorSpec::jeffreys(upper).and_then(|p| bayes_optimal_k_with(&p, &opts.bayes)),
    )?;
    Ok(BoundedDesigns {
        minimax: minimax.k_minimax,
        uniform: uniform.k_opt,
        jeffreys: jeffreys.k_opt,
    })
}

fn table1(opts: &TableOptions) -> Result<TableReport> {
    let max_k = *TABLE1_GROUP_SIZES.last().expect("non-empty");
    let bp = Breakpoints::up_to(max_k);
    let points = TABLE1_GROUP_SIZES
        .par_iter()
        .map(|&k| {
            let r = GroupSize::new(k).and_then(|g| sup_loss_analytic_with(&bp, g, 1.0));
            in_cell(TableId::T1, || format!("k = {k}"), r)
        })
        .collect::<Result<Vec<_>>>()?;
    let p_star = points
        .iter()
        .map(|pt| {
            if pt.is_limit() {
                Cell::Limit
            } else {
                Cell::Real(pt.p_star)
            }
        })
        .collect();
    let loss = points
        .iter()
        .map(|pt| {
            let k = pt.k.get();
            if pt.is_limit() && pt.sup_loss == 1.0 / k as f64 {
                Cell::Reciprocal(k)
            } else {
                Cell::Real(pt.sup_loss)
            }
        })
        .collect();
    Ok(TableReport {
        table: TableId::T1,
        title: TableId::T1.title().into(),
        header: vec![TableRow::new(
            "k",
            TABLE1_GROUP_SIZES.iter().map(|&k| Cell::Int(k)).collect(),
        )],
        rows: vec![
            TableRow::new("p*(k)", p_star),
            TableRow::new("L(k,p*(k))", loss),
        ],
        metadata: metadata(opts),
    })
}

fn table2(opts: &TableOptions) -> Result<TableReport> {
    let minimax = in_cell(
        TableId::T2,
        || "k** at U = 1".into(),
        minimax_group_size_with(1.0, &opts.minimax),
    )?
    .k_minimax;
    let jeffreys = in_cell(
        TableId::T2,
        || "k*_J1".into(),
        PriorSpec::jeffreys(1.0).and_then(|p| bayes_optimal_k_with(&p, &opts.bayes)),
    )?
    .k_opt;
    let re = |k: GroupSize| {
        TABLE2_PREVALENCES
            .iter()
            .map(|&p| Cell::Real(relative_efficiency(k, prevalence(p))))
            .collect()
    };
    let mut meta = metadata(opts);
    meta.insert("k_minimax".into(), minimax.to_string());
    meta.insert("k_jeffreys".into(), jeffreys.to_string());
    Ok(TableReport {
        table: TableId::T2,
        title: TableId::T2.title().into(),
        header: vec![TableRow::new(
            "p",
            TABLE2_PREVALENCES.iter().map(|&p| Cell::Real(p)).collect(),
        )],
        rows: vec![
            TableRow::new("RE(p)", re(minimax)),
            TableRow::new("RE_J1(p)", re(jeffreys)),
        ],
        metadata: meta,
    })
}

fn table3(opts: &TableOptions) -> Result<TableReport> {
    let designs = TABLE3_BOUNDS
        .par_iter()
        .map(|&u| bounded_designs(TableId::T3, u, opts))
        .collect::<Result<Vec<_>>>()?;
    let row = |label: &str, pick: fn(&BoundedDesigns) -> GroupSize| {
        TableRow::new(
            label,
            designs.iter().map(|d| Cell::Int(pick(d).get())).collect(),
        )
    };
    Ok(TableReport {
        table: TableId::T3,
        title: TableId::T3.title().into(),
        header: vec![TableRow::new(
            "U",
            TABLE3_BOUNDS.iter().map(|&u| Cell::Real(u)).collect(),
        )],
        rows: vec![
            row("k**_U", |d| d.minimax),
            row("k*_I_U", |d| d.uniform),
            row("k*_J_U", |d| d.jeffreys),
        ],
        metadata: metadata(opts),
    })
}

fn efficiency_table(
    id: TableId,
    groups: &[(f64, [f64; 3])],
    opts: &TableOptions,
) -> Result<TableReport> {
    let designs = groups
        .par_iter()
        .map(|&(u, _)| bounded_designs(id, u, opts))
        .collect::<Result<Vec<_>>>()?;
    let columns: Vec<(f64, f64, BoundedDesigns)> = groups
        .iter()
        .zip(&designs)
        .flat_map(|(&(u, ps), &d)| ps.into_iter().map(move |p| (u, p, d)))
        .collect();
    let re_row = |label: &str, pick: fn(&BoundedDesigns) -> GroupSize| {
        let cells = columns
            .iter()
            .map(|(_, p, d)| Cell::Real(relative_efficiency(pick(d), prevalence(*p))))
            .collect();
        TableRow::new(label, cells)
    };
    let k_row = |label: &str, pick: fn(&BoundedDesigns) -> GroupSize| {
        TableRow::new(
            label,
            columns
                .iter()
                .map(|(_, _, d)| Cell::Int(pick(d).get()))
                .collect(),
        )
    };
    let k_star = columns
        .iter()
        .map(|(_, p, _)| Cell::Int(crate::cost::samuels_optimal_k(prevalence(*p)).get()))
        .collect();
    Ok(TableReport {
        table: id,
        title: id.title().into(),
        header: vec![
            TableRow::new(
                "U",
                columns.iter().map(|(u, _, _)| Cell::Real(*u)).collect(),
            ),
            TableRow::new(
                "p",
                columns.iter().map(|(_, p, _)| Cell::Real(*p)).collect(),
            ),
        ],
        rows: vec![
            re_row("RE_U(p)", |d| d.minimax),
            re_row("RE_I_U(p)", |d| d.uniform),
            re_row("RE_J_U(p)", |d| d.jeffreys),
            TableRow::new("k*(p)", k_star),
            k_row("k**_U", |d| d.minimax),
            k_row("k*_I_U", |d| d.uniform),
            k_row("k*_J_U", |d| d.jeffreys),
        ],
        metadata: metadata(opts),
    })
}

/// Regenerates one of the design tables.
pub fn generate_table(id: TableId, opts: &TableOptions) -> Result<TableReport> {
    match id {
        TableId::T1 => table1(opts),
        TableId::T2 => table2(opts),
        TableId::T3 => table3(opts),
        TableId::T4 => efficiency_table(id, &TABLE4_GROUPS, opts),
        TableId::T5 => efficiency_table(id, &TABLE5_GROUPS, opts),
    }
}
