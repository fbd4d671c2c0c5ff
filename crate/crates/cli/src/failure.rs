//! Command failures and their exit codes.

use std::fmt;

use pooldesign_core::golden::Mismatch;
use pooldesign_core::{Error, TableId};
use serde_json::{json, Value};

pub const EXIT_INVALID: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_GOLDEN: u8 = 4;

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, configuration or domain errors.
    Invalid(String),
    /// A solver or quadrature failed to converge.
    Numerical(String),
    /// A regenerated table disagrees with its reference values.
    Golden {
        table: TableId,
        mismatches: Vec<Mismatch>,
    },
}

impl Failure {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Failure::Invalid(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => EXIT_INVALID,
            Failure::Numerical(_) => EXIT_NUMERICAL,
            Failure::Golden { .. } => EXIT_GOLDEN,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Invalid(_) => "invalid_input",
            Failure::Numerical(_) => "numerical_failure",
            Failure::Golden { .. } => "golden_mismatch",
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Invalid(m) | Failure::Numerical(m) => m.clone(),
            Failure::Golden { table, mismatches } => {
                let cells: Vec<String> = mismatches
                    .iter()
                    .map(|m| match m.computed {
                        Some(v) => {
                            format!("{}[{}] expected {} got {v}", m.row, m.column, m.expected)
                        }
                        None => format!(
                            "{}[{}] expected {} got nothing",
                            m.row, m.column, m.expected
                        ),
                    })
                    .collect();
                format!(
                    "{table}: {} cell(s) differ from the reference: {}",
                    mismatches.len(),
                    cells.join("; ")
                )
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let mut err = json!({
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.message(),
        });
        if let Failure::Golden { mismatches, .. } = self {
            err["mismatches"] = serde_json::to_value(mismatches).expect("mismatches serialise");
        }
        json!({ "error": err })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}
