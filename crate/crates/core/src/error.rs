use thiserror::Error;

/// Errors raised by the group-size solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("group size must be at least {min}, got {value}")]
    InvalidGroupSize { value: u64, min: u64 },

    #[error("group size 2 is never optimal for two-stage testing")]
    NeverOptimal,

    #[error("prevalence {value} is outside {domain}")]
    InvalidPrevalence { value: f64, domain: &'static str },

    #[error("argument {name} = {value} is outside {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("quadrature did not converge: error estimate {estimate:e} after {subdivisions} subdivisions")]
    Quadrature { estimate: f64, subdivisions: usize },

    #[error("root bracket [{lo}, {hi}] does not change sign")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("no minimum bracketed for group sizes up to {max_k}")]
    ScanExhausted { max_k: u64 },

    #[error("table {table}, cell {cell}: {source}")]
    InCell {
        table: String,
        cell: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of a numerical method rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Quadrature { .. } | Error::NoSignChange { .. } | Error::ScanExhausted { .. } => {
                true
            }
            Error::InCell { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_upper_bound(upper: f64) -> Result<()> {
    if upper > 0.0 && upper <= 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            name: "upper bound",
            value: upper,
            domain: "(0, 1]",
        })
    }
}
