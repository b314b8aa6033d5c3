use thiserror::Error;

use crate::portfolio::Quarter;

pub type Result<T, E = AsrfError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum AsrfError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("root finder did not converge after {iterations} iterations (bracket width {width})")]
    Convergence { iterations: usize, width: f64 },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("coverage error at {quarter}: {reason}")]
    Coverage { quarter: Quarter, reason: String },

    #[error(
        "infeasible target {target}{}: attainable conditional loss is [{min}, {max}]",
        at_quarter(.quarter)
    )]
    Infeasible {
        quarter: Option<Quarter>,
        target: f64,
        min: f64,
        max: f64,
    },

    #[error("{file}:{line}: column `{column}`: {message}")]
    Parse {
        file: String,
        line: u64,
        column: String,
        message: String,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn at_quarter(quarter: &Option<Quarter>) -> String {
    quarter.map(|q| format!(" at {q}")).unwrap_or_default()
}
