use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown variable `{name}` in chart {chart}")]
    UnknownVariable { name: String, chart: String },

    #[error("variable `{name}` declared twice in chart {chart}")]
    DuplicateVariable { name: String, chart: String },

    #[error("chart mismatch: {left} vs {right}")]
    ChartMismatch { left: String, right: String },

    #[error("chart {0} carries no canonical bracket")]
    NoBracket(String),

    #[error("convention error: {0}")]
    Convention(String),

    #[error("argument outside the projector's abelian subalgebra: {0}")]
    Projector(String),

    #[error("calibration fault in {identity}: {detail}")]
    Calibration { identity: String, detail: String },

    #[error("invalid algebroid data: {0}")]
    InvalidData(String),

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
