use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("field does not match grid: {0}")]
    FieldShape(String),

    #[error("initial data rejected: {0}")]
    InitialData(#[from] InitialDataReport),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("solver failure at t = {time}: non-finite {term} in cell {cell}")]
    NonFinite { time: f64, cell: usize, term: &'static str },

    #[error("solver failure at t = {time}: {source}")]
    AtTime {
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("root finding did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }

    /// True for errors caused by invalid user input (bad config, bad grid,
    /// rejected parameters) rather than by a failing computation.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Grid(_)
            | Error::FieldShape(_)
            | Error::InitialData(_)
            | Error::Param(_)
            | Error::Config(_)
            | Error::Json(_)
            | Error::Csv(_)
            | Error::Io { .. } => true,
            Error::Scenario { source, .. } => source.is_config(),
            Error::NonFinite { .. } | Error::AtTime { .. } | Error::NoConvergence { .. } => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One violated condition on one cell of candidate initial data.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NegativeDensity { cell: usize, value: f64 },
    NonFinite { cell: usize },
    MomentumOnVacuum { cell: usize },
    NonPositiveMass { mass: f64 },
}

/// Every violation found while validating initial data. Cell indices are
/// interior indices (ghost layers excluded), in storage order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InitialDataReport {
    pub violations: Vec<Violation>,
}

impl InitialDataReport {
    pub fn negative_cells(&self) -> Vec<usize> {
        self.violations
            .iter()
            .filter_map(|v| match v {
                Violation::NegativeDensity { cell, .. } => Some(*cell),
                _ => None,
            })
            .collect()
    }

    pub fn vacuum_momentum_cells(&self) -> Vec<usize> {
        self.violations
            .iter()
            .filter_map(|v| match v {
                Violation::MomentumOnVacuum { cell } => Some(*cell),
                _ => None,
            })
            .collect()
    }
}

impl std::fmt::Display for InitialDataReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let neg = self.negative_cells();
        let vac = self.vacuum_momentum_cells();
        let mut parts = Vec::new();
        if !neg.is_empty() {
            parts.push(format!("negative density in {} cell(s) {:?}", neg.len(), neg));
        }
        if !vac.is_empty() {
            parts.push(format!("nonzero momentum on {} vacuum cell(s) {:?}", vac.len(), vac));
        }
        for v in &self.violations {
            match v {
                Violation::NonFinite { cell } => parts.push(format!("non-finite value in cell {cell}")),
                Violation::NonPositiveMass { mass } => {
                    parts.push(format!("total mass {mass} is not positive"))
                }
                _ => {}
            }
        }
        write!(f, "{}", parts.join("; "))
    }
}

impl std::error::Error for InitialDataReport {}
