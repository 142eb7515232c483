use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid piece `{piece}`: {message}")]
    Validation { piece: String, message: String },

    #[error("unresolved feature `{piece}`: width {width} needs h < {required_h} (got h = {h})")]
    UnresolvedFeature {
        piece: String,
        width: f64,
        h: f64,
        required_h: f64,
    },

    #[error("problem has {n_dof} degrees of freedom, above the cap of {cap}")]
    Resource { n_dof: usize, cap: usize },

    #[error("eigensolver did not converge: {message} (max residual {max_residual:e})")]
    Solver { message: String, max_residual: f64 },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("spectral point {lambda} lies within tolerance of the discrete spectrum")]
    Singular { lambda: f64 },

    #[error("eigenvalues are only known up to {known_up_to}, need {requested}")]
    Incomplete { requested: f64, known_up_to: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cell {cell:?}: {source}")]
    Cell {
        cell: Vec<i64>,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown check id `{0}`")]
    UnknownCheck(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag used in CLI error JSON and FFI status mapping.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Validation { .. } => "validation",
            Error::UnresolvedFeature { .. } => "unresolved_feature",
            Error::Resource { .. } => "resource",
            Error::Solver { .. } => "solver",
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::Singular { .. } => "singular",
            Error::Incomplete { .. } => "incomplete",
            Error::Precondition(_) => "precondition",
            Error::Cell { source, .. } => source.kind(),
            Error::Config(_) => "config",
            Error::UnknownCheck(_) => "unknown_check",
            Error::UnknownFamily(_) => "unknown_family",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    pub(crate) fn in_cell(self, cell: &[i64]) -> Error {
        Error::Cell {
            cell: cell.to_vec(),
            source: Box::new(self),
        }
    }
}
