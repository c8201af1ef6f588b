use thiserror::Error;

use crate::report::Report;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid rational literal {0:?}")]
    ParseRational(String),
    #[error("structure constants do not define a unital associative algebra:\n{0}")]
    InvalidAlgebra(Report),
    #[error("action matrices do not define a bimodule:\n{0}")]
    InvalidBimodule(Report),
    #[error("action matrices do not define a left module:\n{0}")]
    InvalidLeftModule(Report),
    #[error("objects are defined over different algebras")]
    AlgebraMismatch,
    #[error("unknown builtin {0:?}")]
    UnknownBuiltin(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
