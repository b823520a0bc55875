use crate::scalar::Scalar;
use thiserror::Error;

/// Data attached to a failed obstruction solve: the exact cocycle that is not
/// a boundary, printed in the target's degreewise basis.
#[derive(Debug, Clone)]
pub struct Obstruction {
    /// Generator whose extension failed.
    pub generator: String,
    /// Degree of the cocycle in the target.
    pub degree: i32,
    /// Exact cocycle, as (basis label, coefficient) pairs.
    pub cocycle: Vec<(String, Scalar)>,
    /// Dimension of the homology of the target in that degree.
    pub homology_dim: usize,
}

impl std::fmt::Display for Obstruction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "generator {}: cocycle of degree {} [",
            self.generator, self.degree
        )?;
        for (k, (label, c)) in self.cocycle.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{} {}", crate::scalar::fmt_q(c), label)?;
        }
        write!(f, "] is not a boundary (H dim {})", self.homology_dim)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not a complex: d∘d ≠ 0 ({0})")]
    NotAComplex(String),

    #[error("flavor mismatch: {0}")]
    Flavor(String),

    #[error("degree error: {0}")]
    Degree(String),

    #[error("derivation shift is not uniform: {0}")]
    Shift(String),

    #[error("subalgebra is not closed under the differential: {0}")]
    NotClosed(String),

    #[error("degree {degree} is outside the certified cutoff {cutoff}")]
    Cutoff { degree: i32, cutoff: i32 },

    #[error("obstruction is not a boundary: {0}")]
    Obstruction(Box<Obstruction>),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed homotopy at generator {generator}: {detail}")]
    MalformedHomotopy { generator: String, detail: String },

    #[error("hypotheses not verifiable within the cutoff: {0}")]
    Hypothesis(String),

    #[error("operator is not nilpotent at level {level}: {detail}")]
    Nilpotence { level: i32, detail: String },

    #[error("connectivity requirement violated: {0}")]
    Connectivity(String),

    #[error("parse error at line {line}, column {col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },

    #[error("internal contradiction with a theorem whose hypotheses were verified: {0}")]
    BugClass(String),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
