use thiserror::Error;

/// Errors raised while building systems or computing their zeros.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZsfError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch in {what}: expected {expected}, got {actual}")]
    Dimension {
        what: &'static str,
        expected: String,
        actual: String,
    },

    #[error("matrix {what} has a non-finite entry at ({row}, {col})")]
    NonFinite {
        what: &'static str,
        row: usize,
        col: usize,
    },

    #[error("matrix is empty")]
    Empty,

    #[error("matrix is singular (rank {rank} of {dim}, condition estimate {cond:.3e})")]
    Singular { rank: usize, dim: usize, cond: f64 },

    #[error("left null space is trivial: {rows}x{cols} matrix has full row rank")]
    EmptyNullSpace { rows: usize, cols: usize },

    #[error("polynomial has no nonzero coefficient")]
    ZeroPolynomial,

    #[error("eigenvalue iteration did not converge")]
    EigenFailure,

    #[error("invalid tolerances: {0}")]
    InvalidTolerances(String),

    #[error("numerator degree {num} exceeds denominator degree {den}")]
    ImproperTransferFunction { num: usize, den: usize },

    #[error("output {output} has no relative degree within {bound} Markov parameters")]
    NoRelativeDegree { output: usize, bound: usize },

    #[error("output {output} has nonzero direct feedthrough; apply dynamic extension first")]
    NonzeroFeedthrough { output: usize },

    #[error("tall systems are not supported ({inputs} inputs, {outputs} outputs)")]
    TallSystemUnsupported { inputs: usize, outputs: usize },

    #[error("[B_z; C̄] cannot be made full rank (rank {rank}, required {required})")]
    DegenerateStack { rank: usize, required: usize },

    #[error("Rosenbrock pencil determinant vanishes identically")]
    DegeneratePencil,

    #[error("supplied B_n is invalid: {0}")]
    InvalidNormalBasis(String),
}

pub type Result<T> = std::result::Result<T, ZsfError>;
