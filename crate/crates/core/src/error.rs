use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamaError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("empty matrix or vector")]
    Empty,

    #[error("matrix is not Hermitian (relative deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive definite: pivot {index} has value {value:e}")]
    NotPositiveDefinite { index: usize, value: f64 },

    #[error("Jacobi eigensolver did not converge after {rotations} rotations (off-diagonal norm {off_diagonal:e})")]
    EigenNotConverged { rotations: usize, off_diagonal: f64 },

    #[error("power method did not converge after {iterations} iterations (last change {residual:e})")]
    PowerNotConverged { iterations: usize, residual: f64 },

    #[error("zero dominant eigenvalue: numerator matrix annihilates every iterate")]
    ZeroDominantEigenvalue,

    #[error("GEPort power method failed at removal step {step}: {source}")]
    Geport {
        step: usize,
        #[source]
        source: alloc::boxed::Box<FamaError>,
    },

    #[error("invalid topology: {0}")]
    Topology(&'static str),

    #[error("correlation matrix PSD repair failed: eigenvalue {eigenvalue:e} below tolerance {tolerance:e}")]
    CorrelationNotPsd { eigenvalue: f64, tolerance: f64 },

    #[error("invalid configuration: {0}")]
    Config(&'static str),

    #[error("index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },

    #[error("exhaustive search refused: C({n}, {l}) = {count} subsets exceeds the limit of {limit}")]
    SubsetLimit {
        n: usize,
        l: usize,
        count: u128,
        limit: u128,
    },
}
