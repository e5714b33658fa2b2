use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A family parameter violates its admissibility constraint.
    #[error("inadmissible parameters for {family}: {reason}")]
    Admissibility {
        family: &'static str,
        reason: String,
    },

    /// Argument outside the domain of the operation (e.g. `t < 1`, `s <= 1`).
    #[error("domain error: {0}")]
    Domain(String),

    /// A tail integral or series does not converge for this function.
    #[error("divergent tail: {0}")]
    Divergence(String),

    /// Inverse requested for a value outside the range of the function.
    #[error("value {value} outside range (0, {max}]")]
    Range { value: f64, max: f64 },

    /// Imaginary residue of a supposedly real polynomial exceeded tolerance.
    #[error("conjugate symmetry violated: imaginary residue {residue:e} exceeds {bound:e}")]
    Symmetry { residue: f64, bound: f64 },

    /// Grid does not satisfy the oversampling rule.
    #[error("grid of {points} points too coarse for support bound {support} (need power of two >= {required})")]
    Grid {
        points: usize,
        support: u64,
        required: usize,
    },

    /// Truncation of an infinite series could not meet the requested tolerance.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// Exhaustive search would enumerate too many frequency sets.
    #[error("exhaustive search needs {subsets} subsets (limit {limit})")]
    Combinatorial { subsets: u128, limit: u128 },

    /// A theorem hypothesis does not hold for the supplied parameters.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// Malformed input (CLI strings, JSON).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
