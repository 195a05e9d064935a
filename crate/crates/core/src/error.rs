use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("tolerances must lie in (0, 1): rank_rel={rank_rel}, eq_abs={eq_abs}")]
    InvalidTolerance { rank_rel: f64, eq_abs: f64 },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPsd { eigenvalue: f64 },

    #[error("column {column} of the right-hand side leaves the range (residual {residual:.3e})")]
    Unsolvable { column: usize, residual: f64 },

    #[error("relation is not selfadjoint (gap to its adjoint {gap:.3e})")]
    NotSelfAdjoint { gap: f64 },

    #[error("relation is not symmetric")]
    NotSymmetric,

    #[error("relation is not nonnegative (operator-part eigenvalue {eigenvalue:.3e})")]
    NotNonnegative { eigenvalue: f64 },

    #[error("order A <= B does not hold")]
    OrderViolated,

    #[error("P_S(dom A) is not contained in dom A (witness residual {residual:.3e})")]
    InvarianceViolated {
        witness: Vec<[f64; 2]>,
        residual: f64,
    },

    #[error("block does not lie in its component space: {0}")]
    ComponentMismatch(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("condition violated: {0}")]
    ConditionViolated(String),

    #[error("invalid instance spec: {0}")]
    SpecInvalid(String),

    #[error("malformed input: {0}")]
    Parse(String),
}
