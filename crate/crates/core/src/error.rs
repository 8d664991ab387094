use thiserror::Error;

/// Error taxonomy shared by the whole kernel. Every variant carries a stable
/// category name (see [`KernelError::category`]) which the CLI prints as its
/// machine-readable failure tag.
#[derive(Debug, Error)]
pub enum KernelError {
    #[error("unknown root system `{0}`")]
    UnknownRootSystem(String),

    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("zero vector where a root was required")]
    ZeroVector,

    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),

    #[error("truncation exhausted at {site}: need trunc24 >= {needed}, have {have}")]
    TruncationExhausted {
        site: String,
        needed: i64,
        have: i64,
    },

    #[error("not divisible: remainder at q-order {n24}/24 (divisor-vanishing hypothesis fails)")]
    NotDivisible { n24: i64 },

    #[error("Jacobian vanishes identically at the working truncation")]
    ZeroJacobian,

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("quotient is not a nonzero constant: {0}")]
    NonConstantQuotient(String),

    #[error("index-0 residue is not a polynomial in E4, E6: {0}")]
    NonModularResidue(String),

    #[error("integrality violation: {0}")]
    IntegralityViolation(String),

    #[error("term cap exceeded: {0}")]
    CapExceeded(String),

    #[error("nonzero cofactor Jacobian with negative quotient index at position {0}")]
    NegativeIndexCofactor(usize),

    #[error("validation failed: {0}")]
    ValidationFailed(String),

    #[error("E8 is not a free-generation instance; use the dedicated nine-form pipeline")]
    E8Excluded,

    #[error("unsupported built-in construction: {0}")]
    UnsupportedConstruction(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("internal invariant broken: {0}")]
    Internal(String),
}

impl KernelError {
    /// Stable category tag, part of the public CLI contract.
    pub fn category(&self) -> &'static str {
        match self {
            KernelError::UnknownRootSystem(_) => "UnknownRootSystem",
            KernelError::LatticeMismatch(_) => "LatticeMismatch",
            KernelError::DimensionMismatch(_) => "DimensionMismatch",
            KernelError::ZeroVector => "ZeroVector",
            KernelError::TruncationTooSmall(_) => "TruncationTooSmall",
            KernelError::TruncationExhausted { .. } => "TruncationExhausted",
            KernelError::NotDivisible { .. } => "NotDivisible",
            KernelError::ZeroJacobian => "ZeroJacobian",
            KernelError::IndexMismatch(_) => "IndexMismatch",
            KernelError::SignatureMismatch(_) => "SignatureMismatch",
            KernelError::NonConstantQuotient(_) => "NonConstantQuotient",
            KernelError::NonModularResidue(_) => "NonModularResidue",
            KernelError::IntegralityViolation(_) => "IntegralityViolation",
            KernelError::CapExceeded(_) => "CapExceeded",
            KernelError::NegativeIndexCofactor(_) => "NegativeIndexCofactor",
            KernelError::ValidationFailed(_) => "ValidationFailed",
            KernelError::E8Excluded => "E8Excluded",
            KernelError::UnsupportedConstruction(_) => "UnsupportedConstruction",
            KernelError::Parse(_) => "ParseError",
            KernelError::Io(_) => "IoError",
            KernelError::Internal(_) => "InternalError",
        }
    }
}
