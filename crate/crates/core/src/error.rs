use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("invalid rational component {0:?}")]
    Rational(String),
    #[error("invalid function JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("exponent of z12 or z21 is negative in term {0:?}")]
    NegativeExponent([i32; 4]),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("matrix is singular (N = 0)")]
pub struct SingularMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("N(P) vanishes but the function carries a negative power of N")]
    SingularNorm,
    #[error("a negative power of z11 or z22 is evaluated at zero")]
    SingularEntry,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IndexError {
    #[error("invalid coefficient index: {0}")]
    Invalid(String),
    #[error("su2 indices have no component label")]
    Su2NotClassified,
    #[error("tau(Z^-1) N^(2l) is not a constant multiple of the mirrored coefficient for {0}")]
    NotProportional(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpandError {
    #[error("function is not in the span of the candidate basis elements")]
    NotInSpan,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("h * h^-1 is not the identity (defect {0:e})")]
    NotInverse(f64),
    #[error("conformal factor is singular at the evaluation point")]
    SingularFactor,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PairingError {
    #[error("functions lie outside the dual families")]
    OutsideDualFamilies,
    #[error("invalid quadrature spec: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("point is outside the convergence regime of case {0}")]
    RegimeMismatch(String),
    #[error("eigenvalues coincide")]
    CoincidentEigenvalues,
    #[error("|l1*l2| = 1, the geometric k-series diverges")]
    Boundary,
    #[error("moduli violate the semigroup inequalities")]
    Inequality,
    #[error(transparent)]
    Singular(#[from] SingularMatrix),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectorError {
    #[error("function is not in D^h + D^a")]
    NotInSpace,
    #[error("probe violates the regime of case {0}")]
    ProbeRegime(String),
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
