use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("field mismatch")]
    FieldMismatch,
    #[error("shape error: {0}")]
    Shape(String),
    #[error("not a chain complex: d∘d ≠ 0 at degree {degree}")]
    NotAComplex { degree: i64 },
    #[error("not a chain map: {0}")]
    NotAChainMap(String),
    #[error("simplicial identity violated: {identity} with i={i}, j={j} at level {n}")]
    SimplicialIdentityViolation { identity: &'static str, i: usize, j: usize, n: usize },
    #[error("groupoid law violated ({which}): {witness}")]
    LawViolation { which: &'static str, witness: String },
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("groupoid is not discrete")]
    NotDiscrete,
    #[error("functoriality violated at morphism {morphism}")]
    FunctorialityViolation { morphism: String },
    #[error("naturality violated at morphism {morphism}")]
    NaturalityViolation { morphism: String },
    #[error("base groupoids differ")]
    BaseMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("objects do not match: {0}")]
    ObjectMismatch(String),
    #[error("unsupported base pushout: {0}")]
    UnsupportedBasePushout(String),
    #[error("enumeration needs {needed} elements, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("hom-set enumeration needs a finite field")]
    RationalFieldUnsupported,
    #[error("first argument must live over a discrete base")]
    NotDiscreteBase,
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("format version mismatch: {0}")]
    VersionMismatch(String),
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
}
