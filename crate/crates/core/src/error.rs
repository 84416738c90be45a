use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("world count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("world {world} out of range 0..{n}")]
    WorldOutOfRange { world: usize, n: usize },

    #[error("unknown modality `{0}`")]
    UnknownModality(String),

    #[error("duplicate modality `{0}` in alphabet")]
    DuplicateModality(String),

    #[error("invalid modality name `{0}`")]
    InvalidModalityName(String),

    #[error("alphabet mismatch: expected [{expected}], found [{found}]")]
    AlphabetMismatch { expected: String, found: String },

    #[error("alphabets overlap on `{0}`")]
    OverlappingAlphabets(String),

    #[error("empty alphabet")]
    EmptyAlphabet,

    #[error("expected {expected} summands, got {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("variable p{var} out of range (model has {k} variables)")]
    VariableOutOfRange { var: u32, k: usize },

    #[error("formula uses more than one modality: {0}")]
    NotUnimodal(String),

    #[error("syntax error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("enumeration needs 2^{needed} valuations, cap is 2^{cap}")]
    CapExceeded { needed: usize, cap: usize },

    #[error("enumeration budget exceeded: {needed} candidates, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("world {world} lies outside the relativizing set")]
    OutsideRelativization { world: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("world {0} is not a root")]
    NotARoot(usize),

    #[error("frame has no root")]
    NoRoot,

    #[error("invalid input: {0}")]
    Invalid(String),
}
