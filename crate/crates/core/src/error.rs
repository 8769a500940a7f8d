use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("word or point not in language: {0}")]
    NotInLanguage(String),
    #[error("graph is not irreducible ({components} components)")]
    NotIrreducible { components: usize },
    #[error("shift space is empty")]
    EmptyShift,
    #[error("codes cannot be composed: {0}")]
    CompositionMismatch(String),
    #[error("MLC(1) required but fails at level {level}")]
    Mlc1Required { level: usize },
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("cannot extract an MLC(1) subsequence: level {level} is undetermined")]
    CannotExtract { level: usize },
    #[error("size bound exceeded: estimate {estimate} > limit {limit}")]
    TooLarge { estimate: u128, limit: u128 },
    #[error("level {level} is not chain recurrent")]
    NotChainRecurrent { level: usize },
    #[error("level {level} is not transitive")]
    NotTransitive { level: usize },
    #[error("empty image chain at level {level}")]
    EmptyImageChain { level: usize },
    #[error("no component with positive entropy within the cap")]
    NoEntropicComponent,
    #[error("no distal tuple found with period at most {period_bound}")]
    NoDistalTuple { period_bound: usize },
    #[error("points are not chain proximal (cyclic classes {left} and {right})")]
    NotChainProximal { left: usize, right: usize },
    #[error("graph is not mixing: {0}")]
    NotMixing(String),
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),
    #[error("invalid scales: {0}")]
    InvalidScales(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Internal invariant violations map to exit code 1, everything else to 2.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, Error::InternalInvariantViolation(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
