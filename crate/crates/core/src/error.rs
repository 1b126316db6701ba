use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("operation is undefined on the empty word")]
    EmptyWord,
    #[error("symbol {symbol} is outside the alphabet of size {alphabet_size}")]
    SymbolOutOfAlphabet { symbol: u8, alphabet_size: u8 },
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("invalid rational {0:?}: expected P/Q or an integer")]
    InvalidRational(String),
    #[error("threshold must be at least 1, got {0}")]
    ThresholdBelowOne(String),
    #[error("word length {len} exceeds the brute-force bound {bound}")]
    BoundExceeded { len: usize, bound: usize },
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("morphism is not prolongable on symbol {0}")]
    NotProlongable(u8),
    #[error("morphism does not map its alphabet into itself")]
    AlphabetMismatch,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid checkpoint: {0}")]
    InvalidCheckpoint(String),
    #[error("unknown morphism {0:?}")]
    UnknownMorphism(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
