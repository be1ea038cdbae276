use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty word has no period")]
    EmptyWord,
    #[error("letter {letter} outside alphabet of size {alphabet_size}")]
    LetterOutOfRange { letter: u32, alphabet_size: u32 },
    #[error("alphabet size {0} not in 1..=26")]
    BadAlphabet(u32),
    #[error("cannot parse word {0:?}")]
    ParseWord(String),
    #[error("cannot parse pattern {0:?}: expected letters A-Z")]
    ParsePattern(String),
    #[error("pattern {0} is not doubled")]
    NotDoubled(String),
    #[error("exponent {0} must be at least 1")]
    BadExponent(String),
    #[error("prefix of length {k} of {pattern} is not made of distinct variables")]
    PrefixNotDistinct { pattern: String, k: usize },
    #[error("variable {var} of {pattern} occurs once but is determined by the prefix")]
    DegeneratePrefix { pattern: String, var: char },
    #[error("series evaluated at x = {x} outside [0, {radius})")]
    OutsideDomain { x: f64, radius: f64 },
    #[error("series has no positive root; bound unavailable")]
    NoRoot,
    #[error("every variable of {0} must occur exactly twice")]
    NotTwiceEach(String),
    #[error("power iteration did not converge after {iterations} iterations (last estimate {estimate})")]
    NoConvergence { iterations: usize, estimate: f64 },
    #[error("word of length {len} with {letters} letters is not of length {n}^{letters}")]
    SplittedPrecondition { len: usize, letters: usize, n: usize },
    #[error("word {0} is not 2-splitted")]
    NotSplitted(String),
    #[error("block count must be positive")]
    ZeroBlocks,
    #[error("only 4 or 5 variables are supported, got {0}")]
    UnsupportedVarCount(usize),
    #[error("morphism: {0}")]
    Morphism(String),
    #[error("unknown corpus entry {0:?}")]
    UnknownEntry(String),
}

pub type Result<T> = std::result::Result<T, Error>;
