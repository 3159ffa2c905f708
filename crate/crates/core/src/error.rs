use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("p = {p} is not congruent to {residue} mod {modulus}")]
    Incongruent { p: u64, modulus: u64, residue: u64 },

    #[error("unsupported field size q = {0} (only 2 and 4)")]
    UnsupportedField(u32),

    #[error("0 has no discrete index")]
    ZeroHasNoIndex,

    #[error("0 has no multiplicative inverse")]
    ZeroInverse,

    #[error("closed form for {constant} in branch ({branch}) gives numerator {numerator}, not a nonnegative multiple of 36")]
    ClosedFormMismatch {
        constant: char,
        branch: char,
        numerator: i64,
    },

    #[error("identity violation: {0}")]
    IdentityViolation(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("exhaustive enumeration of {q}^{k} words exceeds 2^{limit_bits}")]
    TooLarge { q: u32, k: usize, limit_bits: u32 },

    #[error("generator matrix is rank deficient")]
    RankDeficient,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
