use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("zero {index} has gap {eps} outside (0, 1)")]
    ZeroOutsideDisc { index: usize, eps: f64 },

    #[error("zeros must have nondecreasing modulus; entry {index} breaks the ordering")]
    NotOrdered { index: usize },

    #[error("gap {eps:e} of zero {index} underflows below 2^-500")]
    Underflow { index: usize, eps: f64 },

    #[error("evaluation point is within {distance:e} of the pole of factor {index}")]
    PoleProximity { index: usize, distance: f64 },

    #[error("{count} factors exceeds the supported maximum of {max}")]
    TooManyFactors { count: usize, max: usize },

    #[error("construction precondition ({condition}) violated: {detail}")]
    Lemma1Precondition { condition: &'static str, detail: String },

    #[error("radius {0} must lie in (0, 1)")]
    RadiusOutOfRange(f64),

    #[error("contour |z| = r passes within {distance:e} of zero {index}")]
    ContourProximity { index: usize, distance: f64 },

    #[error("zeros {first} and {second} are not separated (pseudo-hyperbolic distance {distance:e})")]
    NotSeparated { first: usize, second: usize, distance: f64 },

    #[error(
        "Gram matrix is not positive semidefinite (smallest eigenvalue {smallest:e}); \
         closest zeros are {first} and {second}"
    )]
    GramNotPsd { smallest: f64, first: usize, second: usize },

    #[error("linear system is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
