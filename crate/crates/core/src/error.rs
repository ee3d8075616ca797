use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("degenerate distance: |x~ - y| = {distance:e} is below {threshold:e}")]
    DegenerateDistance { distance: f64, threshold: f64 },
    #[error("evaluation point is {distance:e} from the interface, closer than {threshold:e}")]
    NearSurface { distance: f64, threshold: f64 },
    #[error("Laplace abscissa {got} does not match the stretching abscissa {expected}")]
    Abscissa { got: f64, expected: f64 },
    #[error("non-finite field value in {field} at step {step}, index ({i}, {j}, {k})")]
    NonFinite {
        field: &'static str,
        step: u64,
        i: usize,
        j: usize,
        k: usize,
    },
    #[error("recording needs {required} bytes, budget is {budget}")]
    StorageBudget { required: u64, budget: u64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("decay fit needs at least 3 points above 3x floor ({floor:e}), found {found}")]
    InsufficientPoints { floor: f64, found: usize },
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Abscissa { .. } | Error::StorageBudget { .. } => 1,
            Error::NonFinite { .. } | Error::DegenerateDistance { .. } | Error::NearSurface { .. } => 2,
            Error::Assertion(_) | Error::InsufficientPoints { .. } | Error::Shape(_) => 3,
            Error::Io(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
