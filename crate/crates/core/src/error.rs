use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate domain: acceptance rate {rate:.3e} after {trials} rejection trials")]
    DegenerateDomain { rate: f64, trials: u64 },

    #[error("potential takes value {value} < 1 at r = {r}; shift it before solving")]
    PotentialBelowOne { r: f64, value: f64 },

    #[error("tabulated potential: {0}")]
    Table(String),

    #[error(
        "mesh width h = {h:.4e} is not below the coercivity threshold {threshold:.4e} \
         (Lipschitz constant of V = {lipschitz:.4e})"
    )]
    CoercivityViolated { h: f64, threshold: f64, lipschitz: f64 },

    #[error("element [{a}, {b}] touches the origin with a hat that does not vanish there (j = {j})")]
    SingularElement { a: f64, b: f64, j: usize },

    #[error("radial system for j = {j}, lambda = {lambda} has a degenerate null space (pivot ratio {ratio:.3e})")]
    DegenerateNullSpace { j: usize, lambda: f64, ratio: f64 },

    #[error("radius {r} outside [0, {radius}]")]
    OutOfRange { r: f64, radius: f64 },

    #[error("{rows} collocation points cannot determine {columns} coefficients")]
    InsufficientPoints { rows: usize, columns: usize },

    #[error("collocation matrix is rank deficient (condition estimate {condition:.3e})")]
    RankDeficient { condition: f64 },

    #[error("coefficient vector is zero")]
    ZeroCoefficients,

    #[error("dense decomposition failed to converge")]
    Decomposition,

    #[error("spurious minimum near lambda = {lambda}: F rose from {previous:.3e} to {current:.3e}")]
    SpuriousMinimum { lambda: f64, previous: f64, current: f64 },

    #[error("at lambda = {lambda}: {source}")]
    AtLambda {
        lambda: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_lambda(self, lambda: f64) -> Self {
        match self {
            e @ Error::AtLambda { .. } => e,
            e => Error::AtLambda {
                lambda,
                source: Box::new(e),
            },
        }
    }
}
