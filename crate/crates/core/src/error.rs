use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {re} + {im}i is not strictly inside the unit disk")]
    OutsideDisk { re: f64, im: f64 },

    #[error("not a disk automorphism: {0}")]
    NotDiskAutomorphism(String),

    #[error("invalid group presentation: {0}")]
    InvalidGroup(String),

    #[error("orbit enumeration exceeded the cap of {cap} points")]
    OrbitExplosion { cap: usize },

    #[error("orbit has no convergence certificate (generic group in strict mode)")]
    NoTailBound,

    #[error("|z| = {modulus} exceeds the evaluation radius {limit}")]
    TooCloseToBoundary { modulus: f64, limit: f64 },

    #[error("character extraction inconclusive: {0}")]
    InconclusiveCharacter(String),

    #[error("kernel variant {0} does not support this operation")]
    UnsupportedVariant(&'static str),

    #[error("points {i} and {j} coincide (pseudo-hyperbolic distance {distance:e})")]
    DuplicatePoints { i: usize, j: usize, distance: f64 },

    #[error("nodes {i} and {j} are aliased by the inner function but carry different targets")]
    AliasedNodes { i: usize, j: usize },

    #[error("eigenvalue iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("interpolation problem is infeasible (minimum Pick eigenvalue {min_eigenvalue:e})")]
    Infeasible { min_eigenvalue: f64 },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::InconclusiveCharacter(_)
                | Error::NumericalBreakdown(_)
                | Error::OrbitExplosion { .. }
        )
    }
}
