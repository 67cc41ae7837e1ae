use thiserror::Error;

/// Errors produced by grid construction, functional evaluation and solvers.
#[derive(Debug, Error)]
pub enum ChoquardError {
    #[error("grid must have at least 16 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("truncation radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("profile length {got} does not match grid size {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("profile contains non-finite values")]
    NonFiniteProfile,
    #[error("Lq norm requires q >= 1, got {0}")]
    InvalidNormExponent(f64),
    #[error("exponent p={0} outside admissible range ({1}, {2})")]
    ExponentOutOfRange(f64, f64, f64),
    #[error("p out of range [2, 7/3)")]
    SolverExponentOutOfRange,
    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("resolvent requires lambda > 0, got {0}")]
    NonPositiveLambda(f64),
    #[error("multipole evaluation produced non-finite values at ell={0}")]
    MultipoleOverflow(usize),
    #[error("scaling orbit needs K > 0 and D > 0 (K={k}, D={d})")]
    DegenerateScalingOrbit { k: f64, d: f64 },
    #[error("solver did not converge within {0} iterations")]
    NonConvergence(usize),
    #[error("energy increased after backtracking was exhausted at iteration {0}")]
    EnergyIncrease(usize),
    #[error("multiplier iterate left (0, inf): lambda={0}")]
    LambdaDiverged(f64),
    #[error("sector ell={0} out of verified scope (supported: 0, 1, 2)")]
    SectorOutOfScope(usize),
    #[error("dense eigensolve failed to converge")]
    EigensolveFailure,
    #[error("deflated sector ell={ell} still has nonpositive eigenvalue {mu}")]
    NonCoercive { ell: usize, mu: f64 },
    #[error("linear solve for (Id+K) did not converge (residual {0})")]
    SingularIftSolve(f64),
    #[error("decay window too shallow: Q(0.8 r_max)/Q(0.4 r_max) = {0:.3e} >= 1e-2")]
    InsufficientDecayWindow(f64),
    #[error("rearrangement requires a nonnegative profile (min value {0})")]
    NegativeInput(f64),
    #[error("sweep range invalid: [{0}, {1}]")]
    InvalidSweepRange(f64, f64),
    #[error("sweep aborted at p={p}: {source}")]
    SweepAborted {
        p: f64,
        #[source]
        source: Box<ChoquardError>,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed input file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, ChoquardError>;
