//! Crate-wide error type.

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("row {row} of B has nonzero coordinate sum {sum}")]
    RowSumNonzero { row: usize, sum: BigInt },

    #[error("column {col} of B is zero")]
    ZeroColumn { col: usize },

    #[error("matrix has rank {found}, expected {expected}")]
    RankDeficient { expected: usize, found: usize },

    #[error("row lattice of B is not saturated: {witness:?} lies in the saturation but not in the lattice")]
    NotSaturated { witness: Vec<BigInt> },

    #[error("no linear form h with h(a_i) = 1 exists: equations inconsistent at column {col} of A")]
    NoLinearForm { col: usize },

    #[error("non-generic direction: lies on the hyperplane spanned by columns {indices:?}")]
    NonGenericDirection { indices: Vec<usize> },

    #[error("degenerate fan: d = 0")]
    DegenerateFan,

    #[error("incomplete chamber enumeration: adjacency graph is disconnected")]
    IncompleteChambers,

    #[error("cotriangle {indices:?} produced {found} solution points, expected {expected}")]
    SolutionCountMismatch {
        indices: Vec<usize>,
        expected: BigInt,
        found: usize,
    },

    #[error("resonant parameters: solution point of cotriangle {indices:?} has integral gamma^mu at column {col}")]
    Resonant { indices: Vec<usize>, col: usize },

    #[error("tau points do not differ by integers: tau[{index}] - tau[0] is non-integral")]
    NonIntegralTauDifference { index: usize },

    #[error("no Mellin-Barnes basis: at most {found} tau points in (1/2)Z_B for every searched offset, need {required}")]
    NoMellinBarnesBasis { required: usize, found: usize },

    #[error("ill-conditioned matrix: condition estimate {cond:.3e} exceeds {max:.3e} and no higher working precision is available")]
    IllConditioned { cond: f64, max: f64 },

    #[error("singular matrix")]
    Singular,

    #[error("zero diagonal entry in Delta at position {index}: gamma^mu integral outside the cotriangle")]
    ZeroDiagonalEntry { index: usize },

    #[error("numerically degenerate form: eigenvalue {value:.3e} within tolerance of zero")]
    DegenerateForm { value: f64 },

    #[error("signature mismatch: Delta sign counts ({delta_pos},{delta_neg}) vs H eigenvalue sign counts ({eig_pos},{eig_neg})")]
    SignatureMismatch {
        delta_pos: usize,
        delta_neg: usize,
        eig_pos: usize,
        eig_neg: usize,
    },

    #[error("pole collision with divisor: gamma^mu at column {col} is integral")]
    PoleCollision { col: usize },

    #[error("non-simple pole: factors {i} and {j} of the one-variable form share a root")]
    NonSimplePole { i: usize, j: usize },

    #[error("degenerate factor: column {col} vanishes identically on the chosen torus point")]
    DegenerateFactor { col: usize },

    #[error("cotriangulations are not adjacent")]
    NotAdjacent,

    #[error("tau lies outside the open zonotope")]
    TauOutsideZonotope,

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
