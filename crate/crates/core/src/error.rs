//! Crate error type.

use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Mathematical preconditions are reported as dedicated variants so callers
/// (and the CLI) can distinguish "bad input" from "this chart genuinely does
/// not support the requested construction".
#[derive(Debug, Error)]
pub enum Error {
    /// The point set does not affinely span the ambient lattice.
    #[error("point set is not full-dimensional: affine rank {rank} in dimension {dim}")]
    NotFullDimensional { rank: usize, dim: usize },

    /// The polytope does not contain the origin in its interior.
    #[error("polytope does not contain the origin in its interior")]
    OriginNotInterior,

    /// Reflexivity was required but fails (some facet is not at lattice distance 1).
    #[error("polytope is not reflexive: facet {facet} has lattice distance {distance} from the origin")]
    NotReflexive { facet: usize, distance: String },

    /// The polar dual is not a lattice polytope; carries the fractional
    /// vertices for inspection.
    #[error("polar dual is not a lattice polytope; fractional vertices: {vertices}")]
    NonLatticeDual { vertices: String },

    /// Hodge-number formulas are implemented for four-dimensional reflexive
    /// polytopes only.
    #[error("Hodge numbers are only computed in ambient dimension 4 (got {dim})")]
    HodgeDimension { dim: usize },

    /// A nef partition failed validation.
    #[error("invalid nef partition: {reason}")]
    InvalidNefPartition { reason: String },

    /// A triangulation chart whose tangent cone is not unimodular with
    /// respect to the kernel lattice; local series coordinates would be
    /// fractional.  Carries the offending generator matrix determinant.
    #[error("chart at this triangulation is not unimodular (index {index}); supply a basis manually")]
    NonUnimodularChart { index: String },

    /// The tangent cone of the secondary polytope at this triangulation is
    /// not simplicial, so no canonical chart basis exists.
    #[error("secondary cone at this triangulation is not simplicial: {generators} generators for rank {rank}")]
    NonSimplicialChart { generators: usize, rank: usize },

    /// Frobenius deformation fails: a coefficient ratio has a linear factor
    /// with zero constant term, so the series support is not stable under the
    /// deformation.
    #[error("series support is unstable under deformation: factor {factor} vanishes at the base point")]
    SupportUnstable { factor: String },

    /// Exponent system A c = beta has no solution.
    #[error("no exponent vector solves the Euler constraints")]
    NoSolution,

    /// A chart that is not maximal (some simplex misses an origin column or
    /// a column is unused), so the holomorphic series solution would not be
    /// unique.
    #[error("chart is not maximal: {reason}")]
    NonMaximalChart { reason: String },

    /// Gamma-expansion depth beyond the implemented grading.
    #[error("gamma expansion depth {depth} exceeds the supported maximum {max}")]
    DepthExceeded { depth: usize, max: usize },

    /// Ring generators do not pair correctly with the chart basis.
    #[error("ring/chart pairing mismatch: {reason}")]
    PairingMismatch { reason: String },

    /// The simplices do not use every point of the configuration.
    #[error("triangulation is not maximal: {reason}")]
    NotMaximal { reason: String },

    /// The induced fan is not complete (rays do not surround the origin).
    #[error("fan is not complete: {reason}")]
    NotComplete { reason: String },

    /// Toric divisor classes do not account for the full Picard lattice.
    #[error("toric divisor classes span rank {toric_rank} but h11 = {h11}; twisted sectors present")]
    TwistedSectorMismatch { toric_rank: usize, h11: usize },

    /// A test class failed the strict-convexity (ampleness) wall check.
    #[error("support function is not strictly convex across wall {wall}")]
    NotConvex { wall: String },

    /// Two objects built over different coefficient rings were combined.
    #[error("ring mismatch: {reason}")]
    RingMismatch { reason: String },

    /// A series inversion required an invertible leading coefficient.
    #[error("series is not invertible: {reason}")]
    NotInvertible { reason: String },

    /// An exact linear solve for a monodromy/connection matrix failed,
    /// usually indicating the series order is too low.
    #[error("linear solve failed: {reason}")]
    SolveFailed { reason: String },

    /// A matrix expected to be nilpotent is not.
    #[error("matrix is not nilpotent: {reason}")]
    NotNilpotent { reason: String },

    /// Linear-programming subroutine found the problem unbounded where a
    /// bounded optimum was required.
    #[error("linear program unexpectedly unbounded")]
    LpUnbounded,

    /// A scale guard tripped (enumeration exceeded the configured bound).
    #[error("{what} exceeded the configured limit of {limit}; raise {env_var} to continue")]
    ScaleGuard {
        what: String,
        limit: usize,
        env_var: String,
    },

    /// Input validation failure (malformed data, mismatched dimensions, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Unknown fixture name.
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    /// JSON (de)serialisation failure.
    #[error("serialisation error: {0}")]
    Json(#[from] serde_json::Error),

    /// I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code for reports and exit diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotFullDimensional { .. } => "not-full-dimensional",
            Error::OriginNotInterior => "origin-not-interior",
            Error::NotReflexive { .. } => "not-reflexive",
            Error::NonLatticeDual { .. } => "non-lattice-dual",
            Error::HodgeDimension { .. } => "hodge-dimension",
            Error::InvalidNefPartition { .. } => "invalid-nef-partition",
            Error::NonUnimodularChart { .. } => "non-unimodular-chart",
            Error::NonSimplicialChart { .. } => "non-simplicial-chart",
            Error::SupportUnstable { .. } => "support-unstable",
            Error::NoSolution => "no-solution",
            Error::NonMaximalChart { .. } => "non-maximal-chart",
            Error::DepthExceeded { .. } => "depth-exceeded",
            Error::PairingMismatch { .. } => "pairing-mismatch",
            Error::NotMaximal { .. } => "not-maximal",
            Error::NotComplete { .. } => "not-complete",
            Error::TwistedSectorMismatch { .. } => "twisted-sector-mismatch",
            Error::NotConvex { .. } => "not-convex",
            Error::RingMismatch { .. } => "ring-mismatch",
            Error::NotInvertible { .. } => "not-invertible",
            Error::SolveFailed { .. } => "solve-failed",
            Error::NotNilpotent { .. } => "not-nilpotent",
            Error::LpUnbounded => "lp-unbounded",
            Error::ScaleGuard { .. } => "scale-guard",
            Error::InvalidInput(_) => "invalid-input",
            Error::UnknownFixture(_) => "unknown-fixture",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}
