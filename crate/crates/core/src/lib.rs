//! Exact-arithmetic toolkit for the toric mirror-symmetry pipeline.
//!
//! The crate implements, over `BigRational`/`BigInt` arithmetic throughout:
//!
//! * lattice polytopes: face lattices, reflexivity, polar duality, nef
//!   partitions, and Batyrev-style Hodge numbers ([`polytope`]);
//! * point configurations and their Gale data: homogenised point matrices for
//!   hypersurfaces and complete intersections, saturated kernel lattices
//!   ([`config`]);
//! * regular triangulations: placing seeds, bistellar flips, exhaustive
//!   enumeration with exact LP regularity certificates, GKZ vectors,
//!   secondary-polytope charts ([`triangulation`]);
//! * GKZ hypergeometric systems: lattice box operators, Euler operators,
//!   ordinary operators recovered from coefficient ratios, and exact residual
//!   checks ([`gkz`]);
//! * the even cohomology ring of the associated simplicial toric variety:
//!   Stanley–Reisner data, intersection numbers, Chern class data
//!   ([`toricring`]);
//! * cohomology-valued hypergeometric series and the integral symplectic
//!   period package: Frobenius bases, mirror maps, monodromy around the large
//!   complex structure limit, and monodromy weight filtrations ([`periods`]).
//!
//! All computations are exact; nothing in the crate uses floating point.
//! Built-in worked examples live in [`fixtures`] and drive the test suite.

pub mod config;
pub mod error;
pub mod fixtures;
pub mod gkz;
pub mod jsonio;
pub mod linalg;
pub mod lp;
pub mod num;
pub mod periods;
pub mod polytope;
pub mod series;
pub mod toricring;
pub mod triangulation;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
