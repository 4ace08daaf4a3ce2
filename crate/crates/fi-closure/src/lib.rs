//! Exact linear-algebraic invariants for families of off-diagonal tensors.
//!
//! The crate provides, over arbitrary-precision rationals:
//!
//! - indexed polynomials with an injection action ([`poly`], [`injection`]);
//! - sparse off-diagonal tensors, rank-one decompositions, flattenings and
//!   their off-diagonal minors ([`tensor`], [`flatten`], [`matrix`]);
//! - canonical generating equations of the bounded-flattening-rank locus,
//!   membership tests and witness search ([`zdl`]);
//! - polynomial maps from matrix columns to tensor families, their
//!   pushforwards and rank bounds ([`equivariant`]);
//! - recursive completion of a member tensor into an explicit bounded
//!   rank-one decomposition ([`completion`]);
//! - a seeded randomized verification harness ([`verify`]).
//!
//! Everything is exact; no floating point is used anywhere.

pub mod error;
pub mod injection;
pub mod matrix;
pub mod poly;
pub mod scalar;

pub mod flatten;
pub mod tensor;

pub mod completion;
pub mod equivariant;
pub mod verify;
pub mod zdl;

pub use error::{Error, Result};
pub use injection::Injection;
pub use scalar::Scalar;

pub use poly::{IndexedPolynomial, Monomial, Var, VarKind};

pub use flatten::{insert_index, off_diag_minor, FlatEntry, FlatteningView};
pub use matrix::QMatrix;
pub use tensor::{
    dense_cap, distinct_tuples, distinct_tuples_over, falling_factorial, pad_embed,
    shift_profile, DenseTensor, OffDiagTensor, RankDecomposition, RankOneTerm, ShiftProfile,
    DEFAULT_DENSE_CAP, DENSE_CAP_ENV,
};

pub use completion::{complete, complete_product, rank_cap, CompletionResult, SliceTrace, TraceNode};
pub use equivariant::{factor_model_preset, EquivariantMap, MapComponent, MatrixPoint};
pub use verify::{run_verify, run_verify_with, SplitMix64, VerifyFailure, VerifyOptions, VerifyReport};
pub use zdl::{
    canonical_generators, canonical_generators_bounded, canonicalize, is_member,
    is_member_via_orbits, membership_witness, orbit_instances, strict_witness, CanonicalEquation,
    MinorWitness,
};
