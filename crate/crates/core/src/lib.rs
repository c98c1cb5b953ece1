//! Exact sparse arithmetic for lattice vertex operators twisted by a quantum torus.
//!
//! The crate builds, from the ground up:
//!
//! - [`scalars`]: complex scalars with branch-fixed powers over a finitely
//!   generated multiplicative group (a root of unity times free generators),
//! - [`lattice`]: integer lattices with a bimultiplicative two-cocycle,
//! - [`qtorus`]: clock/shift matrices, twisted loop elements and their brackets,
//! - [`fock`]: a truncated symmetric-algebra Fock space with group-like charges,
//! - [`vertex`]: vertex operators and their mode expansions acting on Fock space,
//! - [`verify`]: commutator and homomorphism checks packaged as named suites.

pub mod error;
pub mod fock;
pub mod lattice;
pub mod qtorus;
pub mod scalars;
pub mod verify;
pub mod vertex;

pub use error::CoreError;
pub use fock::{FockVector, Space, State};
pub use lattice::Lattice;
pub use qtorus::{LhatElement, LoopElement, QMatrix, SparseMatrix};
pub use scalars::{AdmissibleGroup, GroupElement, Half, C64};
pub use verify::{
    root_of_unity_order, run_report, suite_brief, CaseResult, Report, SuiteOutcome, SuiteParams,
    SUITE_NAMES,
};
pub use vertex::ModeOp;
