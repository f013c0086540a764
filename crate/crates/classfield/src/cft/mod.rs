//! Spectra and their representations, Tate groups, valuations, Fesenko–Neukirch data
//! and reciprocity morphisms.

mod lattice;
mod reciprocity;
mod representation;
pub mod scenario;
mod spectrum;
mod tate;
mod valuation;

use thiserror::Error;

use crate::abelian::AbelianError;
use crate::group::GroupError;
use crate::mackey::MackeyError;
use crate::ramification::RamificationError;
use crate::system::{SubId, SystemError};
use crate::transfer::TransferError;

pub use lattice::{
    lattice_property_check, norm_index_report, reduced_verification, NormAssignment, ReductionMode, ReductionOutcome,
};
pub use reciprocity::{ReciprocityData, ReciprocityMorphism, ReciprocityTable, TildeValue};
pub use representation::{
    induction_representation, lift_functor, tautological_cft, tautological_comparison, validate_rep_morphism,
    validate_representation, InductionRepresentation, RepMorphism, Representation, Tautological,
};
pub use spectrum::{Coherence, PairId, Spectrum};
pub use tate::{check_class_field_axiom, check_hilbert90, tate_h0, tate_hminus1, TateMinusOne};
pub use valuation::{induce_valuation_family, validate_valuation, OmegaSpec, ValuationFamily, ValuationSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CftError {
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("pair ({0}, {1}) is not in the spectrum")]
    UnknownPair(SubId, SubId),
    #[error("representation table is incomplete or mistyped: {0}")]
    Structure(String),
    #[error("not a Mackey cover: {0}")]
    NotMackeyCover(String),
    #[error("not a subfunctor: {0}")]
    NotSubfunctor(String),
    #[error("invalid valuation: {0}")]
    InvalidValuation(String),
    #[error("v(ind C(H)) is {found}·Ω but f_H = {expected} at H={subgroup}")]
    ImageMismatch { subgroup: String, expected: i64, found: i64 },
    #[error("not an unramified Fesenko–Neukirch datum: {0}")]
    NotUrFnd(String),
    #[error("not a Fesenko–Neukirch datum: {0}")]
    NotFnd(String),
    #[error("Frobenius group axioms fail: {0}")]
    FrobeniusAxioms(String),
    #[error("scenario is malformed: {0}")]
    Scenario(String),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Mackey(#[from] MackeyError),
    #[error(transparent)]
    Ramification(#[from] RamificationError),
}
