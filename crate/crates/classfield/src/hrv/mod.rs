//! Higher-rank discrete valuations on truncated iterated Laurent series over prime fields.

mod laurent;
mod rlo;
mod sampler;
mod valuation;

use thiserror::Error;

pub use laurent::{ElementSpec, LaurentElement, LaurentField, Term, Window};
pub use rlo::{rlo_compare, RloVec};
pub use sampler::{stack_roundtrip, valuation_axiom_sampler, RoundtripOutcome, SamplerOutcome};
pub use valuation::{project_valuation, rank_n_valuation, RankNValuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HrvError {
    #[error("the valuation of zero is undefined")]
    ZeroValuation,
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("exponent {0} lies outside the window")]
    WindowOverflow(RloVec),
    #[error("elements live in different fields")]
    FieldMismatch,
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("valuation is not finer than the outer order: {0}")]
    NotFiner(String),
    #[error("representative is not a unit for the outer order")]
    NotUnit,
    #[error("element is not a uniformizer for the outer order")]
    NotUniformizer,
    #[error("element is not integral for the outer order")]
    NotIntegral,
    #[error("invalid field: {0}")]
    InvalidField(String),
}

/// The generator behind every sampler; one seed reproduces a whole run.
pub type SampleRng = rand_chacha::ChaCha8Rng;

pub fn sample_rng(seed: u64) -> SampleRng {
    rand::SeedableRng::seed_from_u64(seed)
}
