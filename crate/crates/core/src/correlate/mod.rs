//! Free and interactive correlation maps, the universal trace and the Lie
//! algebra of arguments.

mod free;
mod interactive;
mod lie;

use thiserror::Error;

use crate::chains::ChainError;
use crate::forms::FormError;
use crate::weyl::WeylError;

pub use free::Correlator;
pub use interactive::signed_permutations;
pub use lie::{pr_parts, pr_to_element, LieElement, PrParts};

#[derive(Debug, Error)]
pub enum CorrelateError {
    #[error("chain is not ⟨g⟩-invariant")]
    NotInvariant,
    #[error("factor has the wrong variables: {0}")]
    WrongFactor(String),
    #[error("invalid Lie algebra element: {0}")]
    InvalidLie(String),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}
