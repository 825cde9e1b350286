//! Strong-coupling van der Waals potentials and forces between two
//! identical two-level atoms sharing a single narrow cavity mode.
//!
//! The pipeline runs from Green's tensors ([`greens`]) through squared
//! atom-field couplings and the Lorentzian single-mode model
//! ([`modecoupling`]) to the dressed two-state system ([`dressed`]).
//! [`weakfield`] computes the perturbative result independently and
//! [`planarcavity`] specializes everything to two parallel plates.

// Negated comparisons are deliberate: they reject NaN along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constants;
pub mod dressed;
pub mod error;
pub mod greens;
pub mod modecoupling;
pub mod numdiff;
pub mod planarcavity;
pub mod quad;
pub mod weakfield;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Selects between a derived closed form and the form in which it was
/// originally printed, for the few expressions where the two disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Corrected,
    AsPrinted,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Corrected => "corrected",
            Variant::AsPrinted => "as-printed",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
