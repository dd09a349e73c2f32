//! Finite polyderivative models.
//!
//! Every agent carries a binary relation `⊏` on a finite carrier and acts on
//! subsets through the relational derivative `d(A) = {w : ∃s. w ⊏ s ∈ A}`.
//! The declared [`FrameKind`] is validated metadata: it does not change `d`,
//! it records which class of spaces the relation represents.

mod construct;
mod json;
mod model;
mod pointset;
mod relation;

pub use construct::{
    bounded_unwinding, irreflexive_resolution, reflexive_transitive_closure,
    restrict_to_open, transitive_closure, PMorphismViolation, PMorphismWitness,
    ResolutionError, UnwindError, Unwinding,
};
pub use model::{Model, ModelBuilder, ModelError};
pub use pointset::PointSet;
pub use relation::{check_derivative_axioms, validate_frame, AxiomViolation, FrameViolation, Relation};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The relational property a relation is declared (and checked) to have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameKind {
    /// Weakly transitive: `w ⊏ s ⊏ t` implies `w ⊏ t` or `w = t`.
    #[serde(rename = "wk4")]
    WK4,
    /// Transitive.
    #[serde(rename = "k4")]
    K4,
    /// Reflexive and transitive; `d` is a topological closure.
    #[serde(rename = "s4")]
    S4,
    #[serde(rename = "equiv")]
    Equivalence,
    /// Irreflexive and weakly transitive; `d` is a Cantor derivative.
    #[serde(rename = "irr-wk4")]
    IrreflexiveWK4,
    /// Irreflexive, symmetric and weakly transitive: a disjoint union of
    /// irreflexive clusters, the Cantor derivative of a monadic space.
    #[serde(rename = "monadic-derivative")]
    MonadicDerivative,
}

impl FrameKind {
    pub const ALL: [FrameKind; 6] = [
        FrameKind::WK4,
        FrameKind::K4,
        FrameKind::S4,
        FrameKind::Equivalence,
        FrameKind::IrreflexiveWK4,
        FrameKind::MonadicDerivative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FrameKind::WK4 => "wk4",
            FrameKind::K4 => "k4",
            FrameKind::S4 => "s4",
            FrameKind::Equivalence => "equiv",
            FrameKind::IrreflexiveWK4 => "irr-wk4",
            FrameKind::MonadicDerivative => "monadic-derivative",
        }
    }
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown frame kind `{0}` (expected wk4, k4, s4, equiv, irr-wk4 or monadic-derivative)")]
pub struct UnknownKind(pub String);

impl FromStr for FrameKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FrameKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownKind(s.to_string()))
    }
}
