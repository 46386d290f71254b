//! Gromov's construction: a bi-Lipschitz seed `φ : Γ → Λ` spreads out into
//! a space of maps carrying commuting Γ- and Λ-actions, and the two actions
//! are orbit equivalent.
//!
//! [`space`] works with finite tables of maps on balls, which is the setting
//! in which the fundamental-domain and freeness statements can be checked
//! exhaustively. [`labels`] follows the orbit of the seed itself, which lets
//! cocycles be evaluated far from the identity.

pub mod checks;
pub mod labels;
pub mod seed;
pub mod space;

pub use checks::*;
pub use labels::{coupled_morphisms, GromovInverse, GromovMorphism, PairPoint};
pub use seed::{FiniteMap, Seed};
pub use space::{build_omega, build_omega_standard, standard_metrics, MapTable, OmegaEntry, SliceEntry, SpaceSummary, TruncatedMapSpace};
