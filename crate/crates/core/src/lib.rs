//! Stabilizer states, characters of second degree and Wehrl-entropy bounds
//! on finite Abelian groups.

pub mod checks;
pub mod error;
pub mod group;
pub mod oracle;
pub mod par;
pub mod phase;
pub mod phase_space;
pub mod quadratic;
pub mod random;
pub mod serial;
pub mod stabilizer;
pub mod wehrl;
pub mod weyl;

pub use error::{Error, Result};
pub use group::{Group, GroupElement, DualElement, Subgroup};
pub use phase::PhaseExp;
pub use quadratic::{Char2, SubChar2, SymHom};
