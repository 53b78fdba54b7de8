//! Fermionic k-particle reduced density matrices at desk scale: multi-index
//! sign calculus, Slater-determinant expansions, two independent RDM
//! constructions, the exact Hilbert–Schmidt decomposition into Λ-blocks and
//! numerical certificates for the inequalities bounding it.

pub mod cli;
pub mod corpus;
pub mod decomposition;
pub mod error;
pub mod inequality_lab;
pub mod json;
pub mod multiindex;
pub mod rdm;
pub mod state;

pub use error::{Error, Result};
pub use multiindex::{relative_sign, MultiIndex, Sign};
pub use state::SlaterExpansion;
