//! Exact construction and verification of permutation-invariant quantum
//! codes: Dicke-basis code families, Knill-Laflamme style conditions for
//! Pauli errors and deletions, amplitude-damping bounds, quadratic systems
//! for code discovery, and a dense state-vector oracle that cross-checks
//! the symbolic results at small sizes.

pub mod cli;
pub mod code;
pub mod damping;
pub mod error;
pub mod exact;
pub mod identities;
pub mod kl;
pub mod oracle;
pub mod par;
pub mod pr;

pub use code::{construct_gmdelta, construct_pr_code, GmdParams, PICode};
pub use error::{Error, Result};
pub use exact::{Radical, RadicalSum, Rational};
pub use par::Execution;
