//! Effective complexity of binary strings under a fixed, computable
//! description scheme.
//!
//! Prefix Kolmogorov complexity is replaced by the length of explicit
//! prefix-free descriptions: Elias-delta codes for parameters, LZ78 for
//! compressed strings, and a finite family of ensembles whose serializations
//! give their description lengths. On top of that the crate computes
//! two-part code lengths, effective complexity and coarse effective
//! complexity exactly, and simulates stationary processes to observe how
//! typical realizations behave as their length grows.

pub mod bits;
pub mod codec;
pub mod complexity;
pub mod ensembles;
pub mod error;
pub mod lz78;
pub mod oracle;
pub mod processes;
pub mod rational;
pub mod selftest;
pub mod typical_sets;

/// Exact non-negative rational, always stored reduced.
pub type Rational = num_rational::Ratio<u64>;

pub use bits::BitString;
pub use complexity::{ComplexityQuery, ComplexityReport, Config, Mode};
pub use ensembles::{Ensemble, Tag};
pub use error::{Error, Result};
pub use processes::ProcessModel;
pub use typical_sets::TypicalSetSpec;
