//! Exact symbolic computation in the inverse hull of a Markov shift.
//!
//! The crate is organised bottom-up:
//!
//! - [`matrix`] and [`entropy`]: transition matrices, their languages and
//!   spectral radii;
//! - [`hull`]: canonical `(s, X, w)` elements and their algebra;
//! - [`oracle`]: brute-force partial bijections on a truncated language,
//!   used to validate the algebra;
//! - [`semilattice`]: idempotents, up-sets, covers, fingerprints and DOT export;
//! - [`axioms`]: decision procedures for orthogonal generating sets,
//!   alphabet extraction and isomorphism certificates;
//! - [`explorer`]: batch searches over small matrices.

pub mod axioms;
pub mod catalog;
pub mod entropy;
pub mod error;
pub mod explorer;
pub mod hull;
pub mod letters;
pub mod matrix;
pub mod oracle;
pub mod semilattice;
pub mod word;

pub use error::{HullError, Result};
pub use hull::{Element, Hull, Triple};
pub use letters::{Letter, LetterSet};
pub use matrix::TransitionMatrix;
pub use word::Word;
