//! Tools for avoidability of patterns in words.
//!
//! * [`words`]: words, exponents and α+-free word generation.
//! * [`patterns`]: patterns, occurrence search, doubled-pattern enumeration
//!   and n-splitted factors.
//! * [`series`]: power-series lower bounds on factor complexity.
//! * [`spectral`]: avoidability exponents via the Perron root.
//! * [`certify`]: uniform morphism corpus, bounded avoidance checks and
//!   factor-complexity counting.

pub mod certify;
pub mod error;
pub mod patterns;
pub mod series;
pub mod spectral;
pub mod words;

pub use certify::{corpus, corpus_entry, count_avoiding, cross_check, verify, verify_entry, CorpusEntry, Morphism};
pub use error::{Error, Result};
pub use patterns::{enumerate_remaining, find_occurrence, Occurrence, Pattern};
pub use series::{certify_threeavoidable, smallest_positive_root, SeriesSpec};
pub use spectral::avoidability_exponent;
pub use words::{Rational, Word};
