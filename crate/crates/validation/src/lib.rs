//! Holds the acceptance suite in `tests/acceptance.rs`; no library code.
//!
//! ```text
//! cargo test -p trajseg-validation --test acceptance [-- <criterion numbers>]
//! ```
