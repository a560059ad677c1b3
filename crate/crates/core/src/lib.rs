//! Exact-arithmetic case analysis bounding the anticanonical degree of
//! Q-factorial canonical Fano 3-folds of Picard number 1 by 72.
//!
//! The engine enumerates Reid baskets under the Euler-characteristic budget,
//! computes admissible degrees through orbifold Riemann-Roch, applies the
//! Kawamata-Miyaoka and index-divisibility filters, regenerates the case
//! tables, and emits a machine-checkable certificate recording the exact
//! rational comparison that kills every case. All verdicts are computed in
//! exact arithmetic; floating point never decides anything.

pub mod arith;
pub mod basket;
pub mod error;
pub mod indices;
pub mod km;
pub mod pipeline;
pub mod rr;
pub mod wps;

pub use error::{Error, Result};
