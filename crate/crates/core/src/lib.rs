//! Rapid-decay analysis for twisted convolution algebras of finite
//! groupoids.
//!
//! The crate models finite groupoids with length functions and
//! unit-modulus 2-cocycles, builds the twisted convolution algebra and
//! its fiberwise regular representations, computes reduced operator
//! norms and weighted decay seminorms, and compares the two across
//! structured families (paths, grids, trees, cycles). On top of that
//! sit permanence checks (subgroupoids, products, regular covers) and a
//! bridge to coarse-geometric norms of kernels on finite metric spaces.
//!
//! Everything is deterministic: randomized scans take explicit seeds,
//! iteration orders are fixed, and reports serialize identically across
//! runs.

#![forbid(unsafe_code)]

pub mod algebra;
pub mod error;
pub mod families;
pub mod groupoid;
pub mod io;
pub mod length;
pub mod metric;
pub mod permanence;
pub mod rd;
pub mod report;
pub mod spectral;
pub mod twist;

pub use error::{Error, Result, Violation};
pub use groupoid::{Arrow, ArrowId, Groupoid, GroupoidAction, GroupoidHom};
