//! Space-time block codes from codes over GF(4).
//!
//! Real symbols of a linear dispersion design are labeled by vectors of
//! F2 ⊕ F4^m. Decoding groups, fast-decodability and cubic shaping are read
//! off Hamming-weight parities of those vectors.

pub mod catalog;
pub mod constructions;
pub mod design;
pub mod diversity;
pub mod error;
pub mod f4;
pub mod family;
pub mod io;
pub mod linear;
pub mod matrix;
pub mod pauli;
pub mod plan;
pub mod signal;
pub mod sim;
pub mod stbc;

pub use design::{Design, Group, PartitionReport};
pub use error::{Error, Result};
pub use f4::{F4Vec, F4};
pub use linear::LinearDesign;
pub use matrix::ComplexMatrix;
pub use plan::{ComplexityReport, DecodePlan, PlanNode};
pub use signal::{EncodingUnit, SignalSet};
pub use stbc::Stbc;
