//! Exact and asymptotic enumeration of quarter-plane lattice walks whose
//! step set depends on the region (interior, horizontal boundary, vertical
//! boundary, origin).
//!
//! The crate has two independent counting routes that cross-check each other:
//!
//! * [`walk`] — a brute-force dynamic program over walk lengths with
//!   arbitrary-precision integer counts;
//! * [`compensation`] — an exact generating-function construction built from
//!   an alternating sum of product terms on the kernel curve, carried out in
//!   truncated power series over exact rationals ([`series`]).
//!
//! On top of the exact layer, [`numeric`] evaluates the same construction in
//! floating point to bracket the dominant singularity of the counting
//! sequence and derive growth constants. [`variants`] covers two further
//! walks with modified boundary behavior, one with a rational generating
//! function and one with a non-local boundary jump.

pub mod compensation;
pub mod numeric;
pub mod series;
pub mod variants;
pub mod verify;
pub mod walk;

pub use series::{Rat, SeriesError, TruncSeries};
pub use walk::{dp_counts, CountTable, StepRule, WalkError, WalkKind};
