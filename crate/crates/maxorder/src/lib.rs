//! Maximal-order point statistics for elliptic curves over prime fields.
//!
//! For a curve E/Q and a good-reduction prime p, the group E(F_p) is
//! Z/L x Z/M with L | M. This crate computes r(E, p) — the smallest
//! non-negative x-coordinate of a point of maximal order M — scans prime
//! ranges for record values, renders the resulting tables, and implements
//! the polynomial construction (resultant and discriminant identities,
//! splitting tests, the halving argument) that drives lower bounds on
//! r(E, p), together with the associated bound arithmetic.

pub mod construction;
pub mod curve;
pub mod error;
pub mod modmath;
pub(crate) mod polyfp;
pub mod scan;

pub use construction::{BoundConstants, BoundMode, HalvingReport, IdentityReport, IntPoly};
pub use curve::{CurveQ, GroupInfo, Point, ReducedCurve};
pub use error::{Error, Result};
pub use scan::{RecordRow, ScanConfig, TableFormat};
