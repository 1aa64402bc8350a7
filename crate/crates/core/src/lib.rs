//! A homeomorphism of the closed unit disk that is Li-Yorke chaotic while
//! its inverse is not, together with the numerical machinery that checks
//! both properties on finite data.
//!
//! The map is `f = h⁻¹ ∘ g ∘ h` on the open disk and the identity on the
//! origin and the boundary circle, where `h(z) = z / (1 - |z|)` and
//! `g(w) = e² w e^{2πi ξ(|w|)}`. Everything is computed in log-polar
//! coordinates, where `g` adds 2 to the log-radius and rotates by `ξ`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coords;
pub mod diophantine;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod liyorke;
pub mod xi;

pub use coords::{DiskPoint, LogPolar, PlanePoint};
pub use error::{Error, Result};
pub use exec::Execution;
