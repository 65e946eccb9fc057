//! Guaranteed upper bounds for the low-lying spectrum of the Neumann magnetic
//! Laplacian on cones over plane sections.
//!
//! The crate is organised around the pipeline
//! section → moments → optimal gauge → bound constant `e(B, ω)`, plus the
//! model-operator numerics used to locate the bottom of the essential
//! spectrum of sharp cones, and a Robin-Laplacian analogue.
//!
//! ```
//! use conebounds_core::geometry::{Disc, Section};
//! use conebounds_core::gauge::{e_constant, MagneticField};
//!
//! let disc = Section::Disc(Disc::new([0.0, 0.0], 1.0).unwrap());
//! let e = e_constant(MagneticField::new(0.0, 0.0, 1.0), &disc.moments());
//! assert!((e - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::large_enum_variant)]

pub mod cli;
pub mod error;
pub mod gauge;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod quadrature;
pub mod reduced;
pub mod robin;

pub use error::{Error, Result};
