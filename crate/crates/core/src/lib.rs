//! Duffin-Kemmer-Petiau wave equation for spin-0 and spin-1 bosons: matrix
//! representations, plane waves, conserved currents, step scattering and
//! one-dimensional time evolution.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod currents;
pub mod error;
pub mod evolve;
pub mod planewave;
pub mod scatter;

pub use error::{Error, Result};
