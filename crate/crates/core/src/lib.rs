//! Exact graded algebra over the rationals and half-line kernel numerics for
//! one-dimensional BF theory with a boundary condition.
//!
//! Everything here runs without `std`; the allocator is the only requirement.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod ccr;
pub mod clifford;
pub mod extrapolate;
pub mod feynman;
pub mod graded;
pub mod hodge;
pub mod kernels;
pub mod lie;
pub mod probe;
pub mod linalg;
pub mod quad;
pub mod quant;
pub mod scalar;
pub mod superpoly;

pub use scalar::Scalar;
