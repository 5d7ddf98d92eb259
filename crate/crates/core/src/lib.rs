//! Lower confidence bounds for the mean of a categorical distribution with a
//! known, finite support, computed from a multinomial sample.
//!
//! A bound is fixed by a total order over the sample space. For every
//! position in that order the bound value is the least mean over all
//! distributions that give the suffix ("upper set") of the order
//! probability above `alpha`. This crate builds the sample space, evaluates
//! subset likelihoods, solves that constrained problem, classifies the
//! resulting bound tables as admissible or not, and checks the validity of
//! arbitrary bound functions.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod bounds;
mod error;
pub mod lattice;
pub mod likelihood;
pub(crate) mod math;
mod simplex;
pub mod solver;

pub use error::{Error, Result};
