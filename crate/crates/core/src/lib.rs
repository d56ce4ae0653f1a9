//! Quantum machine-learning building blocks: an exact statevector simulator,
//! fidelity-kernel feature maps, a dual-form SVM trained with SMO, a
//! quanvolution image pre-processor, a small dense classifier, and
//! classification metrics.
//!
//! The crate is `no_std`-compatible (with `alloc`); everything here is pure
//! computation. IO, file formats, and the experiment CLI live in the
//! companion `qmlkit` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod featmap;
pub mod metrics;
pub mod nn;
pub mod qsim;
pub mod quanv;
pub mod svm;

pub use error::{Error, Result};
