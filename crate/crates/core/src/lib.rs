//! Identifiability of linear network topologies from partial state measurements.
//!
//! A network evolves as `ẋ = Ax`, `y = Cx` where `A` is the weighted adjacency
//! matrix and `C` selects the measured nodes. Two networks `A` and `A + Δ`
//! produce identical measurements for every initial condition exactly when
//! `OΔ = 0`, with `O` the observability matrix of `(A, C)`. This crate builds
//! on that fact to
//!
//! * characterize the ambiguity set `{A + Δ : OΔ = 0}` ([`observability`]),
//! * compute the consistent network removing the most edge weight
//!   ([`dissimilar`]),
//! * study networks whose measurements stay ε-close, through the observability
//!   Gramian of an augmented system ([`epsclose`]),
//! * generate the random ensembles used for phase-transition studies ([`model`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, plotting and the
//! command-line front end live in the `netid` crate.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dissimilar;
pub mod epsclose;
mod error;
pub mod model;
pub mod numerics;
pub mod observability;

pub use error::{Error, Result};
pub use model::{NetworkSystem, SparsityMask, DEFAULT_PRESENCE_THRESHOLD};
pub use observability::ObservabilityAnalysis;
pub use numerics::{Matrix, Vector};

