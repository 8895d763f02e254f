//! Decoders for quantum LDPC codes in the CSS family.
//!
//! The crate provides:
//!
//! - [`gf2`]: bit-packed vectors and matrices over GF(2) with Gaussian
//!   elimination (rank, linear solves, rowspace membership).
//! - [`code`]: validated CSS codes, their Tanner graphs, and built-in
//!   fixtures (Hamming/Steane, toric codes of any size).
//! - [`general`]: the cluster-growth decoder that checks cluster validity by
//!   solving the local linear system exactly.
//! - [`uf`]: the union-find heuristic, which tracks clusters in a disjoint-set
//!   forest with boundary lists and finds local corrections by peeling.
//!
//! The core is `no_std` (with `alloc`). The default `std` feature only adds
//! wall-clock timing of decode calls.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod code;
pub mod decoder;
mod error;
pub mod general;
pub mod gf2;
pub mod uf;

pub use code::{
    builtin, hamming7, steane, toric_code, Builtin, CssCode, Side, TannerGraph, VertexId,
};
pub use decoder::{DecodeOutcome, Decoder};
pub use error::{Error, Result};
pub use general::{decode_general, GeneralOptions};
pub use gf2::{BitMatrix, BitVector, RowspaceBasis};
pub use uf::{
    decode_uf, Boundary, GrowthStrategy, Members, PeelFallback, UfOptions, UnionFindForest,
};
