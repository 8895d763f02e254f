//! Decoder-independent result type and dispatch.

use alloc::string::String;
use core::time::Duration;

use crate::code::{CssCode, Side};
use crate::error::Result;
use crate::general::{decode_general, GeneralOptions};
use crate::gf2::BitVector;
use crate::uf::{decode_uf, UfOptions};

/// Result of one decode call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// Estimated error, one bit per qubit.
    pub estimate: BitVector,
    /// Iterations of the growth loop.
    pub growth_steps: usize,
    /// When set, `estimate` reproduces the input syndrome exactly.
    pub converged: bool,
    /// Wall-clock time of the decode. Zero without the `std` feature.
    pub elapsed: Duration,
    /// Why decoding stopped early, if it did.
    pub diagnostic: Option<String>,
}

/// One of the two decoders, with its options.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decoder {
    General(GeneralOptions),
    UnionFind(UfOptions),
}

impl Decoder {
    /// Decodes `syndrome`. `seed` only matters for randomized growth.
    pub fn decode(
        &self,
        code: &CssCode,
        side: Side,
        syndrome: &BitVector,
        seed: u64,
    ) -> Result<DecodeOutcome> {
        match self {
            Self::General(opts) => decode_general(code, side, syndrome, opts),
            Self::UnionFind(opts) => decode_uf(code, side, syndrome, opts, seed),
        }
    }

    /// Short identifier: `general` or `ufh`.
    pub fn name(&self) -> &'static str {
        match self {
            Self::General(_) => "general",
            Self::UnionFind(_) => "ufh",
        }
    }

    /// Label of the growth rule in use.
    pub fn growth_label(&self) -> &'static str {
        match self {
            Self::General(opts) if opts.grow_valid => "ag",
            Self::General(_) => "none",
            Self::UnionFind(opts) => opts.strategy.label(),
        }
    }
}

#[cfg(feature = "std")]
pub(crate) fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed())
}

#[cfg(not(feature = "std"))]
pub(crate) fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    (f(), Duration::ZERO)
}
