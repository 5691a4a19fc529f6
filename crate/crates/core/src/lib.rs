//! Simulation of planar qudit topological codes under generalized bit-flip
//! noise.
//!
//! The crate builds Kitaev surface codes and triangular 6-6-6 color codes,
//! samples `X^j` errors on the data qudits, extracts signed syndromes and
//! decodes them with one of five decoders:
//!
//! * [`DecoderKind::Greedy`] and [`DecoderKind::Mwpm`] for qubit surface codes,
//! * [`DecoderKind::Hdrg`], hard-decision renormalization for qudit surface codes,
//! * [`DecoderKind::Dsp`], projection onto restricted lattices for qubit color codes,
//! * [`DecoderKind::Gcc`], color clustering for qudit color codes.
//!
//! Monte Carlo estimation of logical error rates lives in [`montecarlo`], and
//! threshold/plateau analysis of the resulting curves in [`analysis`].

pub mod analysis;
pub mod charge;
pub mod codegraph;
pub mod decoders;
pub mod error;
pub mod io;
pub mod logical;
pub mod matching;
pub mod montecarlo;
pub mod noise;
pub mod syndrome;
pub mod transport;
pub mod zmod;

pub use charge::QuditDim;
pub use codegraph::{CodeGraph, CodeKind, Color};
pub use decoders::DecoderKind;
pub use error::{Error, Result};
pub use noise::ErrorConfig;
pub use syndrome::Syndrome;
