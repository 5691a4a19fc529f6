//! Decoders mapping a syndrome to a correction whose syndrome cancels it.
//!
//! | decoder | code      | dimension |
//! |---------|-----------|-----------|
//! | Greedy  | surface   | 2         |
//! | MWPM    | surface   | 2         |
//! | HDRG    | surface   | any       |
//! | GCC     | 6-6-6     | any       |
//! | DSP     | 6-6-6     | 2         |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::charge::QuditDim;
use crate::codegraph::{CodeGraph, CodeKind};
use crate::error::{Error, Result};
use crate::noise::Correction;
use crate::syndrome::Syndrome;
use crate::transport::TransportLedger;

mod cluster;
mod dsp;
mod gcc;
mod hdrg;
mod pairing;

pub use cluster::{clusters_at_scale, Cluster};
pub use dsp::decode_dsp;
pub use gcc::decode_gcc;
pub use hdrg::decode_hdrg;
pub use pairing::{decode_greedy, decode_mwpm, greedy_matching, mwpm_matching, Matching};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Greedy,
    Mwpm,
    Hdrg,
    Gcc,
    Dsp,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 5] = [
        DecoderKind::Greedy,
        DecoderKind::Mwpm,
        DecoderKind::Hdrg,
        DecoderKind::Gcc,
        DecoderKind::Dsp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DecoderKind::Greedy => "greedy",
            DecoderKind::Mwpm => "mwpm",
            DecoderKind::Hdrg => "hdrg",
            DecoderKind::Gcc => "gcc",
            DecoderKind::Dsp => "dsp",
        }
    }

    /// Code family and dimension this decoder is defined for.
    pub fn check_applicable(self, code: CodeKind, dim: QuditDim) -> Result<()> {
        let unsupported = |reason: String| Error::Unsupported { decoder: self.as_str(), reason };
        let (want, qubit_only) = match self {
            DecoderKind::Greedy | DecoderKind::Mwpm => (CodeKind::Surface, true),
            DecoderKind::Hdrg => (CodeKind::Surface, false),
            DecoderKind::Gcc => (CodeKind::Color666, false),
            DecoderKind::Dsp => (CodeKind::Color666, true),
        };
        if code != want {
            return Err(unsupported(format!("the {code} code (needs {want})")));
        }
        if qubit_only && dim != QuditDim::QUBIT {
            return Err(unsupported(format!("D = {dim} (qubits only)")));
        }
        Ok(())
    }

    pub fn decode(self, code: &CodeGraph, syndrome: &Syndrome, dim: QuditDim) -> Result<Correction> {
        let mut ledger = TransportLedger::new(code, syndrome, dim);
        self.decode_ledger(&mut ledger)?;
        Ok(ledger.into_correction())
    }

    /// Decodes the live syndrome of `ledger` in place, leaving it clear.
    pub fn decode_ledger(self, ledger: &mut TransportLedger<'_>) -> Result<()> {
        self.check_applicable(ledger.code().kind(), ledger.dim())?;
        match self {
            DecoderKind::Greedy => pairing::greedy_in(ledger),
            DecoderKind::Mwpm => pairing::mwpm_in(ledger),
            DecoderKind::Hdrg => hdrg::hdrg_in(ledger),
            DecoderKind::Gcc => gcc::gcc_in(ledger),
            DecoderKind::Dsp => dsp::dsp_in(ledger),
        }?;
        if ledger.is_clear() {
            Ok(())
        } else {
            Err(Error::NontrivialResidual(ledger.flagged().len()))
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DecoderKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown decoder `{s}`")))
    }
}
