use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid code distance {0}: must be odd and at least 3")]
    InvalidDistance(usize),
    #[error("qudit dimension must be at least 2, got {0}")]
    InvalidDimension(u32),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("unknown data qudit {0}")]
    UnknownQudit(usize),
    #[error("node {0} is not a stabilizer or boundary of this code")]
    UnknownNode(usize),
    #[error("nodes {0} and {1} are not connected in the dual graph")]
    Unreachable(usize, usize),
    #[error("color mismatch: cannot transport from {from} to {to}")]
    ColorMismatch { from: usize, to: usize },
    #[error("faces {0:?} share no common data qudit")]
    NoCommonQudit(Vec<usize>),
    #[error("decoder {decoder} does not support {reason}")]
    Unsupported { decoder: &'static str, reason: String },
    #[error("residual syndrome is not trivial ({0} flagged stabilizers)")]
    NontrivialResidual(usize),
    #[error("decoder did not clear the syndrome by scale {0}")]
    DecoderStalled(usize),
    #[error("{0}")]
    Precondition(String),
    #[error("curves do not cross inside the sampled window")]
    NoCrossing,
    #[error("fit did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
