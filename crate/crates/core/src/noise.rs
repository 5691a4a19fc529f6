//! Generalized bit-flip noise: each data qudit independently suffers `X^j`
//! with probability `p`, `j` uniform in `1..D`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::charge::QuditDim;
use crate::codegraph::CodeGraph;
use crate::error::{Error, Result};

/// Sparse map from data qudit to the exponent of `X` acting on it.
/// Zero charges are never stored. Corrections use the same type.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ErrorConfig {
    charges: BTreeMap<usize, u32>,
}

pub type Correction = ErrorConfig;

impl ErrorConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_dense(charges: &[u32], dim: QuditDim) -> Self {
        let charges = charges
            .iter()
            .enumerate()
            .filter_map(|(q, &k)| {
                let k = k % dim.get();
                (k != 0).then_some((q, k))
            })
            .collect();
        ErrorConfig { charges }
    }

    pub fn to_dense(&self, n: usize) -> Vec<u32> {
        let mut out = vec![0; n];
        for (&q, &k) in &self.charges {
            out[q] = k;
        }
        out
    }

    pub fn get(&self, q: usize) -> u32 {
        self.charges.get(&q).copied().unwrap_or(0)
    }

    /// Adds `k` to qudit `q`, dropping the entry if it becomes zero.
    pub fn add(&mut self, q: usize, k: u32, dim: QuditDim) {
        let v = dim.add(self.get(q), k % dim.get());
        if v == 0 {
            self.charges.remove(&q);
        } else {
            self.charges.insert(q, v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.charges.iter().map(|(&q, &k)| (q, k))
    }

    /// Number of qudits carrying a nonzero charge.
    pub fn weight(&self) -> usize {
        self.charges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charges.is_empty()
    }

    pub fn inverse(&self, dim: QuditDim) -> Self {
        ErrorConfig {
            charges: self.charges.iter().map(|(&q, &k)| (q, dim.neg(k))).collect(),
        }
    }

    pub fn compose(&self, other: &Self, dim: QuditDim) -> Self {
        let mut out = self.clone();
        for (q, k) in other.iter() {
            out.add(q, k, dim);
        }
        out
    }
}

impl FromIterator<(usize, u32)> for ErrorConfig {
    /// Collects raw `(qudit, charge)` pairs. Charges must already be reduced
    /// and nonzero; use [`ErrorConfig::add`] otherwise.
    fn from_iter<I: IntoIterator<Item = (usize, u32)>>(iter: I) -> Self {
        ErrorConfig {
            charges: iter.into_iter().filter(|&(_, k)| k != 0).collect(),
        }
    }
}

pub fn compose(a: &ErrorConfig, b: &ErrorConfig, dim: QuditDim) -> ErrorConfig {
    a.compose(b, dim)
}

/// Random stream for one trial: ChaCha8 keyed by the master seed, with the
/// trial index selecting the stream. Independent of scheduling.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

pub fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// Samples the generalized bit-flip channel on every data qudit, in qudit order.
pub fn sample_error<R: Rng + ?Sized>(
    code: &CodeGraph,
    p: f64,
    dim: QuditDim,
    rng: &mut R,
) -> Result<ErrorConfig> {
    check_probability(p)?;
    let mut dense = vec![0u32; code.num_data()];
    sample_into(&mut dense, p, dim, rng);
    Ok(ErrorConfig::from_dense(&dense, dim))
}

pub(crate) fn sample_into<R: Rng + ?Sized>(out: &mut [u32], p: f64, dim: QuditDim, rng: &mut R) {
    for slot in out.iter_mut() {
        *slot = if rng.gen::<f64>() < p {
            rng.gen_range(1..dim.get())
        } else {
            0
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_noise_means_no_errors() {
        let code = CodeGraph::color_666(7).unwrap();
        let mut rng = trial_rng(1, 0);
        let e = sample_error(&code, 0.0, QuditDim::new(5).unwrap(), &mut rng).unwrap();
        assert!(e.is_empty());
    }

    #[test]
    fn certain_qubit_flip() {
        let code = CodeGraph::surface(5).unwrap();
        let mut rng = trial_rng(1, 0);
        let e = sample_error(&code, 1.0, QuditDim::QUBIT, &mut rng).unwrap();
        assert_eq!(e.weight(), code.num_data());
        assert!(e.iter().all(|(_, k)| k == 1));
    }

    #[test]
    fn rejects_bad_probability() {
        let code = CodeGraph::surface(3).unwrap();
        let mut rng = trial_rng(1, 0);
        for p in [-0.1, 1.5, f64::NAN] {
            assert!(sample_error(&code, p, QuditDim::QUBIT, &mut rng).is_err());
        }
    }

    #[test]
    fn charge_frequencies_within_three_sigma() {
        // p = 0.3, D = 3: each nonzero charge has probability 0.15.
        let dim = QuditDim::new(3).unwrap();
        let n = 100_000;
        let mut buf = vec![0u32; n];
        sample_into(&mut buf, 0.3, dim, &mut trial_rng(7, 3));
        let sigma = (n as f64 * 0.15 * 0.85).sqrt();
        for k in 1..3 {
            let count = buf.iter().filter(|&&v| v == k).count() as f64;
            assert!((count - 0.15 * n as f64).abs() < 3.0 * sigma, "charge {k}: {count}");
        }
    }

    #[test]
    fn compose_examples() {
        let d3 = QuditDim::new(3).unwrap();
        let a: ErrorConfig = [(4, 1)].into_iter().collect();
        let b: ErrorConfig = [(4, 2)].into_iter().collect();
        assert!(a.compose(&b, d3).is_empty());
        let e: ErrorConfig = [(0, 2), (3, 1), (9, 2)].into_iter().collect();
        assert!(e.compose(&e.inverse(d3), d3).is_empty());
        assert_eq!(ErrorConfig::new().compose(&e, d3), e);
    }

    #[test]
    fn streams_are_reproducible() {
        let code = CodeGraph::color_666(9).unwrap();
        let dim = QuditDim::new(5).unwrap();
        let a = sample_error(&code, 0.2, dim, &mut trial_rng(11, 42)).unwrap();
        let b = sample_error(&code, 0.2, dim, &mut trial_rng(11, 42)).unwrap();
        let c = sample_error(&code, 0.2, dim, &mut trial_rng(11, 43)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
