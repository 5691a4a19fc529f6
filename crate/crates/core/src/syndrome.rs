use std::collections::BTreeMap;

use crate::charge::QuditDim;
use crate::codegraph::CodeGraph;
use crate::error::{Error, Result};
use crate::noise::ErrorConfig;

/// Sparse map from stabilizer id to its nonzero measured charge.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Syndrome {
    charges: BTreeMap<usize, u32>,
}

impl Syndrome {
    pub fn from_dense(charges: &[u32]) -> Self {
        Syndrome {
            charges: charges
                .iter()
                .enumerate()
                .filter(|&(_, &k)| k != 0)
                .map(|(s, &k)| (s, k))
                .collect(),
        }
    }

    pub fn to_dense(&self, n: usize) -> Vec<u32> {
        let mut out = vec![0; n];
        for (&s, &k) in &self.charges {
            out[s] = k;
        }
        out
    }

    pub fn get(&self, s: usize) -> u32 {
        self.charges.get(&s).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.charges.iter().map(|(&s, &k)| (s, k))
    }

    pub fn len(&self) -> usize {
        self.charges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charges.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.charges.is_empty()
    }

    /// Pointwise sum mod `dim`.
    pub fn combine(&self, other: &Syndrome, dim: QuditDim) -> Syndrome {
        let mut charges = self.charges.clone();
        for (s, k) in other.iter() {
            let v = dim.add(charges.get(&s).copied().unwrap_or(0), k);
            if v == 0 {
                charges.remove(&s);
            } else {
                charges.insert(s, v);
            }
        }
        Syndrome { charges }
    }
}

impl FromIterator<(usize, u32)> for Syndrome {
    fn from_iter<I: IntoIterator<Item = (usize, u32)>>(iter: I) -> Self {
        Syndrome {
            charges: iter.into_iter().filter(|&(_, k)| k != 0).collect(),
        }
    }
}

pub fn is_trivial(s: &Syndrome) -> bool {
    s.is_trivial()
}

/// `σ(s) = Σ_q sign(s, q) · e(q) mod D` for every stabilizer.
pub fn extract(code: &CodeGraph, err: &ErrorConfig, dim: QuditDim) -> Result<Syndrome> {
    let mut dense = vec![0u32; code.num_stabilizers()];
    for (q, k) in err.iter() {
        let dq = code.data().get(q).ok_or(Error::UnknownQudit(q))?;
        for &(s, sign) in &dq.checks {
            dense[s] = dim.add(dense[s], dim.signed(sign, k));
        }
    }
    Ok(Syndrome::from_dense(&dense))
}

/// Dense extraction used on the Monte Carlo hot path.
pub(crate) fn extract_dense(code: &CodeGraph, err: &[u32], dim: QuditDim, out: &mut [u32]) {
    out.iter_mut().for_each(|v| *v = 0);
    for (q, &k) in err.iter().enumerate() {
        if k == 0 {
            continue;
        }
        for &(s, sign) in &code.data()[q].checks {
            out[s] = dim.add(out[s], dim.signed(sign, k));
        }
    }
}
