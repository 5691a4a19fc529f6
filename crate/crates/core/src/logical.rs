//! Logical failure detection.
//!
//! After decoding, the residual `R = E + C` must have trivial syndrome. It is
//! then either a product of X generators (success) or carries nonzero
//! logical charge `Σ λ_q R_q` (failure).

use crate::charge::QuditDim;
use crate::codegraph::CodeGraph;
use crate::error::{Error, Result};
use crate::noise::ErrorConfig;
use crate::syndrome::{extract, extract_dense};
use crate::zmod::{self, Matrix};

pub fn residual(err: &ErrorConfig, correction: &ErrorConfig, dim: QuditDim) -> ErrorConfig {
    err.compose(correction, dim)
}

/// `Σ λ_q r_q mod D` over the support of the logical Z operator.
pub fn logical_charge(code: &CodeGraph, r: &ErrorConfig, dim: QuditDim) -> u32 {
    code.logical()
        .iter()
        .fold(0, |acc, &(q, l)| dim.add(acc, dim.signed(l, r.get(q))))
}

pub fn is_logical_failure(
    code: &CodeGraph,
    err: &ErrorConfig,
    correction: &ErrorConfig,
    dim: QuditDim,
) -> Result<bool> {
    let r = residual(err, correction, dim);
    let s = extract(code, &r, dim)?;
    if !s.is_trivial() {
        return Err(Error::NontrivialResidual(s.len()));
    }
    Ok(logical_charge(code, &r, dim) != 0)
}

/// Dense variant for the Monte Carlo loop; `scratch` must hold one slot per
/// stabilizer.
pub(crate) fn residual_fails(
    code: &CodeGraph,
    residual: &[u32],
    dim: QuditDim,
    scratch: &mut [u32],
) -> Result<bool> {
    extract_dense(code, residual, dim, scratch);
    let flagged = scratch.iter().filter(|&&v| v != 0).count();
    if flagged > 0 {
        return Err(Error::NontrivialResidual(flagged));
    }
    let charge = code
        .logical()
        .iter()
        .fold(0, |acc, &(q, l)| dim.add(acc, dim.signed(l, residual[q])));
    Ok(charge != 0)
}

/// Rows are the X generators, reduced mod `D`.
pub fn stabilizer_matrix(code: &CodeGraph, dim: QuditDim) -> Matrix {
    let mut m = Matrix::zeros(code.x_generators().len(), code.num_data());
    for (i, gen) in code.x_generators().iter().enumerate() {
        for &(q, c) in gen {
            m.set(i, q, dim.reduce(c) as u64);
        }
    }
    m
}

/// Whether `r` is a product of X generators.
pub fn in_stabilizer_group(code: &CodeGraph, r: &ErrorConfig, dim: QuditDim) -> bool {
    let target: Vec<u64> = r.to_dense(code.num_data()).into_iter().map(u64::from).collect();
    zmod::in_row_span(&stabilizer_matrix(code, dim), &target, dim.get() as u64)
}

/// Independent failure test: a syndrome-free residual fails iff it lies
/// outside the span of the X generators.
pub fn brute_force_class_oracle(
    code: &CodeGraph,
    err: &ErrorConfig,
    correction: &ErrorConfig,
    dim: QuditDim,
) -> Result<bool> {
    let r = residual(err, correction, dim);
    let s = extract(code, &r, dim)?;
    if !s.is_trivial() {
        return Err(Error::NontrivialResidual(s.len()));
    }
    Ok(!in_stabilizer_group(code, &r, dim))
}

/// A syndrome-free configuration with logical charge 1.
pub fn logical_x_representative(code: &CodeGraph, dim: QuditDim) -> Result<ErrorConfig> {
    let ns = code.num_stabilizers();
    let mut a = Matrix::zeros(ns + 1, code.num_data());
    for (s, stab) in code.stabilizers().iter().enumerate() {
        for &(q, sign) in &stab.support {
            a.set(s, q, dim.signed(sign, 1) as u64);
        }
    }
    for &(q, l) in code.logical() {
        a.set(ns, q, dim.signed(l, 1) as u64);
    }
    let mut b = vec![0u64; ns + 1];
    b[ns] = 1;
    let x = zmod::solve(&a, &b, dim.get() as u64)
        .ok_or_else(|| Error::Precondition("logical operator is not independent".into()))?;
    let dense: Vec<u32> = x.into_iter().map(|v| v as u32).collect();
    Ok(ErrorConfig::from_dense(&dense, dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegraph::CodeKind;
    use crate::noise::trial_rng;
    use rand::Rng;

    fn codes(d: usize) -> Vec<CodeGraph> {
        vec![CodeGraph::surface(d).unwrap(), CodeGraph::color_666(d).unwrap()]
    }

    #[test]
    fn exhaustive_qubit_d3_agrees_with_oracle() {
        let dim = QuditDim::QUBIT;
        for code in codes(3) {
            let n = code.num_data();
            let none = ErrorConfig::new();
            let mut checked = 0;
            for bits in 0u32..1 << n {
                let dense: Vec<u32> = (0..n).map(|q| (bits >> q) & 1).collect();
                let r = ErrorConfig::from_dense(&dense, dim);
                if !extract(&code, &r, dim).unwrap().is_trivial() {
                    assert!(is_logical_failure(&code, &r, &none, dim).is_err());
                    continue;
                }
                checked += 1;
                assert_eq!(
                    is_logical_failure(&code, &r, &none, dim).unwrap(),
                    brute_force_class_oracle(&code, &r, &none, dim).unwrap(),
                    "{:?} {bits:b}",
                    code.kind()
                );
            }
            // 2^(n - #checks) syndrome-free configurations
            let expected = 1usize << (n - code.num_stabilizers());
            assert_eq!(checked, expected, "{:?}", code.kind());
        }
    }

    fn random_class_member(code: &CodeGraph, dim: QuditDim, j: u32, rng: &mut impl Rng) -> ErrorConfig {
        let x = logical_x_representative(code, dim).unwrap();
        let mut r = ErrorConfig::new();
        for (q, k) in x.iter() {
            r.add(q, k * j, dim);
        }
        for gen in code.x_generators() {
            let c = rng.gen_range(0..dim.get());
            for &(q, e) in gen {
                r.add(q, dim.reduce(e * c as i64), dim);
            }
        }
        r
    }

    #[test]
    fn random_qudit_classes_agree_with_oracle() {
        for dval in [3, 4, 5] {
            let dim = QuditDim::new(dval).unwrap();
            for kind in [CodeKind::Surface, CodeKind::Color666] {
                let code = CodeGraph::build(kind, 5).unwrap();
                let none = ErrorConfig::new();
                for t in 0..40 {
                    let mut rng = trial_rng(dval as u64, t);
                    let j = rng.gen_range(0..dval);
                    let r = random_class_member(&code, dim, j, &mut rng);
                    let fast = is_logical_failure(&code, &r, &none, dim).unwrap();
                    assert_eq!(fast, j != 0);
                    assert_eq!(fast, brute_force_class_oracle(&code, &r, &none, dim).unwrap());
                }
            }
        }
    }

    #[test]
    fn adding_a_generator_never_changes_the_outcome() {
        let dim = QuditDim::new(5).unwrap();
        for code in codes(5) {
            let mut rng = trial_rng(3, 0);
            let err = random_class_member(&code, dim, 2, &mut rng);
            let base = is_logical_failure(&code, &err, &ErrorConfig::new(), dim).unwrap();
            for gen in code.x_generators() {
                let c: ErrorConfig = gen.iter().map(|&(q, e)| (q, dim.reduce(3 * e))).collect();
                assert_eq!(is_logical_failure(&code, &err, &c, dim).unwrap(), base);
            }
        }
    }

    #[test]
    fn dense_path_matches() {
        let dim = QuditDim::new(4).unwrap();
        for code in codes(5) {
            let mut scratch = vec![0; code.num_stabilizers()];
            for t in 0..20 {
                let mut rng = trial_rng(9, t);
                let j = rng.gen_range(0..4);
                let r = random_class_member(&code, dim, j, &mut rng);
                let dense = r.to_dense(code.num_data());
                assert_eq!(residual_fails(&code, &dense, dim, &mut scratch).unwrap(), j != 0);
            }
            let mut lone = vec![0; code.num_data()];
            lone[0] = 1;
            assert!(residual_fails(&code, &lone, dim, &mut scratch).is_err());
        }
    }
}
