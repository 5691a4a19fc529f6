//! Pairing decoders for the qubit surface code.

use crate::charge::QuditDim;
use crate::codegraph::{CodeGraph, UNREACHABLE};
use crate::error::{Error, Result};
use crate::matching::min_weight_perfect_matching;
use crate::noise::Correction;
use crate::syndrome::Syndrome;
use crate::transport::TransportLedger;

use super::DecoderKind;

/// Disjoint pairs of excitations, or of an excitation and a boundary node,
/// with the summed dual distance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub weight: usize,
}

fn nearest_boundary(code: &CodeGraph, s: usize) -> Option<(usize, usize)> {
    (0..code.boundaries().len())
        .map(|b| code.boundary_node(b))
        .map(|b| (code.dist(s, b), b))
        .filter(|&(d, _)| d != UNREACHABLE)
        .min()
        .map(|(d, b)| (b, d as usize))
}

/// Repeatedly takes the closest remaining pair, where an excitation may also
/// pair with its nearest boundary. Ties go to the smaller ids.
pub fn greedy_matching(code: &CodeGraph, excitations: &[usize]) -> Result<Matching> {
    let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
    for (i, &a) in excitations.iter().enumerate() {
        for &b in &excitations[i + 1..] {
            let d = code.dist(a, b);
            if d != UNREACHABLE {
                candidates.push((d as usize, a.min(b), a.max(b)));
            }
        }
        if let Some((b, d)) = nearest_boundary(code, a) {
            candidates.push((d, a, b));
        }
    }
    candidates.sort_unstable();
    let mut used = vec![false; code.num_nodes()];
    let mut m = Matching::default();
    for (d, a, b) in candidates {
        if used[a] || (!code.is_boundary(b) && used[b]) {
            continue;
        }
        used[a] = true;
        if !code.is_boundary(b) {
            used[b] = true;
        }
        m.pairs.push((a, b));
        m.weight += d;
    }
    if let Some(&lost) = excitations.iter().find(|&&s| !used[s]) {
        return Err(Error::Unreachable(lost, lost));
    }
    Ok(m)
}

/// Exact minimum-weight matching. Every excitation gets a virtual boundary
/// partner at its nearest-boundary distance; virtual partners pair freely.
pub fn mwpm_matching(code: &CodeGraph, excitations: &[usize]) -> Result<Matching> {
    let n = excitations.len();
    if n == 0 {
        return Ok(Matching::default());
    }
    let mut edges = Vec::with_capacity(n * n);
    let mut boundary = Vec::with_capacity(n);
    for (i, &a) in excitations.iter().enumerate() {
        for (j, &b) in excitations.iter().enumerate().skip(i + 1) {
            let d = code.dist(a, b);
            if d != UNREACHABLE {
                edges.push((i, j, d as i64));
            }
            edges.push((n + i, n + j, 0));
        }
        let (b, d) = nearest_boundary(code, a).ok_or(Error::Unreachable(a, a))?;
        boundary.push(b);
        edges.push((i, n + i, d as i64));
    }
    let mate = min_weight_perfect_matching(2 * n, &edges)
        .ok_or_else(|| Error::Precondition("no perfect matching".into()))?;
    let mut m = Matching::default();
    for i in 0..n {
        let a = excitations[i];
        let j = mate[i];
        if j >= n {
            let b = boundary[i];
            m.weight += code.dist(a, b) as usize;
            m.pairs.push((a, b));
        } else if j > i {
            m.weight += code.dist(a, excitations[j]) as usize;
            m.pairs.push((a, excitations[j]));
        }
    }
    Ok(m)
}

fn apply(ledger: &mut TransportLedger<'_>, m: &Matching) -> Result<()> {
    for &(a, b) in &m.pairs {
        let k = ledger.live(a);
        ledger.transport_chain_surface(a, b, k)?;
    }
    Ok(())
}

pub(super) fn greedy_in(ledger: &mut TransportLedger<'_>) -> Result<()> {
    let m = greedy_matching(ledger.code(), &ledger.flagged())?;
    apply(ledger, &m)
}

pub(super) fn mwpm_in(ledger: &mut TransportLedger<'_>) -> Result<()> {
    let m = mwpm_matching(ledger.code(), &ledger.flagged())?;
    apply(ledger, &m)
}

pub fn decode_greedy(code: &CodeGraph, syndrome: &Syndrome, dim: QuditDim) -> Result<Correction> {
    DecoderKind::Greedy.decode(code, syndrome, dim)
}

pub fn decode_mwpm(code: &CodeGraph, syndrome: &Syndrome, dim: QuditDim) -> Result<Correction> {
    DecoderKind::Mwpm.decode(code, syndrome, dim)
}
