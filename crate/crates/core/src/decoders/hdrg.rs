//! Hard-decision renormalization for the qudit surface code.

use crate::charge::QuditDim;
use crate::codegraph::CodeGraph;
use crate::error::{Error, Result};
use crate::noise::Correction;
use crate::syndrome::Syndrome;
use crate::transport::TransportLedger;

use super::{clusters_at_scale, Cluster, DecoderKind};

pub fn decode_hdrg(code: &CodeGraph, syndrome: &Syndrome, dim: QuditDim) -> Result<Correction> {
    DecoderKind::Hdrg.decode(code, syndrome, dim)
}

/// Member minimizing the summed distance to the rest; ties to the smaller id.
fn central_member(code: &CodeGraph, members: &[usize]) -> usize {
    *members
        .iter()
        .min_by_key(|&&r| {
            let total: usize = members.iter().map(|&m| code.dist(r, m) as usize).sum();
            (total, r)
        })
        .expect("clusters are nonempty")
}

fn collapse(ledger: &mut TransportLedger<'_>, members: &[usize], rep: usize) -> Result<()> {
    for &m in members {
        let k = ledger.live(m);
        ledger.transport_chain_surface(m, rep, k)?;
    }
    Ok(())
}

fn resolve(ledger: &mut TransportLedger<'_>, cluster: &Cluster) -> Result<()> {
    let code = ledger.code();
    let dim = ledger.dim();
    let total = cluster
        .members
        .iter()
        .fold(0, |acc, &m| dim.add(acc, ledger.live(m)));
    if total == 0 {
        let rep = central_member(code, &cluster.members);
        return collapse(ledger, &cluster.members, rep);
    }
    // charged cluster: only a boundary can absorb the excess
    let Some((_, rep, b)) = cluster
        .members
        .iter()
        .flat_map(|&m| cluster.boundaries.iter().map(move |&b| (code.dist(m, b), m, b)))
        .min()
    else {
        return Ok(());
    };
    collapse(ledger, &cluster.members, rep)?;
    let k = ledger.live(rep);
    ledger.transport_chain_surface(rep, b, k)
}

pub(super) fn hdrg_in(ledger: &mut TransportLedger<'_>) -> Result<()> {
    let cap = ledger.code().diameter().max(1);
    for scale in 1..=cap {
        if ledger.is_clear() {
            return Ok(());
        }
        let flagged = ledger.flagged();
        for cluster in clusters_at_scale(ledger.code(), &flagged, scale) {
            resolve(ledger, &cluster)?;
        }
    }
    if ledger.is_clear() {
        Ok(())
    } else {
        Err(Error::DecoderStalled(cap))
    }
}
