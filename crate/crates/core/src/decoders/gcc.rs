//! General color clustering for qudit 6-6-6 color codes.
//!
//! At scale `i`, flagged faces within `i` dual hops are clustered. Each
//! cluster is collapsed onto three central faces sharing one qudit, the three
//! central charges are reduced with one move on that qudit, and what remains
//! is pushed into the cluster's boundaries when they can absorb all of it.

use crate::charge::QuditDim;
use crate::codegraph::{CodeGraph, Color};
use crate::error::{Error, Result};
use crate::noise::Correction;
use crate::syndrome::Syndrome;
use crate::transport::{common_qudit, TransportLedger};

use super::{clusters_at_scale, Cluster, DecoderKind};

pub fn decode_gcc(code: &CodeGraph, syndrome: &Syndrome, dim: QuditDim) -> Result<Correction> {
    DecoderKind::Gcc.decode(code, syndrome, dim)
}

fn centroid(code: &CodeGraph, members: &[usize]) -> [f64; 2] {
    let n = members.len() as f64;
    let (x, y) = members.iter().fold((0.0, 0.0), |(x, y), &m| {
        let p = code.node_pos(m);
        (x + p[0], y + p[1])
    });
    [x / n, y / n]
}

/// The three faces (indexed by color) around the bulk qudit nearest `at`.
fn central_faces(code: &CodeGraph, at: [f64; 2]) -> [usize; 3] {
    let q = (0..code.num_data())
        .filter(|&q| code.data()[q].checks.len() == 3)
        .min_by_key(|&q| {
            let p = code.data()[q].pos;
            let d2 = (p[0] - at[0]).powi(2) + (p[1] - at[1]).powi(2);
            ((d2 * 1e9).round() as i64, q)
        })
        .expect("distance ≥ 3 codes have bulk qudits");
    let mut faces = [0; 3];
    for &(s, _) in &code.data()[q].checks {
        faces[code.stabilizers()[s].color.expect("color code faces").index()] = s;
    }
    faces
}

fn color_of(code: &CodeGraph, s: usize) -> Color {
    code.stabilizers()[s].color.expect("color code faces")
}

/// Charges of `faces` after zeroing `cancel` with the shared qudit.
fn after_identity(ledger: &TransportLedger<'_>, faces: [usize; 3], q: usize, cancel: usize) -> [u32; 3] {
    let code = ledger.code();
    let dim = ledger.dim();
    let sign = code.sign(faces[cancel], q).expect("shared qudit");
    let m = dim.signed(-sign, ledger.live(faces[cancel]));
    let mut out = [0; 3];
    for (c, &f) in faces.iter().enumerate() {
        out[c] = dim.add(ledger.live(f), dim.signed(code.sign(f, q).expect("shared qudit"), m));
    }
    out
}

/// Picks the cancellation leaving the fewest and smallest central charges;
/// ties favor cancelling the larger charge, then the privileged color.
fn reduce_center(ledger: &mut TransportLedger<'_>, faces: [usize; 3]) -> Result<()> {
    let dim = ledger.dim();
    let q = common_qudit(ledger.code(), faces).ok_or_else(|| Error::NoCommonQudit(faces.to_vec()))?;
    let cost = |charges: [u32; 3]| {
        let nonzero = charges.iter().filter(|&&k| k != 0).count();
        let total: u32 = charges.iter().map(|&k| dim.magnitude(k)).sum();
        (nonzero, total)
    };
    let current = [0, 1, 2].map(|c| ledger.live(faces[c]));
    let mut best = (cost(current), std::cmp::Reverse(0), 3usize);
    for c in 0..3 {
        let key = (
            cost(after_identity(ledger, faces, q, c)),
            std::cmp::Reverse(dim.magnitude(current[c])),
            c,
        );
        if key < best {
            best = key;
        }
    }
    if best.2 < 3 {
        ledger.charge_identity(faces, faces[best.2])?;
    }
    Ok(())
}

/// Pushes the central charges into included boundaries if that empties the
/// cluster; otherwise leaves them for the next scale.
fn absorb(ledger: &mut TransportLedger<'_>, faces: [usize; 3], cluster: &Cluster) -> Result<()> {
    let code = ledger.code();
    let mut open = [false; 3];
    for &b in &cluster.boundaries {
        if let Some(c) = code.node_color(b) {
            open[c.index()] = true;
        }
    }
    let charged: Vec<usize> = (0..3).filter(|&c| ledger.live(faces[c]) != 0).collect();
    let blocked: Vec<usize> = charged.iter().copied().filter(|&c| !open[c]).collect();
    match blocked.as_slice() {
        [] => {}
        [c] if open.iter().filter(|&&o| o).count() == 2 => {
            ledger.charge_identity(faces, faces[*c])?;
        }
        _ => return Ok(()),
    }
    for c in 0..3 {
        let k = ledger.live(faces[c]);
        if k != 0 {
            let b = code
                .boundary_node_of_color(Color::from_index(c))
                .expect("every color has a boundary");
            ledger.transport_same_color(faces[c], b, k)?;
        }
    }
    Ok(())
}

fn resolve(ledger: &mut TransportLedger<'_>, cluster: &Cluster) -> Result<()> {
    let code = ledger.code();
    let faces = central_faces(code, centroid(code, &cluster.members));
    for &m in &cluster.members {
        let k = ledger.live(m);
        ledger.transport_same_color(m, faces[color_of(code, m).index()], k)?;
    }
    reduce_center(ledger, faces)?;
    absorb(ledger, faces, cluster)
}

/// One pass at `scale` over the clusters of the current live syndrome.
pub(crate) fn gcc_scale(ledger: &mut TransportLedger<'_>, scale: usize) -> Result<()> {
    let flagged = ledger.flagged();
    for cluster in clusters_at_scale(ledger.code(), &flagged, scale) {
        resolve(ledger, &cluster)?;
    }
    Ok(())
}

pub(super) fn gcc_in(ledger: &mut TransportLedger<'_>) -> Result<()> {
    let cap = ledger.code().diameter().max(1);
    for scale in 1..=cap {
        if ledger.is_clear() {
            return Ok(());
        }
        gcc_scale(ledger, scale)?;
    }
    if ledger.is_clear() {
        Ok(())
    } else {
        Err(Error::DecoderStalled(cap))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logical::is_logical_failure;
    use crate::noise::{sample_error, trial_rng, ErrorConfig};
    use crate::syndrome::extract;

    #[test]
    fn single_bulk_error_is_undone_exactly() {
        let code = CodeGraph::color_666(7).unwrap();
        for dval in [2, 3, 5] {
            let dim = QuditDim::new(dval).unwrap();
            for q in (0..code.num_data()).filter(|&q| code.data()[q].checks.len() == 3) {
                for k in 1..dval {
                    let e: ErrorConfig = [(q, k)].into_iter().collect();
                    let syn = extract(&code, &e, dim).unwrap();
                    let c = decode_gcc(&code, &syn, dim).unwrap();
                    assert!(e.compose(&c, dim).is_empty(), "D={dval} q={q} k={k}");
                }
            }
        }
    }

    #[test]
    fn single_errors_of_every_charge_are_corrected() {
        for d in [5, 7] {
            let code = CodeGraph::color_666(d).unwrap();
            for dval in [2, 3, 4, 5] {
                let dim = QuditDim::new(dval).unwrap();
                for q in 0..code.num_data() {
                    for k in 1..dval {
                        let e: ErrorConfig = [(q, k)].into_iter().collect();
                        let syn = extract(&code, &e, dim).unwrap();
                        let c = decode_gcc(&code, &syn, dim).unwrap();
                        assert!(!is_logical_failure(&code, &e, &c, dim).unwrap(), "d={d} D={dval} q={q} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn random_errors_leave_no_syndrome() {
        let code = CodeGraph::color_666(9).unwrap();
        for dval in [2, 3, 8] {
            let dim = QuditDim::new(dval).unwrap();
            for t in 0..300 {
                let e = sample_error(&code, 0.12, dim, &mut trial_rng(dval as u64 + 50, t)).unwrap();
                let syn = extract(&code, &e, dim).unwrap();
                let c = decode_gcc(&code, &syn, dim).unwrap();
                assert!(is_logical_failure(&code, &e, &c, dim).is_ok());
            }
        }
    }

    #[test]
    fn qubit_charge_relabeling_is_invisible() {
        // at D = 2, charge 1 and D - 1 coincide; the decoder sees only {0, 1}
        let code = CodeGraph::color_666(7).unwrap();
        for t in 0..100 {
            let e = sample_error(&code, 0.1, QuditDim::QUBIT, &mut trial_rng(8, t)).unwrap();
            let syn = extract(&code, &e, QuditDim::QUBIT).unwrap();
            assert!(syn.iter().all(|(_, k)| k == 1));
            let inv = extract(&code, &e.inverse(QuditDim::QUBIT), QuditDim::QUBIT).unwrap();
            assert_eq!(
                decode_gcc(&code, &syn, QuditDim::QUBIT).unwrap(),
                decode_gcc(&code, &inv, QuditDim::QUBIT).unwrap()
            );
        }
    }

    #[test]
    fn surface_code_rejected() {
        let code = CodeGraph::surface(5).unwrap();
        assert!(decode_gcc(&code, &Syndrome::default(), QuditDim::QUBIT).is_err());
    }
}
