//! Projection decoder for the qubit 6-6-6 color code.
//!
//! Each pair of colors defines a restricted lattice: the faces of those two
//! colors plus their two boundaries. Matching on the three restricted
//! lattices highlights dual edges; around every face of one lift color the
//! highlighted spokes are reproduced by a smallest set of that face's qubits.
//! All three lift colors are tried and the lightest consistent correction
//! wins. Anything a lift leaves behind is cleared by clustering.

use std::collections::VecDeque;

use crate::charge::QuditDim;
use crate::codegraph::{CodeGraph, Color};
use crate::error::{Error, Result};
use crate::matching::min_weight_perfect_matching;
use crate::noise::Correction;
use crate::syndrome::Syndrome;
use crate::transport::TransportLedger;

use super::DecoderKind;

pub fn decode_dsp(code: &CodeGraph, syndrome: &Syndrome, dim: QuditDim) -> Result<Correction> {
    DecoderKind::Dsp.decode(code, syndrome, dim)
}

fn in_pair(code: &CodeGraph, node: usize, pair: [Color; 2]) -> bool {
    code.node_color(node).is_some_and(|c| pair.contains(&c))
}

/// Breadth-first search on the restricted lattice; boundaries are terminal.
/// Returns hop counts and parents.
fn restricted_bfs(code: &CodeGraph, pair: [Color; 2], src: usize) -> (Vec<u32>, Vec<usize>) {
    let n = code.num_nodes();
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![usize::MAX; n];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        if v != src && code.is_boundary(v) {
            continue;
        }
        for &w in code.dual_neighbors(v) {
            if dist[w] == u32::MAX && in_pair(code, w, pair) {
                dist[w] = dist[v] + 1;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    (dist, parent)
}

/// Highlighted dual edges of one restricted lattice, toggled into `edges`.
fn match_pair(code: &CodeGraph, flagged: &[usize], pair: [Color; 2], edges: &mut Vec<(usize, usize)>) -> Result<()> {
    let ex: Vec<usize> = flagged.iter().copied().filter(|&s| in_pair(code, s, pair)).collect();
    let n = ex.len();
    if n == 0 {
        return Ok(());
    }
    let bnd: Vec<usize> = pair
        .iter()
        .map(|&c| code.boundary_node_of_color(c).expect("every color has a boundary"))
        .collect();
    let searches: Vec<(Vec<u32>, Vec<usize>)> = ex.iter().map(|&s| restricted_bfs(code, pair, s)).collect();
    let mut graph = Vec::with_capacity(n * n);
    let mut exits = Vec::with_capacity(n);
    for i in 0..n {
        let dist = &searches[i].0;
        for j in i + 1..n {
            if dist[ex[j]] != u32::MAX {
                graph.push((i, j, dist[ex[j]] as i64));
            }
            graph.push((n + i, n + j, 0));
        }
        let (d, b) = bnd
            .iter()
            .map(|&b| (dist[b], b))
            .min()
            .filter(|&(d, _)| d != u32::MAX)
            .ok_or(Error::Unreachable(ex[i], bnd[0]))?;
        exits.push(b);
        graph.push((i, n + i, d as i64));
    }
    let mate = min_weight_perfect_matching(2 * n, &graph)
        .ok_or_else(|| Error::Precondition("no perfect matching".into()))?;
    for i in 0..n {
        let target = match mate[i] {
            j if j >= n => exits[i],
            j if j > i => ex[j],
            _ => continue,
        };
        let parent = &searches[i].1;
        let mut v = target;
        while v != ex[i] {
            let u = parent[v];
            edges.push((u.min(v), u.max(v)));
            v = u;
        }
    }
    Ok(())
}

/// Dual nodes reached from face `f` through qubit `q`: its other faces and
/// any boundary it touches.
fn spokes(code: &CodeGraph, f: usize, q: usize) -> Vec<usize> {
    let data = &code.data()[q];
    data.checks
        .iter()
        .map(|&(s, _)| s)
        .filter(|&s| s != f)
        .chain(data.boundaries.iter().map(|&b| code.boundary_node(b)))
        .filter(|&v| code.node_color(v).is_some())
        .collect()
}

/// Smallest subset of `f`'s qubits whose spokes cancel to `wanted`.
fn lift_face(code: &CodeGraph, f: usize, wanted: &[usize]) -> Option<Vec<usize>> {
    let qudits: Vec<usize> = code.stabilizers()[f].support.iter().map(|&(q, _)| q).collect();
    let rays: Vec<Vec<usize>> = qudits.iter().map(|&q| spokes(code, f, q)).collect();
    let mut best: Option<u32> = None;
    for mask in 0u32..1 << qudits.len() {
        if best.is_some_and(|b| mask.count_ones() >= b.count_ones()) {
            continue;
        }
        let mut odd: Vec<usize> = Vec::new();
        for (i, r) in rays.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for &v in r {
                    match odd.iter().position(|&x| x == v) {
                        Some(p) => {
                            odd.swap_remove(p);
                        }
                        None => odd.push(v),
                    }
                }
            }
        }
        odd.sort_unstable();
        if odd == wanted {
            best = Some(mask);
        }
    }
    best.map(|mask| (0..qudits.len()).filter(|&i| mask >> i & 1 == 1).map(|i| qudits[i]).collect())
}

/// Lift at every face of `color`; returns the qubit correction.
fn lift(code: &CodeGraph, edges: &[(usize, usize)], color: Color) -> Vec<u32> {
    let ns = code.num_stabilizers();
    let mut around: Vec<Vec<usize>> = vec![Vec::new(); ns];
    for &(a, b) in edges {
        for (f, g) in [(a, b), (b, a)] {
            if f < ns && code.node_color(f) == Some(color) {
                match around[f].iter().position(|&x| x == g) {
                    Some(p) => {
                        around[f].swap_remove(p);
                    }
                    None => around[f].push(g),
                }
            }
        }
    }
    let mut out = vec![0; code.num_data()];
    for (f, wanted) in around.iter_mut().enumerate() {
        if wanted.is_empty() {
            continue;
        }
        wanted.sort_unstable();
        for q in lift_face(code, f, wanted).unwrap_or_default() {
            out[q] ^= 1;
        }
    }
    out
}

/// Qubits on the boundary of `color` as edges between the faces they touch;
/// a qubit with a single face links it to the sink `num_stabilizers()`.
fn boundary_links(code: &CodeGraph, color: Color) -> Vec<(usize, usize, usize)> {
    let ns = code.num_stabilizers();
    let Some(node) = code.boundary_node_of_color(color) else {
        return Vec::new();
    };
    (0..code.num_data())
        .filter(|&q| code.data()[q].boundaries.iter().any(|&b| code.boundary_node(b) == node))
        .filter_map(|q| match code.data()[q].checks.as_slice() {
            [(a, _)] => Some((*a, ns, q)),
            [(a, _), (b, _)] => Some((*a, *b, q)),
            _ => None,
        })
        .collect()
}

/// Smallest set of boundary qubits whose faces are exactly `odd`, found as a
/// minimum T-join. `None` if some face cannot be reached.
fn close_on_boundary(code: &CodeGraph, color: Color, odd: &[usize]) -> Option<Vec<usize>> {
    let ns = code.num_stabilizers();
    let links = boundary_links(code, color);
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ns + 1];
    for &(a, b, q) in &links {
        adj[a].push((b, q));
        adj[b].push((a, q));
    }
    let mut ends = odd.to_vec();
    if ends.len() % 2 == 1 {
        ends.push(ns);
    }
    let n = ends.len();
    let searches: Vec<(Vec<u32>, Vec<(usize, usize)>)> = ends
        .iter()
        .map(|&src| {
            let mut dist = vec![u32::MAX; ns + 1];
            let mut parent = vec![(usize::MAX, usize::MAX); ns + 1];
            dist[src] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(v) = queue.pop_front() {
                for &(w, q) in &adj[v] {
                    if dist[w] == u32::MAX {
                        dist[w] = dist[v] + 1;
                        parent[w] = (v, q);
                        queue.push_back(w);
                    }
                }
            }
            (dist, parent)
        })
        .collect();
    let mut graph = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = searches[i].0[ends[j]];
            if d != u32::MAX {
                graph.push((i, j, d as i64));
            }
        }
    }
    let mate = min_weight_perfect_matching(n, &graph)?;
    let mut out = Vec::new();
    for i in 0..n {
        if mate[i] > i {
            let parent = &searches[i].1;
            let mut v = ends[mate[i]];
            while v != ends[i] {
                let (u, q) = parent[v];
                out.push(q);
                v = u;
            }
        }
    }
    Some(out)
}

/// Lift at `color` and close what the lift leaves on that color's boundary.
fn lift_and_close(code: &CodeGraph, edges: &[(usize, usize)], color: Color, live: &[u32]) -> Vec<u32> {
    let mut out = lift(code, edges, color);
    let left = unsatisfied(code, &out, live);
    if !left.is_empty() {
        if let Some(qs) = close_on_boundary(code, color, &left) {
            for q in qs {
                out[q] ^= 1;
            }
        }
    }
    out
}

fn unsatisfied(code: &CodeGraph, correction: &[u32], live: &[u32]) -> Vec<usize> {
    let mut syn = live.to_vec();
    for (q, &x) in correction.iter().enumerate() {
        if x == 1 {
            for &(s, _) in &code.data()[q].checks {
                syn[s] ^= 1;
            }
        }
    }
    (0..syn.len()).filter(|&s| syn[s] != 0).collect()
}

pub(super) fn dsp_in(ledger: &mut TransportLedger<'_>) -> Result<()> {
    let code = ledger.code();
    let flagged = ledger.flagged();
    if flagged.is_empty() {
        return Ok(());
    }
    let mut edges = Vec::new();
    for pair in [[Color::Red, Color::Green], [Color::Red, Color::Blue], [Color::Green, Color::Blue]] {
        match_pair(code, &flagged, pair, &mut edges)?;
    }
    let live = ledger.live_dense().to_vec();
    let best = Color::ALL
        .iter()
        .map(|&c| lift_and_close(code, &edges, c, &live))
        .min_by_key(|x| (unsatisfied(code, x, &live).len(), x.iter().filter(|&&v| v != 0).count()))
        .expect("three colors");
    for (q, &x) in best.iter().enumerate() {
        ledger.data_move(q, x);
    }
    if !ledger.is_clear() {
        super::gcc::gcc_in(ledger)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logical::is_logical_failure;
    use crate::noise::{sample_error, trial_rng, ErrorConfig};
    use crate::syndrome::extract;
    use rand::seq::SliceRandom;

    #[test]
    fn empty_syndrome_needs_nothing() {
        let code = CodeGraph::color_666(7).unwrap();
        assert!(decode_dsp(&code, &Syndrome::default(), QuditDim::QUBIT).unwrap().is_empty());
    }

    #[test]
    fn single_errors_undone_exactly() {
        let code = CodeGraph::color_666(7).unwrap();
        for q in 0..code.num_data() {
            let e: ErrorConfig = [(q, 1)].into_iter().collect();
            let syn = extract(&code, &e, QuditDim::QUBIT).unwrap();
            let c = decode_dsp(&code, &syn, QuditDim::QUBIT).unwrap();
            assert!(e.compose(&c, QuditDim::QUBIT).is_empty(), "q={q}");
        }
    }

    #[test]
    fn fixed_weight_errors_leave_no_syndrome() {
        let code = CodeGraph::color_666(7).unwrap();
        let all: Vec<usize> = (0..code.num_data()).collect();
        for t in 0..2000 {
            let mut rng = trial_rng(31, t);
            let e: ErrorConfig = all.choose_multiple(&mut rng, 3).map(|&q| (q, 1)).collect();
            let syn = extract(&code, &e, QuditDim::QUBIT).unwrap();
            let c = decode_dsp(&code, &syn, QuditDim::QUBIT).unwrap();
            assert!(is_logical_failure(&code, &e, &c, QuditDim::QUBIT).is_ok(), "trial {t}");
        }
    }

    #[test]
    fn random_noise_leaves_no_syndrome() {
        let code = CodeGraph::color_666(9).unwrap();
        for t in 0..300 {
            let e = sample_error(&code, 0.12, QuditDim::QUBIT, &mut trial_rng(77, t)).unwrap();
            let syn = extract(&code, &e, QuditDim::QUBIT).unwrap();
            let c = decode_dsp(&code, &syn, QuditDim::QUBIT).unwrap();
            assert!(is_logical_failure(&code, &e, &c, QuditDim::QUBIT).is_ok());
        }
    }

    #[test]
    fn qudits_rejected() {
        let code = CodeGraph::color_666(5).unwrap();
        assert!(decode_dsp(&code, &Syndrome::default(), QuditDim::new(3).unwrap()).is_err());
    }
}
