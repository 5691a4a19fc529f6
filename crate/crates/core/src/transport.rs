//! Charge transport applied as software corrections.
//!
//! A [`TransportLedger`] holds the accumulated correction together with the
//! live syndrome `input ⊕ extract(correction)`, updated locally on every move.

use crate::charge::QuditDim;
use crate::codegraph::{CodeGraph, CodeKind, Color, UNREACHABLE};
use crate::error::{Error, Result};
use crate::noise::ErrorConfig;
use crate::syndrome::Syndrome;

#[derive(Debug, Clone)]
pub struct TransportLedger<'a> {
    code: &'a CodeGraph,
    dim: QuditDim,
    correction: Vec<u32>,
    live: Vec<u32>,
}

impl<'a> TransportLedger<'a> {
    pub fn new(code: &'a CodeGraph, syndrome: &Syndrome, dim: QuditDim) -> Self {
        Self::from_dense(code, syndrome.to_dense(code.num_stabilizers()), dim)
    }

    pub fn from_dense(code: &'a CodeGraph, live: Vec<u32>, dim: QuditDim) -> Self {
        debug_assert_eq!(live.len(), code.num_stabilizers());
        TransportLedger {
            code,
            dim,
            correction: vec![0; code.num_data()],
            live,
        }
    }

    pub fn code(&self) -> &'a CodeGraph {
        self.code
    }

    pub fn dim(&self) -> QuditDim {
        self.dim
    }

    #[inline]
    pub fn live(&self, s: usize) -> u32 {
        self.live[s]
    }

    pub fn live_dense(&self) -> &[u32] {
        &self.live
    }

    pub fn live_syndrome(&self) -> Syndrome {
        Syndrome::from_dense(&self.live)
    }

    /// Stabilizers with nonzero live charge, in id order.
    pub fn flagged(&self) -> Vec<usize> {
        (0..self.live.len()).filter(|&s| self.live[s] != 0).collect()
    }

    pub fn is_clear(&self) -> bool {
        self.live.iter().all(|&k| k == 0)
    }

    pub fn correction_dense(&self) -> &[u32] {
        &self.correction
    }

    pub fn correction(&self) -> ErrorConfig {
        ErrorConfig::from_dense(&self.correction, self.dim)
    }

    pub fn into_correction(self) -> ErrorConfig {
        ErrorConfig::from_dense(&self.correction, self.dim)
    }

    /// Adds `m` to data qudit `q`; each incident stabilizer shifts by `sign · m`.
    #[inline]
    pub fn data_move(&mut self, q: usize, m: u32) {
        let dim = self.dim;
        let m = m % dim.get();
        if m == 0 {
            return;
        }
        self.correction[q] = dim.add(self.correction[q], m);
        for &(s, sign) in &self.code.data()[q].checks {
            self.live[s] = dim.add(self.live[s], dim.signed(sign, m));
        }
    }

    fn stabilizer_sign(&self, s: usize, q: usize) -> i8 {
        self.code
            .sign(s, q)
            .expect("transport step touches a qudit outside the face")
    }

    fn require_color(&self, node: usize) -> Result<Color> {
        if node >= self.code.num_nodes() {
            return Err(Error::UnknownNode(node));
        }
        self.code.node_color(node).ok_or_else(|| Error::Unsupported {
            decoder: "same-color transport",
            reason: "codes without colored faces".into(),
        })
    }

    /// Moves charge `k` from color-code face `from` to `to`, another face of
    /// the same color or the boundary of that color. Only `from` and `to`
    /// change.
    pub fn transport_same_color(&mut self, from: usize, to: usize, k: u32) -> Result<()> {
        let cf = self.require_color(from)?;
        let ct = self.require_color(to)?;
        if self.code.is_boundary(from) || cf != ct {
            return Err(Error::ColorMismatch { from, to });
        }
        let k = k % self.dim.get();
        if from == to || k == 0 {
            return Ok(());
        }
        let lattice = self.code.shrunk(cf).expect("color code has shrunk lattices");
        let to_boundary = self.code.is_boundary(to);
        let ns = self.code.num_stabilizers();
        let mut cur = from;
        loop {
            let (here, next) = if to_boundary {
                let here = lattice.dist_to_boundary(cur);
                let next = lattice.adj[cur].iter().find(|h| {
                    if h.to >= ns {
                        here == 1
                    } else {
                        lattice.dist_to_boundary(h.to) + 1 == here
                    }
                });
                (here, next)
            } else {
                let here = lattice.dist(cur, to);
                let next = lattice
                    .adj[cur]
                    .iter()
                    .find(|h| h.to < ns && lattice.dist(h.to, to) + 1 == here);
                (here, next)
            };
            if here == UNREACHABLE {
                return Err(Error::Unreachable(from, to));
            }
            let hop = *next.ok_or(Error::Unreachable(from, to))?;
            let m = self.dim.signed(-self.stabilizer_sign(cur, hop.qudits[0]), k);
            self.data_move(hop.qudits[0], m);
            self.data_move(hop.qudits[1], m);
            if hop.to >= ns || hop.to == to {
                return Ok(());
            }
            cur = hop.to;
        }
    }

    /// Applies one move at the qudit shared by three mutually adjacent faces,
    /// with the magnitude that zeroes the live charge of the `cancel` face.
    /// Returns the applied magnitude.
    pub fn charge_identity(&mut self, faces: [usize; 3], cancel: usize) -> Result<u32> {
        if !faces.contains(&cancel) {
            return Err(Error::Precondition(format!(
                "face {cancel} is not one of {faces:?}"
            )));
        }
        let q = common_qudit(self.code, faces).ok_or_else(|| Error::NoCommonQudit(faces.to_vec()))?;
        let sign = self.stabilizer_sign(cancel, q);
        let m = self.dim.signed(-sign, self.live[cancel]);
        self.data_move(q, m);
        Ok(m)
    }

    /// Surface code: moves charge `k` from plaquette `from` to plaquette or
    /// boundary `to` along a shortest chain of single-qudit links.
    pub fn transport_chain_surface(&mut self, from: usize, to: usize, k: u32) -> Result<()> {
        if self.code.kind() != CodeKind::Surface {
            return Err(Error::Unsupported {
                decoder: "chain transport",
                reason: "codes other than the surface code".into(),
            });
        }
        if from >= self.code.num_nodes() {
            return Err(Error::UnknownNode(from));
        }
        if to >= self.code.num_nodes() {
            return Err(Error::UnknownNode(to));
        }
        if self.code.is_boundary(from) {
            return Err(Error::Precondition(format!(
                "chain transport must start at a plaquette, not boundary node {from}"
            )));
        }
        let k = k % self.dim.get();
        if from == to || k == 0 {
            return Ok(());
        }
        let path = self.code.dual_path(from, to)?;
        for w in path.windows(2) {
            let q = self
                .code
                .link_qudit(w[0], w[1])
                .ok_or(Error::Unreachable(w[0], w[1]))?;
            let m = self.dim.signed(-self.stabilizer_sign(w[0], q), k);
            self.data_move(q, m);
        }
        Ok(())
    }
}

/// The data qudit shared by three faces, if any.
pub fn common_qudit(code: &CodeGraph, faces: [usize; 3]) -> Option<usize> {
    let n = code.num_stabilizers();
    if faces.iter().any(|&f| f >= n) {
        return None;
    }
    code.stabilizers()[faces[0]]
        .support
        .iter()
        .map(|&(q, _)| q)
        .find(|&q| {
            faces[1..]
                .iter()
                .all(|&f| code.stabilizers()[f].support.iter().any(|&(r, _)| r == q))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syndrome::extract;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_consistent(ledger: &TransportLedger, original: &Syndrome) {
        let dim = ledger.dim();
        let from_scratch = extract(ledger.code(), &ledger.correction(), dim)
            .unwrap()
            .combine(original, dim);
        assert_eq!(ledger.live_syndrome(), from_scratch);
    }

    fn internal_qudit(code: &CodeGraph) -> usize {
        (0..code.num_data())
            .find(|&q| code.data()[q].checks.len() == 3 && code.data()[q].pos[0] > 3.0)
            .unwrap()
    }

    #[test]
    fn moving_out_of_red_shifts_blue_and_green_equally() {
        let code = CodeGraph::color_666(7).unwrap();
        let dim = QuditDim::new(5).unwrap();
        // both parities of qudit give the same shift on the other colors
        let mut shifts = Vec::new();
        for q in (0..code.num_data()).filter(|&q| code.data()[q].checks.len() == 3) {
            let mut ledger = TransportLedger::new(&code, &Syndrome::default(), dim);
            let red = code.data()[q]
                .checks
                .iter()
                .find(|&&(s, _)| code.stabilizers()[s].color == Some(Color::Red))
                .unwrap();
            let k = 2;
            ledger.data_move(q, dim.signed(-red.1, k));
            for &(s, _) in &code.data()[q].checks {
                let c = code.stabilizers()[s].color.unwrap();
                if c == Color::Red {
                    assert_eq!(ledger.live(s), dim.neg(k));
                } else {
                    shifts.push(ledger.live(s));
                }
            }
        }
        shifts.dedup();
        assert_eq!(shifts, vec![2]);
    }

    #[test]
    fn inverse_move_restores_ledger() {
        let code = CodeGraph::color_666(5).unwrap();
        let dim = QuditDim::new(7).unwrap();
        let mut ledger = TransportLedger::new(&code, &Syndrome::default(), dim);
        let q = internal_qudit(&code);
        ledger.data_move(q, 3);
        ledger.data_move(q, 4);
        assert!(ledger.is_clear());
        assert!(ledger.correction().is_empty());
    }

    #[test]
    fn pair_on_red_face_moves_charge_between_its_neighbors() {
        let code = CodeGraph::color_666(9).unwrap();
        let dim = QuditDim::new(5).unwrap();
        let red = (0..code.num_stabilizers())
            .find(|&s| {
                code.stabilizers()[s].color == Some(Color::Red)
                    && code.dual_neighbors(s).iter().all(|&n| {
                        !code.is_boundary(n) && code.stabilizers()[n].support.len() == 6
                    })
            })
            .unwrap();
        // qudits at positions 1 and 2 are the second and third in support order
        let sup = &code.stabilizers()[red].support;
        let (alpha, beta) = (sup[1].0, sup[2].0);
        let mut ledger = TransportLedger::new(&code, &Syndrome::default(), dim);
        ledger.data_move(alpha, 1);
        ledger.data_move(beta, 1);
        let flagged = ledger.flagged();
        assert_eq!(flagged.len(), 2);
        assert!(!flagged.contains(&red));
        let (b1, b2) = (flagged[0], flagged[1]);
        assert_eq!(code.stabilizers()[b1].color, code.stabilizers()[b2].color);
        assert_eq!(dim.add(ledger.live(b1), ledger.live(b2)), 0);
    }

    #[test]
    fn same_color_transport_touches_only_endpoints() {
        let code = CodeGraph::color_666(11).unwrap();
        let dim = QuditDim::new(5).unwrap();
        let ns = code.num_stabilizers();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let from = rng.gen_range(0..ns);
            let color = code.stabilizers()[from].color.unwrap();
            let same: Vec<usize> =
                (0..ns).filter(|&s| code.stabilizers()[s].color == Some(color)).collect();
            let to = same[rng.gen_range(0..same.len())];
            let k = rng.gen_range(1..5);
            let mut ledger = TransportLedger::new(&code, &Syndrome::default(), dim);
            ledger.transport_same_color(from, to, k).unwrap();
            for s in 0..ns {
                let expect = if from == to {
                    0
                } else if s == from {
                    dim.neg(k)
                } else if s == to {
                    k
                } else {
                    0
                };
                assert_eq!(ledger.live(s), expect, "from {from} to {to} stab {s}");
            }
            assert_consistent(&ledger, &Syndrome::default());
        }
    }

    #[test]
    fn same_color_transport_into_boundary() {
        let code = CodeGraph::color_666(9).unwrap();
        let dim = QuditDim::new(3).unwrap();
        for s in 0..code.num_stabilizers() {
            let color = code.stabilizers()[s].color.unwrap();
            let b = code.boundary_node_of_color(color).unwrap();
            let mut ledger = TransportLedger::new(&code, &Syndrome::default(), dim);
            ledger.transport_same_color(s, b, 1).unwrap();
            assert_eq!(ledger.flagged(), vec![s]);
            assert_eq!(ledger.live(s), 2);
        }
    }

    #[test]
    fn long_hop_adds_equal_charge_to_both_qudits() {
        let code = CodeGraph::color_666(11).unwrap();
        let dim = QuditDim::new(7).unwrap();
        let lattice = code.shrunk(Color::Blue).unwrap();
        let ns = code.num_stabilizers();
        let (from, to) = (0..ns)
            .flat_map(|a| (0..ns).map(move |b| (a, b)))
            .find(|&(a, b)| {
                code.stabilizers()[a].color == Some(Color::Blue) && lattice.dist(a, b) == 3
            })
            .unwrap();
        let mut ledger = TransportLedger::new(&code, &Syndrome::default(), dim);
        ledger.transport_same_color(from, to, 2).unwrap();
        let touched: Vec<u32> = ledger.correction().iter().map(|(_, m)| m).collect();
        assert_eq!(touched.len(), 6);
        assert!(touched.windows(2).all(|w| w[0] == w[1]) || touched.iter().all(|&m| m == 2 || m == 5));
        assert_eq!(ledger.flagged(), {
            let mut v = vec![from, to];
            v.sort();
            v
        });
    }

    #[test]
    fn color_mismatch_rejected() {
        let code = CodeGraph::color_666(7).unwrap();
        let dim = QuditDim::new(3).unwrap();
        let a = 0;
        let b = code.dual_neighbors(a)[0];
        let mut ledger = TransportLedger::new(&code, &Syndrome::default(), dim);
        assert!(matches!(
            ledger.transport_same_color(a, b, 1),
            Err(Error::ColorMismatch { .. })
        ));
        ledger.transport_same_color(a, a, 1).unwrap();
        assert!(ledger.correction().is_empty());
    }

    #[test]
    fn charge_identity_cases() {
        let code = CodeGraph::color_666(7).unwrap();
        let d3 = QuditDim::new(3).unwrap();
        let q = internal_qudit(&code);
        let faces: Vec<usize> = code.data()[q].checks.iter().map(|&(s, _)| s).collect();
        let faces = [faces[0], faces[1], faces[2]];
        let red = *faces
            .iter()
            .find(|&&f| code.stabilizers()[f].color == Some(Color::Red))
            .unwrap();

        let mut ledger = TransportLedger::new(&code, &Syndrome::default(), d3);
        assert_eq!(ledger.charge_identity(faces, red).unwrap(), 0);
        assert!(ledger.correction().is_empty());

        let syn: Syndrome = [(red, 1)].into_iter().collect();
        let mut ledger = TransportLedger::new(&code, &syn, d3);
        let red_sign = code.sign(red, q).unwrap();
        let m = ledger.charge_identity(faces, red).unwrap();
        assert_eq!(m, d3.signed(-red_sign, 1));
        assert_eq!(ledger.live(red), 0);
        for &f in &faces {
            if f != red {
                let s = code.sign(f, q).unwrap();
                assert_eq!(ledger.live(f), d3.signed(s, m));
            }
        }
        ledger.data_move(q, d3.neg(m));
        assert_eq!(ledger.live_syndrome(), syn);

        let far = (0..code.num_stabilizers())
            .find(|&s| !faces.contains(&s) && code.dual_distance(s, faces[0]).unwrap() > 2)
            .unwrap();
        assert!(matches!(
            ledger.charge_identity([faces[0], faces[1], far], faces[0]),
            Err(Error::NoCommonQudit(_))
        ));
    }

    #[test]
    fn surface_chain_examples() {
        let code = CodeGraph::surface(9).unwrap();
        let d2 = QuditDim::QUBIT;
        let a = 10;
        let b = code.dual_neighbors(a).iter().copied().find(|&n| !code.is_boundary(n)).unwrap();
        let mut ledger = TransportLedger::new(&code, &Syndrome::default(), d2);
        ledger.transport_chain_surface(a, b, 1).unwrap();
        assert_eq!(ledger.correction().weight(), 1);
        let mut ledger = TransportLedger::new(&code, &Syndrome::default(), d2);
        ledger.transport_chain_surface(a, a, 1).unwrap();
        assert!(ledger.correction().is_empty());

        let d5 = QuditDim::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let from = rng.gen_range(0..code.num_stabilizers());
            let to = rng.gen_range(0..code.num_nodes());
            let k = rng.gen_range(1..5);
            let mut ledger = TransportLedger::new(&code, &Syndrome::default(), d5);
            ledger.transport_chain_surface(from, to, k).unwrap();
            let s = extract(&code, &ledger.correction(), d5).unwrap();
            let expected = if from == to {
                0
            } else if code.is_boundary(to) {
                1
            } else {
                2
            };
            assert_eq!(s.len(), expected);
            assert_eq!(s.get(from), if from == to { 0 } else { d5.neg(k) });
        }
    }

    #[test]
    fn surface_chain_rejects_color_code() {
        let code = CodeGraph::color_666(5).unwrap();
        let mut ledger = TransportLedger::new(&code, &Syndrome::default(), QuditDim::QUBIT);
        assert!(ledger.transport_chain_surface(0, 1, 1).is_err());
    }

    #[test]
    fn ledger_stays_consistent_under_random_moves() {
        let code = CodeGraph::color_666(9).unwrap();
        let dim = QuditDim::new(4).unwrap();
        let ns = code.num_stabilizers();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let original: Syndrome = (0..ns).map(|s| (s, rng.gen_range(0..4))).collect();
        let mut ledger = TransportLedger::new(&code, &original, dim);
        for _ in 0..1000 {
            match rng.gen_range(0..3) {
                0 => ledger.data_move(rng.gen_range(0..code.num_data()), rng.gen_range(0..4)),
                1 => {
                    let from = rng.gen_range(0..ns);
                    let c = code.stabilizers()[from].color.unwrap();
                    let to = if rng.gen_bool(0.2) {
                        code.boundary_node_of_color(c).unwrap()
                    } else {
                        let same: Vec<_> =
                            (0..ns).filter(|&s| code.stabilizers()[s].color == Some(c)).collect();
                        same[rng.gen_range(0..same.len())]
                    };
                    ledger.transport_same_color(from, to, rng.gen_range(0..4)).unwrap();
                }
                _ => {
                    let q = rng.gen_range(0..code.num_data());
                    if code.data()[q].checks.len() == 3 {
                        let f: Vec<_> = code.data()[q].checks.iter().map(|&(s, _)| s).collect();
                        ledger.charge_identity([f[0], f[1], f[2]], f[rng.gen_range(0..3)]).unwrap();
                    }
                }
            }
        }
        assert_consistent(&ledger, &original);
    }
}
