//! Lattice construction for the planar surface code and the triangular 6-6-6
//! color code.
//!
//! Both codes are described by the same [`CodeGraph`]: the X-error detecting
//! stabilizers with signed incidence on the data qudits, a handful of boundary
//! nodes, the dual graph (stabilizers plus boundaries) with all-pairs hop
//! distances, the X-type stabilizer generators that leave the syndrome
//! unchanged, and one Z-type logical operator used for the failure check.
//!
//! Node ids in the dual graph are `0..num_stabilizers()` for stabilizers,
//! followed by one id per boundary.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::charge::QuditDim;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    Surface,
    #[serde(rename = "color666")]
    Color666,
}

impl CodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CodeKind::Surface => "surface",
            CodeKind::Color666 => "color666",
        }
    }
}

impl std::str::FromStr for CodeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "surface" => Ok(CodeKind::Surface),
            "color666" | "color" | "666" => Ok(CodeKind::Color666),
            other => Err(Error::Parse(format!("unknown code kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for CodeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Green,
    Blue,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Red, Color::Green, Color::Blue];

    /// The color whose orientation convention is reversed.
    pub const PRIVILEGED: Color = Color::Red;

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Color {
        Color::ALL[i % 3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryLabel {
    /// Rough boundary above the first plaquette row of the surface code.
    Top,
    /// Rough boundary below the last plaquette row of the surface code.
    Bottom,
    /// One side of the color-code triangle.
    Side(Color),
}

#[derive(Debug, Clone)]
pub struct Stabilizer {
    pub pos: [f64; 2],
    pub color: Option<Color>,
    /// `(data qudit, orientation sign)` pairs.
    pub support: Vec<(usize, i8)>,
}

#[derive(Debug, Clone)]
pub struct Boundary {
    pub label: BoundaryLabel,
    pub pos: [f64; 2],
}

impl Boundary {
    pub fn color(&self) -> Option<Color> {
        match self.label {
            BoundaryLabel::Side(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DataQudit {
    pub pos: [f64; 2],
    /// `(stabilizer, orientation sign)` pairs.
    pub checks: Vec<(usize, i8)>,
    /// Boundaries this qudit touches (indices into [`CodeGraph::boundaries`]).
    pub boundaries: Vec<usize>,
}

/// One step of same-color transport: two data qudits receive equal charge,
/// moving charge between two faces of the same color.
#[derive(Debug, Clone, Copy)]
pub struct ShrunkHop {
    pub to: usize,
    pub qudits: [usize; 2],
}

/// Face outside the patch; charge pushed into it is absorbed by the boundary.
#[derive(Debug, Clone)]
pub struct VirtualFace {
    pub pos: [f64; 2],
    pub color: Color,
}

/// Same-color transport graph for one color of the 6-6-6 code. Site ids are
/// stabilizer ids for real faces and `num_stabilizers() + v` for virtual face `v`.
#[derive(Debug, Clone)]
pub struct ShrunkLattice {
    pub color: Color,
    pub adj: Vec<Vec<ShrunkHop>>,
    n_sites: usize,
    dist: Vec<u16>,
    to_boundary: Vec<u16>,
}

pub const UNREACHABLE: u16 = u16::MAX;

impl ShrunkLattice {
    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> u16 {
        self.dist[a * self.n_sites + b]
    }

    #[inline]
    pub fn dist_to_boundary(&self, a: usize) -> u16 {
        self.to_boundary[a]
    }
}

#[derive(Debug, Clone)]
pub struct CodeGraph {
    kind: CodeKind,
    distance: usize,
    stabilizers: Vec<Stabilizer>,
    data: Vec<DataQudit>,
    boundaries: Vec<Boundary>,
    x_generators: Vec<Vec<(usize, i64)>>,
    logical: Vec<(usize, i8)>,
    dual_adj: Vec<Vec<usize>>,
    dual_dist: Vec<u16>,
    /// Surface code only: `(neighbor node, shared qudit)` per dual node.
    links: Vec<Vec<(usize, usize)>>,
    virtual_faces: Vec<VirtualFace>,
    shrunk: Vec<ShrunkLattice>,
    diameter: usize,
}

fn check_distance(distance: usize) -> Result<()> {
    if distance < 3 || distance % 2 == 0 {
        return Err(Error::InvalidDistance(distance));
    }
    Ok(())
}

/// Neighbor offsets on the triangular lattice, counterclockwise from the
/// positive x axis; the index is the orientation position 0..5.
const TRI_DIRS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
/// Offsets between adjacent face centers.
const FACE_DIRS: [(i64, i64); 6] = [(1, 1), (-1, 2), (-2, 1), (-1, -1), (1, -2), (2, -1)];
/// Offsets between nearest faces of the same color.
const SAME_COLOR_DIRS: [(i64, i64); 6] = [(3, 0), (0, 3), (-3, 3), (-3, 0), (0, -3), (3, -3)];

fn tri_pos(i: i64, j: i64) -> [f64; 2] {
    [i as f64 + 0.5 * j as f64, j as f64 * 3f64.sqrt() / 2.0]
}

#[inline]
fn is_face_center(i: i64, j: i64) -> bool {
    (i - j - 1).rem_euclid(3) == 0
}

#[inline]
fn face_color(j: i64) -> Color {
    Color::from_index(j.rem_euclid(3) as usize)
}

impl CodeGraph {
    pub fn build(kind: CodeKind, distance: usize) -> Result<Self> {
        match kind {
            CodeKind::Surface => Self::surface(distance),
            CodeKind::Color666 => Self::color_666(distance),
        }
    }

    /// Planar Kitaev code. Data qudits sit on a `(2d-1) x (2d-1)` checkerboard;
    /// plaquettes detect X errors and have rough boundaries at the top and
    /// bottom, stars are the X-type generators.
    pub fn surface(distance: usize) -> Result<Self> {
        check_distance(distance)?;
        let n = 2 * distance - 1;
        let mut data_index = HashMap::new();
        let mut data = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if (r + c) % 2 == 0 {
                    data_index.insert((r, c), data.len());
                    data.push(DataQudit {
                        pos: [c as f64, -(r as f64)],
                        checks: Vec::new(),
                        boundaries: Vec::new(),
                    });
                }
            }
        }
        let neighbor = |r: usize, c: usize, dr: i64, dc: i64| -> Option<usize> {
            let rr = r as i64 + dr;
            let cc = c as i64 + dc;
            if rr < 0 || cc < 0 || rr >= n as i64 || cc >= n as i64 {
                return None;
            }
            data_index.get(&(rr as usize, cc as usize)).copied()
        };
        // (dr, dc, plaquette sign, star sign) for up, down, left, right.
        const ARMS: [(i64, i64, i8, i8); 4] =
            [(-1, 0, 1, 1), (1, 0, -1, -1), (0, -1, 1, -1), (0, 1, -1, 1)];

        let mut stabilizers = Vec::new();
        for r in (1..n).step_by(2) {
            for c in (0..n).step_by(2) {
                let support = ARMS
                    .iter()
                    .filter_map(|&(dr, dc, s, _)| neighbor(r, c, dr, dc).map(|q| (q, s)))
                    .collect();
                stabilizers.push(Stabilizer {
                    pos: [c as f64, -(r as f64)],
                    color: None,
                    support,
                });
            }
        }
        let mut x_generators = Vec::new();
        for r in (0..n).step_by(2) {
            for c in (1..n).step_by(2) {
                x_generators.push(
                    ARMS.iter()
                        .filter_map(|&(dr, dc, _, s)| {
                            neighbor(r, c, dr, dc).map(|q| (q, s as i64))
                        })
                        .collect(),
                );
            }
        }
        let mid = (n - 1) as f64 / 2.0;
        let boundaries = vec![
            Boundary {
                label: BoundaryLabel::Top,
                pos: [mid, 1.0],
            },
            Boundary {
                label: BoundaryLabel::Bottom,
                pos: [mid, -(n as f64)],
            },
        ];
        for c in (0..n).step_by(2) {
            data[data_index[&(0, c)]].boundaries.push(0);
            data[data_index[&(n - 1, c)]].boundaries.push(1);
        }
        let logical = (0..n).step_by(2).map(|c| (data_index[&(0, c)], 1)).collect();
        Ok(Self::assemble(
            CodeKind::Surface,
            distance,
            stabilizers,
            data,
            boundaries,
            x_generators,
            logical,
            Vec::new(),
        ))
    }

    /// Triangular 6-6-6 color code. Face centers and data qudits are both
    /// points of a triangular lattice; the patch is the lattice triangle
    /// `i, j >= 0, i + j <= 3(d-1)/2`. Faces centered outside the triangle are
    /// kept as virtual faces, one color per side.
    pub fn color_666(distance: usize) -> Result<Self> {
        check_distance(distance)?;
        let side = (3 * (distance - 1) / 2) as i64;
        let inside = |i: i64, j: i64| i >= 0 && j >= 0 && i + j <= side;

        let mut data_index = HashMap::new();
        let mut data = Vec::new();
        for j in 0..=side {
            for i in 0..=(side - j) {
                if !is_face_center(i, j) {
                    data_index.insert((i, j), data.len());
                    data.push(DataQudit {
                        pos: tri_pos(i, j),
                        checks: Vec::new(),
                        boundaries: Vec::new(),
                    });
                }
            }
        }

        let mut stabilizers = Vec::new();
        let mut face_coords = Vec::new();
        let mut virtual_faces = Vec::new();
        let mut virtual_coords = Vec::new();
        let mut virtual_support: Vec<Vec<usize>> = Vec::new();
        for j in -1..=side + 1 {
            for i in -1..=side + 1 {
                if !is_face_center(i, j) {
                    continue;
                }
                let color = face_color(j);
                let mut support = Vec::new();
                for (pos, &(di, dj)) in TRI_DIRS.iter().enumerate() {
                    if let Some(&q) = data_index.get(&(i + di, j + dj)) {
                        let mut sign: i8 = if pos % 2 == 0 { 1 } else { -1 };
                        if color == Color::PRIVILEGED {
                            sign = -sign;
                        }
                        support.push((q, sign));
                    }
                }
                if support.is_empty() {
                    continue;
                }
                if inside(i, j) {
                    face_coords.push((i, j));
                    stabilizers.push(Stabilizer {
                        pos: tri_pos(i, j),
                        color: Some(color),
                        support,
                    });
                } else {
                    virtual_coords.push((i, j));
                    virtual_faces.push(VirtualFace {
                        pos: tri_pos(i, j),
                        color,
                    });
                    virtual_support.push(support.into_iter().map(|(q, _)| q).collect());
                }
            }
        }

        // One boundary per color, placed at the mean of its virtual faces.
        let mut boundaries = Vec::new();
        let mut boundary_of_color = [usize::MAX; 3];
        for color in Color::ALL {
            let members: Vec<_> = virtual_faces.iter().filter(|v| v.color == color).collect();
            if members.is_empty() {
                continue;
            }
            let k = members.len() as f64;
            let pos = [
                members.iter().map(|v| v.pos[0]).sum::<f64>() / k,
                members.iter().map(|v| v.pos[1]).sum::<f64>() / k,
            ];
            boundary_of_color[color.index()] = boundaries.len();
            boundaries.push(Boundary {
                label: BoundaryLabel::Side(color),
                pos,
            });
        }
        for (v, support) in virtual_support.iter().enumerate() {
            let b = boundary_of_color[virtual_faces[v].color.index()];
            for &q in support {
                if !data[q].boundaries.contains(&b) {
                    data[q].boundaries.push(b);
                }
            }
        }

        let x_generators = stabilizers
            .iter()
            .map(|s| s.support.iter().map(|&(q, _)| (q, 1i64)).collect())
            .collect();

        // Logical Z along the side j = 0, signed by orientation parity.
        let logical = (0..=side)
            .filter_map(|i| {
                data_index.get(&(i, 0)).map(|&q| {
                    let sign = if (i - 1).rem_euclid(3) == 1 { 1 } else { -1 };
                    (q, sign)
                })
            })
            .collect();

        let mut code = Self::assemble(
            CodeKind::Color666,
            distance,
            stabilizers,
            data,
            boundaries,
            x_generators,
            logical,
            virtual_faces,
        );
        code.shrunk = Color::ALL
            .iter()
            .map(|&c| code.build_shrunk(c, &face_coords, &virtual_coords, &data_index))
            .collect();
        Ok(code)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        kind: CodeKind,
        distance: usize,
        stabilizers: Vec<Stabilizer>,
        mut data: Vec<DataQudit>,
        boundaries: Vec<Boundary>,
        x_generators: Vec<Vec<(usize, i64)>>,
        logical: Vec<(usize, i8)>,
        virtual_faces: Vec<VirtualFace>,
    ) -> Self {
        for (s, stab) in stabilizers.iter().enumerate() {
            for &(q, sign) in &stab.support {
                data[q].checks.push((s, sign));
            }
        }
        let ns = stabilizers.len();
        let nn = ns + boundaries.len();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nn];
        let mut shared: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (q, dq) in data.iter().enumerate() {
            let mut nodes: Vec<usize> = dq.checks.iter().map(|&(s, _)| s).collect();
            nodes.extend(dq.boundaries.iter().map(|&b| ns + b));
            for a in 0..nodes.len() {
                for b in 0..nodes.len() {
                    let (x, y) = (nodes[a], nodes[b]);
                    // boundaries are never adjacent to each other
                    if x == y || (x >= ns && y >= ns) {
                        continue;
                    }
                    adj[x].insert(y);
                    if x < y {
                        shared.entry((x, y)).or_default().push(q);
                    }
                }
            }
        }
        let dual_adj: Vec<Vec<usize>> = adj.into_iter().map(|s| s.into_iter().collect()).collect();
        let dual_dist = all_pairs(&dual_adj, |v| v >= ns);

        let mut links = Vec::new();
        if kind == CodeKind::Surface {
            links = vec![Vec::new(); nn];
            for (&(x, y), qs) in &shared {
                if qs.len() == 1 {
                    links[x].push((y, qs[0]));
                    links[y].push((x, qs[0]));
                }
            }
            for l in links.iter_mut() {
                l.sort_unstable();
            }
        }
        let diameter = dual_dist
            .iter()
            .filter(|&&d| d != UNREACHABLE)
            .map(|&d| d as usize)
            .max()
            .unwrap_or(0);
        CodeGraph {
            kind,
            distance,
            stabilizers,
            data,
            boundaries,
            x_generators,
            logical,
            dual_adj,
            dual_dist,
            links,
            virtual_faces,
            shrunk: Vec::new(),
            diameter,
        }
    }

    fn build_shrunk(
        &self,
        color: Color,
        face_coords: &[(i64, i64)],
        virtual_coords: &[(i64, i64)],
        data_index: &HashMap<(i64, i64), usize>,
    ) -> ShrunkLattice {
        let ns = self.stabilizers.len();
        let n_sites = ns + self.virtual_faces.len();
        let mut site_at: HashMap<(i64, i64), usize> = HashMap::new();
        for (s, &xy) in face_coords.iter().enumerate() {
            if self.stabilizers[s].color == Some(color) {
                site_at.insert(xy, s);
            }
        }
        for (v, &xy) in virtual_coords.iter().enumerate() {
            if self.virtual_faces[v].color == color {
                site_at.insert(xy, ns + v);
            }
        }
        let mut adj = vec![Vec::new(); n_sites];
        let mut sites: Vec<(&(i64, i64), &usize)> = site_at.iter().collect();
        sites.sort_by_key(|&(_, &s)| s);
        for (&(i, j), &x) in sites {
            for &(wi, wj) in &SAME_COLOR_DIRS {
                let Some(&y) = site_at.get(&(i + wi, j + wj)) else {
                    continue;
                };
                if x >= ns && y >= ns {
                    continue;
                }
                let mids: Vec<(i64, i64)> = FACE_DIRS
                    .iter()
                    .filter(|&&(ui, uj)| FACE_DIRS.contains(&(wi - ui, wj - uj)))
                    .map(|&(ui, uj)| (i + ui, j + uj))
                    .collect();
                debug_assert_eq!(mids.len(), 2);
                // qudits sit at the centroids of the triangles (X, U, V) and (Y, U, V)
                let su = (mids[0].0 + mids[1].0, mids[0].1 + mids[1].1);
                let alpha = ((i + su.0).div_euclid(3), (j + su.1).div_euclid(3));
                let beta = ((i + wi + su.0).div_euclid(3), (j + wj + su.1).div_euclid(3));
                if let (Some(&qa), Some(&qb)) = (data_index.get(&alpha), data_index.get(&beta)) {
                    adj[x].push(ShrunkHop {
                        to: y,
                        qudits: [qa, qb],
                    });
                }
            }
        }
        for a in adj.iter_mut() {
            a.sort_by_key(|h| h.to);
        }
        let plain: Vec<Vec<usize>> = adj.iter().map(|a| a.iter().map(|h| h.to).collect()).collect();
        let dist = all_pairs(&plain, |v| v >= ns);
        let sources: Vec<usize> = (ns..n_sites)
            .filter(|&v| self.virtual_faces[v - ns].color == color)
            .collect();
        let to_boundary = bfs_multi(&plain, &sources, |v| v >= ns);
        ShrunkLattice {
            color,
            adj,
            n_sites,
            dist,
            to_boundary,
        }
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn num_stabilizers(&self) -> usize {
        self.stabilizers.len()
    }

    pub fn num_data(&self) -> usize {
        self.data.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.stabilizers.len() + self.boundaries.len()
    }

    pub fn stabilizers(&self) -> &[Stabilizer] {
        &self.stabilizers
    }

    pub fn data(&self) -> &[DataQudit] {
        &self.data
    }

    pub fn boundaries(&self) -> &[Boundary] {
        &self.boundaries
    }

    pub fn x_generators(&self) -> &[Vec<(usize, i64)>] {
        &self.x_generators
    }

    pub fn logical(&self) -> &[(usize, i8)] {
        &self.logical
    }

    pub fn dual_neighbors(&self, node: usize) -> &[usize] {
        &self.dual_adj[node]
    }

    pub fn virtual_faces(&self) -> &[VirtualFace] {
        &self.virtual_faces
    }

    /// Largest finite hop distance in the dual graph.
    pub fn diameter(&self) -> usize {
        self.diameter
    }

    #[inline]
    pub fn is_boundary(&self, node: usize) -> bool {
        node >= self.stabilizers.len()
    }

    /// Dual node id of boundary `b`.
    #[inline]
    pub fn boundary_node(&self, b: usize) -> usize {
        self.stabilizers.len() + b
    }

    /// Color of a stabilizer or color-code boundary node.
    pub fn node_color(&self, node: usize) -> Option<Color> {
        if node < self.stabilizers.len() {
            self.stabilizers[node].color
        } else {
            self.boundaries.get(node - self.stabilizers.len())?.color()
        }
    }

    pub fn boundary_node_of_color(&self, color: Color) -> Option<usize> {
        self.boundaries
            .iter()
            .position(|b| b.color() == Some(color))
            .map(|b| self.boundary_node(b))
    }

    pub fn node_pos(&self, node: usize) -> [f64; 2] {
        if node < self.stabilizers.len() {
            self.stabilizers[node].pos
        } else {
            self.boundaries[node - self.stabilizers.len()].pos
        }
    }

    /// Orientation sign of qudit `q` in stabilizer `s`, or `None` if disjoint.
    pub fn sign(&self, s: usize, q: usize) -> Option<i8> {
        self.stabilizers[s]
            .support
            .iter()
            .find(|&&(d, _)| d == q)
            .map(|&(_, sign)| sign)
    }

    /// Hop count between two dual nodes. Paths never pass through a
    /// boundary; boundaries are only endpoints.
    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> u16 {
        self.dual_dist[a * self.num_nodes() + b]
    }

    pub fn dual_distance(&self, a: usize, b: usize) -> Result<usize> {
        let n = self.num_nodes();
        if a >= n {
            return Err(Error::UnknownNode(a));
        }
        if b >= n {
            return Err(Error::UnknownNode(b));
        }
        match self.dist(a, b) {
            UNREACHABLE => Err(Error::Unreachable(a, b)),
            d => Ok(d as usize),
        }
    }

    /// Shortest dual path from `a` to `b`, inclusive, preferring the smallest
    /// neighbor id at every step.
    pub fn dual_path(&self, a: usize, b: usize) -> Result<Vec<usize>> {
        let total = self.dual_distance(a, b)?;
        let mut path = Vec::with_capacity(total + 1);
        path.push(a);
        let mut cur = a;
        while cur != b {
            let here = self.dist(cur, b);
            cur = *self.dual_adj[cur]
                .iter()
                .find(|&&n| (n == b || !self.is_boundary(n)) && self.dist(n, b) + 1 == here)
                .ok_or(Error::Unreachable(a, b))?;
            path.push(cur);
        }
        Ok(path)
    }

    /// Surface code: the single qudit shared by adjacent dual nodes.
    pub fn link_qudit(&self, a: usize, b: usize) -> Option<usize> {
        self.links
            .get(a)?
            .iter()
            .find(|&&(n, _)| n == b)
            .map(|&(_, q)| q)
    }

    pub fn shrunk(&self, color: Color) -> Option<&ShrunkLattice> {
        self.shrunk.get(color.index())
    }

    /// Swaps the orientation sign of one incidence. Only useful for checking
    /// that [`validate`](Self::validate) catches broken orientations.
    pub fn flip_sign(&mut self, s: usize, q: usize) {
        for e in self.stabilizers[s].support.iter_mut() {
            if e.0 == q {
                e.1 = -e.1;
            }
        }
        for e in self.data[q].checks.iter_mut() {
            if e.0 == s {
                e.1 = -e.1;
            }
        }
    }

    /// Pairs `(X generator, stabilizer)` whose signed overlap is nonzero mod `dim`.
    pub fn commutativity_violations(&self, dim: QuditDim) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (g, gen) in self.x_generators.iter().enumerate() {
            for (s, stab) in self.stabilizers.iter().enumerate() {
                let sum: i64 = gen
                    .iter()
                    .filter_map(|&(q, e)| {
                        stab.support
                            .iter()
                            .find(|&&(d, _)| d == q)
                            .map(|&(_, sign)| e * sign as i64)
                    })
                    .sum();
                if dim.reduce(sum) != 0 {
                    out.push((g, s));
                }
            }
        }
        out
    }

    /// Lists every structural invariant this code violates. Empty for a
    /// correctly built code. Commutativity is checked over the integers,
    /// which implies it for every qudit dimension.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        let d = self.distance;
        let expected = match self.kind {
            CodeKind::Surface => d * d + (d - 1) * (d - 1),
            CodeKind::Color666 => (3 * d * d + 1) / 4,
        };
        if self.data.len() != expected {
            v.push(format!("expected {expected} data qudits, found {}", self.data.len()));
        }
        // Integer-exact commutativity: use a dimension larger than any overlap.
        let big = QuditDim::new(1 << 20).expect("valid dimension");
        for (g, s) in self.commutativity_violations(big) {
            v.push(format!("X generator {g} does not commute with stabilizer {s}"));
        }
        let logical_big = self.x_generators.iter().enumerate().filter(|(_, gen)| {
            let sum: i64 = gen
                .iter()
                .filter_map(|&(q, e)| {
                    self.logical.iter().find(|&&(l, _)| l == q).map(|&(_, s)| e * s as i64)
                })
                .sum();
            sum != 0
        });
        for (g, _) in logical_big {
            v.push(format!("logical operator does not commute with X generator {g}"));
        }
        if self.dual_dist.contains(&UNREACHABLE) {
            v.push("dual graph is disconnected".to_string());
        }
        match self.kind {
            CodeKind::Surface => self.validate_surface(&mut v),
            CodeKind::Color666 => self.validate_color(&mut v),
        }
        v
    }

    fn validate_surface(&self, v: &mut Vec<String>) {
        let d = self.distance;
        if self.stabilizers.len() != d * (d - 1) {
            v.push(format!("expected {} plaquettes", d * (d - 1)));
        }
        if self.x_generators.len() != d * (d - 1) {
            v.push(format!("expected {} stars", d * (d - 1)));
        }
        for (q, dq) in self.data.iter().enumerate() {
            match dq.checks.as_slice() {
                [(_, a), (_, b)] if a + b != 0 => {
                    v.push(format!("qudit {q} has equal signs in both plaquettes"))
                }
                [_, _] | [_] => {}
                _ => v.push(format!("qudit {q} touches {} plaquettes", dq.checks.len())),
            }
            if dq.checks.len() + dq.boundaries.len() > 2 {
                v.push(format!("qudit {q} has too many endpoints"));
            }
        }
        if self.logical.len() != d {
            v.push(format!("logical operator has weight {}", self.logical.len()));
        }
    }

    fn validate_color(&self, v: &mut Vec<String>) {
        let ns = self.stabilizers.len();
        for (s, stab) in self.stabilizers.iter().enumerate() {
            let w = stab.support.len();
            let touches_boundary = self.dual_adj[s].iter().any(|&n| n >= ns);
            if (touches_boundary && w >= 6) || (!touches_boundary && w != 6) || w % 2 == 1 {
                v.push(format!("face {s} has weight {w}"));
            }
        }
        for (q, dq) in self.data.iter().enumerate() {
            let mut colors: Vec<Color> = dq
                .checks
                .iter()
                .filter_map(|&(s, _)| self.stabilizers[s].color)
                .chain(dq.boundaries.iter().filter_map(|&b| self.boundaries[b].color()))
                .collect();
            colors.sort();
            colors.dedup();
            if colors.len() != 3 || dq.checks.len() + dq.boundaries.len() != 3 {
                v.push(format!("qudit {q} does not touch three distinct colors"));
            }
        }
        for a in 0..ns {
            for &b in &self.dual_adj[a] {
                if b < ns && self.stabilizers[a].color == self.stabilizers[b].color {
                    v.push(format!("adjacent faces {a} and {b} share a color"));
                }
            }
            for b in a + 1..ns {
                let overlap = self.stabilizers[a]
                    .support
                    .iter()
                    .filter(|&&(q, _)| self.stabilizers[b].support.iter().any(|&(r, _)| r == q))
                    .count();
                if overlap != 0 && overlap != 2 {
                    v.push(format!("faces {a} and {b} share {overlap} qudits"));
                }
            }
        }
        if self.boundaries.len() != 3 {
            v.push(format!("expected 3 boundaries, found {}", self.boundaries.len()));
        }
        if self.logical.len() != self.distance {
            v.push(format!("logical operator has weight {}", self.logical.len()));
        }
        for lattice in &self.shrunk {
            for s in 0..ns {
                if self.stabilizers[s].color == Some(lattice.color)
                    && lattice.dist_to_boundary(s) == UNREACHABLE
                {
                    v.push(format!(
                        "face {s} cannot reach the {:?} boundary by same-color moves",
                        lattice.color
                    ));
                }
            }
        }
    }
}

pub fn build_surface_code(distance: usize) -> Result<CodeGraph> {
    CodeGraph::surface(distance)
}

pub fn build_color_code_666(distance: usize) -> Result<CodeGraph> {
    CodeGraph::color_666(distance)
}

/// BFS from every node. `terminal` nodes may end a path but are never
/// expanded unless they are the source.
fn all_pairs(adj: &[Vec<usize>], terminal: impl Fn(usize) -> bool) -> Vec<u16> {
    let n = adj.len();
    let mut out = vec![UNREACHABLE; n * n];
    for s in 0..n {
        let row = bfs_multi(adj, &[s], &terminal);
        out[s * n..(s + 1) * n].copy_from_slice(&row);
    }
    out
}

fn bfs_multi(adj: &[Vec<usize>], sources: &[usize], terminal: impl Fn(usize) -> bool) -> Vec<u16> {
    let mut dist = vec![UNREACHABLE; adj.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        if dist[u] > 0 && terminal(u) {
            continue;
        }
        for &w in &adj[u] {
            if dist[w] == UNREACHABLE {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_distances() {
        for d in [0, 1, 2, 4, 10] {
            assert!(matches!(CodeGraph::surface(d), Err(Error::InvalidDistance(_))));
            assert!(matches!(CodeGraph::color_666(d), Err(Error::InvalidDistance(_))));
        }
    }

    #[test]
    fn surface_d3_counts() {
        let code = CodeGraph::surface(3).unwrap();
        assert_eq!(code.num_data(), 13);
        assert_eq!(code.num_stabilizers(), 6);
        assert_eq!(code.x_generators().len(), 6);
        assert!(code.validate().is_empty(), "{:?}", code.validate());
    }

    #[test]
    fn surface_d9_bulk_plaquettes_weight_four() {
        let code = CodeGraph::surface(9).unwrap();
        let mut weights: Vec<usize> = code.stabilizers().iter().map(|s| s.support.len()).collect();
        weights.sort();
        assert_eq!(*weights.last().unwrap(), 4);
        // 8 rows, two weight-3 plaquettes per row on the smooth sides
        assert_eq!(weights.iter().filter(|&&w| w == 3).count(), 16);
    }

    #[test]
    fn steane_layout_at_distance_three() {
        let code = CodeGraph::color_666(3).unwrap();
        assert_eq!(code.num_data(), 7);
        assert_eq!(code.num_stabilizers(), 3);
        assert!(code.stabilizers().iter().all(|s| s.support.len() == 4));
        let colors: BTreeSet<_> = code.stabilizers().iter().map(|s| s.color).collect();
        assert_eq!(colors.len(), 3);
        assert!(code.validate().is_empty(), "{:?}", code.validate());
    }

    #[test]
    fn color_boundaries_one_per_side() {
        let code = CodeGraph::color_666(11).unwrap();
        let colors: Vec<_> = code.boundaries().iter().map(|b| b.color().unwrap()).collect();
        assert_eq!(colors, vec![Color::Red, Color::Green, Color::Blue]);
        for b in 0..3 {
            let node = code.boundary_node(b);
            let bc = code.node_color(node).unwrap();
            for &n in code.dual_neighbors(node) {
                assert_ne!(code.node_color(n), Some(bc));
            }
        }
    }

    #[test]
    fn internal_qudits_touch_three_colors() {
        let code = CodeGraph::color_666(9).unwrap();
        for dq in code.data() {
            if dq.checks.len() == 3 {
                let colors: BTreeSet<_> =
                    dq.checks.iter().map(|&(s, _)| code.stabilizers()[s].color).collect();
                assert_eq!(colors.len(), 3);
            }
        }
    }

    #[test]
    fn perturbed_sign_is_reported() {
        let mut code = CodeGraph::color_666(7).unwrap();
        let s = (0..code.num_stabilizers())
            .find(|&s| code.stabilizers()[s].support.len() == 6)
            .unwrap();
        let q = code.stabilizers()[s].support[0].0;
        code.flip_sign(s, q);
        let report = code.validate();
        assert!(report.iter().any(|m| m.contains("does not commute")), "{report:?}");
        let d3 = QuditDim::new(3).unwrap();
        assert!(!code.commutativity_violations(d3).is_empty());
    }

    #[test]
    fn dual_distance_basics() {
        let code = CodeGraph::color_666(11).unwrap();
        assert_eq!(code.dual_distance(4, 4).unwrap(), 0);
        let n = code.dual_neighbors(4)[0];
        assert_eq!(code.dual_distance(4, n).unwrap(), 1);
        assert!(code.dual_distance(0, code.num_nodes()).is_err());
    }

    #[test]
    fn dual_path_is_shortest() {
        let code = CodeGraph::surface(7).unwrap();
        let path = code.dual_path(0, code.num_stabilizers() - 1).unwrap();
        assert_eq!(path.len() - 1, code.dual_distance(0, code.num_stabilizers() - 1).unwrap());
        for w in path.windows(2) {
            assert!(code.link_qudit(w[0], w[1]).is_some());
        }
    }
}
