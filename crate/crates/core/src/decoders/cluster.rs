use crate::codegraph::CodeGraph;

/// Flagged stabilizers linked by dual hops of at most `scale`, together with
/// the boundary nodes within `scale` of some member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub members: Vec<usize>,
    pub boundaries: Vec<usize>,
    pub scale: usize,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Maximal clusters of `flagged` at `scale`, ordered by smallest member.
/// Members are sorted; a boundary may belong to several clusters.
pub fn clusters_at_scale(code: &CodeGraph, flagged: &[usize], scale: usize) -> Vec<Cluster> {
    let n = flagged.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if (code.dist(flagged[i], flagged[j]) as usize) <= scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut sorted: Vec<usize> = flagged.to_vec();
    sorted.sort_unstable();
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, g)) => g.push(flagged[i]),
            None => groups.push((root, vec![flagged[i]])),
        }
    }
    let mut out: Vec<Cluster> = groups
        .into_iter()
        .map(|(_, mut members)| {
            members.sort_unstable();
            let boundaries = (0..code.boundaries().len())
                .map(|b| code.boundary_node(b))
                .filter(|&b| members.iter().any(|&m| (code.dist(m, b) as usize) <= scale))
                .collect();
            Cluster { members, boundaries, scale }
        })
        .collect();
    out.sort_by_key(|c| c.members[0]);
    out
}
