//! Graph-theoretic unique-localizability predicates on grounded graphs.
//!
//! A grounded graph pins all anchor (base station) vertices to each other
//! with structural edges; device vertices are free. Unique network
//! localizability with error-free range observations is the conjunction of
//! three conditions: generic rigidity, minimum degree three, and redundant
//! rigidity. Rigidity is decided with the (2,3) pebble game; the exhaustive
//! counting oracle lives in [`crate::oracles`].

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::Error;
use crate::Result;

/// Grounded network graph: `anchor_count` mutually pinned anchors followed
/// by `free_count` device vertices. Vertices `0..anchor_count` are anchors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundedGraph {
    anchor_count: usize,
    free_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl GroundedGraph {
    /// Creates the graph with the full anchor clique and no device edges.
    pub fn new(anchor_count: usize, free_count: usize) -> Self {
        let mut edges = BTreeSet::new();
        for a in 0..anchor_count {
            for b in (a + 1)..anchor_count {
                edges.insert((a, b));
            }
        }
        GroundedGraph { anchor_count, free_count, edges }
    }

    /// Builds the grounded graph of a two-device collaboration scenario:
    /// device `u` hears `n_u` anchors, device `v` hears `n_v`, `shared` of
    /// them in common, plus an optional device-device link. Only anchors
    /// heard by at least one device are included.
    pub fn two_device(n_u: usize, n_v: usize, shared: usize, collab_link: bool) -> Result<Self> {
        if shared > n_u.min(n_v) {
            return Err(Error::domain(format!(
                "shared anchors {shared} exceed min(n_u, n_v) = {}",
                n_u.min(n_v)
            )));
        }
        let anchors = n_u + n_v - shared;
        let mut g = GroundedGraph::new(anchors, 2);
        let u = anchors;
        let v = anchors + 1;
        for a in 0..n_u {
            g.add_edge(u, a)?;
        }
        // v hears the last `shared` of u's anchors plus fresh ones.
        for a in (n_u - shared)..(n_u - shared + n_v) {
            g.add_edge(v, a)?;
        }
        if collab_link {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn anchor_count(&self) -> usize {
        self.anchor_count
    }

    pub fn free_count(&self) -> usize {
        self.free_count
    }

    pub fn vertex_count(&self) -> usize {
        self.anchor_count + self.free_count
    }

    pub fn is_anchor(&self, v: usize) -> bool {
        v < self.anchor_count
    }

    /// Adds an undirected edge. Anchor-anchor pairs are already present;
    /// re-adding any edge is a no-op.
    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(Error::domain(format!("self-loop at vertex {a}")));
        }
        let n = self.vertex_count();
        if a >= n || b >= n {
            return Err(Error::domain(format!("edge ({a}, {b}) out of range for {n} vertices")));
        }
        self.edges.insert((a.min(b), a.max(b)));
        Ok(())
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges that represent measurements (device-anchor or device-device),
    /// i.e. everything except the structural anchor clique.
    pub fn measurement_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied().filter(|&(a, b)| !(self.is_anchor(a) && self.is_anchor(b)))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    fn without_edge(&self, e: (usize, usize)) -> GroundedGraph {
        let mut g = self.clone();
        g.edges.remove(&e);
        g
    }

    /// Plain text edge list: header `B C`, one `i j` measurement edge per
    /// line. The anchor clique is implicit and restored on import.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.anchor_count, self.free_count);
        for (a, b) in self.measurement_edges() {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let mut parts = header.split_whitespace();
        let b: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header line {header:?}")))?;
        let c: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header line {header:?}")))?;
        if parts.next().is_some() {
            return Err(Error::Parse(format!("trailing tokens in header {header:?}")));
        }
        let mut g = GroundedGraph::new(b, c);
        for line in lines {
            let mut parts = line.split_whitespace();
            let (i, j) = match (parts.next(), parts.next(), parts.next()) {
                (Some(i), Some(j), None) => (i, j),
                _ => return Err(Error::Parse(format!("bad edge line {line:?}"))),
            };
            let i: usize = i.parse().map_err(|_| Error::Parse(format!("bad vertex {i:?}")))?;
            let j: usize = j.parse().map_err(|_| Error::Parse(format!("bad vertex {j:?}")))?;
            g.add_edge(i, j)?;
        }
        Ok(g)
    }
}

/// Size of a maximal independent edge set in the (2,3) sparsity matroid,
/// computed with the pebble game. A graph on `n >= 2` vertices is generically
/// rigid in the plane iff this equals `2n - 3`.
fn independent_edge_count(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> usize {
    let mut pebbles = vec![2u8; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut independent = 0;
    for (u, v) in edges {
        loop {
            if pebbles[u] + pebbles[v] >= 4 {
                break;
            }
            let pulled = (pebbles[u] < 2 && pull_pebble(u, v, &mut pebbles, &mut out))
                || (pebbles[v] < 2 && pull_pebble(v, u, &mut pebbles, &mut out));
            if !pulled {
                break;
            }
        }
        if pebbles[u] + pebbles[v] >= 4 {
            pebbles[u] -= 1;
            out[u].push(v);
            independent += 1;
        }
    }
    independent
}

/// Searches the directed accepted-edge graph from `root` for a free pebble,
/// never entering `other`, and reverses the path it travelled.
fn pull_pebble(root: usize, other: usize, pebbles: &mut [u8], out: &mut [Vec<usize>]) -> bool {
    let n = pebbles.len();
    let mut visited = vec![false; n];
    visited[root] = true;
    visited[other] = true;
    let mut parent = vec![usize::MAX; n];
    let mut stack = vec![root];
    while let Some(x) = stack.pop() {
        for idx in 0..out[x].len() {
            let y = out[x][idx];
            if visited[y] {
                continue;
            }
            visited[y] = true;
            parent[y] = x;
            if pebbles[y] > 0 {
                pebbles[y] -= 1;
                pebbles[root] += 1;
                let mut cur = y;
                while cur != root {
                    let p = parent[cur];
                    let pos = out[p].iter().position(|&t| t == cur).expect("edge present");
                    out[p].swap_remove(pos);
                    out[cur].push(p);
                    cur = p;
                }
                return true;
            }
            stack.push(y);
        }
    }
    false
}

/// Generic planar rigidity of the grounded graph (pebble game).
pub fn is_rigid(g: &GroundedGraph) -> bool {
    let n = g.vertex_count();
    assert!(n >= 2, "rigidity needs at least two vertices, got {n}");
    independent_edge_count(n, g.edges()) == 2 * n - 3
}

/// Minimum-degree-three condition: every vertex is the endpoint of at least
/// three edges. This is the condition exactly as stated for the grounded
/// graph; see [`is_three_connected`] for the stronger vertex-connectivity
/// variant.
pub fn is_triconnected_degree(g: &GroundedGraph) -> bool {
    (0..g.vertex_count()).all(|v| g.degree(v) >= 3)
}

/// Redundant rigidity: removing any single measurement edge leaves the graph
/// rigid. Anchor-anchor edges encode anchor immovability rather than
/// measurements, so they are exempt from the removal loop.
pub fn is_redundantly_rigid(g: &GroundedGraph) -> bool {
    let removable: Vec<_> = g.measurement_edges().collect();
    removable.into_iter().all(|e| is_rigid(&g.without_edge(e)))
}

/// Unique network localizability: rigidity, minimum degree three and
/// redundant rigidity together. Requires at least three anchors.
pub fn network_localizable(g: &GroundedGraph) -> Result<bool> {
    if g.anchor_count() < 3 {
        return Err(Error::domain(format!(
            "network localizability needs at least 3 anchors, got {}",
            g.anchor_count()
        )));
    }
    Ok(is_rigid(g) && is_triconnected_degree(g) && is_redundantly_rigid(g))
}

/// Device-level unique localizability for the two-device setup with the
/// given minimum anchor support `ell` (`ell + 1` anchors suffice alone;
/// with a collaborator, `ell` own anchors, `ell` collaborator anchors and
/// `ell + 1` unique anchors combined suffice).
pub fn device_localizable(ell: u32, n_u: usize, n_v: usize, unique_combined: usize, has_collab_link: bool) -> bool {
    debug_assert!(unique_combined <= n_u + n_v);
    let ell = ell as usize;
    n_u >= ell + 1 || (has_collab_link && n_u == ell && n_v >= ell && unique_combined >= ell + 1)
}

/// Unique localizability of a device using range observations (plain
/// trilateration thresholds: three anchors alone, or two plus a qualified
/// collaborator).
pub fn device_localizable_ranging(n_u: usize, n_v: usize, unique_combined: usize, has_collab_link: bool) -> bool {
    device_localizable(2, n_u, n_v, unique_combined, has_collab_link)
}

/// Unique localizability of a device using range-difference observations
/// (four anchors alone, or three plus a qualified collaborator).
pub fn device_localizable_rangediff(n_u: usize, n_v: usize, unique_combined: usize, has_collab_link: bool) -> bool {
    device_localizable(3, n_u, n_v, unique_combined, has_collab_link)
}

/// 3-vertex-connectivity: at least four vertices and no pair of vertices
/// whose removal disconnects the rest. Quadratic-pair enumeration; intended
/// for diagnostics on the small graphs this module handles.
pub fn is_three_connected(g: &GroundedGraph) -> bool {
    let n = g.vertex_count();
    if n < 4 {
        return false;
    }
    if !connected_without(g, &[]) {
        return false;
    }
    for a in 0..n {
        if !connected_without(g, &[a]) {
            return false;
        }
        for b in (a + 1)..n {
            if !connected_without(g, &[a, b]) {
                return false;
            }
        }
    }
    true
}

/// Flags graphs where the degree-three condition holds but full 3-vertex
/// connectivity fails; useful when auditing which condition a borderline
/// graph actually satisfied.
pub fn degree_three_without_three_connectivity(g: &GroundedGraph) -> bool {
    is_triconnected_degree(g) && !is_three_connected(g)
}

fn connected_without(g: &GroundedGraph, removed: &[usize]) -> bool {
    let n = g.vertex_count();
    let keep: Vec<usize> = (0..n).filter(|v| !removed.contains(v)).collect();
    if keep.len() <= 1 {
        return true;
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, b) in g.edges() {
        if !removed.contains(&a) && !removed.contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut seen = vec![false; n];
    let mut stack = vec![keep[0]];
    seen[keep[0]] = true;
    let mut visited = 1;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                visited += 1;
                stack.push(y);
            }
        }
    }
    visited == keep.len()
}
