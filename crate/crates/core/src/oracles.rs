//! Brute-force reference implementations.
//!
//! These deliberately avoid the primary code paths they are used to check:
//! the circle-intersection oracle uses the textbook `acos` construction
//! instead of the inverse-secant closed form, and the rigidity oracle
//! decides edge independence by exhaustively enumerating vertex subsets
//! instead of playing the pebble game. They back the test suites and are
//! exposed through the CLI's `oracle` subcommand.

use std::f64::consts::PI;

/// Circle-circle intersection area via the standard two-`acos` construction.
///
/// Handles the degenerate regimes by case analysis, like any careful
/// textbook implementation.
pub fn circle_intersection_area_ref(r1: f64, r2: f64, d: f64) -> f64 {
    if d >= r1 + r2 {
        return 0.0;
    }
    if d <= (r1 - r2).abs() {
        let r = r1.min(r2);
        return PI * r * r;
    }
    let c1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0);
    let c2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0);
    let root = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    r1 * r1 * c1.acos() + r2 * r2 * c2.acos() - 0.5 * root.max(0.0).sqrt()
}

/// Rank-style brute-force planar rigidity check on `n` vertices.
///
/// Grows a maximal independent edge set greedily; a candidate set is
/// independent iff no vertex subset `S` (enumerated exhaustively, `n <= 20`)
/// induces more than `2|S| - 3` of its edges. Greedy growth is exact here
/// because independent edge sets form a matroid. The graph is rigid iff the
/// maximal independent set has exactly `2n - 3` edges.
pub fn laman_rigid_bruteforce(n: usize, edges: &[(usize, usize)]) -> bool {
    assert!(n >= 2 && n <= 20, "oracle supports 2..=20 vertices, got {n}");
    let target = 2 * n - 3;
    if edges.len() < target {
        return false;
    }
    let mut independent: Vec<(usize, usize, u32)> = Vec::with_capacity(target);
    for &(a, b) in edges {
        assert!(a < n && b < n && a != b, "bad edge ({a}, {b})");
        let mask = (1u32 << a) | (1u32 << b);
        if subset_counts_ok(n, &independent, (a, b, mask)) {
            independent.push((a, b, mask));
            if independent.len() == target {
                return true;
            }
        }
    }
    false
}

/// Checks Laman's counting condition for `independent + candidate` on every
/// vertex subset containing both endpoints of the candidate edge. Subsets
/// missing an endpoint cannot be violated: they were fine before the edge
/// was added.
fn subset_counts_ok(n: usize, independent: &[(usize, usize, u32)], candidate: (usize, usize, u32)) -> bool {
    let full: u32 = (1u32 << n) - 1;
    let needed = candidate.2;
    let rest = full & !needed;
    let mut extra: u32 = 0;
    loop {
        let subset = extra | needed;
        let verts = subset.count_ones() as usize;
        let mut count = 1usize; // the candidate edge itself
        for &(_, _, m) in independent {
            if m & subset == m {
                count += 1;
            }
        }
        if count > 2 * verts - 3 {
            return false;
        }
        if extra == rest {
            break;
        }
        extra = extra.wrapping_sub(rest) & rest;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn intersection_oracle_regimes() {
        assert_eq!(circle_intersection_area_ref(1.0, 1.0, 3.0), 0.0);
        assert_relative_eq!(circle_intersection_area_ref(1.0, 2.0, 0.5), PI, max_relative = 1e-14);
        assert_relative_eq!(
            circle_intersection_area_ref(1.0, 1.0, 1.0),
            2.0 * (0.5f64).acos() - 0.5 * 3.0f64.sqrt(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn laman_small_graphs() {
        // Triangle: rigid.
        assert!(laman_rigid_bruteforce(3, &[(0, 1), (1, 2), (0, 2)]));
        // Path: flexible.
        assert!(!laman_rigid_bruteforce(3, &[(0, 1), (1, 2)]));
        // Square without a diagonal: flexible; with one: rigid.
        let square = [(0, 1), (1, 2), (2, 3), (3, 0)];
        assert!(!laman_rigid_bruteforce(4, &square));
        let mut braced = square.to_vec();
        braced.push((0, 2));
        assert!(laman_rigid_bruteforce(4, &braced));
        // K4: rigid (one edge redundant).
        braced.push((1, 3));
        assert!(laman_rigid_bruteforce(4, &braced));
        // Two triangles sharing one vertex: flexible (hinge).
        assert!(!laman_rigid_bruteforce(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]));
    }

    #[test]
    fn subset_enumeration_catches_overbraced_subgraph() {
        // K4 plus a pendant path has a K4 subgraph with 6 > 2*4-3 edges; the
        // doubled edge set is still rigid overall but the independent count
        // must max out at 2n-3.
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (2, 4)];
        assert!(laman_rigid_bruteforce(5, &edges));
    }
}
