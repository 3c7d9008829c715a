//! Minimum-weight perfect matching on general graphs.
//!
//! The solver is an Edmonds blossom / primal-dual implementation (see
//! [`blossom`]); minimum weight is obtained by maximising the reflected
//! weights (max weight minus w) under the maximum-cardinality constraint.
//! Running time is O(|V|^3); exact for integer-valued weights.

pub mod blossom;

use crate::graph::Graph;
use thiserror::Error;

pub use blossom::UNMATCHED;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingError {
    #[error("graph has no perfect matching")]
    NoPerfectMatching,
    #[error("graph too large for brute force ({0} vertices, limit {1})")]
    TooLarge(usize, usize),
}

/// A set of pairwise vertex-disjoint edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// Matched pairs with u < v, sorted.
    pub pairs: Vec<(usize, usize)>,
    /// Sum of matched-edge weights.
    pub total_weight: f64,
}

impl Matching {
    fn from_pairs(g: &Graph, mut pairs: Vec<(usize, usize)>) -> Matching {
        for p in pairs.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort_unstable();
        let total_weight = pairs
            .iter()
            .map(|&(u, v)| g.edge_weight(u, v).expect("pair must be an edge"))
            .sum();
        Matching {
            pairs,
            total_weight,
        }
    }
}

/// Minimum-weight perfect matching.
///
/// Errors with [`MatchingError::NoPerfectMatching`] when the vertex count is
/// odd or the graph is structurally infeasible.
pub fn min_weight_perfect_matching(g: &Graph) -> Result<Matching, MatchingError> {
    let n = g.vertex_count();
    if n % 2 != 0 {
        return Err(MatchingError::NoPerfectMatching);
    }
    if n == 0 {
        return Ok(Matching {
            pairs: vec![],
            total_weight: 0.0,
        });
    }
    // Min-weight = max-weight on reflected weights K - w. A perfect matching
    // always has n/2 edges, so the constant shift preserves the argmin, and
    // unlike plain negation it makes the cheapest edges tight under the
    // solver's initial duals (max weight), which lets the warm start bite.
    let k = g
        .edges()
        .iter()
        .map(|e| e.2)
        .fold(f64::NEG_INFINITY, f64::max);
    let reflected: Vec<(usize, usize, f64)> =
        g.edges().iter().map(|&(u, v, w)| (u, v, k - w)).collect();
    let mate = blossom::maximum_weight_matching(n, &reflected, true);
    if mate.iter().any(|&m| m == UNMATCHED) {
        return Err(MatchingError::NoPerfectMatching);
    }
    let pairs = (0..n).filter(|&v| v < mate[v]).map(|v| (v, mate[v])).collect();
    Ok(Matching::from_pairs(g, pairs))
}

const BRUTE_FORCE_LIMIT: usize = 16;

/// Exhaustive minimum-weight perfect matching; the test oracle for the
/// blossom solver. Independent of the blossom code path.
pub fn brute_force_perfect_matching(g: &Graph) -> Result<Matching, MatchingError> {
    let n = g.vertex_count();
    if n > BRUTE_FORCE_LIMIT {
        return Err(MatchingError::TooLarge(n, BRUTE_FORCE_LIMIT));
    }
    if n % 2 != 0 {
        return Err(MatchingError::NoPerfectMatching);
    }
    let mut used = vec![false; n];
    let mut current = Vec::with_capacity(n / 2);
    let mut best: Option<(f64, Vec<(usize, usize)>)> = None;
    fn recurse(
        g: &Graph,
        used: &mut [bool],
        current: &mut Vec<(usize, usize)>,
        acc: f64,
        best: &mut Option<(f64, Vec<(usize, usize)>)>,
    ) {
        let u = match used.iter().position(|&x| !x) {
            Some(u) => u,
            None => {
                if best.as_ref().map_or(true, |(bw, _)| acc < *bw) {
                    *best = Some((acc, current.clone()));
                }
                return;
            }
        };
        used[u] = true;
        let partners: Vec<(usize, usize)> = g.neighbors(u).collect();
        for (v, k) in partners {
            if !used[v] {
                used[v] = true;
                current.push((u, v));
                recurse(g, used, current, acc + g.edges()[k].2, best);
                current.pop();
                used[v] = false;
            }
        }
        used[u] = false;
    }
    recurse(g, &mut used, &mut current, 0.0, &mut best);
    match best {
        Some((_, pairs)) => Ok(Matching::from_pairs(g, pairs)),
        None => Err(MatchingError::NoPerfectMatching),
    }
}

/// True iff `m`'s pairs are vertex-disjoint edges of `g` covering every
/// vertex exactly once.
pub fn is_perfect_matching(g: &Graph, m: &Matching) -> bool {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    for &(u, v) in &m.pairs {
        if u >= n || v >= n || seen[u] || seen[v] || !g.has_edge(u, v) {
            return false;
        }
        seen[u] = true;
        seen[v] = true;
    }
    seen.iter().all(|&s| s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> Graph {
        let mut g = Graph::new(n);
        for &(u, v, w) in edges {
            g.add_edge(u, v, w).unwrap();
        }
        g
    }

    #[test]
    fn single_edge() {
        let g = graph(2, &[(0, 1, 5.0)]);
        let m = min_weight_perfect_matching(&g).unwrap();
        assert_eq!(m.pairs, vec![(0, 1)]);
        assert_eq!(m.total_weight, 5.0);
    }

    #[test]
    fn c4_prefers_light_pairing() {
        // Both perfect matchings of this C4 weigh 2 and 4.
        let g = graph(4, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 0, 2.0)]);
        let m = min_weight_perfect_matching(&g).unwrap();
        assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
        assert_eq!(m.total_weight, 2.0);
        let bf = brute_force_perfect_matching(&g).unwrap();
        assert_eq!(bf.total_weight, 2.0);
    }

    #[test]
    fn k4_minimum_over_three_matchings() {
        // K4 perfect matchings weigh 3, 7, 7.
        let g = graph(
            4,
            &[
                (0, 1, 1.0),
                (0, 2, 2.0),
                (0, 3, 3.0),
                (1, 2, 4.0),
                (1, 3, 5.0),
                (2, 3, 2.0),
            ],
        );
        let m = min_weight_perfect_matching(&g).unwrap();
        assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
        assert_eq!(m.total_weight, 3.0);
        assert_eq!(brute_force_perfect_matching(&g).unwrap().total_weight, 3.0);
    }

    #[test]
    fn odd_vertex_count_has_no_perfect_matching() {
        let g = graph(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]);
        assert_eq!(
            min_weight_perfect_matching(&g),
            Err(MatchingError::NoPerfectMatching)
        );
        assert_eq!(
            brute_force_perfect_matching(&g),
            Err(MatchingError::NoPerfectMatching)
        );
    }

    #[test]
    fn star_has_no_perfect_matching() {
        let g = graph(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]);
        assert_eq!(
            brute_force_perfect_matching(&g),
            Err(MatchingError::NoPerfectMatching)
        );
        assert_eq!(
            min_weight_perfect_matching(&g),
            Err(MatchingError::NoPerfectMatching)
        );
    }

    #[test]
    fn petersen_unit_weights() {
        let outer = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
        let spokes = [(0, 5), (1, 6), (2, 7), (3, 8), (4, 9)];
        let inner = [(5, 7), (7, 9), (9, 6), (6, 8), (8, 5)];
        let mut g = Graph::new(10);
        for &(u, v) in outer.iter().chain(&spokes).chain(&inner) {
            g.add_edge(u, v, 1.0).unwrap();
        }
        let bf = brute_force_perfect_matching(&g).unwrap();
        assert_eq!(bf.total_weight, 5.0);
        let m = min_weight_perfect_matching(&g).unwrap();
        assert_eq!(m.total_weight, 5.0);
        assert!(is_perfect_matching(&g, &m));
    }

    #[test]
    fn is_perfect_matching_cases() {
        let g = graph(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]);
        let ok = Matching {
            pairs: vec![(0, 1), (2, 3)],
            total_weight: 2.0,
        };
        assert!(is_perfect_matching(&g, &ok));
        let uncovered = Matching {
            pairs: vec![(0, 1)],
            total_weight: 1.0,
        };
        assert!(!is_perfect_matching(&g, &uncovered));
        let repeated = Matching {
            pairs: vec![(0, 1), (1, 2)],
            total_weight: 2.0,
        };
        assert!(!is_perfect_matching(&g, &repeated));
    }

    #[test]
    fn brute_force_too_large() {
        let g = Graph::new(18);
        assert_eq!(
            brute_force_perfect_matching(&g),
            Err(MatchingError::TooLarge(18, 16))
        );
    }
}
