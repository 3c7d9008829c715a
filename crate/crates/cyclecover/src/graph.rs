//! Undirected simple weighted graphs: construction, pruning, rank
//! quantization, Laplacians and edge-list I/O.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("negative weight {weight} on edge ({u}, {v})")]
    NegativeWeight { u: usize, v: usize, weight: f64 },
    #[error("vertex {0} out of range (vertex count {1})")]
    BadVertex(usize, usize),
    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

/// An undirected simple graph with nonnegative f64 edge weights.
///
/// Vertices are dense ids `0..vertex_count`. At most one edge per unordered
/// pair, no self-loops. Immutable once built (mutation is add-only).
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize, f64)>,
    /// adjacency: vertex -> (neighbour, edge index)
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    /// A graph with `n` vertices and no edges.
    pub fn new(n: usize) -> Self {
        Graph {
            vertex_count: n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as (u, v, weight) with u < v.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Neighbours of `v` together with the index of the connecting edge.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.vertex_count && self.adj[u].iter().any(|&(w, _)| w == v)
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        self.adj
            .get(u)?
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, k)| self.edges[k].2)
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: f64) -> Result<(), GraphError> {
        if u >= self.vertex_count {
            return Err(GraphError::BadVertex(u, self.vertex_count));
        }
        if v >= self.vertex_count {
            return Err(GraphError::BadVertex(v, self.vertex_count));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.has_edge(u, v) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        if !(w >= 0.0) {
            return Err(GraphError::NegativeWeight { u, v, weight: w });
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let k = self.edges.len();
        self.edges.push((a, b, w));
        self.adj[a].push((b, k));
        self.adj[b].push((a, k));
        Ok(())
    }

    /// Same structure with every weight replaced by `f(w)`. `f` must be
    /// nonnegative-valued.
    pub fn map_weights(&self, f: impl Fn(f64) -> f64) -> Graph {
        let mut g = Graph::new(self.vertex_count);
        for &(u, v, w) in &self.edges {
            g.add_edge(u, v, f(w)).expect("structure already validated");
        }
        g
    }

    /// Dense Laplacian L = D - A.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let n = self.vertex_count;
        let mut l = DMatrix::zeros(n, n);
        for &(u, v, w) in &self.edges {
            l[(u, v)] -= w;
            l[(v, u)] -= w;
            l[(u, u)] += w;
            l[(v, v)] += w;
        }
        l
    }
}

/// A graph whose weights are positive integers, as produced by rank
/// quantization. Structure mirrors the source graph edge for edge.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegerGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize, u64)>,
}

impl IntegerGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize, u64)] {
        &self.edges
    }

    /// View the integer weights as f64 for the matching stage.
    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::new(self.vertex_count);
        for &(u, v, w) in &self.edges {
            g.add_edge(u, v, w as f64).expect("valid by construction");
        }
        g
    }
}

/// How raw weights are turned into integers before matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuantizeMode {
    /// Equal weights share a rank (ties are not ordered arbitrarily).
    #[default]
    Dense,
    /// Every edge gets a distinct rank; ties broken by edge insertion order.
    Ordinal,
    /// Raw weights are used as-is.
    None,
}

/// Replace each weight by its 1-based rank among the sorted distinct raw
/// weights. Order-preserving: w_i < w_j iff rank_i < rank_j.
pub fn rank_quantize_weights(g: &Graph) -> IntegerGraph {
    rank_quantize(g, QuantizeMode::Dense)
}

pub fn rank_quantize(g: &Graph, mode: QuantizeMode) -> IntegerGraph {
    let edges = match mode {
        QuantizeMode::Dense => {
            let mut distinct: Vec<f64> = g.edges().iter().map(|e| e.2).collect();
            distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
            distinct.dedup();
            g.edges()
                .iter()
                .map(|&(u, v, w)| {
                    let rank = distinct.partition_point(|&d| d < w) as u64 + 1;
                    (u, v, rank)
                })
                .collect()
        }
        QuantizeMode::Ordinal => {
            let mut order: Vec<usize> = (0..g.edge_count()).collect();
            order.sort_by(|&a, &b| {
                g.edges()[a]
                    .2
                    .partial_cmp(&g.edges()[b].2)
                    .unwrap()
                    .then(a.cmp(&b))
            });
            let mut ranks = vec![0u64; g.edge_count()];
            for (pos, &k) in order.iter().enumerate() {
                ranks[k] = pos as u64 + 1;
            }
            g.edges()
                .iter()
                .enumerate()
                .map(|(k, &(u, v, _))| (u, v, ranks[k]))
                .collect()
        }
        QuantizeMode::None => g
            .edges()
            .iter()
            .map(|&(u, v, w)| (u, v, w.round() as u64))
            .collect(),
    };
    IntegerGraph {
        vertex_count: g.vertex_count(),
        edges,
    }
}

/// Result of recursively deleting degree-one vertices.
#[derive(Debug, Clone)]
pub struct Pruned {
    /// The graph on the surviving vertices, re-indexed densely.
    pub graph: Graph,
    /// Original ids of the deleted vertices, ascending.
    pub removed: Vec<usize>,
    /// original_of[new_id] = original id of the surviving vertex.
    pub original_of: Vec<usize>,
}

impl Pruned {
    /// new_of[original] = Some(new id) for survivors.
    pub fn new_id(&self, original: usize) -> Option<usize> {
        self.original_of.binary_search(&original).ok()
    }
}

/// Recursively remove degree-one vertices until none remain. Removing a
/// pendant vertex may create new pendants, so removal repeats to a fixed
/// point. A vertex that loses its last neighbor in the cascade goes too
/// (so pruning a path removes every vertex); vertices isolated from the
/// start are kept.
pub fn prune_degree_one(g: &Graph) -> Pruned {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] || deg[v] != 1 {
            continue;
        }
        alive[v] = false;
        for (u, _) in g.neighbors(v) {
            if alive[u] {
                deg[u] -= 1;
                if deg[u] == 1 {
                    stack.push(u);
                } else if deg[u] == 0 {
                    alive[u] = false;
                }
            }
        }
    }
    let original_of: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let removed: Vec<usize> = (0..n).filter(|&v| !alive[v]).collect();
    let new_id: BTreeMap<usize, usize> = original_of
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();
    let mut graph = Graph::new(original_of.len());
    for &(u, v, w) in g.edges() {
        if alive[u] && alive[v] {
            graph
                .add_edge(new_id[&u], new_id[&v], w)
                .expect("valid by construction");
        }
    }
    Pruned {
        graph,
        removed,
        original_of,
    }
}

/// Parse the edge-list text format: first non-comment line is the vertex
/// count, each following line is "u v w". '#' starts a comment.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut graph: Option<Graph> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        match graph {
            None => {
                let n: usize = line.parse().map_err(|_| GraphError::ParseError {
                    line: line_no,
                    msg: format!("expected vertex count, got {line:?}"),
                })?;
                graph = Some(Graph::new(n));
            }
            Some(ref mut g) => {
                let mut it = line.split_whitespace();
                let mut field = |name: &str| {
                    it.next().ok_or_else(|| GraphError::ParseError {
                        line: line_no,
                        msg: format!("missing {name}"),
                    })
                };
                let u: usize = field("u")?.parse().map_err(|_| GraphError::ParseError {
                    line: line_no,
                    msg: "bad vertex id".into(),
                })?;
                let v: usize = field("v")?.parse().map_err(|_| GraphError::ParseError {
                    line: line_no,
                    msg: "bad vertex id".into(),
                })?;
                let w: f64 = field("w")?.parse().map_err(|_| GraphError::ParseError {
                    line: line_no,
                    msg: "bad weight".into(),
                })?;
                g.add_edge(u, v, w)?;
            }
        }
    }
    graph.ok_or(GraphError::ParseError {
        line: 0,
        msg: "empty input".into(),
    })
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    let text = std::fs::read_to_string(path).map_err(|e| GraphError::Io(e.to_string()))?;
    parse_edge_list(&text)
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", g.vertex_count());
    for &(u, v, w) in g.edges() {
        let _ = writeln!(out, "{u} {v} {w}");
    }
    out
}

pub fn save_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    std::fs::write(path, format_edge_list(g)).map_err(|e| GraphError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for v in 1..n {
            g.add_edge(v - 1, v, 1.0).unwrap();
        }
        g
    }

    pub(crate) fn cycle_graph(n: usize) -> Graph {
        let mut g = path_graph(n);
        g.add_edge(n - 1, 0, 1.0).unwrap();
        g
    }

    #[test]
    fn new_graph_sizes() {
        assert_eq!(Graph::new(0).vertex_count(), 0);
        let g = Graph::new(5);
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(Graph::new(1).vertex_count(), 1);
    }

    #[test]
    fn add_edge_basic_and_errors() {
        let mut g = Graph::new(2);
        g.add_edge(0, 1, 3.5).unwrap();
        assert_eq!(g.edge_weight(0, 1), Some(3.5));
        assert_eq!(g.edge_weight(1, 0), Some(3.5));

        let mut g = Graph::new(3);
        assert_eq!(g.add_edge(2, 2, 1.0), Err(GraphError::SelfLoop(2)));
        g.add_edge(0, 1, 1.0).unwrap();
        // unordered endpoints: (1, 0) duplicates (0, 1)
        assert_eq!(g.add_edge(1, 0, 2.0), Err(GraphError::DuplicateEdge(1, 0)));
        assert!(matches!(
            g.add_edge(0, 2, -1.0),
            Err(GraphError::NegativeWeight { .. })
        ));
        assert_eq!(g.add_edge(0, 3, 1.0), Err(GraphError::BadVertex(3, 3)));
    }

    #[test]
    fn degree_sum_is_twice_edge_count() {
        let g = cycle_graph(7);
        let sum: usize = (0..7).map(|v| g.degree(v)).sum();
        assert_eq!(sum, 2 * g.edge_count());
    }

    #[test]
    fn prune_empties_a_path() {
        let p = prune_degree_one(&path_graph(4));
        assert_eq!(p.graph.vertex_count(), 0);
        assert_eq!(p.removed, vec![0, 1, 2, 3]);
    }

    #[test]
    fn prune_removes_pendant_keeps_cycle() {
        let mut g = cycle_graph(4);
        let mut g5 = Graph::new(5);
        for &(u, v, w) in g.edges() {
            g5.add_edge(u, v, w).unwrap();
        }
        g5.add_edge(0, 4, 1.0).unwrap();
        g = g5;
        let p = prune_degree_one(&g);
        assert_eq!(p.removed, vec![4]);
        assert_eq!(p.graph.vertex_count(), 4);
        assert_eq!(p.graph.edge_count(), 4);
        assert_eq!(p.original_of, vec![0, 1, 2, 3]);
        assert_eq!(p.new_id(2), Some(2));
        assert_eq!(p.new_id(4), None);
    }

    #[test]
    fn prune_noop_on_triangle() {
        let p = prune_degree_one(&cycle_graph(3));
        assert!(p.removed.is_empty());
        assert_eq!(p.graph.edge_count(), 3);
    }

    #[test]
    fn prune_is_idempotent() {
        let mut g = Graph::new(8);
        for (u, v) in [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (5, 6)] {
            g.add_edge(u, v, 1.0).unwrap();
        }
        let once = prune_degree_one(&g);
        let twice = prune_degree_one(&once.graph);
        assert!(twice.removed.is_empty());
        assert_eq!(once.graph, twice.graph);
    }

    fn weights_of(g: &IntegerGraph) -> Vec<u64> {
        g.edges().iter().map(|e| e.2).collect()
    }

    #[test]
    fn rank_quantize_dense() {
        let mut g = Graph::new(5);
        g.add_edge(0, 1, 0.5).unwrap();
        g.add_edge(1, 2, 3.2).unwrap();
        g.add_edge(2, 3, 0.5).unwrap();
        g.add_edge(3, 4, 7.1).unwrap();
        assert_eq!(weights_of(&rank_quantize_weights(&g)), vec![1, 2, 1, 3]);

        let all_equal = cycle_graph(4);
        assert_eq!(
            weights_of(&rank_quantize_weights(&all_equal)),
            vec![1, 1, 1, 1]
        );

        let mut g = Graph::new(4);
        g.add_edge(0, 1, 9.0).unwrap();
        g.add_edge(1, 2, 1.0).unwrap();
        g.add_edge(2, 3, 4.0).unwrap();
        assert_eq!(weights_of(&rank_quantize_weights(&g)), vec![3, 1, 2]);
    }

    #[test]
    fn rank_quantize_ordinal_gives_distinct_ranks() {
        let mut g = Graph::new(4);
        g.add_edge(0, 1, 2.0).unwrap();
        g.add_edge(1, 2, 2.0).unwrap();
        g.add_edge(2, 3, 1.0).unwrap();
        let q = rank_quantize(&g, QuantizeMode::Ordinal);
        assert_eq!(weights_of(&q), vec![2, 3, 1]);
    }

    #[test]
    fn laplacian_examples() {
        let l = cycle_graph(3).laplacian();
        let expect = DMatrix::from_row_slice(
            3,
            3,
            &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0],
        );
        assert_eq!(l, expect);

        let mut g = Graph::new(2);
        g.add_edge(0, 1, 4.0).unwrap();
        assert_eq!(
            g.laplacian(),
            DMatrix::from_row_slice(2, 2, &[4.0, -4.0, -4.0, 4.0])
        );

        assert_eq!(Graph::new(3).laplacian(), DMatrix::zeros(3, 3));
    }

    #[test]
    fn laplacian_annihilates_ones() {
        let g = cycle_graph(6).map_weights(|_| 2.5);
        let l = g.laplacian();
        let ones = nalgebra::DVector::from_element(6, 1.0);
        assert!((&l * ones).amax() < 1e-12);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = parse_edge_list("3\n0 1 1.0\n1 2 2.0\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        let again = parse_edge_list(&format_edge_list(&g)).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn edge_list_parse_errors() {
        let err = parse_edge_list("3\n0 x 1.0\n").unwrap_err();
        assert!(matches!(err, GraphError::ParseError { line: 2, .. }));
        assert!(parse_edge_list("# only a comment\n").is_err());
        // comments and blank lines are fine
        let g = parse_edge_list("# header\n2\n\n0 1 3.0 # tail comment\n").unwrap();
        assert_eq!(g.edge_count(), 1);
    }
}
