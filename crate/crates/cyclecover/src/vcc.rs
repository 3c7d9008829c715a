//! Reduction of minimum-weight vertex-disjoint cycle covers (2-factors) to
//! minimum-weight perfect matching, cycle extraction, and the random-edge
//! fallback for graphs without a cover.
//!
//! The reduction subdivides every edge (v,w) into the path v - e_v - e_w - w,
//! then splits each vertex into as many copies as its required degree (2 for
//! original vertices, 1 for subdivision vertices), expanding every edge into
//! the full biclique between the copy sets. A perfect matching of the split
//! gadget exists iff the original graph has a 2-factor, and projecting the
//! matching back yields the cover edges.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{prune_degree_one, rank_quantize, Graph, QuantizeMode};
use crate::matching::{is_perfect_matching, min_weight_perfect_matching, Matching};

#[derive(Debug, Error, PartialEq)]
pub enum VccError {
    #[error("graph has no vertex-disjoint cycle cover")]
    NoCycleCover,
    #[error("graph too large for brute force ({0} vertices, limit {1})")]
    TooLarge(usize, usize),
    #[error("matching is not a perfect matching of the gadget")]
    InvalidMatching,
    #[error("vertex {0} has cover-degree greater than two")]
    NotTwoRegular(usize),
    #[error("cover edge ({0}, {1}) is not an edge of the graph")]
    EdgeNotInGraph(usize, usize),
    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
}

/// The edge-subdivision gadget F_G.
///
/// Vertices `0..n` are the original vertices; for original edge k = (v,w),
/// vertices `n + 2k` and `n + 2k + 1` are the subdivision pair (e_v, e_w).
/// Each of the three replacement edges carries the original edge weight.
#[derive(Debug, Clone)]
pub struct Subdivision {
    pub graph: Graph,
    pub original_vertices: usize,
    /// Endpoints (v, w) of original edge k, in subdivision order.
    pub edge_endpoints: Vec<(usize, usize)>,
}

/// The vertex-splitting gadget H over F_G.
///
/// Original vertex v gets copies `2v` and `2v + 1` (required degree 2);
/// subdivision vertex j gets the single copy `2n + (j - n)` (required
/// degree 1). Every F_G edge becomes a full biclique between copy sets.
#[derive(Debug, Clone)]
pub struct SplitGadget {
    pub graph: Graph,
    /// owner[copy] = F_G vertex the copy belongs to.
    pub owner: Vec<usize>,
    /// copies[fg_vertex] = copy ids (length = required degree).
    pub copies: Vec<Vec<usize>>,
    pub original_vertices: usize,
    pub edge_endpoints: Vec<(usize, usize)>,
}

/// A vertex-disjoint cycle cover, possibly with open chains from the
/// random-edge fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleCover {
    /// Closed cycles in canonical form: smallest vertex first, oriented
    /// toward its smaller-id neighbour.
    pub cycles: Vec<Vec<usize>>,
    /// Open chains (fallback only), oriented from the smaller endpoint.
    pub chains: Vec<Vec<usize>>,
    /// Cover edges with u < v, sorted.
    pub cover_edges: Vec<(usize, usize)>,
    /// Total raw weight of the cover edges in the input graph.
    pub total_weight: f64,
    /// Vertices pruned away (degree <= 1) and therefore not covered.
    pub uncovered: Vec<usize>,
}

impl CycleCover {
    pub fn covered_count(&self) -> usize {
        self.cycles.iter().map(Vec::len).sum::<usize>()
            + self.chains.iter().map(Vec::len).sum::<usize>()
    }
}

/// Replace every edge (v,w) by the path v - e_v - e_w - w.
pub fn subdivide(g: &Graph) -> Subdivision {
    let n = g.vertex_count();
    let m = g.edge_count();
    let mut fg = Graph::new(n + 2 * m);
    let mut edge_endpoints = Vec::with_capacity(m);
    for (k, &(v, w, wt)) in g.edges().iter().enumerate() {
        let ev = n + 2 * k;
        let ew = n + 2 * k + 1;
        fg.add_edge(v, ev, wt).expect("gadget construction");
        fg.add_edge(ev, ew, wt).expect("gadget construction");
        fg.add_edge(ew, w, wt).expect("gadget construction");
        edge_endpoints.push((v, w));
    }
    Subdivision {
        graph: fg,
        original_vertices: n,
        edge_endpoints,
    }
}

/// Split every F_G vertex into f(v) copies (2 on V, 1 on V') and expand each
/// F_G edge into the biclique between the copy sets.
pub fn split(sub: &Subdivision) -> SplitGadget {
    let n = sub.original_vertices;
    let fg_n = sub.graph.vertex_count();
    let mut owner = Vec::new();
    let mut copies = vec![Vec::new(); fg_n];
    for v in 0..n {
        copies[v] = vec![2 * v, 2 * v + 1];
        owner.push(v);
        owner.push(v);
    }
    for j in n..fg_n {
        copies[j] = vec![2 * n + (j - n)];
        owner.push(j);
    }
    let mut h = Graph::new(owner.len());
    for &(a, b, wt) in sub.graph.edges() {
        for &ca in &copies[a] {
            for &cb in &copies[b] {
                h.add_edge(ca, cb, wt).expect("gadget construction");
            }
        }
    }
    SplitGadget {
        graph: h,
        owner,
        copies,
        original_vertices: n,
        edge_endpoints: sub.edge_endpoints.clone(),
    }
}

/// Collapse a perfect matching of the split gadget back to the cover edge
/// set E_C: original edge (v,w) is covered iff its stub e_v is matched to a
/// copy of v (equivalently e_w to a copy of w) rather than to e_w.
pub fn project_matching(
    gadget: &SplitGadget,
    m: &Matching,
) -> Result<Vec<(usize, usize)>, VccError> {
    if !is_perfect_matching(&gadget.graph, m) {
        return Err(VccError::InvalidMatching);
    }
    let n = gadget.original_vertices;
    let mut cover = BTreeSet::new();
    for &(x, y) in &m.pairs {
        let a = gadget.owner[x];
        let b = gadget.owner[y];
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if hi < n {
            // Both endpoints original (cannot occur in this gadget, but the
            // projection rule admits it).
            cover.insert((lo, hi));
        } else if lo < n {
            // Original vertex matched to a subdivision stub.
            let k = (hi - n) / 2;
            let (v, w) = gadget.edge_endpoints[k];
            cover.insert(if v < w { (v, w) } else { (w, v) });
        }
        // lo >= n: e_v matched to e_w, the edge is excluded.
    }
    Ok(cover.into_iter().collect())
}

/// Decompose a (sub-)2-regular edge set into canonical cycles and chains.
/// Vertices untouched by `cover_edges` come back as singleton chains.
pub fn extract_cycles(g: &Graph, cover_edges: &[(usize, usize)]) -> Result<CycleCover, VccError> {
    let n = g.vertex_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut total_weight = 0.0;
    for &(u, v) in cover_edges {
        if u >= n || v >= n {
            return Err(VccError::EdgeNotInGraph(u, v));
        }
        total_weight += g
            .edge_weight(u, v)
            .ok_or(VccError::EdgeNotInGraph(u, v))?;
        adj[u].push(v);
        adj[v].push(u);
    }
    for v in 0..n {
        if adj[v].len() > 2 {
            return Err(VccError::NotTwoRegular(v));
        }
        adj[v].sort_unstable();
    }

    let mut visited = vec![false; n];
    let mut cycles = Vec::new();
    let mut chains = Vec::new();

    // Chains first pass: walk from degree-1 endpoints (and collect
    // singletons) so the later cycle walk only sees closed components.
    for start in 0..n {
        if visited[start] {
            continue;
        }
        match adj[start].len() {
            0 => {
                visited[start] = true;
                chains.push(vec![start]);
            }
            1 => {
                let mut seq = vec![start];
                visited[start] = true;
                let mut prev = start;
                let mut cur = adj[start][0];
                loop {
                    visited[cur] = true;
                    seq.push(cur);
                    let next = adj[cur].iter().copied().find(|&x| x != prev);
                    match next {
                        Some(nx) => {
                            prev = cur;
                            cur = nx;
                        }
                        None => break,
                    }
                }
                // Canonical chain orientation: smaller endpoint first.
                if seq.last().unwrap() < seq.first().unwrap() {
                    seq.reverse();
                }
                chains.push(seq);
            }
            _ => {}
        }
    }
    for start in 0..n {
        if visited[start] || adj[start].is_empty() {
            continue;
        }
        // start is the smallest id of its cycle (smaller ids were visited
        // first); orient toward its smaller neighbour.
        let mut seq = vec![start];
        visited[start] = true;
        let mut prev = start;
        let mut cur = adj[start][0];
        while cur != start {
            visited[cur] = true;
            seq.push(cur);
            let next = adj[cur]
                .iter()
                .copied()
                .find(|&x| x != prev)
                .expect("2-regular component");
            prev = cur;
            cur = next;
        }
        cycles.push(seq);
    }
    chains.sort_by_key(|c| c[0]);
    cycles.sort_by_key(|c| c[0]);

    let mut cover_sorted: Vec<(usize, usize)> = cover_edges
        .iter()
        .map(|&(u, v)| if u < v { (u, v) } else { (v, u) })
        .collect();
    cover_sorted.sort_unstable();

    Ok(CycleCover {
        cycles,
        chains,
        cover_edges: cover_sorted,
        total_weight,
        uncovered: Vec::new(),
    })
}

fn relabel(seq: &[usize], original_of: &[usize]) -> Vec<usize> {
    seq.iter().map(|&v| original_of[v]).collect()
}

/// Minimum-weight vertex-disjoint cycle cover via the full pipeline:
/// prune, subdivide, split, match, project, extract. Raw weights.
pub fn min_weight_cycle_cover(g: &Graph) -> Result<CycleCover, VccError> {
    min_weight_cycle_cover_with(g, QuantizeMode::None)
}

/// As [`min_weight_cycle_cover`], but the matching stage may run on
/// rank-quantized integer weights. The reported `total_weight` is always
/// recomputed from the raw weights.
pub fn min_weight_cycle_cover_with(g: &Graph, mode: QuantizeMode) -> Result<CycleCover, VccError> {
    let pruned = prune_degree_one(g);
    if pruned.graph.vertex_count() == 0 {
        return Err(VccError::NoCycleCover);
    }
    let matching_weights = match mode {
        QuantizeMode::None => pruned.graph.clone(),
        m => rank_quantize(&pruned.graph, m).to_graph(),
    };
    let gadget = split(&subdivide(&matching_weights));
    let matching =
        min_weight_perfect_matching(&gadget.graph).map_err(|_| VccError::NoCycleCover)?;
    let cover_edges = project_matching(&gadget, &matching)?;
    let local = extract_cycles(&pruned.graph, &cover_edges)?;
    debug_assert!(local.chains.is_empty(), "2-factor cannot contain chains");
    Ok(CycleCover {
        cycles: local
            .cycles
            .iter()
            .map(|c| relabel(c, &pruned.original_of))
            .collect(),
        chains: Vec::new(),
        cover_edges: local
            .cover_edges
            .iter()
            .map(|&(u, v)| (pruned.original_of[u], pruned.original_of[v]))
            .collect(),
        total_weight: local.total_weight,
        uncovered: pruned.removed,
    })
}

const BRUTE_FORCE_LIMIT: usize = 10;

/// Exhaustive minimum-weight 2-factor; the test oracle for the matching
/// pipeline. Searches all edge subsets that are 2-regular and spanning by
/// backtracking over per-vertex degree requirements.
pub fn brute_force_cycle_cover(g: &Graph) -> Result<CycleCover, VccError> {
    let n = g.vertex_count();
    if n > BRUTE_FORCE_LIMIT {
        return Err(VccError::TooLarge(n, BRUTE_FORCE_LIMIT));
    }
    if n == 0 {
        return Err(VccError::NoCycleCover);
    }

    struct Search<'a> {
        g: &'a Graph,
        deg: Vec<usize>,
        chosen: Vec<(usize, usize)>,
        best: Option<(f64, Vec<(usize, usize)>)>,
    }
    impl Search<'_> {
        fn step(&mut self, v: usize, acc: f64) {
            if v == self.g.vertex_count() {
                if self.best.as_ref().map_or(true, |(bw, _)| acc < *bw) {
                    self.best = Some((acc, self.chosen.clone()));
                }
                return;
            }
            let need = 2 - self.deg[v];
            let options: Vec<(usize, usize)> = self
                .g
                .neighbors(v)
                .filter(|&(u, _)| u > v && self.deg[u] < 2)
                .collect();
            if options.len() < need {
                return;
            }
            self.pick(v, acc, &options, 0, need);
        }
        fn pick(&mut self, v: usize, acc: f64, options: &[(usize, usize)], from: usize, need: usize) {
            if need == 0 {
                self.step(v + 1, acc);
                return;
            }
            if options.len() - from < need {
                return;
            }
            for i in from..options.len() {
                let (u, k) = options[i];
                if self.deg[u] >= 2 {
                    continue;
                }
                let w = self.g.edges()[k].2;
                self.deg[u] += 1;
                self.deg[v] += 1;
                self.chosen.push((v, u));
                self.pick(v, acc + w, options, i + 1, need - 1);
                self.chosen.pop();
                self.deg[v] -= 1;
                self.deg[u] -= 1;
            }
        }
    }

    let mut search = Search {
        g,
        deg: vec![0; n],
        chosen: Vec::new(),
        best: None,
    };
    search.step(0, 0.0);
    match search.best {
        Some((_, edges)) => extract_cycles(g, &edges),
        None => Err(VccError::NoCycleCover),
    }
}

/// Cycle cover with the random-edge fallback: when no cover exists, add
/// batches of random non-edges carrying a prohibitive penalty weight until
/// one does, then strip the added edges, leaving open chains.
///
/// Randomness comes from a ChaCha8 stream seeded with `seed`; runs are
/// reproducible. The default penalty is 1 + the sum of all edge weights, so
/// a cover avoiding added edges always beats one using any of them.
pub fn cover_with_fallback(
    g: &Graph,
    mode: QuantizeMode,
    penalty: Option<f64>,
    seed: u64,
    max_rounds: usize,
) -> Result<CycleCover, VccError> {
    // Quantize up front so added penalty edges cannot be compressed into the
    // rank range of the real edges.
    let base = match mode {
        QuantizeMode::None => g.clone(),
        m => rank_quantize(g, m).to_graph(),
    };
    let penalty = penalty.unwrap_or_else(|| 1.0 + base.total_weight());
    assert!(
        penalty > base.total_weight(),
        "penalty must exceed the total edge weight"
    );

    if let Ok(cover) = cover_of_augmented(g, &base) {
        return Ok(cover);
    }

    let n = g.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut augmented = base;
    let batch = 1.max(n / 4);
    for _round in 0..max_rounds {
        let mut non_edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !augmented.has_edge(u, v))
            .collect();
        if non_edges.is_empty() {
            break;
        }
        non_edges.shuffle(&mut rng);
        for &(u, v) in non_edges.iter().take(batch) {
            augmented.add_edge(u, v, penalty).expect("non-edge");
        }
        if let Ok(cover) = cover_of_augmented(g, &augmented) {
            return Ok(cover);
        }
    }
    Err(VccError::NoCycleCover)
}

/// Cover the augmented graph, then keep only the edges that exist in the
/// original graph and re-extract, which may leave open chains.
fn cover_of_augmented(original: &Graph, augmented: &Graph) -> Result<CycleCover, VccError> {
    let cover = min_weight_cycle_cover(augmented)?;
    let kept: Vec<(usize, usize)> = cover
        .cover_edges
        .iter()
        .copied()
        .filter(|&(u, v)| original.has_edge(u, v))
        .collect();
    let mut result = extract_cycles(original, &kept)?;
    // Vertices pruned from the augmented graph stay uncovered; extract saw
    // them as singletons of the full vertex range.
    let uncovered: BTreeSet<usize> = cover.uncovered.iter().copied().collect();
    result.chains.retain(|c| {
        if c.len() == 1 && uncovered.contains(&c[0]) {
            false
        } else {
            true
        }
    });
    result.uncovered = cover.uncovered;
    Ok(result)
}

/// Validation report for a cover against its graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverDiagnostics {
    /// Every vertex appears exactly once across cycles, chains and the
    /// uncovered list.
    pub coverage_ok: bool,
    /// Every covered vertex has degree exactly 2 in the cover edges (false
    /// whenever chains are present).
    pub two_regular: bool,
    /// Every cover edge is an edge of the graph, and consecutive vertices of
    /// every cycle/chain are adjacent.
    pub membership_ok: bool,
    /// Weight of the cover edges recomputed from the graph.
    pub recomputed_weight: f64,
    /// Recomputed weight agrees with the cover's stated total.
    pub weight_ok: bool,
}

impl CoverDiagnostics {
    /// Strict verdict: a genuine 2-factor of the covered vertex set.
    pub fn is_valid(&self) -> bool {
        self.coverage_ok && self.two_regular && self.membership_ok && self.weight_ok
    }

    /// Fallback-tolerant verdict: chains allowed.
    pub fn is_valid_with_chains(&self) -> bool {
        self.coverage_ok && self.membership_ok && self.weight_ok
    }
}

pub fn validate_cover(g: &Graph, c: &CycleCover) -> CoverDiagnostics {
    let n = g.vertex_count();
    let mut count = vec![0usize; n];
    let mut in_range = true;
    for v in c
        .cycles
        .iter()
        .chain(c.chains.iter())
        .flatten()
        .chain(c.uncovered.iter())
    {
        if *v < n {
            count[*v] += 1;
        } else {
            in_range = false;
        }
    }
    let coverage_ok = in_range && count.iter().all(|&c| c == 1);

    let mut membership_ok = true;
    let mut deg = vec![0usize; n];
    let mut recomputed_weight = 0.0;
    for &(u, v) in &c.cover_edges {
        match g.edge_weight(u, v) {
            Some(w) => recomputed_weight += w,
            None => membership_ok = false,
        }
        if u < n && v < n {
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    for cyc in &c.cycles {
        for i in 0..cyc.len() {
            let u = cyc[i];
            let v = cyc[(i + 1) % cyc.len()];
            if !g.has_edge(u, v) {
                membership_ok = false;
            }
        }
    }
    for chain in &c.chains {
        for pair in chain.windows(2) {
            if !g.has_edge(pair[0], pair[1]) {
                membership_ok = false;
            }
        }
    }
    let covered: BTreeSet<usize> = c
        .cycles
        .iter()
        .chain(c.chains.iter())
        .flatten()
        .copied()
        .collect();
    let two_regular = c.chains.is_empty()
        && covered.iter().all(|&v| v < n && deg[v] == 2)
        && deg
            .iter()
            .enumerate()
            .all(|(v, &d)| covered.contains(&v) || d == 0);
    let weight_ok = (recomputed_weight - c.total_weight).abs() <= 1e-9 * (1.0 + recomputed_weight);

    CoverDiagnostics {
        coverage_ok,
        two_regular,
        membership_ok,
        recomputed_weight,
        weight_ok,
    }
}

/// Cycle-cover text format: header "# weight=<w> covered=<n>", then one line
/// per cycle "C: v0 v1 ..." and one per chain "P: v0 v1 ...".
pub fn format_cycle_cover(c: &CycleCover) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# weight={} covered={}", c.total_weight, c.covered_count());
    for cyc in &c.cycles {
        let words: Vec<String> = cyc.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "C: {}", words.join(" "));
    }
    for chain in &c.chains {
        let words: Vec<String> = chain.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "P: {}", words.join(" "));
    }
    out
}

/// Parse the cycle-cover text format. Cover edges are reconstructed from the
/// vertex sequences; the uncovered list is not part of the format.
pub fn parse_cycle_cover(text: &str) -> Result<CycleCover, VccError> {
    let mut cycles = Vec::new();
    let mut chains = Vec::new();
    let mut total_weight = 0.0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            for token in rest.split_whitespace() {
                if let Some(w) = token.strip_prefix("weight=") {
                    total_weight = w.parse().map_err(|_| VccError::ParseError {
                        line: line_no,
                        msg: "bad weight".into(),
                    })?;
                }
            }
            continue;
        }
        let (kind, body) = line.split_at(2.min(line.len()));
        let seq: Result<Vec<usize>, _> = body
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>().map_err(|_| VccError::ParseError {
                    line: line_no,
                    msg: format!("bad vertex id {t:?}"),
                })
            })
            .collect();
        match kind {
            "C:" => cycles.push(seq?),
            "P:" => chains.push(seq?),
            _ => {
                return Err(VccError::ParseError {
                    line: line_no,
                    msg: format!("expected 'C:' or 'P:', got {kind:?}"),
                })
            }
        }
    }
    let mut cover_edges = Vec::new();
    for cyc in &cycles {
        for i in 0..cyc.len() {
            let (u, v) = (cyc[i], cyc[(i + 1) % cyc.len()]);
            cover_edges.push(if u < v { (u, v) } else { (v, u) });
        }
    }
    for chain in &chains {
        for pair in chain.windows(2) {
            let (u, v) = (pair[0], pair[1]);
            cover_edges.push(if u < v { (u, v) } else { (v, u) });
        }
    }
    cover_edges.sort_unstable();
    cover_edges.dedup();
    Ok(CycleCover {
        cycles,
        chains,
        cover_edges,
        total_weight,
        uncovered: Vec::new(),
    })
}
