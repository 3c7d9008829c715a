//! Maximum-weight matching in general graphs (Galil's formulation of
//! Edmonds' blossom / primal-dual method).
//!
//! This is a Rust adaptation of Joris van Rantwijk's well-known Python
//! implementation (http://jorisvr.nl/article/maximum-matching), here over
//! f64 weights. Most of the structural comments follow that version; read
//! the Galil survey ("Efficient Algorithms for Finding Maximum Matching in
//! Graphs", ACM Computing Surveys, 1986) before reading this code.
//!
//! With integer-valued weights every dual variable stays an exact multiple
//! of 1/2, so all comparisons below are exact and the result is exactly
//! optimal. Overall running time is O(|V|^3).

pub const UNMATCHED: usize = usize::MAX;

type Weight = f64;

const LABEL_FREE: usize = 0;
const LABEL_S: usize = 1;
const LABEL_T: usize = 2;

/// Compute a maximum-weight matching on vertices `0..n`.
///
/// `edges` lists undirected edges (i, j, w) with i != j and at most one edge
/// per pair. If `max_cardinality` is true only maximum-cardinality matchings
/// are considered. Returns `mate` with `mate[v]` the partner of `v` or
/// [`UNMATCHED`].
pub fn maximum_weight_matching(
    n: usize,
    edges: &[(usize, usize, Weight)],
    max_cardinality: bool,
) -> Vec<usize> {
    if edges.is_empty() {
        return vec![UNMATCHED; n];
    }
    let mut solver = Solver::new(n, edges, max_cardinality);
    solver.solve();
    // Transform mate[] from endpoint encoding to partner vertices.
    let mut mate = vec![UNMATCHED; n];
    for v in 0..n {
        if solver.mate[v] != UNMATCHED {
            mate[v] = solver.endpoint[solver.mate[v]];
        }
    }
    for v in 0..n {
        debug_assert!(mate[v] == UNMATCHED || mate[mate[v]] == v);
    }
    mate
}

struct Solver<'a> {
    nvertex: usize,
    nedge: usize,
    maxweight: Weight,
    edges: &'a [(usize, usize, Weight)],
    maxcardinality: bool,
    // Vertices are 0..nvertex, non-trivial blossoms nvertex..2*nvertex.
    // Edge endpoints are 0..2*nedge; endpoints 2k and 2k+1 belong to edge k.
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<usize>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Vec<usize>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<Weight>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl<'a> Solver<'a> {
    fn new(n: usize, edges: &'a [(usize, usize, Weight)], max_cardinality: bool) -> Self {
        let nedge = edges.len();
        let mut nvertex = n;
        for &(i, j, _) in edges {
            assert!(i != j);
            nvertex = nvertex.max(i + 1).max(j + 1);
        }
        let maxweight = edges.iter().map(|e| e.2).fold(f64::MIN, f64::max).max(0.0);

        let endpoint: Vec<usize> = (0..2 * nedge)
            .map(|p| if p % 2 == 0 { edges[p / 2].0 } else { edges[p / 2].1 })
            .collect();
        let mut neighbend = vec![Vec::new(); nvertex];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }

        // dualvar[v] = 2*u(v); the factor two keeps values integral for
        // integer weights. dualvar[b] = z(b) for non-trivial blossoms.
        let mut dualvar = vec![maxweight; nvertex];
        dualvar.extend(vec![0.0; nvertex]);

        Solver {
            nvertex,
            nedge,
            maxweight,
            edges,
            maxcardinality: max_cardinality,
            endpoint,
            neighbend,
            mate: vec![UNMATCHED; nvertex],
            label: vec![LABEL_FREE; 2 * nvertex],
            labelend: vec![UNMATCHED; 2 * nvertex],
            inblossom: (0..nvertex).collect(),
            blossomparent: vec![UNMATCHED; 2 * nvertex],
            blossomchilds: vec![Vec::new(); 2 * nvertex],
            blossombase: (0..nvertex).chain(std::iter::repeat(UNMATCHED).take(nvertex)).collect(),
            blossomendps: vec![Vec::new(); 2 * nvertex],
            bestedge: vec![UNMATCHED; 2 * nvertex],
            blossombestedges: vec![Vec::new(); 2 * nvertex],
            unusedblossoms: (nvertex..2 * nvertex).collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: Vec::new(),
        }
    }

    /// 2 * slack of edge k (not meaningful inside blossoms).
    #[inline]
    fn slack(&self, k: usize) -> Weight {
        let (i, j, wt) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2.0 * wt
    }

    fn blossom_leaves(&self, b: usize, out: &mut Vec<usize>) {
        if b < self.nvertex {
            out.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                self.blossom_leaves(t, out);
            }
        }
    }

    fn leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.blossom_leaves(b, &mut out);
        out
    }

    /// Assign label `t` to the top-level blossom containing vertex w, reached
    /// through the edge with remote endpoint p.
    fn assign_label(&mut self, w: usize, t: usize, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == LABEL_FREE && self.label[b] == LABEL_FREE);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = UNMATCHED;
        self.bestedge[b] = UNMATCHED;
        if t == LABEL_S {
            let leaves = self.leaves(b);
            self.queue.extend(leaves);
        } else if t == LABEL_T {
            // The base of a T-blossom is the only vertex with an external
            // mate; give that mate label S.
            let base = self.blossombase[b];
            debug_assert!(self.mate[base] != UNMATCHED);
            let mbase = self.mate[base];
            let ep = self.endpoint[mbase];
            self.assign_label(ep, LABEL_S, mbase ^ 1);
        }
    }

    /// Trace back from v and w to find either a new blossom base or an
    /// augmenting path (returns UNMATCHED in the latter case).
    fn scan_blossom(&mut self, v: usize, w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = UNMATCHED;
        let mut v = v;
        let mut w = w;
        while v != UNMATCHED || w != UNMATCHED {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert!(self.label[b] == LABEL_S);
            path.push(b);
            self.label[b] = 5;
            debug_assert!(self.labelend[b] == self.mate[self.blossombase[b]]);
            if self.labelend[b] == UNMATCHED {
                v = UNMATCHED;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                debug_assert!(self.label[b] == LABEL_T);
                debug_assert!(self.labelend[b] != UNMATCHED);
                v = self.endpoint[self.labelend[b]];
            }
            if w != UNMATCHED {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = LABEL_S;
        }
        base
    }

    /// Construct a new S-blossom with the given base containing edge k.
    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];

        let b = self.unusedblossoms.pop().expect("blossom numbers exhausted");
        self.blossombase[b] = base;
        self.blossomparent[b] = UNMATCHED;
        self.blossomparent[bb] = b;

        let mut childs = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            childs.push(bv);
            endps.push(self.labelend[bv]);
            debug_assert!(
                self.label[bv] == LABEL_T
                    || (self.label[bv] == LABEL_S
                        && self.labelend[bv] == self.mate[self.blossombase[bv]])
            );
            debug_assert!(self.labelend[bv] != UNMATCHED);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        childs.push(bb);
        childs.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            childs.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            debug_assert!(
                self.label[bw] == LABEL_T
                    || (self.label[bw] == LABEL_S
                        && self.labelend[bw] == self.mate[self.blossombase[bw]])
            );
            debug_assert!(self.labelend[bw] != UNMATCHED);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        self.blossomchilds[b] = childs;
        self.blossomendps[b] = endps;

        debug_assert!(self.label[bb] == LABEL_S);
        self.label[b] = LABEL_S;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0.0;

        for v in self.leaves(b) {
            if self.label[self.inblossom[v]] == LABEL_T {
                // Former T-vertex becomes part of an S-blossom.
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }

        // Compute the least-slack edges to neighbouring S-blossoms.
        let mut bestedgeto = vec![UNMATCHED; 2 * self.nvertex];
        for ci in 0..self.blossomchilds[b].len() {
            let bv = self.blossomchilds[b][ci];
            let nblist: Vec<usize> = if self.blossombestedges[bv].is_empty() {
                self.leaves(bv)
                    .iter()
                    .flat_map(|&v| self.neighbend[v].iter().map(|p| p / 2))
                    .collect()
            } else {
                self.blossombestedges[bv].clone()
            };
            for k in nblist {
                let (mut i, mut j, _) = self.edges[k];
                if self.inblossom[j] == b {
                    std::mem::swap(&mut i, &mut j);
                }
                let bj = self.inblossom[j];
                if bj != b
                    && self.label[bj] == LABEL_S
                    && (bestedgeto[bj] == UNMATCHED || self.slack(k) < self.slack(bestedgeto[bj]))
                {
                    bestedgeto[bj] = k;
                }
            }
            self.blossombestedges[bv] = Vec::new();
            self.bestedge[bv] = UNMATCHED;
        }
        self.blossombestedges[b] = bestedgeto.into_iter().filter(|&k| k != UNMATCHED).collect();
        self.bestedge[b] = UNMATCHED;
        for i in 0..self.blossombestedges[b].len() {
            let k = self.blossombestedges[b][i];
            if self.bestedge[b] == UNMATCHED || self.slack(k) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k;
            }
        }
    }

    /// Expand the given top-level blossom.
    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        for s in self.blossomchilds[b].clone() {
            self.blossomparent[s] = UNMATCHED;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0.0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.leaves(s) {
                    self.inblossom[v] = s;
                }
            }
        }
        // A T-blossom expanded during a stage needs its sub-blossoms
        // relabeled.
        if !endstage && self.label[b] == LABEL_T {
            debug_assert!(self.labelend[b] != UNMATCHED);
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let nchilds = self.blossomchilds[b].len() as i32;
            let mut j = self.blossomchilds[b]
                .iter()
                .position(|&c| c == entrychild)
                .unwrap() as i32;
            let (jstep, endptrick): (i32, usize) = if j & 1 != 0 {
                j -= nchilds;
                (1, 0)
            } else {
                (-1, 1)
            };
            let mut p = self.labelend[b];
            while j != 0 {
                // Relabel the T-sub-blossom.
                self.label[self.endpoint[p ^ 1]] = LABEL_FREE;
                let q = wrap_index(&self.blossomendps[b], j - endptrick as i32) ^ endptrick;
                self.label[self.endpoint[q ^ 1]] = LABEL_FREE;
                let ep = self.endpoint[p ^ 1];
                self.assign_label(ep, LABEL_T, p);
                // Step to the next S-sub-blossom; its forward edge is allowed.
                self.allowedge[wrap_index(&self.blossomendps[b], j - endptrick as i32) / 2] = true;
                j += jstep;
                p = wrap_index(&self.blossomendps[b], j - endptrick as i32) ^ endptrick;
                // Step to the next T-sub-blossom.
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            // Relabel the base T-sub-blossom without stepping to its mate.
            let bv = wrap_index(&self.blossomchilds[b], j);
            self.label[self.endpoint[p ^ 1]] = LABEL_T;
            self.label[bv] = LABEL_T;
            self.labelend[self.endpoint[p ^ 1]] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = UNMATCHED;
            // Continue along the blossom until we get back to entrychild,
            // relabeling sub-blossoms reachable from outside.
            j += jstep;
            while wrap_index(&self.blossomchilds[b], j) != entrychild {
                let bv = wrap_index(&self.blossomchilds[b], j);
                if self.label[bv] == LABEL_S {
                    j += jstep;
                    continue;
                }
                let mut v = UNMATCHED;
                for leaf in self.leaves(bv) {
                    v = leaf;
                    if self.label[v] != LABEL_FREE {
                        break;
                    }
                }
                if v != UNMATCHED && self.label[v] != LABEL_FREE {
                    debug_assert!(self.label[v] == LABEL_T);
                    debug_assert!(self.inblossom[v] == bv);
                    self.label[v] = LABEL_FREE;
                    self.label[self.endpoint[self.mate[self.blossombase[bv]]]] = LABEL_FREE;
                    let lblend = self.labelend[v];
                    self.assign_label(v, LABEL_T, lblend);
                }
                j += jstep;
            }
        }
        // Recycle the blossom number.
        self.label[b] = UNMATCHED;
        self.labelend[b] = UNMATCHED;
        self.blossombase[b] = UNMATCHED;
        self.bestedge[b] = UNMATCHED;
        self.blossomchilds[b] = Vec::new();
        self.blossomendps[b] = Vec::new();
        self.blossombestedges[b] = Vec::new();
        self.unusedblossoms.push(b);
    }

    /// Swap matched/unmatched edges over an alternating path through blossom
    /// b between vertex v and the base vertex.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let i = self.blossomchilds[b].iter().position(|&c| c == t).unwrap();
        let mut j = i as i32;
        let (jstep, endptrick): (i32, usize) = if i & 1 != 0 {
            j -= self.blossomchilds[b].len() as i32;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t = wrap_index(&self.blossomchilds[b], j);
            let p = wrap_index(&self.blossomendps[b], j - endptrick as i32) ^ endptrick;
            if t >= self.nvertex {
                let ep = self.endpoint[p];
                self.augment_blossom(t, ep);
            }
            j += jstep;
            let t = wrap_index(&self.blossomchilds[b], j);
            if t >= self.nvertex {
                let ep = self.endpoint[p ^ 1];
                self.augment_blossom(t, ep);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert!(self.blossombase[b] == v);
    }

    /// Swap matched/unmatched edges over an alternating path between two
    /// single vertices, running through edge k.
    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for &(start, startp) in &[(v, 2 * k + 1), (w, 2 * k)] {
            let mut s = start;
            let mut p = startp;
            loop {
                let bs = self.inblossom[s];
                debug_assert!(self.label[bs] == LABEL_S);
                debug_assert!(self.labelend[bs] == self.mate[self.blossombase[bs]]);
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == UNMATCHED {
                    break; // reached a single vertex
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert!(self.label[bt] == LABEL_T);
                debug_assert!(self.labelend[bt] != UNMATCHED);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                debug_assert!(self.blossombase[bt] == t);
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    /// Dual feasibility / complementary slackness check (exact for integer
    /// weights, tolerance-based otherwise).
    fn verify_optimum(&self) {
        let eps = 1e-8 * (1.0 + self.maxweight.abs());
        let vdualoffset = if self.maxcardinality {
            (-self.dualvar[..self.nvertex]
                .iter()
                .fold(f64::MAX, |a, &b| a.min(b)))
            .max(0.0)
        } else {
            0.0
        };
        for k in 0..self.nedge {
            let (i, j, wt) = self.edges[k];
            let mut s = self.dualvar[i] + self.dualvar[j] - 2.0 * wt;
            let mut iblossoms = vec![i];
            let mut jblossoms = vec![j];
            while self.blossomparent[*iblossoms.last().unwrap()] != UNMATCHED {
                iblossoms.push(self.blossomparent[*iblossoms.last().unwrap()]);
            }
            while self.blossomparent[*jblossoms.last().unwrap()] != UNMATCHED {
                jblossoms.push(self.blossomparent[*jblossoms.last().unwrap()]);
            }
            iblossoms.reverse();
            jblossoms.reverse();
            for (&bi, &bj) in iblossoms.iter().zip(jblossoms.iter()) {
                if bi != bj {
                    break;
                }
                s += 2.0 * self.dualvar[bi];
            }
            assert!(s >= -eps, "negative slack on edge {k}");
            if self.mate[i] / 2 == k || self.mate[j] / 2 == k {
                assert!(self.mate[i] / 2 == k && self.mate[j] / 2 == k);
                assert!(s.abs() <= eps, "matched edge {k} has nonzero slack");
            }
        }
        for v in 0..self.nvertex {
            assert!(self.mate[v] != UNMATCHED || (self.dualvar[v] + vdualoffset).abs() <= eps);
        }
        for b in self.nvertex..2 * self.nvertex {
            if self.blossombase[b] != UNMATCHED && self.dualvar[b] > eps {
                assert!(self.blossomendps[b].len() % 2 == 1);
                for (ix, &p) in self.blossomendps[b].iter().enumerate() {
                    if ix % 2 == 1 {
                        assert!(self.mate[self.endpoint[p]] == p ^ 1);
                        assert!(self.mate[self.endpoint[p ^ 1]] == p);
                    }
                }
            }
        }
    }

    fn solve(&mut self) {
        // Warm start: greedily match along edges that are tight under the
        // initial duals (i.e. maximum-weight edges). The main loop is correct
        // from any matching of tight edges, and each pre-matched pair saves a
        // full stage, which matters a lot on weight-degenerate instances.
        for k in 0..self.nedge {
            let (i, j, _) = self.edges[k];
            if self.mate[i] == UNMATCHED && self.mate[j] == UNMATCHED && self.slack(k) <= 0.0 {
                self.mate[i] = 2 * k + 1;
                self.mate[j] = 2 * k;
            }
        }

        for _stage in 0..self.nvertex {
            // Each stage finds one augmenting path and augments along it.
            self.label.iter_mut().for_each(|l| *l = LABEL_FREE);
            self.bestedge.iter_mut().for_each(|e| *e = UNMATCHED);
            for b in self.nvertex..2 * self.nvertex {
                self.blossombestedges[b] = Vec::new();
            }
            self.allowedge.iter_mut().for_each(|a| *a = false);
            self.queue.clear();

            for v in 0..self.nvertex {
                if self.mate[v] == UNMATCHED && self.label[self.inblossom[v]] == LABEL_FREE {
                    self.assign_label(v, LABEL_S, UNMATCHED);
                }
            }

            let mut augmented = false;
            loop {
                // Substage: search for an augmenting path, or pump slack out
                // of the duals when the search is stuck.
                'search: while let Some(v) = self.queue.pop() {
                    debug_assert!(self.label[self.inblossom[v]] == LABEL_S);
                    for pi in 0..self.neighbend[v].len() {
                        let p = self.neighbend[v][pi];
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue; // internal to a blossom
                        }
                        let mut kslack = 0.0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0.0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == LABEL_FREE {
                                // w is free; label it T (its mate becomes S).
                                self.assign_label(w, LABEL_T, p ^ 1);
                            } else if self.label[self.inblossom[w]] == LABEL_S {
                                // S-S edge: either a new blossom or an
                                // augmenting path.
                                let base = self.scan_blossom(v, w);
                                if base != UNMATCHED {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break 'search;
                                }
                            } else if self.label[w] == LABEL_FREE {
                                // w sits inside a T-blossom but has not been
                                // reached from outside yet.
                                debug_assert!(self.label[self.inblossom[w]] == LABEL_T);
                                self.label[w] = LABEL_T;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == LABEL_S {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == UNMATCHED
                                || kslack < self.slack(self.bestedge[b])
                            {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == LABEL_FREE
                            && (self.bestedge[w] == UNMATCHED
                                || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                }
                if augmented {
                    break;
                }

                // No augmenting path under the current duals; compute the
                // least delta and update. (Duals and slacks carry a factor 2.)
                let mut deltatype = -1;
                let mut delta = 0.0;
                let mut deltaedge = 0;
                let mut deltablossom = 0;

                if !self.maxcardinality {
                    deltatype = 1;
                    delta = self.dualvar[..self.nvertex]
                        .iter()
                        .fold(f64::MAX, |a, &b| a.min(b));
                }
                // delta2: least slack between an S-vertex and a free vertex.
                for v in 0..self.nvertex {
                    if self.label[self.inblossom[v]] == LABEL_FREE
                        && self.bestedge[v] != UNMATCHED
                    {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                // delta3: half the least slack between two S-blossoms.
                for b in 0..2 * self.nvertex {
                    if self.blossomparent[b] == UNMATCHED
                        && self.label[b] == LABEL_S
                        && self.bestedge[b] != UNMATCHED
                    {
                        let d = self.slack(self.bestedge[b]) / 2.0;
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                // delta4: least dual of any top-level T-blossom.
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != UNMATCHED
                        && self.blossomparent[b] == UNMATCHED
                        && self.label[b] == LABEL_T
                        && (deltatype == -1 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == -1 {
                    // Max-cardinality optimum reached; one final update so
                    // the optimum can be verified.
                    assert!(self.maxcardinality);
                    deltatype = 1;
                    delta = self.dualvar[..self.nvertex]
                        .iter()
                        .fold(f64::MAX, |a, &b| a.min(b))
                        .max(0.0);
                }

                for v in 0..self.nvertex {
                    match self.label[self.inblossom[v]] {
                        LABEL_FREE => {}
                        LABEL_S => self.dualvar[v] -= delta,
                        LABEL_T => self.dualvar[v] += delta,
                        _ => unreachable!("unexpected label"),
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != UNMATCHED && self.blossomparent[b] == UNMATCHED {
                        match self.label[b] {
                            LABEL_FREE => {}
                            LABEL_S => self.dualvar[b] += delta,
                            LABEL_T => self.dualvar[b] -= delta,
                            _ => unreachable!("unexpected label"),
                        }
                    }
                }

                match deltatype {
                    1 => break, // optimum reached
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == LABEL_FREE {
                            i = j;
                        }
                        debug_assert!(self.label[self.inblossom[i]] == LABEL_S);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        debug_assert!(self.label[self.inblossom[i]] == LABEL_S);
                        self.queue.push(i);
                    }
                    4 => self.expand_blossom(deltablossom, false),
                    _ => unreachable!("unexpected deltatype"),
                }
            }

            if !augmented {
                break;
            }

            // End of stage: expand all S-blossoms with zero dual.
            for b in self.nvertex..2 * self.nvertex {
                if self.blossomparent[b] == UNMATCHED
                    && self.blossombase[b] != UNMATCHED
                    && self.label[b] == LABEL_S
                    && self.dualvar[b] == 0.0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
        if cfg!(debug_assertions) || self.nvertex <= 4096 {
            self.verify_optimum();
        }
    }
}

/// Python-style indexing: negative indices count from the back.
#[inline]
fn wrap_index(v: &[usize], index: i32) -> usize {
    if index >= 0 {
        v[index as usize]
    } else {
        v[v.len() - (-index) as usize]
    }
}
