//! Geometric graphs: vertices are points (original or Steiner), edge weights
//! are Euclidean distances by construction. Also home to the Euclidean MST,
//! exact shortest-path machinery, stretch verification, MST subdivision and
//! the greedy non-Steiner baseline spanner.

use std::collections::{BinaryHeap, HashMap, HashSet};

use serde::Serialize;

use crate::error::{Result, SpannerError};
use crate::geometry::{dist_coords, PointSet};

/// Whether a vertex is one of the input points or an auxiliary point added by
/// a construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VertexKind {
    Original,
    Steiner,
}

/// Borrowed view of one vertex.
#[derive(Debug, Clone, Copy)]
pub struct Vertex<'a> {
    pub id: usize,
    pub point: &'a [f64],
    pub kind: VertexKind,
}

/// Undirected geometric graph. Edge weights are always recomputed from the
/// endpoint coordinates, so the weight invariant holds by construction.
#[derive(Debug, Clone)]
pub struct GeometricGraph {
    dim: usize,
    coords: Vec<f64>,
    kinds: Vec<VertexKind>,
    adj: Vec<Vec<(u32, f64)>>,
    edges: Vec<(u32, u32, f64)>,
    edge_set: HashSet<(u32, u32)>,
}

impl GeometricGraph {
    pub fn new(dim: usize) -> Self {
        GeometricGraph {
            dim,
            coords: Vec::new(),
            kinds: Vec::new(),
            adj: Vec::new(),
            edges: Vec::new(),
            edge_set: HashSet::new(),
        }
    }

    /// Graph whose vertices are exactly the input points (all original), no
    /// edges yet.
    pub fn over(ps: &PointSet) -> Self {
        let mut g = GeometricGraph::new(ps.dim());
        for p in ps.iter() {
            g.add_vertex(p.coords(), VertexKind::Original);
        }
        g
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_vertices(&self) -> usize {
        self.kinds.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_steiner(&self) -> usize {
        self.kinds
            .iter()
            .filter(|k| **k == VertexKind::Steiner)
            .count()
    }

    pub fn add_vertex(&mut self, coords: &[f64], kind: VertexKind) -> usize {
        debug_assert_eq!(coords.len(), self.dim);
        let id = self.kinds.len();
        self.coords.extend_from_slice(coords);
        self.kinds.push(kind);
        self.adj.push(Vec::new());
        id
    }

    pub fn point(&self, v: usize) -> &[f64] {
        &self.coords[v * self.dim..(v + 1) * self.dim]
    }

    pub fn kind(&self, v: usize) -> VertexKind {
        self.kinds[v]
    }

    pub(crate) fn set_kind(&mut self, v: usize, kind: VertexKind) {
        self.kinds[v] = kind;
    }

    pub fn vertex(&self, v: usize) -> Vertex<'_> {
        Vertex {
            id: v,
            point: self.point(v),
            kind: self.kinds[v],
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex<'_>> {
        (0..self.n_vertices()).map(move |v| self.vertex(v))
    }

    pub fn neighbors(&self, v: usize) -> &[(u32, f64)] {
        &self.adj[v]
    }

    pub fn edges(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// Adds the edge `(u, v)` weighted by the Euclidean distance between the
    /// endpoints. Self-loops error; re-adding an existing edge is a no-op.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<f64> {
        if u >= self.n_vertices() {
            return Err(SpannerError::UnknownVertex(u));
        }
        if v >= self.n_vertices() {
            return Err(SpannerError::UnknownVertex(v));
        }
        if u == v {
            return Err(SpannerError::invalid("edge", "self-loops are not allowed"));
        }
        let key = (u.min(v) as u32, u.max(v) as u32);
        let w = dist_coords(self.point(u), self.point(v));
        if self.edge_set.insert(key) {
            self.adj[u].push((v as u32, w));
            self.adj[v].push((u as u32, w));
            self.edges.push((key.0, key.1, w));
        }
        Ok(w)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_set
            .contains(&(u.min(v) as u32, u.max(v) as u32))
    }

    /// Merges `other` into `self`, identifying vertices by exact coordinate
    /// bit patterns. Original flags win over Steiner on collision.
    pub fn merge_from(&mut self, other: &GeometricGraph) {
        assert_eq!(self.dim, other.dim);
        let mut intern: HashMap<Vec<u64>, usize> = HashMap::with_capacity(self.n_vertices());
        for v in 0..self.n_vertices() {
            let key: Vec<u64> = self.point(v).iter().map(|c| c.to_bits()).collect();
            intern.entry(key).or_insert(v);
        }
        let mut map = Vec::with_capacity(other.n_vertices());
        for v in 0..other.n_vertices() {
            let key: Vec<u64> = other.point(v).iter().map(|c| c.to_bits()).collect();
            let id = match intern.get(&key) {
                Some(&id) => {
                    if other.kinds[v] == VertexKind::Original {
                        self.kinds[id] = VertexKind::Original;
                    }
                    id
                }
                None => {
                    let id = self.add_vertex(other.point(v), other.kinds[v]);
                    intern.insert(key, id);
                    id
                }
            };
            map.push(id);
        }
        for &(u, v, _) in other.edges() {
            let (mu, mv) = (map[u as usize], map[v as usize]);
            if mu != mv {
                let _ = self.add_edge(mu, mv);
            }
        }
    }

    /// Shortest-path distances from `source` to every vertex (infinity where
    /// unreachable). `stop_after` bounds how many of the first vertices
    /// (by id) must be settled before the search may terminate early.
    pub fn dijkstra(&self, source: usize, stop_after: Option<usize>) -> Result<Vec<f64>> {
        if source >= self.n_vertices() {
            return Err(SpannerError::UnknownVertex(source));
        }
        let n = self.n_vertices();
        let mut dist = vec![f64::INFINITY; n];
        let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(HeapEntry {
            dist: 0.0,
            vertex: source as u32,
        });
        let target_count = stop_after.unwrap_or(n).min(n);
        let mut settled_prefix = 0usize;
        while let Some(HeapEntry { dist: d, vertex: u }) = heap.pop() {
            let u = u as usize;
            if d > dist[u] {
                continue;
            }
            if u < target_count {
                settled_prefix += 1;
                if settled_prefix == target_count {
                    // All ids < target_count now final; finish relaxing u and
                    // stop. Remaining queue entries only concern later ids.
                }
            }
            for &(v, w) in &self.adj[u] {
                let nd = d + w;
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    heap.push(HeapEntry {
                        dist: nd,
                        vertex: v,
                    });
                }
            }
            if settled_prefix == target_count {
                break;
            }
        }
        Ok(dist)
    }

    /// Exact shortest-path distance between two vertices; infinity when
    /// disconnected (a spanner under construction is legitimately partial).
    pub fn shortest_path_dist(&self, u: usize, v: usize) -> Result<f64> {
        if v >= self.n_vertices() {
            return Err(SpannerError::UnknownVertex(v));
        }
        let dist = self.dijkstra(u, None)?;
        Ok(dist[v])
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // min-heap by distance
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Summary statistics for one spanner construction run.
#[derive(Debug, Clone, Serialize)]
pub struct SpannerReport {
    pub algorithm: String,
    pub n_points: usize,
    pub eps: f64,
    pub max_stretch: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub total_weight: f64,
    pub mst_weight: f64,
    pub lightness: f64,
    pub n_edges: usize,
    pub n_steiner: usize,
    /// Construction time in seconds, verification excluded.
    pub elapsed: f64,
    /// Whether stretch verification was exhaustive or sampled.
    pub exhaustive_check: bool,
}

/// Euclidean minimum spanning tree of the point set.
///
/// Dense Prim for n <= 20_000; above that, candidate edges come from a
/// grid-accelerated Yao graph (8 cones in the plane contain an EMST) and
/// Kruskal finishes the job.
pub fn mst(ps: &PointSet) -> Result<GeometricGraph> {
    if ps.is_empty() {
        return Err(SpannerError::EmptyPointSet);
    }
    if ps.len() <= 20_000 || ps.dim() != 2 {
        mst_prim(ps)
    } else {
        mst_yao_kruskal(ps)
    }
}

fn mst_prim(ps: &PointSet) -> Result<GeometricGraph> {
    let n = ps.len();
    let mut g = GeometricGraph::over(ps);
    if n == 1 {
        return Ok(g);
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut best_from = vec![0usize; n];
    in_tree[0] = true;
    for j in 1..n {
        best[j] = dist_coords(ps.point(0).coords(), ps.point(j).coords());
    }
    for _ in 1..n {
        let mut pick = usize::MAX;
        let mut pick_d = f64::INFINITY;
        for j in 0..n {
            if !in_tree[j] && best[j] < pick_d {
                pick_d = best[j];
                pick = j;
            }
        }
        in_tree[pick] = true;
        g.add_edge(best_from[pick], pick)?;
        for j in 0..n {
            if !in_tree[j] {
                let d = dist_coords(ps.point(pick).coords(), ps.point(j).coords());
                if d < best[j] {
                    best[j] = d;
                    best_from[j] = pick;
                }
            }
        }
    }
    Ok(g)
}

/// Yao-8 candidate edges: for each point the nearest neighbor within each of
/// 8 cones of 45 degrees. Found by ring-expanding grid search.
fn yao8_candidates(ps: &PointSet) -> Vec<(u32, u32, f64)> {
    let n = ps.len();
    let pts: Vec<(f64, f64)> = ps
        .iter()
        .map(|p| (p.coords()[0], p.coords()[1]))
        .collect();
    let (mut lo_x, mut lo_y) = (f64::INFINITY, f64::INFINITY);
    let (mut hi_x, mut hi_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        lo_x = lo_x.min(x);
        lo_y = lo_y.min(y);
        hi_x = hi_x.max(x);
        hi_y = hi_y.max(y);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(f64::MIN_POSITIVE);
    // Aim for about two points per cell on uniform inputs.
    let cell = span / (n as f64 / 2.0).sqrt().max(1.0);
    let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
    let key = |x: f64, y: f64| (((x - lo_x) / cell).floor() as i64, ((y - lo_y) / cell).floor() as i64);
    for (i, &(x, y)) in pts.iter().enumerate() {
        buckets.entry(key(x, y)).or_default().push(i as u32);
    }
    let cone_of = |dx: f64, dy: f64| -> usize {
        let a = dy.atan2(dx); // (-pi, pi]
        let t = if a < 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        };
        ((t / (std::f64::consts::TAU / 8.0)) as usize).min(7)
    };
    let mut out = Vec::with_capacity(n * 8);
    for i in 0..n {
        let (x, y) = pts[i];
        let (cx, cy) = key(x, y);
        let mut best = [(f64::INFINITY, u32::MAX); 8];
        let mut filled = 0usize;
        let mut ring = 0i64;
        loop {
            let mut any_cell = false;
            for ox in -ring..=ring {
                for oy in -ring..=ring {
                    if ox.abs() != ring && oy.abs() != ring {
                        continue;
                    }
                    let Some(ids) = buckets.get(&(cx + ox, cy + oy)) else {
                        continue;
                    };
                    any_cell = true;
                    for &j in ids {
                        if j as usize == i {
                            continue;
                        }
                        let (qx, qy) = pts[j as usize];
                        let d = dist_coords(&[x, y], &[qx, qy]);
                        let c = cone_of(qx - x, qy - y);
                        if d < best[c].0 || (d == best[c].0 && j < best[c].1) {
                            if best[c].1 == u32::MAX {
                                filled += 1;
                            }
                            best[c] = (d, j);
                        }
                    }
                }
            }
            let _ = any_cell;
            // Points in unexplored cells are at distance >= (ring-1)*cell
            // from i; once every found neighbor beats that bound (or all
            // cones are filled and the worst is beaten), stop.
            let ring_lb = (ring as f64 - 1.0).max(0.0) * cell;
            let worst_found = best
                .iter()
                .filter(|b| b.1 != u32::MAX)
                .map(|b| b.0)
                .fold(0.0f64, f64::max);
            let span_cells = (span / cell) as i64 + 2;
            if (filled == 8 && ring_lb > worst_found) || ring > span_cells {
                break;
            }
            ring += 1;
        }
        for c in 0..8 {
            if best[c].1 != u32::MAX {
                let j = best[c].1;
                let (a, b) = (i.min(j as usize) as u32, i.max(j as usize) as u32);
                out.push((a, b, best[c].0));
            }
        }
    }
    out.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    out.dedup_by_key(|e| (e.0, e.1));
    out
}

fn mst_yao_kruskal(ps: &PointSet) -> Result<GeometricGraph> {
    let n = ps.len();
    let mut edges = yao8_candidates(ps);
    edges.sort_unstable_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let mut g = GeometricGraph::over(ps);
    let mut dsu = Dsu::new(n);
    let mut added = 0usize;
    for (u, v, _) in edges {
        if dsu.union(u as usize, v as usize) {
            g.add_edge(u as usize, v as usize)?;
            added += 1;
            if added == n - 1 {
                break;
            }
        }
    }
    // A Yao-8 graph contains an EMST, so this should already span; connect
    // stragglers by brute force just in case of pathological ties.
    if added < n - 1 {
        let mut roots: HashMap<usize, Vec<usize>> = HashMap::new();
        for v in 0..n {
            roots.entry(dsu.find(v)).or_default().push(v);
        }
        let mut comps: Vec<Vec<usize>> = roots.into_values().collect();
        comps.sort_by_key(|c| c[0]);
        while comps.len() > 1 {
            let a = comps.pop().unwrap();
            let mut best = (f64::INFINITY, 0usize, 0usize, 0usize);
            for (ci, comp) in comps.iter().enumerate() {
                for &u in &a {
                    for &v in comp {
                        let d = dist_coords(ps.point(u).coords(), ps.point(v).coords());
                        if d < best.0 {
                            best = (d, u, v, ci);
                        }
                    }
                }
            }
            g.add_edge(best.1, best.2)?;
            let ci = best.3;
            let mut merged = a;
            merged.extend_from_slice(&comps[ci]);
            comps[ci] = merged;
        }
    }
    Ok(g)
}

struct Dsu {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Checks that a graph is a spanning tree of its vertex set.
fn require_tree(g: &GeometricGraph) -> Result<()> {
    let n = g.n_vertices();
    let connected = if n == 0 {
        true
    } else {
        let d = g.dijkstra(0, None)?;
        d.iter().all(|x| x.is_finite())
    };
    if n == 0 || g.n_edges() != n - 1 || !connected {
        return Err(SpannerError::NotATree {
            vertices: n,
            edges: g.n_edges(),
            connected,
        });
    }
    Ok(())
}

/// Splits every tree edge of length > 1 into `k = ceil(w)` collinear pieces
/// of length `w/k` (each lands in `(1/2, 1]`); edges of length <= 1 are kept.
/// Returns the subdivided tree and the ids of the new interior Steiner
/// points.
pub fn subdivide_mst(tree: &GeometricGraph) -> Result<(GeometricGraph, Vec<usize>)> {
    require_tree(tree)?;
    let dim = tree.dim();
    let mut out = GeometricGraph::new(dim);
    for v in tree.vertices() {
        out.add_vertex(v.point, v.kind);
    }
    let mut steiner = Vec::new();
    for &(u, v, w) in tree.edges() {
        if w <= 1.0 {
            out.add_edge(u as usize, v as usize)?;
            continue;
        }
        let k = w.ceil() as usize;
        let pu = tree.point(u as usize).to_vec();
        let pv = tree.point(v as usize).to_vec();
        let mut prev = u as usize;
        for piece in 1..k {
            let t = piece as f64 / k as f64;
            let coords: Vec<f64> = pu
                .iter()
                .zip(&pv)
                .map(|(a, b)| a + (b - a) * t)
                .collect();
            let id = out.add_vertex(&coords, VertexKind::Steiner);
            steiner.push(id);
            out.add_edge(prev, id)?;
            prev = id;
        }
        out.add_edge(prev, v as usize)?;
    }
    Ok((out, steiner))
}

/// Outcome of a stretch verification pass.
#[derive(Debug, Clone)]
pub struct StretchCheck {
    pub max_stretch: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub threshold: f64,
    pub passed: bool,
    pub pairs_checked: usize,
}

/// Maximum of `d_G(u,v) / ||u,v||` over the given pairs, compared against
/// threshold `t`. Pair endpoints must be original vertices; zero-distance
/// pairs are rejected.
pub fn verify_stretch(
    g: &GeometricGraph,
    pairs: &[(usize, usize)],
    t: f64,
) -> Result<StretchCheck> {
    for &(u, v) in pairs {
        if u >= g.n_vertices() {
            return Err(SpannerError::UnknownVertex(u));
        }
        if v >= g.n_vertices() {
            return Err(SpannerError::UnknownVertex(v));
        }
        if dist_coords(g.point(u), g.point(v)) == 0.0 {
            return Err(SpannerError::ZeroDistancePair(u, v));
        }
    }
    let mut by_source: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(u, v) in pairs {
        by_source.entry(u).or_default().push(v);
    }
    let mut sources: Vec<usize> = by_source.keys().copied().collect();
    sources.sort_unstable();
    let mut max_stretch: f64 = if pairs.is_empty() { 1.0 } else { 0.0 };
    let mut worst = None;
    for u in sources {
        let needed = &by_source[&u];
        let stop = needed.iter().copied().max().unwrap().max(u) + 1;
        let dist = g.dijkstra(u, Some(stop))?;
        for &v in needed {
            let s = dist[v] / dist_coords(g.point(u), g.point(v));
            if s > max_stretch {
                max_stretch = s;
                worst = Some((u, v));
            }
        }
    }
    Ok(StretchCheck {
        max_stretch,
        worst_pair: worst,
        threshold: t,
        passed: max_stretch <= t,
        pairs_checked: pairs.len(),
    })
}

/// Max stretch over all pairs of the first `n_original` vertices.
pub fn all_pairs_stretch(g: &GeometricGraph, n_original: usize) -> Result<StretchCheck> {
    let mut max_stretch: f64 = 1.0;
    let mut worst = None;
    let mut checked = 0usize;
    for u in 0..n_original {
        let dist = g.dijkstra(u, Some(n_original))?;
        for v in (u + 1)..n_original {
            let d = dist_coords(g.point(u), g.point(v));
            if d == 0.0 {
                return Err(SpannerError::ZeroDistancePair(u, v));
            }
            let s = dist[v] / d;
            checked += 1;
            if s > max_stretch {
                max_stretch = s;
                worst = Some((u, v));
            }
        }
    }
    Ok(StretchCheck {
        max_stretch,
        worst_pair: worst,
        threshold: f64::NAN,
        passed: true,
        pairs_checked: checked,
    })
}

/// Path-greedy t-spanner over the original points: consider pairs by
/// increasing distance, add an edge whenever the current graph distance
/// exceeds `t` times the Euclidean distance.
pub fn greedy_spanner(ps: &PointSet, t: f64) -> Result<GeometricGraph> {
    if !(t > 1.0) {
        return Err(SpannerError::invalid(
            "t",
            format!("stretch factor must exceed 1, got {t}"),
        ));
    }
    let n = ps.len();
    let mut g = GeometricGraph::over(ps);
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist_coords(ps.point(i).coords(), ps.point(j).coords());
            pairs.push((d, i as u32, j as u32));
        }
    }
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut scratch = BoundedDijkstra::new();
    for (d, u, v) in pairs {
        let limit = t * d;
        let reached = scratch.distance_within(&g, u as usize, v as usize, limit);
        if reached.is_none() {
            g.add_edge(u as usize, v as usize)?;
        }
    }
    Ok(g)
}

/// Dijkstra with a distance cutoff and reusable buffers, for repeated
/// "is v within limit of u" queries on a growing graph.
pub struct BoundedDijkstra {
    dist: Vec<f64>,
    stamp: Vec<u32>,
    generation: u32,
    heap: BinaryHeap<HeapEntry>,
}

impl Default for BoundedDijkstra {
    fn default() -> Self {
        Self::new()
    }
}

impl BoundedDijkstra {
    pub fn new() -> Self {
        BoundedDijkstra {
            dist: Vec::new(),
            stamp: Vec::new(),
            generation: 0,
            heap: BinaryHeap::new(),
        }
    }

    fn get(&self, v: usize) -> f64 {
        if self.stamp[v] == self.generation {
            self.dist[v]
        } else {
            f64::INFINITY
        }
    }

    fn set(&mut self, v: usize, d: f64) {
        self.stamp[v] = self.generation;
        self.dist[v] = d;
    }

    /// Shortest-path distance from `u` to `v` if it is at most `limit`,
    /// otherwise `None`. Uses A* with the Euclidean lower bound to `v`.
    pub fn distance_within(
        &mut self,
        g: &GeometricGraph,
        u: usize,
        v: usize,
        limit: f64,
    ) -> Option<f64> {
        let n = g.n_vertices();
        if self.dist.len() < n {
            self.dist.resize(n, f64::INFINITY);
            self.stamp.resize(n, u32::MAX);
        }
        self.generation = self.generation.wrapping_add(1);
        self.heap.clear();
        let tv = g.point(v).to_vec();
        let h = |g: &GeometricGraph, x: usize| dist_coords(g.point(x), &tv);
        self.set(u, 0.0);
        self.heap.push(HeapEntry {
            dist: h(g, u),
            vertex: u as u32,
        });
        while let Some(HeapEntry { dist: f, vertex: x }) = self.heap.pop() {
            let x = x as usize;
            if f > limit {
                return None;
            }
            let gx = self.get(x);
            if x == v {
                return Some(gx);
            }
            if f > gx + h(g, x) + 1e-12 * f.abs() {
                continue; // stale entry
            }
            for &(y, w) in g.neighbors(x) {
                let nd = gx + w;
                if nd < self.get(y as usize) {
                    let fy = nd + h(g, y as usize);
                    if fy <= limit {
                        self.set(y as usize, nd);
                        self.heap.push(HeapEntry {
                            dist: fy,
                            vertex: y,
                        });
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn ps(coords: &[(f64, f64)]) -> PointSet {
        PointSet::new(coords.iter().map(|&(x, y)| Point::xy(x, y)).collect()).unwrap()
    }

    fn ps1(coords: &[f64]) -> PointSet {
        PointSet::new(
            coords
                .iter()
                .map(|&x| Point::new(vec![x]).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed;
        move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    #[test]
    fn mst_collinear() {
        let g = mst(&ps1(&[0.0, 1.0, 3.0])).unwrap();
        assert_eq!(g.n_edges(), 2);
        assert!((g.total_weight() - 3.0).abs() < 1e-12);
        assert!(g.has_edge(0, 1));
        assert!(g.has_edge(1, 2));
    }

    #[test]
    fn mst_unit_square() {
        let g = mst(&ps(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])).unwrap();
        assert!((g.total_weight() - 3.0).abs() < 1e-12);
    }

    // Oracle: Kruskal over the complete graph, implemented independently of
    // the Prim path under test.
    fn kruskal_weight(ps: &PointSet) -> f64 {
        let n = ps.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((
                    dist_coords(ps.point(i).coords(), ps.point(j).coords()),
                    i,
                    j,
                ));
            }
        }
        edges.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut dsu = Dsu::new(n);
        let mut w = 0.0;
        for (d, i, j) in edges {
            if dsu.union(i, j) {
                w += d;
            }
        }
        w
    }

    #[test]
    fn mst_matches_complete_graph_kruskal() {
        let mut rand = lcg(42);
        let pts: Vec<(f64, f64)> = (0..50).map(|_| (rand(), rand())).collect();
        let set = ps(&pts);
        let g = mst(&set).unwrap();
        let oracle = kruskal_weight(&set);
        assert!(
            (g.total_weight() - oracle).abs() <= 1e-9 * oracle,
            "prim {} vs kruskal {}",
            g.total_weight(),
            oracle
        );
    }

    #[test]
    fn mst_yao_path_matches_prim() {
        let mut rand = lcg(7);
        let pts: Vec<(f64, f64)> = (0..800).map(|_| (rand() * 10.0, rand() * 10.0)).collect();
        let set = ps(&pts);
        let prim = mst_prim(&set).unwrap();
        let yao = mst_yao_kruskal(&set).unwrap();
        assert!(
            (prim.total_weight() - yao.total_weight()).abs() <= 1e-9 * prim.total_weight(),
            "prim {} vs yao {}",
            prim.total_weight(),
            yao.total_weight()
        );
    }

    #[test]
    fn mst_not_heavier_than_random_spanning_trees() {
        let mut rand = lcg(99);
        let pts: Vec<(f64, f64)> = (0..24).map(|_| (rand(), rand())).collect();
        let set = ps(&pts);
        let w = mst(&set).unwrap().total_weight();
        // Random spanning trees: Kruskal over a randomly permuted edge list.
        for round in 0..100u64 {
            let mut shuffle = lcg(round * 61 + 5);
            let n = set.len();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    edges.push((shuffle(), i, j));
                }
            }
            edges.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut dsu = Dsu::new(n);
            let mut tw = 0.0;
            for (_, i, j) in edges {
                if dsu.union(i, j) {
                    tw += dist_coords(set.point(i).coords(), set.point(j).coords());
                }
            }
            assert!(w <= tw + 1e-12);
        }
    }

    #[test]
    fn subdivide_splits_long_edges() {
        let t = mst(&ps(&[(0.0, 0.0), (2.3, 0.0)])).unwrap();
        let (s, k) = subdivide_mst(&t).unwrap();
        assert_eq!(k.len(), 2); // 3 pieces
        assert_eq!(s.n_edges(), 3);
        for &(_, _, w) in s.edges() {
            assert!((w - 2.3 / 3.0).abs() < 1e-12);
            assert!(w > 0.5 && w <= 1.0);
        }
    }

    #[test]
    fn subdivide_keeps_short_and_unit_edges() {
        let t = mst(&ps(&[(0.0, 0.0), (0.9, 0.0)])).unwrap();
        let (s, k) = subdivide_mst(&t).unwrap();
        assert!(k.is_empty());
        assert_eq!(s.n_edges(), 1);

        let t = mst(&ps(&[(0.0, 0.0), (1.0, 0.0)])).unwrap();
        let (s, k) = subdivide_mst(&t).unwrap();
        assert!(k.is_empty(), "length exactly 1 is admitted untouched");
        assert_eq!(s.n_edges(), 1);
    }

    #[test]
    fn subdivide_preserves_leaf_distances() {
        let mut rand = lcg(3);
        let pts: Vec<(f64, f64)> = (0..30).map(|_| (rand() * 8.0, rand() * 8.0)).collect();
        let set = ps(&pts);
        let t = mst(&set).unwrap();
        let (s, _) = subdivide_mst(&t).unwrap();
        for u in 0..6 {
            let before = t.dijkstra(u, None).unwrap();
            let after = s.dijkstra(u, None).unwrap();
            for v in 0..set.len() {
                assert!(
                    (before[v] - after[v]).abs() <= 1e-9 * before[v].max(1.0),
                    "leaf-to-leaf distance changed"
                );
            }
        }
    }

    #[test]
    fn subdivide_rejects_non_tree() {
        let set = ps(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        let mut g = GeometricGraph::over(&set);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        g.add_edge(0, 2).unwrap();
        assert!(matches!(
            subdivide_mst(&g),
            Err(SpannerError::NotATree { .. })
        ));
    }

    #[test]
    fn shortest_path_examples() {
        let set = ps1(&[0.0, 1.0, 3.0]);
        let mut g = GeometricGraph::over(&set);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        assert!((g.shortest_path_dist(0, 2).unwrap() - 3.0).abs() < 1e-12);

        let set = ps(&[(0.0, 0.0), (1.0, 0.0)]);
        let g = GeometricGraph::over(&set);
        assert!(g.shortest_path_dist(0, 1).unwrap().is_infinite());
        assert!(g.shortest_path_dist(0, 7).is_err());
    }

    // Oracle: Floyd-Warshall on a random graph.
    #[test]
    fn dijkstra_matches_floyd_warshall() {
        let mut rand = lcg(17);
        let pts: Vec<(f64, f64)> = (0..100).map(|_| (rand(), rand())).collect();
        let set = ps(&pts);
        let mut g = GeometricGraph::over(&set);
        let n = set.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if rand() < 0.06 {
                    g.add_edge(i, j).unwrap();
                }
            }
        }
        let mut fw = vec![vec![f64::INFINITY; n]; n];
        for i in 0..n {
            fw[i][i] = 0.0;
        }
        for &(u, v, w) in g.edges() {
            fw[u as usize][v as usize] = w;
            fw[v as usize][u as usize] = w;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let alt = fw[i][k] + fw[k][j];
                    if alt < fw[i][j] {
                        fw[i][j] = alt;
                    }
                }
            }
        }
        for u in (0..n).step_by(7) {
            let d = g.dijkstra(u, None).unwrap();
            for v in 0..n {
                if fw[u][v].is_finite() {
                    assert!((d[v] - fw[u][v]).abs() <= 1e-9 * fw[u][v].max(1.0));
                } else {
                    assert!(d[v].is_infinite());
                }
            }
        }
    }

    #[test]
    fn verify_stretch_complete_graph() {
        let mut rand = lcg(5);
        let pts: Vec<(f64, f64)> = (0..12).map(|_| (rand(), rand())).collect();
        let set = ps(&pts);
        let mut g = GeometricGraph::over(&set);
        let mut pairs = Vec::new();
        for i in 0..set.len() {
            for j in (i + 1)..set.len() {
                g.add_edge(i, j).unwrap();
                pairs.push((i, j));
            }
        }
        let chk = verify_stretch(&g, &pairs, 1.0 + 1e-12).unwrap();
        assert!(chk.passed);
        assert!((chk.max_stretch - 1.0).abs() < 1e-12);
    }

    #[test]
    fn verify_stretch_mst_square_diagonal() {
        let set = ps(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let g = mst(&set).unwrap();
        let chk = verify_stretch(&g, &[(0, 2)], 2.0).unwrap();
        assert!((chk.max_stretch - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn verify_stretch_rejects_zero_distance() {
        let set = ps(&[(0.0, 0.0), (1.0, 0.0)]);
        let g = GeometricGraph::over(&set);
        assert!(matches!(
            verify_stretch(&g, &[(0, 0)], 2.0),
            Err(SpannerError::ZeroDistancePair(0, 0))
        ));
    }

    #[test]
    fn greedy_spanner_three_collinear() {
        let set = ps1(&[0.0, 1.0, 2.0]);
        let g = greedy_spanner(&set, 2.0).unwrap();
        assert_eq!(g.n_edges(), 2);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2));
        assert!(!g.has_edge(0, 2), "0-2 is satisfied through the middle");
    }

    #[test]
    fn greedy_spanner_tiny_t_on_square_is_complete() {
        let set = ps(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let g = greedy_spanner(&set, 1.0 + 1e-9).unwrap();
        assert_eq!(g.n_edges(), 6);
    }

    #[test]
    fn greedy_spanner_self_check() {
        let mut rand = lcg(31);
        let pts: Vec<(f64, f64)> = (0..100).map(|_| (rand(), rand())).collect();
        let set = ps(&pts);
        let t = 1.1;
        let g = greedy_spanner(&set, t).unwrap();
        let chk = all_pairs_stretch(&g, set.len()).unwrap();
        assert!(
            chk.max_stretch <= t + 1e-12,
            "greedy spanner stretch {} > {}",
            chk.max_stretch,
            t
        );
        // Lightness of a greedy spanner is at least that of the MST.
        let mst_w = mst(&set).unwrap().total_weight();
        assert!(g.total_weight() >= mst_w - 1e-9);
    }

    #[test]
    fn greedy_spanner_rejects_bad_t() {
        let set = ps(&[(0.0, 0.0), (1.0, 0.0)]);
        assert!(greedy_spanner(&set, 1.0).is_err());
        assert!(greedy_spanner(&set, 0.5).is_err());
    }

    #[test]
    fn edge_weights_equal_distances() {
        let mut rand = lcg(8);
        let pts: Vec<(f64, f64)> = (0..40).map(|_| (rand() * 4.0, rand() * 4.0)).collect();
        let set = ps(&pts);
        let g = greedy_spanner(&set, 1.5).unwrap();
        for &(u, v, w) in g.edges() {
            let d = dist_coords(g.point(u as usize), g.point(v as usize));
            assert!((w - d).abs() <= 1e-12 * d.max(1.0));
        }
    }

    #[test]
    fn merge_identifies_shared_points() {
        let set = ps(&[(0.0, 0.0), (1.0, 0.0)]);
        let mut a = GeometricGraph::over(&set);
        a.add_edge(0, 1).unwrap();
        let mut b = GeometricGraph::new(2);
        let s = b.add_vertex(&[0.5, 0.5], VertexKind::Steiner);
        let o = b.add_vertex(&[1.0, 0.0], VertexKind::Original);
        b.add_edge(s, o).unwrap();
        a.merge_from(&b);
        assert_eq!(a.n_vertices(), 3);
        assert_eq!(a.n_edges(), 2);
        assert_eq!(a.n_steiner(), 1);
    }
}
