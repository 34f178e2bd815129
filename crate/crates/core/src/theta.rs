//! Theta-graphs in the plane: per point and per cone, an edge to the point
//! minimizing the projection onto the cone axis. With `k` cones the stretch
//! is at most `1 / (cos t - sin t)` for `t = 2 pi / k`, so `k` can be chosen
//! from a stretch budget. Used as the sparse base spanner of the fast planar
//! construction and as one of the pluggable black-box spanners.

use crate::error::{Result, SpannerError};
use crate::geometry::PointSet;
use crate::graph::GeometricGraph;

/// Smallest cone count whose worst-case theta-graph stretch is at most
/// `1 + eps`.
pub fn cones_for_stretch(eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(SpannerError::invalid("eps", "must be positive"));
    }
    let mut k = 8usize;
    loop {
        let t = std::f64::consts::TAU / k as f64;
        let denom = t.cos() - t.sin();
        if denom > 0.0 && 1.0 / denom <= 1.0 + eps {
            return Ok(k);
        }
        k += 1;
        if k > 50_000_000 {
            return Err(SpannerError::invalid("eps", "stretch budget too small"));
        }
    }
}

/// Theta-graph with `k >= 9` cones over a planar point set.
pub fn theta_graph(ps: &PointSet, k: usize) -> Result<GeometricGraph> {
    if ps.dim() != 2 {
        return Err(SpannerError::WrongDimension {
            want: 2,
            got: ps.dim(),
        });
    }
    if k < 9 {
        return Err(SpannerError::invalid("k", "need at least 9 cones"));
    }
    let n = ps.len();
    let mut g = GeometricGraph::over(ps);
    if n < 2 {
        return Ok(g);
    }
    let pts: Vec<[f64; 2]> = ps
        .iter()
        .map(|p| [p.coords()[0], p.coords()[1]])
        .collect();
    let theta = std::f64::consts::TAU / k as f64;

    // Reusable buffers across cones.
    let mut alpha = vec![0.0f64; n];
    let mut beta = vec![0.0f64; n];
    let mut proj = vec![0.0f64; n];
    let mut order: Vec<u32> = (0..n as u32).collect();
    let mut beta_rank = vec![0u32; n];

    for cone in 0..k {
        let lo = cone as f64 * theta;
        let axis = lo + 0.5 * theta;
        let d1 = [lo.cos(), lo.sin()];
        let d2 = [(lo + theta).cos(), (lo + theta).sin()];
        let ax = [axis.cos(), axis.sin()];
        for i in 0..n {
            let p = pts[i];
            // q is in the cone of u iff alpha(q) >= alpha(u) and
            // beta(q) >= beta(u): the cone is the intersection of the
            // halfplanes left of d1 and right of d2.
            alpha[i] = d1[0] * p[1] - d1[1] * p[0];
            beta[i] = p[0] * d2[1] - p[1] * d2[0];
            proj[i] = p[0] * ax[0] + p[1] * ax[1];
        }
        // Rank by beta for the Fenwick tree.
        order.sort_unstable_by(|&a, &b| beta[a as usize].total_cmp(&beta[b as usize]));
        for (r, &i) in order.iter().enumerate() {
            beta_rank[i as usize] = r as u32;
        }
        // Sweep by alpha descending; the Fenwick tree answers "min proj with
        // beta rank >= r" over already-processed points (suffix minima).
        order.sort_unstable_by(|&a, &b| alpha[b as usize].total_cmp(&alpha[a as usize]));
        let mut fen = SuffixMinFenwick::new(n);
        let mut batch_start = 0usize;
        while batch_start < n {
            let mut batch_end = batch_start + 1;
            let a0 = alpha[order[batch_start] as usize];
            while batch_end < n && alpha[order[batch_end] as usize] == a0 {
                batch_end += 1;
            }
            let batch = &order[batch_start..batch_end];
            // Same-alpha points can see each other when beta allows; handle
            // them with a scan in beta-descending order.
            let mut by_beta: Vec<u32> = batch.to_vec();
            by_beta.sort_unstable_by(|&a, &b| beta[b as usize].total_cmp(&beta[a as usize]));
            let mut best_in_batch: Option<(f64, u32)> = None;
            let mut idx = 0usize;
            while idx < by_beta.len() {
                // Points sharing beta too: they are identical in this frame,
                // impossible for distinct points; process singly.
                let u = by_beta[idx] as usize;
                let from_prev = fen.query(beta_rank[u]);
                let cand = match (from_prev, best_in_batch) {
                    (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
                    (Some(a), None) => Some(a),
                    (None, b) => b,
                };
                if let Some((_, v)) = cand {
                    let _ = g.add_edge(u, v as usize);
                }
                if best_in_batch.is_none() || proj[u] < best_in_batch.unwrap().0 {
                    best_in_batch = Some((proj[u], u as u32));
                }
                idx += 1;
            }
            for &u in batch {
                fen.update(beta_rank[u as usize], proj[u as usize], u);
            }
            batch_start = batch_end;
        }
    }
    Ok(g)
}

/// Fenwick tree over suffix minima of (value, id) keyed by rank.
struct SuffixMinFenwick {
    tree: Vec<(f64, u32)>,
    n: usize,
}

impl SuffixMinFenwick {
    fn new(n: usize) -> Self {
        SuffixMinFenwick {
            tree: vec![(f64::INFINITY, u32::MAX); n + 1],
            n,
        }
    }

    /// Min over ranks >= r (store reversed: position n - r).
    fn update(&mut self, rank: u32, value: f64, id: u32) {
        let mut i = self.n - rank as usize; // 1..=n
        while i <= self.n {
            if value < self.tree[i].0 {
                self.tree[i] = (value, id);
            }
            i += i & i.wrapping_neg();
        }
    }

    fn query(&self, rank: u32) -> Option<(f64, u32)> {
        let mut i = self.n - rank as usize;
        let mut best = (f64::INFINITY, u32::MAX);
        while i > 0 {
            if self.tree[i].0 < best.0 {
                best = self.tree[i];
            }
            i -= i & i.wrapping_neg();
        }
        (best.1 != u32::MAX).then_some(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::graph::all_pairs_stretch;

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
    fn cone_count_monotone() {
        let k1 = cones_for_stretch(0.5).unwrap();
        let k2 = cones_for_stretch(0.1).unwrap();
        let k3 = cones_for_stretch(0.01).unwrap();
        assert!(k1 >= 9 && k1 <= k2 && k2 <= k3);
    }

    #[test]
    fn theta_two_points() {
        let ps = PointSet::new(vec![Point::xy(0.0, 0.0), Point::xy(1.0, 2.0)]).unwrap();
        let g = theta_graph(&ps, 12).unwrap();
        assert_eq!(g.n_edges(), 1);
    }

    #[test]
    fn theta_stretch_random() {
        let mut rand = lcg(11);
        let pts: Vec<Point> = (0..300).map(|_| Point::xy(rand(), rand())).collect();
        let ps = PointSet::new(pts).unwrap();
        for eps in [0.5, 0.25] {
            let k = cones_for_stretch(eps).unwrap();
            let g = theta_graph(&ps, k).unwrap();
            let chk = all_pairs_stretch(&g, ps.len()).unwrap();
            assert!(
                chk.max_stretch <= 1.0 + eps,
                "eps {eps}, k {k}: stretch {}",
                chk.max_stretch
            );
            assert!(g.n_edges() <= k * ps.len());
        }
    }

    #[test]
    fn theta_stretch_grid_points() {
        // Aligned coordinates exercise the equal-alpha batches.
        let mut pts = Vec::new();
        for i in 0..15 {
            for j in 0..15 {
                pts.push(Point::xy(i as f64, j as f64));
            }
        }
        let ps = PointSet::new(pts).unwrap();
        let eps = 0.25;
        let k = cones_for_stretch(eps).unwrap();
        let g = theta_graph(&ps, k).unwrap();
        let chk = all_pairs_stretch(&g, ps.len()).unwrap();
        assert!(
            chk.max_stretch <= 1.0 + eps,
            "grid stretch {}",
            chk.max_stretch
        );
    }
}
