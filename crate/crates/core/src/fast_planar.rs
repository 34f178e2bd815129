//! Near-linear-time planar construction for point sets of polynomially
//! bounded spread: instead of enumerating all point pairs, the level
//! machinery runs only on the edge set of a sparse base spanner, so the
//! total work scales with the base's edge count.
//!
//! Steps: (1) partition base-edge pairs into distance classes, (2) net each
//! class's endpoint set with the grid net, (3) locate only nonempty
//! subsquares by flooring endpoint coordinates, (4) run the band/bisector
//! single-source machinery per class. Serving every base edge within
//! `1 + 0.45 eps` on top of a `(1 + 0.4 eps)` base gives every point pair
//! stretch below `1 + eps`.

use std::collections::HashMap;
use std::time::Instant;

use crate::builder::Sink2;
use crate::error::{Result, SpannerError};
use crate::geometry::{bounding_square, PointSet};
use crate::graph::{mst, GeometricGraph, SpannerReport, VertexKind};
use crate::planar::{denormalize, finish_report, run_machinery, sample_pairs, Machinery};
use crate::theta::{cones_for_stretch, theta_graph};

/// Fraction of the stretch budget allocated to the base spanner; the level
/// machinery gets `MACHINERY_FRACTION` and the product stays under `1+eps`.
const BASE_FRACTION: f64 = 0.4;
const MACHINERY_FRACTION: f64 = 0.5;

/// A sparse non-Steiner base spanner plus construction statistics.
#[derive(Debug)]
pub struct BaseSpanner {
    pub graph: GeometricGraph,
    pub cones: usize,
    pub elapsed: f64,
    /// Max stretch over a seeded 1000-pair sample.
    pub sampled_stretch: f64,
}

/// Builds the non-Steiner `(1+eps)` base spanner (a theta-graph with the
/// cone count chosen from the stretch budget) and spot-checks its stretch on
/// a 1000-pair sample.
pub fn base_spanner(ps: &PointSet, eps: f64) -> Result<BaseSpanner> {
    if ps.dim() != 2 {
        return Err(SpannerError::WrongDimension {
            want: 2,
            got: ps.dim(),
        });
    }
    if !(eps > 0.0) {
        return Err(SpannerError::invalid("eps", "must be positive"));
    }
    let started = Instant::now();
    let cones = cones_for_stretch(eps)?;
    let graph = theta_graph(ps, cones)?;
    let elapsed = started.elapsed().as_secs_f64();
    let mut sampled_stretch = 1.0;
    if ps.len() >= 2 {
        let pairs = sample_pairs(ps.len(), 1000, 0xba5e);
        let chk = crate::graph::verify_stretch(&graph, &pairs, 1.0 + eps)?;
        sampled_stretch = chk.max_stretch;
    }
    Ok(BaseSpanner {
        graph,
        cones,
        elapsed,
        sampled_stretch,
    })
}

/// Near-linear Steiner spanner construction driven by base-spanner edges.
pub fn fast_build(ps: &PointSet, eps: f64) -> Result<(GeometricGraph, SpannerReport)> {
    fast_build_with(ps, eps, crate::planar::CALIBRATION_DEFAULT)
}

pub fn fast_build_with(
    ps: &PointSet,
    eps: f64,
    calibration: f64,
) -> Result<(GeometricGraph, SpannerReport)> {
    if ps.dim() != 2 {
        return Err(SpannerError::WrongDimension {
            want: 2,
            got: ps.dim(),
        });
    }
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(SpannerError::invalid(
            "eps",
            format!("must be in (0, 1/2], got {eps}"),
        ));
    }
    if ps.is_empty() {
        return Err(SpannerError::EmptyPointSet);
    }
    let started = Instant::now();
    let n = ps.len();
    if n <= 2 {
        let mut g = GeometricGraph::over(ps);
        if n == 2 {
            g.add_edge(0, 1)?;
        }
        let w = g.total_weight();
        let report = SpannerReport {
            algorithm: "fast-planar".into(),
            n_points: n,
            eps,
            max_stretch: 1.0,
            worst_pair: None,
            total_weight: w,
            mst_weight: w,
            lightness: 1.0,
            n_edges: g.n_edges(),
            n_steiner: 0,
            elapsed: started.elapsed().as_secs_f64(),
            exhaustive_check: true,
        };
        return Ok((g, report));
    }

    let base = base_spanner(ps, BASE_FRACTION * eps)?;

    // The closest pair is always a base-spanner edge (any path of two or
    // more edges between the closest pair would already be too long), so the
    // minimum edge weight is the minimum pairwise distance.
    let dmin = base
        .graph
        .edges()
        .iter()
        .map(|e| e.2)
        .fold(f64::INFINITY, f64::min);
    let bb = bounding_square(ps)?;
    let origin = bb.origin.coords().to_vec();
    let coords: Vec<[f64; 2]> = ps
        .iter()
        .map(|p| {
            [
                (p.coords()[0] - origin[0]) / dmin,
                (p.coords()[1] - origin[1]) / dmin,
            ]
        })
        .collect();
    let mut pairs: Vec<(f64, u32, u32)> = base
        .graph
        .edges()
        .iter()
        .map(|&(u, v, w)| (w / dmin, u, v))
        .collect();

    let mut g = GeometricGraph::new(2);
    for c in &coords {
        g.add_vertex(c, VertexKind::Original);
    }
    let mut intern = HashMap::new();
    Sink2::preload(&g, &mut intern);
    let m = Machinery::new(MACHINERY_FRACTION * eps, calibration);
    let stats = run_machinery(&coords, &mut pairs, &mut g, &mut intern, &m)?;
    // Eq-(6)-style budget: endpoint sets never exceed twice the base edges.
    assert!(
        stats.sum_endpoint_sets <= 2 * base.graph.n_edges(),
        "endpoint-set budget violated: {} > 2 * {}",
        stats.sum_endpoint_sets,
        base.graph.n_edges()
    );
    let mst_graph = mst(ps)?;
    let mst_weight = mst_graph.total_weight();
    let elapsed = started.elapsed().as_secs_f64();

    let out = denormalize(ps, &g, dmin, &origin);
    let mut report = finish_report("fast-planar", ps, &out, eps, mst_weight, elapsed)?;
    report.elapsed = elapsed;
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::planar::build_planar_spanner;

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed;
        move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    fn uniform(n: usize, seed: u64) -> PointSet {
        let mut rand = lcg(seed);
        PointSet::new((0..n).map(|_| Point::xy(rand(), rand())).collect()).unwrap()
    }

    #[test]
    fn two_points_single_edge() {
        let ps = PointSet::new(vec![Point::xy(0.0, 0.0), Point::xy(2.0, 1.0)]).unwrap();
        let (g, report) = fast_build(&ps, 0.25).unwrap();
        assert_eq!(g.n_edges(), 1);
        assert_eq!(report.lightness, 1.0);
    }

    #[test]
    fn base_spanner_grid_edge_budget() {
        // 10^3 grid points: the edge count stays well under the coarse
        // eps^-2 n log n budget.
        let mut pts = Vec::new();
        for i in 0..32 {
            for j in 0..32 {
                pts.push(Point::xy(i as f64, j as f64));
            }
        }
        let ps = PointSet::new(pts).unwrap();
        let eps = 0.5;
        let base = base_spanner(&ps, eps).unwrap();
        let n = ps.len() as f64;
        let budget = n / (eps * eps) * n.log2();
        assert!((base.graph.n_edges() as f64) <= budget);
        assert!(base.sampled_stretch <= 1.0 + eps);
    }

    #[test]
    fn base_spanner_sampled_stretch() {
        let ps = uniform(2000, 5);
        let base = base_spanner(&ps, 0.5).unwrap();
        assert!(base.sampled_stretch <= 1.5, "got {}", base.sampled_stretch);
    }

    #[test]
    fn fast_build_small_instances_exact() {
        for (n, seed) in [(60usize, 1u64), (150, 2)] {
            let ps = uniform(n, seed);
            for eps in [0.5, 0.25] {
                let (_, report) = fast_build(&ps, eps).unwrap();
                assert!(
                    report.max_stretch <= 1.0 + eps,
                    "n={n} eps={eps}: stretch {}",
                    report.max_stretch
                );
            }
        }
    }

    #[test]
    fn fast_build_agrees_with_planar() {
        let ps = uniform(120, 3);
        let eps = 0.25;
        let (_, fast) = fast_build(&ps, eps).unwrap();
        let (_, slow) = build_planar_spanner(&ps, eps).unwrap();
        assert!(fast.max_stretch <= 1.0 + eps);
        assert!(slow.max_stretch <= 1.0 + eps);
        let ratio = fast.lightness / slow.lightness;
        assert!(
            (1.0 / 3.0..=3.0).contains(&ratio),
            "lightness ratio {ratio} out of range"
        );
    }

    #[test]
    fn rejects_non_planar_input() {
        let ps = PointSet::new(vec![
            Point::xyz(0.0, 0.0, 0.0),
            Point::xyz(1.0, 0.0, 0.0),
        ])
        .unwrap();
        assert!(matches!(
            fast_build(&ps, 0.25),
            Err(SpannerError::WrongDimension { .. })
        ));
    }
}
