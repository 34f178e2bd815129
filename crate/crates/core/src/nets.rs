//! r-nets and r-covers: a quadratic greedy construction, a grid-bucketed
//! near-linear construction, and a cover-only validator/assigner.

use std::collections::HashMap;

use crate::error::{Result, SpannerError};
use crate::geometry::{dist_coords, PointSet};

/// A net or cover over (a subset of) a point set, together with the map from
/// every covered point to its covering net point.
///
/// Invariants: covering always (`dist(x, cover_of(x)) <= r`, `cover_of(p) = p`
/// for net points); packing (`pairwise net distances > r`) for nets produced
/// by [`greedy_net`] and [`grid_net`] but not for [`cover_only`] assignments.
#[derive(Debug, Clone)]
pub struct NetAssignment {
    pub radius: f64,
    pub net: Vec<usize>,
    pub cover_of: HashMap<usize, usize>,
}

impl NetAssignment {
    /// Brute-force validation of the covering property and, when
    /// `require_packing`, the packing property. `ids` are the points the
    /// assignment is supposed to cover.
    pub fn validate(&self, ps: &PointSet, ids: &[usize], require_packing: bool) -> Result<()> {
        for &id in ids {
            let Some(&c) = self.cover_of.get(&id) else {
                return Err(SpannerError::UncoveredPoint {
                    point: id,
                    radius: self.radius,
                });
            };
            let d = dist_coords(ps.point(id).coords(), ps.point(c).coords());
            if d > self.radius {
                return Err(SpannerError::UncoveredPoint {
                    point: id,
                    radius: self.radius,
                });
            }
        }
        for &p in &self.net {
            if self.cover_of.get(&p) != Some(&p) {
                return Err(SpannerError::invalid(
                    "net",
                    format!("net point {p} must cover itself"),
                ));
            }
        }
        if require_packing {
            for (a, &p) in self.net.iter().enumerate() {
                for &q in &self.net[a + 1..] {
                    let d = dist_coords(ps.point(p).coords(), ps.point(q).coords());
                    if d <= self.radius {
                        return Err(SpannerError::invalid(
                            "net",
                            format!("net points {p} and {q} violate packing: {d} <= {}", self.radius),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Greedy r-net in input order: a point joins the net iff it is farther than
/// `r` from every current net point; otherwise it is covered by the first
/// net point found within `r`.
pub fn greedy_net(ps: &PointSet, r: f64) -> Result<NetAssignment> {
    let ids: Vec<usize> = (0..ps.len()).collect();
    greedy_net_subset(ps, &ids, r)
}

/// [`greedy_net`] restricted to the given point ids.
pub fn greedy_net_subset(ps: &PointSet, ids: &[usize], r: f64) -> Result<NetAssignment> {
    check_radius(r)?;
    let mut net: Vec<usize> = Vec::new();
    let mut cover_of = HashMap::with_capacity(ids.len());
    for &id in ids {
        let p = ps.point(id).coords();
        let mut covered_by = None;
        for &q in &net {
            if dist_coords(p, ps.point(q).coords()) <= r {
                covered_by = Some(q);
                break;
            }
        }
        match covered_by {
            Some(q) => {
                cover_of.insert(id, q);
            }
            None => {
                net.push(id);
                cover_of.insert(id, id);
            }
        }
    }
    Ok(NetAssignment { radius: r, net, cover_of })
}

/// Grid-bucketed r-net: one bucket pass with cell size `r`; membership is
/// decided by scanning the 3^d neighboring cells for an existing net point
/// within `r`. Near-linear for bounded spread; same invariants and the same
/// input-order tie-breaking as [`greedy_net`], though the resulting net may
/// differ (both are maximal packings).
pub fn grid_net(ps: &PointSet, r: f64) -> Result<NetAssignment> {
    let ids: Vec<usize> = (0..ps.len()).collect();
    grid_net_subset(ps, &ids, r)
}

/// [`grid_net`] restricted to the given point ids.
pub fn grid_net_subset(ps: &PointSet, ids: &[usize], r: f64) -> Result<NetAssignment> {
    check_radius(r)?;
    let d = ps.dim();
    let mut net: Vec<usize> = Vec::new();
    let mut cover_of = HashMap::with_capacity(ids.len());
    // Cells hold net points only; half-open floor bucketing.
    let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let cell_of = |p: &[f64]| -> Vec<i64> { p.iter().map(|c| (c / r).floor() as i64).collect() };
    let mut offsets: Vec<Vec<i64>> = Vec::new();
    build_offsets(d, &mut vec![0; d], 0, &mut offsets);
    for &id in ids {
        let p = ps.point(id).coords();
        let cell = cell_of(p);
        let mut covered_by = None;
        'scan: for off in &offsets {
            let probe: Vec<i64> = cell.iter().zip(off).map(|(c, o)| c + o).collect();
            if let Some(members) = cells.get(&probe) {
                for &q in members {
                    if dist_coords(p, ps.point(q).coords()) <= r {
                        covered_by = Some(q);
                        break 'scan;
                    }
                }
            }
        }
        match covered_by {
            Some(q) => {
                cover_of.insert(id, q);
            }
            None => {
                net.push(id);
                cover_of.insert(id, id);
                cells.entry(cell).or_default().push(id);
            }
        }
    }
    Ok(NetAssignment { radius: r, net, cover_of })
}

fn build_offsets(d: usize, cur: &mut Vec<i64>, k: usize, out: &mut Vec<Vec<i64>>) {
    if k == d {
        out.push(cur.clone());
        return;
    }
    for o in -1..=1i64 {
        cur[k] = o;
        build_offsets(d, cur, k + 1, out);
    }
}

/// Cover assignment with given centers and no packing requirement: every
/// point maps to the first center within `r`; errors naming the first point
/// left uncovered.
pub fn cover_only(ps: &PointSet, centers: &[usize], r: f64) -> Result<NetAssignment> {
    check_radius(r)?;
    let mut cover_of = HashMap::with_capacity(ps.len());
    for id in 0..ps.len() {
        let p = ps.point(id).coords();
        if centers.contains(&id) {
            cover_of.insert(id, id);
            continue;
        }
        let hit = centers
            .iter()
            .find(|&&c| dist_coords(p, ps.point(c).coords()) <= r);
        match hit {
            Some(&c) => {
                cover_of.insert(id, c);
            }
            None => {
                return Err(SpannerError::UncoveredPoint {
                    point: id,
                    radius: r,
                })
            }
        }
    }
    Ok(NetAssignment {
        radius: r,
        net: centers.to_vec(),
        cover_of,
    })
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(SpannerError::invalid(
            "r",
            format!("radius must be positive and finite, got {r}"),
        ));
    }
    Ok(())
}
