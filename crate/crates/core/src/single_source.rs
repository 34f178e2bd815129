//! Shallow-light trees and single-source spanners, the 2-D workhorses.
//!
//! `build_slt` connects a source to points on a nearby segment with constant
//! total weight and per-target stretch `1 + eps`. `build_sss_unit` preserves
//! distances from a source to a target set inside a small disc up to
//! `1 + 13 eps` with constant weight, given a host spanner among the targets;
//! `build_sss_scaled` lifts the unit recipe to arbitrary disc radii by
//! covering the disc with unit-recipe discs.

use std::collections::HashMap;

use crate::builder::Sink2;
use crate::error::{Result, SpannerError};
use crate::geometry::{dist_coords, Point};
use crate::graph::{GeometricGraph, VertexKind};

/// Instance for the shallow-light tree: a source, a segment, and targets on
/// that segment. After normalizing by `d(source, segment)` the segment is
/// expected to have length at most `sqrt(eps)`.
#[derive(Debug, Clone)]
pub struct SltInstance {
    pub source: Point,
    pub seg_a: Point,
    pub seg_b: Point,
    pub targets: Vec<Point>,
    pub eps: f64,
}

/// Single-source spanner instance at unit scale: targets inside the disc
/// `B(center, radius)` with `radius <= sqrt(eps) * d(source, disc)`, plus the
/// quality `g` of the host spanner over the targets. The host itself is not
/// consumed by the construction; it only enters verification, where stretch
/// is measured on `H ∪ S_X`.
#[derive(Debug, Clone)]
pub struct SssInstance {
    pub source: Point,
    pub center: Point,
    pub radius: f64,
    pub targets: Vec<Point>,
    pub host_quality_g: f64,
    pub eps: f64,
}

/// Scaled instance: disc radius `sqrt(eps) * l_scale` observed from distance
/// `l_scale / h`.
#[derive(Debug, Clone)]
pub struct SssScaledInstance {
    pub source: Point,
    pub center: Point,
    pub radius: f64,
    pub l_scale: f64,
    pub h: f64,
    pub targets: Vec<Point>,
    pub host_quality_g: f64,
    pub eps: f64,
}

impl SssScaledInstance {
    /// Derives `l_scale` and `h` from the geometry: `l_scale = radius /
    /// sqrt(eps)`, `h = l_scale / d(source, disc)`.
    pub fn from_geometry(
        source: Point,
        center: Point,
        radius: f64,
        targets: Vec<Point>,
        host_quality_g: f64,
        eps: f64,
    ) -> Result<Self> {
        let d = dist_coords(source.coords(), center.coords()) - radius;
        if !(d > 0.0) {
            return Err(SpannerError::invalid(
                "source",
                "source must lie strictly outside the disc",
            ));
        }
        let l_scale = radius / eps.sqrt();
        Ok(SssScaledInstance {
            source,
            center,
            radius,
            l_scale,
            h: l_scale / d,
            targets,
            host_quality_g,
            eps,
        })
    }
}

/// Output of `build_sss_unit`, carrying enough structure for the grid-corner
/// checks: `wk` is the `W ∪ K` part of `H` (columns plus the tree to the near
/// side, without the corner-to-target hookups) over the same vertex ids.
#[derive(Debug)]
pub struct SssOutput {
    pub graph: GeometricGraph,
    pub wk: GeometricGraph,
    /// Vertex ids (valid in both graphs) of the used cell corners.
    pub used_corners: Vec<usize>,
    pub grid_weight: f64,
    pub slt_weight: f64,
}

#[derive(Debug)]
pub struct SssScaledOutput {
    pub graph: GeometricGraph,
    /// Number of covering-disc sub-instances actually built.
    pub sub_instances: usize,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 0.25) {
        return Err(SpannerError::invalid(
            "eps",
            format!("must be in (0, 1/4], got {eps}"),
        ));
    }
    Ok(())
}

fn check_host_quality(g: f64, eps: f64) -> Result<()> {
    if !(g >= 0.0) || g > 1.0 / (100.0 * eps) {
        return Err(SpannerError::invalid(
            "host_quality_g",
            format!("need 0 <= g <= 1/(100 eps); got g = {g} at eps = {eps}"),
        ));
    }
    Ok(())
}

/// Builds the shallow-light tree for the instance: a graph containing the
/// source and all targets in which every target is reached within stretch
/// `1 + eps`, of total weight bounded by a constant multiple of
/// `d(source, segment)`.
pub fn build_slt(inst: &SltInstance) -> Result<GeometricGraph> {
    check_eps(inst.eps)?;
    for p in [&inst.source, &inst.seg_a, &inst.seg_b] {
        if p.dim() != 2 {
            return Err(SpannerError::WrongDimension {
                want: 2,
                got: p.dim(),
            });
        }
    }
    let mut g = GeometricGraph::new(2);
    let mut intern = HashMap::new();
    let mut sink = Sink2::new(&mut g, &mut intern);
    let targets: Vec<([f64; 2], VertexKind)> = inst
        .targets
        .iter()
        .map(|t| ([t.coords()[0], t.coords()[1]], VertexKind::Original))
        .collect();
    build_slt_into(
        &mut sink,
        [inst.source.coords()[0], inst.source.coords()[1]],
        VertexKind::Original,
        [inst.seg_a.coords()[0], inst.seg_a.coords()[1]],
        [inst.seg_b.coords()[0], inst.seg_b.coords()[1]],
        &targets,
        inst.eps,
        true,
    )?;
    Ok(g)
}

/// Height profile of the splitting tree: level j sits at `h/2 * 2^(-3j/2)`
/// above the segment. Geometric decay in both the per-level height and the
/// per-level horizontal jump keeps the total detour below `0.7 * eps * h`
/// while the total weight stays a constant multiple of `h`.
fn slt_height(h: f64, level: u32) -> f64 {
    0.5 * h * (2f64).powf(-1.5 * level as f64)
}

pub(crate) fn build_slt_into(
    sink: &mut Sink2,
    source: [f64; 2],
    source_kind: VertexKind,
    seg_a: [f64; 2],
    seg_b: [f64; 2],
    targets: &[([f64; 2], VertexKind)],
    _eps: f64,
    validate: bool,
) -> Result<usize> {
    let ex = [seg_b[0] - seg_a[0], seg_b[1] - seg_a[1]];
    let s = (ex[0] * ex[0] + ex[1] * ex[1]).sqrt();
    if !(s > 0.0) {
        return Err(SpannerError::invalid("segment", "must have positive length"));
    }
    let ex = [ex[0] / s, ex[1] / s];
    let mut ey = [-ex[1], ex[0]];
    let rel = [source[0] - seg_a[0], source[1] - seg_a[1]];
    let mut h = rel[0] * ey[0] + rel[1] * ey[1];
    if h < 0.0 {
        ey = [-ey[0], -ey[1]];
        h = -h;
    }
    if !(h > 0.0) {
        return Err(SpannerError::invalid(
            "source",
            "must not lie on the segment's supporting line",
        ));
    }

    // Params along the segment; targets must lie on it.
    let mut param = Vec::with_capacity(targets.len());
    for (i, (t, _)) in targets.iter().enumerate() {
        let r = [t[0] - seg_a[0], t[1] - seg_a[1]];
        let off = r[0] * ey[0] + r[1] * ey[1];
        let u = r[0] * ex[0] + r[1] * ex[1];
        if validate {
            let tol = 1e-9 * h.max(s);
            if off.abs() > tol || u < -tol || u > s + tol {
                return Err(SpannerError::TargetOffSegment {
                    index: i,
                    offset: off.abs().max((-u).max(u - s).max(0.0)),
                });
            }
        }
        param.push(u.clamp(0.0, s));
    }

    let p_id = sink.vertex(source[0], source[1], source_kind);
    let target_ids: Vec<usize> = targets
        .iter()
        .map(|(t, k)| sink.vertex(t[0], t[1], *k))
        .collect();
    match targets.len() {
        0 => return Ok(p_id),
        1 => {
            sink.edge(p_id, target_ids[0]);
            return Ok(p_id);
        }
        _ => {}
    }

    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by(|&a, &b| param[a].total_cmp(&param[b]).then(a.cmp(&b)));

    let world = |u: f64, v: f64| -> (f64, f64) {
        (
            seg_a[0] + u * ex[0] + v * ey[0],
            seg_a[1] + u * ex[1] + v * ey[1],
        )
    };

    // Recursive dyadic splitting of the segment; a subtree node exists only
    // for intervals holding two or more targets. Single targets hook
    // directly to their parent node.
    struct Rec<'s> {
        param: &'s [f64],
        target_ids: &'s [usize],
        h: f64,
        min_len: f64,
    }
    fn place(
        rec: &Rec,
        sink: &mut Sink2,
        world: &dyn Fn(f64, f64) -> (f64, f64),
        lo: f64,
        hi: f64,
        level: u32,
        members: &[usize],
    ) -> usize {
        let mid = 0.5 * (lo + hi);
        let y = slt_height(rec.h, level);
        let (wx, wy) = world(mid, y);
        let node = sink.vertex(wx, wy, VertexKind::Steiner);
        if hi - lo < rec.min_len || y < rec.min_len {
            // Degenerate cluster: hook everything up directly.
            for &m in members {
                sink.edge(node, rec.target_ids[m]);
            }
            return node;
        }
        let split = members.partition_point(|&m| rec.param[m] < mid);
        for side in [&members[..split], &members[split..]] {
            match side.len() {
                0 => {}
                1 => sink.edge(node, rec.target_ids[side[0]]),
                _ => {
                    let (clo, chi) = if std::ptr::eq(side.as_ptr(), members.as_ptr()) {
                        (lo, mid)
                    } else {
                        (mid, hi)
                    };
                    let child = place(rec, sink, world, clo, chi, level + 1, side);
                    sink.edge(node, child);
                }
            }
        }
        node
    }

    let rec = Rec {
        param: &param,
        target_ids: &target_ids,
        h,
        min_len: s * 1e-12,
    };
    let root = place(&rec, sink, &world, 0.0, s, 0, &order);
    sink.edge(p_id, root);
    Ok(p_id)
}

/// Builds the unit-scale single-source spanner following the grid-and-tree
/// recipe: a cell grid over the square bounding the disc, one hookup edge per
/// nonempty cell from its lexicographically smallest corner to one target in
/// the cell, vertical columns from used corners down to the near side, and a
/// shallow-light tree from the source to the used grid points on that side.
pub fn build_sss_unit(inst: &SssInstance) -> Result<SssOutput> {
    check_eps(inst.eps)?;
    check_host_quality(inst.host_quality_g, inst.eps)?;
    build_sss_unit_impl(inst, true)
}

fn build_sss_unit_impl(inst: &SssInstance, validate: bool) -> Result<SssOutput> {
    let p = [inst.source.coords()[0], inst.source.coords()[1]];
    let c = [inst.center.coords()[0], inst.center.coords()[1]];
    let targets: Vec<[f64; 2]> = inst
        .targets
        .iter()
        .map(|t| [t.coords()[0], t.coords()[1]])
        .collect();
    if validate {
        let d = dist_coords(&p, &c) - inst.radius;
        if !(d > 0.0) {
            return Err(SpannerError::invalid(
                "source",
                "must lie strictly outside the disc",
            ));
        }
        if inst.radius > inst.eps.sqrt() * d * (1.0 + 1e-9) {
            return Err(SpannerError::invalid(
                "radius",
                format!(
                    "unit recipe needs radius <= sqrt(eps) * d(source, disc); {} > {}",
                    inst.radius,
                    inst.eps.sqrt() * d
                ),
            ));
        }
        for (i, t) in targets.iter().enumerate() {
            let excess = dist_coords(t, &c) - inst.radius;
            if excess > 1e-9 * inst.radius.max(1.0) {
                return Err(SpannerError::TargetOutsideDisc { index: i, excess });
            }
        }
    }

    let mut g = GeometricGraph::new(2);
    let mut intern = HashMap::new();
    let mut wk_edges: Vec<(u32, u32)> = Vec::new();
    let mut corners = Vec::new();
    let mut grid_weight = 0.0;
    let mut slt_weight = 0.0;
    {
        let mut sink = Sink2::new(&mut g, &mut intern);
        let tv: Vec<([f64; 2], VertexKind)> = targets
            .iter()
            .map(|t| (*t, VertexKind::Original))
            .collect();
        build_sss_unit_into(
            &mut sink,
            p,
            VertexKind::Original,
            c,
            inst.radius,
            &tv,
            inst.eps,
            Some(&mut SssTrace {
                wk_edges: &mut wk_edges,
                corners: &mut corners,
                grid_weight: &mut grid_weight,
                slt_weight: &mut slt_weight,
            }),
        )?;
    }
    // Materialize W ∪ K over the same vertex ids.
    let mut wk = GeometricGraph::new(2);
    for v in 0..g.n_vertices() {
        let p = g.point(v);
        wk.add_vertex(p, g.kind(v));
    }
    for &(u, v) in &wk_edges {
        wk.add_edge(u as usize, v as usize)?;
    }
    Ok(SssOutput {
        graph: g,
        wk,
        used_corners: corners,
        grid_weight,
        slt_weight,
    })
}

pub(crate) struct SssTrace<'a> {
    pub wk_edges: &'a mut Vec<(u32, u32)>,
    pub corners: &'a mut Vec<usize>,
    pub grid_weight: &'a mut f64,
    pub slt_weight: &'a mut f64,
}

/// Internal unit-recipe builder writing into a shared sink. `targets` carry
/// their exact world coordinates so interning identifies them with vertices
/// already present in the sink.
pub(crate) fn build_sss_unit_into(
    sink: &mut Sink2,
    p: [f64; 2],
    p_kind: VertexKind,
    center: [f64; 2],
    radius: f64,
    targets: &[([f64; 2], VertexKind)],
    eps: f64,
    mut trace: Option<&mut SssTrace>,
) -> Result<()> {
    let p_id = sink.vertex(p[0], p[1], p_kind);

    if targets.len() == 1 {
        // A single edge is a perfect single-source spanner.
        let t = sink.vertex(targets[0].0[0], targets[0].0[1], targets[0].1);
        sink.edge(p_id, t);
        return Ok(());
    }

    // Rotated frame: v-axis from p through the disc center.
    let pc = [center[0] - p[0], center[1] - p[1]];
    let pc_len = (pc[0] * pc[0] + pc[1] * pc[1]).sqrt();
    if !(pc_len > radius) {
        return Err(SpannerError::invalid(
            "source",
            "must lie strictly outside the disc",
        ));
    }
    let vhat = [pc[0] / pc_len, pc[1] / pc_len];
    let uhat = [-vhat[1], vhat[0]];
    let frame = |q: &[f64; 2]| -> (f64, f64) {
        let r = [q[0] - p[0], q[1] - p[1]];
        (r[0] * uhat[0] + r[1] * uhat[1], r[0] * vhat[0] + r[1] * vhat[1])
    };
    let world = |u: f64, v: f64| -> (f64, f64) {
        (p[0] + u * uhat[0] + v * vhat[0], p[1] + u * uhat[1] + v * vhat[1])
    };
    let d_near = pc_len - radius; // v-coordinate of the near side L
    let cell = eps * d_near;

    if targets.is_empty() {
        // Degenerate grid: keep the tree to the near side's endpoints so the
        // output still carries the K part.
        let (ax, ay) = world(-radius, d_near);
        let (bx, by) = world(radius, d_near);
        let before = sink.g.total_weight();
        build_slt_into(
            sink,
            p,
            p_kind,
            [ax, ay],
            [bx, by],
            &[
                ([ax, ay], VertexKind::Steiner),
                ([bx, by], VertexKind::Steiner),
            ],
            eps,
            false,
        )?;
        if let Some(t) = trace.as_deref_mut() {
            *t.slt_weight += sink.g.total_weight() - before;
        }
        return Ok(());
    }

    // Bucket targets into grid cells (clamped half-open bucketing over the
    // bounding square of the disc).
    let ncells = ((2.0 * radius / cell) - 1e-12).ceil().max(1.0) as i64;
    let mut cells: HashMap<(i64, i64), usize> = HashMap::new(); // cell -> first target
    for (i, (t, _)) in targets.iter().enumerate() {
        let (u, v) = frame(t);
        let col = (((u + radius) / cell).floor() as i64).clamp(0, ncells - 1);
        let row = (((v - d_near) / cell).floor() as i64).clamp(0, ncells - 1);
        cells.entry((col, row)).or_insert(i);
    }
    let mut used: Vec<((i64, i64), usize)> = cells.into_iter().collect();
    used.sort_unstable_by_key(|&(c, _)| c);

    // Corner of cell (col,row): its lexicographically smallest corner in
    // frame coordinates.
    let corner_uv = |col: i64, row: i64| (col as f64 * cell - radius, d_near + row as f64 * cell);

    // W1 hookups and column bookkeeping.
    let mut col_rows: HashMap<i64, Vec<i64>> = HashMap::new();
    for &((col, row), ti) in &used {
        let (cu, cv) = corner_uv(col, row);
        let (wx, wy) = world(cu, cv);
        let z = sink.vertex(wx, wy, VertexKind::Steiner);
        let t = sink.vertex(targets[ti].0[0], targets[ti].0[1], targets[ti].1);
        sink.edge(z, t);
        if let Some(tr) = trace.as_deref_mut() {
            tr.corners.push(z);
        }
        col_rows.entry(col).or_default().push(row);
    }

    // Vertical columns: for each used column, a collinear chain through the
    // used corner rows down to the near side. Chains keep d_W(z, y) exactly
    // ||z, y|| while the per-column weight is just the top corner's height.
    let mut cols: Vec<(i64, Vec<i64>)> = col_rows.into_iter().collect();
    cols.sort_unstable_by_key(|&(c, _)| c);
    let mut side_targets: Vec<([f64; 2], VertexKind)> = Vec::new();
    let before_w = sink.g.total_weight();
    for (col, mut rows) in cols {
        rows.push(0);
        rows.sort_unstable();
        rows.dedup();
        let mut prev: Option<usize> = None;
        for &row in &rows {
            let (u, v) = corner_uv(col, row);
            let (wx, wy) = world(u, v);
            let id = sink.vertex(wx, wy, VertexKind::Steiner);
            if let Some(pv) = prev {
                sink.edge(pv, id);
                if let Some(tr) = trace.as_deref_mut() {
                    tr.wk_edges.push((pv as u32, id as u32));
                }
            }
            prev = Some(id);
        }
        let (u0, v0) = corner_uv(col, 0);
        let (wx, wy) = world(u0, v0);
        side_targets.push(([wx, wy], VertexKind::Steiner));
    }
    if let Some(tr) = trace.as_deref_mut() {
        *tr.grid_weight += sink.g.total_weight() - before_w;
    }

    // K: shallow-light trees from p to the used grid points on the near
    // side, one per half so each instance meets the segment-length contract
    // (half side length = radius <= sqrt(eps) * d_near).
    let (mid_x, mid_y) = world(0.0, d_near);
    let before_k = sink.g.total_weight();
    for half in 0..2 {
        let (end_u, _lo_u, _hi_u) = if half == 0 {
            (-radius, -radius, 0.0f64)
        } else {
            (radius, 0.0, radius)
        };
        let members: Vec<([f64; 2], VertexKind)> = side_targets
            .iter()
            .filter(|(t, _)| {
                let (u, _) = frame(t);
                if half == 0 {
                    u < 0.0
                } else {
                    u >= 0.0
                }
            })
            .cloned()
            .collect();
        
        if members.is_empty() {
            continue;
        }
        let (ex, ey) = world(end_u, d_near);
        let mut log: Vec<(u32, u32)> = Vec::new();
        {
            let mut logged = Sink2 {
                g: sink.g,
                intern: sink.intern,
                log: Some(&mut log),
            };
            build_slt_into(
                &mut logged,
                p,
                p_kind,
                [mid_x, mid_y],
                [ex, ey],
                &members,
                eps,
                false,
            )?;
        }
        if let Some(tr) = trace.as_deref_mut() {
            tr.wk_edges.extend_from_slice(&log);
        }
    }
    if let Some(tr) = trace.as_deref_mut() {
        *tr.slt_weight += sink.g.total_weight() - before_k;
    }
    Ok(())
}

/// Builds the scaled single-source spanner: when the disc already satisfies
/// the unit precondition it is handled directly, otherwise it is covered by
/// a square lattice of unit-recipe discs (empty ones skipped) and the unit
/// construction runs per covering disc.
pub fn build_sss_scaled(inst: &SssScaledInstance) -> Result<SssScaledOutput> {
    check_eps(inst.eps)?;
    check_host_quality(inst.host_quality_g, inst.eps)?;
    let p = [inst.source.coords()[0], inst.source.coords()[1]];
    let c = [inst.center.coords()[0], inst.center.coords()[1]];
    let d = dist_coords(&p, &c) - inst.radius;
    if !(d > 0.0) {
        return Err(SpannerError::invalid(
            "source",
            "must lie strictly outside the disc",
        ));
    }
    for (i, t) in inst.targets.iter().enumerate() {
        let excess = dist_coords(t.coords(), &c) - inst.radius;
        if excess > 1e-9 * inst.radius.max(1.0) {
            return Err(SpannerError::TargetOutsideDisc { index: i, excess });
        }
    }
    let mut g = GeometricGraph::new(2);
    let mut intern = HashMap::new();
    let mut sink = Sink2::new(&mut g, &mut intern);
    let targets: Vec<([f64; 2], VertexKind)> = inst
        .targets
        .iter()
        .map(|t| ([t.coords()[0], t.coords()[1]], VertexKind::Original))
        .collect();
    let subs = build_sss_scaled_into(
        &mut sink,
        p,
        VertexKind::Original,
        c,
        inst.radius,
        &targets,
        inst.eps,
    )?;
    Ok(SssScaledOutput {
        graph: g,
        sub_instances: subs,
    })
}

/// Internal scaled builder; returns the number of unit sub-instances built.
pub(crate) fn build_sss_scaled_into(
    sink: &mut Sink2,
    p: [f64; 2],
    p_kind: VertexKind,
    center: [f64; 2],
    radius: f64,
    targets: &[([f64; 2], VertexKind)],
    eps: f64,
) -> Result<usize> {
    if targets.is_empty() {
        sink.vertex(p[0], p[1], p_kind);
        return Ok(0);
    }
    if targets.len() == 1 {
        let pid = sink.vertex(p[0], p[1], p_kind);
        let t = sink.vertex(targets[0].0[0], targets[0].0[1], targets[0].1);
        sink.edge(pid, t);
        return Ok(1);
    }
    let d = dist_coords(&p, &center) - radius;
    let sq = eps.sqrt();
    if radius <= sq * d * (1.0 + 1e-9) {
        build_sss_unit_into(sink, p, p_kind, center, radius, targets, eps, None)?;
        return Ok(1);
    }
    // Covering lattice: pitch r_cov * sqrt(2) so every point of a lattice
    // cell lies within r_cov of the cell center; alpha keeps every
    // sub-instance inside the unit-recipe precondition.
    let alpha = 1.0 / (1.0 + 2.0 * sq + 0.01);
    let r_cov = alpha * sq * d;
    let pitch = r_cov * std::f64::consts::SQRT_2 * (1.0 - 1e-9);
    // Cells are centered so that the disc center is a cell midpoint; a
    // cluster at the center then occupies a single covering disc.
    let mut groups: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, (t, _)) in targets.iter().enumerate() {
        let gx = ((t[0] - center[0]) / pitch + 0.5).floor() as i64;
        let gy = ((t[1] - center[1]) / pitch + 0.5).floor() as i64;
        groups.entry((gx, gy)).or_default().push(i);
    }
    let mut keys: Vec<(i64, i64)> = groups.keys().copied().collect();
    keys.sort_unstable();
    let mut built = 0usize;
    for key in keys {
        let ids = &groups[&key];
        let sub_center = [
            center[0] + key.0 as f64 * pitch,
            center[1] + key.1 as f64 * pitch,
        ];
        let sub_targets: Vec<([f64; 2], VertexKind)> =
            ids.iter().map(|&i| targets[i]).collect();
        let d_sub = dist_coords(&p, &sub_center) - r_cov;
        debug_assert!(
            r_cov <= sq * d_sub * (1.0 + 1e-6),
            "covering disc violates the unit precondition"
        );
        if sub_targets.len() == 1 {
            let pid = sink.vertex(p[0], p[1], p_kind);
            let t = sink.vertex(sub_targets[0].0[0], sub_targets[0].0[1], sub_targets[0].1);
            sink.edge(pid, t);
        } else {
            build_sss_unit_into(sink, p, p_kind, sub_center, r_cov, &sub_targets, eps, None)?;
        }
        built += 1;
    }
    Ok(built)
}
