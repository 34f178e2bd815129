//! Euclidean primitives: points, point sets, spread, bounding squares and
//! uniform grid indexing.
//!
//! Coordinates are plain `f64`; geometric predicates compare computed values
//! exactly. Every construction in this crate tolerates constant-factor slack,
//! so no epsilon fudging is applied at this layer.

use std::collections::HashMap;

use crate::error::{Result, SpannerError};

/// A point in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(SpannerError::invalid("coords", "dimension must be >= 1"));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(SpannerError::invalid(
                "coords",
                format!("non-finite coordinate {c}"),
            ));
        }
        Ok(Point { coords })
    }

    /// 2-D convenience constructor.
    pub fn xy(x: f64, y: f64) -> Self {
        Point { coords: vec![x, y] }
    }

    /// 3-D convenience constructor.
    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Point {
            coords: vec![x, y, z],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Euclidean distance between two points.
///
/// Symmetric, zero iff the points coincide; errors on dimension mismatch.
pub fn dist(p: &Point, q: &Point) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(SpannerError::DimensionMismatch(p.dim(), q.dim()));
    }
    Ok(dist_coords(p.coords(), q.coords()))
}

/// Distance between coordinate slices of equal length.
#[inline]
pub fn dist_coords(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    let mut s = 0.0;
    for (a, b) in p.iter().zip(q) {
        let d = a - b;
        s += d * d;
    }
    s.sqrt()
}

/// An ordered, duplicate-free set of points sharing one dimension.
#[derive(Debug, Clone)]
pub struct PointSet {
    points: Vec<Point>,
    dim: usize,
}

impl PointSet {
    /// Validates dimensions and rejects exactly coincident points.
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(SpannerError::EmptyPointSet);
        };
        let dim = first.dim();
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(SpannerError::DimensionMismatch(dim, p.dim()));
            }
            let _ = i;
        }
        // Exact duplicates are detected through coordinate bit patterns.
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            let key: Vec<u64> = p.coords().iter().map(|c| c.to_bits()).collect();
            if let Some(&j) = seen.get(&key) {
                return Err(SpannerError::DuplicatePoint(j, i));
            }
            seen.insert(key, i);
        }
        Ok(PointSet { points, dim })
    }

    pub fn from_coords(dim: usize, flat: &[f64]) -> Result<Self> {
        if dim == 0 || flat.len() % dim != 0 {
            return Err(SpannerError::invalid(
                "flat",
                "length must be a positive multiple of dim",
            ));
        }
        let points = flat
            .chunks(dim)
            .map(|c| Point::new(c.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> {
        self.points.iter()
    }
}

/// Ratio of the largest to the smallest pairwise distance.
pub fn spread(ps: &PointSet) -> Result<f64> {
    let (min, max) = min_max_pairwise(ps)?;
    Ok(max / min)
}

/// Smallest and largest pairwise distances by an O(n^2) scan.
pub fn min_max_pairwise(ps: &PointSet) -> Result<(f64, f64)> {
    if ps.len() < 2 {
        return Err(SpannerError::TooFewPoints {
            need: 2,
            got: ps.len(),
        });
    }
    let mut min = f64::INFINITY;
    let mut max: f64 = 0.0;
    for i in 0..ps.len() {
        for j in (i + 1)..ps.len() {
            let d = dist_coords(ps.point(i).coords(), ps.point(j).coords());
            min = min.min(d);
            max = max.max(d);
        }
    }
    Ok((min, max))
}

/// Axis-aligned hypercube given by its low corner and side length.
#[derive(Debug, Clone)]
pub struct BoundingSquare {
    pub origin: Point,
    pub side: f64,
}

impl BoundingSquare {
    /// Closed containment check.
    pub fn contains(&self, p: &Point) -> bool {
        p.coords()
            .iter()
            .zip(self.origin.coords())
            .all(|(c, o)| *c >= *o && *c <= *o + self.side)
    }
}

/// Smallest axis-aligned hypercube containing the set: low corner at the
/// coordinate-wise minimum, side equal to the largest per-axis range.
pub fn bounding_square(ps: &PointSet) -> Result<BoundingSquare> {
    if ps.is_empty() {
        return Err(SpannerError::EmptyPointSet);
    }
    let d = ps.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in ps.iter() {
        for (a, c) in p.coords().iter().enumerate() {
            lo[a] = lo[a].min(*c);
            hi[a] = hi[a].max(*c);
        }
    }
    let side = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| h - l)
        .fold(0.0f64, f64::max);
    Ok(BoundingSquare {
        origin: Point::new(lo)?,
        side,
    })
}

/// Uniform grid over `R^d` with half-open, low-inclusive cells
/// `[origin + c*cell_size, origin + (c+1)*cell_size)`.
#[derive(Debug, Clone)]
pub struct GridIndex {
    origin: Point,
    cell_size: f64,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl GridIndex {
    pub fn new(origin: Point, cell_size: f64) -> Result<Self> {
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(SpannerError::invalid(
                "cell_size",
                format!("must be positive and finite, got {cell_size}"),
            ));
        }
        Ok(GridIndex {
            origin,
            cell_size,
            buckets: HashMap::new(),
        })
    }

    /// Builds the index over a whole point set, anchored at its bounding
    /// square's low corner.
    pub fn build(ps: &PointSet, cell_size: f64) -> Result<Self> {
        let bb = bounding_square(ps)?;
        let mut g = GridIndex::new(bb.origin, cell_size)?;
        for (i, p) in ps.iter().enumerate() {
            g.insert(i, p)?;
        }
        Ok(g)
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn origin(&self) -> &Point {
        &self.origin
    }

    pub fn insert(&mut self, id: usize, p: &Point) -> Result<()> {
        let cell = self.cell_of(p)?;
        self.buckets.entry(cell).or_default().push(id);
        Ok(())
    }

    /// Component-wise `floor((p - origin) / cell_size)`.
    pub fn cell_of(&self, p: &Point) -> Result<Vec<i64>> {
        if p.dim() != self.origin.dim() {
            return Err(SpannerError::DimensionMismatch(self.origin.dim(), p.dim()));
        }
        Ok(p.coords()
            .iter()
            .zip(self.origin.coords())
            .map(|(c, o)| ((c - o) / self.cell_size).floor() as i64)
            .collect())
    }

    pub fn bucket(&self, cell: &[i64]) -> &[usize] {
        self.buckets.get(cell).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Ids in the 3^d neighborhood of `cell` (the cell itself included).
    pub fn neighborhood(&self, cell: &[i64]) -> Vec<usize> {
        let d = cell.len();
        let mut out = Vec::new();
        let mut offsets = vec![-1i64; d];
        loop {
            let probe: Vec<i64> = cell.iter().zip(&offsets).map(|(c, o)| c + o).collect();
            out.extend_from_slice(self.bucket(&probe));
            // odometer over {-1,0,1}^d
            let mut k = 0;
            loop {
                if k == d {
                    return out;
                }
                offsets[k] += 1;
                if offsets[k] <= 1 {
                    break;
                }
                offsets[k] = -1;
                k += 1;
            }
        }
    }
}

/// Convenience wrapper matching the operation contract: the cell coordinates
/// of `p` in grid `g`.
pub fn grid_cell(p: &Point, g: &GridIndex) -> Result<Vec<i64>> {
    g.cell_of(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(coords: &[(f64, f64)]) -> PointSet {
        PointSet::new(coords.iter().map(|&(x, y)| Point::xy(x, y)).collect()).unwrap()
    }

    #[test]
    fn dist_345_triangle() {
        let d = dist(&Point::xy(0.0, 0.0), &Point::xy(3.0, 4.0)).unwrap();
        assert_eq!(d, 5.0);
    }

    #[test]
    fn dist_identity_is_zero() {
        let p = Point::xy(1.0, 1.0);
        assert_eq!(dist(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn dist_unit_cube_diagonal() {
        let d = dist(&Point::xyz(0.0, 0.0, 0.0), &Point::xyz(1.0, 1.0, 1.0)).unwrap();
        assert!((d - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dist_dimension_mismatch_errors() {
        let e = dist(&Point::xy(0.0, 0.0), &Point::xyz(0.0, 0.0, 0.0));
        assert!(matches!(e, Err(SpannerError::DimensionMismatch(2, 3))));
    }

    #[test]
    fn spread_collinear() {
        let s = PointSet::new(vec![
            Point::new(vec![0.0]).unwrap(),
            Point::new(vec![1.0]).unwrap(),
            Point::new(vec![5.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(spread(&s).unwrap(), 5.0);
    }

    #[test]
    fn spread_unit_square_corners() {
        let s = ps(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        assert!((spread(&s).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn spread_matches_manual_scan() {
        // Independent oracle: recompute min/max with a plain double loop over
        // explicitly materialized distances.
        let mut pts = Vec::new();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..64 {
            pts.push((next(), next()));
        }
        let set = ps(&pts);
        let mut dists = Vec::new();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let dx = pts[i].0 - pts[j].0;
                let dy = pts[i].1 - pts[j].1;
                dists.push((dx * dx + dy * dy).sqrt());
            }
        }
        let min = dists.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = dists.iter().cloned().fold(0.0f64, f64::max);
        assert_eq!(spread(&set).unwrap(), max / min);
    }

    #[test]
    fn spread_needs_two_points() {
        let s = PointSet::new(vec![Point::xy(0.0, 0.0)]).unwrap();
        assert!(spread(&s).is_err());
    }

    #[test]
    fn bounding_square_examples() {
        let b = bounding_square(&ps(&[(0.0, 0.0), (2.0, 1.0)])).unwrap();
        assert_eq!(b.origin.coords(), &[0.0, 0.0]);
        assert_eq!(b.side, 2.0);

        let single = bounding_square(&ps(&[(3.0, 4.0)])).unwrap();
        assert_eq!(single.side, 0.0);

        let s = ps(&[(-1.0, 3.0), (4.0, 3.0), (0.0, 0.0)]);
        let b = bounding_square(&s).unwrap();
        assert_eq!(b.side, 5.0);
        for p in s.iter() {
            assert!(b.contains(p));
        }
    }

    #[test]
    fn grid_cell_basic_and_boundary() {
        let g = GridIndex::new(Point::xy(0.0, 0.0), 1.0).unwrap();
        assert_eq!(g.cell_of(&Point::xy(2.5, 0.1)).unwrap(), vec![2, 0]);
        // Half-open convention: a point exactly on a boundary belongs to the
        // higher cell.
        assert_eq!(g.cell_of(&Point::xy(1.0, 0.0)).unwrap(), vec![1, 0]);
    }

    #[test]
    fn grid_rejects_nonpositive_cell() {
        assert!(GridIndex::new(Point::xy(0.0, 0.0), 0.0).is_err());
        assert!(GridIndex::new(Point::xy(0.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn grid_bucket_roundtrip() {
        let mut pts = Vec::new();
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 10.0
        };
        for _ in 0..100 {
            pts.push((next(), next()));
        }
        let set = ps(&pts);
        let g = GridIndex::build(&set, 0.7).unwrap();
        for (i, p) in set.iter().enumerate() {
            let cell = g.cell_of(p).unwrap();
            assert!(g.bucket(&cell).contains(&i), "point {i} not in its bucket");
            // Re-indexing yields the same cell.
            assert_eq!(cell, g.cell_of(p).unwrap());
        }
    }

    #[test]
    fn pointset_rejects_duplicates() {
        let r = PointSet::new(vec![Point::xy(1.0, 2.0), Point::xy(1.0, 2.0)]);
        assert!(matches!(r, Err(SpannerError::DuplicatePoint(0, 1))));
    }
}
