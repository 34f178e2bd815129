//! Light Steiner spanners for Euclidean point sets of bounded spread.
//!
//! The crate provides three spanner constructions plus the measurement
//! machinery around them:
//!
//! - [`planar`]: a Steiner (1+eps)-spanner in the plane whose lightness
//!   scales with `log(spread) / eps`, built level by level from distance
//!   classes, nets, subsquares and bisector single-source spanners.
//! - [`fast_planar`]: the near-linear-time variant for polynomially bounded
//!   spread, driven by the edge set of a sparse base spanner instead of all
//!   point pairs.
//! - [`highdim`]: the d >= 3 construction built on charging cover trees.
//!
//! Supporting modules: [`geometry`] (points, spread, grids), [`graph`]
//! (geometric graphs, MST, exact stretch verification, the greedy baseline),
//! [`nets`] (r-nets and covers), [`single_source`] (shallow-light trees and
//! single-source spanners, the 2-D workhorses) and [`theta`] (cone-based
//! sparse spanners used as the fast base and as a pluggable black box).

mod builder;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod nets;
pub mod single_source;
pub mod fast_planar;
pub mod planar;
pub mod theta;

pub use error::{Result, SpannerError};
pub use geometry::{bounding_square, dist, grid_cell, spread, Point, PointSet};
pub use graph::{
    all_pairs_stretch, greedy_spanner, mst, subdivide_mst, verify_stretch, GeometricGraph,
    SpannerReport, StretchCheck, Vertex, VertexKind,
};
pub use nets::{cover_only, greedy_net, grid_net, NetAssignment};
