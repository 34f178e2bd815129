//! Internal helper for assembling 2-D geometric graphs incrementally while
//! identifying vertices by exact coordinate bit patterns. Constructions that
//! share Steiner points (grid corners, bisector points, tree nodes) produce
//! them through the same arithmetic, so bit-level interning makes shared
//! structure collapse for free.

use std::collections::HashMap;

use crate::graph::{GeometricGraph, VertexKind};

pub(crate) struct Sink2<'a> {
    pub g: &'a mut GeometricGraph,
    pub intern: &'a mut HashMap<(u64, u64), u32>,
    /// When set, every edge added through this sink is also recorded here.
    pub log: Option<&'a mut Vec<(u32, u32)>>,
}

impl<'a> Sink2<'a> {
    pub fn new(
        g: &'a mut GeometricGraph,
        intern: &'a mut HashMap<(u64, u64), u32>,
    ) -> Self {
        debug_assert_eq!(g.dim(), 2);
        Sink2 {
            g,
            intern,
            log: None,
        }
    }

    /// Preload interning entries for existing vertices.
    pub fn preload(g: &GeometricGraph, intern: &mut HashMap<(u64, u64), u32>) {
        for v in 0..g.n_vertices() {
            let p = g.point(v);
            intern
                .entry((p[0].to_bits(), p[1].to_bits()))
                .or_insert(v as u32);
        }
    }

    pub fn vertex(&mut self, x: f64, y: f64, kind: VertexKind) -> usize {
        match self.intern.entry((x.to_bits(), y.to_bits())) {
            std::collections::hash_map::Entry::Occupied(e) => {
                let id = *e.get() as usize;
                if kind == VertexKind::Original {
                    self.g.set_kind(id, VertexKind::Original);
                }
                id
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                let id = self.g.add_vertex(&[x, y], kind);
                e.insert(id as u32);
                id
            }
        }
    }

    pub fn edge(&mut self, u: usize, v: usize) {
        if u != v {
            let _ = self.g.add_edge(u, v);
            if let Some(log) = self.log.as_deref_mut() {
                log.push((u as u32, v as u32));
            }
        }
    }
}
