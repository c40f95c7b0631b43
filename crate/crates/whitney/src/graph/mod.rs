//! Finite multigraphs with stable edge ids, and rayed graphs that mark
//! infinite sides with rays attached at vertices.

pub(crate) mod connect;
pub mod cycles;
mod dense;
pub mod flow;
pub mod io;
pub mod iso;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use connect::{
    components, end_count, is_strongly_n_connected, is_weakly_n_connected, wedges, Block,
    ComponentPartition, WeakConnectivity, Wedge,
};
pub use dense::Dense;

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                Self(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

id_type!(
    /// Opaque vertex identifier.
    VertexId
);
id_type!(
    /// Opaque edge identifier, stable under every operation.
    EdgeId
);
id_type!(
    /// Opaque ray identifier.
    RayId
);

pub type EdgeSet = BTreeSet<EdgeId>;
pub type VertexSet = BTreeSet<VertexId>;

/// Builds an edge set from string ids.
pub fn edge_set<I, S>(ids: I) -> EdgeSet
where
    I: IntoIterator<Item = S>,
    S: Into<EdgeId>,
{
    ids.into_iter().map(Into::into).collect()
}

/// Finite multigraph. Loops and parallel edges are allowed; endpoints are
/// stored in sorted order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Multigraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, (VertexId, VertexId)>,
}

fn ordered(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Multigraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: impl Into<VertexId>) -> bool {
        self.vertices.insert(v.into())
    }

    /// Adds an edge; both endpoints must already exist.
    pub fn add_edge(
        &mut self,
        id: impl Into<EdgeId>,
        u: impl Into<VertexId>,
        v: impl Into<VertexId>,
    ) -> Result<()> {
        let (id, u, v) = (id.into(), u.into(), v.into());
        if self.edges.contains_key(&id) {
            return Err(Error::input(format!("duplicate edge id {id}")));
        }
        for x in [&u, &v] {
            if !self.vertices.contains(x) {
                return Err(Error::input(format!("edge {id} has dangling endpoint {x}")));
            }
        }
        self.edges.insert(id, ordered(u, v));
        Ok(())
    }

    /// Adds an edge, creating missing endpoints.
    pub fn add_edge_auto(
        &mut self,
        id: impl Into<EdgeId>,
        u: impl Into<VertexId>,
        v: impl Into<VertexId>,
    ) -> Result<()> {
        let (u, v) = (u.into(), v.into());
        self.vertices.insert(u.clone());
        self.vertices.insert(v.clone());
        self.add_edge(id, u, v)
    }

    pub fn remove_edge(&mut self, e: &EdgeId) -> Option<(VertexId, VertexId)> {
        self.edges.remove(e)
    }

    /// Removes a vertex with no incident edges.
    pub fn remove_isolated_vertex(&mut self, v: &VertexId) -> Result<()> {
        if self.degree(v) > 0 {
            return Err(Error::input(format!("vertex {v} still has edges")));
        }
        self.vertices.remove(v);
        Ok(())
    }

    /// Re-attaches an existing edge.
    pub fn set_endpoints(&mut self, e: &EdgeId, u: VertexId, v: VertexId) -> Result<()> {
        for x in [&u, &v] {
            if !self.vertices.contains(x) {
                return Err(Error::input(format!("unknown vertex {x}")));
            }
        }
        match self.edges.get_mut(e) {
            Some(slot) => {
                *slot = ordered(u, v);
                Ok(())
            }
            None => Err(Error::input(format!("unknown edge {e}"))),
        }
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (&EdgeId, &VertexId, &VertexId)> {
        self.edges.iter().map(|(e, (u, v))| (e, u, v))
    }

    pub fn edge_ids(&self) -> EdgeSet {
        self.edges.keys().cloned().collect()
    }

    pub fn has_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    pub fn has_edge(&self, e: &EdgeId) -> bool {
        self.edges.contains_key(e)
    }

    pub fn endpoints(&self, e: &EdgeId) -> Option<(&VertexId, &VertexId)> {
        self.edges.get(e).map(|(u, v)| (u, v))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_loop(&self, e: &EdgeId) -> bool {
        matches!(self.edges.get(e), Some((u, v)) if u == v)
    }

    /// Edges incident to `v`, each listed once (loops included once).
    pub fn incident(&self, v: &VertexId) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|(_, (a, b))| a == v || b == v)
            .map(|(e, _)| e.clone())
            .collect()
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: &VertexId) -> usize {
        self.edges
            .values()
            .map(|(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum()
    }

    /// The endpoint of `e` opposite to `v`.
    pub fn other_end(&self, e: &EdgeId, v: &VertexId) -> Option<&VertexId> {
        let (a, b) = self.endpoints(e)?;
        if a == v {
            Some(b)
        } else if b == v {
            Some(a)
        } else {
            None
        }
    }

    /// Vertices touched by the given edges.
    pub fn span(&self, f: &EdgeSet) -> VertexSet {
        let mut out = VertexSet::new();
        for e in f {
            if let Some((u, v)) = self.endpoints(e) {
                out.insert(u.clone());
                out.insert(v.clone());
            }
        }
        out
    }

    /// Subgraph with the given edges and all vertices.
    pub fn restricted(&self, f: &EdgeSet) -> Multigraph {
        Multigraph {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .filter(|(e, _)| f.contains(*e))
                .map(|(e, p)| (e.clone(), p.clone()))
                .collect(),
        }
    }

    /// Checks that every id in `f` is an edge.
    pub fn check_edges(&self, f: &EdgeSet) -> Result<()> {
        match f.iter().find(|e| !self.edges.contains_key(*e)) {
            Some(e) => Err(Error::input(format!("unknown edge id {e}"))),
            None => Ok(()),
        }
    }

    /// A vertex id not present in the graph, derived from `base`.
    pub fn fresh_vertex(&self, base: &VertexId) -> VertexId {
        let mut name = format!("{base}'");
        while self.vertices.contains(name.as_str()) {
            name.push('\'');
        }
        VertexId(name)
    }
}

impl std::borrow::Borrow<str> for VertexId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for EdgeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for RayId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// A multigraph with rays; each ray models one infinite side attached at a vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "io::GraphFile", into = "io::GraphFile")]
pub struct RayedGraph {
    pub core: Multigraph,
    rays: BTreeMap<RayId, VertexId>,
}

impl From<Multigraph> for RayedGraph {
    fn from(core: Multigraph) -> Self {
        RayedGraph {
            core,
            rays: BTreeMap::new(),
        }
    }
}

impl RayedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_ray(&mut self, id: impl Into<RayId>, at: impl Into<VertexId>) -> Result<()> {
        let (id, at) = (id.into(), at.into());
        if self.rays.contains_key(&id) {
            return Err(Error::input(format!("duplicate ray id {id}")));
        }
        if !self.core.has_vertex(&at) {
            return Err(Error::input(format!(
                "ray {id} attached at unknown vertex {at}"
            )));
        }
        self.rays.insert(id, at);
        Ok(())
    }

    /// Moves an existing ray.
    pub fn move_ray(&mut self, id: &RayId, to: VertexId) -> Result<()> {
        if !self.core.has_vertex(&to) {
            return Err(Error::input(format!("unknown vertex {to}")));
        }
        match self.rays.get_mut(id) {
            Some(slot) => {
                *slot = to;
                Ok(())
            }
            None => Err(Error::input(format!("unknown ray {id}"))),
        }
    }

    pub fn rays(&self) -> &BTreeMap<RayId, VertexId> {
        &self.rays
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    pub fn rays_at(&self, v: &VertexId) -> usize {
        self.rays.values().filter(|x| *x == v).count()
    }

    pub fn ray_ids_at(&self, v: &VertexId) -> Vec<RayId> {
        self.rays
            .iter()
            .filter(|(_, x)| *x == v)
            .map(|(r, _)| r.clone())
            .collect()
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        self.core.vertices()
    }

    pub fn edge_ids(&self) -> EdgeSet {
        self.core.edge_ids()
    }

    pub fn edge_count(&self) -> usize {
        self.core.edge_count()
    }

    pub fn vertex_count(&self) -> usize {
        self.core.vertex_count()
    }

    pub fn endpoints(&self, e: &EdgeId) -> Option<(&VertexId, &VertexId)> {
        self.core.endpoints(e)
    }

    /// Copy keeping only the given edges (all vertices and rays stay).
    pub fn restricted(&self, f: &EdgeSet) -> RayedGraph {
        RayedGraph {
            core: self.core.restricted(f),
            rays: self.rays.clone(),
        }
    }

    /// Induced rayed subgraph on a vertex set: edges with both ends inside and
    /// rays attached inside.
    pub fn induced(&self, vs: &VertexSet) -> RayedGraph {
        let mut core = Multigraph::new();
        for v in vs {
            core.add_vertex(v.clone());
        }
        for (e, u, v) in self.core.edges() {
            if vs.contains(u) && vs.contains(v) {
                core.edges.insert(e.clone(), (u.clone(), v.clone()));
            }
        }
        let rays = self
            .rays
            .iter()
            .filter(|(_, at)| vs.contains(*at))
            .map(|(r, at)| (r.clone(), at.clone()))
            .collect();
        RayedGraph { core, rays }
    }

    /// Subgraph formed by an edge set together with its endpoints and the rays
    /// attached at those endpoints.
    pub fn edge_subgraph(&self, f: &EdgeSet) -> RayedGraph {
        let span = self.core.span(f);
        let mut g = self.induced(&span);
        let drop: Vec<EdgeId> = g
            .core
            .edge_ids()
            .into_iter()
            .filter(|e| !f.contains(e))
            .collect();
        for e in drop {
            g.core.remove_edge(&e);
        }
        g
    }

    /// Identifies `merge` into `keep`: edges and rays at `merge` move to `keep`.
    pub fn identify(&mut self, keep: &VertexId, merge: &VertexId) -> Result<()> {
        if keep == merge {
            return Ok(());
        }
        for v in [keep, merge] {
            if !self.core.has_vertex(v) {
                return Err(Error::input(format!("unknown vertex {v}")));
            }
        }
        for (u, v) in self.core.edges.values_mut() {
            let mut a = u.clone();
            let mut b = v.clone();
            if &a == merge {
                a = keep.clone();
            }
            if &b == merge {
                b = keep.clone();
            }
            let (a, b) = ordered(a, b);
            *u = a;
            *v = b;
        }
        for at in self.rays.values_mut() {
            if at == merge {
                *at = keep.clone();
            }
        }
        self.core.vertices.remove(merge);
        Ok(())
    }

    /// Rebuilds the graph with vertices renamed by `f`; `f` must be injective.
    pub fn rename_vertices(&self, f: impl Fn(&VertexId) -> VertexId) -> Result<RayedGraph> {
        let mut core = Multigraph::new();
        for v in self.core.vertices() {
            if !core.add_vertex(f(v)) {
                return Err(Error::input("vertex renaming is not injective"));
            }
        }
        for (e, u, v) in self.core.edges() {
            core.add_edge(e.clone(), f(u), f(v))?;
        }
        let rays = self.rays.iter().map(|(r, at)| (r.clone(), f(at))).collect();
        Ok(RayedGraph { core, rays })
    }

    /// Rebuilds the graph with edges renamed by `f`; `f` must be injective.
    pub fn rename_edges(&self, f: impl Fn(&EdgeId) -> EdgeId) -> Result<RayedGraph> {
        let mut core = Multigraph::new();
        for v in self.core.vertices() {
            core.add_vertex(v.clone());
        }
        for (e, u, v) in self.core.edges() {
            core.add_edge(f(e), u.clone(), v.clone())?;
        }
        Ok(RayedGraph {
            core,
            rays: self.rays.clone(),
        })
    }
}
