//! JSON, edge-list text and DOT formats.

use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{Multigraph, RayedGraph};
use crate::error::{Error, Result};

/// On-disk JSON layout of a rayed graph.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default)]
    pub rays: Vec<RayRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub id: String,
    pub u: String,
    pub v: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayRecord {
    pub id: String,
    pub at: String,
}

impl TryFrom<GraphFile> for RayedGraph {
    type Error = Error;

    fn try_from(f: GraphFile) -> Result<RayedGraph> {
        let mut core = Multigraph::new();
        for v in f.vertices {
            if !core.add_vertex(v.clone()) {
                return Err(Error::input(format!("duplicate vertex id {v}")));
            }
        }
        for e in f.edges {
            core.add_edge(e.id, e.u, e.v)?;
        }
        let mut g = RayedGraph::from(core);
        for r in f.rays {
            g.add_ray(r.id, r.at)?;
        }
        Ok(g)
    }
}

impl From<RayedGraph> for GraphFile {
    fn from(g: RayedGraph) -> GraphFile {
        GraphFile {
            vertices: g.vertices().iter().map(|v| v.0.clone()).collect(),
            edges: g
                .core
                .edges()
                .map(|(e, u, v)| EdgeRecord {
                    id: e.0.clone(),
                    u: u.0.clone(),
                    v: v.0.clone(),
                })
                .collect(),
            rays: g
                .rays()
                .iter()
                .map(|(r, at)| RayRecord {
                    id: r.0.clone(),
                    at: at.0.clone(),
                })
                .collect(),
        }
    }
}

/// Deserializes JSON, reporting the path of the offending value on failure.
pub fn from_json<T: DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|err| Error::Parse {
        path: err.path().to_string(),
        msg: err.inner().to_string(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable value");
    out.push(b'\n');
    out
}

pub fn load(bytes: &[u8]) -> Result<RayedGraph> {
    let file: GraphFile = from_json(bytes)?;
    RayedGraph::try_from(file)
}

pub fn save(g: &RayedGraph) -> Vec<u8> {
    to_json(&GraphFile::from(g.clone()))
}

/// Parses the edge-list format: `u v id` per edge, `RAY at id` per ray,
/// `VERTEX id` for a vertex without edges. Blank lines and `#` comments are
/// skipped.
pub fn parse_text(text: &str) -> Result<RayedGraph> {
    let mut core = Multigraph::new();
    let mut rays = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let at = |msg: &str| Error::Parse {
            path: format!("line {}", lineno + 1),
            msg: msg.into(),
        };
        match parts.as_slice() {
            ["RAY", v, id] => rays.push((id.to_string(), v.to_string())),
            ["VERTEX", v] => {
                core.add_vertex(*v);
            }
            [u, v, id] => core
                .add_edge_auto(*id, *u, *v)
                .map_err(|e| at(&e.to_string()))?,
            _ => return Err(at("expected `u v id`, `RAY at id` or `VERTEX id`")),
        }
    }
    let mut g = RayedGraph::from(core);
    for (id, v) in rays {
        g.add_ray(id, v)?;
    }
    Ok(g)
}

pub fn to_text(g: &RayedGraph) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        if g.core.degree(v) == 0 {
            writeln!(out, "VERTEX {v}").unwrap();
        }
    }
    for (e, u, v) in g.core.edges() {
        writeln!(out, "{u} {v} {e}").unwrap();
    }
    for (r, at) in g.rays() {
        writeln!(out, "RAY {at} {r}").unwrap();
    }
    out
}

/// Graphviz rendering; each ray is a dashed arrow to an invisible stub.
pub fn to_dot(g: &RayedGraph) -> String {
    let mut out = String::from("graph G {\n");
    for v in g.vertices() {
        writeln!(out, "  \"{v}\";").unwrap();
    }
    for (e, u, v) in g.core.edges() {
        writeln!(out, "  \"{u}\" -- \"{v}\" [label=\"{e}\"];").unwrap();
    }
    for (r, at) in g.rays() {
        writeln!(out, "  \"ray:{r}\" [shape=point, style=invis];").unwrap();
        writeln!(
            out,
            "  \"{at}\" -- \"ray:{r}\" [style=dashed, dir=forward, label=\"{r}\"];"
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
