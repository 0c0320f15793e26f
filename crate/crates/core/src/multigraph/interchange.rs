//! JSON interchange document:
//! `{"root": 0, "vertices": [0, 1], "edges": [[0, 1, 2]]}` with `u < v` and
//! edges sorted lexicographically.

use serde::{Deserialize, Serialize};

use super::{RootedMultigraph, VertexId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub root: u32,
    pub vertices: Vec<u32>,
    pub edges: Vec<(u32, u32, u32)>,
}

impl From<&RootedMultigraph> for GraphDocument {
    fn from(g: &RootedMultigraph) -> Self {
        GraphDocument {
            root: g.root().0,
            vertices: g.sorted_vertices().into_iter().map(|v| v.0).collect(),
            edges: g.edges().into_iter().map(|(u, v, m)| (u.0, v.0, m)).collect(),
        }
    }
}

impl TryFrom<GraphDocument> for RootedMultigraph {
    type Error = Error;

    fn try_from(doc: GraphDocument) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for (i, &(u, v, m)) in doc.edges.iter().enumerate() {
            let bad = |message: String| Error::Parse {
                line: 0,
                column: 0,
                message: format!("edges[{i}]: {message}"),
            };
            if u == v {
                return Err(bad(format!("loop at vertex {u}")));
            }
            if m == 0 {
                return Err(bad("zero multiplicity".into()));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(bad(format!("duplicate pair {u}-{v}")));
            }
        }
        RootedMultigraph::from_parts(
            VertexId(doc.root),
            doc.vertices.into_iter().map(VertexId),
            doc.edges.into_iter().map(|(u, v, m)| (VertexId(u), VertexId(v), m)),
        )
        .map_err(|e| Error::Parse {
            line: 0,
            column: 0,
            message: e.to_string(),
        })
    }
}

pub fn serialize(g: &RootedMultigraph) -> String {
    serde_json::to_string(&GraphDocument::from(g)).expect("plain data serialises")
}

/// Parse a document. Syntax errors carry the line and column reported by the
/// JSON reader; structural errors (loops, duplicates, dangling ids) carry the
/// offending edge index with line 0.
pub fn deserialize(text: &str) -> Result<RootedMultigraph> {
    let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    RootedMultigraph::try_from(doc)
}
