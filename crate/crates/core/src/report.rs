//! Structured report for a failed theorem guarantee.
//!
//! A report carries everything needed to replay the failing call: the graph
//! in graph6 (with the live-vertex mask when ids are not contiguous), the four
//! terminal masks, and the values that were observed.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::vertex_set::{Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ViolationReport {
    pub operation: String,
    pub graph6: String,
    /// Live vertices of the graph; graph6 vertex `i` is the `i`-th member.
    pub vertices: VertexSet,
    pub q: VertexSet,
    pub r: VertexSet,
    pub s: VertexSet,
    pub t: VertexSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<Vertex>,
    pub expected: String,
    pub observed: BTreeMap<String, String>,
}

impl ViolationReport {
    pub fn new(operation: &str, g: &Graph, expected: impl Into<String>) -> Self {
        ViolationReport {
            operation: operation.to_owned(),
            graph6: g.to_graph6(),
            vertices: g.vertices(),
            q: VertexSet::EMPTY,
            r: VertexSet::EMPTY,
            s: VertexSet::EMPTY,
            t: VertexSet::EMPTY,
            vertex: None,
            expected: expected.into(),
            observed: BTreeMap::new(),
        }
    }

    pub fn terminals(mut self, q: VertexSet, r: VertexSet, s: VertexSet, t: VertexSet) -> Self {
        self.q = q;
        self.r = r;
        self.s = s;
        self.t = t;
        self
    }

    pub fn at_vertex(mut self, v: Vertex) -> Self {
        self.vertex = Some(v);
        self
    }

    pub fn observe(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.observed.insert(key.to_owned(), value.to_string());
        self
    }

    /// Rebuilds the graph the report was taken on.
    pub fn graph(&self) -> Result<Graph, crate::graph6::Graph6Error> {
        Graph::from_graph6_on(&self.graph6, self.vertices)
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} violated on {} (expected {})",
            self.operation, self.graph6, self.expected
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_masks_as_hex() {
        let g = Graph::cycle(5);
        let rep = ViolationReport::new("kappa", &g, "value 1")
            .terminals(
                VertexSet::singleton(0),
                VertexSet::singleton(2),
                VertexSet::EMPTY,
                VertexSet::EMPTY,
            )
            .observe("value", 0);
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"q\":\"0x1\""));
        assert!(json.contains("\"r\":\"0x4\""));
        assert!(!json.contains("\"vertex\""));
        let back: ViolationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rep);
        assert_eq!(back.graph().unwrap(), g);
    }
}
