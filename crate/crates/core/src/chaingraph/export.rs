use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::analysis::ChainAnalysis;
use super::graph::TransitionGraph;
use crate::error::{Error, Result};
use crate::numerics::{Point, Rational};
use crate::systems::SpaceSpec;

/// Self-contained JSON form of a transition graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub system: String,
    pub space: SpaceSpec,
    pub resolution: u32,
    pub delta: Rational,
    pub points: Vec<Point>,
    pub adjacency: Vec<Vec<usize>>,
}

impl GraphDocument {
    pub fn of(graph: &TransitionGraph) -> GraphDocument {
        GraphDocument {
            system: graph.system.name.clone(),
            space: graph.net.spec.clone(),
            resolution: graph.net.resolution,
            delta: graph.delta.clone(),
            points: graph.net.points.clone(),
            adjacency: graph.succ.clone(),
        }
    }

    pub fn parse(text: &str) -> Result<GraphDocument> {
        let doc: GraphDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.adjacency.len() != doc.points.len()
            || doc.adjacency.iter().flatten().any(|&j| j >= doc.points.len())
        {
            return Err(Error::Parse("adjacency does not match the point table".into()));
        }
        Ok(doc)
    }
}

/// One `"i j"` line per edge.
pub fn edge_list(graph: &TransitionGraph) -> String {
    let mut out = String::new();
    for (i, ys) in graph.succ.iter().enumerate() {
        for j in ys {
            writeln!(out, "{i} {j}").unwrap();
        }
    }
    out
}

/// Sidecar for an edge list: node index to point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeTable {
    pub system: String,
    pub resolution: u32,
    pub delta: Rational,
    pub points: Vec<Point>,
}

pub fn node_table(graph: &TransitionGraph) -> NodeTable {
    NodeTable {
        system: graph.system.name.clone(),
        resolution: graph.net.resolution,
        delta: graph.delta.clone(),
        points: graph.net.points.clone(),
    }
}

/// Condensation in DOT; cyclic classes are boxes, terminal ones double-bordered.
pub fn condensation_dot(graph: &TransitionGraph, analysis: &ChainAnalysis) -> String {
    const MAX_LABEL_POINTS: usize = 6;
    let cond = &analysis.condensation;
    let terminal_classes: Vec<usize> =
        analysis.terminal.iter().map(|&c| analysis.component_class[c]).collect();
    let mut out = String::new();
    writeln!(out, "digraph condensation {{").unwrap();
    writeln!(out, "  label=\"{} δ={}\";", graph.system.name, graph.delta).unwrap();
    for (k, class) in cond.classes.iter().enumerate() {
        let mut label: Vec<String> = class
            .iter()
            .take(MAX_LABEL_POINTS)
            .map(|&v| graph.net.point(v).to_string())
            .collect();
        if class.len() > MAX_LABEL_POINTS {
            label.push(format!("… ({} nodes)", class.len()));
        }
        let mut attrs = vec![format!("label=\"{}\"", label.join("\\n"))];
        attrs.push(if cond.cyclic[k] { "shape=box" } else { "shape=plaintext" }.to_string());
        if terminal_classes.contains(&k) {
            attrs.push("peripheries=2".into());
        }
        writeln!(out, "  c{k} [{}];", attrs.join(", ")).unwrap();
    }
    for (a, b) in &cond.edges {
        writeln!(out, "  c{a} -> c{b};").unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;
    use crate::systems::{NetSpace, SystemDef};

    #[test]
    fn edge_list_lines() {
        let sys = SystemDef::ex21(2);
        let net = NetSpace::build(&sys.space, 1).unwrap();
        let g = TransitionGraph::build(&sys, &net, &q("1/8")).unwrap();
        assert_eq!(edge_list(&g), "0 0\n1 2\n2 3\n3 3\n");
    }

    #[test]
    fn json_round_trip() {
        let sys = SystemDef::tent();
        let net = NetSpace::build(&sys.space, 4).unwrap();
        let g = TransitionGraph::build(&sys, &net, &q("1/16")).unwrap();
        let doc = GraphDocument::of(&g);
        let back = GraphDocument::parse(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.adjacency, g.succ);
    }

    #[test]
    fn ex22_dot_marks_the_terminal_class() {
        let sys = SystemDef::ex22(4);
        let net = NetSpace::build(&sys.space, 8).unwrap();
        let g = TransitionGraph::build(&sys, &net, &Rational::pow2(-8)).unwrap();
        let a = ChainAnalysis::of(&g);
        let dot = condensation_dot(&g, &a);
        assert_eq!(dot.matches("shape=box").count(), 2);
        assert_eq!(dot.matches("peripheries=2").count(), 1);
        let terminal_line = dot.lines().find(|l| l.contains("peripheries=2")).unwrap();
        assert!(terminal_line.contains("label=\"2/1\""));
    }
}
