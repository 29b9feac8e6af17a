//! Disparity-filter backbone.

use serde::Serialize;

use super::CooccurrenceGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BackboneParams {
    alpha: f64,
}

impl BackboneParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(BackboneParams { alpha })
        } else {
            Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Per-endpoint significance of one edge. `None` where the endpoint has
/// degree one and cannot certify the edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeSignificance {
    pub u: usize,
    pub v: usize,
    pub weight: u64,
    pub at_u: Option<f64>,
    pub at_v: Option<f64>,
}

impl EdgeSignificance {
    /// Smallest endpoint significance, if any endpoint can certify.
    pub fn best(&self) -> Option<f64> {
        match (self.at_u, self.at_v) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// (1 - w/s)^(k - 1) for an edge of weight `w` at a node of degree `k` and
/// strength `s`.
fn node_significance(w: u64, strength: u64, degree: usize) -> Option<f64> {
    if degree < 2 || strength == 0 {
        return None;
    }
    let p = w as f64 / strength as f64;
    Some((1.0 - p).powi(degree as i32 - 1))
}

pub fn edge_significances(graph: &CooccurrenceGraph) -> Vec<EdgeSignificance> {
    let strength: Vec<u64> = (0..graph.n_nodes()).map(|i| graph.strength(i)).collect();
    graph
        .edges()
        .map(|(u, v, w)| EdgeSignificance {
            u,
            v,
            weight: w,
            at_u: node_significance(w, strength[u], graph.degree(u)),
            at_v: node_significance(w, strength[v], graph.degree(v)),
        })
        .collect()
}

/// Keep an edge when its significance is below alpha at one endpoint or
/// more. The result is an edge-subgraph whose nodes are the endpoints of
/// kept edges.
pub fn disparity_backbone(graph: &CooccurrenceGraph, params: BackboneParams) -> CooccurrenceGraph {
    let keep: std::collections::HashSet<(usize, usize)> = edge_significances(graph)
        .into_iter()
        .filter(|e| e.best().is_some_and(|s| s < params.alpha))
        .map(|e| (e.u, e.v))
        .collect();
    graph.edge_subgraph(|u, v, _| keep.contains(&(u, v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_bounds() {
        assert!(BackboneParams::new(0.0).is_err());
        assert!(BackboneParams::new(1.0).is_err());
        assert!(BackboneParams::new(0.05).is_ok());
    }

    #[test]
    fn equal_pair_dropped() {
        let g = CooccurrenceGraph::from_edges(3, &[(0, 1, 3), (0, 2, 3)]);
        let sig = edge_significances(&g);
        assert_eq!(sig[0].at_u, Some(0.5));
        assert_eq!(sig[0].at_v, None);
        let b = disparity_backbone(&g, BackboneParams::new(0.05).unwrap());
        assert_eq!(b.n_edges(), 0);
    }

    #[test]
    fn dominant_edge_kept() {
        let g = CooccurrenceGraph::from_edges(4, &[(0, 1, 98), (0, 2, 1), (0, 3, 1)]);
        let sig = edge_significances(&g);
        let expected = (1.0f64 - 0.98).powi(2);
        assert!((sig[0].at_u.unwrap() - expected).abs() < 1e-15);
        let b = disparity_backbone(&g, BackboneParams::new(0.05).unwrap());
        assert_eq!(b.n_edges(), 1);
        assert_eq!(b.labels(), ["n0", "n1"]);
        assert_eq!(b.weight(0, 1), Some(98));
    }

    #[test]
    fn uniform_k10_is_empty() {
        let mut edges = Vec::new();
        for i in 0..10 {
            for j in (i + 1)..10 {
                edges.push((i, j, 1));
            }
        }
        let g = CooccurrenceGraph::from_edges(10, &edges);
        for e in edge_significances(&g) {
            assert!((e.at_u.unwrap() - (8.0f64 / 9.0).powi(8)).abs() < 1e-12);
        }
        assert!((8.0f64 / 9.0).powi(8) > 0.38);
        let b = disparity_backbone(&g, BackboneParams::new(0.05).unwrap());
        assert_eq!((b.n_nodes(), b.n_edges()), (0, 0));
    }
}
