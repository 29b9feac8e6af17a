//! Per-year term co-occurrence networks and their metric suite.

mod backbone;
mod export;
mod louvain;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textpipe::TermOccurrences;

pub use backbone::{disparity_backbone, edge_significances, BackboneParams, EdgeSignificance};
pub use export::{node_size, to_graphml, to_tsv};
pub use louvain::{detect_communities, modularity, CommunityResult};

/// Undirected weighted graph over terms. Edge weight counts the documents in
/// which both endpoints occur. No self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CooccurrenceGraph {
    pub year: Option<i32>,
    labels: Vec<String>,
    doc_counts: Vec<u64>,
    adj: Vec<BTreeMap<usize, u64>>,
    n_edges: usize,
}

impl CooccurrenceGraph {
    pub fn with_nodes(labels: Vec<String>, doc_counts: Vec<u64>) -> Self {
        assert_eq!(labels.len(), doc_counts.len());
        let n = labels.len();
        CooccurrenceGraph {
            year: None,
            labels,
            doc_counts,
            adj: vec![BTreeMap::new(); n],
            n_edges: 0,
        }
    }

    /// Unlabeled graph from an edge list (labels `n0`, `n1`, ...). Repeated
    /// pairs accumulate; zero weights and self-loops are ignored.
    pub fn from_edges(n: usize, edges: &[(usize, usize, u64)]) -> Self {
        let labels = (0..n).map(|i| format!("n{i}")).collect();
        let mut g = Self::with_nodes(labels, vec![0; n]);
        for &(u, v, w) in edges {
            g.add_weight(u, v, w);
        }
        g
    }

    pub fn add_weight(&mut self, u: usize, v: usize, w: u64) {
        if u == v || w == 0 {
            return;
        }
        let e = self.adj[u].entry(v).or_insert(0);
        if *e == 0 {
            self.n_edges += 1;
        }
        *e += w;
        *self.adj[v].entry(u).or_insert(0) += w;
    }

    pub fn n_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Number of documents containing the term (0 for synthetic graphs).
    pub fn doc_count(&self, i: usize) -> u64 {
        self.doc_counts[i]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.adj[i].iter().map(|(&j, &w)| (j, w))
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<u64> {
        self.adj[u].get(&v).copied()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn strength(&self, i: usize) -> u64 {
        self.adj[i].values().sum()
    }

    /// Edges as `(u, v, w)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nb)| {
            nb.range(u + 1..).map(move |(&v, &w)| (u, v, w))
        })
    }

    pub fn total_weight(&self) -> u64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    /// Subgraph made of the edges `keep` accepts; its node set is the
    /// endpoints of those edges, labels and weights unchanged.
    pub fn edge_subgraph(&self, mut keep: impl FnMut(usize, usize, u64) -> bool) -> Self {
        let kept: Vec<(usize, usize, u64)> = self.edges().filter(|&(u, v, w)| keep(u, v, w)).collect();
        let nodes: BTreeSet<usize> = kept.iter().flat_map(|&(u, v, _)| [u, v]).collect();
        self.induced(&nodes, &kept)
    }

    fn induced(&self, nodes: &BTreeSet<usize>, edges: &[(usize, usize, u64)]) -> Self {
        let remap: HashMap<usize, usize> = nodes.iter().enumerate().map(|(n, &o)| (o, n)).collect();
        let mut g = Self::with_nodes(
            nodes.iter().map(|&i| self.labels[i].clone()).collect(),
            nodes.iter().map(|&i| self.doc_counts[i]).collect(),
        );
        g.year = self.year;
        for &(u, v, w) in edges {
            g.add_weight(remap[&u], remap[&v], w);
        }
        g
    }
}

/// Co-occurrence graph for one year: nodes are the terms seen in any
/// document, edge weight is the number of documents containing both terms.
/// Repeats inside a document do not add weight.
pub fn build_cooccurrence(year: Option<i32>, docs: &[TermOccurrences]) -> CooccurrenceGraph {
    let terms: BTreeSet<&str> = docs
        .iter()
        .flat_map(|d| d.counts.keys().map(String::as_str))
        .collect();
    let index: HashMap<&str, usize> = terms.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let n = terms.len();

    let (doc_counts, pairs) = docs
        .par_iter()
        .fold(
            || (vec![0u64; n], HashMap::<(usize, usize), u64>::new()),
            |(mut dc, mut pairs), d| {
                let ids: Vec<usize> = d.counts.keys().map(|t| index[t.as_str()]).collect();
                for (a, &u) in ids.iter().enumerate() {
                    dc[u] += 1;
                    for &v in &ids[a + 1..] {
                        *pairs.entry((u.min(v), u.max(v))).or_insert(0) += 1;
                    }
                }
                (dc, pairs)
            },
        )
        .reduce(
            || (vec![0u64; n], HashMap::new()),
            |(mut dc, mut pa), (dc2, pb)| {
                for (a, b) in dc.iter_mut().zip(dc2) {
                    *a += b;
                }
                for (k, w) in pb {
                    *pa.entry(k).or_insert(0) += w;
                }
                (dc, pa)
            },
        );

    let mut g = CooccurrenceGraph::with_nodes(terms.iter().map(|t| t.to_string()).collect(), doc_counts);
    g.year = year;
    let mut pairs: Vec<_> = pairs.into_iter().collect();
    pairs.sort_unstable();
    for ((u, v), w) in pairs {
        g.add_weight(u, v, w);
    }
    g
}

/// Drop every node of degree zero.
pub fn prune_isolates(graph: &CooccurrenceGraph) -> CooccurrenceGraph {
    graph.edge_subgraph(|_, _, _| true)
}

/// 2E / (N (N - 1)).
pub fn density(graph: &CooccurrenceGraph) -> Result<f64> {
    density_of(graph.n_nodes(), graph.n_edges())
}

pub fn density_of(n_nodes: usize, n_edges: usize) -> Result<f64> {
    if n_nodes < 2 {
        return Err(Error::Undefined(format!("density of a graph with {n_nodes} node(s)")));
    }
    let n = n_nodes as f64;
    Ok(2.0 * n_edges as f64 / (n * (n - 1.0)))
}

/// 2E / N.
pub fn average_degree(graph: &CooccurrenceGraph) -> Result<f64> {
    average_degree_of(graph.n_nodes(), graph.n_edges())
}

pub fn average_degree_of(n_nodes: usize, n_edges: usize) -> Result<f64> {
    if n_nodes == 0 {
        return Err(Error::Undefined("average degree of an empty graph".into()));
    }
    Ok(2.0 * n_edges as f64 / n_nodes as f64)
}

/// Unweighted local clustering coefficient averaged over all nodes; nodes
/// of degree below two count as zero.
pub fn average_clustering(graph: &CooccurrenceGraph) -> Result<f64> {
    let n = graph.n_nodes();
    if n == 0 {
        return Err(Error::Undefined("clustering of an empty graph".into()));
    }
    let total: f64 = (0..n)
        .into_par_iter()
        .map(|v| {
            let nb: Vec<usize> = graph.adj[v].keys().copied().collect();
            let k = nb.len();
            if k < 2 {
                return 0.0;
            }
            let mut links = 0u64;
            for (a, &x) in nb.iter().enumerate() {
                for &y in &nb[a + 1..] {
                    if graph.adj[x].contains_key(&y) {
                        links += 1;
                    }
                }
            }
            2.0 * links as f64 / (k as f64 * (k as f64 - 1.0))
        })
        .sum();
    Ok(total / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankKind {
    Degree,
    Strength,
}

/// Values sorted descending with ranks from 1.
pub fn rank_distribution(graph: &CooccurrenceGraph, kind: RankKind) -> Vec<(usize, u64)> {
    let mut vals: Vec<u64> = (0..graph.n_nodes())
        .map(|i| match kind {
            RankKind::Degree => graph.degree(i) as u64,
            RankKind::Strength => graph.strength(i),
        })
        .collect();
    vals.sort_unstable_by(|a, b| b.cmp(a));
    vals.into_iter().enumerate().map(|(i, v)| (i + 1, v)).collect()
}

/// Number of blocks of the description-length-minimizing block model fitted
/// to the graph.
pub fn count_blocks(graph: &CooccurrenceGraph, seed: u64) -> Result<usize> {
    let fit = crate::topicmdl::fit_unipartite(graph, seed, None)?;
    Ok(fit.n_blocks)
}

/// One row of the network metrics table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphMetrics {
    pub year: String,
    pub nodes: usize,
    pub edges: usize,
    pub modularity: f64,
    pub classes: usize,
    pub blocks: usize,
    pub avg_clustering: f64,
    pub avg_degree: f64,
    pub density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricOptions {
    pub seed: u64,
    pub runs: usize,
    pub weighted_q: bool,
}

impl Default for MetricOptions {
    fn default() -> Self {
        MetricOptions {
            seed: 42,
            runs: 10,
            weighted_q: true,
        }
    }
}

/// Full metric suite on an already pruned graph. `label` names the row
/// (a year, or "all").
pub fn compute_metrics(
    graph: &CooccurrenceGraph,
    label: &str,
    opts: &MetricOptions,
) -> Result<GraphMetrics> {
    let communities = detect_communities(
        graph,
        opts.runs,
        crate::seed::sub_seed(opts.seed, &format!("louvain:{label}")),
        opts.weighted_q,
    )?;
    let blocks = count_blocks(graph, crate::seed::sub_seed(opts.seed, &format!("sbm-uni:{label}")))?;
    Ok(GraphMetrics {
        year: label.to_string(),
        nodes: graph.n_nodes(),
        edges: graph.n_edges(),
        modularity: communities.modularity,
        classes: communities.n_communities,
        blocks,
        avg_clustering: average_clustering(graph)?,
        avg_degree: average_degree(graph)?,
        density: density(graph)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occ(id: &str, terms: &[(&str, u64)]) -> TermOccurrences {
        TermOccurrences {
            snapshot_id: id.into(),
            counts: terms.iter().map(|(t, c)| (t.to_string(), *c)).collect(),
            total: terms.iter().map(|(_, c)| c).sum(),
            tokens_covered: 0,
        }
    }

    #[test]
    fn document_level_counts() {
        let docs = [
            occ("1", &[("a", 1), ("b", 1)]),
            occ("2", &[("a", 1), ("b", 1)]),
            occ("3", &[("a", 1), ("c", 1)]),
        ];
        let g = build_cooccurrence(Some(2000), &docs);
        let (a, b, c) = (g.index_of("a").unwrap(), g.index_of("b").unwrap(), g.index_of("c").unwrap());
        assert_eq!(g.weight(a, b), Some(2));
        assert_eq!(g.weight(a, c), Some(1));
        assert_eq!(g.weight(b, c), None);
        assert_eq!(g.n_edges(), 2);
        assert_eq!(g.doc_count(a), 3);
    }

    #[test]
    fn presence_not_multiplicity() {
        let g = build_cooccurrence(None, &[occ("1", &[("cookies", 5), ("beacons", 1)])]);
        assert_eq!(g.total_weight(), 1);
    }

    #[test]
    fn no_shared_terms_is_edgeless() {
        let g = build_cooccurrence(None, &[occ("1", &[("a", 1)]), occ("2", &[("b", 3)])]);
        assert_eq!((g.n_nodes(), g.n_edges()), (2, 0));
        assert_eq!(prune_isolates(&g).n_nodes(), 0);
    }

    #[test]
    fn prune_examples() {
        let g = CooccurrenceGraph::from_edges(3, &[(0, 1, 1)]);
        let p = prune_isolates(&g);
        assert_eq!((p.n_nodes(), p.n_edges()), (2, 1));
        let k3 = CooccurrenceGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 4)]);
        assert_eq!(prune_isolates(&k3), k3);
    }

    #[test]
    fn density_and_degree() {
        assert!((density_of(26, 192).unwrap() - 0.591).abs() < 1e-3);
        assert!((density_of(240, 20847).unwrap() - 0.727).abs() < 1e-3);
        assert_eq!(density_of(2, 1).unwrap(), 1.0);
        assert!(density_of(1, 0).is_err());
        assert!((average_degree_of(26, 192).unwrap() - 14.769).abs() < 1e-3);
        assert!((average_degree_of(65, 743).unwrap() - 22.862).abs() < 1e-3);
        assert_eq!(average_degree_of(5, 0).unwrap(), 0.0);
        assert!(average_degree_of(0, 0).is_err());
    }

    #[test]
    fn clustering_examples() {
        let k3 = CooccurrenceGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]);
        assert_eq!(average_clustering(&k3).unwrap(), 1.0);
        let path = CooccurrenceGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1)]);
        assert_eq!(average_clustering(&path).unwrap(), 0.0);
        // K4 minus (2,3): nodes 0 and 1 see 2 of 3 neighbor pairs linked,
        // nodes 2 and 3 see their single pair linked.
        let k4m = CooccurrenceGraph::from_edges(
            4,
            &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1)],
        );
        let expected = (2.0 / 3.0 + 2.0 / 3.0 + 1.0 + 1.0) / 4.0;
        assert!((average_clustering(&k4m).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 5.0 / 6.0).abs() < 1e-12);
        assert!(average_clustering(&CooccurrenceGraph::from_edges(0, &[])).is_err());
    }

    #[test]
    fn rank_examples() {
        let star = CooccurrenceGraph::from_edges(6, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 1), (0, 5, 1)]);
        let d: Vec<u64> = rank_distribution(&star, RankKind::Degree).into_iter().map(|x| x.1).collect();
        assert_eq!(d, [5, 1, 1, 1, 1, 1]);
        let e = CooccurrenceGraph::from_edges(2, &[(0, 1, 7)]);
        assert_eq!(rank_distribution(&e, RankKind::Strength), [(1, 7), (2, 7)]);
    }
}
