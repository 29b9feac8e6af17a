//! Modularity scoring and Louvain-style greedy optimization.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::CooccurrenceGraph;
use crate::error::{Error, Result};

/// Q = sum_c [ w_c / W - (s_c / 2W)^2 ] with W the total edge weight, w_c
/// the weight inside community c and s_c the summed strength of its nodes.
/// Unweighted scoring treats every edge as weight 1. An edgeless graph
/// scores 0.
pub fn modularity(graph: &CooccurrenceGraph, partition: &[usize], weighted: bool) -> f64 {
    assert_eq!(partition.len(), graph.n_nodes());
    let k = partition.iter().max().map_or(0, |m| m + 1);
    let mut intra = vec![0u64; k];
    let mut strength = vec![0u64; k];
    let mut total = 0u64;
    for (u, v, w) in graph.edges() {
        let w = if weighted { w } else { 1 };
        total += w;
        strength[partition[u]] += w;
        strength[partition[v]] += w;
        if partition[u] == partition[v] {
            intra[partition[u]] += w;
        }
    }
    if total == 0 {
        return 0.0;
    }
    let w = total as f64;
    intra
        .iter()
        .zip(&strength)
        .map(|(&i, &s)| {
            let share = s as f64 / (2.0 * w);
            i as f64 / w - share * share
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityResult {
    /// Community per node, labeled by first appearance in node order.
    pub partition: Vec<usize>,
    pub modularity: f64,
    pub n_communities: usize,
    pub best_run: usize,
}

/// Working graph for one aggregation level.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    /// Weight of edges folded inside the node (each counted once).
    loops: Vec<f64>,
    strength: Vec<f64>,
}

impl Level {
    fn from_graph(graph: &CooccurrenceGraph, weighted: bool) -> Self {
        let n = graph.n_nodes();
        let adj: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|i| {
                graph
                    .neighbors(i)
                    .map(|(j, w)| (j, if weighted { w as f64 } else { 1.0 }))
                    .collect()
            })
            .collect();
        let strength = adj.iter().map(|nb| nb.iter().map(|x| x.1).sum()).collect();
        Level {
            adj,
            loops: vec![0.0; n],
            strength,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Local moves until no node improves. Returns whether anything moved.
    fn local_moves(&self, comm: &mut [usize], m2: f64, rng: &mut impl Rng) -> bool {
        let n = self.len();
        let mut tot: Vec<f64> = vec![0.0; n];
        for i in 0..n {
            tot[comm[i]] += self.strength[i];
        }
        let mut order: Vec<usize> = (0..n).collect();
        let mut moved_any = false;
        let mut links: HashMap<usize, f64> = HashMap::new();
        loop {
            order.shuffle(rng);
            let mut moved = false;
            for &i in &order {
                let ki = self.strength[i];
                let old = comm[i];
                links.clear();
                for &(j, w) in &self.adj[i] {
                    *links.entry(comm[j]).or_insert(0.0) += w;
                }
                tot[old] -= ki;
                let gain = |c: usize, kin: f64| kin - tot[c] * ki / m2;
                let mut best = old;
                let mut best_gain = gain(old, links.get(&old).copied().unwrap_or(0.0));
                let mut cands: Vec<(usize, f64)> = links.iter().map(|(&c, &w)| (c, w)).collect();
                cands.sort_unstable_by_key(|x| x.0);
                for (c, kin) in cands {
                    let g = gain(c, kin);
                    if g > best_gain + 1e-12 {
                        best = c;
                        best_gain = g;
                    }
                }
                tot[best] += ki;
                if best != old {
                    comm[i] = best;
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                break;
            }
        }
        moved_any
    }

    fn aggregate(&self, comm: &[usize], k: usize) -> Level {
        let mut loops = vec![0.0; k];
        let mut strength = vec![0.0; k];
        let mut links: Vec<HashMap<usize, f64>> = vec![HashMap::new(); k];
        for i in 0..self.len() {
            let c = comm[i];
            loops[c] += self.loops[i];
            strength[c] += self.strength[i];
            for &(j, w) in &self.adj[i] {
                let d = comm[j];
                if d == c {
                    // each intra edge is visited from both ends
                    loops[c] += w / 2.0;
                } else {
                    *links[c].entry(d).or_insert(0.0) += w;
                }
            }
        }
        let adj = links
            .into_iter()
            .map(|m| {
                let mut v: Vec<(usize, f64)> = m.into_iter().collect();
                v.sort_unstable_by_key(|x| x.0);
                v
            })
            .collect();
        Level {
            adj,
            loops,
            strength,
        }
    }
}

/// Relabel to 0..k by first appearance; returns k.
fn compact(labels: &mut [usize]) -> usize {
    let mut map: HashMap<usize, usize> = HashMap::new();
    for l in labels.iter_mut() {
        let next = map.len();
        *l = *map.entry(*l).or_insert(next);
    }
    map.len()
}

fn louvain_once(graph: &CooccurrenceGraph, weighted: bool, rng: &mut impl Rng) -> Vec<usize> {
    let mut level = Level::from_graph(graph, weighted);
    let m2: f64 = level.strength.iter().sum();
    let mut membership: Vec<usize> = (0..graph.n_nodes()).collect();
    if m2 == 0.0 {
        return membership;
    }
    loop {
        let mut comm: Vec<usize> = (0..level.len()).collect();
        if !level.local_moves(&mut comm, m2, rng) {
            break;
        }
        let k = compact(&mut comm);
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        if k == level.len() {
            break;
        }
        level = level.aggregate(&comm, k);
    }
    compact(&mut membership);
    membership
}

/// Best of `runs` seeded Louvain runs by modularity (earliest run on ties).
pub fn detect_communities(
    graph: &CooccurrenceGraph,
    runs: usize,
    seed: u64,
    weighted: bool,
) -> Result<CommunityResult> {
    if graph.n_nodes() == 0 {
        return Err(Error::Undefined("community detection on an empty graph".into()));
    }
    let mut best: Option<CommunityResult> = None;
    for run in 0..runs.max(1) {
        let mut rng = crate::seed::rng_for(seed, &format!("run{run}"));
        let mut partition = louvain_once(graph, weighted, &mut rng);
        let n_communities = compact(&mut partition);
        let q = modularity(graph, &partition, weighted);
        if best.as_ref().is_none_or(|b| q > b.modularity) {
            best = Some(CommunityResult {
                partition,
                modularity: q,
                n_communities,
                best_run: run,
            });
        }
    }
    Ok(best.expect("at least one run"))
}
