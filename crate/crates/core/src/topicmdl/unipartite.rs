//! Single-node-set variant of the block model, used to count blocks in
//! co-occurrence graphs.
//!
//! `m_rs` is the ordered block-pair weight matrix, so the diagonal holds
//! twice the intra-block weight and every edge is seen once from each side.
//! With block sizes `n_r`:
//!
//! ```text
//! DL = E - 1/2 sum_{rs} m_rs ln(m_rs / (n_r n_s)) + sum_{i<j} ln A_ij!
//!    + N ln B + B(B+1)/4 ln E
//! ```
//!
//! The last term prices the B(B+1)/2 free entries of the symmetric matrix at
//! half a log E each, matching the bipartite parameter code.

use rand::seq::SliceRandom;
use serde::Serialize;

use super::bipartite::ln_factorial;
use super::fit::{default_cap, initial_labels, mass_ln, xlnx};
use crate::coocnet::CooccurrenceGraph;
use crate::error::{Error, Result};
use crate::seed::rng_for;

const RESTARTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniFit {
    pub partition: Vec<usize>,
    pub n_blocks: usize,
    pub dl_nats: f64,
}

struct Uni<'g> {
    g: &'g CooccurrenceGraph,
    labels: Vec<usize>,
    m: Vec<Vec<f64>>,
    sizes: Vec<f64>,
    blocks: usize,
    constant: f64,
    ln_e: f64,
}

impl<'g> Uni<'g> {
    fn new(g: &'g CooccurrenceGraph, labels: Vec<usize>) -> Self {
        let k = labels.iter().max().map_or(0, |&b| b + 1);
        let mut m = vec![vec![0.0; k]; k];
        for (u, v, w) in g.edges() {
            let w = w as f64;
            m[labels[u]][labels[v]] += w;
            m[labels[v]][labels[u]] += w;
        }
        let mut sizes = vec![0.0; k];
        for &b in &labels {
            sizes[b] += 1.0;
        }
        let e = g.total_weight() as f64;
        let constant = e + g.edges().map(|(_, _, w)| ln_factorial(w)).sum::<f64>();
        Uni {
            g,
            blocks: sizes.iter().filter(|&&n| n > 0.0).count(),
            labels,
            m,
            sizes,
            constant,
            ln_e: e.ln(),
        }
    }

    fn dl(&self) -> f64 {
        let mut f = 0.0;
        let mut deg_term = 0.0;
        for (r, row) in self.m.iter().enumerate() {
            let mut er = 0.0;
            for &x in row {
                f += xlnx(x);
                er += x;
            }
            deg_term += mass_ln(er, self.sizes[r]);
        }
        let b = self.blocks as f64;
        self.constant - 0.5 * f + deg_term
            + self.g.n_nodes() as f64 * b.ln()
            + b * (b + 1.0) / 4.0 * self.ln_e
    }

    fn node_profile(&self, node: usize) -> Vec<(usize, f64)> {
        let mut acc = vec![0.0; self.sizes.len()];
        for (v, w) in self.g.neighbors(node) {
            acc[self.labels[v]] += w as f64;
        }
        acc.into_iter().enumerate().filter(|(_, k)| *k > 0.0).collect()
    }

    fn shift(&mut self, prof: &[(usize, f64)], from: usize, to: usize) {
        // A link to block s moves from pair (from, s) to pair (to, s), in
        // both orientations; neighbors stay where they are.
        for &(s, k) in prof {
            self.m[from][s] -= k;
            self.m[s][from] -= k;
            self.m[to][s] += k;
            self.m[s][to] += k;
        }
    }

    fn apply_move(&mut self, node: usize, to: usize) {
        let from = self.labels[node];
        let prof = self.node_profile(node);
        self.shift(&prof, from, to);
        if self.sizes[to] == 0.0 {
            self.blocks += 1;
        }
        self.sizes[from] -= 1.0;
        self.sizes[to] += 1.0;
        if self.sizes[from] == 0.0 {
            self.blocks -= 1;
        }
        self.labels[node] = to;
    }

    fn try_move(&mut self, node: usize, to: usize) -> f64 {
        let from = self.labels[node];
        self.apply_move(node, to);
        let dl = self.dl();
        self.apply_move(node, from);
        dl
    }

    fn apply_merge(&mut self, r: usize, t: usize) {
        let k = self.sizes.len();
        for s in 0..k {
            let x = self.m[r][s];
            self.m[t][s] += x;
            self.m[r][s] = 0.0;
        }
        for s in 0..k {
            let x = self.m[s][r];
            self.m[s][t] += x;
            self.m[s][r] = 0.0;
        }
        for b in self.labels.iter_mut().filter(|b| **b == r) {
            *b = t;
        }
        self.sizes[t] += self.sizes[r];
        self.sizes[r] = 0.0;
        self.blocks -= 1;
    }

    fn live(&self) -> Vec<usize> {
        (0..self.sizes.len()).filter(|&b| self.sizes[b] > 0.0).collect()
    }

    fn search(&mut self, rng: &mut impl rand::Rng) -> f64 {
        let mut dl = self.dl();
        loop {
            let tol = 1e-10 * dl.abs().max(1.0);
            let mut improved = false;
            let live = self.live();
            let mut best: Option<(f64, usize, usize)> = None;
            for (i, &r) in live.iter().enumerate() {
                for &t in &live[i + 1..] {
                    let saved = (self.m.clone(), self.sizes.clone(), self.labels.clone(), self.blocks);
                    self.apply_merge(t, r);
                    let cand = self.dl();
                    (self.m, self.sizes, self.labels, self.blocks) = saved;
                    if best.is_none_or(|b| cand < b.0) {
                        best = Some((cand, t, r));
                    }
                }
            }
            if let Some((cand, t, r)) = best {
                if cand < dl - tol {
                    self.apply_merge(t, r);
                    dl = cand;
                    improved = true;
                }
            }
            let mut order: Vec<usize> = (0..self.g.n_nodes()).collect();
            order.shuffle(rng);
            for node in order {
                let from = self.labels[node];
                let mut best: Option<(f64, usize)> = None;
                for to in self.live() {
                    if to == from {
                        continue;
                    }
                    let cand = self.try_move(node, to);
                    if best.is_none_or(|b| cand < b.0) {
                        best = Some((cand, to));
                    }
                }
                if let Some((cand, to)) = best {
                    if cand < dl - 1e-10 * dl.abs().max(1.0) {
                        self.apply_move(node, to);
                        dl = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                return dl;
            }
        }
    }
}

/// Description length of a partition of a weighted undirected graph.
pub fn unipartite_description_length(graph: &CooccurrenceGraph, partition: &[usize]) -> Result<f64> {
    if partition.len() != graph.n_nodes() {
        return Err(Error::InvalidArgument(format!(
            "partition covers {} nodes, graph has {}",
            partition.len(),
            graph.n_nodes()
        )));
    }
    if graph.total_weight() == 0 {
        return Err(Error::Undefined("description length of a graph with no edges".into()));
    }
    let (labels, _) = super::fit::compact_labels(partition);
    Ok(Uni::new(graph, labels).dl())
}

/// Fit the unipartite block model; best of a few seeded restarts.
pub fn fit_unipartite(graph: &CooccurrenceGraph, seed: u64, max_blocks: Option<usize>) -> Result<UniFit> {
    if graph.total_weight() == 0 {
        return Err(Error::Undefined("block model fit on a graph with no edges".into()));
    }
    let n = graph.n_nodes();
    let cap = max_blocks.unwrap_or_else(|| default_cap(n)).max(1);
    let mut best: Option<UniFit> = None;
    for restart in 0..RESTARTS {
        let mut rng = rng_for(seed, &format!("sbm-uni:{restart}"));
        let labels = initial_labels(n, cap, &mut rng);
        let mut state = Uni::new(graph, labels);
        let dl = state.search(&mut rng);
        let (partition, n_blocks) = super::fit::compact_labels(&state.labels);
        if best.as_ref().is_none_or(|b| dl < b.dl_nats - 1e-9 * dl.abs().max(1.0)) {
            best = Some(UniFit {
                partition,
                n_blocks,
                dl_nats: dl,
            });
        }
    }
    let fit = best.expect("at least one restart");
    let scratch = unipartite_description_length(graph, &fit.partition)?;
    debug_assert!((scratch - fit.dl_nats).abs() <= 1e-6 * scratch.abs().max(1.0));
    Ok(UniFit { dl_nats: scratch, ..fit })
}
