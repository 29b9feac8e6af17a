#![allow(dead_code)]

use std::collections::HashMap;

use polis::coocnet::CooccurrenceGraph;
use polis::topicmdl::BipartiteCountGraph;

/// Normalized mutual information, arithmetic-mean normalization. Two
/// single-cluster labelings count as identical.
pub fn nmi(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let mut ca: HashMap<usize, f64> = HashMap::new();
    let mut cb: HashMap<usize, f64> = HashMap::new();
    let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *ca.entry(x).or_default() += 1.0;
        *cb.entry(y).or_default() += 1.0;
        *joint.entry((x, y)).or_default() += 1.0;
    }
    let h = |m: &HashMap<usize, f64>| -> f64 { m.values().map(|&c| -(c / n) * (c / n).ln()).sum() };
    let (ha, hb) = (h(&ca), h(&cb));
    if ha == 0.0 && hb == 0.0 {
        return 1.0;
    }
    let mi: f64 = joint
        .iter()
        .map(|(&(x, y), &c)| (c / n) * ((c * n) / (ca[&x] * cb[&y])).ln())
        .sum();
    2.0 * mi / (ha + hb)
}

/// Modularity straight from the definition over all node pairs.
pub fn brute_modularity(g: &CooccurrenceGraph, part: &[usize], weighted: bool) -> f64 {
    let n = g.n_nodes();
    let a = |i: usize, j: usize| -> f64 {
        match g.weight(i, j) {
            Some(w) if weighted => w as f64,
            Some(_) => 1.0,
            None => 0.0,
        }
    };
    let k: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a(i, j)).sum()).collect();
    let two_m: f64 = k.iter().sum();
    if two_m == 0.0 {
        return 0.0;
    }
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if part[i] == part[j] {
                q += a(i, j) - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `n` items in restricted-growth form, optionally
/// capped at `max_blocks` blocks.
pub fn all_partitions(n: usize, max_blocks: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, cap: usize, cur: &mut Vec<usize>, used: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=used.min(cap - 1) {
            cur.push(b);
            rec(i + 1, n, cap, cur, used.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return vec![Vec::new()];
    }
    rec(0, n, max_blocks, &mut Vec::new(), 0, &mut out);
    out
}

/// Planted bipartite graph: `groups` word groups and doc groups of the given
/// sizes; word group g links only to doc group g with multiplicity `mult`.
pub fn planted_bipartite(groups: usize, words_per: usize, docs_per: usize, mult: u64) -> (BipartiteCountGraph, Vec<usize>, Vec<usize>) {
    let nw = groups * words_per;
    let nd = groups * docs_per;
    let wb: Vec<usize> = (0..nw).map(|w| w / words_per).collect();
    let db: Vec<usize> = (0..nd).map(|d| d / docs_per).collect();
    let mut entries = Vec::new();
    for (w, &bw) in wb.iter().enumerate() {
        for (d, &bd) in db.iter().enumerate() {
            if bw == bd {
                entries.push((w, d, mult));
            }
        }
    }
    let g = BipartiteCountGraph::from_entries(
        (0..nw).map(|i| format!("w{i:02}")).collect(),
        (0..nd).map(|i| format!("d{i:02}")).collect(),
        entries,
    );
    (g, wb, db)
}
