mod common;

use common::{all_partitions, brute_modularity};
use polis::coocnet::{
    average_clustering, count_blocks, detect_communities, modularity, prune_isolates, rank_distribution,
    CooccurrenceGraph, RankKind,
};
use polis::topicmdl::unipartite_description_length;

fn clique(range: std::ops::Range<usize>, edges: &mut Vec<(usize, usize, u64)>) {
    for u in range.clone() {
        for v in u + 1..range.end {
            edges.push((u, v, 1));
        }
    }
}

#[test]
fn k5_best_partition_is_one_community() {
    let mut e = Vec::new();
    clique(0..5, &mut e);
    let g = CooccurrenceGraph::from_edges(5, &e);
    let best = all_partitions(5, 5)
        .into_iter()
        .map(|p| brute_modularity(&g, &p, true))
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(best.abs() < 1e-12);
    let found = detect_communities(&g, 10, 1, true).unwrap();
    assert!(found.modularity.abs() < 1e-12);
    assert_eq!(found.n_communities, 1);
}

#[test]
fn louvain_matches_exhaustive_on_small_graphs() {
    // Two 4-cliques joined by one bridge, plus a pendant node.
    let mut e = Vec::new();
    clique(0..4, &mut e);
    clique(4..8, &mut e);
    e.push((3, 4, 1));
    e.push((7, 8, 1));
    let g = CooccurrenceGraph::from_edges(9, &e);
    let best = all_partitions(9, 9)
        .into_iter()
        .map(|p| brute_modularity(&g, &p, true))
        .fold(f64::NEG_INFINITY, f64::max);
    let found = detect_communities(&g, 10, 42, true).unwrap();
    assert!((found.modularity - best).abs() < 1e-12, "{} vs {best}", found.modularity);
    assert!((modularity(&g, &found.partition, true) - found.modularity).abs() < 1e-12);
}

#[test]
fn communities_are_deterministic() {
    let mut e = Vec::new();
    clique(0..6, &mut e);
    clique(6..12, &mut e);
    e.push((0, 6, 2));
    let g = CooccurrenceGraph::from_edges(12, &e);
    assert_eq!(detect_communities(&g, 10, 9, true).unwrap(), detect_communities(&g, 10, 9, true).unwrap());
}

#[test]
fn clustering_examples() {
    let k3 = CooccurrenceGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]);
    assert_eq!(average_clustering(&k3).unwrap(), 1.0);
    let path = CooccurrenceGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1)]);
    assert_eq!(average_clustering(&path).unwrap(), 0.0);
    // K4 minus edge (2,3): nodes 0 and 1 have 2 of 3 possible triangles,
    // nodes 2 and 3 sit in their only one.
    let g = CooccurrenceGraph::from_edges(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1)]);
    let manual = (2.0 / 3.0 + 2.0 / 3.0 + 1.0 + 1.0) / 4.0;
    assert!((average_clustering(&g).unwrap() - manual).abs() < 1e-12);
    assert!((manual - 5.0 / 6.0).abs() < 1e-12);
}

#[test]
fn block_counts_follow_dl_comparison() {
    let mut e = Vec::new();
    clique(0..5, &mut e);
    clique(5..10, &mut e);
    let two_k5 = CooccurrenceGraph::from_edges(10, &e);
    let split = [0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
    assert!(
        unipartite_description_length(&two_k5, &split).unwrap()
            < unipartite_description_length(&two_k5, &[0; 10]).unwrap()
    );
    assert_eq!(count_blocks(&two_k5, 42).unwrap(), 2);

    let mut e = Vec::new();
    clique(0..10, &mut e);
    let k10 = CooccurrenceGraph::from_edges(10, &e);
    assert!(
        unipartite_description_length(&k10, &[0; 10]).unwrap()
            < unipartite_description_length(&k10, &split).unwrap()
    );
    assert_eq!(count_blocks(&k10, 42).unwrap(), 1);
}

#[test]
fn single_edge_block_count_is_recorded() {
    let g = CooccurrenceGraph::from_edges(2, &[(0, 1, 1)]);
    let one = unipartite_description_length(&g, &[0, 0]).unwrap();
    let two = unipartite_description_length(&g, &[0, 1]).unwrap();
    let blocks = count_blocks(&g, 42).unwrap();
    println!("single edge: DL(B=1) = {one:.4}, DL(B=2) = {two:.4}, fitted B = {blocks}");
    assert_eq!(blocks, if one <= two { 1 } else { 2 });
}

#[test]
fn rank_examples_and_pruning() {
    let star = CooccurrenceGraph::from_edges(6, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 1), (0, 5, 1)]);
    let degrees: Vec<u64> = rank_distribution(&star, RankKind::Degree).into_iter().map(|r| r.1).collect();
    assert_eq!(degrees, [5, 1, 1, 1, 1, 1]);
    let edge = CooccurrenceGraph::from_edges(2, &[(0, 1, 7)]);
    let s: Vec<(usize, u64)> = rank_distribution(&edge, RankKind::Strength);
    assert_eq!(s, [(1, 7), (2, 7)]);
    let g = CooccurrenceGraph::from_edges(3, &[(0, 1, 1)]);
    assert_eq!(prune_isolates(&g).n_nodes(), 2);
    assert_eq!(prune_isolates(&CooccurrenceGraph::from_edges(3, &[])).n_nodes(), 0);
    assert_eq!(prune_isolates(&edge), edge);
}
