//! Edge-list and GraphML export.

use std::fmt::Write;

use super::CooccurrenceGraph;

/// `source<TAB>target<TAB>weight`, one edge per line.
pub fn to_tsv(graph: &CooccurrenceGraph) -> String {
    let mut out = String::new();
    for (u, v, w) in graph.edges() {
        let _ = writeln!(out, "{}\t{}\t{}", graph.label(u), graph.label(v), w);
    }
    out
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Display size in 1..=40, linear in degree between the graph's minimum and
/// maximum degree.
pub fn node_size(graph: &CooccurrenceGraph, i: usize) -> f64 {
    let degrees = (0..graph.n_nodes()).map(|j| graph.degree(j));
    let (lo, hi) = degrees.fold((usize::MAX, 0), |(lo, hi), d| (lo.min(d), hi.max(d)));
    if hi <= lo {
        return 1.0;
    }
    1.0 + 39.0 * (graph.degree(i) - lo) as f64 / (hi - lo) as f64
}

pub fn to_graphml(graph: &CooccurrenceGraph) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"docs\" for=\"node\" attr.name=\"documents\" attr.type=\"long\"/>\n");
    out.push_str("  <key id=\"size\" for=\"node\" attr.name=\"size\" attr.type=\"double\"/>\n");
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    let id = graph.year.map_or_else(|| "G".to_string(), |y| format!("cooc{y}"));
    let _ = writeln!(out, "  <graph id=\"{id}\" edgedefault=\"undirected\">");
    for i in 0..graph.n_nodes() {
        let _ = writeln!(
            out,
            "    <node id=\"n{i}\"><data key=\"label\">{}</data><data key=\"docs\">{}</data><data key=\"size\">{:.3}</data></node>",
            xml_escape(graph.label(i)),
            graph.doc_count(i),
            node_size(graph, i)
        );
    }
    for (u, v, w) in graph.edges() {
        let _ = writeln!(
            out,
            "    <edge source=\"n{u}\" target=\"n{v}\"><data key=\"weight\">{w}</data></edge>"
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}
