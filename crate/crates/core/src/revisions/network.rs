//! Directed revert network: editors as nodes, reverts as weighted edges.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use crate::error::Result;
use crate::revisions::record::{RevertEvent, RevisionRecord};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Edge {
    pub multiplicity: u64,
    pub times: Vec<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RevertNetwork {
    /// Editors taking part in at least one interpersonal revert, with
    /// their total revision counts.
    pub nodes: BTreeMap<String, u64>,
    /// `(reverter, reverted)` to edge.
    pub edges: BTreeMap<(String, String), Edge>,
}

/// Aggregates non-self reverts. Node edit counts come from `revisions`.
pub fn build_revert_network(events: &[RevertEvent], revisions: &[RevisionRecord]) -> RevertNetwork {
    let mut edit_counts: BTreeMap<&str, u64> = BTreeMap::new();
    for r in revisions {
        *edit_counts.entry(&r.editor_id).or_default() += 1;
    }
    let mut net = RevertNetwork::default();
    for e in events.iter().filter(|e| !e.self_revert && e.reverter != e.reverted) {
        let edge = net.edges.entry((e.reverter.clone(), e.reverted.clone())).or_default();
        edge.multiplicity += 1;
        edge.times.push(e.time);
        for who in [&e.reverter, &e.reverted] {
            net.nodes
                .entry(who.clone())
                .or_insert_with(|| edit_counts.get(who.as_str()).copied().unwrap_or(0));
        }
    }
    for edge in net.edges.values_mut() {
        edge.times.sort_unstable();
    }
    net
}

impl RevertNetwork {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Triangles in the undirected simple graph underlying the network.
    pub fn triangle_count(&self) -> u64 {
        let mut adj: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for (a, b) in self.edges.keys() {
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }
        let mut count = 0;
        for (u, nu) in &adj {
            for v in nu.range::<&str, _>((std::ops::Bound::Excluded(u), std::ops::Bound::Unbounded)) {
                for w in adj[v].range::<&str, _>((std::ops::Bound::Excluded(v), std::ops::Bound::Unbounded)) {
                    if nu.contains(w) {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    /// GraphML export with `edits` on nodes and `weight` on edges.
    pub fn write_graphml<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
        writeln!(out, r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#)?;
        writeln!(out, r#"  <key id="edits" for="node" attr.name="edits" attr.type="long"/>"#)?;
        writeln!(out, r#"  <key id="weight" for="edge" attr.name="weight" attr.type="long"/>"#)?;
        writeln!(out, r#"  <graph id="reverts" edgedefault="directed">"#)?;
        for (id, edits) in &self.nodes {
            writeln!(
                out,
                r#"    <node id="{}"><data key="edits">{edits}</data></node>"#,
                xml_escape(id)
            )?;
        }
        for ((a, b), e) in &self.edges {
            writeln!(
                out,
                r#"    <edge source="{}" target="{}"><data key="weight">{}</data></edge>"#,
                xml_escape(a),
                xml_escape(b),
                e.multiplicity
            )?;
        }
        writeln!(out, "  </graph>\n</graphml>")?;
        Ok(())
    }
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
