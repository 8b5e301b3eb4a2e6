//! Directed user-interaction multigraph built from a batch of statuses.
//!
//! Every reference points from the status author to the referenced user.
//! Parallel edges and self-loops are kept as they appear in the data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ingest::{Handle, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Reply,
    Mention,
    Retweet,
    Quote,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 4] = [EdgeKind::Reply, EdgeKind::Mention, EdgeKind::Retweet, EdgeKind::Quote];

    pub fn label(self) -> &'static str {
        match self {
            EdgeKind::Reply => "reply",
            EdgeKind::Mention => "mention",
            EdgeKind::Retweet => "retweet",
            EdgeKind::Quote => "quote",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub source: Handle,
    pub target: Handle,
    pub kind: EdgeKind,
    pub status_id: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConversationGraph {
    nodes: BTreeSet<Handle>,
    edges: Vec<Edge>,
}

impl ConversationGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, h: Handle) {
        self.nodes.insert(h);
    }

    /// Adds an edge, inserting both endpoints as nodes.
    pub fn add_edge(&mut self, edge: Edge) {
        self.nodes.insert(edge.source.clone());
        self.nodes.insert(edge.target.clone());
        self.edges.push(edge);
    }

    pub fn nodes(&self) -> &BTreeSet<Handle> {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in lexicographic order, with the index map used by the
    /// component algorithms.
    pub fn indexed(&self) -> (Vec<&Handle>, Vec<(usize, usize)>) {
        let nodes: Vec<&Handle> = self.nodes.iter().collect();
        let index: BTreeMap<&Handle, usize> = nodes.iter().enumerate().map(|(i, h)| (*h, i)).collect();
        let pairs = self
            .edges
            .iter()
            .map(|e| (index[&e.source], index[&e.target]))
            .collect();
        (nodes, pairs)
    }

    /// Canonical DOT rendering: nodes and edges sorted lexicographically.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n");
        for n in &self.nodes {
            let _ = writeln!(out, "  {};", dot_id(n.as_str()));
        }
        let mut edges: Vec<&Edge> = self.edges.iter().collect();
        edges.sort();
        for e in edges {
            let _ = writeln!(
                out,
                "  {} -> {} [kind={}, status={}];",
                dot_id(e.source.as_str()),
                dot_id(e.target.as_str()),
                e.kind.label(),
                dot_id(&e.status_id)
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }
}

fn dot_id(s: &str) -> String {
    let bare = !s.is_empty()
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !s.starts_with(|c: char| c.is_ascii_digit());
    if bare {
        s.to_string()
    } else {
        format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

/// Builds the interaction graph of a batch. Authors are always nodes when
/// `include_isolates` is set; otherwise only users incident to an included
/// edge appear.
pub fn build_graph(statuses: &[Status], kinds: &BTreeSet<EdgeKind>, include_isolates: bool) -> ConversationGraph {
    let mut g = ConversationGraph::new();
    for s in statuses {
        if include_isolates {
            g.add_node(s.author.clone());
        }
        let refs = s
            .reply_to
            .iter()
            .map(|h| (h, EdgeKind::Reply))
            .chain(s.mentions.iter().map(|h| (h, EdgeKind::Mention)))
            .chain(s.retweet_of.iter().map(|h| (h, EdgeKind::Retweet)))
            .chain(s.quote_of.iter().map(|h| (h, EdgeKind::Quote)));
        for (target, kind) in refs {
            if kinds.contains(&kind) {
                g.add_edge(Edge {
                    source: s.author.clone(),
                    target: target.clone(),
                    kind,
                    status_id: s.id.clone(),
                });
            }
        }
    }
    g
}

pub fn all_kinds() -> BTreeSet<EdgeKind> {
    EdgeKind::ALL.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};
    use proptest::prelude::*;

    fn h(s: &str) -> Handle {
        Handle::parse(s).unwrap()
    }

    fn status(id: &str, author: &str) -> Status {
        Status::new(id, h(author), "", Utc.with_ymd_and_hms(2022, 1, 1, 0, 0, 0).unwrap())
    }

    #[test]
    fn single_mention() {
        let mut s = status("1", "a");
        s.mentions.push(h("b"));
        let g = build_graph(&[s], &all_kinds(), true);
        assert_eq!(g.node_count(), 2);
        assert_eq!(
            g.edges(),
            [Edge {
                source: h("a"),
                target: h("b"),
                kind: EdgeKind::Mention,
                status_id: "1".into()
            }]
        );
    }

    #[test]
    fn reciprocal_reply() {
        let mut s1 = status("1", "a");
        s1.reply_to = Some(h("b"));
        let mut s2 = status("2", "b");
        s2.reply_to = Some(h("a"));
        let g = build_graph(&[s1, s2], &all_kinds(), true);
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges()[0].source, g.edges()[1].target);
    }

    #[test]
    fn isolates_flag() {
        let statuses: Vec<_> = (0..5).map(|i| status(&i.to_string(), &format!("u{i}"))).collect();
        let g = build_graph(&statuses, &all_kinds(), true);
        assert_eq!((g.node_count(), g.edge_count()), (5, 0));
        let g = build_graph(&statuses, &all_kinds(), false);
        assert!(g.is_empty());
    }

    #[test]
    fn kind_filter_and_self_loop() {
        let mut s = status("1", "a");
        s.reply_to = Some(h("a"));
        s.retweet_of = Some(h("c"));
        let only_replies: BTreeSet<_> = [EdgeKind::Reply].into_iter().collect();
        let g = build_graph(&[s], &only_replies, false);
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges()[0].source, g.edges()[0].target);
    }

    #[test]
    fn dot_export() {
        assert_eq!(
            ConversationGraph::new().to_dot().split_whitespace().collect::<String>(),
            "digraph{}"
        );
        let mut s = status("1", "a");
        s.mentions.push(h("b"));
        let dot = build_graph(&[s], &all_kinds(), true).to_dot();
        assert!(dot.contains("a -> b"), "{dot}");
        let mut g = ConversationGraph::new();
        g.add_node(h("9lives"));
        assert!(g.to_dot().contains("\"9lives\";"));
    }

    #[test]
    fn json_export_mirrors_fields() {
        let mut s = status("1", "a");
        s.quote_of = Some(h("b"));
        let json: serde_json::Value = serde_json::from_str(&build_graph(&[s], &all_kinds(), true).to_json()).unwrap();
        assert_eq!(json["nodes"], serde_json::json!(["a", "b"]));
        assert_eq!(json["edges"][0]["kind"], "quote");
        assert_eq!(json["edges"][0]["status_id"], "1");
    }

    fn arb_statuses() -> impl Strategy<Value = Vec<Status>> {
        let user = "[a-e]";
        proptest::collection::vec(
            (
                user,
                proptest::option::of(user),
                proptest::collection::vec(user, 0..3),
                proptest::option::of(user),
            ),
            0..12,
        )
        .prop_map(|rows| {
            rows.into_iter()
                .enumerate()
                .map(|(i, (a, r, m, q))| {
                    let mut s = status(&i.to_string(), &a);
                    s.reply_to = r.map(|x| h(&x));
                    s.mentions = m.iter().map(|x| h(x)).collect();
                    s.quote_of = q.map(|x| h(&x));
                    s
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn edge_count_matches_references(statuses in arb_statuses(), isolates: bool) {
            let g = build_graph(&statuses, &all_kinds(), isolates);
            let refs: usize = statuses
                .iter()
                .map(|s| s.reply_to.iter().count() + s.mentions.len() + s.retweet_of.iter().count() + s.quote_of.iter().count())
                .sum();
            prop_assert_eq!(g.edge_count(), refs);
            for e in g.edges() {
                prop_assert!(g.nodes().contains(&e.source) && g.nodes().contains(&e.target));
            }
            prop_assert_eq!(build_graph(&statuses, &all_kinds(), isolates), g);
        }

        #[test]
        fn dot_ignores_edge_order(statuses in arb_statuses()) {
            let g = build_graph(&statuses, &all_kinds(), true);
            let mut rev = ConversationGraph::new();
            for n in g.nodes() {
                rev.add_node(n.clone());
            }
            for e in g.edges().iter().rev() {
                rev.add_edge(e.clone());
            }
            prop_assert_eq!(g.to_dot(), rev.to_dot());
        }
    }
}
