//! Strong and weak component counts, the weak/strong ratio (beta) and
//! per-subject aggregation across iterations.
//!
//! Strong components use Kosaraju's two-pass depth-first search, written
//! iteratively so deep conversation chains do not overflow the stack. Weak
//! components use a union-find over the undirected edge set.

use serde::{Deserialize, Serialize};

use crate::graph::ConversationGraph;
use crate::ingest::Handle;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComponentsError {
    #[error("strong component count is zero; beta is undefined")]
    ZeroStrong,
    #[error("no iterations to summarize")]
    Empty,
    #[error("{summaries} component summaries but {alphas} sentiment values")]
    LengthMismatch { summaries: usize, alphas: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub strong_count: usize,
    pub weak_count: usize,
}

/// One row of a subject table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectSummary {
    pub subject: String,
    #[serde(rename = "strong_count")]
    pub avg_strong: u64,
    #[serde(rename = "weak_count")]
    pub avg_weak: u64,
    #[serde(rename = "ratio_beta")]
    pub beta: f64,
    #[serde(rename = "sentiment_alpha")]
    pub alpha: f64,
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut fwd = vec![Vec::new(); n];
    let mut rev = vec![Vec::new(); n];
    for &(a, b) in edges {
        fwd[a].push(b);
        rev[b].push(a);
    }
    (fwd, rev)
}

/// Strong component id for each node index; ids are assigned in the order
/// the second pass discovers components.
pub fn scc_labels(n: usize, edges: &[(usize, usize)]) -> (Vec<usize>, usize) {
    let (fwd, rev) = adjacency(n, edges);

    // First pass: post-order finish times on the forward graph.
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        stack.push((root, 0));
        while let Some((v, next)) = stack.last_mut() {
            if let Some(&w) = fwd[*v].get(*next) {
                *next += 1;
                if !visited[w] {
                    visited[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(*v);
                stack.pop();
            }
        }
    }

    // Second pass: reverse graph in decreasing finish order.
    const UNSET: usize = usize::MAX;
    let mut label = vec![UNSET; n];
    let mut count = 0;
    let mut work = Vec::new();
    for &root in order.iter().rev() {
        if label[root] != UNSET {
            continue;
        }
        label[root] = count;
        work.push(root);
        while let Some(v) = work.pop() {
            for &w in &rev[v] {
                if label[w] == UNSET {
                    label[w] = count;
                    work.push(w);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            size: vec![1; n],
            sets: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.sets -= 1;
        true
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }
}

pub fn wcc_labels(n: usize, edges: &[(usize, usize)]) -> (Vec<usize>, usize) {
    let mut ds = DisjointSet::new(n);
    for &(a, b) in edges {
        ds.union(a, b);
    }
    let count = ds.set_count();
    let mut ids = vec![usize::MAX; n];
    let mut next = 0;
    let labels = (0..n)
        .map(|v| {
            let r = ds.find(v);
            if ids[r] == usize::MAX {
                ids[r] = next;
                next += 1;
            }
            ids[r]
        })
        .collect();
    (labels, count)
}

fn partition(nodes: &[&Handle], labels: &[usize], count: usize) -> Vec<Vec<Handle>> {
    let mut parts = vec![Vec::new(); count];
    for (i, &l) in labels.iter().enumerate() {
        parts[l].push(nodes[i].clone());
    }
    for p in &mut parts {
        p.sort();
    }
    parts.sort();
    parts
}

/// Maximal mutually-reachable node sets, each sorted, in sorted order.
pub fn strong_components(g: &ConversationGraph) -> Vec<Vec<Handle>> {
    let (nodes, edges) = g.indexed();
    let (labels, count) = scc_labels(nodes.len(), &edges);
    partition(&nodes, &labels, count)
}

/// Components of the graph with edge direction ignored.
pub fn weak_components(g: &ConversationGraph) -> Vec<Vec<Handle>> {
    let (nodes, edges) = g.indexed();
    let (labels, count) = wcc_labels(nodes.len(), &edges);
    partition(&nodes, &labels, count)
}

pub fn component_summary(g: &ConversationGraph) -> ComponentSummary {
    let (nodes, edges) = g.indexed();
    ComponentSummary {
        strong_count: scc_labels(nodes.len(), &edges).1,
        weak_count: wcc_labels(nodes.len(), &edges).1,
    }
}

/// `weak / strong`. The ratio is weak over strong in every printed row of
/// the reference tables (e.g. 245 / 336 = 0.7291666667).
pub fn beta_ratio(strong_count: u64, weak_count: u64) -> Result<f64, ComponentsError> {
    if strong_count == 0 {
        return Err(ComponentsError::ZeroStrong);
    }
    Ok(weak_count as f64 / strong_count as f64)
}

/// Mean of non-negative integers rounded half away from zero, in exact
/// integer arithmetic.
pub fn rounded_mean(values: impl IntoIterator<Item = u64>) -> Option<u64> {
    let (sum, k) = values
        .into_iter()
        .fold((0u128, 0u128), |(s, k), v| (s + v as u128, k + 1));
    (k > 0).then(|| ((2 * sum + k) / (2 * k)) as u64)
}

/// Folds per-iteration counts and sentiment means into one table row.
/// Counts are averaged and rounded before beta is taken; alpha is the plain
/// mean of the iteration alphas.
pub fn summarize_subject(
    subject: &str,
    summaries: &[ComponentSummary],
    alphas: &[f64],
) -> Result<SubjectSummary, ComponentsError> {
    if summaries.is_empty() || alphas.is_empty() {
        return Err(ComponentsError::Empty);
    }
    if summaries.len() != alphas.len() {
        return Err(ComponentsError::LengthMismatch {
            summaries: summaries.len(),
            alphas: alphas.len(),
        });
    }
    let avg_strong = rounded_mean(summaries.iter().map(|s| s.strong_count as u64)).expect("nonempty");
    let avg_weak = rounded_mean(summaries.iter().map(|s| s.weak_count as u64)).expect("nonempty");
    Ok(SubjectSummary {
        subject: subject.to_string(),
        avg_strong,
        avg_weak,
        beta: beta_ratio(avg_strong, avg_weak)?,
        alpha: crate::sentiment::aggregate_alpha(alphas).expect("nonempty"),
    })
}
