//! Directed weighted graphs in compressed adjacency form.
//!
//! Every graph keeps a forward index (out-neighbours) and a reverse index
//! (in-neighbours). Neighbour lists are sorted by id and parallel edges are
//! merged at construction, so two graphs with the same edge multiset compare
//! equal bit for bit.

mod io;

pub use io::{read_edge_list, read_edge_list_remapped, write_edge_list};

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Dense node identifier.
pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    out_weights: Vec<f64>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    in_weights: Vec<f64>,
}

impl Graph {
    /// Builds a graph on `n` nodes from `(src, dst, weight)` triples.
    ///
    /// Parallel edges are merged by summing their weights in input order.
    /// Self-loops are kept.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        if n > NodeId::MAX as usize {
            return Err(Error::config(format!("{n} nodes exceed the id range")));
        }
        let mut list: Vec<(NodeId, NodeId, f64)> = Vec::new();
        for (src, dst, w) in edges {
            check_edge(n, src as u64, dst as u64, w)?;
            list.push((src, dst, w));
        }
        Ok(Self::from_checked(n, list))
    }

    /// `edges` must already be validated.
    pub(crate) fn from_checked(n: usize, mut edges: Vec<(NodeId, NodeId, f64)>) -> Self {
        edges.sort_by_key(|&(s, d, _)| (s, d));

        let mut out_offsets = vec![0usize; n + 1];
        let mut out_targets = Vec::with_capacity(edges.len());
        let mut out_weights: Vec<f64> = Vec::with_capacity(edges.len());
        let mut sources = Vec::with_capacity(edges.len());
        let mut last: Option<(NodeId, NodeId)> = None;
        for (src, dst, w) in edges {
            if last == Some((src, dst)) {
                *out_weights.last_mut().expect("merged edge") += w;
                continue;
            }
            last = Some((src, dst));
            out_targets.push(dst);
            out_weights.push(w);
            sources.push(src);
            out_offsets[src as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
        }

        // Counting sort on the destination. Sources are visited in ascending
        // order, so every in-list comes out sorted.
        let mut in_offsets = vec![0usize; n + 1];
        for &dst in &out_targets {
            in_offsets[dst as usize + 1] += 1;
        }
        for i in 0..n {
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0; out_targets.len()];
        let mut in_weights = vec![0.0; out_targets.len()];
        for ((&src, &dst), &w) in sources.iter().zip(&out_targets).zip(&out_weights) {
            let slot = &mut cursor[dst as usize];
            in_sources[*slot] = src;
            in_weights[*slot] = w;
            *slot += 1;
        }

        Graph {
            out_offsets,
            out_targets,
            out_weights,
            in_offsets,
            in_sources,
            in_weights,
        }
    }

    pub fn node_count(&self) -> usize {
        self.out_offsets.len() - 1
    }

    /// Number of distinct directed edges (after merging).
    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count() == 0
    }

    pub fn out_neighbors(&self, i: NodeId) -> (&[NodeId], &[f64]) {
        let range = self.out_offsets[i as usize]..self.out_offsets[i as usize + 1];
        (&self.out_targets[range.clone()], &self.out_weights[range])
    }

    pub fn in_neighbors(&self, i: NodeId) -> (&[NodeId], &[f64]) {
        let range = self.in_offsets[i as usize]..self.in_offsets[i as usize + 1];
        (&self.in_sources[range.clone()], &self.in_weights[range])
    }

    /// Iterates over all edges as `(src, dst, weight)` sorted by `(src, dst)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |i| {
            let (targets, weights) = self.out_neighbors(i);
            targets.iter().zip(weights).map(move |(&j, &w)| (i, j, w))
        })
    }

    /// Weight of the edge `i -> j`, or zero.
    pub fn weight(&self, i: NodeId, j: NodeId) -> f64 {
        let (targets, weights) = self.out_neighbors(i);
        match targets.binary_search(&j) {
            Ok(pos) => weights[pos],
            Err(_) => 0.0,
        }
    }

    /// Neighbours of `i` in either direction, ascending, excluding `i`
    /// itself. Yields `(j, W(i,j), W(j,i))`.
    pub fn undirected_neighbors(&self, i: NodeId) -> UndirectedNeighbors<'_> {
        let (out_t, out_w) = self.out_neighbors(i);
        let (in_s, in_w) = self.in_neighbors(i);
        UndirectedNeighbors {
            node: i,
            out_t,
            out_w,
            in_s,
            in_w,
            a: 0,
            b: 0,
        }
    }

    /// Collapses every community of `partition` into one node.
    ///
    /// Intra-community weight becomes a self-loop on the super node.
    pub fn aggregate(&self, partition: &Partition) -> Result<Graph> {
        if partition.len() != self.node_count() {
            return Err(Error::SizeMismatch {
                expected: self.node_count(),
                got: partition.len(),
            });
        }
        let labels = partition.labels();
        let count = partition.count();
        if let Some((node, &label)) = labels
            .iter()
            .enumerate()
            .find(|&(_, &l)| l as usize >= count)
        {
            return Err(Error::LabelOutOfRange { node, label, count });
        }
        let edges = self
            .edges()
            .map(|(i, j, w)| (labels[i as usize], labels[j as usize], w))
            .collect();
        Ok(Graph::from_checked(count, edges))
    }
}

fn check_edge(n: usize, src: u64, dst: u64, w: f64) -> Result<()> {
    let reason = if src as usize >= n || dst as usize >= n {
        format!("node id out of range for {n} nodes")
    } else if !w.is_finite() {
        format!("weight {w} is not finite")
    } else if w <= 0.0 {
        format!("weight {w} is not positive")
    } else {
        return Ok(());
    };
    Err(Error::InvalidEdge { src, dst, reason })
}

/// Merge of the sorted out- and in-lists of one node.
pub struct UndirectedNeighbors<'a> {
    node: NodeId,
    out_t: &'a [NodeId],
    out_w: &'a [f64],
    in_s: &'a [NodeId],
    in_w: &'a [f64],
    a: usize,
    b: usize,
}

impl Iterator for UndirectedNeighbors<'_> {
    type Item = (NodeId, f64, f64);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let next_out = self.out_t.get(self.a).copied();
            let next_in = self.in_s.get(self.b).copied();
            let item = match (next_out, next_in) {
                (None, None) => return None,
                (Some(j), None) => {
                    self.a += 1;
                    (j, self.out_w[self.a - 1], 0.0)
                }
                (None, Some(j)) => {
                    self.b += 1;
                    (j, 0.0, self.in_w[self.b - 1])
                }
                (Some(x), Some(y)) if x < y => {
                    self.a += 1;
                    (x, self.out_w[self.a - 1], 0.0)
                }
                (Some(x), Some(y)) if y < x => {
                    self.b += 1;
                    (y, 0.0, self.in_w[self.b - 1])
                }
                (Some(x), Some(_)) => {
                    self.a += 1;
                    self.b += 1;
                    (x, self.out_w[self.a - 1], self.in_w[self.b - 1])
                }
            };
            if item.0 != self.node {
                return Some(item);
            }
        }
    }
}

/// Per-node strengths and the total weight of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Strengths {
    pub s_out: Vec<f64>,
    pub s_in: Vec<f64>,
    /// Sum of all edge weights, accumulated over `s_out` in node order.
    pub total: f64,
}

impl Strengths {
    pub fn new(graph: &Graph) -> Self {
        let n = graph.node_count();
        let s_out: Vec<f64> = (0..n as NodeId)
            .map(|i| graph.out_neighbors(i).1.iter().sum())
            .collect();
        let s_in: Vec<f64> = (0..n as NodeId)
            .map(|i| graph.in_neighbors(i).1.iter().sum())
            .collect();
        let total = s_out.iter().sum();
        Strengths { s_out, s_in, total }
    }

    pub fn len(&self) -> usize {
        self.s_out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_out.is_empty()
    }
}
