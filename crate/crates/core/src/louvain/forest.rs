//! Assignment graphs: every node points at one node of its community.
//!
//! The functional graph `i -> a(i)` splits into weakly connected
//! components, each holding exactly one directed cycle (possibly a
//! self-loop) with trees hanging off it. The components are the
//! communities.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, Strengths};
use crate::partition::Partition;
use crate::quality::{pair_gain, NodeMarks};

#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentForest {
    assign: Vec<NodeId>,
    partition: Partition,
    on_cycle: Vec<bool>,
}

impl AssignmentForest {
    pub fn new(assign: Vec<NodeId>) -> Result<Self> {
        let n = assign.len();
        if let Some((node, &target)) = assign.iter().enumerate().find(|&(_, &t)| t as usize >= n) {
            return Err(Error::InvalidEdge {
                src: node as u64,
                dst: target as u64,
                reason: format!("assignment target out of range for {n} nodes"),
            });
        }
        Ok(Self::from_valid(assign))
    }

    pub(crate) fn from_valid(assign: Vec<NodeId>) -> Self {
        let (partition, on_cycle) = extract_components(&assign);
        AssignmentForest {
            assign,
            partition,
            on_cycle,
        }
    }

    /// Every node assigned to itself.
    pub fn identity(n: usize) -> Self {
        Self::from_valid((0..n as NodeId).collect())
    }

    pub fn len(&self) -> usize {
        self.assign.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assign.is_empty()
    }

    pub fn assignment(&self) -> &[NodeId] {
        &self.assign
    }

    pub fn into_assignment(self) -> Vec<NodeId> {
        self.assign
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn labels(&self) -> &[u32] {
        self.partition.labels()
    }

    pub fn community_count(&self) -> usize {
        self.partition.count()
    }

    pub fn on_cycle(&self, i: NodeId) -> bool {
        self.on_cycle[i as usize]
    }

    pub fn cycle_flags(&self) -> &[bool] {
        &self.on_cycle
    }

    /// Inverse assignment, without self-loops.
    pub fn children(&self) -> Children {
        let n = self.assign.len();
        let mut offsets = vec![0usize; n + 1];
        for (i, &t) in self.assign.iter().enumerate() {
            if t as usize != i {
                offsets[t as usize + 1] += 1;
            }
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut list = vec![0; offsets[n]];
        for (i, &t) in self.assign.iter().enumerate() {
            if t as usize != i {
                list[cursor[t as usize]] = i as NodeId;
                cursor[t as usize] += 1;
            }
        }
        Children { offsets, list }
    }

    /// `i` together with every node that has an assignment path into `i`.
    /// For a cycle node this is its whole community.
    pub fn tail(&self, i: NodeId, children: &Children) -> Vec<NodeId> {
        let mut marks = NodeMarks::new(self.len());
        let mut out = Vec::new();
        collect_tail(i, children, &mut marks, &mut out);
        out
    }

    /// Cycle nodes of the community containing `i`, starting at the smallest
    /// id and following the assignment.
    pub fn cycle_of(&self, i: NodeId) -> Vec<NodeId> {
        let mut v = i;
        while !self.on_cycle[v as usize] {
            v = self.assign[v as usize];
        }
        let mut cycle = vec![v];
        let mut w = self.assign[v as usize];
        while w != v {
            cycle.push(w);
            w = self.assign[w as usize];
        }
        let start = cycle
            .iter()
            .enumerate()
            .min_by_key(|&(_, &c)| c)
            .map(|(k, _)| k)
            .unwrap_or(0);
        cycle.rotate_left(start);
        cycle
    }
}

pub(crate) fn collect_tail(
    i: NodeId,
    children: &Children,
    marks: &mut NodeMarks,
    out: &mut Vec<NodeId>,
) {
    marks.reset();
    out.clear();
    marks.mark(i);
    out.push(i);
    let mut head = 0;
    while head < out.len() {
        let v = out[head];
        head += 1;
        for &c in children.of(v) {
            if !marks.contains(c) {
                marks.mark(c);
                out.push(c);
            }
        }
    }
}

/// Inverse of an assignment in compressed form; children ascending.
#[derive(Debug, Clone)]
pub struct Children {
    offsets: Vec<usize>,
    list: Vec<NodeId>,
}

impl Children {
    pub fn of(&self, i: NodeId) -> &[NodeId] {
        &self.list[self.offsets[i as usize]..self.offsets[i as usize + 1]]
    }
}

/// Weakly connected components of a functional graph, plus a flag for
/// every node lying on its component's cycle.
///
/// Runs in linear time by walking `a(.)` from each unvisited node until
/// the walk reaches a labeled node or closes on itself. Components are
/// numbered by smallest member.
pub fn extract_components(assign: &[NodeId]) -> (Partition, Vec<bool>) {
    const UNSET: u32 = u32::MAX;
    let n = assign.len();
    let mut label = vec![UNSET; n];
    let mut walk = vec![UNSET; n];
    let mut on_cycle = vec![false; n];
    let mut path = Vec::new();
    let mut next = 0u32;
    for start in 0..n {
        if label[start] != UNSET {
            continue;
        }
        path.clear();
        let mut v = start;
        while label[v] == UNSET && walk[v] != start as u32 {
            walk[v] = start as u32;
            path.push(v);
            v = assign[v] as usize;
        }
        let id = if label[v] == UNSET {
            // Closed a new cycle at v.
            let mut w = v;
            loop {
                on_cycle[w] = true;
                w = assign[w] as usize;
                if w == v {
                    break;
                }
            }
            next += 1;
            next - 1
        } else {
            label[v]
        };
        for &p in &path {
            label[p] = id;
        }
    }
    let partition = Partition::from_dense(label, next as usize)
        .expect("component labels are dense by construction");
    (partition, on_cycle)
}

/// Points every node at the neighbour (either edge direction) whose
/// singleton merge gains the most, or at itself when no gain is positive.
/// Ties go to the lowest neighbour id.
pub fn find_assignment(graph: &Graph, strengths: &Strengths) -> AssignmentForest {
    AssignmentForest::from_valid(best_neighbors(graph, strengths))
}

pub(crate) fn best_neighbors(graph: &Graph, strengths: &Strengths) -> Vec<NodeId> {
    (0..graph.node_count() as NodeId)
        .into_par_iter()
        .with_min_len(256)
        .map(|i| {
            let mut best = i;
            let mut best_gain = 0.0;
            for (j, w_ij, w_ji) in graph.undirected_neighbors(i) {
                let gain = pair_gain(strengths, i, j, w_ij, w_ji);
                if gain > best_gain {
                    best_gain = gain;
                    best = j;
                }
            }
            best
        })
        .collect()
}
