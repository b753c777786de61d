//! Partition quality and the modularity gain kernels.
//!
//! The score of a partition under the configuration null model is the
//! weighted directed modularity
//!
//! ```text
//! Q = 1/m * sum_{i,j same community} [ W(i,j) - s_out(i) * s_in(j) / m ]
//! ```
//!
//! Every gain kernel below returns an exact score difference `Q(after) -
//! Q(before)`, evaluated from community aggregates in time proportional to
//! the edges incident to the moved nodes.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, Strengths};
use crate::partition::Partition;

/// Per-pair reward and penalty coefficients of the energy
/// `-sum [alpha_ij W(i,j) - beta_ij] delta(c_i, c_j)`.
pub trait PairCoefficients: Send + Sync {
    fn alpha(&self, i: NodeId, j: NodeId) -> f64;
    fn beta(&self, i: NodeId, j: NodeId) -> f64;
}

/// `alpha = 1`, `beta = s_out(i) * s_in(j) / m`: the expected weight from
/// `i` to `j` when edges are rewired keeping all strengths.
#[derive(Debug, Clone)]
pub struct ConfigurationModel {
    strengths: Strengths,
}

impl ConfigurationModel {
    pub fn new(strengths: Strengths) -> Self {
        ConfigurationModel { strengths }
    }
}

impl PairCoefficients for ConfigurationModel {
    fn alpha(&self, _: NodeId, _: NodeId) -> f64 {
        1.0
    }

    fn beta(&self, i: NodeId, j: NodeId) -> f64 {
        let s = &self.strengths;
        if s.total == 0.0 {
            return 0.0;
        }
        s.s_out[i as usize] * s.s_in[j as usize] / s.total
    }
}

#[derive(Clone, Default)]
pub enum QualityParams {
    /// Weighted directed modularity.
    #[default]
    Modularity,
    /// Sign-flipped energy with caller-supplied coefficients. The
    /// partition-independent constant is never included.
    Generic(Arc<dyn PairCoefficients>),
}

impl std::fmt::Debug for QualityParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QualityParams::Modularity => f.write_str("Modularity"),
            QualityParams::Generic(_) => f.write_str("Generic(..)"),
        }
    }
}

/// Scores a partition; larger is better.
///
/// The generic model loops over all same-community pairs and therefore
/// costs the sum of squared community sizes.
pub fn score(
    graph: &Graph,
    strengths: &Strengths,
    partition: &Partition,
    params: &QualityParams,
) -> Result<f64> {
    if partition.len() != graph.node_count() {
        return Err(Error::SizeMismatch {
            expected: graph.node_count(),
            got: partition.len(),
        });
    }
    match params {
        QualityParams::Modularity => Ok(modularity(graph, strengths, partition.labels())),
        QualityParams::Generic(coef) => {
            let mut total = 0.0;
            for members in partition.members() {
                for &i in &members {
                    for &j in &members {
                        total += coef.alpha(i, j) * graph.weight(i, j) - coef.beta(i, j);
                    }
                }
            }
            Ok(total)
        }
    }
}

/// Weighted directed modularity of an arbitrary labeling.
///
/// Labels need not be dense; memory is proportional to the largest label.
/// Returns 0 for a graph without edges.
pub fn modularity(graph: &Graph, strengths: &Strengths, labels: &[u32]) -> f64 {
    let m = strengths.total;
    if m == 0.0 {
        return 0.0;
    }
    let bound = labels.iter().copied().max().map_or(0, |l| l as usize + 1);
    let mut internal = vec![0.0; bound];
    let mut s_out = vec![0.0; bound];
    let mut s_in = vec![0.0; bound];
    for (i, &c) in labels.iter().enumerate() {
        let c = c as usize;
        s_out[c] += strengths.s_out[i];
        s_in[c] += strengths.s_in[i];
        let (targets, weights) = graph.out_neighbors(i as NodeId);
        for (&j, &w) in targets.iter().zip(weights) {
            if labels[j as usize] as usize == c {
                internal[c] += w;
            }
        }
    }
    let mut q = 0.0;
    for c in 0..bound {
        q += internal[c] / m - (s_out[c] / m) * (s_in[c] / m);
    }
    q
}

/// Summed strengths and member counts per community.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityAggregates {
    pub s_out: Vec<f64>,
    pub s_in: Vec<f64>,
    pub size: Vec<u32>,
}

impl CommunityAggregates {
    /// Derives aggregates from scratch. `count` must exceed every label.
    pub fn new(strengths: &Strengths, labels: &[u32], count: usize) -> Self {
        let mut aggs = CommunityAggregates {
            s_out: vec![0.0; count],
            s_in: vec![0.0; count],
            size: vec![0; count],
        };
        for (i, &c) in labels.iter().enumerate() {
            aggs.add(strengths, i as NodeId, c);
        }
        aggs
    }

    pub fn len(&self) -> usize {
        self.size.len()
    }

    pub fn is_empty(&self) -> bool {
        self.size.is_empty()
    }

    /// Appends an empty community and returns its label.
    pub fn push_empty(&mut self) -> u32 {
        self.s_out.push(0.0);
        self.s_in.push(0.0);
        self.size.push(0);
        (self.size.len() - 1) as u32
    }

    pub fn add(&mut self, strengths: &Strengths, i: NodeId, c: u32) {
        let c = c as usize;
        self.s_out[c] += strengths.s_out[i as usize];
        self.s_in[c] += strengths.s_in[i as usize];
        self.size[c] += 1;
    }

    pub fn remove(&mut self, strengths: &Strengths, i: NodeId, c: u32) {
        let c = c as usize;
        self.s_out[c] -= strengths.s_out[i as usize];
        self.s_in[c] -= strengths.s_in[i as usize];
        self.size[c] -= 1;
        if self.size[c] == 0 {
            // Clear accumulated rounding residue.
            self.s_out[c] = 0.0;
            self.s_in[c] = 0.0;
        }
    }

    /// Compares against another set of aggregates with a relative tolerance
    /// on the strength sums.
    pub fn approx_eq(&self, other: &CommunityAggregates, rel: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0);
        self.size == other.size
            && self
                .s_out
                .iter()
                .zip(&other.s_out)
                .all(|(&a, &b)| close(a, b))
            && self
                .s_in
                .iter()
                .zip(&other.s_in)
                .all(|(&a, &b)| close(a, b))
    }
}

/// Gain of joining `i` with the single node `j`, given `W(i,j)` and
/// `W(j,i)`. Symmetric in `i` and `j`.
#[inline]
pub fn pair_gain(strengths: &Strengths, i: NodeId, j: NodeId, w_ij: f64, w_ji: f64) -> f64 {
    let m = strengths.total;
    if m == 0.0 {
        return 0.0;
    }
    let (i, j) = (i as usize, j as usize);
    let null = strengths.s_out[i] * strengths.s_in[j] + strengths.s_in[i] * strengths.s_out[j];
    (w_ij + w_ji) / m - null / (m * m)
}

/// Gain of inserting the isolated node `i` into community `c`.
///
/// `i` must not be counted in `c`'s aggregates; its label is ignored. The
/// self-loop of `i` is excluded: it contributes the same `(i,i)` term to
/// every candidate community, so both before and after states carry it
/// and the result equals the score difference exactly.
pub fn gain_insert(
    graph: &Graph,
    strengths: &Strengths,
    aggs: &CommunityAggregates,
    labels: &[u32],
    i: NodeId,
    c: u32,
) -> f64 {
    let m = strengths.total;
    if m == 0.0 || aggs.size[c as usize] == 0 {
        return 0.0;
    }
    let link = link_weight(graph, labels, i, c);
    let iu = i as usize;
    let cu = c as usize;
    link / m - (strengths.s_out[iu] * aggs.s_in[cu] + strengths.s_in[iu] * aggs.s_out[cu]) / (m * m)
}

/// Gain of keeping `i` in its community versus isolating it; negative
/// values mark nodes that hurt their community.
pub fn local_gain(
    graph: &Graph,
    strengths: &Strengths,
    aggs: &CommunityAggregates,
    labels: &[u32],
    i: NodeId,
) -> f64 {
    let m = strengths.total;
    let c = labels[i as usize] as usize;
    if m == 0.0 || aggs.size[c] <= 1 {
        return 0.0;
    }
    let iu = i as usize;
    let rest_out = aggs.s_out[c] - strengths.s_out[iu];
    let rest_in = aggs.s_in[c] - strengths.s_in[iu];
    let link = link_weight(graph, labels, i, c as u32);
    link / m - (strengths.s_out[iu] * rest_in + strengths.s_in[iu] * rest_out) / (m * m)
}

/// `W(i,c) + W(c,i)` over members of `c` other than `i`.
fn link_weight(graph: &Graph, labels: &[u32], i: NodeId, c: u32) -> f64 {
    let mut link = 0.0;
    let (targets, weights) = graph.out_neighbors(i);
    for (&j, &w) in targets.iter().zip(weights) {
        if j != i && labels[j as usize] == c {
            link += w;
        }
    }
    let (sources, weights) = graph.in_neighbors(i);
    for (&j, &w) in sources.iter().zip(weights) {
        if j != i && labels[j as usize] == c {
            link += w;
        }
    }
    link
}

/// Reusable membership marks for node sets.
#[derive(Debug, Clone)]
pub(crate) struct NodeMarks {
    stamp: Vec<u32>,
    current: u32,
}

impl NodeMarks {
    pub(crate) fn new(n: usize) -> Self {
        NodeMarks {
            stamp: vec![0; n],
            current: 0,
        }
    }

    pub(crate) fn reset(&mut self) {
        self.current = self.current.wrapping_add(1);
        if self.current == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.current = 1;
        }
    }

    #[inline]
    pub(crate) fn mark(&mut self, i: NodeId) {
        self.stamp[i as usize] = self.current;
    }

    #[inline]
    pub(crate) fn contains(&self, i: NodeId) -> bool {
        self.stamp[i as usize] == self.current
    }
}

/// Gain of relabeling exactly the nodes of `moved` from `from` to `to`.
///
/// `moved` must be a subset of `from`. `to = None` stands for a fresh empty
/// community. Returns 0 when `to == from`.
pub fn gain_switch(
    graph: &Graph,
    strengths: &Strengths,
    aggs: &CommunityAggregates,
    labels: &[u32],
    moved: &[NodeId],
    from: u32,
    to: Option<u32>,
) -> f64 {
    let mut marks = NodeMarks::new(graph.node_count());
    gain_switch_marked(graph, strengths, aggs, labels, moved, from, to, &mut marks)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn gain_switch_marked(
    graph: &Graph,
    strengths: &Strengths,
    aggs: &CommunityAggregates,
    labels: &[u32],
    moved: &[NodeId],
    from: u32,
    to: Option<u32>,
    marks: &mut NodeMarks,
) -> f64 {
    let m = strengths.total;
    if m == 0.0 || to == Some(from) || moved.is_empty() {
        return 0.0;
    }
    marks.reset();
    for &v in moved {
        marks.mark(v);
    }
    let to_label = to.unwrap_or(u32::MAX);
    // Links from the moved set to the target and to the remainder.
    let (mut w_to, mut w_rest) = (0.0, 0.0);
    let (mut out_b, mut in_b) = (0.0, 0.0);
    for &v in moved {
        out_b += strengths.s_out[v as usize];
        in_b += strengths.s_in[v as usize];
        let (targets, weights) = graph.out_neighbors(v);
        let (sources, in_weights) = graph.in_neighbors(v);
        let neighbors = targets
            .iter()
            .zip(weights)
            .chain(sources.iter().zip(in_weights));
        for (&j, &w) in neighbors {
            if marks.contains(j) {
                continue;
            }
            let lj = labels[j as usize];
            if lj == to_label {
                w_to += w;
            } else if lj == from {
                w_rest += w;
            }
        }
    }
    let f = from as usize;
    let rest_out = aggs.s_out[f] - out_b;
    let rest_in = aggs.s_in[f] - in_b;
    let (to_out, to_in) = match to {
        Some(t) => (aggs.s_out[t as usize], aggs.s_in[t as usize]),
        None => (0.0, 0.0),
    };
    (w_to - w_rest) / m - (out_b * (to_in - rest_in) + in_b * (to_out - rest_out)) / (m * m)
}
