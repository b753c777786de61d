//! Positive corrections: split communities that contain a node with
//! negative local gain.
//!
//! A split removes one assignment in a branch (detaching that node's
//! subtree) or two assignments on the cycle (cutting it into two arcs).
//! The best such bisection is applied when its gain is strictly positive.
//! When none is, the most harmful node is extracted on its own and its
//! children are re-pointed past it, which gains exactly minus its local
//! gain.

use rayon::prelude::*;

use super::forest::{collect_tail, AssignmentForest, Children};
use super::{Event, NoopObserver, Observer, Phase, RunStats};
use crate::graph::{Graph, NodeId, Strengths};
use crate::quality::{gain_switch_marked, local_gain, CommunityAggregates, NodeMarks};

/// Default bound on cycle length for the exhaustive two-cut search.
pub const DEFAULT_SCC_CUT_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Split {
    /// Remove the assignment of a branch node.
    Branch(NodeId),
    /// Remove the assignments of two cycle nodes.
    CyclePair(NodeId, NodeId),
    /// Isolate a node and re-point its children at its target.
    Extract(NodeId),
}

#[derive(Debug, Clone, Copy)]
struct Choice {
    split: Split,
    gain: f64,
    oversized_cycle: bool,
}

/// Splits communities until no node has a negative local gain.
pub fn positive_correction(
    graph: &Graph,
    strengths: &Strengths,
    forest: AssignmentForest,
    scc_cut_cap: usize,
) -> AssignmentForest {
    let mut stats = RunStats::default();
    positive_pass(
        graph,
        strengths,
        forest,
        scc_cut_cap,
        0,
        false,
        &mut NoopObserver,
        &mut stats,
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn positive_pass(
    graph: &Graph,
    strengths: &Strengths,
    mut forest: AssignmentForest,
    scc_cut_cap: usize,
    level: usize,
    verify: bool,
    observer: &mut dyn Observer,
    stats: &mut RunStats,
) -> AssignmentForest {
    let n = graph.node_count();
    loop {
        let labels = forest.labels();
        let count = forest.community_count();
        let aggs = CommunityAggregates::new(strengths, labels, count);
        let gains: Vec<f64> = (0..n as NodeId)
            .into_par_iter()
            .with_min_len(256)
            .map(|i| local_gain(graph, strengths, &aggs, labels, i))
            .collect();
        let mut flagged = vec![false; count];
        for (i, &g) in gains.iter().enumerate() {
            if g < 0.0 {
                flagged[labels[i] as usize] = true;
            }
        }
        let targets: Vec<u32> = (0..count as u32).filter(|&c| flagged[c as usize]).collect();
        if targets.is_empty() {
            return forest;
        }

        let members = forest.partition().members();
        let children = forest.children();
        let choices: Vec<Choice> = targets
            .par_iter()
            .map_init(
                || (NodeMarks::new(n), NodeMarks::new(n), Vec::new()),
                |(tail_marks, gain_marks, buf), &c| {
                    let ctx = SplitContext {
                        graph,
                        strengths,
                        forest: &forest,
                        aggs: &aggs,
                        children: &children,
                        gains: &gains,
                    };
                    ctx.best_split(
                        c,
                        &members[c as usize],
                        scc_cut_cap,
                        tail_marks,
                        gain_marks,
                        buf,
                    )
                },
            )
            .collect();

        let mut assign = forest.assignment().to_vec();
        let mut live_labels = labels.to_vec();
        let mut live_aggs = aggs.clone();
        let mut marks = NodeMarks::new(n);
        let mut detached = Vec::new();
        for (&c, choice) in targets.iter().zip(&choices) {
            if choice.oversized_cycle {
                stats.warn(format!(
                    "level {level}: cycle of community {c} exceeds {scc_cut_cap} nodes; two-cut search skipped"
                ));
            }
            detached_nodes(&forest, &children, choice.split, &mut marks, &mut detached);
            apply_split(&mut assign, &children, choice.split);
            let fresh = live_aggs.push_empty();
            for &v in &detached {
                live_aggs.remove(strengths, v, c);
                live_aggs.add(strengths, v, fresh);
                live_labels[v as usize] = fresh;
            }
            observer.on_event(&Event::Accepted {
                level,
                phase: Phase::Positive,
                gain: choice.gain,
                graph,
                labels: &live_labels,
            });
        }
        stats.positive_splits += targets.len();

        forest = AssignmentForest::from_valid(assign);
        if verify {
            super::verify_state(strengths, &forest, &live_labels, &live_aggs);
        }
    }
}

struct SplitContext<'a> {
    graph: &'a Graph,
    strengths: &'a Strengths,
    forest: &'a AssignmentForest,
    aggs: &'a CommunityAggregates,
    children: &'a Children,
    gains: &'a [f64],
}

impl SplitContext<'_> {
    fn best_split(
        &self,
        c: u32,
        members: &[NodeId],
        cap: usize,
        tail_marks: &mut NodeMarks,
        gain_marks: &mut NodeMarks,
        buf: &mut Vec<NodeId>,
    ) -> Choice {
        let labels = self.forest.labels();
        let mut best: Option<(Split, f64)> = None;
        let mut consider = |split: Split, gain: f64| {
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((split, gain));
            }
        };

        for &x in members {
            if self.forest.on_cycle(x) {
                continue;
            }
            collect_tail(x, self.children, tail_marks, buf);
            let gain = gain_switch_marked(
                self.graph,
                self.strengths,
                self.aggs,
                labels,
                buf,
                c,
                None,
                gain_marks,
            );
            consider(Split::Branch(x), gain);
        }

        let cycle = self.forest.cycle_of(members[0]);
        let oversized_cycle = cycle.len() > cap;
        if cycle.len() >= 2 && !oversized_cycle {
            self.best_cycle_pair(c, members, &cycle, &mut consider);
        }

        match best {
            Some((split, gain)) if gain > 0.0 => Choice {
                split,
                gain,
                oversized_cycle,
            },
            _ => {
                let (worst, g) = members.iter().map(|&v| (v, self.gains[v as usize])).fold(
                    (members[0], f64::INFINITY),
                    |acc, cur| if cur.1 < acc.1 { cur } else { acc },
                );
                Choice {
                    split: Split::Extract(worst),
                    gain: -g,
                    oversized_cycle,
                }
            }
        }
    }

    /// Scans every pair of cut positions on the cycle.
    ///
    /// Cycle node `r_k` together with the trees hanging off it forms unit
    /// `k`. Cutting `a(r_x)` and `a(r_y)` for `x < y` detaches units
    /// `x+1..=y`. For a fixed `x` the detached arc grows one unit at a time
    /// and its cut weight is updated from that unit's edges, so the scan
    /// costs the cycle length times the community's edges.
    fn best_cycle_pair(
        &self,
        c: u32,
        members: &[NodeId],
        cycle: &[NodeId],
        consider: &mut impl FnMut(Split, f64),
    ) {
        let labels = self.forest.labels();
        let s = cycle.len();
        let m = self.strengths.total;

        let mut unit_of = std::collections::HashMap::with_capacity(members.len());
        let mut units: Vec<Vec<NodeId>> = Vec::with_capacity(s);
        for (k, &r) in cycle.iter().enumerate() {
            let mut nodes = vec![r];
            let mut head = 0;
            while head < nodes.len() {
                let v = nodes[head];
                head += 1;
                for &ch in self.children.of(v) {
                    if !self.forest.on_cycle(ch) {
                        nodes.push(ch);
                    }
                }
            }
            for &v in &nodes {
                unit_of.insert(v, k);
            }
            units.push(nodes);
        }

        // Per unit: strengths, and weight to the rest of the community.
        let mut unit_out = vec![0.0; s];
        let mut unit_in = vec![0.0; s];
        let mut unit_ext = vec![0.0; s];
        for (k, nodes) in units.iter().enumerate() {
            for &v in nodes {
                unit_out[k] += self.strengths.s_out[v as usize];
                unit_in[k] += self.strengths.s_in[v as usize];
                self.for_each_community_link(v, c, labels, |j, w| {
                    if unit_of[&j] != k {
                        unit_ext[k] += w;
                    }
                });
            }
        }
        let c_out = self.aggs.s_out[c as usize];
        let c_in = self.aggs.s_in[c as usize];

        for x in 0..s - 1 {
            let (mut cut, mut out_b, mut in_b) = (0.0, 0.0, 0.0);
            for y in x + 1..s {
                // Weight between unit y and the arc x+1..y-1, both ways.
                let mut link = 0.0;
                for &v in &units[y] {
                    self.for_each_community_link(v, c, labels, |j, w| {
                        let k = unit_of[&j];
                        if k > x && k < y {
                            link += w;
                        }
                    });
                }
                cut += unit_ext[y] - 2.0 * link;
                out_b += unit_out[y];
                in_b += unit_in[y];
                let rest_out = c_out - out_b;
                let rest_in = c_in - in_b;
                let gain = -cut / m + (out_b * rest_in + in_b * rest_out) / (m * m);
                consider(Split::CyclePair(cycle[x], cycle[y]), gain);
            }
        }
    }

    /// Calls `f(j, w)` for every edge between `v` and another member of
    /// community `c`, in both directions.
    fn for_each_community_link(
        &self,
        v: NodeId,
        c: u32,
        labels: &[u32],
        mut f: impl FnMut(NodeId, f64),
    ) {
        let (targets, weights) = self.graph.out_neighbors(v);
        let (sources, in_weights) = self.graph.in_neighbors(v);
        for (&j, &w) in targets
            .iter()
            .zip(weights)
            .chain(sources.iter().zip(in_weights))
        {
            if j != v && labels[j as usize] == c {
                f(j, w);
            }
        }
    }
}

/// Nodes that leave their community when `split` is applied.
fn detached_nodes(
    forest: &AssignmentForest,
    children: &Children,
    split: Split,
    marks: &mut NodeMarks,
    out: &mut Vec<NodeId>,
) {
    match split {
        Split::Branch(x) => collect_tail(x, children, marks, out),
        Split::Extract(v) => {
            out.clear();
            out.push(v);
        }
        Split::CyclePair(rx, ry) => {
            // Units after r_x up to and including r_y.
            let assign = forest.assignment();
            out.clear();
            let mut r = assign[rx as usize];
            let mut unit = Vec::new();
            loop {
                marks.reset();
                unit.clear();
                unit.push(r);
                marks.mark(r);
                let mut head = 0;
                while head < unit.len() {
                    let v = unit[head];
                    head += 1;
                    for &ch in children.of(v) {
                        if !forest.on_cycle(ch) && !marks.contains(ch) {
                            marks.mark(ch);
                            unit.push(ch);
                        }
                    }
                }
                out.extend_from_slice(&unit);
                if r == ry {
                    break;
                }
                r = assign[r as usize];
            }
        }
    }
}

fn apply_split(assign: &mut [NodeId], children: &Children, split: Split) {
    match split {
        Split::Branch(x) => assign[x as usize] = x,
        Split::CyclePair(a, b) => {
            assign[a as usize] = a;
            assign[b as usize] = b;
        }
        Split::Extract(v) => {
            let target = assign[v as usize];
            let kids = children.of(v);
            if target != v {
                for &k in kids {
                    assign[k as usize] = target;
                }
            } else if let Some((&root, rest)) = kids.split_first() {
                assign[root as usize] = root;
                for &k in rest {
                    assign[k as usize] = root;
                }
            }
            assign[v as usize] = v;
        }
    }
}
