//! Maximal corrections: move a node, together with its tail, to the
//! neighbouring community that gains the most.
//!
//! A sweep has two steps. First every node picks its best target against
//! a frozen snapshot of the communities (parallel, read-only). Then the
//! candidates are committed one at a time in ascending node order. A
//! candidate is kept with probability `p`, is skipped when an earlier commit
//! of the same sweep changed its source community, and is applied only if
//! moving its whole tail has a strictly positive gain on the current state.

use rayon::prelude::*;

use super::forest::{collect_tail, AssignmentForest};
use super::{rng, Event, NoopObserver, Observer, Phase, RunConfig, RunStats};
use crate::graph::{Graph, NodeId, Strengths};
use crate::quality::{gain_switch_marked, pair_gain, CommunityAggregates, NodeMarks};

/// Counts from one maximal sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepOutcome {
    /// Nodes whose best target differed from their community.
    pub candidates: usize,
    pub accepted: usize,
    /// Candidates not drawn this sweep.
    pub deferred: usize,
    /// Candidates skipped because an earlier commit changed their premise.
    pub invalidated: usize,
    /// Candidates whose tail move did not gain.
    pub rejected: usize,
}

impl SweepOutcome {
    pub fn improved(&self) -> bool {
        self.accepted > 0
    }
}

/// Runs one maximal sweep.
pub fn maximal_correction(
    graph: &Graph,
    strengths: &Strengths,
    forest: AssignmentForest,
    config: &RunConfig,
    level: usize,
    sweep: usize,
) -> (AssignmentForest, SweepOutcome) {
    let mut stats = RunStats::default();
    maximal_sweep(
        graph,
        strengths,
        forest,
        config,
        level,
        sweep,
        &mut NoopObserver,
        &mut stats,
    )
}

/// Best community for every node when moved alone, or `None` when staying
/// is at least as good. Candidate communities are those holding a neighbour
/// of the node in either edge direction; ties go to the lowest label.
pub fn best_targets(
    graph: &Graph,
    strengths: &Strengths,
    forest: &AssignmentForest,
    aggs: &CommunityAggregates,
) -> Vec<Option<u32>> {
    let labels = forest.labels();
    let count = forest.community_count();
    let m = strengths.total;
    if m == 0.0 {
        return vec![None; graph.node_count()];
    }
    (0..graph.node_count() as NodeId)
        .into_par_iter()
        .with_min_len(256)
        .map_init(
            || (vec![0.0f64; count], Vec::<u32>::new()),
            |(link, touched), i| {
                let iu = i as usize;
                let own = labels[iu];
                let (targets, weights) = graph.out_neighbors(i);
                let (sources, in_weights) = graph.in_neighbors(i);
                for (&j, &w) in targets
                    .iter()
                    .zip(weights)
                    .chain(sources.iter().zip(in_weights))
                {
                    if j == i {
                        continue;
                    }
                    let c = labels[j as usize];
                    if link[c as usize] == 0.0 {
                        touched.push(c);
                    }
                    link[c as usize] += w;
                }
                let so = strengths.s_out[iu];
                let si = strengths.s_in[iu];
                let rest_out = aggs.s_out[own as usize] - so;
                let rest_in = aggs.s_in[own as usize] - si;
                let w_own = link[own as usize];
                let mut best: Option<(u32, f64)> = None;
                for &c in touched.iter() {
                    if c == own {
                        continue;
                    }
                    let cu = c as usize;
                    let gain = (link[cu] - w_own) / m
                        - (so * (aggs.s_in[cu] - rest_in) + si * (aggs.s_out[cu] - rest_out))
                            / (m * m);
                    let better = match best {
                        None => gain > 0.0,
                        Some((bc, bg)) => gain > bg || (gain == bg && c < bc),
                    };
                    if better {
                        best = Some((c, gain));
                    }
                }
                for &c in touched.iter() {
                    link[c as usize] = 0.0;
                }
                touched.clear();
                best.map(|(c, _)| c)
            },
        )
        .collect()
}

/// Neighbour of `i` inside community `target` with the best pair gain.
fn attach_point(
    graph: &Graph,
    strengths: &Strengths,
    labels: &[u32],
    i: NodeId,
    target: u32,
) -> Option<NodeId> {
    let mut best: Option<(NodeId, f64)> = None;
    for (j, w_ij, w_ji) in graph.undirected_neighbors(i) {
        if labels[j as usize] != target {
            continue;
        }
        let gain = pair_gain(strengths, i, j, w_ij, w_ji);
        if best.is_none_or(|(_, g)| gain > g) {
            best = Some((j, gain));
        }
    }
    best.map(|(j, _)| j)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn maximal_sweep(
    graph: &Graph,
    strengths: &Strengths,
    forest: AssignmentForest,
    config: &RunConfig,
    level: usize,
    sweep: usize,
    observer: &mut dyn Observer,
    stats: &mut RunStats,
) -> (AssignmentForest, SweepOutcome) {
    let n = graph.node_count();
    let snapshot_labels = forest.labels();
    let count = forest.community_count();
    let mut aggs = CommunityAggregates::new(strengths, snapshot_labels, count);
    let targets = best_targets(graph, strengths, &forest, &aggs);

    let children = forest.children();
    let mut labels = snapshot_labels.to_vec();
    let mut assign = forest.assignment().to_vec();
    let mut touched = vec![false; count];
    let mut tail_marks = NodeMarks::new(n);
    let mut gain_marks = NodeMarks::new(n);
    let mut tail = Vec::new();
    let mut outcome = SweepOutcome::default();

    for (i, target) in targets.iter().enumerate() {
        let Some(to) = *target else { continue };
        outcome.candidates += 1;
        let u = rng::uniform(config.seed, level as u64, sweep as u64, i as u64);
        if u >= config.accept_prob {
            outcome.deferred += 1;
            continue;
        }
        let from = snapshot_labels[i];
        if touched[from as usize] || aggs.size[to as usize] == 0 {
            outcome.invalidated += 1;
            continue;
        }
        let Some(anchor) = attach_point(graph, strengths, &labels, i as NodeId, to) else {
            outcome.invalidated += 1;
            continue;
        };
        // The source community is untouched, so the snapshot's tree
        // structure inside it is still current.
        collect_tail(i as NodeId, &children, &mut tail_marks, &mut tail);
        let gain = gain_switch_marked(
            graph,
            strengths,
            &aggs,
            &labels,
            &tail,
            from,
            Some(to),
            &mut gain_marks,
        );
        if gain <= 0.0 {
            outcome.rejected += 1;
            continue;
        }
        assign[i] = anchor;
        for &v in &tail {
            aggs.remove(strengths, v, from);
            aggs.add(strengths, v, to);
            labels[v as usize] = to;
        }
        touched[from as usize] = true;
        touched[to as usize] = true;
        outcome.accepted += 1;
        observer.on_event(&Event::Accepted {
            level,
            phase: Phase::Maximal,
            gain,
            graph,
            labels: &labels,
        });
    }
    stats.maximal_moves += outcome.accepted;

    let next = AssignmentForest::from_valid(assign);
    if config.verify {
        super::verify_state(strengths, &next, &labels, &aggs);
    }
    (next, outcome)
}

/// Whether any candidate of the current state would gain by moving its
/// tail, ignoring the acceptance draw.
pub(crate) fn has_improving_move(
    graph: &Graph,
    strengths: &Strengths,
    forest: &AssignmentForest,
) -> bool {
    let n = graph.node_count();
    let labels = forest.labels();
    let aggs = CommunityAggregates::new(strengths, labels, forest.community_count());
    let targets = best_targets(graph, strengths, forest, &aggs);
    let children = forest.children();
    targets
        .par_iter()
        .enumerate()
        .filter_map(|(i, t)| t.map(|to| (i as NodeId, to)))
        .map_init(
            || (NodeMarks::new(n), NodeMarks::new(n), Vec::new()),
            |(tail_marks, gain_marks, tail), (i, to)| {
                collect_tail(i, &children, tail_marks, tail);
                let from = labels[i as usize];
                gain_switch_marked(
                    graph,
                    strengths,
                    &aggs,
                    labels,
                    tail,
                    from,
                    Some(to),
                    gain_marks,
                ) > 0.0
            },
        )
        .any(|improving| improving)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::two_triangles;

    #[test]
    fn optimal_partition_is_a_fixed_point() {
        let g = two_triangles();
        let s = Strengths::new(&g);
        let f = AssignmentForest::new(vec![1, 2, 0, 4, 5, 3]).unwrap();
        let cfg = RunConfig {
            accept_prob: 1.0,
            ..RunConfig::default()
        };
        let (next, outcome) = maximal_correction(&g, &s, f.clone(), &cfg, 0, 0);
        assert!(!outcome.improved());
        assert_eq!(outcome.candidates, 0);
        assert_eq!(next, f);
    }

    #[test]
    fn singleton_joins_triangle() {
        let g = two_triangles();
        let s = Strengths::new(&g);
        // Node 2 sits alone next to the {0,1} pair.
        let f = AssignmentForest::new(vec![1, 0, 2, 4, 5, 3]).unwrap();
        let cfg = RunConfig {
            accept_prob: 1.0,
            ..RunConfig::default()
        };
        let (next, outcome) = maximal_correction(&g, &s, f, &cfg, 0, 0);
        assert_eq!(outcome.accepted, 1);
        assert_eq!(next.labels(), &[0, 0, 0, 1, 1, 1]);
        assert_eq!(next.assignment()[2], 0);
        let (again, second) = maximal_correction(&g, &s, next.clone(), &cfg, 0, 1);
        assert!(!second.improved());
        assert_eq!(again, next);
    }
}
