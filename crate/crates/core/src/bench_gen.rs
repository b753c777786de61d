//! LFR-style planted-partition benchmark graphs.
//!
//! Node out-degrees follow a truncated power law (exponent 2) on
//! `[k/2, kmax]`, rescaled so the mean is close to `k`. Community sizes
//! follow a power law with exponent 1. Each out-stub of a node lands inside
//! its community with probability `1 - mu_t` and on a uniformly random
//! outside node otherwise. Intra and inter edges get constant weights
//! chosen so that a fraction `mu_w` of each node's expected strength leaves
//! its community.
//!
//! Communities must be able to hold the largest internal degree, so the
//! smallest community size actually used is
//! `max(cmin, ceil((1 - mu_t) * kmax) + 1)`.

use std::collections::HashSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fmt::format_g17;
use crate::graph::{write_edge_list, Graph, NodeId};
use crate::partition::Partition;

pub const DEGREE_EXPONENT: f64 = 2.0;
pub const COMMUNITY_SIZE_EXPONENT: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub nodes: usize,
    pub mean_degree: f64,
    pub max_degree: usize,
    /// Fraction of each node's edges that leave its community.
    pub mu_t: f64,
    /// Fraction of each node's strength that leaves its community.
    pub mu_w: f64,
    pub cmin: usize,
    pub cmax: usize,
    pub seed: u64,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            nodes: 1000,
            mean_degree: 50.0,
            max_degree: 100,
            mu_t: 0.2,
            mu_w: 0.1,
            cmin: 10,
            cmax: 100,
            seed: 1,
        }
    }
}

impl BenchSpec {
    /// Checks the parameters and returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |msg: String| Err(Error::config(msg));
        if !(0.0..=1.0).contains(&self.mu_t) || !(0.0..=1.0).contains(&self.mu_w) {
            return bad(format!(
                "mixing parameters must lie in [0, 1] (mu_t={}, mu_w={})",
                self.mu_t, self.mu_w
            ));
        }
        if self.mu_w > self.mu_t {
            return bad(format!(
                "mu_t ({}) must exceed mu_w ({})",
                self.mu_t, self.mu_w
            ));
        }
        if self.mean_degree.is_nan()
            || self.mean_degree <= 0.0
            || self.mean_degree > self.max_degree as f64
        {
            return bad(format!(
                "need 0 < k <= kmax (k={}, kmax={})",
                self.mean_degree, self.max_degree
            ));
        }
        if self.max_degree >= self.nodes {
            return bad(format!(
                "need kmax < N (kmax={}, N={})",
                self.max_degree, self.nodes
            ));
        }
        if self.cmin < 3 || self.cmin > self.cmax {
            return bad(format!(
                "need 3 <= cmin <= cmax (cmin={}, cmax={})",
                self.cmin, self.cmax
            ));
        }
        if self.mu_t > 0.0 && self.mu_w == 0.0 {
            return Err(Error::InfeasibleSpec(
                "mu_w = 0 with mu_t > 0 would give inter-community edges zero weight".into(),
            ));
        }
        let mut warnings = Vec::new();
        if self.mu_t == self.mu_w {
            warnings.push(format!(
                "mu_t == mu_w ({}); communities are ill-posed",
                self.mu_t
            ));
        }
        Ok(warnings)
    }

    /// Smallest community size able to host the largest internal degree.
    pub fn effective_cmin(&self) -> usize {
        let internal = ((1.0 - self.mu_t) * self.max_degree as f64).ceil() as usize;
        self.cmin.max(internal + 1)
    }

    /// `key=value` lines describing the spec and the generator defaults.
    pub fn header_lines(&self) -> Vec<String> {
        vec![
            "generator=lfr-style planted partition".to_string(),
            format!("N={}", self.nodes),
            format!("k={}", format_g17(self.mean_degree)),
            format!("kmax={}", self.max_degree),
            format!("mu_t={}", format_g17(self.mu_t)),
            format!("mu_w={}", format_g17(self.mu_w)),
            format!("cmin={}", self.cmin),
            format!("cmax={}", self.cmax),
            format!("seed={}", self.seed),
            format!("degree_exponent={}", format_g17(DEGREE_EXPONENT)),
            format!(
                "community_size_exponent={}",
                format_g17(COMMUNITY_SIZE_EXPONENT)
            ),
            format!("effective_cmin={}", self.effective_cmin()),
        ]
    }

    /// Parses the lines produced by [`BenchSpec::header_lines`], with or
    /// without a leading `#`. Unknown keys are ignored.
    pub fn from_header<'a>(lines: impl IntoIterator<Item = &'a str>) -> Result<BenchSpec> {
        let mut spec = BenchSpec::default();
        let mut seen = 0;
        for line in lines {
            let line = line.trim().trim_start_matches('#').trim();
            let Some((key, value)) = line.split_once('=') else {
                continue;
            };
            let bad = || Error::config(format!("bad header value `{line}`"));
            match key {
                "N" => spec.nodes = value.parse().map_err(|_| bad())?,
                "k" => spec.mean_degree = value.parse().map_err(|_| bad())?,
                "kmax" => spec.max_degree = value.parse().map_err(|_| bad())?,
                "mu_t" => spec.mu_t = value.parse().map_err(|_| bad())?,
                "mu_w" => spec.mu_w = value.parse().map_err(|_| bad())?,
                "cmin" => spec.cmin = value.parse().map_err(|_| bad())?,
                "cmax" => spec.cmax = value.parse().map_err(|_| bad())?,
                "seed" => spec.seed = value.parse().map_err(|_| bad())?,
                _ => continue,
            }
            seen += 1;
        }
        if seen < 8 {
            return Err(Error::config(
                "header does not describe a complete benchmark spec",
            ));
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedGraph {
    pub graph: Graph,
    pub truth: Partition,
}

pub fn generate(spec: &BenchSpec) -> Result<PlantedGraph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.nodes;

    let degrees = draw_degrees(spec, &mut rng);
    let sizes = draw_sizes(spec, &mut rng)?;

    // Random placement of nodes into communities.
    let mut order: Vec<NodeId> = (0..n as NodeId).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut labels = vec![0u32; n];
    let mut members: Vec<Vec<NodeId>> = Vec::with_capacity(sizes.len());
    let mut cursor = 0;
    for (c, &size) in sizes.iter().enumerate() {
        let mut group: Vec<NodeId> = order[cursor..cursor + size].to_vec();
        group.sort_unstable();
        for &v in &group {
            labels[v as usize] = c as u32;
        }
        members.push(group);
        cursor += size;
    }

    let w_in = if spec.mu_t < 1.0 {
        (1.0 - spec.mu_w) / (1.0 - spec.mu_t)
    } else {
        1.0
    };
    let w_out = if spec.mu_t > 0.0 {
        spec.mu_w / spec.mu_t
    } else {
        1.0
    };

    let mut edges = Vec::new();
    let mut used: HashSet<NodeId> = HashSet::new();
    for i in 0..n as NodeId {
        used.clear();
        used.insert(i);
        let own = &members[labels[i as usize] as usize];
        let mut intra_left = own.len() - 1;
        let mut inter_left = n - own.len();
        for _ in 0..degrees[i as usize] {
            let want_intra = rng.gen::<f64>() >= spec.mu_t;
            let intra = if want_intra {
                intra_left > 0
            } else {
                inter_left == 0
            };
            if intra {
                if intra_left == 0 {
                    break;
                }
                let j = pick_unused(&mut rng, &used, own.len(), |k| own[k]);
                used.insert(j);
                intra_left -= 1;
                edges.push((i, j, w_in));
            } else {
                if inter_left == 0 {
                    break;
                }
                let own_label = labels[i as usize];
                let j = pick_outside(&mut rng, &used, &labels, own_label);
                used.insert(j);
                inter_left -= 1;
                edges.push((i, j, w_out));
            }
        }
    }

    let graph = Graph::from_edges(n, edges)?;
    Ok(PlantedGraph {
        graph,
        truth: Partition::from_labels(labels),
    })
}

fn draw_degrees(spec: &BenchSpec, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let lo = (spec.mean_degree / 2.0).max(1.0);
    let hi = spec.max_degree as f64;
    let raw: Vec<f64> = (0..spec.nodes)
        .map(|_| {
            let u: f64 = rng.gen();
            // Inverse CDF of p(x) ~ x^-2 on [lo, hi].
            1.0 / (1.0 / lo - u * (1.0 / lo - 1.0 / hi))
        })
        .collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    let scale = spec.mean_degree / mean;
    raw.iter()
        .map(|&x| ((x * scale).round() as usize).clamp(1, spec.max_degree))
        .collect()
}

fn draw_sizes(spec: &BenchSpec, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let lo = spec.effective_cmin();
    let hi = spec.cmax;
    if lo > hi {
        return Err(Error::InfeasibleSpec(format!(
            "communities of at most cmax={hi} nodes cannot host internal degree up to {} (kmax={}, mu_t={})",
            lo - 1,
            spec.max_degree,
            spec.mu_t
        )));
    }
    if spec.nodes < lo {
        return Err(Error::InfeasibleSpec(format!(
            "N={} is smaller than the minimum community size {lo}",
            spec.nodes
        )));
    }
    let mut sizes = Vec::new();
    let mut total = 0;
    while total < spec.nodes {
        let u: f64 = rng.gen();
        // p(s) ~ 1/s on [lo, hi].
        let s = (lo as f64 * (hi as f64 / lo as f64).powf(u)).round() as usize;
        let s = s.clamp(lo, hi);
        sizes.push(s);
        total += s;
    }
    let mut excess = total - spec.nodes;
    for s in sizes.iter_mut().rev() {
        let cut = excess.min(*s - lo);
        *s -= cut;
        excess -= cut;
    }
    if excess > 0 {
        while sizes.iter().sum::<usize>() > spec.nodes {
            sizes.pop();
        }
        let mut deficit = spec.nodes - sizes.iter().sum::<usize>();
        for s in sizes.iter_mut() {
            let grow = deficit.min(hi - *s);
            *s += grow;
            deficit -= grow;
        }
        if deficit > 0 || sizes.is_empty() {
            return Err(Error::InfeasibleSpec(format!(
                "cannot split N={} into communities of {lo}..={hi} nodes",
                spec.nodes
            )));
        }
    }
    Ok(sizes)
}

/// Uniform pick from `pool(0..len)` avoiding `used`. The caller guarantees
/// at least one free entry.
fn pick_unused(
    rng: &mut ChaCha8Rng,
    used: &HashSet<NodeId>,
    len: usize,
    pool: impl Fn(usize) -> NodeId,
) -> NodeId {
    for _ in 0..64 {
        let j = pool(rng.gen_range(0..len));
        if !used.contains(&j) {
            return j;
        }
    }
    let free: Vec<NodeId> = (0..len).map(&pool).filter(|j| !used.contains(j)).collect();
    free[rng.gen_range(0..free.len())]
}

fn pick_outside(rng: &mut ChaCha8Rng, used: &HashSet<NodeId>, labels: &[u32], own: u32) -> NodeId {
    let n = labels.len();
    for _ in 0..64 {
        let j = rng.gen_range(0..n) as NodeId;
        if labels[j as usize] != own && !used.contains(&j) {
            return j;
        }
    }
    let free: Vec<NodeId> = (0..n as NodeId)
        .filter(|&j| labels[j as usize] != own && !used.contains(&j))
        .collect();
    free[rng.gen_range(0..free.len())]
}

impl PlantedGraph {
    /// Writes the edge list with the spec as `key=value` header comments,
    /// and the planted partition in `node community` form.
    pub fn write<E: Write, T: Write>(&self, spec: &BenchSpec, edges: E, truth: T) -> Result<()> {
        write_edge_list(&self.graph, &spec.header_lines(), edges)?;
        self.truth.write(truth)
    }
}

/// Fraction of edges joining different communities of `truth`.
pub fn inter_edge_fraction(graph: &Graph, truth: &Partition) -> f64 {
    let (mut inter, mut total) = (0usize, 0usize);
    for (i, j, _) in graph.edges() {
        total += 1;
        if truth.label(i) != truth.label(j) {
            inter += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        inter as f64 / total as f64
    }
}

/// Fraction of total weight on edges joining different communities.
pub fn inter_strength_fraction(graph: &Graph, truth: &Partition) -> f64 {
    let (mut inter, mut total) = (0.0, 0.0);
    for (i, j, w) in graph.edges() {
        total += w;
        if truth.label(i) != truth.label(j) {
            inter += w;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        inter / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mu_t: f64, mu_w: f64, seed: u64) -> BenchSpec {
        BenchSpec {
            nodes: 400,
            mean_degree: 10.0,
            max_degree: 20,
            mu_t,
            mu_w,
            cmin: 20,
            cmax: 60,
            seed,
        }
    }

    #[test]
    fn zero_mixing_disconnects_communities() {
        let pg = generate(&small(0.0, 0.0, 3)).unwrap();
        assert_eq!(inter_edge_fraction(&pg.graph, &pg.truth), 0.0);
        assert!(pg
            .graph
            .edges()
            .all(|(i, j, _)| pg.truth.label(i) == pg.truth.label(j)));
    }

    #[test]
    fn community_sizes_within_bounds() {
        let spec = small(0.3, 0.2, 5);
        let pg = generate(&spec).unwrap();
        assert_eq!(pg.truth.len(), spec.nodes);
        for size in pg.truth.sizes() {
            assert!(
                (spec.effective_cmin()..=spec.cmax).contains(&size),
                "{size}"
            );
        }
        assert!(pg.graph.edges().all(|(i, j, _)| i != j));
    }

    #[test]
    fn reproducible_from_seed() {
        let a = generate(&small(0.3, 0.2, 9)).unwrap();
        let b = generate(&small(0.3, 0.2, 9)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.graph, generate(&small(0.3, 0.2, 10)).unwrap().graph);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(small(0.1, 0.4, 1).validate().is_err());
        assert!(matches!(
            generate(&small(0.3, 0.0, 1)),
            Err(Error::InfeasibleSpec(_))
        ));
        let mut spec = small(0.2, 0.1, 1);
        spec.cmax = 10;
        spec.cmin = 5;
        assert!(matches!(generate(&spec), Err(Error::InfeasibleSpec(_))));
        spec = small(0.2, 0.1, 1);
        spec.max_degree = 400;
        assert!(spec.validate().is_err());
        spec = small(0.2, 0.1, 1);
        spec.cmin = 2;
        assert!(spec.validate().is_err());
        assert_eq!(small(0.3, 0.3, 1).validate().unwrap().len(), 1);
    }

    #[test]
    fn written_header_parses_back() {
        let spec = small(0.3, 0.2, 4);
        let pg = generate(&spec).unwrap();
        let (mut edges, mut truth) = (Vec::new(), Vec::new());
        pg.write(&spec, &mut edges, &mut truth).unwrap();
        let text = String::from_utf8(edges.clone()).unwrap();
        assert_eq!(BenchSpec::from_header(text.lines()).unwrap(), spec);
        assert_eq!(crate::graph::read_edge_list(&edges[..]).unwrap(), pg.graph);
        assert_eq!(Partition::read(&truth[..]).unwrap(), pg.truth);
    }

    #[test]
    fn header_round_trip() {
        let spec = BenchSpec {
            mu_t: 0.5,
            mu_w: 0.4,
            seed: 77,
            ..BenchSpec::default()
        };
        let lines = spec.header_lines();
        let back = BenchSpec::from_header(lines.iter().map(String::as_str)).unwrap();
        assert_eq!(back, spec);
    }
}
