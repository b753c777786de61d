//! Independent reference implementations used by the integration tests.
#![allow(clippy::needless_range_loop)]
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use synclouvain::{Graph, NodeId};

/// Dense weight matrix built straight from an edge list.
pub struct Dense {
    pub n: usize,
    pub w: Vec<f64>,
}

impl Dense {
    pub fn new(n: usize, edges: &[(NodeId, NodeId, f64)]) -> Dense {
        let mut w = vec![0.0; n * n];
        for &(i, j, x) in edges {
            w[i as usize * n + j as usize] += x;
        }
        Dense { n, w }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    /// Modularity by the double sum over all same-community pairs.
    pub fn modularity(&self, labels: &[u32]) -> f64 {
        let n = self.n;
        let s_out: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| self.at(i, j)).sum())
            .collect();
        let s_in: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| self.at(i, j)).sum())
            .collect();
        let m: f64 = s_out.iter().sum();
        if m == 0.0 {
            return 0.0;
        }
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if labels[i] == labels[j] {
                    q += self.at(i, j) - s_out[i] * s_in[j] / m;
                }
            }
        }
        q / m
    }
}

/// Random directed graph with integer weights in 1..=4 and a few
/// self-loops. Always has at least one edge.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> (Graph, Dense) {
    let mut edges = Vec::new();
    for i in 0..n as NodeId {
        for j in 0..n as NodeId {
            let p = if i == j { density / 4.0 } else { density };
            if rng.gen::<f64>() < p {
                edges.push((i, j, rng.gen_range(1..=4) as f64));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, (n as NodeId - 1).min(1), 1.0));
    }
    let graph = Graph::from_edges(n, edges.iter().copied()).unwrap();
    (graph, Dense::new(n, &edges))
}

pub fn random_labels(rng: &mut ChaCha8Rng, n: usize) -> Vec<u32> {
    let k = rng.gen_range(1..=n) as u32;
    (0..n).map(|_| rng.gen_range(0..k)).collect()
}

/// Maximum modularity over every partition of the nodes, by enumerating
/// restricted growth strings.
pub fn max_modularity(d: &Dense) -> (f64, Vec<u32>) {
    let n = d.n;
    let mut labels = vec![0u32; n];
    let mut best = (d.modularity(&labels), labels.clone());
    // maxes[i] = largest label among labels[..i].
    loop {
        // Advance to the next restricted growth string.
        let mut i = n - 1;
        loop {
            if i == 0 {
                return best;
            }
            let bound = labels[..i].iter().copied().max().unwrap();
            if labels[i] <= bound {
                labels[i] += 1;
                for l in labels.iter_mut().skip(i + 1) {
                    *l = 0;
                }
                break;
            }
            i -= 1;
        }
        let q = d.modularity(&labels);
        if q > best.0 {
            best = (q, labels.clone());
        }
    }
}

/// Number of partitions of `n` elements.
pub fn bell(n: usize) -> usize {
    let mut row = vec![1usize];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            next.push(next.last().unwrap() + x);
        }
        row = next;
    }
    row[0]
}

/// For a functional graph `assign`, returns the weakly connected component
/// of every node (numbered by smallest member) and the number of distinct
/// directed cycles inside each component.
pub fn components_and_cycles(assign: &[u32]) -> (Vec<u32>, Vec<usize>) {
    let n = assign.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        let (a, b) = (find(&mut parent, i), find(&mut parent, assign[i] as usize));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut comp = vec![u32::MAX; n];
    let mut count = 0u32;
    let mut root_label = vec![u32::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_label[r] == u32::MAX {
            root_label[r] = count;
            count += 1;
        }
        comp[i] = root_label[r];
    }
    // Path colouring: 0 unseen, 1 on the current walk, 2 finished.
    let mut state = vec![0u8; n];
    let mut cycles = vec![0usize; count as usize];
    let mut path = Vec::new();
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            path.push(v);
            v = assign[v] as usize;
        }
        if state[v] == 1 {
            cycles[comp[v] as usize] += 1;
        }
        for &u in &path {
            state[u] = 2;
        }
        path.clear();
    }
    (comp, cycles)
}
