//! Node-to-community labelings.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// A labeling of nodes `0..n` with dense community ids `0..count`.
///
/// Partitions built through [`Partition::from_labels`] are canonical:
/// communities are numbered in order of their smallest member, so equal
/// partitions have equal label vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<u32>,
    count: usize,
}

impl Partition {
    /// Canonicalizes arbitrary labels.
    pub fn from_labels(labels: Vec<u32>) -> Self {
        let mut labels = labels;
        let count = canonicalize(&mut labels);
        Partition { labels, count }
    }

    /// Accepts labels that are already dense in `0..count`, keeping their
    /// numbering. Every label must be used.
    pub fn from_dense(labels: Vec<u32>, count: usize) -> Result<Self> {
        let mut used = vec![false; count];
        for (node, &label) in labels.iter().enumerate() {
            if label as usize >= count {
                return Err(Error::LabelOutOfRange { node, label, count });
            }
            used[label as usize] = true;
        }
        if let Some(missing) = used.iter().position(|u| !u) {
            return Err(Error::config(format!("community {missing} has no members")));
        }
        Ok(Partition { labels, count })
    }

    #[cfg(test)]
    pub(crate) fn from_dense_unchecked(labels: Vec<u32>, count: usize) -> Self {
        Partition { labels, count }
    }

    pub fn identity(n: usize) -> Self {
        Partition {
            labels: (0..n as u32).collect(),
            count: n,
        }
    }

    pub fn single(n: usize) -> Self {
        Partition {
            labels: vec![0; n],
            count: usize::from(n > 0),
        }
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<u32> {
        self.labels
    }

    pub fn label(&self, node: NodeId) -> u32 {
        self.labels[node as usize]
    }

    /// Number of communities.
    pub fn count(&self) -> usize {
        self.count
    }

    /// Number of labeled nodes.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.count == self.labels.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    /// Member lists, each ascending.
    pub fn members(&self) -> Vec<Vec<NodeId>> {
        let mut members = vec![Vec::new(); self.count];
        for (node, &l) in self.labels.iter().enumerate() {
            members[l as usize].push(node as NodeId);
        }
        members
    }

    /// Labels each node with `upper`'s community of its own community.
    ///
    /// `upper` must label the communities of `self` (one entry per
    /// community).
    pub fn compose(&self, upper: &Partition) -> Result<Partition> {
        if upper.len() != self.count {
            return Err(Error::SizeMismatch {
                expected: self.count,
                got: upper.len(),
            });
        }
        let labels = self
            .labels
            .iter()
            .map(|&l| upper.labels[l as usize])
            .collect();
        Ok(Partition {
            labels,
            count: upper.count,
        })
    }

    /// Writes `node community` lines sorted by node.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for (node, label) in self.labels.iter().enumerate() {
            writeln!(out, "{node} {label}")?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads `node community` lines. Every node `0..n` must appear exactly
    /// once; the labels are canonicalized.
    pub fn read<R: BufRead>(reader: R) -> Result<Partition> {
        let mut pairs: Vec<(usize, u32)> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let mut next = |what: &str| -> Result<u64> {
                let tok = fields
                    .next()
                    .ok_or_else(|| Error::parse(idx + 1, format!("missing {what}")))?;
                tok.parse()
                    .map_err(|_| Error::parse(idx + 1, format!("bad {what} `{tok}`")))
            };
            let node = next("node")? as usize;
            let label = u32::try_from(next("community")?)
                .map_err(|_| Error::parse(idx + 1, "community id too large"))?;
            pairs.push((node, label));
        }
        let n = pairs.len();
        let mut labels = vec![u32::MAX; n];
        for (node, label) in pairs {
            if node >= n || labels[node] != u32::MAX {
                return Err(Error::config(format!(
                    "partition file must list nodes 0..{n} exactly once (bad node {node})"
                )));
            }
            labels[node] = label;
        }
        Ok(Partition::from_labels(labels))
    }
}

/// Relabels in first-occurrence order and returns the community count.
pub(crate) fn canonicalize(labels: &mut [u32]) -> usize {
    let bound = labels.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut map = vec![u32::MAX; bound];
    let mut next = 0u32;
    for l in labels.iter_mut() {
        let slot = &mut map[*l as usize];
        if *slot == u32::MAX {
            *slot = next;
            next += 1;
        }
        *l = *slot;
    }
    next as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_orders_by_smallest_member() {
        let p = Partition::from_labels(vec![7, 3, 7, 9, 3]);
        assert_eq!(p.labels(), &[0, 1, 0, 2, 1]);
        assert_eq!(p.count(), 3);
        assert_eq!(p.members(), vec![vec![0, 2], vec![1, 4], vec![3]]);
    }

    #[test]
    fn dense_validation() {
        assert!(Partition::from_dense(vec![0, 2], 2).is_err());
        assert!(Partition::from_dense(vec![0, 0], 2).is_err());
        assert_eq!(
            Partition::from_dense(vec![1, 0], 2).unwrap().labels(),
            &[1, 0]
        );
    }

    #[test]
    fn compose_levels() {
        let lower = Partition::from_labels(vec![0, 0, 1, 2, 2]);
        let upper = Partition::from_labels(vec![0, 1, 0]);
        let flat = lower.compose(&upper).unwrap();
        assert_eq!(flat.labels(), &[0, 0, 1, 0, 0]);
        assert!(lower.compose(&Partition::identity(2)).is_err());
    }

    #[test]
    fn file_round_trip() {
        let p = Partition::from_labels(vec![0, 1, 1, 0, 2]);
        let mut buf = Vec::new();
        p.write(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "0 0\n1 1\n2 1\n3 0\n4 2\n"
        );
        assert_eq!(Partition::read(&buf[..]).unwrap(), p);
        assert!(Partition::read("0 0\n0 1\n".as_bytes()).is_err());
        assert!(Partition::read("1 0\n".as_bytes()).is_err());
    }

    #[test]
    fn identity_and_single() {
        assert!(Partition::identity(3).is_identity());
        assert!(!Partition::single(3).is_identity());
        assert!(Partition::single(1).is_identity());
        assert_eq!(Partition::single(0).count(), 0);
    }
}
