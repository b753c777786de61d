//! Partition comparison.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Normalized mutual information with arithmetic-mean normalization,
/// `2 I(A;B) / (H(A) + H(B))`.
///
/// Two single-community partitions score 1.
pub fn nmi(a: &Partition, b: &Partition) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let n = a.len() as f64;
    if a.is_empty() {
        return Ok(1.0);
    }
    let mut joint: HashMap<(u32, u32), usize> = HashMap::new();
    for (&x, &y) in a.labels().iter().zip(b.labels()) {
        *joint.entry((x, y)).or_default() += 1;
    }
    let size_a = a.sizes();
    let size_b = b.sizes();
    let entropy = |sizes: &[usize]| -> f64 {
        sizes
            .iter()
            .filter(|&&s| s > 0)
            .map(|&s| {
                let p = s as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_a = entropy(&size_a);
    let h_b = entropy(&size_b);
    if h_a + h_b == 0.0 {
        return Ok(1.0);
    }
    let mut mutual = 0.0;
    let mut cells: Vec<_> = joint.into_iter().collect();
    cells.sort_unstable();
    for ((x, y), count) in cells {
        let pxy = count as f64 / n;
        let px = size_a[x as usize] as f64 / n;
        let py = size_b[y as usize] as f64 / n;
        mutual += pxy * (pxy / (px * py)).ln();
    }
    Ok((2.0 * mutual / (h_a + h_b)).clamp(0.0, 1.0))
}
