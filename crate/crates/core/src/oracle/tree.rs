//! Explicit rooted Cayley-tree volumes V_n for exhaustive computations.

use crate::error::{PottsError, Result};
use crate::tol;

/// A finite volume V_n of the Cayley tree of order k: the root has k+1
/// neighbors, every other interior vertex k direct successors.
///
/// Vertices are indexed in breadth-first order, so the vertices of any inner
/// volume V_m (m ≤ n) form a prefix of the index range.
#[derive(Debug, Clone)]
pub struct FiniteTree {
    k: usize,
    depth: usize,
    parent: Vec<usize>,
    generations: Vec<Vec<usize>>,
}

impl FiniteTree {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    /// Parent of a non-root vertex.
    pub fn parent(&self, v: usize) -> usize {
        debug_assert!(v > 0);
        self.parent[v]
    }

    /// Vertex lists W_0, …, W_n.
    pub fn generations(&self) -> &[Vec<usize>] {
        &self.generations
    }

    /// The outermost generation W_n.
    pub fn boundary(&self) -> &[usize] {
        &self.generations[self.depth]
    }

    /// Number of vertices in the inner volume V_m.
    pub fn inner_volume_size(&self, m: usize) -> usize {
        self.generations[..=m].iter().map(Vec::len).sum()
    }

    /// Edges as (child, parent) pairs; there are |V_n| − 1 of them.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.parent.len()).map(move |v| (v, self.parent[v]))
    }

    /// Checks the exhaustive-summation budget for a q-state model:
    /// q^{|V_n|} ≤ 10^8 full configurations and q^{|W_n|} ≤ 10^6 boundary
    /// configurations.
    pub fn guard(&self, q: usize) -> Result<()> {
        let full = checked_pow(q, self.vertex_count());
        if full.is_none_or(|c| c > tol::GUARD_FULL_CONFIGS) {
            return Err(PottsError::SizeGuard(format!(
                "q^|V_n| = {q}^{} exceeds the {} full-configuration budget",
                self.vertex_count(),
                tol::GUARD_FULL_CONFIGS
            )));
        }
        let boundary = checked_pow(q, self.boundary().len());
        if boundary.is_none_or(|c| c > tol::GUARD_BOUNDARY_CONFIGS) {
            return Err(PottsError::SizeGuard(format!(
                "q^|W_n| = {q}^{} exceeds the {} boundary-configuration budget",
                self.boundary().len(),
                tol::GUARD_BOUNDARY_CONFIGS
            )));
        }
        Ok(())
    }
}

fn checked_pow(base: usize, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
        if acc > tol::GUARD_FULL_CONFIGS * 2 {
            return None;
        }
    }
    Some(acc)
}

/// Builds the volume V_n: |W_0| = 1, |W_1| = k + 1, |W_{m+1}| = k·|W_m|.
pub fn build_tree(k: usize, n: usize) -> Result<FiniteTree> {
    if k < 2 {
        return Err(PottsError::InvalidParameter(format!("k = {k}, need k >= 2")));
    }
    if n < 1 {
        return Err(PottsError::InvalidParameter("tree depth n must be >= 1".into()));
    }
    // Structural cap; the per-model configuration guard is far tighter.
    let mut size: usize = 1;
    let mut width = k + 1;
    for _ in 0..n {
        size = size
            .checked_add(width)
            .filter(|&s| s <= 1_000_000)
            .ok_or_else(|| PottsError::SizeGuard(format!("V_{n} exceeds 10^6 vertices")))?;
        width *= k;
    }

    let mut parent = vec![0usize];
    let mut generations = vec![vec![0usize]];
    for level in 1..=n {
        let mut gen = Vec::new();
        for &p in &generations[level - 1] {
            let fanout = if level == 1 { k + 1 } else { k };
            for _ in 0..fanout {
                gen.push(parent.len());
                parent.push(p);
            }
        }
        generations.push(gen);
    }
    Ok(FiniteTree { k, depth: n, parent, generations })
}

/// A spin assignment σ: V_n → {1, …, q}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteConfiguration {
    spins: Vec<u8>,
}

impl FiniteConfiguration {
    /// Builds a total assignment with 1-based spins.
    pub fn new(spins: Vec<u8>, tree: &FiniteTree, q: usize) -> Result<Self> {
        if spins.len() != tree.vertex_count() {
            return Err(PottsError::InvalidParameter(format!(
                "configuration has {} spins, volume has {} vertices",
                spins.len(),
                tree.vertex_count()
            )));
        }
        if spins.iter().any(|&s| s == 0 || usize::from(s) > q) {
            return Err(PottsError::InvalidParameter(format!("spins must lie in 1..={q}")));
        }
        Ok(Self { spins })
    }

    pub fn spins(&self) -> &[u8] {
        &self.spins
    }

    /// 0-based digits, the internal enumeration encoding.
    pub(crate) fn digits(&self) -> Vec<u8> {
        self.spins.iter().map(|&s| s - 1).collect()
    }
}

/// Calls `f` with every 0-based configuration of `sites` spins over q states,
/// in odometer order (site 0 is the fastest digit).
pub(crate) fn for_each_config(sites: usize, q: usize, mut f: impl FnMut(&[u8])) {
    let mut digits = vec![0u8; sites];
    loop {
        f(&digits);
        let mut pos = 0;
        loop {
            if pos == sites {
                return;
            }
            digits[pos] += 1;
            if usize::from(digits[pos]) < q {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_shapes() {
        let t = build_tree(2, 1).unwrap();
        assert_eq!(t.vertex_count(), 4); // root + 3
        assert_eq!(t.edges().count(), 3);
        assert_eq!(t.boundary().len(), 3);

        let t = build_tree(2, 2).unwrap();
        assert_eq!(t.vertex_count(), 10); // 1 + 3 + 6
        assert_eq!(t.generations()[2].len(), 6);
        assert_eq!(t.inner_volume_size(1), 4);

        let t = build_tree(3, 1).unwrap();
        assert_eq!(t.vertex_count(), 5);
    }

    #[test]
    fn every_non_root_vertex_has_one_parent_in_previous_generation() {
        let t = build_tree(3, 3).unwrap();
        for level in 1..=3 {
            for &v in &t.generations()[level] {
                let p = t.parent(v);
                assert!(t.generations()[level - 1].contains(&p));
            }
        }
        assert_eq!(t.edges().count(), t.vertex_count() - 1);
    }

    #[test]
    fn guard_accepts_and_rejects() {
        let t = build_tree(2, 2).unwrap();
        assert!(t.guard(3).is_ok()); // 3^10 ≈ 5.9e4
        assert!(t.guard(4).is_ok()); // 4^10 ≈ 1.0e6
        let t3 = build_tree(2, 3).unwrap(); // 22 vertices
        assert!(t3.guard(3).is_err()); // 3^22 ≈ 3.1e10
        let err = t3.guard(3).unwrap_err().to_string();
        assert!(err.contains("3^22"), "diagnostic must name the cardinalities: {err}");
        let wide = build_tree(5, 2).unwrap(); // boundary 30 wide
        assert!(wide.guard(3).is_err()); // boundary 3^30 over budget
    }

    #[test]
    fn build_rejects_degenerate_input() {
        assert!(build_tree(1, 2).is_err());
        assert!(build_tree(2, 0).is_err());
    }

    #[test]
    fn configuration_validation() {
        let t = build_tree(2, 1).unwrap();
        assert!(FiniteConfiguration::new(vec![1, 2, 3, 1], &t, 3).is_ok());
        assert!(FiniteConfiguration::new(vec![1, 2, 3], &t, 3).is_err());
        assert!(FiniteConfiguration::new(vec![1, 2, 4, 1], &t, 3).is_err());
        assert!(FiniteConfiguration::new(vec![0, 2, 3, 1], &t, 3).is_err());
    }

    #[test]
    fn odometer_visits_every_configuration_once() {
        let mut seen = std::collections::HashSet::new();
        for_each_config(3, 3, |digits| {
            assert!(seen.insert(digits.to_vec()));
        });
        assert_eq!(seen.len(), 27);
    }
}
