//! Designs as sets of F4 vectors, their decoding partitions and rate.

use std::collections::HashSet;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::f4::F4Vec;
use crate::linear::LinearDesign;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub name: String,
    pub members: Vec<usize>,
}

/// A set of distinct vectors of F2 ⊕ F4^m (one per real symbol) with an
/// optional partition into decoding groups. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Design {
    m: usize,
    vectors: Vec<F4Vec>,
    partition: Option<Vec<Group>>,
}

impl Design {
    pub fn new(m: usize, vectors: Vec<F4Vec>) -> Result<Design> {
        let mut seen = HashSet::new();
        for v in &vectors {
            if v.m() != m {
                return Err(Error::DimensionMismatch(v.m(), m));
            }
            if !seen.insert(v) {
                return Err(Error::DuplicateVector(v.to_string()));
            }
        }
        Ok(Design { m, vectors, partition: None })
    }

    /// Attaches named groups. Only the covering is checked here; see
    /// [`validate_partition`] for the decodability condition.
    pub fn with_groups(mut self, groups: Vec<Group>) -> Result<Design> {
        let idx: Vec<Vec<usize>> = groups.iter().map(|g| g.members.clone()).collect();
        check_cover(self.k(), &idx)?;
        self.partition = Some(groups);
        Ok(self)
    }

    /// Attaches groups named `S1, S2, …`.
    pub fn with_partition(self, groups: Vec<Vec<usize>>) -> Result<Design> {
        let named = groups
            .into_iter()
            .enumerate()
            .map(|(i, members)| Group { name: format!("S{}", i + 1), members })
            .collect();
        self.with_groups(named)
    }

    pub fn without_partition(mut self) -> Design {
        self.partition = None;
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of real symbols.
    pub fn k(&self) -> usize {
        self.vectors.len()
    }

    pub fn n(&self) -> usize {
        1 << self.m
    }

    pub fn vectors(&self) -> &[F4Vec] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &F4Vec {
        &self.vectors[i]
    }

    pub fn index_of(&self, v: &F4Vec) -> Option<usize> {
        self.vectors.iter().position(|x| x == v)
    }

    pub fn groups(&self) -> Option<&[Group]> {
        self.partition.as_deref()
    }

    /// Partition as index sets; the finest partition when none is attached.
    pub fn partition_indices(&self) -> Vec<Vec<usize>> {
        match &self.partition {
            Some(gs) => gs.iter().map(|g| g.members.clone()).collect(),
            None => finest_partition(self).groups,
        }
    }

    /// Complex symbols per channel use, `K / (2·2^m)`.
    pub fn rate(&self) -> Rational64 {
        Rational64::new(self.k() as i64, 2 << self.m)
    }

    pub fn to_linear_design(&self) -> LinearDesign {
        LinearDesign::from_design(self)
    }

    pub fn same_vector_set(&self, other: &Design) -> bool {
        let a: HashSet<&F4Vec> = self.vectors.iter().collect();
        let b: HashSet<&F4Vec> = other.vectors.iter().collect();
        self.m == other.m && a == b
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionReport {
    pub groups: Vec<Vec<usize>>,
    pub valid: bool,
    /// First cross-group pair whose sum has even weight.
    pub witness: Option<(usize, usize)>,
}

impl PartitionReport {
    pub fn g(&self) -> usize {
        self.groups.len()
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
    }
}

fn components(vectors: &[&F4Vec]) -> Vec<Vec<usize>> {
    let k = vectors.len();
    let mut uf = UnionFind::new(k);
    for i in 0..k {
        for j in i + 1..k {
            if !(vectors[i] + vectors[j]).is_odd() {
                uf.union(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; k];
    for i in 0..k {
        let r = uf.find(i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Connected components of the graph joining vectors whose sum has even
/// weight, ordered by smallest member.
pub fn finest_partition(d: &Design) -> PartitionReport {
    let refs: Vec<&F4Vec> = d.vectors.iter().collect();
    PartitionReport { groups: components(&refs), valid: true, witness: None }
}

fn check_cover(k: usize, groups: &[Vec<usize>]) -> Result<()> {
    let mut seen = vec![false; k];
    for g in groups {
        if g.is_empty() {
            return Err(Error::MalformedPartition("empty group".into()));
        }
        for &i in g {
            if i >= k {
                return Err(Error::MalformedPartition(format!("index {} out of range 1..={k}", i + 1)));
            }
            if seen[i] {
                return Err(Error::MalformedPartition(format!("index {} appears twice", i + 1)));
            }
            seen[i] = true;
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::MalformedPartition(format!("index {} not covered", i + 1)));
    }
    Ok(())
}

pub fn validate_partition(d: &Design, groups: &[Vec<usize>]) -> Result<PartitionReport> {
    check_cover(d.k(), groups)?;
    let mut owner = vec![0; d.k()];
    for (gi, g) in groups.iter().enumerate() {
        for &i in g {
            owner[i] = gi;
        }
    }
    let mut witness = None;
    'outer: for i in 0..d.k() {
        for j in i + 1..d.k() {
            if owner[i] != owner[j] && !(&d.vectors[i] + &d.vectors[j]).is_odd() {
                witness = Some((i, j));
                break 'outer;
            }
        }
    }
    Ok(PartitionReport { groups: groups.to_vec(), valid: witness.is_none(), witness })
}

/// Finest partition of the sub-design indexed by `gamma`, in original indices.
pub fn conditional_partition(d: &Design, gamma: &[usize]) -> Result<PartitionReport> {
    let mut sorted = gamma.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if gamma.is_empty() || sorted.len() != gamma.len() || sorted.len() >= d.k() {
        return Err(Error::Precondition("subset must be nonempty, proper and without repeats".into()));
    }
    if let Some(&bad) = sorted.iter().find(|&&i| i >= d.k()) {
        return Err(Error::Precondition(format!("index {} out of range", bad + 1)));
    }
    let refs: Vec<&F4Vec> = gamma.iter().map(|&i| &d.vectors[i]).collect();
    let groups = components(&refs)
        .into_iter()
        .map(|g| g.into_iter().map(|i| gamma[i]).collect())
        .collect();
    Ok(PartitionReport { groups, valid: true, witness: None })
}

/// First pair inside one group whose sum has odd weight.
pub fn intra_group_odd_pair(d: &Design, groups: &[Vec<usize>]) -> Option<(usize, usize)> {
    for g in groups {
        for (a, &i) in g.iter().enumerate() {
            for &j in &g[a + 1..] {
                if (&d.vectors[i] + &d.vectors[j]).is_odd() {
                    return Some((i.min(j), i.max(j)));
                }
            }
        }
    }
    None
}
