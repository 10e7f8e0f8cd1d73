//! Position sets Theta (arithmetic progressions or explicit sets) and the
//! block schemes that partition a progression into consecutive slices of
//! sizes p, p^2, p^3, ...

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of positions (prime indices). Progressions are {u + k v : k >= 1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Theta {
    Progression { u: u64, v: u64 },
    Explicit { positions: BTreeSet<u64> },
}

impl Theta {
    pub fn progression(u: u64, v: u64) -> Theta {
        Theta::Progression { u, v }
    }

    pub fn contains(&self, pos: u64) -> bool {
        match self {
            Theta::Progression { u, v } => pos > *u && (pos - u) % v == 0,
            Theta::Explicit { positions } => positions.contains(&pos),
        }
    }

    /// k-th element (1-based) of a progression; explicit sets in order.
    pub fn element(&self, k: u64) -> Result<u64> {
        match self {
            Theta::Progression { u, v } => u
                .checked_add(k.checked_mul(*v).ok_or_else(overflow)?)
                .ok_or_else(overflow),
            Theta::Explicit { positions } => positions
                .iter()
                .nth(k as usize - 1)
                .copied()
                .ok_or_else(|| Error::InvalidParameter("explicit set exhausted".into())),
        }
    }
}

fn overflow() -> Error {
    Error::InvalidParameter("progression position overflows u64".into())
}

/// A progression Theta subdivided into consecutive blocks of sizes p^1..p^K.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockScheme {
    pub u: u64,
    pub v: u64,
    pub p: u64,
    pub degree: u32,
    /// blocks[k-1] holds the p^k positions of the k-th block, ascending
    pub blocks: Vec<Vec<u64>>,
}

impl BlockScheme {
    pub fn theta(&self) -> Theta {
        Theta::progression(self.u, self.v)
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Largest position used by any block.
    pub fn max_position(&self) -> u64 {
        self.blocks
            .last()
            .and_then(|b| b.last())
            .copied()
            .unwrap_or(self.u)
    }
}

/// Slice the progression {u + kv : k >= 1} into K consecutive blocks of
/// sizes p, p^2, ..., p^K. Requires p prime and p > m (the degree served).
pub fn make_blocks(u: u64, v: u64, p: u64, blocks: usize, degree: u32) -> Result<BlockScheme> {
    if u < 1 || v < 1 {
        return Err(Error::InvalidParameter("progression needs u, v >= 1".into()));
    }
    if blocks == 0 {
        return Err(Error::InvalidParameter("need at least one block".into()));
    }
    if p <= degree as u64 {
        return Err(Error::InvalidParameter(format!(
            "block prime p = {p} must exceed the degree m = {degree}"
        )));
    }
    if !is_small_prime(p) {
        return Err(Error::InvalidParameter(format!("p = {p} is not prime")));
    }
    let theta = Theta::progression(u, v);
    let mut out = Vec::with_capacity(blocks);
    let mut next = 1u64;
    for k in 1..=blocks as u32 {
        let size = p.checked_pow(k).ok_or_else(overflow)?;
        let mut block = Vec::with_capacity(size as usize);
        for _ in 0..size {
            block.push(theta.element(next)?);
            next += 1;
        }
        out.push(block);
    }
    Ok(BlockScheme {
        u,
        v,
        p,
        degree,
        blocks: out,
    })
}

fn is_small_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Pairwise disjoint progressions: residues 1..count modulo the next power
/// of two above count. Their union misses residue 0 entirely.
pub fn disjoint_theta_family(count: usize) -> Vec<Theta> {
    assert!(count >= 1);
    let modulus = ((count + 1) as u64).next_power_of_two();
    (1..=count as u64)
        .map(|r| Theta::progression(r, modulus))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_block_of_odd_progression() {
        // {3 + 2k : k >= 1} sliced with p = 5
        let s = make_blocks(3, 2, 5, 1, 2).unwrap();
        assert_eq!(s.blocks[0], vec![5, 7, 9, 11, 13]);
    }

    #[test]
    fn second_block_is_next_25() {
        let s = make_blocks(3, 2, 5, 2, 2).unwrap();
        assert_eq!(s.blocks[1].len(), 25);
        assert_eq!(*s.blocks[1].first().unwrap(), 15);
        assert_eq!(*s.blocks[1].last().unwrap(), 63);
    }

    #[test]
    fn blocks_partition_initial_segment() {
        let s = make_blocks(1, 3, 3, 3, 2).unwrap();
        let mut all: Vec<u64> = s.blocks.iter().flatten().copied().collect();
        let n = all.len();
        assert_eq!(n, 3 + 9 + 27);
        all.dedup();
        assert_eq!(all.len(), n, "blocks must be pairwise disjoint");
        let theta = s.theta();
        for (i, pos) in all.iter().enumerate() {
            assert_eq!(*pos, theta.element(i as u64 + 1).unwrap());
        }
    }

    #[test]
    fn rejects_small_or_composite_p() {
        assert!(make_blocks(1, 1, 2, 1, 2).is_err()); // p <= m
        assert!(make_blocks(1, 1, 9, 1, 2).is_err()); // composite
    }

    #[test]
    fn progression_membership() {
        let t = Theta::progression(3, 2);
        assert!(t.contains(5));
        assert!(t.contains(13));
        assert!(!t.contains(3)); // k >= 1
        assert!(!t.contains(4));
    }

    #[test]
    fn family_is_pairwise_disjoint() {
        let fam = disjoint_theta_family(12);
        assert_eq!(fam.len(), 12);
        for pos in 1..2000u64 {
            let hits = fam.iter().filter(|t| t.contains(pos)).count();
            assert!(hits <= 1, "position {pos} in {hits} progressions");
            if pos % 16 == 0 {
                assert_eq!(hits, 0, "residue 0 must be missed");
            }
        }
    }
}
