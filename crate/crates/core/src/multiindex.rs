//! Finite multi-indices alpha in N_0^(N).
//!
//! A `MultiIndex` is the canonical key for both power-series monomials z^alpha
//! and Dirichlet indices n = p^alpha (p_j the j-th prime). Stored as a sorted
//! list of (position, exponent) pairs with all exponents >= 1; the empty list
//! is the zero multi-index (n = 1, the constant monomial).

use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex {
    /// (position, exponent), ascending positions, exponents >= 1.
    entries: Vec<(u64, u32)>,
}

impl MultiIndex {
    /// The zero multi-index (empty support).
    pub fn unit() -> MultiIndex {
        MultiIndex::default()
    }

    /// Single position with exponent 1.
    pub fn var(position: u64) -> MultiIndex {
        MultiIndex::monomial(position, 1)
    }

    /// Single position with a given exponent (0 collapses to the unit).
    pub fn monomial(position: u64, exponent: u32) -> MultiIndex {
        assert!(position >= 1, "positions are 1-based");
        if exponent == 0 {
            return MultiIndex::unit();
        }
        MultiIndex {
            entries: vec![(position, exponent)],
        }
    }

    /// Build from (position, exponent) pairs; merges duplicates, drops zeros.
    pub fn from_pairs<I: IntoIterator<Item = (u64, u32)>>(pairs: I) -> MultiIndex {
        let mut v: Vec<(u64, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        v.sort_by_key(|&(p, _)| p);
        let mut out: Vec<(u64, u32)> = Vec::with_capacity(v.len());
        for (p, e) in v {
            assert!(p >= 1, "positions are 1-based");
            match out.last_mut() {
                Some(last) if last.0 == p => last.1 += e,
                _ => out.push((p, e)),
            }
        }
        MultiIndex { entries: out }
    }

    pub fn entries(&self) -> &[(u64, u32)] {
        &self.entries
    }

    pub fn is_unit(&self) -> bool {
        self.entries.is_empty()
    }

    /// |alpha| = sum of exponents; equals Omega(p^alpha).
    pub fn degree(&self) -> u32 {
        self.entries.iter().map(|&(_, e)| e).sum()
    }

    /// supp(alpha): the set of positions with nonzero exponent.
    pub fn support(&self) -> BTreeSet<u64> {
        self.entries.iter().map(|&(p, _)| p).collect()
    }

    pub fn exponent_at(&self, position: u64) -> u32 {
        self.entries
            .binary_search_by_key(&position, |&(p, _)| p)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// Componentwise sum; multiplication of monomials / Dirichlet indices.
    pub fn combine(&self, other: &MultiIndex) -> MultiIndex {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (pa, ea) = self.entries[i];
            let (pb, eb) = other.entries[j];
            if pa < pb {
                out.push((pa, ea));
                i += 1;
            } else if pb < pa {
                out.push((pb, eb));
                j += 1;
            } else {
                out.push((pa, ea + eb));
                i += 1;
                j += 1;
            }
        }
        out.extend_from_slice(&self.entries[i..]);
        out.extend_from_slice(&other.entries[j..]);
        MultiIndex { entries: out }
    }

    /// Componentwise difference if `other <= self` pointwise, else None.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = Vec::with_capacity(self.entries.len());
        let mut i = 0;
        for &(p, e) in &other.entries {
            loop {
                if i >= self.entries.len() {
                    return None;
                }
                let (sp, se) = self.entries[i];
                if sp < p {
                    out.push((sp, se));
                    i += 1;
                } else if sp == p {
                    if se < e {
                        return None;
                    }
                    if se > e {
                        out.push((sp, se - e));
                    }
                    i += 1;
                    break;
                } else {
                    return None;
                }
            }
        }
        out.extend_from_slice(&self.entries[i..]);
        Some(MultiIndex { entries: out })
    }

    /// alpha! = product of exponent factorials (as f64; desk-scale degrees).
    pub fn factorial(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, e)| (1..=e as u64).product::<u64>() as f64)
            .product()
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "a[]");
        }
        write!(f, "a[")?;
        for (i, (p, e)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p}^{e}")?;
        }
        write!(f, "]")
    }
}
