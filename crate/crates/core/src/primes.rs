//! Growable prime table and the index <-> multi-index correspondence.
//!
//! Every n >= 1 factors uniquely as n = p^alpha over the ascending primes
//! p_1 = 2, p_2 = 3, ...; positions in a `MultiIndex` are 1-based prime
//! indices. The table grows on demand (sieve) and is never shrunk, so
//! concurrent readers always see a prefix of the final table.

use std::collections::BTreeMap;
use std::sync::RwLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use crate::dd::{self, Dd};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;

/// Upper bound used when sieving for the first `n` primes.
fn sieve_limit_for(n: usize) -> u64 {
    if n < 6 {
        return 16;
    }
    let nf = n as f64;
    let lim = nf * (nf.ln() + nf.ln().ln()) * 1.2 + 16.0;
    lim as u64
}

fn sieve_primes(limit: u64) -> Vec<u64> {
    let limit = limit.max(3) as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

pub struct PrimeTable {
    primes: RwLock<Vec<u64>>,
    /// memoized high-precision logarithms per prime index (grow-only)
    lns: RwLock<BTreeMap<usize, Dd>>,
    /// growth cap: maximum number of primes the table may hold
    max_primes: usize,
}

impl PrimeTable {
    pub fn with_capacity_limit(max_primes: usize) -> PrimeTable {
        PrimeTable {
            primes: RwLock::new(sieve_primes(sieve_limit_for(64))),
            lns: RwLock::new(BTreeMap::new()),
            max_primes,
        }
    }

    /// Process-wide shared table with a generous default budget.
    pub fn shared() -> &'static PrimeTable {
        static SHARED: Lazy<PrimeTable> = Lazy::new(|| PrimeTable::with_capacity_limit(4_000_000));
        &SHARED
    }

    fn ensure_len(&self, n: usize) -> Result<()> {
        if self.primes.read().unwrap().len() >= n {
            return Ok(());
        }
        if n > self.max_primes {
            return Err(Error::ResourceLimit(format!(
                "prime table growth to {n} entries exceeds budget {}",
                self.max_primes
            )));
        }
        let mut guard = self.primes.write().unwrap();
        let mut target = guard.len().max(64);
        while target < n {
            target *= 2;
        }
        let target = target.min(self.max_primes);
        // grow-only: replace with a strictly longer sieve result
        let mut limit = sieve_limit_for(target);
        loop {
            let sieved = sieve_primes(limit);
            if sieved.len() >= target.max(n) {
                debug_assert!(sieved.starts_with(&guard));
                *guard = sieved;
                break;
            }
            limit = limit * 3 / 2 + 64;
        }
        Ok(())
    }

    /// p_k, 1-based: nth_prime(1) = 2.
    pub fn nth_prime(&self, k: usize) -> Result<u64> {
        if k == 0 {
            return Err(Error::InvalidParameter("prime index is 1-based".into()));
        }
        self.ensure_len(k)?;
        Ok(self.primes.read().unwrap()[k - 1])
    }

    /// ln p_k in double-double precision, memoized.
    pub fn ln_nth_prime(&self, k: usize) -> Result<Dd> {
        if let Some(v) = self.lns.read().unwrap().get(&k) {
            return Ok(*v);
        }
        let p = self.nth_prime(k)?;
        let v = dd::ln_u64(p);
        self.lns.write().unwrap().insert(k, v);
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.primes.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Smallest C with p_n <= C * n^(1+eps) for every n <= n_max,
    /// checked exhaustively over the (grown) table.
    pub fn pnt_constant(&self, eps: f64, n_max: usize) -> Result<f64> {
        if eps < 0.0 {
            return Err(Error::InvalidParameter("pnt_constant needs eps >= 0".into()));
        }
        self.ensure_len(n_max)?;
        let guard = self.primes.read().unwrap();
        let mut c: f64 = 0.0;
        for (i, &p) in guard[..n_max].iter().enumerate() {
            let n = (i + 1) as f64;
            c = c.max(p as f64 / n.powf(1.0 + eps));
        }
        Ok(c)
    }

    /// n = p^alpha as an exact big integer.
    pub fn multiindex_to_index(&self, alpha: &MultiIndex) -> Result<BigUint> {
        let mut n = BigUint::one();
        for &(pos, exp) in alpha.entries() {
            let p = self.nth_prime(pos as usize)?;
            n *= BigUint::from(p).pow(exp);
        }
        Ok(n)
    }

    /// Inverse of `multiindex_to_index`: factor n over the table primes.
    pub fn index_to_multiindex(&self, n: &BigUint) -> Result<MultiIndex> {
        if n.is_zero() {
            return Err(Error::InvalidParameter(
                "Dirichlet indices are positive".into(),
            ));
        }
        let mut rest = n.clone();
        let mut pairs: Vec<(u64, u32)> = Vec::new();
        let mut pos = 1usize;
        while !rest.is_one() {
            let p = self.nth_prime(pos)?;
            let pb = BigUint::from(p);
            // early exit: if p^2 > rest, the remainder is prime
            if &pb * &pb > rest {
                let r = rest
                    .to_u64()
                    .ok_or_else(|| Error::ResourceLimit("prime factor exceeds u64".into()))?;
                let idx = self.index_of_prime(r)?;
                pairs.push((idx as u64, 1));
                break;
            }
            let mut e = 0u32;
            while (&rest % &pb).is_zero() {
                rest /= &pb;
                e += 1;
            }
            if e > 0 {
                pairs.push((pos as u64, e));
            }
            pos += 1;
        }
        Ok(MultiIndex::from_pairs(pairs))
    }

    /// 1-based index of a prime value in the table (error if not prime).
    pub fn index_of_prime(&self, p: u64) -> Result<usize> {
        // grow until the table covers p
        let mut n = self.len();
        loop {
            {
                let guard = self.primes.read().unwrap();
                if let Some(&last) = guard.last() {
                    if last >= p {
                        return match guard.binary_search(&p) {
                            Ok(i) => Ok(i + 1),
                            Err(_) => Err(Error::InvalidParameter(format!(
                                "{p} is not prime (trial factor left over)"
                            ))),
                        };
                    }
                }
            }
            n *= 2;
            self.ensure_len(n)?;
        }
    }

    pub fn is_prime(&self, p: u64) -> Result<bool> {
        Ok(self.index_of_prime(p).is_ok())
    }
}

/// Omega(p^alpha): number of prime divisors with multiplicity.
pub fn omega(alpha: &MultiIndex) -> u32 {
    alpha.degree()
}
