//! Small finite fields GF(p^k) with trace, used to build unimodular
//! coefficient families. Elements are indices 0..p^k-1; index i encodes the
//! polynomial whose coefficients are the base-p digits of i (constant first),
//! reduced modulo a fixed irreducible polynomial (the lexicographically
//! smallest monic one, so field construction is deterministic).

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Field {
    pub p: u64,
    pub k: u32,
    pub q: u64,
    /// monic irreducible of degree k: coefficients c_0..c_k, c_k = 1
    modulus: Vec<u64>,
    trace_table: Vec<u64>,
}

impl Field {
    pub fn new(p: u64, k: u32) -> Result<Field> {
        if !small_prime(p) {
            return Err(Error::FieldConstruction(format!("{p} is not prime")));
        }
        if k == 0 || k > 8 {
            return Err(Error::FieldConstruction(format!(
                "extension degree {k} out of the supported range 1..=8"
            )));
        }
        let q = p
            .checked_pow(k)
            .ok_or_else(|| Error::FieldConstruction("p^k overflows".into()))?;
        if q > 1 << 20 {
            return Err(Error::FieldConstruction(format!(
                "field size {q} too large for table-based arithmetic"
            )));
        }
        let modulus = find_irreducible(p, k)?;
        let mut field = Field {
            p,
            k,
            q,
            modulus,
            trace_table: Vec::new(),
        };
        field.trace_table = (0..q).map(|i| field.trace_slow(i)).collect();
        Ok(field)
    }

    fn digits(&self, mut i: u64) -> Vec<u64> {
        let mut d = vec![0u64; self.k as usize];
        for slot in d.iter_mut() {
            *slot = i % self.p;
            i /= self.p;
        }
        d
    }

    fn index(&self, digits: &[u64]) -> u64 {
        let mut v = 0u64;
        for &c in digits.iter().rev() {
            v = v * self.p + c;
        }
        v
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let da = self.digits(a);
        let db = self.digits(b);
        let sum: Vec<u64> = da
            .iter()
            .zip(&db)
            .map(|(x, y)| (x + y) % self.p)
            .collect();
        self.index(&sum)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let da = self.digits(a);
        let db = self.digits(b);
        let k = self.k as usize;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        // reduce modulo the monic irreducible
        for d in (k..prod.len()).rev() {
            let lead = prod[d];
            if lead != 0 {
                prod[d] = 0;
                for i in 0..k {
                    let idx = d - k + i;
                    prod[idx] = (prod[idx] + (self.p - self.modulus[i] % self.p) * lead) % self.p;
                }
            }
        }
        self.index(&prod[..k])
    }

    pub fn pow(&self, mut a: u64, mut n: u64) -> u64 {
        let mut r = 1u64; // index of the element 1
        while n > 0 {
            if n & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            n >>= 1;
        }
        r
    }

    fn trace_slow(&self, a: u64) -> u64 {
        // tr(a) = a + a^p + ... + a^{p^{k-1}}, lands in the prime field
        let mut acc = 0u64;
        let mut x = a;
        for _ in 0..self.k {
            acc = self.add(acc, x);
            x = self.pow(x, self.p);
        }
        debug_assert!(acc < self.p, "trace must lie in the prime subfield");
        acc
    }

    /// tr: GF(p^k) -> F_p, table lookup.
    pub fn trace(&self, a: u64) -> u64 {
        self.trace_table[a as usize]
    }

    /// Multiplicative inverse by scan (fields here are tiny).
    pub fn inverse(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::InvalidParameter("zero has no inverse".into()));
        }
        for x in 1..self.q {
            if self.mul(a, x) == 1 {
                return Ok(x);
            }
        }
        unreachable!("every nonzero element of a field is invertible")
    }
}

fn small_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Lexicographically smallest monic irreducible of degree k over F_p,
/// returned as coefficients c_0..c_{k-1} (the monic leading 1 is implied
/// where a full vector is needed).
fn find_irreducible(p: u64, k: u32) -> Result<Vec<u64>> {
    let k = k as usize;
    if k == 1 {
        return Ok(vec![0]);
    }
    let total = p.pow(k as u32);
    'outer: for code in 0..total {
        // candidate tail c_0..c_{k-1}
        let mut tail = Vec::with_capacity(k);
        let mut c = code;
        for _ in 0..k {
            tail.push(c % p);
            c /= p;
        }
        let mut cand = tail.clone();
        cand.push(1); // monic
        for d in 1..=k / 2 {
            let divisors = p.pow(d as u32);
            for dc in 0..divisors {
                let mut div = Vec::with_capacity(d + 1);
                let mut x = dc;
                for _ in 0..d {
                    div.push(x % p);
                    x /= p;
                }
                div.push(1);
                if poly_divides(&div, &cand, p) {
                    continue 'outer;
                }
            }
        }
        return Ok(tail);
    }
    Err(Error::FieldConstruction(format!(
        "no irreducible polynomial of degree {k} over F_{p}"
    )))
}

fn poly_divides(div: &[u64], poly: &[u64], p: u64) -> bool {
    let mut rem: Vec<u64> = poly.to_vec();
    while rem.len() >= div.len() {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let shift = rem.len() - div.len();
            // div is monic, so the quotient digit is just `lead`
            for (i, &dc) in div.iter().enumerate() {
                rem[shift + i] = (rem[shift + i] + (p - dc % p) * lead) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}
