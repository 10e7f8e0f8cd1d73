//! Homogeneous polynomials with unimodular multilinear coefficients and a
//! certified sup-norm bound.
//!
//! For a field F_q (q = p^k, p prime > m) the degree-m polynomial on q
//! variables indexed by the field elements is
//!
//!   R(z) = sum over ordered tuples (x_1..x_m) of
//!          w^{tr(x_1 x_2 + x_2 x_3 + ... + x_{m-1} x_m)} z_{x_1}...z_{x_m},
//!
//! w = e^{2 pi i / p}. Writing W for the q x q matrix W_{xy} = w^{tr(xy)}
//! (which satisfies W W* = qI) and D_z = diag(z), the value is
//! z^T (W D_z)^{m-2} W z, so |R(z)| <= q * (sqrt q)^{m-1} = q^{(m+1)/2} on
//! the closed polydisc. Grouped monomial coefficients are sums of m!/alpha!
//! p-th roots of unity; since p > m, p never divides m!/alpha!, and a
//! vanishing sum of p-th roots (p prime) must have length divisible by p,
//! so every grouped coefficient is nonzero.
//!
//! Points z_x = w^{tr(lambda x^2)} turn the value into an iterated Gauss sum;
//! for suitable lambda the modulus reaches q^{(m+1)/2} exactly. These are the
//! witness points used to certify norm estimates from below.

use num_complex::Complex64;

use crate::analysis::TorusPoint;
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::multiindex::MultiIndex;
use crate::series::{Side, SparseSeries};

/// Visit every distinct ordered arrangement of the multiset {values[i] with
/// multiplicity counts[i]}.
fn for_each_arrangement<F: FnMut(&[u64])>(values: &[u64], counts: &mut [u32], m: usize, f: &mut F) {
    fn rec<F: FnMut(&[u64])>(
        values: &[u64],
        counts: &mut [u32],
        buf: &mut Vec<u64>,
        m: usize,
        f: &mut F,
    ) {
        if buf.len() == m {
            f(buf);
            return;
        }
        for i in 0..values.len() {
            if counts[i] > 0 {
                counts[i] -= 1;
                buf.push(values[i]);
                rec(values, counts, buf, m, f);
                buf.pop();
                counts[i] += 1;
            }
        }
    }
    let mut buf = Vec::with_capacity(m);
    rec(values, counts, &mut buf, m, f);
}

fn chain_trace(field: &Field, tuple: &[u64]) -> u64 {
    let mut t = 0u64;
    for pair in tuple.windows(2) {
        t = (t + field.trace(field.mul(pair[0], pair[1]))) % field.p;
    }
    t
}

/// The m-homogeneous unimodular polynomial on q = p^k variables,
/// power side, positions 1..=q (variable j holds field element j-1).
pub fn make_unimodular_poly(p: u64, k: u32, m: u32) -> Result<SparseSeries> {
    if m < 2 {
        return Err(Error::InvalidParameter("degree m must be >= 2".into()));
    }
    if p <= m as u64 {
        return Err(Error::InvalidParameter(format!(
            "need p > m (got p = {p}, m = {m})"
        )));
    }
    if m > 6 {
        return Err(Error::InvalidParameter(
            "degrees above 6 exceed the enumeration budget".into(),
        ));
    }
    let field = Field::new(p, k)?;
    let q = field.q;
    let omega: Vec<Complex64> = (0..p)
        .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / p as f64))
        .collect();

    let mut terms: Vec<(MultiIndex, Complex64)> = Vec::new();
    // iterate multisets of size m over field elements 0..q as
    // non-decreasing index vectors
    let m_us = m as usize;
    let mut idx = vec![0u64; m_us];
    loop {
        // grouped coefficient: sum over distinct arrangements
        let mut values: Vec<u64> = Vec::with_capacity(m_us);
        let mut counts: Vec<u32> = Vec::with_capacity(m_us);
        for &x in &idx {
            match values.last() {
                Some(&last) if last == x => *counts.last_mut().unwrap() += 1,
                _ => {
                    values.push(x);
                    counts.push(1);
                }
            }
        }
        let mut coeff = Complex64::new(0.0, 0.0);
        for_each_arrangement(&values, &mut counts.clone(), m_us, &mut |tuple| {
            coeff += omega[chain_trace(&field, tuple) as usize];
        });
        let alpha = MultiIndex::from_pairs(
            values
                .iter()
                .zip(&counts)
                .map(|(&x, &c)| (x + 1, c)), // positions are 1-based
        );
        debug_assert!(
            coeff.norm() > 1e-9,
            "grouped coefficient vanished at {alpha:?}"
        );
        terms.push((alpha, coeff));

        // next non-decreasing vector
        let mut pos = m_us;
        loop {
            if pos == 0 {
                return Ok(SparseSeries::from_terms(Side::Power, terms));
            }
            pos -= 1;
            if idx[pos] + 1 < q {
                let v = idx[pos] + 1;
                for slot in idx.iter_mut().skip(pos) {
                    *slot = v;
                }
                break;
            }
        }
    }
}

/// min nonzero |sum of at most m! p-th roots of unity|, by enumeration
/// (sums below 1e-9 in modulus are treated as exact zeros).
pub fn eta_floor(p: u64, m: u32) -> f64 {
    let m_fact: u64 = (1..=m as u64).product();
    let omega: Vec<Complex64> = (0..p)
        .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / p as f64))
        .collect();
    // multisets of root exponents, any size 1..=m!; odometer as above
    let mut best = f64::INFINITY;
    fn rec(
        omega: &[Complex64],
        start: usize,
        remaining: u64,
        sum: Complex64,
        started: bool,
        best: &mut f64,
    ) {
        if started {
            let a = sum.norm();
            if a > 1e-9 && a < *best {
                *best = a;
            }
        }
        if remaining == 0 {
            return;
        }
        for j in start..omega.len() {
            rec(omega, j, remaining - 1, sum + omega[j], true, best);
        }
    }
    rec(&omega, 0, m_fact, Complex64::new(0.0, 0.0), false, &mut best);
    best
}

/// Matrix-free evaluation of the chain polynomial on a full coordinate
/// vector z (length q, element order). Used by the witness scan.
pub fn chain_eval(field: &Field, m: u32, z: &[Complex64]) -> Complex64 {
    let q = field.q as usize;
    assert_eq!(z.len(), q);
    let p = field.p;
    let omega: Vec<Complex64> = (0..p)
        .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / p as f64))
        .collect();
    let w_row = |x: u64, v: &[Complex64]| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (y, &vy) in v.iter().enumerate() {
            acc += omega[field.trace(field.mul(x, y as u64)) as usize] * vy;
        }
        acc
    };
    let mut v: Vec<Complex64> = (0..q as u64).map(|x| w_row(x, z)).collect();
    for _ in 0..m.saturating_sub(2) {
        let zv: Vec<Complex64> = z.iter().zip(&v).map(|(a, b)| a * b).collect();
        v = (0..q as u64).map(|x| w_row(x, &zv)).collect();
    }
    z.iter().zip(&v).map(|(a, b)| a * b).sum()
}

/// Quadratic-phase witness: scan lambda in F_q* for a point with
/// |R(z)| >= q^{(m+1)/2} (1 - 1e-9). Returns (lambda, phases in element
/// order, attained value) when one exists.
pub fn quadratic_witness(field: &Field, m: u32) -> Option<(u64, Vec<f64>, f64)> {
    let q = field.q;
    if q > 4096 {
        return None; // scan too large; callers fall back to sampling
    }
    let bound = (q as f64).powf((m as f64 + 1.0) / 2.0);
    let mut best: Option<(u64, Vec<f64>, f64)> = None;
    for lam in 1..q {
        let phases: Vec<f64> = (0..q)
            .map(|x| {
                let t = field.trace(field.mul(lam, field.mul(x, x)));
                std::f64::consts::TAU * t as f64 / field.p as f64
            })
            .collect();
        let z: Vec<Complex64> = phases
            .iter()
            .map(|&t| Complex64::from_polar(1.0, t))
            .collect();
        let val = chain_eval(field, m, &z).norm();
        if best.as_ref().map_or(true, |b| val > b.2) {
            best = Some((lam, phases, val));
        }
        if val >= bound * (1.0 - 1e-9) {
            return best;
        }
    }
    match best {
        Some(b) if b.2 >= bound * (1.0 - 1e-9) => Some(b),
        _ => None,
    }
}

/// Witness phases as a torus point over arbitrary relabeled positions.
pub fn witness_point(positions: &[u64], phases: &[f64]) -> TorusPoint {
    TorusPoint {
        phases: positions.iter().copied().zip(phases.iter().copied()).collect(),
    }
}
