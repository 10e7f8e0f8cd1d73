//! Oracle checks for the sparse arithmetic: the multi-index product must
//! reproduce integer divisor convolution, and the helper operations must
//! match independent elementary computations.

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bohrstrip_core::{Budget, MultiIndex, PrimeTable, Side, SparseSeries};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Random sparse coefficient array over integer indices 1..=max_index.
fn random_dense(rng: &mut ChaCha8Rng, max_index: usize, terms: usize) -> Vec<Complex64> {
    let mut a = vec![c(0.0, 0.0); max_index + 1];
    for _ in 0..terms {
        let n = rng.gen_range(1..=max_index);
        a[n] = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    }
    a
}

/// Divisor convolution by the harmonic double loop: c[n] = sum_{d | n} a_d b_{n/d}.
fn divisor_convolution(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let na = a.len() - 1;
    let nb = b.len() - 1;
    let mut out = vec![c(0.0, 0.0); na * nb + 1];
    for d in 1..=na {
        if a[d] == c(0.0, 0.0) {
            continue;
        }
        for e in 1..=nb {
            if b[e] != c(0.0, 0.0) {
                out[d * e] += a[d] * b[e];
            }
        }
    }
    out
}

fn to_series(table: &PrimeTable, dense: &[Complex64]) -> SparseSeries {
    SparseSeries::from_terms(
        Side::Dirichlet,
        dense.iter().enumerate().skip(1).filter_map(|(n, v)| {
            if *v == c(0.0, 0.0) {
                None
            } else {
                Some((
                    table.index_to_multiindex(&BigUint::from(n)).unwrap(),
                    *v,
                ))
            }
        }),
    )
}

#[test]
fn multiply_matches_divisor_convolution_on_seeded_pairs() {
    let table = PrimeTable::shared();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let budget = Budget::default();
    let start = std::time::Instant::now();
    for _case in 0..100 {
        let a = random_dense(&mut rng, 500, 20);
        let b = random_dense(&mut rng, 500, 20);
        let sa = to_series(table, &a);
        let sb = to_series(table, &b);
        let product = sa.multiply(&sb, &budget).unwrap();
        let oracle = divisor_convolution(&a, &b);

        // identical support and coefficients (1e-12 relative)
        let mut seen = 0usize;
        for (alpha, coeff) in product.terms() {
            let n = table.multiindex_to_index(alpha).unwrap();
            let n: usize = n.try_into().unwrap();
            let expect = oracle[n];
            assert!(
                (coeff - expect).norm() <= 1e-12 * expect.norm().max(1.0),
                "n = {n}: {coeff} vs {expect}"
            );
            seen += 1;
        }
        let oracle_support = oracle.iter().filter(|v| **v != c(0.0, 0.0)).count();
        assert_eq!(seen, oracle_support, "support mismatch");
    }
    assert!(
        start.elapsed().as_secs_f64() < 10.0,
        "oracle comparison must stay under 10 s"
    );
}

#[test]
fn power_matches_iterated_multiply() {
    let table = PrimeTable::shared();
    let budget = Budget::default();
    // 1 + 2^{-s} + 3^{-s}
    let d = SparseSeries::from_terms(
        Side::Dirichlet,
        [
            (MultiIndex::unit(), c(1.0, 0.0)),
            (MultiIndex::var(1), c(1.0, 0.0)),
            (MultiIndex::var(2), c(1.0, 0.0)),
        ],
    );
    let cubed = d.power(3, &budget).unwrap();
    let manual = d
        .multiply(&d, &budget)
        .unwrap()
        .multiply(&d, &budget)
        .unwrap();
    assert!(cubed.approx_eq(&manual, 1e-13));
    // spot value: coefficient of 6^{-s} in (1+2+3)^3 is 3! = 6
    let six = table
        .index_to_multiindex(&BigUint::from(6u32))
        .unwrap();
    assert_eq!(cubed.coeff(&six), c(6.0, 0.0));
}

#[test]
fn homogeneous_parts_distribute_over_products() {
    // homogeneous_part(D * E, r) = sum_{i+j=r} D_i * E_j on random inputs
    let budget = Budget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let mk = |rng: &mut ChaCha8Rng| {
            SparseSeries::from_terms(
                Side::Dirichlet,
                (0..8).map(|_| {
                    let pos = rng.gen_range(1..6u64);
                    let exp = rng.gen_range(1..3u32);
                    (
                        MultiIndex::from_pairs([(pos, exp)]),
                        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    )
                }),
            )
        };
        let d = mk(&mut rng);
        let e = mk(&mut rng);
        let de = d.multiply(&e, &budget).unwrap();
        for r in 0..=8u32 {
            let lhs = de.homogeneous_part(r);
            let mut rhs = SparseSeries::zero(Side::Dirichlet);
            for i in 0..=r {
                let part = d
                    .homogeneous_part(i)
                    .multiply(&e.homogeneous_part(r - i), &budget)
                    .unwrap();
                rhs = rhs.add(&part).unwrap();
            }
            assert!(lhs.approx_eq(&rhs, 1e-12), "degree {r}");
        }
    }
}

#[test]
fn roundtrip_on_range_and_random_products() {
    let table = PrimeTable::shared();
    // exact round trip on 1..10^4
    for n in 1u64..=10_000 {
        let alpha = table.index_to_multiindex(&BigUint::from(n)).unwrap();
        assert_eq!(table.multiindex_to_index(&alpha).unwrap(), BigUint::from(n));
    }
    // 100 random big products of primes
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let mut n = BigUint::from(1u32);
        for _ in 0..rng.gen_range(1..6) {
            let idx = rng.gen_range(1..800usize);
            let e = rng.gen_range(1..5u32);
            n *= BigUint::from(table.nth_prime(idx).unwrap()).pow(e);
        }
        let alpha = table.index_to_multiindex(&n).unwrap();
        assert_eq!(table.multiindex_to_index(&alpha).unwrap(), n);
    }
}
