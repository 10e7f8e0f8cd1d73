//! Finitely supported series over multi-indices.
//!
//! A `SparseSeries` is a finite map MultiIndex -> complex coefficient plus a
//! side tag. Under `Side::Dirichlet` the term at alpha is a_n n^{-s} with
//! n = p^alpha; under `Side::Power` it is c_alpha z^alpha. The Bohr transform
//! is the identity on the stored data — only the side tag flips — which makes
//! Dirichlet multiplication literally multi-index addition.
//!
//! Invariants:
//! - no stored coefficient is exactly 0 (exact cancellation removes the key)
//! - operations are pure; values are immutable after construction

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::theta::Theta;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Dirichlet,
    Power,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Dirichlet => "dirichlet",
            Side::Power => "power",
        }
    }

    pub fn parse(s: &str) -> Result<Side> {
        match s {
            "dirichlet" => Ok(Side::Dirichlet),
            "power" => Ok(Side::Power),
            other => Err(Error::InvalidSeries(format!("unknown side '{other}'"))),
        }
    }
}

/// Term-count budget for product-type operations.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_terms: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_terms: 2_000_000,
        }
    }
}

impl Budget {
    pub fn new(max_terms: u64) -> Budget {
        Budget { max_terms }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseSeries {
    side: Side,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl SparseSeries {
    pub fn zero(side: Side) -> SparseSeries {
        SparseSeries {
            side,
            terms: BTreeMap::new(),
        }
    }

    /// The multiplicative unit: 1 * 1^{-s} (or the constant monomial 1).
    pub fn one(side: Side) -> SparseSeries {
        SparseSeries::monomial(side, MultiIndex::unit(), Complex64::new(1.0, 0.0))
    }

    pub fn monomial(side: Side, alpha: MultiIndex, coeff: Complex64) -> SparseSeries {
        let mut terms = BTreeMap::new();
        if coeff != Complex64::new(0.0, 0.0) {
            terms.insert(alpha, coeff);
        }
        SparseSeries { side, terms }
    }

    pub fn from_terms<I>(side: Side, iter: I) -> SparseSeries
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let mut s = SparseSeries::zero(side);
        for (alpha, c) in iter {
            s.accumulate(alpha, c);
        }
        s
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Reinterpret the stored data on the other side (the Bohr transform).
    pub fn with_side(&self, side: Side) -> SparseSeries {
        SparseSeries {
            side,
            terms: self.terms.clone(),
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Complex64 {
        self.terms
            .get(alpha)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    fn accumulate(&mut self, alpha: MultiIndex, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(alpha) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == Complex64::new(0.0, 0.0) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_side(&self, other: &SparseSeries, op: &str) -> Result<()> {
        if self.side != other.side {
            return Err(Error::SideMismatch(format!(
                "{op}: {} vs {}",
                self.side.as_str(),
                other.side.as_str()
            )));
        }
        Ok(())
    }

    /// Termwise sum; exact cancellation removes keys.
    pub fn add(&self, other: &SparseSeries) -> Result<SparseSeries> {
        self.check_side(other, "add")?;
        let mut out = self.clone();
        for (alpha, c) in &other.terms {
            out.accumulate(alpha.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SparseSeries) -> Result<SparseSeries> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, lambda: Complex64) -> SparseSeries {
        if lambda == Complex64::new(0.0, 0.0) {
            return SparseSeries::zero(self.side);
        }
        SparseSeries {
            side: self.side,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.clone(), c * lambda))
                .collect(),
        }
    }

    /// Convolution product: coefficient at gamma is sum over alpha+beta=gamma.
    /// On the Dirichlet side this is the divisor convolution of coefficients.
    pub fn multiply(&self, other: &SparseSeries, budget: &Budget) -> Result<SparseSeries> {
        self.check_side(other, "multiply")?;
        let work = self.terms.len() as u128 * other.terms.len() as u128;
        if work > budget.max_terms as u128 {
            return Err(Error::BudgetExceeded {
                needed: work,
                budget: budget.max_terms as u128,
            });
        }
        let mut out = SparseSeries::zero(self.side);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.accumulate(a.combine(b), ca * cb);
            }
        }
        Ok(out)
    }

    /// q-fold product; power(D, 0) is the unit series.
    pub fn power(&self, q: u32, budget: &Budget) -> Result<SparseSeries> {
        let mut acc = SparseSeries::one(self.side);
        for _ in 0..q {
            acc = acc.multiply(self, budget)?;
        }
        Ok(acc)
    }

    /// D_lambda = lambda_1 D + lambda_2 D^2 + ... + lambda_k D^k.
    pub fn combine(&self, lambda: &[Complex64], budget: &Budget) -> Result<SparseSeries> {
        if lambda.is_empty() {
            return Err(Error::InvalidParameter(
                "combine needs at least one coefficient".into(),
            ));
        }
        let mut acc = SparseSeries::zero(self.side);
        let mut pow = SparseSeries::one(self.side);
        for &l in lambda {
            pow = pow.multiply(self, budget)?;
            acc = acc.add(&pow.scale(l))?;
        }
        Ok(acc)
    }

    /// Terms with |alpha| = m exactly.
    pub fn homogeneous_part(&self, m: u32) -> SparseSeries {
        SparseSeries {
            side: self.side,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.degree() == m)
                .map(|(a, c)| (a.clone(), *c))
                .collect(),
        }
    }

    /// The set of homogeneity degrees present.
    pub fn omega_tilde(&self) -> std::collections::BTreeSet<u32> {
        self.terms.keys().map(|a| a.degree()).collect()
    }

    /// True iff every stored alpha has support inside Theta.
    pub fn is_theta_supported(&self, theta: &Theta) -> bool {
        self.terms
            .keys()
            .all(|a| a.support().iter().all(|&p| theta.contains(p)))
    }

    /// Drop terms with |coefficient| below the threshold (0 keeps everything).
    pub fn prune(&self, threshold: f64) -> SparseSeries {
        if threshold <= 0.0 {
            return self.clone();
        }
        SparseSeries {
            side: self.side,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() >= threshold)
                .map(|(a, c)| (a.clone(), *c))
                .collect(),
        }
    }

    /// l1 norm of the coefficients (triangle-inequality sup bound).
    pub fn coeff_abs_sum(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// All positions appearing in any stored multi-index.
    pub fn support_positions(&self) -> std::collections::BTreeSet<u64> {
        let mut out = std::collections::BTreeSet::new();
        for a in self.terms.keys() {
            out.extend(a.support());
        }
        out
    }

    /// Termwise comparison: same support, coefficients within tol (absolute
    /// on each coefficient, scaled by the larger modulus when above 1).
    pub fn approx_eq(&self, other: &SparseSeries, tol: f64) -> bool {
        if self.terms.len() != other.terms.len() {
            return false;
        }
        self.terms.iter().all(|(a, c)| {
            let d = other.coeff(a);
            (c - d).norm() <= tol * c.norm().max(d.norm()).max(1.0)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dirich(pairs: &[(&[(u64, u32)], f64)]) -> SparseSeries {
        SparseSeries::from_terms(
            Side::Dirichlet,
            pairs
                .iter()
                .map(|(ps, v)| (MultiIndex::from_pairs(ps.iter().copied()), c(*v, 0.0))),
        )
    }

    #[test]
    fn add_identity_and_cancellation() {
        let d = dirich(&[(&[(1, 1)], 1.0)]); // 2^{-s}
        let zero = SparseSeries::zero(Side::Dirichlet);
        assert_eq!(d.add(&zero).unwrap(), d);
        let cancelled = d.add(&d.scale(c(-1.0, 0.0))).unwrap();
        assert!(cancelled.is_zero());
    }

    #[test]
    fn side_mismatch_rejected() {
        let d = SparseSeries::one(Side::Dirichlet);
        let p = SparseSeries::one(Side::Power);
        assert!(matches!(d.add(&p), Err(Error::SideMismatch(_))));
        assert!(matches!(
            d.multiply(&p, &Budget::default()),
            Err(Error::SideMismatch(_))
        ));
    }

    #[test]
    fn scale_by_i() {
        let d = dirich(&[(&[], 1.0), (&[(2, 1)], 1.0)]); // 1 + 3^{-s}
        let s = d.scale(c(0.0, 1.0));
        assert_eq!(s.coeff(&MultiIndex::unit()), c(0.0, 1.0));
        assert_eq!(s.coeff(&MultiIndex::var(2)), c(0.0, 1.0));
    }

    #[test]
    fn multiply_is_index_addition() {
        // 2^{-s} * 3^{-s} = 6^{-s}
        let a = dirich(&[(&[(1, 1)], 1.0)]);
        let b = dirich(&[(&[(2, 1)], 1.0)]);
        let ab = a.multiply(&b, &Budget::default()).unwrap();
        assert_eq!(ab.num_terms(), 1);
        assert_eq!(
            ab.coeff(&MultiIndex::from_pairs([(1, 1), (2, 1)])),
            c(1.0, 0.0)
        );
    }

    #[test]
    fn binomial_square() {
        // (1 + 2^{-s})^2 = 1 + 2*2^{-s} + 4^{-s}
        let d = dirich(&[(&[], 1.0), (&[(1, 1)], 1.0)]);
        let sq = d.power(2, &Budget::default()).unwrap();
        assert_eq!(sq.coeff(&MultiIndex::unit()), c(1.0, 0.0));
        assert_eq!(sq.coeff(&MultiIndex::var(1)), c(2.0, 0.0));
        assert_eq!(sq.coeff(&MultiIndex::monomial(1, 2)), c(1.0, 0.0));
        assert_eq!(sq.num_terms(), 3);
    }

    #[test]
    fn power_basics() {
        let d = dirich(&[(&[(1, 1)], 1.0)]);
        assert_eq!(d.power(1, &Budget::default()).unwrap(), d);
        let p5 = d.power(5, &Budget::default()).unwrap();
        assert_eq!(p5.coeff(&MultiIndex::monomial(1, 5)), c(1.0, 0.0)); // 32^{-s}
        let p0 = d.power(0, &Budget::default()).unwrap();
        assert_eq!(p0, SparseSeries::one(Side::Dirichlet));
    }

    #[test]
    fn combine_quadratic() {
        // lambda = (1,1), D = 2^{-s} + 3^{-s}:
        // D + D^2 = 2^{-s} + 3^{-s} + 4^{-s} + 2*6^{-s} + 9^{-s}
        let d = dirich(&[(&[(1, 1)], 1.0), (&[(2, 1)], 1.0)]);
        let dl = d
            .combine(&[c(1.0, 0.0), c(1.0, 0.0)], &Budget::default())
            .unwrap();
        assert_eq!(dl.coeff(&MultiIndex::var(1)), c(1.0, 0.0));
        assert_eq!(dl.coeff(&MultiIndex::var(2)), c(1.0, 0.0));
        assert_eq!(dl.coeff(&MultiIndex::monomial(1, 2)), c(1.0, 0.0));
        assert_eq!(
            dl.coeff(&MultiIndex::from_pairs([(1, 1), (2, 1)])),
            c(2.0, 0.0)
        );
        assert_eq!(dl.coeff(&MultiIndex::monomial(2, 2)), c(1.0, 0.0));
        assert_eq!(dl.num_terms(), 5);
    }

    #[test]
    fn combine_selects_pure_power() {
        // lambda = (0, 1), D = 2^{-s} -> 4^{-s}
        let d = dirich(&[(&[(1, 1)], 1.0)]);
        let dl = d
            .combine(&[c(0.0, 0.0), c(1.0, 0.0)], &Budget::default())
            .unwrap();
        assert_eq!(dl.num_terms(), 1);
        assert_eq!(dl.coeff(&MultiIndex::monomial(1, 2)), c(1.0, 0.0));
    }

    #[test]
    fn homogeneous_part_picks_degree() {
        // 1 + 2^{-s} + 6^{-s}: degree-2 part is 6^{-s}
        let d = dirich(&[(&[], 1.0), (&[(1, 1)], 1.0), (&[(1, 1), (2, 1)], 1.0)]);
        let h2 = d.homogeneous_part(2);
        assert_eq!(h2.num_terms(), 1);
        assert_eq!(
            h2.coeff(&MultiIndex::from_pairs([(1, 1), (2, 1)])),
            c(1.0, 0.0)
        );
        assert!(d.homogeneous_part(5).is_zero());
        // parts sum back to d
        let mut acc = SparseSeries::zero(Side::Dirichlet);
        for m in d.omega_tilde() {
            acc = acc.add(&d.homogeneous_part(m)).unwrap();
        }
        assert_eq!(acc, d);
    }

    #[test]
    fn omega_tilde_of_product_adds_degrees() {
        // 6^{-s} * 10^{-s}: both degree 2, product degree 4
        let a = dirich(&[(&[(1, 1), (2, 1)], 1.0)]);
        let b = dirich(&[(&[(1, 1), (3, 1)], 1.0)]);
        let ab = a.multiply(&b, &Budget::default()).unwrap();
        assert_eq!(ab.omega_tilde().into_iter().collect::<Vec<_>>(), vec![4]);
        assert!(SparseSeries::zero(Side::Dirichlet).omega_tilde().is_empty());
    }

    #[test]
    fn theta_support_check() {
        let theta = Theta::progression(3, 2); // {5, 7, 9, ...}
        assert!(SparseSeries::zero(Side::Dirichlet).is_theta_supported(&theta));
        let d = dirich(&[(&[(5, 1)], 1.0)]); // p_5^{-s}, position 5 in Theta
        assert!(d.is_theta_supported(&theta));
        let e = dirich(&[(&[(4, 1)], 1.0)]);
        assert!(!e.is_theta_supported(&theta));
        // products of supported series stay supported
        let prod = d.multiply(&d, &Budget::default()).unwrap();
        assert!(prod.is_theta_supported(&theta));
    }

    #[test]
    fn budget_guard_trips() {
        let many: Vec<_> = (1..=100u64)
            .map(|i| (MultiIndex::var(i), c(1.0, 0.0)))
            .collect();
        let d = SparseSeries::from_terms(Side::Dirichlet, many);
        let tight = Budget::new(100);
        assert!(matches!(
            d.multiply(&d, &tight),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
