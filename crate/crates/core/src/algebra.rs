//! Free-algebra machinery: evaluating polynomials in generators with
//! pairwise disjoint supports, the leading-index split used to isolate a
//! clean copy of the Theta-supported part, and sampled independence
//! witnesses.

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::analysis;
use crate::certificate::{CertKind, Certificate, Verdict};
use crate::error::{Error, Result};
use crate::io::Polynomial;
use crate::multiindex::MultiIndex;
use crate::primes::PrimeTable;
use crate::series::{Budget, Side, SparseSeries};
use crate::theta::Theta;

/// The split of sum_m lambda_m D_m D^m at the smallest index n0 carried by
/// the leading factor D_N: the combination equals
/// d_tilde + sum_m lambda_m a_{m,n0} n0^{-s} D^m, and no index of d_tilde is
/// n0 times a Theta-smooth integer.
#[derive(Clone, Debug)]
pub struct LeadingIndexSplit {
    pub n0: BigUint,
    pub n0_alpha: MultiIndex,
    pub d_tilde: SparseSeries,
    pub d_hat: SparseSeries,
}

/// Split sum_m lambda_m D_m D^m (m = 0..N in listed order) where every D_m
/// is supported off Theta and D is supported on Theta.
pub fn n0_split(
    table: &PrimeTable,
    combination: &[(Complex64, SparseSeries)],
    d: &SparseSeries,
    theta: &Theta,
    budget: &Budget,
) -> Result<LeadingIndexSplit> {
    let zero = Complex64::new(0.0, 0.0);
    let (lambda_n, d_n) = combination
        .last()
        .ok_or_else(|| Error::InvalidParameter("empty combination".into()))?;
    if *lambda_n == zero || d_n.is_zero() {
        return Err(Error::ZeroLeadingTerm(
            "the last pair lambda_N * D_N must be nonzero".into(),
        ));
    }
    if !d.is_theta_supported(theta) {
        return Err(Error::SupportViolation("D must be Theta-supported".into()));
    }
    for (i, (_, d_m)) in combination.iter().enumerate() {
        if d_m.support_positions().iter().any(|p| theta.contains(*p)) {
            return Err(Error::SupportViolation(format!(
                "factor {i} touches Theta positions"
            )));
        }
    }

    let sorted = analysis::terms_by_index(table, d_n)?;
    let (n0, n0_alpha, _) = sorted.first().expect("nonzero series").clone();

    let mut total = SparseSeries::zero(d.side());
    let mut d_hat = SparseSeries::zero(d.side());
    let n0_monomial = SparseSeries::monomial(d.side(), n0_alpha.clone(), Complex64::new(1.0, 0.0));
    for (m, (lambda_m, d_m)) in combination.iter().enumerate() {
        let d_pow = d.power(m as u32, budget)?;
        total = total.add(&d_m.multiply(&d_pow, budget)?.scale(*lambda_m))?;
        let a_mn0 = d_m.coeff(&n0_alpha);
        if a_mn0 != zero {
            d_hat = d_hat.add(&n0_monomial.multiply(&d_pow, budget)?.scale(*lambda_m * a_mn0))?;
        }
    }
    let d_tilde = total.sub(&d_hat)?;
    Ok(LeadingIndexSplit {
        n0,
        n0_alpha,
        d_tilde,
        d_hat,
    })
}

/// Indices of d_tilde violating the disjointness: those of the form
/// n0 * (Theta-smooth integer), checked exactly on multi-indices.
pub fn smooth_multiple_violations(
    split: &LeadingIndexSplit,
    theta: &Theta,
) -> Vec<MultiIndex> {
    split
        .d_tilde
        .terms()
        .filter_map(|(gamma, _)| {
            gamma.checked_sub(&split.n0_alpha).and_then(|rest| {
                if rest.support().iter().all(|p| theta.contains(*p)) {
                    Some(gamma.clone())
                } else {
                    None
                }
            })
        })
        .collect()
}

/// Certificate wrapper around the exact disjointness check.
pub fn disjointness_certificate(
    table: &PrimeTable,
    split: &LeadingIndexSplit,
    theta: &Theta,
    inputs_digest: String,
) -> Result<Certificate> {
    let violations = smooth_multiple_violations(split, theta);
    let columns: Vec<String> = ["violation_idx", "log10_n"].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for (i, gamma) in violations.iter().enumerate() {
        let log10_n =
            analysis::ln_index(table, gamma)?.to_f64() / std::f64::consts::LN_10;
        rows.push(vec![i as f64, log10_n]);
    }
    let verdict = if rows.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let params = json!({
        "n0_alpha": split.n0_alpha.entries(),
        "tilde_terms": split.d_tilde.num_terms(),
        "theta": theta,
    });
    Ok(Certificate::new(
        CertKind::Disjointness,
        inputs_digest,
        0.0,
        params,
        columns,
        rows,
        verdict,
    ))
}

/// Evaluation of a polynomial without constant term in generators on
/// pairwise disjoint position sets, regrouped by powers of the last
/// generator: Q(D_1..D_N) = sum_m L_m(D_1..D_{N-1}) D_N^m.
pub struct FreeAlgebraEval {
    pub value: SparseSeries,
    /// (m, L_m evaluated) for every power of the last generator present
    pub regrouped: Vec<(u32, SparseSeries)>,
}

pub fn free_algebra_eval(
    generators: &[SparseSeries],
    q: &Polynomial,
    budget: &Budget,
) -> Result<FreeAlgebraEval> {
    if generators.is_empty() {
        return Err(Error::InvalidParameter("no generators".into()));
    }
    if q.has_constant_term() {
        return Err(Error::ConstantTerm);
    }
    let n = generators.len();
    if q.num_variables() > n {
        return Err(Error::InvalidParameter(format!(
            "polynomial uses {} variables, only {n} generators given",
            q.num_variables()
        )));
    }
    // pairwise disjoint supports keep the free-algebra structure honest
    let supports: Vec<std::collections::BTreeSet<u64>> = generators
        .iter()
        .map(|g| g.support_positions())
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            if !supports[i].is_disjoint(&supports[j]) {
                return Err(Error::SupportViolation(format!(
                    "generators {i} and {j} share positions"
                )));
            }
        }
    }
    let side = generators[0].side();

    // group terms by the exponent of the last variable
    let mut by_last: std::collections::BTreeMap<u32, Vec<(Vec<u32>, Complex64)>> =
        std::collections::BTreeMap::new();
    for (exps, c) in &q.terms {
        if *c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let last = exps.get(n - 1).copied().unwrap_or(0);
        let mut head = exps.clone();
        head.resize(n, 0);
        head[n - 1] = 0;
        by_last.entry(last).or_default().push((head, *c));
    }

    let mut value = SparseSeries::zero(side);
    let mut regrouped = Vec::new();
    for (m, terms) in &by_last {
        let mut l_m = SparseSeries::zero(side);
        for (head, c) in terms {
            let mut prod = SparseSeries::one(side);
            for (i, &e) in head.iter().enumerate() {
                if e > 0 {
                    prod = prod.multiply(&generators[i].power(e, budget)?, budget)?;
                }
            }
            l_m = l_m.add(&prod.scale(*c))?;
        }
        let dn_pow = generators[n - 1].power(*m, budget)?;
        value = value.add(&l_m.multiply(&dn_pow, budget)?)?;
        regrouped.push((*m, l_m));
    }
    Ok(FreeAlgebraEval { value, regrouped })
}

#[derive(Clone, Debug)]
pub struct WitnessConfig {
    pub threshold: f64,
    pub radius: f64,
    pub attempts: usize,
    pub seed: u64,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig {
            threshold: 1e-8,
            radius: 0.9,
            attempts: 64,
            seed: 0,
        }
    }
}

/// Sampled witness that Q(f_1, ..., f_N) is not identically zero: points are
/// assembled per generator on its own support positions (valid because the
/// supports are disjoint) and summed. Returns the point and the attained
/// value, or None — which disproves nothing.
pub fn independence_witness(
    generators: &[SparseSeries],
    q: &Polynomial,
    config: &WitnessConfig,
) -> Result<Option<(std::collections::BTreeMap<u64, Complex64>, Complex64)>> {
    if q.is_zero() {
        return Ok(None);
    }
    let n = generators.len();
    let supports: Vec<Vec<u64>> = generators
        .iter()
        .map(|g| g.support_positions().into_iter().collect())
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            if supports[i].iter().any(|p| supports[j].contains(p)) {
                return Err(Error::SupportViolation(format!(
                    "generators {i} and {j} share positions"
                )));
            }
        }
    }
    let power_views: Vec<SparseSeries> = generators
        .iter()
        .map(|g| match g.side() {
            Side::Power => g.clone(),
            Side::Dirichlet => g.with_side(Side::Power),
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.attempts {
        let mut point = std::collections::BTreeMap::new();
        for positions in &supports {
            for &pos in positions {
                let r = config.radius * rng.gen::<f64>().sqrt();
                let t = rng.gen::<f64>() * std::f64::consts::TAU;
                point.insert(pos, Complex64::from_polar(r, t));
            }
        }
        let values: Vec<Complex64> = power_views
            .iter()
            .map(|g| analysis::evaluate_power(g, &point))
            .collect::<Result<_>>()?;
        let mut padded = values.clone();
        padded.resize(q.num_variables().max(n), Complex64::new(0.0, 0.0));
        let qv = q.eval_complex(&padded);
        if qv.norm() > config.threshold {
            return Ok(Some((point, qv)));
        }
    }
    Ok(None)
}
