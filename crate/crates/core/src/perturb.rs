//! Density perturbation of Dirichlet polynomials and membership witnesses.
//!
//! Given a base polynomial D1 supported on a progression Theta (positions
//! >= 2, so index doublings stay off the Theta-smooth lattice), the
//! perturbation D = D1 + (2^w)^{-s} D4 with D4 = (eps/2)(1 + D2/k) moves
//! less than eps in the sup norm while forcing every combination
//! D_lambda = lambda_1 D + ... + lambda_k D^k (with |lambda_k| >= 1/j) to
//! carry an isolated homogeneous copy of D2 at degree wk + deg(D2). That
//! slot yields the growth inequality
//!   A_N(D_lambda, delta_m) >= (eps/2)^k 2^{-wk delta_m} |lambda_k| A_N(D2, delta_m).

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::analysis;
use crate::certificate::{CertKind, Certificate, Verdict};
use crate::construct::{make_dkm, GeneratorOptions, NormKind};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::primes::PrimeTable;
use crate::series::{Budget, Side, SparseSeries};
use crate::theta::Theta;

/// Region query: all lambda in C^k with ||lambda||_inf <= j and
/// |lambda_k| >= 1/j must produce a partial sum above ell at sigma = delta_m.
#[derive(Clone, Copy, Debug)]
pub struct MembershipQuery {
    pub j: u32,
    pub k: u32,
    pub ell: f64,
    pub m: u32,
}

impl MembershipQuery {
    pub fn new(j: u32, k: u32, ell: f64, m: u32) -> Result<MembershipQuery> {
        if j < 1 || k < 1 {
            return Err(Error::InvalidParameter("need j, k >= 1".into()));
        }
        if m < 2 {
            return Err(Error::InvalidParameter("need m >= 2".into()));
        }
        Ok(MembershipQuery { j, k, ell, m })
    }

    pub fn delta_m(&self) -> f64 {
        (self.m as f64 - 1.0) / (2.0 * self.m as f64)
    }
}

/// w = max_{0 <= i <= k-1} {(k-2)(m+r), rk + mi} + 1.
pub fn w_exponent(k: u32, m: u32, r: u32) -> u32 {
    let (k, m, r) = (k as i64, m as i64, r as i64);
    let mut best = (k - 2) * (m + r);
    for i in 0..k {
        best = best.max(r * k + m * i);
    }
    (best + 1).max(1) as u32
}

/// Exact homogeneity facts for the split of D^k.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SplitLedger {
    pub w: u32,
    pub slot_degree: u32,
    /// max degree among the i < k binomial terms (None if that part is 0)
    pub comp1_max: Option<u32>,
    /// strict annotation max(comp1) < wk (exact when deg(D2) = m+r)
    pub comp1_below_wk: bool,
    /// what the growth inequality needs: comp1 stays below the D2 slot
    pub comp1_below_slot: bool,
    /// homogeneous part of D^k at wk is exactly the (eps/2)^k 2^{-wks} term
    pub const_slot_exact: bool,
    /// homogeneous part of D^k at the slot is exactly (eps/2)^k (2^{wk})^{-s} D2
    pub d2_slot_exact: bool,
    pub d3_min: Option<u32>,
    /// min(D3 degrees) > m + r
    pub d3_min_above: bool,
    /// max over q < k of deg(D^q) (None when k = 1)
    pub low_powers_max: Option<u32>,
    /// < wk + m + r, so lower powers never touch the slot
    pub low_powers_below: bool,
    /// the four-way split reassembles D^k termwise
    pub four_way_identity: bool,
}

impl SplitLedger {
    pub fn all_hold(&self) -> bool {
        self.comp1_below_slot
            && self.const_slot_exact
            && self.d2_slot_exact
            && self.d3_min_above
            && self.low_powers_below
            && self.four_way_identity
    }
}

#[derive(Clone, Debug)]
pub struct PerturbationResult {
    pub d: SparseSeries,
    pub d1: SparseSeries,
    pub d2: SparseSeries,
    pub d3: SparseSeries,
    pub d4: SparseSeries,
    pub query: MembershipQuery,
    pub theta: Theta,
    pub w: u32,
    pub epsilon: f64,
    /// max homogeneity degree of D1
    pub r: u32,
    pub d2_degree: u32,
    /// scheme of the D2 generator, for schedule recomputation
    pub d2_scheme: (u64, u64, u64, usize),
    /// coefficient-sum bound on ||D - D1||
    pub coeff_sum_bound: f64,
    /// rigorous sup bound (eps/2)(1 + 1/(2k)) < eps
    pub sup_bound: f64,
    pub d2_growth: Certificate,
    pub ledger: SplitLedger,
}

fn shift_by_two_power(series: &SparseSeries, w: u32) -> SparseSeries {
    if w == 0 {
        return series.clone();
    }
    let shift = MultiIndex::monomial(1, w);
    SparseSeries::from_terms(
        Side::Dirichlet,
        series.terms().map(|(a, c)| (a.combine(&shift), *c)),
    )
}

/// Newton split: (1 + D2/k)^k = 1 + D2 + D3 with
/// D3 = sum_{l=2}^{k} C(k,l) k^{-l} D2^l.
fn newton_tail(d2: &SparseSeries, k: u32, budget: &Budget) -> Result<SparseSeries> {
    let mut d3 = SparseSeries::zero(Side::Dirichlet);
    let mut power = d2.multiply(d2, budget)?; // D2^2
    for l in 2..=k {
        let binom = binomial(k, l) as f64;
        let coeff = binom / (k as f64).powi(l as i32);
        d3 = d3.add(&power.scale(Complex64::new(coeff, 0.0)))?;
        if l < k {
            power = power.multiply(d2, budget)?;
        }
    }
    Ok(d3)
}

fn binomial(n: u32, k: u32) -> u64 {
    let k = k.min(n - k);
    let mut num = 1u64;
    for i in 0..k {
        num = num * (n - i) as u64 / (i + 1) as u64;
    }
    num
}

/// Build the perturbation D = D1 + (2^w)^{-s} (eps/2)(1 + D2/k) and verify
/// the exact homogeneity ledger of its k-th power.
pub fn density_perturbation(
    table: &PrimeTable,
    d1: &SparseSeries,
    epsilon: f64,
    query: &MembershipQuery,
    theta: &Theta,
    opts: &GeneratorOptions,
    budget: &Budget,
    inputs_digest: String,
) -> Result<PerturbationResult> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    if d1.side() != Side::Dirichlet {
        return Err(Error::SideMismatch("D1 must be dirichlet-side".into()));
    }
    if theta.contains(1) {
        return Err(Error::InvalidParameter(
            "Theta must avoid position 1: the perturbation multiplies indices by 2^w".into(),
        ));
    }
    if !d1.is_theta_supported(theta) {
        return Err(Error::SupportViolation(
            "D1 is not supported on Theta".into(),
        ));
    }
    let (u, v) = match theta {
        Theta::Progression { u, v } => (*u, *v),
        Theta::Explicit { .. } => {
            return Err(Error::InvalidParameter(
                "perturbation needs a progression Theta".into(),
            ))
        }
    };
    let m = query.m;
    let k = query.k;
    let r = d1.omega_tilde().into_iter().max().unwrap_or(0);
    // deg(D2) = m + r keeps every homogeneity annotation exact; r = 0 needs
    // a degree bump (the generator requires degree > m) and small k
    let d2_degree = m + r.max(1);
    if r == 0 && k > m + 1 {
        return Err(Error::InvalidParameter(format!(
            "constant D1 supports only k <= m + 1 (got k = {k}, m = {m})"
        )));
    }
    let w = w_exponent(k, m, r);

    let generated = make_dkm(
        table,
        u,
        v,
        m,
        d2_degree,
        NormKind::SupBound,
        opts,
        inputs_digest.clone(),
    )?;
    // halve so the trusted sup bound becomes 1/2, and recertify at the
    // final scaling so the certificate matches the stored series
    let d2 = generated.series.scale(Complex64::new(0.5, 0.0));
    let d2_growth = crate::construct::certify_growth(
        table,
        &d2,
        &generated.scheme,
        &generated.params,
        0.5 / generated.norm_divisor,
        Some(query.delta_m()),
        inputs_digest.clone(),
    )?;

    let one = SparseSeries::one(Side::Dirichlet);
    let d4 = one
        .add(&d2.scale(Complex64::new(1.0 / k as f64, 0.0)))?
        .scale(Complex64::new(epsilon / 2.0, 0.0));
    let d = d1.add(&shift_by_two_power(&d4, w))?;
    let d3 = newton_tail(&d2, k, budget)?;

    let coeff_sum_bound = epsilon / 2.0 * (1.0 + d2.coeff_abs_sum() / k as f64);
    let sup_bound = epsilon / 2.0 * (1.0 + 0.5 / k as f64);
    debug_assert!(sup_bound < epsilon);

    let ledger = split_ledger(d1, &d2, &d3, &d, w, k, m, r, d2_degree, epsilon, budget)?;
    if !ledger.all_hold() {
        return Err(Error::CertificateMismatch(format!(
            "homogeneity ledger violated: {ledger:?}"
        )));
    }

    Ok(PerturbationResult {
        d,
        d1: d1.clone(),
        d2,
        d3,
        d4,
        query: *query,
        theta: theta.clone(),
        w,
        epsilon,
        r,
        d2_degree,
        d2_scheme: (u, v, generated.params.p, generated.params.blocks),
        coeff_sum_bound,
        sup_bound,
        d2_growth,
        ledger,
    })
}

#[allow(clippy::too_many_arguments)]
fn split_ledger(
    d1: &SparseSeries,
    d2: &SparseSeries,
    d3: &SparseSeries,
    d: &SparseSeries,
    w: u32,
    k: u32,
    m: u32,
    r: u32,
    d2_degree: u32,
    epsilon: f64,
    budget: &Budget,
) -> Result<SplitLedger> {
    let wk = w * k;
    let slot_degree = wk + d2_degree;
    let half_eps_k = (epsilon / 2.0).powi(k as i32);

    // comp1 = sum_{i=0}^{k-1} C(k,i) D1^{k-i} (2^{-ws} D4)^i
    let d4_shift = shift_by_two_power(
        &SparseSeries::one(Side::Dirichlet)
            .add(&d2.scale(Complex64::new(1.0 / k as f64, 0.0)))?
            .scale(Complex64::new(epsilon / 2.0, 0.0)),
        w,
    );
    let mut comp1 = SparseSeries::zero(Side::Dirichlet);
    for i in 0..k {
        let term = d1
            .power(k - i, budget)?
            .multiply(&d4_shift.power(i, budget)?, budget)?
            .scale(Complex64::new(binomial(k, i) as f64, 0.0));
        comp1 = comp1.add(&term)?;
    }
    let comp2 = SparseSeries::monomial(
        Side::Dirichlet,
        MultiIndex::monomial(1, wk),
        Complex64::new(half_eps_k, 0.0),
    );
    let comp3 = shift_by_two_power(&d2, wk).scale(Complex64::new(half_eps_k, 0.0));
    let comp4 = shift_by_two_power(d3, wk).scale(Complex64::new(half_eps_k, 0.0));

    let dk = d.power(k, budget)?;
    let reassembled = comp1.add(&comp2)?.add(&comp3)?.add(&comp4)?;
    let four_way_identity = dk.approx_eq(&reassembled, 1e-12);

    let comp1_max = comp1.omega_tilde().into_iter().max();
    let comp1_below_wk = comp1_max.map_or(true, |d| d < wk);
    let comp1_below_slot = comp1_max.map_or(true, |d| d < slot_degree);

    let const_slot = dk.homogeneous_part(wk);
    let const_slot_exact = const_slot.approx_eq(&comp2, 1e-12)
        || (comp1_max == Some(wk) && {
            // when comp1 touches degree wk the constant slot check folds
            // comp1's wk-part in (only possible for r = 0)
            let expect = comp1.homogeneous_part(wk).add(&comp2).unwrap();
            const_slot.approx_eq(&expect, 1e-12)
        });

    let d2_slot = dk.homogeneous_part(slot_degree);
    let d2_slot_exact = d2_slot.approx_eq(&comp3, 1e-12);

    let d3_min = d3.omega_tilde().into_iter().min();
    let d3_min_above = d3_min.map_or(true, |d| d > m + r);

    // max over q < k of deg(D^q)
    let mut low_powers_max: Option<u32> = None;
    for q in 1..k {
        let deg = d.power(q, budget)?.omega_tilde().into_iter().max();
        low_powers_max = low_powers_max.max(deg);
    }
    let low_powers_below = low_powers_max.map_or(true, |d| d < wk + m + r);

    Ok(SplitLedger {
        w,
        slot_degree,
        comp1_max,
        comp1_below_wk,
        comp1_below_slot,
        const_slot_exact,
        d2_slot_exact,
        d3_min,
        d3_min_above,
        low_powers_max,
        low_powers_below,
        four_way_identity,
    })
}

/// Deterministic-plus-seeded samples from the query region, always including
/// the extreme points |lambda_k| = 1/j and ||lambda||_inf = j.
pub fn sample_lambda_region(query: &MembershipQuery, samples: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let j = query.j as f64;
    let k = query.k as usize;
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(samples);
    let zero = Complex64::new(0.0, 0.0);

    // extreme corners of the region
    let mut corner = vec![zero; k];
    corner[k - 1] = Complex64::new(1.0 / j, 0.0);
    out.push(corner);
    out.push(vec![Complex64::new(j, 0.0); k]);
    if k > 1 {
        let mut alt = vec![Complex64::new(-j, 0.0); k];
        alt[k - 1] = Complex64::new(j, 0.0);
        out.push(alt);
        let mut small_last = vec![Complex64::new(0.0, j); k];
        small_last[k - 1] = Complex64::new(1.0 / j, 0.0);
        out.push(small_last);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < samples {
        let mut lam = Vec::with_capacity(k);
        for i in 0..k {
            let modulus = if i + 1 == k {
                1.0 / j + (j - 1.0 / j) * rng.gen::<f64>()
            } else {
                j * rng.gen::<f64>()
            };
            let phase = rng.gen::<f64>() * std::f64::consts::TAU;
            lam.push(Complex64::from_polar(modulus, phase));
        }
        out.push(lam);
    }
    out.truncate(samples);
    out
}

/// For each sampled lambda, the smallest scheduled N with
/// A_N(D_lambda, delta_m) > ell, or "not found" (inconclusive).
pub fn membership_witness(
    table: &PrimeTable,
    d: &SparseSeries,
    query: &MembershipQuery,
    lambdas: &[Vec<Complex64>],
    budget: &Budget,
    inputs_digest: String,
) -> Result<Certificate> {
    let delta_m = query.delta_m();
    let columns: Vec<String> = ["sample", "found", "schedule_idx", "log10_n", "a_value"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::with_capacity(lambdas.len());
    let mut all_found = true;
    for (si, lam) in lambdas.iter().enumerate() {
        let d_lambda = d.combine(lam, budget)?;
        let sorted = analysis::terms_by_index(table, &d_lambda)?;
        let mut running = 0.0f64;
        let mut hit: Option<(usize, f64, f64)> = None;
        for (idx, (_, alpha, c)) in sorted.iter().enumerate() {
            running += c.norm() * analysis::index_pow_neg(table, alpha, delta_m)?;
            if running > query.ell {
                let log10_n = analysis::ln_index(table, alpha)?.to_f64() / std::f64::consts::LN_10;
                hit = Some((idx, log10_n, running));
                break;
            }
        }
        match hit {
            Some((idx, log10_n, a)) => {
                rows.push(vec![si as f64, 1.0, idx as f64, log10_n, a]);
            }
            None => {
                // inconclusive: record the full truncated sum, -1 markers
                all_found = false;
                rows.push(vec![si as f64, 0.0, -1.0, -1.0, running]);
            }
        }
    }
    let verdict = if all_found {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    let params = json!({
        "j": query.j,
        "k": query.k,
        "ell": query.ell,
        "m": query.m,
        "delta_m": delta_m,
        "lambdas": lambdas
            .iter()
            .map(|lam| lam.iter().map(|l| vec![l.re, l.im]).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    });
    Ok(Certificate::new(
        CertKind::Membership,
        inputs_digest,
        1e-9,
        params,
        columns,
        rows,
        verdict,
    ))
}

/// Scheduled check of A_N(D_lambda, delta_m) >= (eps/2)^k 2^{-wk delta_m}
/// |lambda_k| A_N(D2, delta_m). The schedule runs over the D2 block
/// boundaries shifted by 2^{wk}, plus the full supports of both sides.
pub fn growth_inequality_certificate(
    table: &PrimeTable,
    result: &PerturbationResult,
    lambdas: &[Vec<Complex64>],
    budget: &Budget,
    inputs_digest: String,
) -> Result<Certificate> {
    let query = &result.query;
    let delta_m = query.delta_m();
    let wk = result.w * query.k;
    let prefactor =
        (result.epsilon / 2.0).powi(query.k as i32) * 2f64.powf(-(wk as f64) * delta_m);
    let schedule = inequality_schedule(table, &result.d2, result.d2_scheme.3, wk)?;

    let columns: Vec<String> = ["lambda_idx", "n_idx", "log10_n", "lhs", "rhs"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let tol = 1e-9;
    let mut rows = Vec::new();
    let mut ok = true;
    for (li, lam) in lambdas.iter().enumerate() {
        let d_lambda = result.d.combine(lam, budget)?;
        let lam_k = lam.last().map(|l| l.norm()).unwrap_or(0.0);
        let mut caps = schedule.clone();
        if let Some(max_idx) = analysis::terms_by_index(table, &d_lambda)?.last() {
            caps.push(max_idx.0.clone());
        }
        caps.sort();
        caps.dedup();
        for (ni, n_cap) in caps.iter().enumerate() {
            let lhs = analysis::partial_abs_sum(table, &d_lambda, delta_m, n_cap)?;
            let rhs =
                prefactor * lam_k * analysis::partial_abs_sum(table, &result.d2, delta_m, n_cap)?;
            ok &= lhs >= rhs * (1.0 - tol);
            let log10_n = big_log10(n_cap);
            rows.push(vec![li as f64, ni as f64, log10_n, lhs, rhs]);
        }
    }

    let params = json!({
        "j": query.j,
        "k": query.k,
        "ell": query.ell,
        "m": query.m,
        "delta_m": delta_m,
        "epsilon": result.epsilon,
        "w": result.w,
        "prefactor": prefactor,
        "d2_scheme": {
            "u": result.d2_scheme.0,
            "v": result.d2_scheme.1,
            "p": result.d2_scheme.2,
            "blocks": result.d2_scheme.3,
        },
        "lambdas": lambdas
            .iter()
            .map(|lam| lam.iter().map(|l| vec![l.re, l.im]).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    });
    Ok(Certificate::new(
        CertKind::GrowthInequality,
        inputs_digest,
        tol,
        params,
        columns,
        rows,
        if ok { Verdict::Pass } else { Verdict::Fail },
    ))
}

/// D2 block-boundary indices shifted by 2^{wk}, plus D2's full support cap.
pub fn inequality_schedule(
    table: &PrimeTable,
    d2: &SparseSeries,
    d2_blocks: usize,
    wk: u32,
) -> Result<Vec<BigUint>> {
    let sorted = analysis::terms_by_index(table, d2)?;
    if sorted.is_empty() {
        return Ok(Vec::new());
    }
    let shift = BigUint::from(2u32).pow(wk);
    let mut out = Vec::new();
    // quantile boundaries stand in for block boundaries: the sorted support
    // splits into d2_blocks runs by construction order
    let n = sorted.len();
    for b in 1..=d2_blocks.max(1) {
        let idx = (n * b) / d2_blocks.max(1);
        let idx = idx.clamp(1, n) - 1;
        out.push(&sorted[idx].0 * &shift);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// log10 of a big integer, accurate enough for reporting columns.
pub fn big_log10(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 52 {
        (n.to_u64_digits().first().copied().unwrap_or(0) as f64).log10()
    } else {
        let top = n >> (bits - 52);
        let top_f = top.to_u64_digits().first().copied().unwrap_or(1) as f64;
        top_f.log10() + (bits - 52) as f64 * 2f64.log10()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> &'static PrimeTable {
        PrimeTable::shared()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn default_d1() -> SparseSeries {
        // 1 + 2*3^{-s} + 2*5^{-s} on Theta = {1 + k} (positions >= 2)
        SparseSeries::from_terms(
            Side::Dirichlet,
            [
                (MultiIndex::unit(), c(1.0, 0.0)),
                (MultiIndex::var(2), c(2.0, 0.0)),
                (MultiIndex::var(3), c(2.0, 0.0)),
            ],
        )
    }

    #[test]
    fn w_exponent_reference_values() {
        assert_eq!(w_exponent(2, 2, 1), 5);
        assert_eq!(w_exponent(1, 2, 0), 1);
        // monotone in each argument on a small grid
        for k in 1..5u32 {
            for m in 2..5u32 {
                for r in 0..4u32 {
                    let w = w_exponent(k, m, r);
                    assert!(w_exponent(k + 1, m, r) >= w);
                    assert!(w_exponent(k, m + 1, r) >= w);
                    assert!(w_exponent(k, m, r + 1) >= w);
                }
            }
        }
    }

    #[test]
    fn perturbation_default_ledger_holds() {
        let query = MembershipQuery::new(1, 2, 10.0, 2).unwrap();
        let theta = Theta::progression(1, 1);
        let result = density_perturbation(
            table(),
            &default_d1(),
            0.5,
            &query,
            &theta,
            &GeneratorOptions {
                blocks: 1,
                ..Default::default()
            },
            &Budget::default(),
            "t".into(),
        )
        .unwrap();
        assert_eq!(result.r, 1);
        assert_eq!(result.w, 5);
        assert_eq!(result.d2_degree, 3);
        assert_eq!(result.ledger.slot_degree, 13);
        assert!(result.ledger.comp1_below_wk);
        assert!(result.ledger.all_hold());
        assert!(result.sup_bound < 0.5);
        // D = D1 + shifted D4 termwise
        let reass = result
            .d1
            .add(&shift_by_two_power(&result.d4, result.w))
            .unwrap();
        assert!(reass.approx_eq(&result.d, 1e-15));
        // Newton identity (1 + D2/k)^k = 1 + D2 + D3
        let one = SparseSeries::one(Side::Dirichlet);
        let lhs = one
            .add(&result.d2.scale(c(0.5, 0.0)))
            .unwrap()
            .power(2, &Budget::default())
            .unwrap();
        let rhs = one
            .add(&result.d2)
            .unwrap()
            .add(&result.d3)
            .unwrap();
        assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    #[test]
    fn perturbation_zero_base() {
        let query = MembershipQuery::new(1, 2, 10.0, 2).unwrap();
        let theta = Theta::progression(1, 1);
        let result = density_perturbation(
            table(),
            &SparseSeries::zero(Side::Dirichlet),
            0.25,
            &query,
            &theta,
            &GeneratorOptions {
                blocks: 1,
                ..Default::default()
            },
            &Budget::default(),
            "t".into(),
        )
        .unwrap();
        // the rigorous sup bound stays below eps; the cruder coefficient-sum
        // bound is recorded but can exceed it
        assert!(result.sup_bound < 0.25);
        assert!(result.coeff_sum_bound >= result.sup_bound - 1e-12);
        assert!(result.ledger.all_hold());
    }

    #[test]
    fn perturbation_rejects_bad_inputs() {
        let query = MembershipQuery::new(1, 2, 10.0, 2).unwrap();
        let theta = Theta::progression(1, 1);
        let opts = GeneratorOptions {
            blocks: 1,
            ..Default::default()
        };
        // eps <= 0
        assert!(density_perturbation(
            table(),
            &default_d1(),
            0.0,
            &query,
            &theta,
            &opts,
            &Budget::default(),
            "t".into()
        )
        .is_err());
        // D1 off Theta
        let off = SparseSeries::monomial(Side::Dirichlet, MultiIndex::var(1), c(1.0, 0.0));
        assert!(matches!(
            density_perturbation(
                table(),
                &off,
                0.5,
                &query,
                &theta,
                &opts,
                &Budget::default(),
                "t".into()
            ),
            Err(Error::SupportViolation(_))
        ));
        // Theta containing position 1
        let theta_bad = Theta::progression(0, 1);
        assert!(density_perturbation(
            table(),
            &SparseSeries::zero(Side::Dirichlet),
            0.5,
            &query,
            &theta_bad,
            &opts,
            &Budget::default(),
            "t".into()
        )
        .is_err());
    }

    #[test]
    fn k1_split_degenerates() {
        // k = 1: D3 = 0 and the ledger still holds
        let query = MembershipQuery::new(1, 1, 5.0, 2).unwrap();
        let theta = Theta::progression(1, 1);
        let result = density_perturbation(
            table(),
            &default_d1(),
            0.5,
            &query,
            &theta,
            &GeneratorOptions {
                blocks: 1,
                ..Default::default()
            },
            &Budget::default(),
            "t".into(),
        )
        .unwrap();
        assert!(result.d3.is_zero());
        assert!(result.ledger.all_hold());
    }

    #[test]
    fn lambda_samples_cover_region_extremes() {
        let query = MembershipQuery::new(1, 2, 10.0, 2).unwrap();
        let lams = sample_lambda_region(&query, 32, 9);
        assert_eq!(lams.len(), 32);
        for lam in &lams {
            assert_eq!(lam.len(), 2);
            assert!(lam.iter().all(|l| l.norm() <= 1.0 + 1e-12));
            assert!(lam[1].norm() >= 1.0 - 1e-12);
        }
        // extremes present
        assert!(lams.iter().any(|l| l[0].norm() == 0.0));
        assert!(lams
            .iter()
            .any(|l| (l[0].norm() - 1.0).abs() < 1e-12 && (l[1].norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn membership_and_inequality_pass_at_defaults() {
        let query = MembershipQuery::new(1, 2, 10.0, 2).unwrap();
        let theta = Theta::progression(1, 1);
        let result = density_perturbation(
            table(),
            &default_d1(),
            0.5,
            &query,
            &theta,
            &GeneratorOptions {
                blocks: 1,
                ..Default::default()
            },
            &Budget::default(),
            "t".into(),
        )
        .unwrap();
        let lams = sample_lambda_region(&query, 32, 2024);
        let wit = membership_witness(
            table(),
            &result.d,
            &query,
            &lams,
            &Budget::default(),
            "t".into(),
        )
        .unwrap();
        assert_eq!(wit.verdict, Verdict::Pass, "all samples must find a witness");
        let ineq = growth_inequality_certificate(
            table(),
            &result,
            &lams,
            &Budget::default(),
            "t".into(),
        )
        .unwrap();
        assert_eq!(ineq.verdict, Verdict::Pass);
    }

    #[test]
    fn membership_huge_ell_is_inconclusive() {
        let query = MembershipQuery::new(1, 1, 1e9, 2).unwrap();
        let tiny = SparseSeries::monomial(Side::Dirichlet, MultiIndex::var(2), c(1e-6, 0.0));
        let lams = sample_lambda_region(&query, 4, 0);
        let cert = membership_witness(
            table(),
            &tiny,
            &query,
            &lams,
            &Budget::default(),
            "t".into(),
        )
        .unwrap();
        assert_eq!(cert.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn membership_ell_zero_hits_first_support_point() {
        let query = MembershipQuery::new(1, 1, 0.0, 2).unwrap();
        let d = SparseSeries::monomial(Side::Dirichlet, MultiIndex::var(2), c(1.0, 0.0));
        let lams = vec![vec![c(1.0, 0.0)]];
        let cert = membership_witness(
            table(),
            &d,
            &query,
            &lams,
            &Budget::default(),
            "t".into(),
        )
        .unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        assert_eq!(cert.rows[0][2], 0.0, "first schedule point qualifies");
    }
}
