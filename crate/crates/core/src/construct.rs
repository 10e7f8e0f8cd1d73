//! Block-scheme constructions: scaled unimodular components per block, their
//! disjoint union over a progression, weight sequences, and the growth
//! certificate that witnesses divergence of the weighted coefficient sums.

use num_complex::Complex64;
use serde_json::json;

use crate::analysis::{self, TorusPoint};
use crate::certificate::{CertKind, Certificate, Verdict};
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::multiindex::MultiIndex;
use crate::primes::PrimeTable;
use crate::series::{Side, SparseSeries};
use crate::theta::{make_blocks, BlockScheme};
use crate::unimodular::{eta_floor, make_unimodular_poly, quadratic_witness, witness_point};

/// Parameters driving a block construction at degree m.
///
/// delta solves 2m/(m-1) + eps = (2m/(m-1)) / (1 - delta); b is the midpoint
/// of the feasible interval (p^{-delta/(1-delta)}, 1), so p^delta b^{1-delta}
/// exceeds 1 by construction. eta is the enumerated coefficient floor.
#[derive(Clone, Debug)]
pub struct ConstructionParams {
    pub m: u32,
    pub p: u64,
    pub blocks: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub b: f64,
    pub eta: f64,
    pub u: u64,
    pub v: u64,
}

impl ConstructionParams {
    pub fn derive(m: u32, p: u64, blocks: usize, epsilon: f64, u: u64, v: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter("degree m must be >= 2".into()));
        }
        if epsilon <= 0.0 {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        if p <= m as u64 {
            return Err(Error::InvalidParameter(format!(
                "need p > m (got p = {p}, m = {m})"
            )));
        }
        let tau0 = 2.0 * m as f64 / (m as f64 - 1.0);
        let delta = epsilon / (tau0 + epsilon);
        let b_low = (p as f64).powf(-delta / (1.0 - delta));
        let b = (b_low + 1.0) / 2.0;
        let params = ConstructionParams {
            m,
            p,
            blocks,
            epsilon,
            delta,
            b,
            eta: eta_floor(p, m),
            u,
            v,
        };
        debug_assert!(params.geometric_base() > 1.0);
        Ok(params)
    }

    /// tau = 2m/(m-1) + eps
    pub fn tau(&self) -> f64 {
        2.0 * self.m as f64 / (self.m as f64 - 1.0) + self.epsilon
    }

    /// r = 1 / (tau (1 + eps)), the exponent of the certified divergent sum.
    pub fn critical_exponent(&self) -> f64 {
        1.0 / (self.tau() * (1.0 + self.epsilon))
    }

    /// p^delta b^{1-delta} (> 1).
    pub fn geometric_base(&self) -> f64 {
        (self.p as f64).powf(self.delta) * self.b.powf(1.0 - self.delta)
    }

    /// The per-block growth factor g = (p^delta b^{1-delta})^{(m-1)/2}.
    pub fn geometric_factor(&self) -> f64 {
        self.geometric_base().powf((self.m as f64 - 1.0) / 2.0)
    }

    /// K = (u+v)^{1/tau} ||w||_tau with the closed-form tail sum b/(1-b).
    pub fn k_const(&self) -> f64 {
        let tau = self.tau();
        ((self.u + self.v) as f64).powf(1.0 / tau) * (self.b / (1.0 - self.b)).powf(1.0 / tau)
    }

    pub fn scheme(&self) -> Result<BlockScheme> {
        make_blocks(self.u, self.v, self.p, self.blocks, self.m)
    }
}

/// The weight sequence: constant on each block, zero off the progression.
#[derive(Clone, Debug)]
pub struct Weights {
    pub per_block: Vec<f64>,
    position_block: std::collections::BTreeMap<u64, usize>,
}

pub fn weight_sequence(scheme: &BlockScheme, params: &ConstructionParams) -> Weights {
    let m = params.m as f64;
    let exponent = (m - 1.0) / (2.0 * m) * (1.0 - params.delta);
    let base = params.b / params.p as f64;
    let per_block: Vec<f64> = (1..=scheme.num_blocks())
        .map(|k| base.powf(k as f64 * exponent))
        .collect();
    let mut position_block = std::collections::BTreeMap::new();
    for (bi, block) in scheme.blocks.iter().enumerate() {
        for &pos in block {
            position_block.insert(pos, bi);
        }
    }
    Weights {
        per_block,
        position_block,
    }
}

impl Weights {
    pub fn weight(&self, pos: u64) -> f64 {
        self.position_block
            .get(&pos)
            .map(|&bi| self.per_block[bi])
            .unwrap_or(0.0)
    }

    pub fn block_of(&self, pos: u64) -> Option<usize> {
        self.position_block.get(&pos).copied()
    }

    /// sum_l w_l^tau over the stored blocks = sum_{k<=K} b^k.
    pub fn tau_norm_pow_tau(&self, params: &ConstructionParams) -> f64 {
        (1..=self.per_block.len())
            .map(|k| params.b.powi(k as i32))
            .sum()
    }
}

/// The k-th block component: the unimodular polynomial on p^k variables,
/// relabeled onto the block's positions and scaled by p^{-k(m+1)/2} / k^2.
pub fn make_qk(scheme: &BlockScheme, params: &ConstructionParams, k: usize) -> Result<SparseSeries> {
    if k == 0 || k > scheme.num_blocks() {
        return Err(Error::InvalidParameter(format!(
            "block index {k} outside 1..={}",
            scheme.num_blocks()
        )));
    }
    let r = make_unimodular_poly(params.p, k as u32, params.m)?;
    let block = &scheme.blocks[k - 1];
    let scale = (params.p as f64).powf(-(k as f64) * (params.m as f64 + 1.0) / 2.0)
        / (k as f64 * k as f64);
    let relabeled = SparseSeries::from_terms(
        Side::Power,
        r.terms().map(|(alpha, c)| {
            let moved = MultiIndex::from_pairs(
                alpha
                    .entries()
                    .iter()
                    .map(|&(pos, e)| (block[pos as usize - 1], e)),
            );
            (moved, c * scale)
        }),
    );
    Ok(relabeled)
}

/// The full block-sum polynomial P = sum_k Q_k (disjoint block supports).
pub fn make_p(scheme: &BlockScheme, params: &ConstructionParams) -> Result<SparseSeries> {
    let mut acc = SparseSeries::zero(Side::Power);
    for k in 1..=scheme.num_blocks() {
        acc = acc.add(&make_qk(scheme, params, k)?)?;
    }
    Ok(acc)
}

/// Quadratic-phase witness for the whole of P: per-block witness points,
/// phase-aligned so every block contributes its modulus on the positive
/// real axis. Returns None when some block has no exact witness.
pub fn block_aligned_witness(
    scheme: &BlockScheme,
    params: &ConstructionParams,
    series_p: &SparseSeries,
) -> Result<Option<TorusPoint>> {
    let mut combined = TorusPoint::default();
    for k in 1..=scheme.num_blocks() {
        let field = Field::new(params.p, k as u32)?;
        let Some((_, phases, _)) = quadratic_witness(&field, params.m) else {
            return Ok(None);
        };
        let block = &scheme.blocks[k - 1];
        let wp = witness_point(block, &phases);
        combined.phases.extend(wp.phases);
    }
    // rotate each block so its contribution is real positive
    for k in 1..=scheme.num_blocks() {
        let block = &scheme.blocks[k - 1];
        let block_set: std::collections::BTreeSet<u64> = block.iter().copied().collect();
        let restricted = SparseSeries::from_terms(
            Side::Power,
            series_p
                .terms()
                .filter(|(a, _)| a.support().iter().all(|p| block_set.contains(p)))
                .map(|(a, c)| (a.clone(), *c)),
        );
        let val = analysis::evaluate_power(&restricted, &combined.coords())?;
        if val.norm() > 0.0 {
            let delta = -val.arg() / params.m as f64;
            combined.rotate_positions(block, delta);
        }
    }
    Ok(Some(combined))
}

/// Exact per-block data for the growth certificate.
struct BlockRow {
    coeff_sum: f64,     // sum of |c_alpha(P)| over the block
    weighted_sum: f64,  // (i): sum |c_alpha| w^alpha
    dirichlet_sum: f64, // (iii): sum |c_alpha| (p^alpha)^{-r}
}

/// Certify the divergence mechanism of a block-sum polynomial.
///
/// Per block k the rows record:
///   (i)   the exact weighted block sum,
///   (ii)  the lower-bound model scale*(eta/m!)(1/k^2) g^k,
///   (iii) the Dirichlet-weighted sum at the critical exponent r,
///   s_k = block coefficient mass / (scale * q^m / k^2 / p^{k(m+1)/2}),
/// plus running cumulative sums of (i) and (iii) and, when requested, the
/// cumulative A_N at sigma = delta_m up to the block boundary.
///
/// Verdict (tolerance 1e-9 on each comparison):
///   1. (i) >= (ii) for every block,
///   2. cumulative (i) and (iii) strictly increase,
///   3. the normalized ratios (k+1)^2 (i)_{k+1} s_k / (k^2 (i)_k s_{k+1})
///      match the geometric factor g from below,
///   4. (iii)_k >= C^{-mr} K_const^{-m} (i)_k (the prime-growth transfer),
///   5. the delta_m column, when present, strictly increases.
pub fn certify_growth(
    table: &PrimeTable,
    series: &SparseSeries,
    scheme: &BlockScheme,
    params: &ConstructionParams,
    scale: f64,
    delta_m: Option<f64>,
    inputs_digest: String,
) -> Result<Certificate> {
    let weights = weight_sequence(scheme, params);
    let nblocks = scheme.num_blocks();
    let m = params.m;
    let r = params.critical_exponent();

    let mut rows_data: Vec<BlockRow> = (0..nblocks)
        .map(|_| BlockRow {
            coeff_sum: 0.0,
            weighted_sum: 0.0,
            dirichlet_sum: 0.0,
        })
        .collect();

    for (alpha, c) in series.terms() {
        let positions = alpha.support();
        let first = *positions.iter().next().ok_or_else(|| {
            Error::CertificateMismatch("constant term in a homogeneous block sum".into())
        })?;
        let bi = weights.block_of(first).ok_or_else(|| {
            Error::CertificateMismatch(format!("position {first} outside the block scheme"))
        })?;
        if !positions.iter().all(|p| weights.block_of(*p) == Some(bi)) {
            return Err(Error::CertificateMismatch(
                "term spans more than one block".into(),
            ));
        }
        if alpha.degree() != m {
            return Err(Error::CertificateMismatch(format!(
                "term of degree {} in a degree-{m} construction",
                alpha.degree()
            )));
        }
        let modulus = c.norm();
        let row = &mut rows_data[bi];
        row.coeff_sum += modulus;
        row.weighted_sum += modulus * weights.per_block[bi].powi(m as i32);
        row.dirichlet_sum += modulus * analysis::index_pow_neg(table, alpha, r)?;
    }

    let g = params.geometric_factor();
    let m_fact: f64 = (1..=m as u64).product::<u64>() as f64;
    let pnt_c = table.pnt_constant(params.epsilon, scheme.max_position() as usize)?;
    let k_const = params.k_const();
    let transfer = pnt_c.powf(-(m as f64) * r) * k_const.powf(-(m as f64));

    let dirichlet_view = series.with_side(Side::Dirichlet);
    let mut columns = vec![
        "k".to_string(),
        "block_weighted_sum".to_string(),
        "lower_bound".to_string(),
        "block_dirichlet_sum".to_string(),
        "s_k".to_string(),
        "cum_weighted".to_string(),
        "cum_dirichlet".to_string(),
    ];
    if delta_m.is_some() {
        columns.push("a_delta_m_cum".to_string());
    }

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(nblocks);
    let (mut cum_i, mut cum_iii) = (0.0f64, 0.0f64);
    for (bi, data) in rows_data.iter().enumerate() {
        let k = (bi + 1) as f64;
        let lower = scale * (params.eta / m_fact) / (k * k) * g.powf(k);
        let q_m = (params.p as f64).powf(k * m as f64);
        let model_mass = scale * q_m / (k * k)
            * (params.p as f64).powf(-k * (m as f64 + 1.0) / 2.0);
        let s_k = data.coeff_sum / model_mass;
        cum_i += data.weighted_sum;
        cum_iii += data.dirichlet_sum;
        let mut row = vec![
            k,
            data.weighted_sum,
            lower,
            data.dirichlet_sum,
            s_k,
            cum_i,
            cum_iii,
        ];
        if let Some(dm) = delta_m {
            // block boundary: largest stored index inside blocks 1..=k
            let block_max = scheme.blocks[bi]
                .last()
                .copied()
                .unwrap_or(scheme.max_position());
            let p_max = table.nth_prime(block_max as usize)?;
            let boundary = num_bigint::BigUint::from(p_max).pow(m);
            row.push(analysis::partial_abs_sum(
                table,
                &dirichlet_view,
                dm,
                &boundary,
            )?);
        }
        rows.push(row);
    }

    let params_json = json!({
        "m": m,
        "p": params.p,
        "blocks": nblocks,
        "epsilon": params.epsilon,
        "delta": params.delta,
        "b": params.b,
        "eta": params.eta,
        "u": params.u,
        "v": params.v,
        "r": r,
        "scale": scale,
        "geometric_base": params.geometric_base(),
        "geometric_factor": g,
        "m_factorial": m_fact,
        "pnt_constant": pnt_c,
        "k_const": k_const,
        "transfer_constant": transfer,
        "delta_m": delta_m,
    });

    let tolerance = 1e-9;
    let verdict = growth_verdict(&params_json, &columns, &rows, tolerance);
    Ok(Certificate::new(
        CertKind::Growth,
        inputs_digest,
        tolerance,
        params_json,
        columns,
        rows,
        verdict,
    ))
}

/// Recompute a growth verdict from the stored table and constants alone.
pub fn growth_verdict(
    params: &serde_json::Value,
    columns: &[String],
    rows: &[Vec<f64>],
    tol: f64,
) -> Verdict {
    let col = |name: &str| columns.iter().position(|c| c == name);
    let (Some(ci), Some(cii), Some(ciii), Some(cs), Some(ccum_i), Some(ccum_iii)) = (
        col("block_weighted_sum"),
        col("lower_bound"),
        col("block_dirichlet_sum"),
        col("s_k"),
        col("cum_weighted"),
        col("cum_dirichlet"),
    ) else {
        return Verdict::Fail;
    };
    let Some(g) = params.get("geometric_factor").and_then(|v| v.as_f64()) else {
        return Verdict::Fail;
    };
    let transfer = params
        .get("transfer_constant")
        .and_then(|v| v.as_f64())
        .unwrap_or(0.0);
    let cdm = col("a_delta_m_cum");

    let mut ok = !rows.is_empty();
    for (idx, row) in rows.iter().enumerate() {
        ok &= row[ci] >= row[cii] * (1.0 - tol);
        ok &= row[ciii] >= transfer * row[ci] * (1.0 - tol);
        if idx > 0 {
            let prev = &rows[idx - 1];
            ok &= row[ccum_i] > prev[ccum_i];
            ok &= row[ccum_iii] > prev[ccum_iii];
            if let Some(c) = cdm {
                ok &= row[c] > prev[c];
            }
            // normalized geometric ratio: k^2 (i)_k / s_k is exactly g^k
            let k0 = prev[0];
            let k1 = row[0];
            let n0 = k0 * k0 * prev[ci] / prev[cs];
            let n1 = k1 * k1 * row[ci] / row[cs];
            if n0 > 0.0 {
                ok &= n1 / n0 >= g * (1.0 - tol) && n1 / n0 <= g * (1.0 + tol);
            } else {
                ok = false;
            }
        }
    }
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// How a generated series is normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    /// exact division by the coefficient l2 norm
    H2,
    /// division by the sampled sup-norm lower estimate
    SupSampled,
    /// division by the trusted theoretical sup bound sum 1/k^2
    SupBound,
}

#[derive(Clone, Debug)]
pub struct GeneratorOptions {
    pub p: Option<u64>,
    pub blocks: usize,
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub samples: usize,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        GeneratorOptions {
            p: None,
            blocks: 2,
            epsilon: None,
            seed: 0,
            samples: 32,
        }
    }
}

/// Default block prime per degree. Degrees 2..4 get primes whose fields
/// carry exact quadratic-phase witnesses; beyond that, the smallest prime
/// above the degree.
pub fn default_prime_for(degree: u32) -> u64 {
    match degree {
        2 => 5,
        3 => 7,
        4 => 5,
        d => {
            // upward scan for the smallest prime above the degree
            let mut p = d as u64 + 1;
            loop {
                let mut is_p = p >= 2;
                let mut q = 2;
                while q * q <= p {
                    if p % q == 0 {
                        is_p = false;
                        break;
                    }
                    q += 1;
                }
                if is_p {
                    return p;
                }
                p += 1;
            }
        }
    }
}

/// Largest epsilon with (tau0(Mridge)+eps)(1+eps) <= tau0(m_cert), so the
/// certified exponent r stays at or above delta_m.
fn epsilon_for_cert(m_cert: u32, degree: u32) -> f64 {
    let tau_deg = 2.0 * degree as f64 / (degree as f64 - 1.0);
    let tau_cert = 2.0 * m_cert as f64 / (m_cert as f64 - 1.0);
    let b = 1.0 + tau_deg;
    let c = tau_deg - tau_cert; // negative since degree > m_cert
    let eps_max = (-b + (b * b - 4.0 * c).sqrt()) / 2.0;
    (0.9 * eps_max).min(0.5)
}

pub struct Generated {
    pub series: SparseSeries,
    pub certificate: Certificate,
    pub scheme: BlockScheme,
    pub params: ConstructionParams,
    /// the normalization factor actually divided out
    pub norm_divisor: f64,
    /// sampled sup-norm lower estimate of the normalized series
    pub sampled_sup: f64,
    /// theoretical sup bound of the normalized series
    pub sup_bound: f64,
    pub witness: Option<TorusPoint>,
}

/// Degree-`degree` generator on the progression (u, v), normalized as
/// requested, with a growth certificate at sigma = delta_{m_cert}.
///
/// The certificate's critical exponent r is chosen at or above delta_m, so
/// its divergent weighted sum dominates the delta_m partial sums; the
/// delta_m column records A_N at the block boundaries.
pub fn make_dkm(
    table: &PrimeTable,
    u: u64,
    v: u64,
    m_cert: u32,
    degree: u32,
    norm: NormKind,
    opts: &GeneratorOptions,
    inputs_digest: String,
) -> Result<Generated> {
    if m_cert < 2 || degree <= m_cert {
        return Err(Error::InvalidParameter(format!(
            "need degree M > m >= 2 (got M = {degree}, m = {m_cert})"
        )));
    }
    let p = opts.p.unwrap_or_else(|| default_prime_for(degree));
    let epsilon = opts
        .epsilon
        .unwrap_or_else(|| epsilon_for_cert(m_cert, degree));
    let params = ConstructionParams::derive(degree, p, opts.blocks, epsilon, u, v)?;
    let delta_m = (m_cert as f64 - 1.0) / (2.0 * m_cert as f64);
    let r = params.critical_exponent();
    if r < delta_m {
        return Err(Error::InvalidParameter(format!(
            "certificate exponent r = {r} fell below delta_m = {delta_m}; lower epsilon"
        )));
    }
    let scheme = params.scheme()?;
    let p_series = make_p(&scheme, &params)?;
    let bound: f64 = (1..=opts.blocks).map(|k| 1.0 / (k * k) as f64).sum();
    let witness = block_aligned_witness(&scheme, &params, &p_series)?;

    let divisor = match norm {
        NormKind::H2 => analysis::h2_norm(&p_series),
        NormKind::SupBound => bound,
        NormKind::SupSampled => {
            let starts: Vec<TorusPoint> = witness.iter().cloned().collect();
            analysis::sup_norm_estimate_with_starts(&p_series, opts.samples, opts.seed, &starts)?
                .lower
        }
    };
    if divisor <= 0.0 {
        return Err(Error::InvalidParameter(
            "degenerate normalization divisor".into(),
        ));
    }
    let normalized = p_series.scale(Complex64::new(1.0 / divisor, 0.0));
    let certificate = certify_growth(
        table,
        &normalized,
        &scheme,
        &params,
        1.0 / divisor,
        Some(delta_m),
        inputs_digest,
    )?;
    let starts: Vec<TorusPoint> = witness.iter().cloned().collect();
    let sampled = analysis::sup_norm_estimate_with_starts(
        &normalized,
        opts.samples.min(8),
        opts.seed,
        &starts,
    )?
    .lower;
    Ok(Generated {
        series: normalized.with_side(Side::Dirichlet),
        certificate,
        scheme,
        params,
        norm_divisor: divisor,
        sampled_sup: sampled,
        sup_bound: bound / divisor,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> &'static PrimeTable {
        PrimeTable::shared()
    }

    #[test]
    fn delta_solves_its_equation() {
        let p = ConstructionParams::derive(2, 5, 4, 0.5, 1, 1).unwrap();
        // 2m/(m-1) + eps == (2m/(m-1)) / (1 - delta)
        let lhs = 4.0 + 0.5;
        let rhs = 4.0 / (1.0 - p.delta);
        assert!((lhs - rhs).abs() < 1e-12);
        assert!((p.delta - 1.0 / 9.0).abs() < 1e-12);
        assert!(p.geometric_base() > 1.0);
        assert!((p.geometric_base() - 1.0984528458264746).abs() < 1e-12);
    }

    #[test]
    fn explicit_delta_weight_formula() {
        // eps = 1 gives delta = 1/5; block-1 weight is (b/5)^{(1-delta)/4}
        let p = ConstructionParams::derive(2, 5, 1, 1.0, 1, 1).unwrap();
        assert!((p.delta - 0.2).abs() < 1e-12);
        let scheme = p.scheme().unwrap();
        let w = weight_sequence(&scheme, &p);
        let expect = (p.b / 5.0).powf((1.0 - p.delta) / 4.0);
        assert!((w.per_block[0] - expect).abs() < 1e-15);
        assert_eq!(w.weight(999_999), 0.0);
    }

    #[test]
    fn weights_tau_sum_is_geometric() {
        let p = ConstructionParams::derive(2, 5, 3, 0.5, 1, 1).unwrap();
        let scheme = p.scheme().unwrap();
        let w = weight_sequence(&scheme, &p);
        let tau = p.tau();
        // sum over positions of w^tau = sum over blocks of p^k w_k^tau = sum b^k
        let direct: f64 = scheme
            .blocks
            .iter()
            .enumerate()
            .map(|(bi, block)| block.len() as f64 * w.per_block[bi].powf(tau))
            .sum();
        let geometric: f64 = (1..=3).map(|k| p.b.powi(k)).sum();
        assert!((direct - geometric).abs() < 1e-12 * geometric);
        assert!(geometric < p.b / (1.0 - p.b));
        assert!((w.tau_norm_pow_tau(&p) - geometric).abs() < 1e-15);
    }

    #[test]
    fn qk_scaling_and_relabeling() {
        // k=1, p=3, m=2 on {3+2k}: first block positions 5,7,9
        let params = ConstructionParams::derive(2, 3, 1, 0.5, 3, 2).unwrap();
        let scheme = params.scheme().unwrap();
        let q1 = make_qk(&scheme, &params, 1).unwrap();
        assert!(q1
            .support_positions()
            .iter()
            .all(|p| [5u64, 7, 9].contains(p)));
        // coefficient at z_5 z_7 (field elements 0,1) has modulus 2 * 3^{-3/2}
        let c = q1.coeff(&MultiIndex::from_pairs([(5, 1), (7, 1)]));
        assert!((c.norm() - 2.0 * 3f64.powf(-1.5)).abs() < 1e-12);
    }

    #[test]
    fn p_is_theta_supported_and_homogeneous() {
        let params = ConstructionParams::derive(2, 3, 2, 0.5, 3, 2).unwrap();
        let scheme = params.scheme().unwrap();
        let p = make_p(&scheme, &params).unwrap();
        assert!(p.is_theta_supported(&scheme.theta()));
        assert_eq!(p.omega_tilde().into_iter().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn growth_certificate_passes_at_defaults() {
        let params = ConstructionParams::derive(2, 5, 4, 0.5, 1, 1).unwrap();
        let scheme = params.scheme().unwrap();
        let p = make_p(&scheme, &params).unwrap();
        let cert = certify_growth(table(), &p, &scheme, &params, 1.0, None, "t".into()).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        assert_eq!(cert.rows.len(), 4);
        // the m=2 construction has s_k = 1 exactly and block sums g^k / k^2
        let g = params.geometric_factor();
        let ci = cert.column("block_weighted_sum").unwrap();
        let cs = cert.column("s_k").unwrap();
        for (idx, row) in cert.rows.iter().enumerate() {
            let k = (idx + 1) as f64;
            assert!((row[cs] - 1.0).abs() < 1e-9, "s_k = {}", row[cs]);
            let expect = g.powf(k) / (k * k);
            assert!(
                (row[ci] - expect).abs() < 1e-9 * expect,
                "block {k}: {} vs {expect}",
                row[ci]
            );
        }
    }

    #[test]
    fn growth_certificate_single_block_degenerates() {
        let params = ConstructionParams::derive(2, 5, 1, 0.5, 1, 1).unwrap();
        let scheme = params.scheme().unwrap();
        let p = make_p(&scheme, &params).unwrap();
        let cert = certify_growth(table(), &p, &scheme, &params, 1.0, None, "t".into()).unwrap();
        assert_eq!(cert.rows.len(), 1);
        assert_eq!(cert.verdict, Verdict::Pass);
    }

    #[test]
    fn block_witness_reaches_theory_bound() {
        let params = ConstructionParams::derive(2, 5, 3, 0.5, 1, 1).unwrap();
        let scheme = params.scheme().unwrap();
        let p = make_p(&scheme, &params).unwrap();
        let w = block_aligned_witness(&scheme, &params, &p).unwrap().unwrap();
        let val = analysis::evaluate_power(&p, &w.coords()).unwrap();
        let bound: f64 = (1..=3).map(|k| 1.0 / (k * k) as f64).sum();
        assert!(
            (val.norm() - bound).abs() < 1e-9 * bound,
            "witness reaches {} of bound {bound}",
            val.norm()
        );
        // and it lands (nearly) on the positive real axis after alignment
        assert!(val.re > 0.0 && val.im.abs() < 1e-9);
    }

    #[test]
    fn generator_h2_normalized_with_certificate() {
        let gen = make_dkm(
            table(),
            1,
            1,
            2,
            3,
            NormKind::H2,
            &GeneratorOptions::default(),
            "t".into(),
        )
        .unwrap();
        assert!((analysis::h2_norm(&gen.series) - 1.0).abs() < 1e-12);
        assert_eq!(
            gen.series.omega_tilde().into_iter().collect::<Vec<_>>(),
            vec![3]
        );
        assert_eq!(gen.certificate.verdict, Verdict::Pass);
        // delta_m table strictly increases across block boundaries
        let c = gen.certificate.column("a_delta_m_cum").unwrap();
        let vals: Vec<f64> = gen.certificate.rows.iter().map(|r| r[c]).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
        // certified exponent dominates delta_m
        let r = gen.certificate.param_f64("r").unwrap();
        assert!(r >= 0.25);
    }

    #[test]
    fn generator_rejects_bad_degrees() {
        assert!(make_dkm(
            table(),
            1,
            1,
            3,
            3,
            NormKind::H2,
            &GeneratorOptions::default(),
            "t".into()
        )
        .is_err());
    }

    #[test]
    fn default_primes_exceed_degree() {
        for d in 2..=8u32 {
            let p = default_prime_for(d);
            assert!(p > d as u64);
        }
        assert_eq!(default_prime_for(2), 5);
        assert_eq!(default_prime_for(3), 7);
        assert_eq!(default_prime_for(4), 5);
    }
}
