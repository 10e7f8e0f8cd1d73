//! Sequence-space embeddings built from block constructions on pairwise
//! disjoint progressions, with isometry certificates.
//!
//! l2: coefficients lambda map to sum_k lambda_k sum_{m=3}^{M} D_{k,m} /
//! 2^{(m-2)/2} with h2-normalized generators on disjoint progressions; the
//! image norm satisfies ||T lambda||_2^2 = ||lambda||_2^2 (1 - 2^{-(M-2)})
//! exactly, and all pairwise inner products vanish identically.
//!
//! l1: coefficients map to sum_k lambda_k sum_{m=2}^{M} 2^{-(m-1)}
//! P_{k,m} / L_{k,m} with L the sampled sup-norm lower estimate. Quadratic
//! phase witnesses make L match the trusted bound, and a combined
//! phase-aligned point certifies the lower bound sum |lambda_k| (1 - 2^{1-M}).

use num_complex::Complex64;
use serde_json::json;

use crate::analysis::{self, TorusPoint};
use crate::certificate::{CertKind, Certificate, Verdict};
use crate::construct::{
    block_aligned_witness, default_prime_for, make_dkm, make_p, ConstructionParams,
    GeneratorOptions, NormKind,
};
use crate::error::{Error, Result};
use crate::primes::PrimeTable;
use crate::series::{Side, SparseSeries};
use crate::theta::{disjoint_theta_family, Theta};

pub struct EmbedComponent {
    pub name: String,
    pub series: SparseSeries,
    pub growth: Option<Certificate>,
}

pub struct EmbedOutcome {
    pub image: SparseSeries,
    pub components: Vec<EmbedComponent>,
    pub certificate: Certificate,
}

fn lambda_json(lambda: &[Complex64]) -> serde_json::Value {
    json!(lambda.iter().map(|l| vec![l.re, l.im]).collect::<Vec<_>>())
}

fn theta_uv(theta: &Theta) -> (u64, u64) {
    match theta {
        Theta::Progression { u, v } => (*u, *v),
        Theta::Explicit { .. } => unreachable!("family members are progressions"),
    }
}

/// Isometric l2 embedding with orthonormality and truncation-identity rows.
pub fn embed_l2(
    table: &PrimeTable,
    lambda: &[Complex64],
    m_max: u32,
    opts: &GeneratorOptions,
    inputs_digest: String,
) -> Result<EmbedOutcome> {
    if m_max < 3 {
        return Err(Error::InvalidParameter(
            "l2 embedding needs m_max >= 3".into(),
        ));
    }
    let zero = Complex64::new(0.0, 0.0);
    let n = lambda.len();
    let degrees: Vec<u32> = (3..=m_max).collect();
    let truncation = 1.0 - 2f64.powi(-(m_max as i32 - 2));
    let columns: Vec<String> = ["row_kind", "i", "j", "value", "expected", "abs_error"]
        .iter()
        .map(|s| s.to_string())
        .collect();

    if n == 0 || lambda.iter().all(|l| *l == zero) {
        let rows = vec![vec![2.0, 0.0, 0.0, 0.0, 0.0, 0.0]];
        let params = json!({
            "lambda": lambda_json(lambda),
            "m_max": m_max,
            "truncation_factor": truncation,
            "components": [],
        });
        let verdict = l2_verdict(&columns, &rows, 1e-10);
        return Ok(EmbedOutcome {
            image: SparseSeries::zero(Side::Dirichlet),
            components: Vec::new(),
            certificate: Certificate::new(
                CertKind::IsometryL2,
                inputs_digest,
                1e-10,
                params,
                columns,
                rows,
                verdict,
            ),
        });
    }

    let thetas = disjoint_theta_family(n * degrees.len());
    let mut components = Vec::new();
    let mut meta = Vec::new();
    let mut image = SparseSeries::zero(Side::Dirichlet);
    for k in 1..=n {
        for (di, &m) in degrees.iter().enumerate() {
            let theta = &thetas[(k - 1) * degrees.len() + di];
            let (u, v) = theta_uv(theta);
            let mut gopts = opts.clone();
            gopts.p = Some(opts.p.unwrap_or_else(|| default_prime_for(m)));
            let generated = make_dkm(
                table,
                u,
                v,
                m - 1,
                m,
                NormKind::H2,
                &gopts,
                inputs_digest.clone(),
            )?;
            let name = format!("D_{k}_{m}");
            meta.push(json!({
                "name": name,
                "k": k,
                "m": m,
                "u": u,
                "v": v,
                "p": generated.params.p,
                "blocks": generated.params.blocks,
            }));
            let weight = lambda[k - 1] * 2f64.powf(-((m as f64) - 2.0) / 2.0);
            image = image.add(&generated.series.scale(weight))?;
            components.push(EmbedComponent {
                name,
                series: generated.series,
                growth: Some(generated.certificate),
            });
        }
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..components.len() {
        let norm = analysis::h2_norm(&components[i].series);
        rows.push(vec![1.0, i as f64, i as f64, norm, 1.0, (norm - 1.0).abs()]);
        for j in i + 1..components.len() {
            let inner = analysis::h2_inner(&components[i].series, &components[j].series).norm();
            rows.push(vec![0.0, i as f64, j as f64, inner, 0.0, inner]);
        }
    }
    let norm_sq = analysis::h2_norm(&image).powi(2);
    let lambda_sq: f64 = lambda.iter().map(|l| l.norm_sqr()).sum();
    let expected = lambda_sq * truncation;
    rows.push(vec![
        2.0,
        0.0,
        0.0,
        norm_sq,
        expected,
        (norm_sq - expected).abs(),
    ]);

    let params = json!({
        "lambda": lambda_json(lambda),
        "m_max": m_max,
        "truncation_factor": truncation,
        "components": meta,
    });
    let verdict = l2_verdict(&columns, &rows, 1e-10);
    Ok(EmbedOutcome {
        image,
        components,
        certificate: Certificate::new(
            CertKind::IsometryL2,
            inputs_digest,
            1e-10,
            params,
            columns,
            rows,
            verdict,
        ),
    })
}

/// l2 verdict: inner products exactly zero, unit norms to 1e-12, and the
/// truncation identity within the certificate tolerance.
pub fn l2_verdict(columns: &[String], rows: &[Vec<f64>], tol: f64) -> Verdict {
    let kind = match columns.iter().position(|c| c == "row_kind") {
        Some(i) => i,
        None => return Verdict::Fail,
    };
    let (Some(val), Some(err)) = (
        columns.iter().position(|c| c == "value"),
        columns.iter().position(|c| c == "abs_error"),
    ) else {
        return Verdict::Fail;
    };
    let _ = val;
    let mut ok = true;
    for row in rows {
        match row[kind] as u32 {
            0 => ok &= row[err] == 0.0,
            1 => ok &= row[err] <= 1e-12,
            2 => ok &= row[err] <= tol,
            _ => ok = false,
        }
    }
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// l1 embedding with sup-norm bracketing certificate.
pub fn embed_l1(
    lambda: &[Complex64],
    m_max: u32,
    opts: &GeneratorOptions,
    inputs_digest: String,
) -> Result<EmbedOutcome> {
    if m_max < 2 {
        return Err(Error::InvalidParameter(
            "l1 embedding needs m_max >= 2".into(),
        ));
    }
    let zero = Complex64::new(0.0, 0.0);
    let n = lambda.len();
    let degrees: Vec<u32> = (2..=m_max).collect();
    let truncation = 1.0 - 2f64.powi(1 - m_max as i32);
    let columns: Vec<String> = ["row_kind", "k", "m", "a", "b", "c", "d"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let lower_floor = 0.9;
    let slack_cap = 0.1;

    if n == 0 || lambda.iter().all(|l| *l == zero) {
        let rows = vec![vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]];
        let params = json!({
            "lambda": lambda_json(lambda),
            "m_max": m_max,
            "truncation_factor": truncation,
            "lower_floor": lower_floor,
            "slack_cap": slack_cap,
            "components": [],
        });
        let verdict = l1_verdict(&params, &columns, &rows, 1e-9);
        return Ok(EmbedOutcome {
            image: SparseSeries::zero(Side::Dirichlet),
            components: Vec::new(),
            certificate: Certificate::new(
                CertKind::IsometryL1,
                inputs_digest,
                1e-9,
                params,
                columns,
                rows,
                verdict,
            ),
        });
    }

    let thetas = disjoint_theta_family(n * degrees.len());
    let bound: f64 = (1..=opts.blocks).map(|k| 1.0 / (k * k) as f64).sum();

    struct Built {
        k: usize,
        m: u32,
        normalized: SparseSeries, // power side
        lower: f64,
        witness: TorusPoint,
        positions: Vec<u64>,
        phase: f64, // arg of normalized(witness)
        theta: (u64, u64),
        p: u64,
    }

    let mut built: Vec<Built> = Vec::new();
    for k in 1..=n {
        for (di, &m) in degrees.iter().enumerate() {
            let theta = &thetas[(k - 1) * degrees.len() + di];
            let (u, v) = theta_uv(theta);
            let p = opts.p.unwrap_or_else(|| default_prime_for(m));
            let params = ConstructionParams::derive(m, p, opts.blocks, 0.5, u, v)?;
            let scheme = params.scheme()?;
            let p_series = make_p(&scheme, &params)?;
            let starts: Vec<TorusPoint> = block_aligned_witness(&scheme, &params, &p_series)?
                .into_iter()
                .collect();
            let est = analysis::sup_norm_estimate_with_starts(
                &p_series,
                opts.samples,
                opts.seed ^ ((k as u64) << 32) ^ m as u64,
                &starts,
            )?;
            if est.lower <= 0.0 {
                return Err(Error::InvalidParameter(
                    "degenerate sup-norm estimate".into(),
                ));
            }
            let normalized = p_series.scale(Complex64::new(1.0 / est.lower, 0.0));
            let at_witness = analysis::evaluate_power(&normalized, &est.witness.coords())?;
            let positions: Vec<u64> = normalized.support_positions().into_iter().collect();
            built.push(Built {
                k,
                m,
                normalized,
                lower: est.lower,
                witness: est.witness,
                positions,
                phase: at_witness.arg(),
                theta: (u, v),
                p,
            });
        }
    }

    // image on the Dirichlet side
    let mut image = SparseSeries::zero(Side::Dirichlet);
    for b in &built {
        let weight = lambda[b.k - 1] * 2f64.powi(1 - b.m as i32);
        image = image.add(&b.normalized.with_side(Side::Dirichlet).scale(weight))?;
    }

    // combined witness: rotate each component's witness so its normalized
    // value points along e^{-i arg lambda_k}
    let mut combined = TorusPoint::default();
    for b in &built {
        let lam = lambda[b.k - 1];
        let theta_k = if lam == zero { 0.0 } else { lam.arg() };
        let mut wp = b.witness.clone();
        let delta = (-theta_k - b.phase) / b.m as f64;
        wp.rotate_positions(&b.positions, delta);
        combined.phases.extend(wp.phases);
    }
    let lower = analysis::evaluate_power(&image.with_side(Side::Power), &combined.coords())?.norm();

    let lambda_abs: f64 = lambda.iter().map(|l| l.norm()).sum();
    let target = lambda_abs * truncation;
    let upper: f64 = built
        .iter()
        .map(|b| lambda[b.k - 1].norm() * 2f64.powi(1 - b.m as i32) * (bound / b.lower))
        .sum();
    let slack = if target > 0.0 { upper / target - 1.0 } else { 0.0 };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut meta = Vec::new();
    for b in &built {
        let at_w = analysis::evaluate_power(&b.normalized, &b.witness.coords())?.norm();
        rows.push(vec![
            0.0,
            b.k as f64,
            b.m as f64,
            b.lower,
            bound,
            bound / b.lower,
            at_w,
        ]);
        meta.push(json!({
            "name": format!("P_{}_{}", b.k, b.m),
            "k": b.k,
            "m": b.m,
            "u": b.theta.0,
            "v": b.theta.1,
            "p": b.p,
            "blocks": opts.blocks,
            "lower_estimate": b.lower,
            "sup_bound": bound,
        }));
    }
    rows.push(vec![1.0, 0.0, 0.0, lower, upper, target, slack]);

    let params = json!({
        "lambda": lambda_json(lambda),
        "m_max": m_max,
        "truncation_factor": truncation,
        "lower_floor": lower_floor,
        "slack_cap": slack_cap,
        "components": meta,
    });
    let verdict = l1_verdict(&params, &columns, &rows, 1e-9);
    let mut certificate = Certificate::new(
        CertKind::IsometryL1,
        inputs_digest,
        1e-9,
        params,
        columns,
        rows,
        verdict,
    );
    certificate.witnesses.push(combined);
    for b in &built {
        certificate.witnesses.push(b.witness.clone());
    }

    let components = built
        .into_iter()
        .map(|b| EmbedComponent {
            name: format!("P_{}_{}", b.k, b.m),
            series: b.normalized,
            growth: None,
        })
        .collect();
    Ok(EmbedOutcome {
        image,
        components,
        certificate,
    })
}

/// l1 verdict from the stored rows: witness values stay normalized, the
/// bracket lower <= upper holds, the lower bound clears its floor, and the
/// upper-bound slack stays under its cap.
pub fn l1_verdict(
    params: &serde_json::Value,
    columns: &[String],
    rows: &[Vec<f64>],
    tol: f64,
) -> Verdict {
    let kind = match columns.iter().position(|c| c == "row_kind") {
        Some(i) => i,
        None => return Verdict::Fail,
    };
    let floor = params
        .get("lower_floor")
        .and_then(|v| v.as_f64())
        .unwrap_or(0.9);
    let cap = params
        .get("slack_cap")
        .and_then(|v| v.as_f64())
        .unwrap_or(0.1);
    let mut ok = true;
    let mut saw_summary = false;
    for row in rows {
        match row[kind] as u32 {
            0 => {
                // [0, k, m, L, B, B/L, |Phat(W)|]
                ok &= (row[6] - 1.0).abs() <= 1e-9;
                ok &= row[3] <= row[4] * (1.0 + tol);
            }
            1 => {
                saw_summary = true;
                let (lower, upper, target, slack) = (row[3], row[4], row[5], row[6]);
                ok &= lower <= upper * (1.0 + tol) + tol;
                ok &= lower >= floor * target - tol;
                ok &= slack <= cap + tol;
            }
            _ => ok = false,
        }
    }
    if ok && saw_summary {
        Verdict::Pass
    } else {
        Verdict::Fail
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

    #[test]
    fn l2_single_basis_vector() {
        let out = embed_l2(
            table(),
            &[c(1.0, 0.0)],
            4,
            &GeneratorOptions {
                blocks: 1,
                ..Default::default()
            },
            "t".into(),
        )
        .unwrap();
        assert_eq!(out.certificate.verdict, Verdict::Pass);
        let norm_sq = analysis::h2_norm(&out.image).powi(2);
        assert!((norm_sq - 0.75).abs() < 1e-10, "norm^2 = {norm_sq}");
    }

    #[test]
    fn l2_zero_vector_trivial_pass() {
        let out = embed_l2(
            table(),
            &[c(0.0, 0.0)],
            4,
            &GeneratorOptions::default(),
            "t".into(),
        )
        .unwrap();
        assert!(out.image.is_zero());
        assert_eq!(out.certificate.verdict, Verdict::Pass);
    }

    #[test]
    fn l2_pairwise_orthogonal() {
        let out = embed_l2(
            table(),
            &[c(0.6, 0.0), c(0.0, 0.8)],
            4,
            &GeneratorOptions {
                blocks: 1,
                ..Default::default()
            },
            "t".into(),
        )
        .unwrap();
        for i in 0..out.components.len() {
            for j in i + 1..out.components.len() {
                let inner =
                    analysis::h2_inner(&out.components[i].series, &out.components[j].series);
                assert_eq!(inner, c(0.0, 0.0), "components {i},{j} not orthogonal");
            }
        }
        // (3,4)/5 scaled: ||lambda|| = 1, norm^2 = truncation factor
        let norm_sq = analysis::h2_norm(&out.image).powi(2);
        assert!((norm_sq - 0.75).abs() < 1e-10);
    }

    #[test]
    fn l1_single_vector_bracket() {
        let out = embed_l1(
            &[c(1.0, 0.0)],
            4,
            &GeneratorOptions {
                blocks: 2,
                samples: 8,
                ..Default::default()
            },
            "t".into(),
        )
        .unwrap();
        assert_eq!(out.certificate.verdict, Verdict::Pass);
        let summary = out
            .certificate
            .rows
            .iter()
            .find(|r| r[0] == 1.0)
            .unwrap()
            .clone();
        let (lower, upper, target, slack) = (summary[3], summary[4], summary[5], summary[6]);
        let expect = 1.0 - 2f64.powi(-3); // 1 - 2^{1-4}
        assert!((target - expect).abs() < 1e-12);
        assert!(lower >= 0.9 * target);
        assert!(upper >= target * (1.0 - 1e-9));
        assert!(slack <= 0.1);
        // witnesses make the bracket essentially exact
        assert!((lower - target).abs() < 1e-6, "lower = {lower} vs {expect}");
    }

    #[test]
    fn l1_zero_vector_trivial() {
        let out = embed_l1(
            &[c(0.0, 0.0)],
            4,
            &GeneratorOptions::default(),
            "t".into(),
        )
        .unwrap();
        assert!(out.image.is_zero());
        assert_eq!(out.certificate.verdict, Verdict::Pass);
    }

    #[test]
    fn l1_mixed_phases() {
        let out = embed_l1(
            &[c(1.0, 0.0), c(0.0, 1.0)],
            4,
            &GeneratorOptions {
                blocks: 2,
                samples: 8,
                ..Default::default()
            },
            "t".into(),
        )
        .unwrap();
        assert_eq!(out.certificate.verdict, Verdict::Pass);
        let summary = out
            .certificate
            .rows
            .iter()
            .find(|r| r[0] == 1.0)
            .unwrap()
            .clone();
        let target = 2.0 * (1.0 - 2f64.powi(-3));
        assert!((summary[5] - target).abs() < 1e-12);
        assert!(summary[3] >= 0.9 * target, "lower = {}", summary[3]);
    }

    #[test]
    fn component_supports_pairwise_disjoint() {
        let out = embed_l1(
            &[c(1.0, 0.0), c(-1.0, 0.0)],
            3,
            &GeneratorOptions {
                blocks: 1,
                samples: 4,
                ..Default::default()
            },
            "t".into(),
        )
        .unwrap();
        let supports: Vec<std::collections::BTreeSet<u64>> = out
            .components
            .iter()
            .map(|c| c.series.support_positions())
            .collect();
        for i in 0..supports.len() {
            for j in i + 1..supports.len() {
                assert!(supports[i].is_disjoint(&supports[j]));
            }
        }
    }
}
