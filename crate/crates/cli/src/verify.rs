//! Recompute certificate tables from the emitted series and compare.
//!
//! Every certificate kind the commands emit is re-derivable: growth and
//! norm-bound tables from the main series plus stored parameters, embedding
//! tables from the main series plus the referenced component files, and the
//! perturbation tables from the main series, the stored lambda samples, and
//! the referenced generator.

use std::path::Path;

use num_complex::Complex64;

use bohrstrip_core::certificate::digest_bytes;
use bohrstrip_core::construct::growth_verdict;
use bohrstrip_core::embed::{l1_verdict, l2_verdict};
use bohrstrip_core::io::series_from_str;
use bohrstrip_core::perturb::{big_log10, inequality_schedule};
use bohrstrip_core::series::Side;
use bohrstrip_core::{
    analysis, certify_growth, Budget, CertKind, Certificate, ConstructionParams, MembershipQuery,
    PrimeTable, SparseSeries, Verdict,
};

use crate::output::{CliError, CliResult};

/// Cellwise comparison: |a - b| <= tol * max(1, |b|). A 1e-13 nudge passes,
/// a corrupted coefficient (which shifts recomputed sums by far more) fails.
fn rows_match(computed: &[Vec<f64>], stored: &[Vec<f64>], tol: f64) -> Result<(), String> {
    if computed.len() != stored.len() {
        return Err(format!(
            "row count mismatch: recomputed {}, stored {}",
            computed.len(),
            stored.len()
        ));
    }
    for (i, (c, s)) in computed.iter().zip(stored).enumerate() {
        if c.len() != s.len() {
            return Err(format!("row {i}: width mismatch"));
        }
        for (j, (a, b)) in c.iter().zip(s).enumerate() {
            if (a - b).abs() > tol * b.abs().max(1.0) {
                return Err(format!("row {i} col {j}: recomputed {a} vs stored {b}"));
            }
        }
    }
    Ok(())
}

fn param_f64(cert: &Certificate, key: &str) -> CliResult<f64> {
    cert.param_f64(key)
        .ok_or_else(|| CliError::Invalid(format!("certificate missing parameter '{key}'")))
}

fn param_u64(cert: &Certificate, key: &str) -> CliResult<u64> {
    cert.param_u64(key)
        .ok_or_else(|| CliError::Invalid(format!("certificate missing parameter '{key}'")))
}

fn load_component(cert_dir: &Path, cert: &Certificate, role: &str) -> CliResult<SparseSeries> {
    let reference = cert
        .components
        .iter()
        .find(|c| c.role == role)
        .ok_or_else(|| CliError::Invalid(format!("certificate lacks component '{role}'")))?;
    let path = cert_dir.join(&reference.path);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Invalid(format!("component '{role}' unreadable: {e}")))?;
    if digest_bytes(text.as_bytes()) != reference.sha256 {
        return Err(CliError::CertificateFailed(format!(
            "component '{role}' digest mismatch"
        )));
    }
    Ok(series_from_str(&text)?)
}

fn load_components_in_order(
    cert_dir: &Path,
    cert: &Certificate,
) -> CliResult<Vec<SparseSeries>> {
    cert.components
        .iter()
        .map(|r| load_component(cert_dir, cert, &r.role))
        .collect()
}

pub fn verify(series: &SparseSeries, cert: &Certificate, cert_dir: &Path) -> CliResult<()> {
    let table = PrimeTable::shared();
    match cert.kind {
        CertKind::Growth => verify_growth(table, series, cert),
        CertKind::NormBound => verify_norm_bound(series, cert),
        CertKind::IsometryL2 => verify_l2(series, cert, cert_dir),
        CertKind::IsometryL1 => verify_l1(series, cert, cert_dir),
        CertKind::Membership => verify_membership(table, series, cert),
        CertKind::GrowthInequality => verify_inequality(table, series, cert, cert_dir),
        other => Err(CliError::Invalid(format!(
            "certificate kind {other:?} is not standalone-verifiable"
        ))),
    }
}

fn verify_growth(table: &PrimeTable, series: &SparseSeries, cert: &Certificate) -> CliResult<()> {
    let m = param_u64(cert, "m")? as u32;
    let p = param_u64(cert, "p")?;
    let blocks = param_u64(cert, "blocks")? as usize;
    let epsilon = param_f64(cert, "epsilon")?;
    let u = param_u64(cert, "u")?;
    let v = param_u64(cert, "v")?;
    let scale = param_f64(cert, "scale")?;
    let delta_m = cert.params.get("delta_m").and_then(|x| x.as_f64());

    let params = ConstructionParams::derive(m, p, blocks, epsilon, u, v)?;
    for (key, have) in [
        ("delta", params.delta),
        ("b", params.b),
        ("eta", params.eta),
        ("r", params.critical_exponent()),
        ("geometric_factor", params.geometric_factor()),
    ] {
        let stored = param_f64(cert, key)?;
        if (have - stored).abs() > 1e-12 * stored.abs().max(1.0) {
            return Err(CliError::CertificateFailed(format!(
                "derived parameter '{key}' mismatch: {have} vs stored {stored}"
            )));
        }
    }
    let scheme = params.scheme()?;
    let recomputed = certify_growth(
        table,
        series,
        &scheme,
        &params,
        scale,
        delta_m,
        cert.inputs_digest.clone(),
    )?;
    if recomputed.columns != cert.columns {
        return Err(CliError::CertificateFailed("column set mismatch".into()));
    }
    rows_match(&recomputed.rows, &cert.rows, 1e-12).map_err(CliError::CertificateFailed)?;
    let verdict = growth_verdict(&cert.params, &cert.columns, &cert.rows, cert.tolerance);
    if verdict != cert.verdict {
        return Err(CliError::CertificateFailed(format!(
            "stored verdict {:?} but rows imply {verdict:?}",
            cert.verdict
        )));
    }
    Ok(())
}

fn verify_norm_bound(series: &SparseSeries, cert: &Certificate) -> CliResult<()> {
    let m = param_u64(cert, "m")? as u32;
    let p = param_u64(cert, "p")?;
    let blocks = param_u64(cert, "blocks")? as usize;
    let u = param_u64(cert, "u")?;
    let v = param_u64(cert, "v")?;
    let safety = param_f64(cert, "safety_factor")?;
    let scheme = bohrstrip_core::make_blocks(u, v, p, blocks, m)?;
    if cert.witnesses.len() != cert.rows.len() {
        return Err(CliError::CertificateFailed(
            "witness count does not match rows".into(),
        ));
    }
    let power = series.with_side(Side::Power);
    let pi2_6 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
    for (row, witness) in cert.rows.iter().zip(&cert.witnesses) {
        let k = row[0] as usize;
        let restricted = if k == 0 {
            power.clone()
        } else {
            let block: std::collections::BTreeSet<u64> =
                scheme.blocks[k - 1].iter().copied().collect();
            SparseSeries::from_terms(
                Side::Power,
                power
                    .terms()
                    .filter(|(a, _)| a.support().iter().all(|q| block.contains(q)))
                    .map(|(a, c)| (a.clone(), *c)),
            )
        };
        let val = analysis::evaluate_power(&restricted, &witness.coords())?.norm();
        if (val - row[1]).abs() > 1e-9 * row[1].max(1.0) {
            return Err(CliError::CertificateFailed(format!(
                "row k={k}: witness evaluates to {val}, stored lower {}",
                row[1]
            )));
        }
        let cap = if k == 0 {
            pi2_6 * safety
        } else {
            safety / (k * k) as f64
        };
        if (cap - row[2]).abs() > 1e-12 * cap {
            return Err(CliError::CertificateFailed(format!("row k={k}: cap mismatch")));
        }
        let coeff_sum = restricted.coeff_abs_sum();
        if (coeff_sum - row[3]).abs() > 1e-12 * coeff_sum.max(1.0) {
            return Err(CliError::CertificateFailed(format!(
                "row k={k}: coefficient sum mismatch"
            )));
        }
        if row[1] > cap * (1.0 + 1e-12) && cert.verdict == Verdict::Pass {
            return Err(CliError::CertificateFailed(format!(
                "row k={k}: lower exceeds cap yet verdict is pass"
            )));
        }
    }
    Ok(())
}

fn verify_l2(series: &SparseSeries, cert: &Certificate, cert_dir: &Path) -> CliResult<()> {
    let components = load_components_in_order(cert_dir, cert)?;
    let lambda = load_lambda(cert)?;
    let m_max = param_u64(cert, "m_max")? as u32;
    let truncation = 1.0 - 2f64.powi(-(m_max as i32 - 2));

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..components.len() {
        let norm = analysis::h2_norm(&components[i]);
        rows.push(vec![1.0, i as f64, i as f64, norm, 1.0, (norm - 1.0).abs()]);
        for j in i + 1..components.len() {
            let inner = analysis::h2_inner(&components[i], &components[j]).norm();
            rows.push(vec![0.0, i as f64, j as f64, inner, 0.0, inner]);
        }
    }
    let norm_sq = analysis::h2_norm(series).powi(2);
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
    rows_match(&rows, &cert.rows, 1e-12).map_err(CliError::CertificateFailed)?;
    let verdict = l2_verdict(&cert.columns, &cert.rows, cert.tolerance);
    if verdict != cert.verdict {
        return Err(CliError::CertificateFailed(format!(
            "stored verdict {:?} but rows imply {verdict:?}",
            cert.verdict
        )));
    }
    Ok(())
}

fn verify_l1(series: &SparseSeries, cert: &Certificate, cert_dir: &Path) -> CliResult<()> {
    let components = load_components_in_order(cert_dir, cert)?;
    let lambda = load_lambda(cert)?;
    let m_max = param_u64(cert, "m_max")? as u32;
    let truncation = 1.0 - 2f64.powi(1 - m_max as i32);

    let comp_rows: Vec<&Vec<f64>> = cert.rows.iter().filter(|r| r[0] == 0.0).collect();
    if comp_rows.len() != components.len() {
        return Err(CliError::CertificateFailed(
            "component row count mismatch".into(),
        ));
    }
    if !components.is_empty() && cert.witnesses.len() != components.len() + 1 {
        return Err(CliError::CertificateFailed(
            "witness count does not match components".into(),
        ));
    }
    let mut upper = 0.0;
    for (i, (row, comp)) in comp_rows.iter().zip(&components).enumerate() {
        let witness = &cert.witnesses[i + 1];
        let val = analysis::evaluate_power(comp, &witness.coords())?.norm();
        if (val - row[6]).abs() > 1e-9 {
            return Err(CliError::CertificateFailed(format!(
                "component {i}: witness value {val} vs stored {}",
                row[6]
            )));
        }
        let (k, m, lower_est, bound) = (row[1] as usize, row[2] as i32, row[3], row[4]);
        if (row[5] - bound / lower_est).abs() > 1e-12 * row[5].max(1.0) {
            return Err(CliError::CertificateFailed(format!(
                "component {i}: ratio column inconsistent"
            )));
        }
        upper += lambda
            .get(k - 1)
            .map(|l| l.norm())
            .unwrap_or(0.0)
            * 2f64.powi(1 - m)
            * (bound / lower_est);
    }
    let summary = cert
        .rows
        .iter()
        .find(|r| r[0] == 1.0)
        .ok_or_else(|| CliError::CertificateFailed("missing summary row".into()))?;
    if !components.is_empty() {
        let lower =
            analysis::evaluate_power(&series.with_side(Side::Power), &cert.witnesses[0].coords())?
                .norm();
        if (lower - summary[3]).abs() > 1e-9 * summary[3].max(1.0) {
            return Err(CliError::CertificateFailed(format!(
                "summary lower bound {} not reproduced (got {lower})",
                summary[3]
            )));
        }
        if (upper - summary[4]).abs() > 1e-9 * summary[4].max(1.0) {
            return Err(CliError::CertificateFailed("summary upper bound mismatch".into()));
        }
    }
    let lambda_abs: f64 = lambda.iter().map(|l| l.norm()).sum();
    let target = lambda_abs * truncation;
    if (target - summary[5]).abs() > 1e-12 * target.max(1.0) {
        return Err(CliError::CertificateFailed("summary target mismatch".into()));
    }
    let verdict = l1_verdict(&cert.params, &cert.columns, &cert.rows, cert.tolerance);
    if verdict != cert.verdict {
        return Err(CliError::CertificateFailed(format!(
            "stored verdict {:?} but rows imply {verdict:?}",
            cert.verdict
        )));
    }
    Ok(())
}

fn load_lambda(cert: &Certificate) -> CliResult<Vec<Complex64>> {
    let raw = cert
        .params
        .get("lambda")
        .and_then(|v| v.as_array())
        .ok_or_else(|| CliError::Invalid("certificate missing lambda".into()))?;
    raw.iter()
        .map(|pair| {
            let p = pair
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| CliError::Invalid("malformed lambda entry".into()))?;
            Ok(Complex64::new(
                p[0].as_f64().unwrap_or(0.0),
                p[1].as_f64().unwrap_or(0.0),
            ))
        })
        .collect()
}

fn load_lambdas(cert: &Certificate) -> CliResult<Vec<Vec<Complex64>>> {
    let raw = cert
        .params
        .get("lambdas")
        .and_then(|v| v.as_array())
        .ok_or_else(|| CliError::Invalid("certificate missing lambdas".into()))?;
    raw.iter()
        .map(|lam| {
            let entries = lam
                .as_array()
                .ok_or_else(|| CliError::Invalid("malformed lambda sample".into()))?;
            entries
                .iter()
                .map(|pair| {
                    let p = pair
                        .as_array()
                        .filter(|a| a.len() == 2)
                        .ok_or_else(|| CliError::Invalid("malformed lambda entry".into()))?;
                    Ok(Complex64::new(
                        p[0].as_f64().unwrap_or(0.0),
                        p[1].as_f64().unwrap_or(0.0),
                    ))
                })
                .collect()
        })
        .collect()
}

fn verify_membership(
    table: &PrimeTable,
    series: &SparseSeries,
    cert: &Certificate,
) -> CliResult<()> {
    let lambdas = load_lambdas(cert)?;
    let query = MembershipQuery::new(
        param_u64(cert, "j")? as u32,
        param_u64(cert, "k")? as u32,
        param_f64(cert, "ell")?,
        param_u64(cert, "m")? as u32,
    )?;
    let recomputed = bohrstrip_core::membership_witness(
        table,
        series,
        &query,
        &lambdas,
        &Budget::default(),
        cert.inputs_digest.clone(),
    )?;
    rows_match(&recomputed.rows, &cert.rows, 1e-12).map_err(CliError::CertificateFailed)?;
    if recomputed.verdict != cert.verdict {
        return Err(CliError::CertificateFailed(format!(
            "stored verdict {:?} but recomputation gives {:?}",
            cert.verdict, recomputed.verdict
        )));
    }
    Ok(())
}

fn verify_inequality(
    table: &PrimeTable,
    series: &SparseSeries,
    cert: &Certificate,
    cert_dir: &Path,
) -> CliResult<()> {
    let d2 = load_component(cert_dir, cert, "d2")?;
    let lambdas = load_lambdas(cert)?;
    let delta_m = param_f64(cert, "delta_m")?;
    let prefactor = param_f64(cert, "prefactor")?;
    let w = param_u64(cert, "w")? as u32;
    let k = param_u64(cert, "k")? as u32;
    let d2_blocks = cert
        .params
        .get("d2_scheme")
        .and_then(|s| s.get("blocks"))
        .and_then(|b| b.as_u64())
        .ok_or_else(|| CliError::Invalid("certificate missing d2 scheme".into()))? as usize;
    let schedule = inequality_schedule(table, &d2, d2_blocks, w * k)?;
    let budget = Budget::default();

    let mut rows = Vec::new();
    let mut ok = true;
    for (li, lam) in lambdas.iter().enumerate() {
        let d_lambda = series.combine(lam, &budget)?;
        let lam_k = lam.last().map(|l| l.norm()).unwrap_or(0.0);
        let mut caps = schedule.clone();
        if let Some(max_idx) = analysis::terms_by_index(table, &d_lambda)?.last() {
            caps.push(max_idx.0.clone());
        }
        caps.sort();
        caps.dedup();
        for (ni, n_cap) in caps.iter().enumerate() {
            let lhs = analysis::partial_abs_sum(table, &d_lambda, delta_m, n_cap)?;
            let rhs = prefactor * lam_k * analysis::partial_abs_sum(table, &d2, delta_m, n_cap)?;
            ok &= lhs >= rhs * (1.0 - cert.tolerance);
            rows.push(vec![li as f64, ni as f64, big_log10(n_cap), lhs, rhs]);
        }
    }
    rows_match(&rows, &cert.rows, 1e-12).map_err(CliError::CertificateFailed)?;
    let verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    if verdict != cert.verdict {
        return Err(CliError::CertificateFailed(format!(
            "stored verdict {:?} but rows imply {verdict:?}",
            cert.verdict
        )));
    }
    Ok(())
}
