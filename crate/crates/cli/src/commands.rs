//! The construct / embed / perturb pipelines.

use std::path::Path;

use num_complex::Complex64;
use serde_json::json;

use bohrstrip_core::certificate::{digest_json, growth_table_csv, CertKind, Certificate};
use bohrstrip_core::io::series_from_json;
use bohrstrip_core::perturb::sample_lambda_region;
use bohrstrip_core::series::Side;
use bohrstrip_core::{
    analysis, certify_growth, density_perturbation, embed_l1, embed_l2,
    growth_inequality_certificate, make_p, membership_witness, Budget, ConstructionParams,
    GeneratorOptions, MembershipQuery, MultiIndex, PrimeTable, SparseSeries, Theta, Verdict,
};

use crate::config::{ConstructConfig, EmbedConfig, PerturbConfig};
use crate::output::{
    write_certificate, write_component, write_series, write_text, CliError, CliResult, Deadline,
};

fn verdict_ok(v: Verdict) -> CliResult<()> {
    match v {
        Verdict::Pass => Ok(()),
        Verdict::Fail => Err(CliError::CertificateFailed(
            "certificate verdict: fail".into(),
        )),
        Verdict::Inconclusive => Err(CliError::CertificateFailed(
            "certificate verdict: inconclusive (witness search exhausted)".into(),
        )),
    }
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn cmd_construct(config: &ConstructConfig, out: &Path) -> CliResult<()> {
    let budgets = config.budgets.clone().with_env();
    let deadline = Deadline::new(budgets.max_seconds);
    let table = PrimeTable::shared();
    let digest = digest_json(config);

    // coefficient-count estimate before building anything
    let mut estimated: u128 = 0;
    for k in 1..=config.blocks as u32 {
        let q = (config.p as u128).pow(k);
        if q > u64::MAX as u128 {
            return Err(CliError::Invalid("block size overflows".into()));
        }
        estimated += binomial_u128(q as u64 + config.m as u64 - 1, config.m as u64);
    }
    if estimated > budgets.max_terms as u128 {
        return Err(CliError::Budget(format!(
            "construction needs ~{estimated} terms, budget is {}",
            budgets.max_terms
        )));
    }

    let params = ConstructionParams::derive(
        config.m,
        config.p,
        config.blocks,
        config.epsilon,
        config.u,
        config.v,
    )?;
    let scheme = params.scheme()?;
    let p_series = make_p(&scheme, &params)?;
    deadline.check()?;

    let growth = certify_growth(table, &p_series, &scheme, &params, 1.0, None, digest.clone())?;
    deadline.check()?;

    // norm-discipline certificate: sampled sup of every block component and
    // of the whole sum against the trusted caps
    let safety = 1.05;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut witnesses = Vec::new();
    let est_p = analysis::sup_norm_estimate(&p_series, config.samples, config.seed)?;
    let pi2_6 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
    rows.push(vec![0.0, est_p.lower, pi2_6 * safety, est_p.upper]);
    witnesses.push(est_p.witness);
    for k in 1..=scheme.num_blocks() {
        let block: std::collections::BTreeSet<u64> = scheme.blocks[k - 1].iter().copied().collect();
        let restricted = SparseSeries::from_terms(
            Side::Power,
            p_series
                .terms()
                .filter(|(a, _)| a.support().iter().all(|p| block.contains(p)))
                .map(|(a, c)| (a.clone(), *c)),
        );
        let est = analysis::sup_norm_estimate(&restricted, config.samples, config.seed ^ k as u64)?;
        let cap = safety / (k * k) as f64;
        rows.push(vec![k as f64, est.lower, cap, est.upper]);
        witnesses.push(est.witness);
    }
    let norm_ok = rows.iter().all(|r| r[1] <= r[2] * (1.0 + 1e-12));
    let mut norm_cert = Certificate::new(
        CertKind::NormBound,
        digest.clone(),
        1e-12,
        json!({
            "m": config.m,
            "p": config.p,
            "blocks": config.blocks,
            "epsilon": config.epsilon,
            "u": config.u,
            "v": config.v,
            "seed": config.seed,
            "samples": config.samples,
            "safety_factor": safety,
        }),
        ["k", "sampled_lower", "cap", "coeff_sum_upper"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
        if norm_ok { Verdict::Pass } else { Verdict::Fail },
    );
    norm_cert.witnesses = witnesses;
    deadline.check()?;

    // growth table CSV at sigma = r and sigma = 0, cumulative at the block
    // boundaries (p_maxpos^m)
    let dirichlet = p_series.with_side(Side::Dirichlet);
    let r = params.critical_exponent();
    let mut csv_rows = Vec::new();
    for k in 1..=scheme.num_blocks() {
        let pos = *scheme.blocks[k - 1].last().unwrap();
        let p_max = table.nth_prime(pos as usize)?;
        let boundary = num_bigint::BigUint::from(p_max).pow(config.m);
        let log10_n =
            analysis::ln_index(table, &MultiIndex::monomial(pos, config.m))?.to_f64()
                / std::f64::consts::LN_10;
        for sigma in [r, 0.0] {
            let a = analysis::partial_abs_sum(table, &dirichlet, sigma, &boundary)?;
            csv_rows.push((log10_n, sigma, a));
        }
    }

    write_series(&out.join("series.json"), &dirichlet)?;
    write_certificate(&out.join("certificate.json"), &growth)?;
    write_certificate(&out.join("norm_certificate.json"), &norm_cert)?;
    write_text(&out.join("growth_table.csv"), &growth_table_csv(&csv_rows))?;

    println!(
        "construct: {} terms, growth verdict {:?}, norm verdict {:?}, outputs in {}",
        dirichlet.num_terms(),
        growth.verdict,
        norm_cert.verdict,
        out.display()
    );
    verdict_ok(growth.verdict)?;
    verdict_ok(norm_cert.verdict)
}

pub fn cmd_embed(config: &EmbedConfig, out: &Path) -> CliResult<()> {
    let budgets = config.budgets.clone().with_env();
    let deadline = Deadline::new(budgets.max_seconds);
    let table = PrimeTable::shared();
    let digest = digest_json(config);
    let lambda: Vec<Complex64> = config
        .lambda
        .iter()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect();
    let opts = GeneratorOptions {
        blocks: config.blocks,
        seed: config.seed,
        samples: config.samples,
        ..Default::default()
    };

    let outcome = match config.kind.as_str() {
        "l1" => embed_l1(&lambda, config.m_max, &opts, digest.clone())?,
        "l2" => embed_l2(table, &lambda, config.m_max, &opts, digest.clone())?,
        other => {
            return Err(CliError::Invalid(format!(
                "unknown embedding kind '{other}' (expected l1 or l2)"
            )))
        }
    };
    deadline.check()?;

    write_series(&out.join("series.json"), &outcome.image)?;
    let mut cert = outcome.certificate.clone();
    for comp in &outcome.components {
        let reference = write_component(out, &comp.name, &comp.series)?;
        cert.components.push(reference);
        if let Some(growth) = &comp.growth {
            write_certificate(
                &out.join("components").join(format!("{}.growth.json", comp.name)),
                growth,
            )?;
        }
    }
    write_certificate(&out.join("certificate.json"), &cert)?;

    println!(
        "embed {}: {} components, verdict {:?}, outputs in {}",
        config.kind,
        outcome.components.len(),
        cert.verdict,
        out.display()
    );
    verdict_ok(cert.verdict)
}

pub fn default_d1() -> SparseSeries {
    SparseSeries::from_terms(
        Side::Dirichlet,
        [
            (MultiIndex::unit(), Complex64::new(1.0, 0.0)),
            (MultiIndex::var(2), Complex64::new(2.0, 0.0)),
            (MultiIndex::var(3), Complex64::new(2.0, 0.0)),
        ],
    )
}

pub fn cmd_perturb(config: &PerturbConfig, out: &Path) -> CliResult<()> {
    let budgets = config.budgets.clone().with_env();
    let deadline = Deadline::new(budgets.max_seconds);
    let table = PrimeTable::shared();
    let digest = digest_json(config);
    let budget = Budget::new(budgets.max_terms);

    let query = MembershipQuery::new(config.j, config.k, config.ell, config.m)?;
    let theta = Theta::progression(config.theta.u, config.theta.v);
    let d1 = match &config.d1 {
        Some(value) => series_from_json(value)?,
        None => default_d1(),
    };
    let opts = GeneratorOptions {
        blocks: config.d2_blocks,
        seed: config.seed,
        ..Default::default()
    };

    let result = density_perturbation(
        table,
        &d1,
        config.epsilon,
        &query,
        &theta,
        &opts,
        &budget,
        digest.clone(),
    )?;
    deadline.check()?;

    let lambdas = sample_lambda_region(&query, config.lambda_samples, config.seed);
    let membership = membership_witness(table, &result.d, &query, &lambdas, &budget, digest.clone())?;
    deadline.check()?;
    let mut inequality =
        growth_inequality_certificate(table, &result, &lambdas, &budget, digest.clone())?;
    deadline.check()?;

    write_series(&out.join("series.json"), &result.d)?;
    let refs = [
        write_component(out, "d1", &result.d1)?,
        write_component(out, "d2", &result.d2)?,
        write_component(out, "d3", &result.d3)?,
        write_component(out, "d4", &result.d4)?,
    ];
    write_certificate(&out.join("components/d2.growth.json"), &result.d2_growth)?;
    inequality.components.push(refs[1].clone());
    write_certificate(&out.join("certificate_membership.json"), &membership)?;
    write_certificate(&out.join("certificate_inequality.json"), &inequality)?;

    let perturbation_doc = json!({
        "query": { "j": config.j, "k": config.k, "ell": config.ell, "m": config.m },
        "theta": { "u": config.theta.u, "v": config.theta.v },
        "epsilon": result.epsilon,
        "w": result.w,
        "r": result.r,
        "d2_degree": result.d2_degree,
        "d2_scheme": {
            "u": result.d2_scheme.0,
            "v": result.d2_scheme.1,
            "p": result.d2_scheme.2,
            "blocks": result.d2_scheme.3,
        },
        "coeff_sum_bound": result.coeff_sum_bound,
        "sup_bound": result.sup_bound,
        "ledger": result.ledger,
        "components": refs,
    });
    write_text(
        &out.join("perturbation.json"),
        &format!("{}\n", serde_json::to_string_pretty(&perturbation_doc).unwrap()),
    )?;

    println!(
        "perturb: w = {}, membership {:?}, inequality {:?}, outputs in {}",
        result.w,
        membership.verdict,
        inequality.verdict,
        out.display()
    );
    verdict_ok(membership.verdict)?;
    verdict_ok(inequality.verdict)
}
