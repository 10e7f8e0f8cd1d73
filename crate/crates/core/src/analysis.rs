//! Norms, evaluation, partial-sum tables, and abscissa estimators.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dd::{self, Dd};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::primes::PrimeTable;
use crate::series::{Side, SparseSeries};

/// ln(p^alpha) = sum alpha_j ln p_j in double-double precision.
pub fn ln_index(table: &PrimeTable, alpha: &MultiIndex) -> Result<Dd> {
    let mut acc = Dd::ZERO;
    for &(pos, exp) in alpha.entries() {
        acc = acc.add(table.ln_nth_prime(pos as usize)?.mul_f64(exp as f64));
    }
    Ok(acc)
}

/// n^{-sigma} for n = p^alpha, relative error well under 1e-12 per term.
pub fn index_pow_neg(table: &PrimeTable, alpha: &MultiIndex, sigma: f64) -> Result<f64> {
    Ok(dd::exp_dd(ln_index(table, alpha)?.mul_f64(-sigma)))
}

/// Stored terms sorted by the integer value of their index.
pub fn terms_by_index(
    table: &PrimeTable,
    series: &SparseSeries,
) -> Result<Vec<(BigUint, MultiIndex, Complex64)>> {
    let mut v: Vec<(BigUint, MultiIndex, Complex64)> = Vec::with_capacity(series.num_terms());
    for (alpha, c) in series.terms() {
        v.push((table.multiindex_to_index(alpha)?, alpha.clone(), *c));
    }
    v.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(v)
}

/// A_N(D, sigma) = sum over stored terms with p^alpha <= N of |a| n^{-sigma}.
pub fn partial_abs_sum(
    table: &PrimeTable,
    series: &SparseSeries,
    sigma: f64,
    n_cap: &BigUint,
) -> Result<f64> {
    if series.side() != Side::Dirichlet {
        return Err(Error::SideMismatch(
            "partial_abs_sum needs a dirichlet-side series".into(),
        ));
    }
    let mut acc = 0.0;
    for (alpha, c) in series.terms() {
        if table.multiindex_to_index(alpha)? <= *n_cap {
            acc += c.norm() * index_pow_neg(table, alpha, sigma)?;
        }
    }
    Ok(acc)
}

/// A_infinity(D, sigma) over all stored terms (sigma = 0 gives the l1 norm).
pub fn abs_sum(table: &PrimeTable, series: &SparseSeries, sigma: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (alpha, c) in series.terms() {
        acc += c.norm() * index_pow_neg(table, alpha, sigma)?;
    }
    Ok(acc)
}

/// Hilbert-space norm: (sum |a_n|^2)^{1/2} over stored terms.
pub fn h2_norm(series: &SparseSeries) -> f64 {
    series
        .terms()
        .map(|(_, c)| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// <D, E> = sum a_n conj(b_n) over the common support.
pub fn h2_inner(a: &SparseSeries, b: &SparseSeries) -> Complex64 {
    // iterate over the smaller support
    let (small, big, conj_small) = if a.num_terms() <= b.num_terms() {
        (a, b, false)
    } else {
        (b, a, true)
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (alpha, c) in small.terms() {
        let d = big.coeff(alpha);
        if d != Complex64::new(0.0, 0.0) {
            acc += if conj_small { d * c.conj() } else { c * d.conj() };
        }
    }
    acc
}

/// Evaluate a dirichlet-side series at s with Re s >= 0.
pub fn evaluate_dirichlet(
    table: &PrimeTable,
    series: &SparseSeries,
    s: Complex64,
) -> Result<Complex64> {
    if series.side() != Side::Dirichlet {
        return Err(Error::SideMismatch("expected dirichlet side".into()));
    }
    if s.re < 0.0 {
        return Err(Error::InvalidParameter(
            "evaluation requires Re s >= 0".into(),
        ));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (alpha, c) in series.terms() {
        let ln_n = ln_index(table, alpha)?;
        let modulus = dd::exp_dd(ln_n.mul_f64(-s.re));
        let phase = dd::mod_two_pi(ln_n.mul_f64(-s.im));
        acc += c * Complex64::from_polar(modulus, phase);
    }
    Ok(acc)
}

/// Evaluate a power-side series at a point of the closed unit polydisc.
/// Every support position must have a coordinate.
pub fn evaluate_power(
    series: &SparseSeries,
    point: &BTreeMap<u64, Complex64>,
) -> Result<Complex64> {
    if series.side() != Side::Power {
        return Err(Error::SideMismatch("expected power side".into()));
    }
    for (&pos, z) in point {
        if z.norm() > 1.0 + 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "coordinate at position {pos} lies outside the closed unit disc"
            )));
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (alpha, c) in series.terms() {
        let mut term = *c;
        for &(pos, exp) in alpha.entries() {
            let z = point.get(&pos).ok_or(Error::MissingCoordinate(pos))?;
            term *= z.powu(exp);
        }
        acc += term;
    }
    Ok(acc)
}

/// A point of the polytorus, stored as phases per position.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct TorusPoint {
    pub phases: BTreeMap<u64, f64>,
}

impl TorusPoint {
    pub fn coords(&self) -> BTreeMap<u64, Complex64> {
        self.phases
            .iter()
            .map(|(&p, &t)| (p, Complex64::from_polar(1.0, t)))
            .collect()
    }

    /// Rotate every listed position by the same phase.
    pub fn rotate_positions(&mut self, positions: &[u64], delta: f64) {
        for p in positions {
            if let Some(t) = self.phases.get_mut(p) {
                *t += delta;
            }
        }
    }
}

/// Lower/upper sup-norm sandwich with the best witness point found.
#[derive(Clone, Debug)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub witness: TorusPoint,
}

/// Sandwich estimate of sup |D| on the polytorus.
///
/// lower: max |D(z)| over the zero-phase point, seeded random points, the
/// caller's extra starts, and (when cheap) a coordinate-ascent refinement.
/// upper: the coefficient-modulus sum (triangle inequality).
pub fn sup_norm_estimate(
    series: &SparseSeries,
    samples: usize,
    seed: u64,
) -> Result<NormEstimate> {
    sup_norm_estimate_with_starts(series, samples, seed, &[])
}

pub fn sup_norm_estimate_with_starts(
    series: &SparseSeries,
    samples: usize,
    seed: u64,
    starts: &[TorusPoint],
) -> Result<NormEstimate> {
    let power = match series.side() {
        Side::Power => series.clone(),
        Side::Dirichlet => series.with_side(Side::Power),
    };
    let positions: Vec<u64> = power.support_positions().into_iter().collect();
    let upper = power.coeff_abs_sum();
    if power.is_zero() {
        return Ok(NormEstimate {
            lower: 0.0,
            upper,
            witness: TorusPoint::default(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<TorusPoint> = Vec::with_capacity(samples + 1 + starts.len());
    candidates.push(TorusPoint {
        phases: positions.iter().map(|&p| (p, 0.0)).collect(),
    });
    candidates.extend_from_slice(starts);
    for _ in 0..samples {
        candidates.push(TorusPoint {
            phases: positions
                .iter()
                .map(|&p| (p, rng.gen::<f64>() * std::f64::consts::TAU))
                .collect(),
        });
    }

    let mut best_val = -1.0;
    let mut best_pt = candidates[0].clone();
    for pt in &candidates {
        let v = evaluate_power(&power, &pt.coords())?.norm();
        if v > best_val {
            best_val = v;
            best_pt = pt.clone();
        }
    }

    // single-coordinate sweeps on the best candidate, when cheap enough
    let cost = power.num_terms() as u128 * positions.len() as u128;
    if cost <= 2_000_000 {
        const GRID: usize = 32;
        for _sweep in 0..3 {
            let mut improved = false;
            for &pos in &positions {
                let mut coords = best_pt.coords();
                // group the series by the exponent at `pos`
                let mut by_exp: BTreeMap<u32, Complex64> = BTreeMap::new();
                for (alpha, c) in power.terms() {
                    let e = alpha.exponent_at(pos);
                    let mut partial = *c;
                    for &(p2, e2) in alpha.entries() {
                        if p2 != pos {
                            partial *= coords[&p2].powu(e2);
                        }
                    }
                    *by_exp.entry(e).or_insert(Complex64::new(0.0, 0.0)) += partial;
                }
                let mut local_best = (best_val, best_pt.phases[&pos]);
                for g in 0..GRID {
                    let theta = g as f64 * std::f64::consts::TAU / GRID as f64;
                    let z = Complex64::from_polar(1.0, theta);
                    let v: Complex64 = by_exp.iter().map(|(&e, a)| a * z.powu(e)).sum();
                    if v.norm() > local_best.0 + 1e-15 {
                        local_best = (v.norm(), theta);
                    }
                }
                if local_best.0 > best_val {
                    best_val = local_best.0;
                    best_pt.phases.insert(pos, local_best.1);
                    improved = true;
                }
                coords.insert(pos, Complex64::from_polar(1.0, best_pt.phases[&pos]));
            }
            if !improved {
                break;
            }
        }
    }

    Ok(NormEstimate {
        lower: best_val,
        upper,
        witness: best_pt,
    })
}

/// Estimates around the abscissa of absolute convergence on a truncation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbscissaEstimate {
    /// best registered divergence witness: sigma_a >= this (if any)
    pub sigma_a_lower: Option<f64>,
    /// limsup-slope estimate log A_N / log N over the stored support
    pub sigma_a_bohr_cahen: f64,
    /// the sigma at which a divergence certificate was registered
    pub certificate_sigma: Option<f64>,
    /// (log10 N, A_N(D, 0)) at the stored support points, ascending
    pub table: Vec<(f64, f64)>,
    /// always true here: every series handled is a finite truncation
    pub truncated: bool,
}

impl AbscissaEstimate {
    pub fn register_divergence(&mut self, sigma: f64) {
        self.certificate_sigma = Some(sigma);
        self.sigma_a_lower = Some(match self.sigma_a_lower {
            Some(cur) => cur.max(sigma),
            None => sigma,
        });
    }
}

/// Slope estimate for sigma_a from the coefficient partial sums:
/// least-squares fit of log A_N against log N over the support points.
pub fn bohr_cahen_sigma_a(
    table: &PrimeTable,
    series: &SparseSeries,
) -> Result<AbscissaEstimate> {
    if series.side() != Side::Dirichlet || series.is_zero() {
        return Err(Error::InvalidParameter(
            "estimator needs a nonempty dirichlet-side series".into(),
        ));
    }
    let sorted = terms_by_index(table, series)?;
    let ln10 = std::f64::consts::LN_10;
    let mut rows: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    let mut running = 0.0f64;
    for (_, alpha, c) in &sorted {
        running += c.norm();
        let log10_n = ln_index(table, alpha)?.to_f64() / ln10;
        rows.push((log10_n, running));
    }
    // regression over points with N >= 2 and A_N > 0
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(l, a)| *l > 0.0 && *a > 0.0)
        .map(|(l, a)| (l * ln10, a.ln()))
        .collect();
    let slope = if pts.len() < 2 {
        0.0
    } else {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        if denom.abs() < 1e-12 {
            0.0
        } else {
            (n * sxy - sx * sy) / denom
        }
    };
    Ok(AbscissaEstimate {
        sigma_a_lower: None,
        sigma_a_bohr_cahen: slope,
        certificate_sigma: None,
        table: rows,
        truncated: true,
    })
}
