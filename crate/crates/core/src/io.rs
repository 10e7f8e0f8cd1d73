//! Exchange formats.
//!
//! Series JSON: {"side":"dirichlet|power","terms":[{"alpha":[[pos,exp],...],
//! "re":x,"im":y},...]} with alpha pairs sorted by position. The loader
//! rejects duplicate alphas, unsorted or duplicated positions, zero
//! exponents, and exactly-zero coefficients.
//!
//! Polynomial input: a JSON list of {"exponents":[e_1..e_N],"re":..,"im":..}.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::series::{Side, SparseSeries};

#[derive(Serialize, Deserialize)]
struct TermJson {
    alpha: Vec<(u64, u32)>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    side: String,
    terms: Vec<TermJson>,
}

pub fn series_to_json(series: &SparseSeries) -> serde_json::Value {
    let doc = SeriesJson {
        side: series.side().as_str().to_string(),
        terms: series
            .terms()
            .map(|(alpha, c)| TermJson {
                alpha: alpha.entries().to_vec(),
                re: c.re,
                im: c.im,
            })
            .collect(),
    };
    serde_json::to_value(doc).expect("series serialization")
}

pub fn series_to_string(series: &SparseSeries) -> String {
    let mut s = serde_json::to_string_pretty(&series_to_json(series)).expect("series json");
    s.push('\n');
    s
}

pub fn series_from_json(value: &serde_json::Value) -> Result<SparseSeries> {
    let doc: SeriesJson = serde_json::from_value(value.clone())
        .map_err(|e| Error::InvalidSeries(format!("malformed series document: {e}")))?;
    let side = Side::parse(&doc.side)?;
    let mut terms: Vec<(MultiIndex, Complex64)> = Vec::with_capacity(doc.terms.len());
    let mut seen = std::collections::BTreeSet::new();
    for term in &doc.terms {
        let mut last_pos = 0u64;
        for &(pos, exp) in &term.alpha {
            if pos == 0 {
                return Err(Error::InvalidSeries("positions are 1-based".into()));
            }
            if exp == 0 {
                return Err(Error::InvalidSeries(
                    "zero exponents must not be stored".into(),
                ));
            }
            if pos <= last_pos {
                return Err(Error::InvalidSeries(
                    "alpha positions must be strictly ascending".into(),
                ));
            }
            last_pos = pos;
        }
        let alpha = MultiIndex::from_pairs(term.alpha.iter().copied());
        if !seen.insert(alpha.clone()) {
            return Err(Error::InvalidSeries(format!(
                "duplicate alpha {alpha:?} in series file"
            )));
        }
        let c = Complex64::new(term.re, term.im);
        if c == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidSeries(
                "exactly-zero coefficients must not be stored".into(),
            ));
        }
        terms.push((alpha, c));
    }
    Ok(SparseSeries::from_terms(side, terms))
}

pub fn series_from_str(s: &str) -> Result<SparseSeries> {
    let value: serde_json::Value = serde_json::from_str(s)
        .map_err(|e| Error::InvalidSeries(format!("invalid JSON: {e}")))?;
    series_from_json(&value)
}

/// A polynomial in N commuting variables, no implicit constant handling.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    /// (exponents per variable, coefficient)
    pub terms: Vec<(Vec<u32>, Complex64)>,
}

#[derive(Serialize, Deserialize)]
struct PolyTermJson {
    exponents: Vec<u32>,
    re: f64,
    im: f64,
}

impl Polynomial {
    pub fn from_terms(terms: Vec<(Vec<u32>, Complex64)>) -> Polynomial {
        Polynomial { terms }
    }

    pub fn num_variables(&self) -> usize {
        self.terms.iter().map(|(e, _)| e.len()).max().unwrap_or(0)
    }

    pub fn has_constant_term(&self) -> bool {
        self.terms
            .iter()
            .any(|(e, c)| e.iter().all(|&x| x == 0) && *c != Complex64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms
            .iter()
            .all(|(_, c)| *c == Complex64::new(0.0, 0.0))
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (exps, c) in &self.terms {
            let mut t = *c;
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    t *= x[i].powu(e);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc: Vec<PolyTermJson> = self
            .terms
            .iter()
            .map(|(e, c)| PolyTermJson {
                exponents: e.clone(),
                re: c.re,
                im: c.im,
            })
            .collect();
        serde_json::to_value(doc).expect("polynomial serialization")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Polynomial> {
        let doc: Vec<PolyTermJson> = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidSeries(format!("malformed polynomial: {e}")))?;
        Ok(Polynomial {
            terms: doc
                .into_iter()
                .map(|t| (t.exponents, Complex64::new(t.re, t.im)))
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SparseSeries {
        SparseSeries::from_terms(
            Side::Dirichlet,
            [
                (MultiIndex::unit(), Complex64::new(1.0, 0.0)),
                (
                    MultiIndex::from_pairs([(1, 2), (3, 1)]),
                    Complex64::new(-0.5, 0.25),
                ),
            ],
        )
    }

    #[test]
    fn round_trip() {
        let s = sample();
        let text = series_to_string(&s);
        let back = series_from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn serialization_is_deterministic() {
        let a = series_to_string(&sample());
        let b = series_to_string(&sample());
        assert_eq!(a, b);
    }

    #[test]
    fn loader_rejects_duplicates() {
        let bad = r#"{"side":"dirichlet","terms":[
            {"alpha":[[1,1]],"re":1.0,"im":0.0},
            {"alpha":[[1,1]],"re":2.0,"im":0.0}]}"#;
        assert!(matches!(
            series_from_str(bad),
            Err(Error::InvalidSeries(_))
        ));
    }

    #[test]
    fn loader_rejects_malformed_alpha() {
        for bad in [
            r#"{"side":"power","terms":[{"alpha":[[2,1],[1,1]],"re":1.0,"im":0.0}]}"#,
            r#"{"side":"power","terms":[{"alpha":[[1,0]],"re":1.0,"im":0.0}]}"#,
            r#"{"side":"power","terms":[{"alpha":[[0,1]],"re":1.0,"im":0.0}]}"#,
            r#"{"side":"weird","terms":[]}"#,
            r#"{"side":"power","terms":[{"alpha":[[1,1]],"re":0.0,"im":0.0}]}"#,
        ] {
            assert!(series_from_str(bad).is_err(), "accepted: {bad}");
        }
    }

    #[test]
    fn polynomial_round_trip_and_eval() {
        // x^2 + (1+i) y, no constant term
        let q = Polynomial::from_terms(vec![
            (vec![2, 0], Complex64::new(1.0, 0.0)),
            (vec![0, 1], Complex64::new(1.0, 1.0)),
        ]);
        assert!(!q.has_constant_term());
        let back = Polynomial::from_json(&q.to_json()).unwrap();
        assert_eq!(back, q);
        let v = q.eval_complex(&[Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)]);
        assert!((v - Complex64::new(3.0, 1.0)).norm() < 1e-15);
    }
}
