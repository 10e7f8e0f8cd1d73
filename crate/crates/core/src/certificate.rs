//! Machine-readable verification records.
//!
//! A certificate carries a numeric table (also embedded as CSV), the
//! tolerance it was judged at, kind-specific parameters, and a verdict that
//! is recomputable from the stored data alone. Components produced alongside
//! a main series (normalized blocks, generators) are referenced by relative
//! path plus SHA-256 so a verifier can reload them.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::TorusPoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertKind {
    Growth,
    IsometryL1,
    IsometryL2,
    Orthonormality,
    NormBound,
    Disjointness,
    Membership,
    GrowthInequality,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// witness searches are one-sided: not finding one disproves nothing
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentRef {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertKind,
    /// hash of the generating parameters and seed
    pub inputs_digest: String,
    pub tolerance: f64,
    /// kind-specific constants needed to recompute the verdict
    pub params: serde_json::Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// the same table as CSV, for human-facing tooling
    pub rows_csv: String,
    pub verdict: Verdict,
    /// witness points on the polytorus, when the kind uses them
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<TorusPoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<ComponentRef>,
}

impl Certificate {
    pub fn new(
        kind: CertKind,
        inputs_digest: String,
        tolerance: f64,
        params: serde_json::Value,
        columns: Vec<String>,
        rows: Vec<Vec<f64>>,
        verdict: Verdict,
    ) -> Certificate {
        let rows_csv = to_csv(&columns, &rows);
        Certificate {
            kind,
            inputs_digest,
            tolerance,
            params,
            columns,
            rows,
            rows_csv,
            verdict,
            witnesses: Vec::new(),
            components: Vec::new(),
        }
    }

    pub fn param_f64(&self, key: &str) -> Option<f64> {
        self.params.get(key).and_then(|v| v.as_f64())
    }

    pub fn param_u64(&self, key: &str) -> Option<u64> {
        self.params.get(key).and_then(|v| v.as_u64())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

pub fn to_csv(columns: &[String], rows: &[Vec<f64>]) -> String {
    let mut s = columns.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Growth-table CSV in the fixed exchange format.
pub fn growth_table_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut s = String::from("N_log10,sigma,A_N\n");
    for (n_log10, sigma, a_n) in rows {
        s.push_str(&format!("{n_log10},{sigma},{a_n}\n"));
    }
    s
}

/// SHA-256 hex digest of a canonical JSON serialization.
pub fn digest_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("digest serialization");
    let mut h = Sha256::new();
    h.update(&bytes);
    hex::encode(h.finalize())
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_shape() {
        let cols = vec!["k".to_string(), "value".to_string()];
        let rows = vec![vec![1.0, 0.5], vec![2.0, 0.25]];
        let cert = Certificate::new(
            CertKind::Growth,
            "digest".into(),
            1e-9,
            serde_json::json!({"p": 5}),
            cols,
            rows,
            Verdict::Pass,
        );
        assert_eq!(cert.rows_csv, "k,value\n1,0.5\n2,0.25\n");
        let json = serde_json::to_string(&cert).unwrap();
        let back: Certificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back.rows, cert.rows);
        assert_eq!(back.verdict, Verdict::Pass);
    }

    #[test]
    fn growth_csv_header_is_fixed() {
        let csv = growth_table_csv(&[(0.5, 0.25, 1.25)]);
        assert!(csv.starts_with("N_log10,sigma,A_N\n"));
    }

    #[test]
    fn digests_are_stable() {
        let a = digest_json(&serde_json::json!({"b": 1, "a": 2}));
        let b = digest_json(&serde_json::json!({"a": 2, "b": 1}));
        assert_eq!(a, b, "serde_json maps are sorted, digests canonical");
    }
}
