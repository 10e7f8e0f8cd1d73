//! Run configurations. A run is reproducible from its config plus seed; the
//! effective (post-override) config is hashed into every certificate.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default = "default_max_terms")]
    pub max_terms: u64,
    #[serde(default = "default_max_seconds")]
    pub max_seconds: f64,
}

fn default_max_terms() -> u64 {
    2_000_000
}

fn default_max_seconds() -> f64 {
    300.0
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_terms: default_max_terms(),
            max_seconds: default_max_seconds(),
        }
    }
}

impl Budgets {
    /// Environment override for the term budget.
    pub fn with_env(mut self) -> Self {
        if let Ok(v) = std::env::var("BOHRSTRIP_MAX_TERMS") {
            if let Ok(n) = v.parse::<u64>() {
                self.max_terms = n;
            }
        }
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructConfig {
    #[serde(default = "d_m")]
    pub m: u32,
    #[serde(default = "d_p")]
    pub p: u64,
    #[serde(default = "d_blocks")]
    pub blocks: usize,
    #[serde(default = "d_eps")]
    pub epsilon: f64,
    #[serde(default = "d_one")]
    pub u: u64,
    #[serde(default = "d_one")]
    pub v: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "d_samples")]
    pub samples: usize,
    #[serde(default)]
    pub budgets: Budgets,
}

fn d_m() -> u32 {
    2
}
fn d_p() -> u64 {
    5
}
fn d_blocks() -> usize {
    4
}
fn d_eps() -> f64 {
    0.5
}
fn d_one() -> u64 {
    1
}
fn d_samples() -> usize {
    32
}

impl Default for ConstructConfig {
    fn default() -> Self {
        serde_json::from_value(serde_json::json!({})).expect("defaults")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbedConfig {
    /// "l1" or "l2"
    pub kind: String,
    /// coefficients as [re, im] pairs
    pub lambda: Vec<[f64; 2]>,
    #[serde(default = "d_m_max")]
    pub m_max: u32,
    #[serde(default = "d_embed_blocks")]
    pub blocks: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "d_samples")]
    pub samples: usize,
    #[serde(default)]
    pub budgets: Budgets,
}

fn d_m_max() -> u32 {
    4
}
fn d_embed_blocks() -> usize {
    2
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaConfig {
    pub u: u64,
    pub v: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbConfig {
    #[serde(default = "d_one_u32")]
    pub j: u32,
    #[serde(default = "d_k")]
    pub k: u32,
    #[serde(default = "d_ell")]
    pub ell: f64,
    #[serde(default = "d_m")]
    pub m: u32,
    #[serde(default = "d_eps")]
    pub epsilon: f64,
    #[serde(default = "d_theta")]
    pub theta: ThetaConfig,
    /// base polynomial as a series document; None selects the built-in
    /// default 1 + 2*3^{-s} + 2*5^{-s}
    #[serde(default)]
    pub d1: Option<serde_json::Value>,
    #[serde(default = "d_one_usize")]
    pub d2_blocks: usize,
    #[serde(default = "d_lambda_samples")]
    pub lambda_samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub budgets: Budgets,
}

fn d_one_u32() -> u32 {
    1
}
fn d_k() -> u32 {
    2
}
fn d_ell() -> f64 {
    10.0
}
fn d_theta() -> ThetaConfig {
    ThetaConfig { u: 1, v: 1 }
}
fn d_one_usize() -> usize {
    1
}
fn d_lambda_samples() -> usize {
    32
}

impl Default for PerturbConfig {
    fn default() -> Self {
        serde_json::from_value(serde_json::json!({})).expect("defaults")
    }
}
