//! Sparse arithmetic for formal Dirichlet series and their power-series
//! counterparts under the multi-index identification n = p^alpha, plus the
//! explicit block constructions, sequence-space embeddings, and density
//! perturbations that come with numeric certificates.
//!
//! The crate is organized around one invariant: a series is a finite map
//! from multi-indices to complex coefficients, and multiplication is
//! multi-index addition on either side of the identification. Everything
//! else (norms, partial sums, block schemes, witnesses) is built over that.

pub mod algebra;
pub mod analysis;
pub mod certificate;
pub mod construct;
pub mod dd;
pub mod embed;
pub mod error;
pub mod gf;
pub mod io;
pub mod multiindex;
pub mod perturb;
pub mod primes;
pub mod series;
pub mod theta;
pub mod unimodular;

pub use analysis::{
    abs_sum, bohr_cahen_sigma_a, evaluate_dirichlet, evaluate_power, h2_inner, h2_norm,
    partial_abs_sum, sup_norm_estimate, AbscissaEstimate, NormEstimate, TorusPoint,
};
pub use certificate::{CertKind, Certificate, ComponentRef, Verdict};
pub use construct::{
    certify_growth, make_dkm, make_p, make_qk, weight_sequence, ConstructionParams,
    GeneratorOptions, NormKind,
};
pub use embed::{embed_l1, embed_l2, EmbedComponent, EmbedOutcome};
pub use error::{Error, Result};
pub use multiindex::MultiIndex;
pub use perturb::{
    density_perturbation, growth_inequality_certificate, membership_witness, w_exponent,
    MembershipQuery, PerturbationResult,
};
pub use primes::{omega, PrimeTable};
pub use series::{Budget, Side, SparseSeries};
pub use theta::{disjoint_theta_family, make_blocks, BlockScheme, Theta};
