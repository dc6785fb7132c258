//! hp-adaptive numerical quadrature.
//!
//! Subintervals are bisected where the integrand looks rough and get more
//! Gauss-Legendre points where it looks smooth. The smoothness estimate comes
//! from the two highest Legendre coefficients of the local interpolant and
//! costs no extra integrand evaluations.
//!
//! ```
//! use hpquad::{AdaptiveConfig, HpIntegrator, Scalar};
//!
//! let integrator = HpIntegrator::new(AdaptiveConfig::default()).unwrap();
//! let r = integrator.integrate(&Scalar(f64::exp), 0.0, 1.0).unwrap();
//! assert!((r.value - (std::f64::consts::E - 1.0)).abs() < 1e-14);
//! ```

pub mod adaptive;
pub mod error;
pub mod integrand;
pub mod presets;
pub mod simpson;
pub mod smoothness;
pub mod tables;

pub use adaptive::{
    accept_test, apply_refinement, decide_refinement, hprefine_pass, integrate, scale_iguess,
    segment_quadrature, AdaptiveConfig, ForcedAcceptance, ForcedReason, HpIntegrator, HpMesh,
    IntegrationResult, IntegrationStats, MeshEntry, PassOutcome, PassReport, Refined, Refinement,
    Segment,
};
pub use error::{QuadError, Result};
pub use integrand::{EvalCounts, Evaluator, Scalar, VectorIntegrand};
pub use presets::Preset;
pub use simpson::{simpson_adaptive, SimpsonResult, SimpsonStats};
pub use smoothness::{indicator, indicator_direct_oracle, xi_from_values, SmoothnessScore};
pub use tables::{build_tables, gauss_legendre_rule, legendre_eval, GaussRule, RuleTables, P_MIN};
