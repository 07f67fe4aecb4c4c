//! Simulation and verification of heavy-tailed partial-sum functionals
//! `Σ f(S_{i-1}) X_{n,i}` against their limits `∫ f(Z(s-)) dZ(s)`, where `Z`
//! is an α-stable Lévy process.
//!
//! The crate is organised bottom-up:
//!
//! * [`heavy_tail_model`]: sampled law, limit Lévy measure, truncation function, `b_n`/`c_n`.
//! * [`partial_sum_engine`]: pre-limit step paths `S_n`, `Y_n` (and the ε-truncated variant).
//! * [`stable_limit_sim`]: Poisson construction of the limit, Euler stochastic integral,
//!   limit characteristics.
//! * [`prelimit_characteristics`]: pre-limit characteristics and vague-convergence checks.
//! * [`diagnostics`]: KS, empirical characteristic functions, Hill, QQ.
//! * [`harness`]: experiment configuration, seeded replication, reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coefficients;
pub mod diagnostics;
pub mod error;
pub mod functional;
pub mod harness;
pub mod heavy_tail_model;
pub mod partial_sum_engine;
pub mod path;
pub mod prelimit_characteristics;
pub mod quadrature;
pub mod stable_limit_sim;

pub use coefficients::TestFunction;
pub use diagnostics::{KsLevel, KsResult};
pub use error::{Error, Result};
pub use functional::{FunctionalF, FunctionalTag};
pub use harness::{ExperimentConfig, ExperimentReport, OutputFormat, Regime};
pub use heavy_tail_model::{
    LevyMeasure, MagnitudeRange, ScalingConstants, TailLaw, TailSide, TruncationFn, TruncationShape,
};
pub use partial_sum_engine::{IndicatorScale, TruncatedScaling};
pub use path::StepPath;
pub use prelimit_characteristics::{KernelLaw, PreLimitKernel};
pub use stable_limit_sim::{CharTriplet, JumpRecord, LimitPathConfig, LimitRegime};
