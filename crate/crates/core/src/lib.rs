//! Simplicity bias in digitized trajectories of the random logistic map.
//!
//! The crate samples trajectories of `x_{k+1} = mu x_k (1 - x_k) + omega_k`
//! with `omega_k ~ U[-eps, eps]`, thresholds them at 0.5 into short binary
//! strings, and studies how the empirical probability of each string relates
//! to its Lempel-Ziv based complexity estimate.
//!
//! Pipeline:
//!
//! ```text
//! map_engine ──> symbolizer ──> estimator ──> Dataset / BoundFit / BiasMetrics
//!                                  │
//!                              complexity (N_w, C_LZ, K~)
//! ```
//!
//! The [`induction`] module holds the two closed-form next-bit predictors
//! (Laplace's rule of succession and the algorithmic-probability predictor)
//! together with the transition-index computation for astronomically small
//! initial conditions. [`cli`] wires everything into the `simbias` binary.
//!
//! Runnable walkthroughs for each capability live in `examples/`:
//!
//! ```bash
//! cargo run --release -p simbias --example trajectories
//! cargo run --release -p simbias --example simplicity_bias
//! ```

pub mod cli;
pub mod complexity;
pub mod error;
pub mod estimator;
pub mod induction;
pub mod map_engine;
pub mod symbolizer;

pub use complexity::{c_lz, k_tilde, lz76_phrase_count, ComplexityScale, IntegerDescriptor, MaxMethod};
pub use error::{Error, Result};
pub use estimator::{
    bias_metrics, bound_curve, build_dataset, fit_upper_bound, sample_distribution, BiasMetrics, BoundFit, Dataset,
    DatasetRow, FitOptions, FrequencyTable,
};
pub use induction::{compare_predictors, PredictionReport, RunScenario};
pub use map_engine::{BoundaryPolicy, MapParams, RealTrajectory, RngStream};
pub use symbolizer::{digitize, SymbolString};
