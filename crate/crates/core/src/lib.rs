//! Heteroskedasticity-robust inference for ANCOVA models.
//!
//! The crate fits one-way ANCOVA models in cell-means coding, tests linear
//! hypotheses about the adjusted group means with HC0/HC2 sandwich Wald
//! statistics and their Rademacher wild-bootstrap counterparts, and runs the
//! Monte Carlo studies used to compare them with the classical F test.
//!
//! The matrix, model, hypothesis, inference and bootstrap layers are generic
//! over [`Scalar`] (`f32` or `f64`); the aliases below fix them to `f64`.
//!
//! ```
//! use robust_ancova::{fit_ols, equal_means_contrast, white_test, Dataset, HcFlavor, Matrix, Vector};
//!
//! let y = Vector::from_vec(vec![1.0, 3.0, 2.5, 10.0, 20.0, 14.0]).unwrap();
//! let data = Dataset::new(y, vec![1, 1, 1, 2, 2, 2], Matrix::zeros(6, 0)).unwrap();
//! let fit = fit_ols(&data).unwrap();
//! let hyp = equal_means_contrast(2, 0).unwrap();
//! let result = white_test(&fit, &hyp, HcFlavor::HC2).unwrap();
//! assert!(result.p_value < 0.05);
//! ```

pub mod bootstrap;
pub mod distributions;
pub mod error;
pub mod hypotheses;
pub mod inference;
pub mod linalg;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod simulation;

pub use bootstrap::{wild_bootstrap_test, wild_bootstrap_with, BootstrapConfig, BootstrapResult, Multiplier, WildBootstrap};
pub use distributions::{chisq_sf, f_sf};
pub use error::{Error, Result};
pub use hypotheses::{
    centering, contrast_to_projection, equal_means_contrast, nested_projection, oneway_projection, twoway_projection,
    CrossedEffect, HypothesisKind, HypothesisSpec, NestedEffect,
};
pub use inference::{classical_f_test, sandwich, white_test, HcFlavor, Method, SandwichEstimate, TestResult};
pub use linalg::{kronecker, pseudoinverse, solve_spd, Matrix, Vector};
pub use model::{build_design, fit_ols, Dataset, FittedModel};
pub use scalar::Scalar;
pub use simulation::{
    run_power_study, run_type1_study, ErrorDistribution, PowerPoint, Scale, SimulationReport, SimulationScenario,
    VarianceScenario,
};

pub type Matrix64 = Matrix<f64>;
pub type Vector64 = Vector<f64>;
pub type Dataset64 = Dataset<f64>;
pub type FittedModel64 = FittedModel<f64>;
pub type HypothesisSpec64 = HypothesisSpec<f64>;
pub type Matrix32 = Matrix<f32>;
pub type Dataset32 = Dataset<f32>;
pub type FittedModel32 = FittedModel<f32>;
