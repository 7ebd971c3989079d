//! Linear and convex aggregation of density estimators under L2 risk.
//!
//! The crate is `no_std` (it needs `alloc`) and carries all of the numerical
//! machinery: analytic ground-truth densities, kernels with their Fourier
//! transforms, kernel density estimators, the simplex-constrained quadratic
//! program behind convex aggregation, split-averaged aggregates and the
//! ISE/MISE measurement primitives. IO, parallel Monte-Carlo drivers and the
//! command line live in the `agg-density` crate.
//!
//! Fourier transforms follow the convention `F[f](t) = ∫ e^{i xᵀt} f(x) dx`,
//! so that `φ = F[p]` is the characteristic function of `p` and Plancherel
//! reads `‖f‖² = (2π)^{-d} ∫ |F[f]|²`.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod aggregation;
pub mod densities;
mod error;
pub mod fourier;
pub mod kde;
pub mod kernels;
pub mod linalg;
pub mod math;
pub mod quadrature;
pub mod risk;
pub mod rng;
pub mod simplex_qp;

pub use aggregation::{
    averaged_aggregate, convex_weights, gram_system, inner_product, linear_weights, make_splits,
    multi_kernel_pool, AggregateMode, AggregateWeights, AveragedAggregate, GramSystem,
    InnerProductBackend, SplitRecord, WeightedAggregate,
};
pub use densities::{DensityModel, SamplePoints};
pub use error::{Error, Result};
pub use kde::{bandwidth_grid, split_sizes, BandwidthGrid, KdeEstimator, MinimaxQuantities, SplitScheme};
pub use kernels::{KernelSpec, PinskerFamily};
pub use risk::{DensityEstimate, MiseReport, QuadratureSpec};
pub use rng::SeedProvenance;
pub use simplex_qp::{QpProblem, QpSolution, QpStatus};
