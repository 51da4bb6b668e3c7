//! Partition-of-unity kernel methods for signals on graphs.
//!
//! The pipeline: split a connected weighted graph into `J` clusters by
//! restricted greedy J-center clustering on the sampling set, augment the
//! clusters into overlapping subdomains, put a Shepard partition of unity
//! on the cover, fit a positive definite graph-basis-function kernel
//! (diffusion or variational spline) to the samples inside every subdomain
//! by regularized least squares, and blend the local approximants into a
//! global signal.
//!
//! The [`analysis`] module turns the supporting theory into executable
//! checks: gradient/Laplacian product rules, their norm estimates, and the
//! local-to-global error bounds gated on the partition's boundary
//! condition. [`bench`] drives seeded sampling sweeps against a global GBF
//! baseline.

pub mod analysis;
pub mod approximation;
pub mod bench;
pub mod clustering;
pub mod error;
pub mod graph;
pub mod io;
pub mod kernels;
pub mod partition;
pub mod spectral;
pub mod synthetic;

pub use analysis::{
    measure_local_errors, rrmse, verify_global_bound, verify_norm_estimates,
    verify_product_rule_gradient, verify_product_rule_laplacian, GlobalBoundReport,
    LocalErrorTriple,
};
pub use approximation::{
    evaluate_fit, fit_local, gbf_global, gbf_pum, sample_permutation, KernelSpec, PumApproximant,
    PumConfig, SampleSet, SolveRoute,
};
pub use bench::{run_benchmark, BenchConfig, BenchmarkRow, SignalSpec};
pub use clustering::{
    fill_distance, fill_distance_all, greedy_j_center, optimal_j_center_bruteforce, CenterSet,
    Clustering,
};
pub use error::{Error, Result};
pub use graph::{
    dual_exponent, edge_norm, hybrid_norm, node_norm, DirectedEdge, EdgeFunction, Graph,
    LaplacianKind, MetricKind, Signal, Subgraph,
};
pub use kernels::{
    diffusion_kernel, is_positive_definite_gbf, kernel_from_multipliers, spline_kernel,
    spline_kernel_columns_by_solve, GbfKernel, KernelKind, KernelMatrix,
};
pub use partition::{
    augment_cluster, build_cover, check_boundary_condition, shepard_partition,
    shepard_partition_custom, BoundaryReport, Cover, PartitionOfUnity, PouKind,
};
pub use spectral::{
    bandlimited_signal, eigendecompose, fourier, inverse_fourier, FourierCoefficients, Spectrum,
};
