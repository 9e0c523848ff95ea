//! Exact and asymptotic statistics of the decomposition of spinor tensor
//! powers of odd orthogonal Lie algebras into irreducible components.
//!
//! The crate is organized in layers:
//!
//! - [`config`] / [`weights`]: coordinate systems for highest weights
//!   (Dynkin labels, orthogonal coordinates, shifted a-coordinates) and
//!   exact enumeration of the support of the component measure;
//! - [`measure`]: integer/rational multiplicities, Weyl dimensions and the
//!   normalized probability of each component, with an independent
//!   branching-walk oracle for cross-checking;
//! - [`boundary`] / [`limitshape`]: the rescaled profile of a single
//!   component and its deterministic large-rank limit;
//! - [`asymptotics`]: the logarithmic weight of a profile, its exact
//!   constant, and the quadratic functional controlling fluctuations;
//! - [`sampler`]: exact and Markov-chain samplers over components plus
//!   mode search and convergence experiments;
//! - [`numeric`]: quadrature and interpolation utilities shared by the
//!   floating-point layers.

pub mod asymptotics;
pub mod boundary;
pub mod config;
pub mod error;
pub mod limitshape;
pub mod measure;
pub mod numeric;
pub mod sampler;
pub mod weights;

pub use asymptotics::{
    constant_c, decompose, distance_dq, functional_j, linear_term, log_kernel_rect,
    log_weight_asymptotic, potential_v0, quadratic_q, slobodeckij_energy,
    stirling_remainder_bounds, Decomposition, DeviationFunction, FunctionalBreakdown,
    PotentialParams, Profile,
};
pub use boundary::DiagramBoundary;
pub use config::{AlgebraConfig, Parity};
pub use error::{Error, Result};
pub use limitshape::{EquilibriumReport, LimitShape, ShapeRegime};
pub use measure::{
    dimension, dimension_by_roots, log_probability, measure_table, multiplicity,
    normalization_check, oracle_multiplicity, oracle_table, plancherel_probability, DimensionValue,
    MeasureRow, MeasureValue, Multiplicity,
};
pub use sampler::{
    convergence_experiment, convergence_experiment_bounded, exact_sample, mcmc_sample,
    mcmc_sample_bounded, mode_search, mode_search_flagged, move_ratio_exact, ChainState,
    ConvergenceRow, GriddedFunction, SampleReport,
};
pub use weights::{
    acoords_to_dynkin, acoords_to_orthogonal, dynkin_to_acoords, dynkin_to_orthogonal,
    enumerate_support, enumerate_support_with_cap, minimal_acoords, orthogonal_to_dynkin,
    support_candidate_count, ACoordinates, DynkinLabels, OrthogonalWeight, WeightRecord,
    DEFAULT_ENUMERATION_CAP,
};
