//! Recovery of epipolar scales (the norms of relative translations) from
//! relative rotations and translation directions.
//!
//! A cycle basis of the viewing graph is extracted ([`cycle_basis`]), each
//! circuit contributes three homogeneous equations in the unknown scales
//! ([`solver`]), and the scales are read off as the null vector of the
//! stacked system. [`synth`] holds the synthetic benchmark harness.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`.

pub mod cycle_basis;
pub mod error;
pub mod geometry;
pub mod gf2;
pub mod graph;
pub mod scalar;
pub mod solver;
pub mod synth;

pub use cycle_basis::{
    compute_basis, fundamental_cycle_basis, horton_candidates, is_null_circuit, minimum_cycle_basis,
    null_filtered_mcb, select_independent, BasisKind, CandidateStats, CycleBasis, NullCircuitTest,
};
pub use error::{Error, Result};
pub use geometry::{
    baseline_versor, compose, geodesic_distance, invert_relative, perturb_direction, perturb_rotation,
    relative_from_absolute, RotationMetric,
};
pub use gf2::{Gf2Eliminator, Gf2Vector};
pub use graph::{circuit_to_gf2, cycle_sum, BiconnectivityReport, Circuit, Traversal, TreeSearch};
pub use scalar::Scalar;
pub use solver::{
    assemble, bearing_constraint_matrix, check_solvability, circuit_constraint_block, solve_scales,
    solve_scales_with, zeller_faugeras_ratio, RankVerdict, SolvabilityReport,
};

pub type Rotation = geometry::Rotation<f64>;
pub type UnitVector3 = geometry::UnitVector3<f64>;
pub type RelativeMotion = geometry::RelativeMotion<f64>;
pub type AbsolutePose = geometry::AbsolutePose<f64>;
pub type EpipolarGraph = graph::EpipolarGraph<f64>;
pub type ConstraintSystem = solver::ConstraintSystem<f64>;
pub type ScaleSolution = solver::ScaleSolution<f64>;

pub type Rotation32 = geometry::Rotation<f32>;
pub type RelativeMotion32 = geometry::RelativeMotion<f32>;
pub type EpipolarGraph32 = graph::EpipolarGraph<f32>;
