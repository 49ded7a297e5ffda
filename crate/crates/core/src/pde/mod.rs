//! Radial n-Laplacian problem with a critical-growth nonlinearity: shooting
//! solver, first eigenvalue, variational energy and condition checks.

pub mod conditions;
pub mod eigen;
pub mod nonlinearity;
pub mod shooting;
pub mod variational;

pub use conditions::{check_conditions, ConditionEntry, ConditionReport, ConditionWitness};
pub use eigen::{eigenfunction, lambda1};
pub use nonlinearity::{
    eval_nonlinearity, Nonlinearity, NonlinearitySpec, NonlinearityValue, ZeroNonlinearity,
};
pub use shooting::{
    boundary_value_fixed, flux_identity_residual, shoot, shoot_opts, solve_bvp, BvpOptions, ShootingResult,
};
pub use variational::{
    energy_i, level_bound, mountain_pass_level, ray_profile, EnergyFunctional, MountainPassResult,
};
