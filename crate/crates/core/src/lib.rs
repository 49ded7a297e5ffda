//! Numerical laboratory for supercritical Moser–Trudinger functionals on
//! radial functions over the unit ball, together with a shooting solver for
//! the radial n-Laplacian problem with critical exponential growth.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod families;
pub mod functionals;
pub mod maximizer;
pub mod numerics;
pub mod ode;
pub mod pde;
pub mod radial;

pub use error::{Error, Result};
pub use families::{
    blowup_table, concentrating_function, moser_function, mountain_pass_function, BlowupRow,
    ConcentratingParams, MoserParams,
};
pub use functionals::{
    check_profile_conditions, eval_functional, eval_mt_constant_lower_bound, objective_gradient,
    DiscreteFunctional, EvalResult, FunctionalKind, FunctionalSpec, Profile, ProfileParams,
    ProfileReport, ProfileWhich,
};
pub use maximizer::{
    certified_gap_report, divergence_probe, maximize, Comparator, DivergenceReport, GapReport, GapVerdict,
    MaximizerOptions, MaximizerReport, StartDescriptor, Status,
};
pub use radial::{
    constants_for, dirichlet_energy, normalize, pointwise_bound, DimensionConstants, Grading,
    RadialFunction, RadialGrid,
};
