//! Bounds on the smooth rigidity constant
//! `RG_d(Z) = inf { M_{d+1}(f) : f ∈ C^{d+1}, f|_Z = 0, M_0(f) = 1 }`.
//!
//! Lower bounds come from the inverse Remez constant, the grid cardinality
//! formula, measure and interior arguments. The upper bound is an explicit
//! function: a near-extremal polynomial minus a bump at every point of `Z`.
//! Derivative norms sum `|∂^α f|` over distinct multi-indices `|α| = l`.
//!
//! ```
//! use smooth_rigidity::geometry::generate_triangle;
//! use smooth_rigidity::rigidity::{build_report, RigidityConfig};
//!
//! let z = generate_triangle(0.2).unwrap();
//! let report = build_report(&z, 1, &RigidityConfig::default()).unwrap();
//! let lower = report.best_lower();
//! let upper = report.best_upper().unwrap();
//! assert!(0.0 < lower && lower <= upper);
//! ```

mod bounds;
mod report;
mod smooth;
mod sublevel;
mod witness;

pub use bounds::{
    arithmetic_grid_step, grid_hypothesis, interior_lower, rigidity_lower_grid, rigidity_lower_main1,
    rigidity_lower_measure, smooth_remez_check, univariate_grid_check, univariate_grid_lower,
    univariate_rigidity_check, vanishing_derivative_lower, Bound, Provenance, RemezValue, RemezValueKind,
    SmoothRemezCheck, SmoothRemezTerm, UnivariateCheck,
};
pub use report::{
    build_report, Constants, Conventions, LowerBounds, Normalization, RigidityConfig, RigidityReport, UpperBounds,
    DERIVATIVE_CONVENTION, SANDWICH_TOLERANCE,
};
pub use smooth::{
    bump_constant, derivative_norm, derivative_norm_seeded, profile_derivative_norm, Bump, BumpProfile, NormEstimate,
    SmoothFunction,
};
pub use sublevel::{sublevel_example, sublevel_sample, SublevelRecord, SUBLEVEL_TOLERANCE};
pub use witness::{ball_argmax, construct_upper_witness, verify_witness, UpperWitness, WitnessCheck, VANISHING_TOLERANCE};
