//! Positive temperatures generated by measures on a ray.
//!
//! The crate evaluates `u(x, t) = (4 pi kappa t)^-1 int exp(-|x - y|^2 / 4 kappa t) dmu(y)`
//! for measures `mu` supported on a ray, compares it with the closed-form
//! large-`|x|` behaviour in each angular regime, and recovers the measure's
//! mass function from the small-time limit of disk integrals.
//!
//! All magnitudes travel as [`LogValue`]s so that factors like
//! `exp(-2500)` remain representable.

pub mod asymptotics;
pub mod error;
pub mod kernel;
pub mod logval;
pub mod measure;
pub mod quadrature;
pub mod special;
pub mod tauberian;
pub mod weber;

pub use asymptotics::{
    asym_log, classify_regime, constant_audit, convergence_sweep, fit_log_model,
    remainder_ratio_sweep, AuditReport, LogModel, Regime, RemainderSweep, Sweep, SweepRow,
    SweepSpec,
};
pub use error::{Error, Result};
pub use kernel::{
    heat_kernel_log, temperature_on_axis, temperature_parts, temperature_stieltjes, EvalParams,
    RayTemperature,
};
pub use logval::{LogSum, LogValue};
pub use measure::{
    eval_counting, tail_condition_check, tail_condition_check_log, Atoms, CountingFunction,
    FieldPoint, Mode, Perturbed, PowerLaw, RayGeometry, Remainder, TailVerdict,
};
pub use quadrature::{quadrature_log, QuadOutcome};
pub use tauberian::{
    angular_moment_identity, disk_mass, fit_power_law, recover, recover_mass,
    remainder_uniformity_scan, segment_mean, Piecewise, PolarQuadrature, RecoveredMass,
    RecoveryReport, RecoverySpec, Temperature, TrigProfile,
};
pub use weber::{
    pochhammer, u0_closed_form, weber_asymptotic, weber_auto, weber_evaluate, weber_integral,
    SeriesResult, WeberMethod, WeberQuery, WeberReport,
};
